use std::collections::BTreeMap;

use super::field::{Field, FieldElement};
use super::matrix::{Matrix, SparseVec};
use super::ScalarError;

/// What `solve_linear_system` should return.
#[derive(Clone, Debug)]
pub enum SolveMode {
    /// A basis of `{x : A x = 0}`.
    Nullspace,
    /// One solution of `A x = b`, free variables set to zero.
    Particular(Vec<FieldElement>),
}

/// Incremental row echelon form over sparse rows.
///
/// Pivots are chosen as the first nonzero entry of each reduced row, so the
/// result depends only on the order rows are pushed.
pub struct RowReducer {
    field: Field,
    ncols: usize,
    pivots: BTreeMap<usize, SparseVec>,
}

impl RowReducer {
    pub fn new(field: Field, ncols: usize) -> Self {
        RowReducer { field, ncols, pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Reduces `row` against the current pivots. Returns the remainder.
    fn reduce(&self, row: &SparseVec) -> BTreeMap<usize, FieldElement> {
        let mut r: BTreeMap<usize, FieldElement> =
            row.iter().filter(|(_, x)| !x.is_zero()).cloned().collect();
        let mut cursor = 0usize;
        loop {
            let next = r.range(cursor..).next().map(|(c, v)| (*c, v.clone()));
            let Some((c, v)) = next else { break };
            if let Some(prow) = self.pivots.get(&c) {
                for (k, pv) in prow {
                    let t = &v * pv;
                    let remove = match r.get_mut(k) {
                        Some(x) => {
                            *x -= &t;
                            x.is_zero()
                        }
                        None => {
                            r.insert(*k, -t);
                            false
                        }
                    };
                    if remove {
                        r.remove(k);
                    }
                }
            }
            cursor = c + 1;
        }
        r
    }

    /// Adds a row; returns `true` if it was independent of earlier rows.
    pub fn push(&mut self, row: &SparseVec) -> bool {
        let r = self.reduce(row);
        let Some((&lead, lv)) = r.iter().next() else { return false };
        let inv = lv.inv().expect("nonzero leading entry");
        let normalized: SparseVec = r.iter().map(|(k, x)| (*k, x * &inv)).collect();
        self.pivots.insert(lead, normalized);
        true
    }

    /// Whether `row` lies in the span of the pushed rows.
    pub fn contains(&self, row: &SparseVec) -> bool {
        self.reduce(row).is_empty()
    }

    /// Fully reduced rows keyed by pivot column.
    fn rref(&self) -> BTreeMap<usize, SparseVec> {
        let mut done: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (&c, row) in self.pivots.iter().rev() {
            let mut acc: BTreeMap<usize, FieldElement> = row.iter().cloned().collect();
            let later: Vec<(usize, FieldElement)> = row
                .iter()
                .filter(|(k, _)| *k != c && done.contains_key(k))
                .cloned()
                .collect();
            for (k, f) in later {
                for (j, x) in &done[&k] {
                    let t = &f * x;
                    let entry = acc.entry(*j).or_insert_with(|| self.field.zero());
                    *entry -= &t;
                }
            }
            let reduced: SparseVec = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
            done.insert(c, reduced);
        }
        done
    }

    /// Pivot columns in ascending order.
    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.keys().copied().collect()
    }

    /// Nullspace basis as sparse vectors, one per free column in ascending
    /// order; the vector for free column `f` has a 1 at `f` and zeros at the
    /// other free columns.
    pub fn nullspace(&self) -> Vec<SparseVec> {
        let rref = self.rref();
        // column -> list of (pivot col, coefficient) for quick lookup
        let mut by_col: BTreeMap<usize, Vec<(usize, FieldElement)>> = BTreeMap::new();
        for (&p, row) in &rref {
            for (k, x) in row {
                if *k != p {
                    by_col.entry(*k).or_default().push((p, x.clone()));
                }
            }
        }
        (0..self.ncols)
            .filter(|c| !rref.contains_key(c))
            .map(|f| {
                let mut v: SparseVec = vec![(f, self.field.one())];
                if let Some(entries) = by_col.get(&f) {
                    v.extend(entries.iter().map(|(p, x)| (*p, -x)));
                }
                v.sort_by_key(|(i, _)| *i);
                v
            })
            .collect()
    }

    /// A solution of the system whose last column is the right-hand side.
    fn particular(&self) -> Result<SparseVec, ScalarError> {
        let rhs = self.ncols - 1;
        if self.pivots.contains_key(&rhs) {
            return Err(ScalarError::NoSolution);
        }
        let rref = self.rref();
        let mut out = Vec::new();
        for (&p, row) in &rref {
            if let Ok(k) = row.binary_search_by_key(&rhs, |(i, _)| *i) {
                out.push((p, row[k].1.clone()));
            }
        }
        Ok(out)
    }
}

fn check_field(a: &Matrix, v: &[FieldElement]) -> Result<(), ScalarError> {
    for x in v {
        if x.field() != a.field() {
            return Err(ScalarError::MixedField {
                left: a.field().to_string(),
                right: x.field().to_string(),
            });
        }
    }
    Ok(())
}

/// Exact linear solver.
///
/// `Nullspace` returns a basis of the kernel (possibly empty). `Particular`
/// returns a single solution vector, or `NoSolution` when inconsistent.
pub fn solve_linear_system(a: &Matrix, mode: SolveMode) -> Result<Vec<Vec<FieldElement>>, ScalarError> {
    let field = a.field();
    match mode {
        SolveMode::Nullspace => {
            let mut red = RowReducer::new(field, a.cols());
            for row in a.row_vectors() {
                red.push(&row);
            }
            Ok(red
                .nullspace()
                .iter()
                .map(|v| super::matrix::sparse_to_dense(v, a.cols(), field))
                .collect())
        }
        SolveMode::Particular(b) => {
            if b.len() != a.rows() {
                return Err(ScalarError::Shape(format!(
                    "right-hand side has length {}, expected {}",
                    b.len(),
                    a.rows()
                )));
            }
            check_field(a, &b)?;
            let n = a.cols();
            let mut red = RowReducer::new(field, n + 1);
            for (i, mut row) in a.row_vectors().into_iter().enumerate() {
                if !b[i].is_zero() {
                    row.push((n, b[i].clone()));
                }
                red.push(&row);
            }
            let sol = red.particular()?;
            Ok(vec![super::matrix::sparse_to_dense(&sol, n, field)])
        }
    }
}

pub(crate) fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    let field = a.field();
    // reduce [A | I] row by row; invertible iff every pivot lands in A
    let mut red = RowReducer::new(field, 2 * n);
    for (i, mut row) in a.row_vectors().into_iter().enumerate() {
        row.push((n + i, field.one()));
        red.push(&row);
    }
    let rref = red.rref();
    if (0..n).any(|c| !rref.contains_key(&c)) {
        return None;
    }
    let mut columns: Vec<SparseVec> = vec![Vec::new(); n];
    for (&p, row) in &rref {
        for (k, x) in row {
            if *k >= n {
                columns[k - n].push((p, x.clone()));
            }
        }
    }
    Some(Matrix::from_columns(field, n, columns))
}

/// Rank of a matrix.
pub fn rank(a: &Matrix) -> usize {
    let mut red = RowReducer::new(a.field(), a.cols());
    for row in a.row_vectors() {
        red.push(&row);
    }
    red.rank()
}
