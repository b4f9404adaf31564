use std::collections::BTreeMap;

use crate::scalars::{collect_sparse, Field, FieldElement, Matrix, RowReducer, SparseVec};

use super::{signature_dim, DiagramError, SliceDiagram, Strand};

/// A strand joining the two halves of a [`BridgedDiagram`]. Slot indices
/// count bond strands only, in order.
#[derive(Clone)]
pub enum Bond {
    /// `1 -> U ⊗ V` feeding a left input slot and a right input slot.
    Cup { matrix: Matrix, left_in: usize, right_in: usize },
    /// `U ⊗ V -> 1` fed by a left output slot and a right output slot.
    Cap { matrix: Matrix, left_out: usize, right_out: usize },
    RightToLeft { right_out: usize, left_in: usize },
    LeftToRight { left_out: usize, right_in: usize },
}

/// A diagram split into a left and a right half that meet only along
/// bonds. The value is a short sum of Kronecker products, which keeps the
/// evaluation cost at the size of the halves.
///
/// The left half's boundary is its outer strands followed by its bond
/// slots; the right half's is its bond slots followed by its outer strands.
#[derive(Clone)]
pub struct BridgedDiagram {
    pub left: SliceDiagram,
    pub right: SliceDiagram,
    /// Number of outer strands at the bottom and top of the left half.
    pub left_outer: (usize, usize),
    /// Number of outer strands at the bottom and top of the right half.
    pub right_outer: (usize, usize),
    pub bonds: Vec<Bond>,
}

struct Sides<'a> {
    outer_bottom: &'a [Strand],
    slots_bottom: &'a [Strand],
    outer_top: &'a [Strand],
    slots_top: &'a [Strand],
}

fn radix(dims: &[usize], idx: &[usize]) -> usize {
    dims.iter().zip(idx).fold(0, |acc, (d, i)| acc * d + i)
}

impl BridgedDiagram {
    fn left_sides(&self) -> Sides<'_> {
        let (b, t) = self.left_outer;
        Sides {
            outer_bottom: &self.left.bottom[..b],
            slots_bottom: &self.left.bottom[b..],
            outer_top: &self.left.top[..t],
            slots_top: &self.left.top[t..],
        }
    }

    fn right_sides(&self) -> Sides<'_> {
        let (b, t) = self.right_outer;
        let nb = self.right.bottom.len() - b;
        let nt = self.right.top.len() - t;
        Sides {
            outer_bottom: &self.right.bottom[nb..],
            slots_bottom: &self.right.bottom[..nb],
            outer_top: &self.right.top[nt..],
            slots_top: &self.right.top[..nt],
        }
    }

    pub fn bottom(&self) -> Vec<Strand> {
        let mut s = self.left_sides().outer_bottom.to_vec();
        s.extend(self.right_sides().outer_bottom.iter().cloned());
        s
    }

    pub fn top(&self) -> Vec<Strand> {
        let mut s = self.left_sides().outer_top.to_vec();
        s.extend(self.right_sides().outer_top.iter().cloned());
        s
    }

    fn check_bonds(&self) -> Result<(), DiagramError> {
        let (l, r) = (self.left_sides(), self.right_sides());
        let mut used = [vec![false; l.slots_bottom.len()], vec![false; l.slots_top.len()], vec![
            false;
            r.slots_bottom.len()
        ], vec![false; r.slots_top.len()]];
        let mut mark = |side: usize, i: usize| -> Result<(), DiagramError> {
            match used[side].get_mut(i) {
                Some(u) if !*u => {
                    *u = true;
                    Ok(())
                }
                _ => Err(DiagramError::Format(format!("bond slot {i} on side {side} missing or reused"))),
            }
        };
        for b in &self.bonds {
            match b {
                Bond::Cup { matrix, left_in, right_in } => {
                    mark(0, *left_in)?;
                    mark(2, *right_in)?;
                    let n = l.slots_bottom[*left_in].dim() * r.slots_bottom[*right_in].dim();
                    if matrix.rows() != n || matrix.cols() != 1 {
                        return Err(DiagramError::Format("cup shape".into()));
                    }
                }
                Bond::Cap { matrix, left_out, right_out } => {
                    mark(1, *left_out)?;
                    mark(3, *right_out)?;
                    let n = l.slots_top[*left_out].dim() * r.slots_top[*right_out].dim();
                    if matrix.cols() != n || matrix.rows() != 1 {
                        return Err(DiagramError::Format("cap shape".into()));
                    }
                }
                Bond::RightToLeft { right_out, left_in } => {
                    mark(3, *right_out)?;
                    mark(0, *left_in)?;
                    if !r.slots_top[*right_out].matches(&l.slots_bottom[*left_in]) {
                        return Err(DiagramError::Format("pass strand colors differ".into()));
                    }
                }
                Bond::LeftToRight { left_out, right_in } => {
                    mark(1, *left_out)?;
                    mark(2, *right_in)?;
                    if !l.slots_top[*left_out].matches(&r.slots_bottom[*right_in]) {
                        return Err(DiagramError::Format("pass strand colors differ".into()));
                    }
                }
            }
        }
        if used.iter().flatten().any(|u| !u) {
            return Err(DiagramError::Format("unconnected bond slot".into()));
        }
        Ok(())
    }

    /// Evaluates both halves and contracts the bonds.
    pub fn evaluate(&self) -> Result<KronSum, DiagramError> {
        self.left.validate()?;
        self.right.validate()?;
        self.check_bonds()?;
        let f = self.left.field();
        let (l, r) = (self.left_sides(), self.right_sides());
        let dims = |s: &[Strand]| s.iter().map(Strand::dim).collect::<Vec<_>>();
        let (lin_d, lout_d, rin_d, rout_d) =
            (dims(l.slots_bottom), dims(l.slots_top), dims(r.slots_bottom), dims(r.slots_top));

        // each bond contributes a list of (slot assignments, coefficient)
        type Choice = (Vec<(usize, usize, usize)>, FieldElement);
        let mut choices: Vec<Vec<Choice>> = Vec::new();
        for b in &self.bonds {
            let mut opts = Vec::new();
            match b {
                Bond::Cup { matrix, left_in, right_in } => {
                    let v = rin_d[*right_in];
                    for (idx, c) in matrix.column(0) {
                        opts.push((vec![(0, *left_in, idx / v), (2, *right_in, idx % v)], c.clone()));
                    }
                }
                Bond::Cap { matrix, left_out, right_out } => {
                    let v = rout_d[*right_out];
                    for idx in 0..matrix.cols() {
                        for (_, c) in matrix.column(idx) {
                            opts.push((vec![(1, *left_out, idx / v), (3, *right_out, idx % v)], c.clone()));
                        }
                    }
                }
                Bond::RightToLeft { right_out, left_in } => {
                    for p in 0..rout_d[*right_out] {
                        opts.push((vec![(3, *right_out, p), (0, *left_in, p)], f.one()));
                    }
                }
                Bond::LeftToRight { left_out, right_in } => {
                    for p in 0..lout_d[*left_out] {
                        opts.push((vec![(1, *left_out, p), (2, *right_in, p)], f.one()));
                    }
                }
            }
            choices.push(opts);
        }

        // group by the left-half block so each A is built once
        let mut groups: BTreeMap<(usize, usize), Vec<(FieldElement, usize, usize)>> = BTreeMap::new();
        let mut pick = vec![0usize; choices.len()];
        if choices.iter().all(|c| !c.is_empty()) {
            loop {
                let mut idx = [vec![0; lin_d.len()], vec![0; lout_d.len()], vec![0; rin_d.len()], vec![0; rout_d.len()]];
                let mut coef = f.one();
                for (k, &p) in pick.iter().enumerate() {
                    let (assign, c) = &choices[k][p];
                    for &(side, slot, val) in assign {
                        idx[side][slot] = val;
                    }
                    coef = &coef * c;
                }
                let key = (radix(&lin_d, &idx[0]), radix(&lout_d, &idx[1]));
                groups.entry(key).or_default().push((coef, radix(&rin_d, &idx[2]), radix(&rout_d, &idx[3])));
                // odometer
                let mut k = 0;
                loop {
                    if k == pick.len() {
                        break;
                    }
                    pick[k] += 1;
                    if pick[k] < choices[k].len() {
                        break;
                    }
                    pick[k] = 0;
                    k += 1;
                }
                if k == pick.len() {
                    break;
                }
            }
        }

        let lmat = self.left.evaluate()?;
        let rmat = self.right.evaluate()?;
        let (lin, lout) = (lin_d.iter().product::<usize>(), lout_d.iter().product::<usize>());
        let (lb, lt) = (signature_dim(l.outer_bottom), signature_dim(l.outer_top));
        let (rb, rt) = (signature_dim(r.outer_bottom), signature_dim(r.outer_top));

        let mut terms = Vec::new();
        for ((li, lo), parts) in groups {
            let a = Matrix::from_columns(
                f,
                lt,
                (0..lb)
                    .map(|c| {
                        lmat.column(c * lin + li)
                            .iter()
                            .filter(|(row, _)| row % lout == lo)
                            .map(|(row, x)| (row / lout, x.clone()))
                            .collect()
                    })
                    .collect(),
            );
            if a.is_zero() {
                continue;
            }
            // B = Σ coef · R[(ro, rt), (ri, rb)]
            let b_cols: Vec<SparseVec> = (0..rb)
                .map(|c| {
                    collect_sparse(parts.iter().flat_map(|(coef, ri, ro)| {
                        rmat.column(ri * rb + c)
                            .iter()
                            .filter(move |(row, _)| row / rt == *ro)
                            .map(move |(row, x)| (row % rt, coef * x))
                    }))
                })
                .collect();
            let b = Matrix::from_columns(f, rt, b_cols);
            if !b.is_zero() {
                terms.push((a, b));
            }
        }
        Ok(KronSum { field: f, shape_left: (lt, lb), shape_right: (rt, rb), terms })
    }
}

/// `Σ A_j ⊗ B_j` kept unexpanded.
#[derive(Clone, Debug)]
pub struct KronSum {
    field: Field,
    shape_left: (usize, usize),
    shape_right: (usize, usize),
    pub terms: Vec<(Matrix, Matrix)>,
}

fn flatten(m: &Matrix) -> SparseVec {
    let rows = m.rows();
    m.columns().iter().enumerate().flat_map(|(c, col)| col.iter().map(move |(r, x)| (c * rows + r, x.clone()))).collect()
}

fn lookup(v: &SparseVec, i: usize) -> Option<&FieldElement> {
    v.binary_search_by_key(&i, |(k, _)| *k).ok().map(|p| &v[p].1)
}

/// Coordinates of each vector in a basis chosen among them.
fn coordinates(vs: &[SparseVec], len: usize, f: Field) -> Vec<Vec<FieldElement>> {
    let mut red = RowReducer::new(f, len);
    let basis: Vec<usize> = (0..vs.len()).filter(|&j| red.push(&vs[j])).collect();
    let piv = red.pivot_columns();
    let r = basis.len();
    if r == 0 {
        return vec![Vec::new(); vs.len()];
    }
    let q = Matrix::from_fn(f, r, r, |i, s| lookup(&vs[basis[s]], piv[i]).cloned().unwrap_or_else(|| f.zero()));
    let qi = q.inverse().expect("pivot minor of independent vectors is invertible");
    vs.iter()
        .map(|v| {
            let restricted: SparseVec =
                piv.iter().enumerate().filter_map(|(i, p)| lookup(v, *p).map(|x| (i, x.clone()))).collect();
            crate::scalars::sparse_to_dense(&qi.apply(&restricted), r, f)
        })
        .collect()
}

impl KronSum {
    pub fn shape(&self) -> (usize, usize) {
        (self.shape_left.0 * self.shape_right.0, self.shape_left.1 * self.shape_right.1)
    }

    /// The expanded matrix; only for small shapes.
    pub fn to_matrix(&self) -> Matrix {
        let (rows, cols) = self.shape();
        let mut acc = Matrix::zeros(self.field, rows, cols);
        for (a, b) in &self.terms {
            acc = acc.add(&a.kron(b)).expect("shapes");
        }
        acc
    }

    /// Column `c` of the expanded matrix.
    pub fn column(&self, c: usize) -> SparseVec {
        let rb = self.shape_right.1;
        let rt = self.shape_right.0;
        let (i, j) = (c / rb, c % rb);
        collect_sparse(self.terms.iter().flat_map(|(a, b)| {
            a.column(i).iter().flat_map(move |(r, x)| b.column(j).iter().map(move |(s, y)| (r * rt + s, x * y)))
        }))
    }

    /// Exact test of `Σ A_j ⊗ B_j = a ⊗ b` through coordinates in bases of
    /// the spans of the left and right factors.
    pub fn equals_kron(&self, a: &Matrix, b: &Matrix) -> bool {
        let f = self.field;
        if (a.rows(), a.cols()) != self.shape_left || (b.rows(), b.cols()) != self.shape_right {
            return false;
        }
        let mut lefts: Vec<SparseVec> = self.terms.iter().map(|(x, _)| flatten(x)).collect();
        let mut rights: Vec<SparseVec> = self.terms.iter().map(|(_, y)| flatten(y)).collect();
        lefts.push(flatten(a));
        rights.push(flatten(b));
        let n = lefts.len();
        let xs = coordinates(&lefts, self.shape_left.0 * self.shape_left.1, f);
        let ys = coordinates(&rights, self.shape_right.0 * self.shape_right.1, f);
        let (ra, rb) = (xs[0].len(), ys[0].len());
        let mut m = vec![vec![f.zero(); rb]; ra];
        for j in 0..n {
            let sign = if j + 1 == n { -f.one() } else { f.one() };
            for (p, x) in xs[j].iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let sx = x * &sign;
                for (q, y) in ys[j].iter().enumerate() {
                    m[p][q] += &(&sx * y);
                }
            }
        }
        m.iter().flatten().all(FieldElement::is_zero)
    }

    /// First column where the sum differs from `a ⊗ b`, with both columns.
    pub fn first_difference(&self, a: &Matrix, b: &Matrix) -> Option<(usize, SparseVec, SparseVec)> {
        let target = KronSum { field: self.field, shape_left: self.shape_left, shape_right: self.shape_right, terms: vec![(a.clone(), b.clone())] };
        (0..self.shape().1).find_map(|c| {
            let (x, y) = (self.column(c), target.column(c));
            (x != y).then_some((c, x, y))
        })
    }
}
