use std::collections::BTreeMap;
use std::fmt;

use super::field::{Field, FieldElement};
use super::ScalarError;

/// Sparse vector: `(index, value)` pairs sorted by index, no stored zeros.
pub type SparseVec = Vec<(usize, FieldElement)>;

/// Accumulates `(index, value)` contributions into a canonical sparse vector.
pub fn collect_sparse(it: impl IntoIterator<Item = (usize, FieldElement)>) -> SparseVec {
    let mut acc: BTreeMap<usize, FieldElement> = BTreeMap::new();
    for (i, v) in it {
        if v.is_zero() {
            continue;
        }
        match acc.get_mut(&i) {
            Some(x) => *x += &v,
            None => {
                acc.insert(i, v);
            }
        }
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

pub fn sparse_to_dense(v: &SparseVec, n: usize, field: Field) -> Vec<FieldElement> {
    let mut out = vec![field.zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

pub fn dense_to_sparse(v: &[FieldElement]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn sparse_dot(a: &SparseVec, b: &SparseVec, field: Field) -> FieldElement {
    let mut acc = field.zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += &(&a[i].1 * &b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

pub fn sparse_scale(v: &SparseVec, c: &FieldElement) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x * c)).collect()
}

pub fn sparse_add(a: &SparseVec, b: &SparseVec) -> SparseVec {
    collect_sparse(a.iter().cloned().chain(b.iter().cloned()))
}

/// Exact sparse matrix stored by columns.
///
/// Column-major storage suits the two hot paths: applying a matrix to a
/// sparse vector and composing maps column by column.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    columns: Vec<SparseVec>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let one = field.one();
        Matrix {
            field,
            rows: n,
            cols: n,
            columns: (0..n).map(|i| vec![(i, one.clone())]).collect(),
        }
    }

    /// Columns may be unsorted or contain duplicates and zeros.
    pub fn from_columns(field: Field, rows: usize, columns: Vec<SparseVec>) -> Self {
        let cols = columns.len();
        let columns: Vec<SparseVec> = columns.into_iter().map(collect_sparse).collect();
        debug_assert!(columns.iter().all(|c| c.iter().all(|(i, _)| *i < rows)));
        Matrix { field, rows, cols, columns }
    }

    /// Columns must already be canonical sparse vectors.
    pub(crate) fn from_canonical_columns(field: Field, rows: usize, columns: Vec<SparseVec>) -> Self {
        let cols = columns.len();
        Matrix { field, rows, cols, columns }
    }

    /// Builds from dense rows.
    pub fn from_rows(field: Field, rows: &[Vec<FieldElement>]) -> Result<Self, ScalarError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zeros(field, nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(ScalarError::Shape(format!("ragged row {i}")));
            }
            for (j, x) in row.iter().enumerate() {
                if x.field() != field {
                    return Err(ScalarError::MixedField {
                        left: field.to_string(),
                        right: x.field().to_string(),
                    });
                }
                if !x.is_zero() {
                    m.columns[j].push((i, x.clone()));
                }
            }
        }
        Ok(m)
    }

    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> FieldElement,
    ) -> Self {
        let columns = (0..cols)
            .map(|j| {
                (0..rows)
                    .filter_map(|i| {
                        let x = f(i, j);
                        (!x.is_zero()).then_some((i, x))
                    })
                    .collect()
            })
            .collect();
        Matrix { field, rows, cols, columns }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        match self.columns[j].binary_search_by_key(&i, |(r, _)| *r) {
            Ok(k) => self.columns[j][k].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        collect_sparse(v.iter().flat_map(|(j, x)| {
            self.columns[*j].iter().map(move |(i, a)| (*i, a * x))
        }))
    }

    pub fn apply_dense(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        sparse_to_dense(&self.apply(&dense_to_sparse(v)), self.rows, self.field)
    }

    /// `self * other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix, ScalarError> {
        if self.cols != other.rows {
            return Err(ScalarError::Shape(format!(
                "cannot compose {}x{} after {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = other.columns.iter().map(|c| self.apply(c)).collect();
        Ok(Matrix { field: self.field, rows: self.rows, cols: other.cols, columns })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, ScalarError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(ScalarError::Shape("sum of differently shaped matrices".into()));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| sparse_add(a, b))
            .collect();
        Ok(Matrix { field: self.field, rows: self.rows, cols: self.cols, columns })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, ScalarError> {
        self.add(&other.scale(&self.field.from_int(-1)))
    }

    pub fn scale(&self, c: &FieldElement) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            columns: self.columns.iter().map(|col| sparse_scale(col, c)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut columns: Vec<SparseVec> = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, x) in col {
                columns[*i].push((j, x.clone()));
            }
        }
        Matrix { field: self.field, rows: self.cols, cols: self.rows, columns }
    }

    /// Kronecker product with left-major index order: `(i, j) -> i * n + j`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let rows = self.rows * other.rows;
        let mut columns = Vec::with_capacity(self.cols * other.cols);
        for a in &self.columns {
            for b in &other.columns {
                let mut col = Vec::with_capacity(a.len() * b.len());
                for (i, x) in a {
                    for (k, y) in b {
                        col.push((i * other.rows + k, x * y));
                    }
                }
                columns.push(col);
            }
        }
        Matrix { field: self.field, rows, cols: self.cols * other.cols, columns }
    }

    pub fn trace(&self) -> FieldElement {
        let mut acc = self.field.zero();
        for j in 0..self.cols.min(self.rows) {
            if let Ok(k) = self.columns[j].binary_search_by_key(&j, |(r, _)| *r) {
                acc += &self.columns[j][k].1;
            }
        }
        acc
    }

    pub fn to_dense(&self) -> Vec<Vec<FieldElement>> {
        let mut out = vec![vec![self.field.zero(); self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, x) in col {
                out[*i][j] = x.clone();
            }
        }
        out
    }

    /// Rows as sparse vectors.
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        self.transpose().columns
    }

    /// Rank-one matrix `v w^T`.
    pub fn outer(field: Field, v: &SparseVec, rows: usize, w: &SparseVec, cols: usize) -> Matrix {
        let mut columns = vec![Vec::new(); cols];
        for (j, y) in w {
            columns[*j] = v.iter().map(|(i, x)| (*i, x * y)).collect();
        }
        Matrix { field, rows, cols, columns }
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        super::solve::inverse(self)
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let rows = self.rows + other.rows;
        let mut columns = self.columns.clone();
        for c in &other.columns {
            columns.push(c.iter().map(|(i, x)| (i + self.rows, x.clone())).collect());
        }
        Matrix { field: self.field, rows, cols: self.cols + other.cols, columns }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.to_dense()
                .iter()
                .map(|r| serde_json::Value::Array(r.iter().map(|x| x.to_json()).collect()))
                .collect(),
        )
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        if self.rows * self.cols <= 256 {
            for row in self.to_dense() {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                writeln!(f, "  [{}]", cells.join(", "))?;
            }
        } else {
            writeln!(f, "  ({} nonzeros)", self.nnz())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> FieldElement {
        Field::Rational.from_int(n)
    }

    #[test]
    fn kron_index_order() {
        let a = Matrix::from_rows(Field::Rational, &[vec![q(1), q(2)], vec![q(3), q(4)]]).unwrap();
        let b = Matrix::from_rows(Field::Rational, &[vec![q(0), q(1)], vec![q(1), q(0)]]).unwrap();
        let k = a.kron(&b);
        // entry ((i1,i2),(j1,j2)) = a[i1][j1] * b[i2][j2]
        assert_eq!(k.get(1, 0), q(1));
        assert_eq!(k.get(3, 0), q(3));
        assert_eq!(k.get(2, 3), q(4));
    }

    #[test]
    fn inverse_and_product() {
        let a = Matrix::from_rows(Field::Rational, &[vec![q(2), q(1)], vec![q(1), q(1)]]).unwrap();
        let ai = a.inverse().unwrap();
        assert_eq!(a.mul(&ai).unwrap(), Matrix::identity(Field::Rational, 2));
        let s = Matrix::from_rows(Field::Rational, &[vec![q(1), q(2)], vec![q(2), q(4)]]).unwrap();
        assert!(s.inverse().is_none());
    }
}
