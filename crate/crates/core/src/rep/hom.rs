use crate::scalars::{dense_to_sparse, solve_linear_system, Matrix, RowReducer, SolveMode, SparseVec};

use super::module::{trivial, Module};
use super::morphism::Morphism;
use super::RepError;

// unknown T[r][c] sits at variable c * rows + r
fn intertwining_rows(m: &Module, n: &Module, elements: &[usize]) -> Vec<SparseVec> {
    let (rows, cols) = (n.dim(), m.dim());
    let mut out = Vec::new();
    for &x in elements {
        let nt = n.action(x).transpose();
        let am = m.action(x);
        for c in 0..cols {
            for r in 0..rows {
                let mut row: SparseVec = nt.column(r).iter().map(|(k, v)| (c * rows + k, v.clone())).collect();
                for (k, v) in am.column(c) {
                    row.push((k * rows + r, -v));
                }
                let row = crate::scalars::collect_sparse(row);
                if !row.is_empty() {
                    out.push(row);
                }
            }
        }
    }
    out
}

fn to_morphisms(m: &Module, n: &Module, basis: Vec<SparseVec>) -> Result<Vec<Morphism>, RepError> {
    let f = m.algebra().field();
    let rows = n.dim();
    basis
        .into_iter()
        .map(|v| {
            let mut cols = vec![Vec::new(); m.dim()];
            for (k, x) in v {
                cols[k / rows].push((k % rows, x));
            }
            Morphism::unchecked(m.clone(), n.clone(), Matrix::from_columns(f, rows, cols))
        })
        .collect()
}

/// A basis of `Hom_H(m, n)`, solving only over algebra generators.
pub fn hom_space(m: &Module, n: &Module) -> Result<Vec<Morphism>, RepError> {
    if !m.same_algebra(n) {
        return Err(RepError::AlgebraMismatch);
    }
    let mut red = RowReducer::new(m.algebra().field(), m.dim() * n.dim());
    for row in intertwining_rows(m, n, m.algebra().generators()) {
        red.push(&row);
    }
    to_morphisms(m, n, red.nullspace())
}

/// Same space, imposing the relation for every basis element through the
/// dense solver. Slower; kept as an independent route.
pub fn hom_space_dense(m: &Module, n: &Module) -> Result<Vec<Morphism>, RepError> {
    if !m.same_algebra(n) {
        return Err(RepError::AlgebraMismatch);
    }
    let h = m.algebra();
    let all: Vec<usize> = (0..h.dim()).collect();
    let rows = intertwining_rows(m, n, &all);
    let nvars = m.dim() * n.dim();
    let mut cols = vec![Vec::new(); nvars];
    for (i, row) in rows.iter().enumerate() {
        for (k, x) in row {
            cols[*k].push((i, x.clone()));
        }
    }
    let system = Matrix::from_columns(h.field(), rows.len(), cols);
    let basis = solve_linear_system(&system, SolveMode::Nullspace)?;
    to_morphisms(m, n, basis.iter().map(|v| dense_to_sparse(v)).collect())
}

/// Invariant vectors of `y`, i.e. `Hom(1, y)`.
pub fn invariants(y: &Module) -> Result<Vec<SparseVec>, RepError> {
    let one = trivial(y.algebra());
    Ok(hom_space(&one, y)?.into_iter().map(|f| f.matrix.column(0).clone()).collect())
}

/// Invariant covectors of `y`, i.e. `Hom(y, 1)`.
pub fn coinvariants(y: &Module) -> Result<Vec<SparseVec>, RepError> {
    let one = trivial(y.algebra());
    Ok(hom_space(y, &one)?.into_iter().map(|f| f.matrix.row_vectors().remove(0)).collect())
}
