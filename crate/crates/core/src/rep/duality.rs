use crate::scalars::{Field, Matrix, SparseVec};

use super::module::{dual_left, dual_right, tensor, trivial, HModule, Module};
use super::morphism::Morphism;
use super::RepError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Canonical evaluation and coevaluation for `m`.
///
/// `Left`: `M* ⊗ M -> 1` and `1 -> M ⊗ M*`. `Right`: the same maps for the
/// right dual, `M ⊗ *M -> 1` and `1 -> *M ⊗ M`.
pub fn ev_coev(m: &Module, side: Side) -> Result<(Morphism, Morphism), RepError> {
    let h = m.algebra();
    let f = h.field();
    let n = m.dim();
    let one = trivial(h);
    let (ev_src, coev_tgt) = match side {
        Side::Left => {
            let d = dual_left(m);
            (tensor(&d, m)?, tensor(m, &d)?)
        }
        Side::Right => {
            let d = dual_right(m);
            (tensor(m, &d)?, tensor(&d, m)?)
        }
    };
    let ev = pairing_matrix(f, n);
    let coev = copairing_matrix(f, n);
    Ok((
        Morphism::unchecked(ev_src, one.clone(), ev)?,
        Morphism::unchecked(one, coev_tgt, coev)?,
    ))
}

/// Canonical pairing `φ_i ⊗ m_j ↦ δ_ij` as a `1 x n²` matrix.
pub fn pairing_matrix(f: Field, n: usize) -> Matrix {
    let cols: Vec<SparseVec> = (0..n * n)
        .map(|k| if k / n == k % n { vec![(0, f.one())] } else { Vec::new() })
        .collect();
    Matrix::from_columns(f, 1, cols)
}

/// Canonical copairing `Σ e_i ⊗ e^i` as an `n² x 1` matrix.
pub fn copairing_matrix(f: Field, n: usize) -> Matrix {
    Matrix::from_columns(f, n * n, vec![(0..n).map(|i| (i * n + i, f.one())).collect()])
}

/// `M ⊗ M* -> 1`, `m_j ⊗ φ_i ↦ ρ(g)_{ij}`.
pub fn pivotal_ev_matrix(m: &HModule) -> Result<Matrix, RepError> {
    let h = m.algebra();
    let (g, _) = h.require_pivot()?;
    let rg = m.act(g);
    let n = m.dim();
    let mut cols = vec![Vec::new(); n * n];
    for j in 0..n {
        for (i, x) in rg.column(j) {
            cols[j * n + i] = vec![(0, x.clone())];
        }
    }
    Ok(Matrix::from_columns(h.field(), 1, cols))
}

/// `1 -> M* ⊗ M`, `Σ ρ(g⁻¹)_{ji} φ_i ⊗ m_j`.
pub fn pivotal_coev_matrix(m: &HModule) -> Result<Matrix, RepError> {
    let h = m.algebra();
    let (_, gi) = h.require_pivot()?;
    let rgi = m.act(gi);
    let n = m.dim();
    let mut col = Vec::new();
    for i in 0..n {
        for (j, x) in rgi.column(i) {
            col.push((i * n + j, x.clone()));
        }
    }
    Ok(Matrix::from_columns(h.field(), n * n, vec![col]))
}

/// Pivotal evaluation `M ⊗ M* -> 1`.
pub fn pivotal_ev_right(m: &Module) -> Result<Morphism, RepError> {
    Morphism::unchecked(tensor(m, &dual_left(m))?, trivial(m.algebra()), pivotal_ev_matrix(m)?)
}

/// Pivotal coevaluation `1 -> M* ⊗ M`.
pub fn pivotal_coev_right(m: &Module) -> Result<Morphism, RepError> {
    Morphism::unchecked(trivial(m.algebra()), tensor(&dual_left(m), m)?, pivotal_coev_matrix(m)?)
}

/// The pivotal isomorphism `M -> M**`, acting by the pivot.
pub fn pivotal_iso(m: &Module) -> Result<Morphism, RepError> {
    let h = m.algebra();
    let (g, _) = h.require_pivot()?;
    Morphism::unchecked(m.clone(), dual_left(&dual_left(m)), m.act(g))
}
