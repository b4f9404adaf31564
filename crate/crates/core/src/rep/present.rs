use crate::hopf::HopfAlgebra;
use crate::scalars::{Matrix, SparseVec};

use super::module::{Construction, HModule, Module};
use super::RepError;

/// `M` as a retract of `H^copies`: `retraction ∘ inclusion = id_M`, both
/// H-linear. Copy `k` of `H` occupies coordinates `k*dim(H) ..`.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub copies: usize,
    pub inclusion: Matrix,
    pub retraction: Matrix,
}

impl Presentation {
    pub fn new(copies: usize, inclusion: Matrix, retraction: Matrix) -> Self {
        Presentation { copies, inclusion, retraction }
    }

    pub fn free_dim(&self, h: &HopfAlgebra) -> usize {
        self.copies * h.dim()
    }

    /// Checks shapes, `r i = id` and linearity of both maps on generators.
    pub fn check(&self, m: &HModule) -> Result<(), RepError> {
        let h = m.algebra();
        let f = h.field();
        let big = self.free_dim(h);
        if self.inclusion.rows() != big
            || self.inclusion.cols() != m.dim()
            || self.retraction.rows() != m.dim()
            || self.retraction.cols() != big
        {
            return Err(RepError::Presentation(format!("shapes do not fit {} copies of H", self.copies)));
        }
        if self.retraction.mul(&self.inclusion)? != Matrix::identity(f, m.dim()) {
            return Err(RepError::Presentation("retraction ∘ inclusion is not the identity".into()));
        }
        let ident = Matrix::identity(f, self.copies);
        for &x in h.generators() {
            let free = ident.kron(h.left_mult(x));
            if free.mul(&self.inclusion)? != self.inclusion.mul(m.action(x))? {
                return Err(RepError::Presentation(format!("inclusion is not linear at {x}")));
            }
            if m.action(x).mul(&self.retraction)? != self.retraction.mul(&free)? {
                return Err(RepError::Presentation(format!("retraction is not linear at {x}")));
            }
        }
        Ok(())
    }
}

fn block_diag(n: usize, x: &Matrix) -> Matrix {
    Matrix::identity(x.field(), n).kron(x)
}

/// Builds a presentation from the construction tree, or `None` when the
/// module is not known to be projective.
pub(crate) fn build(m: &Module) -> Option<Presentation> {
    if let Some(p) = m.asserted_presentation() {
        return Some(p.clone());
    }
    let h = m.algebra().clone();
    let structural = match m.construction() {
        Construction::Regular => {
            let id = Matrix::identity(h.field(), h.dim());
            Some(Presentation::new(1, id.clone(), id))
        }
        Construction::Tensor(a, b) => match a.presentation() {
            Ok(pa) => Some(left_factor(&h, &pa, b)),
            Err(_) => b.presentation().ok().map(|pb| right_factor(&h, a, &pb)),
        },
        Construction::DualLeft(a) => a.presentation().ok().and_then(|pa| dual(&h, &pa, h.antipode())),
        Construction::DualRight(a) => a.presentation().ok().and_then(|pa| dual(&h, &pa, h.antipode_inv())),
        Construction::DirectSum(a, b) => match (a.presentation(), b.presentation()) {
            (Ok(pa), Ok(pb)) => Some(Presentation::new(
                pa.copies + pb.copies,
                pa.inclusion.direct_sum(&pb.inclusion),
                pa.retraction.direct_sum(&pb.retraction),
            )),
            _ => None,
        },
        _ => None,
    };
    if structural.is_some() || !h.is_semisimple() {
        return structural;
    }
    if matches!(m.construction(), Construction::Trivial) {
        return Some(trivial_over_semisimple(&h));
    }
    // 1 ⊗ M has the same coordinates and action as M
    Some(left_factor(&h, &trivial_over_semisimple(&h), m))
}

fn trivial_over_semisimple(h: &HopfAlgebra) -> Presentation {
    let f = h.field();
    let lam = h.cointegral();
    let scale = h.eval_counit(lam).inv().expect("semisimple: counit of the cointegral is nonzero");
    let col: SparseVec = lam.iter().map(|(i, x)| (*i, x * &scale)).collect();
    let inclusion = Matrix::from_columns(f, h.dim(), vec![col]);
    let retraction = Matrix::from_columns(
        f,
        1,
        h.counit().iter().map(|c| if c.is_zero() { Vec::new() } else { vec![(0, c.clone())] }).collect(),
    );
    Presentation::new(1, inclusion, retraction)
}

/// `A ⊗ B` with `A` a retract of `H^n`: `H ⊗ B ≅ H ⊗ B_triv` by
/// `h ⊗ b ↦ h1 ⊗ S(h2) b`, then `H ⊗ B_triv ≅ H^dim(B)`.
fn left_factor(h: &HopfAlgebra, pa: &Presentation, b: &Module) -> Presentation {
    let f = h.field();
    let (d, nb) = (h.dim(), b.dim());
    let sb: Vec<Matrix> = (0..d).map(|k| b.act(h.antipode().column(k))).collect();
    let mut fwd = vec![Vec::new(); d * nb];
    let mut back = vec![Vec::new(); d * nb];
    for e in 0..d {
        for (j, k, c) in h.coproduct_basis(e) {
            for bi in 0..nb {
                // forward: column e⊗b_bi in H⊗B order, landing in b'*d + j
                for (bo, x) in sb[*k].column(bi) {
                    fwd[e * nb + bi].push((bo * d + j, c * x));
                }
                // back: column b_bi*d + e, landing in j*nb + b'
                for (bo, x) in b.action(*k).column(bi) {
                    back[bi * d + e].push((j * nb + bo, c * x));
                }
            }
        }
    }
    let fwd = Matrix::from_columns(f, d * nb, fwd.into_iter().map(crate::scalars::collect_sparse).collect());
    let back = Matrix::from_columns(f, d * nb, back.into_iter().map(crate::scalars::collect_sparse).collect());
    let idb = Matrix::identity(f, nb);
    let inclusion = block_diag(pa.copies, &fwd).mul(&pa.inclusion.kron(&idb)).expect("shapes");
    let retraction = pa.retraction.kron(&idb).mul(&block_diag(pa.copies, &back)).expect("shapes");
    Presentation::new(pa.copies * nb, inclusion, retraction)
}

/// `A ⊗ B` with `B` a retract of `H^n`: `A ⊗ H ≅ A_triv ⊗ H` by
/// `m ⊗ h ↦ S⁻¹(h1) m ⊗ h2`.
fn right_factor(h: &HopfAlgebra, a: &Module, pb: &Presentation) -> Presentation {
    let f = h.field();
    let (d, na, n) = (h.dim(), a.dim(), pb.copies);
    let sia: Vec<Matrix> = (0..d).map(|k| a.act(h.antipode_inv().column(k))).collect();
    let mut fwd = vec![Vec::new(); na * d];
    let mut back = vec![Vec::new(); na * d];
    for e in 0..d {
        for (p, q, c) in h.coproduct_basis(e) {
            for ai in 0..na {
                for (ao, x) in sia[*p].column(ai) {
                    fwd[ai * d + e].push((ao * d + q, c * x));
                }
                for (ao, x) in a.action(*p).column(ai) {
                    back[ai * d + e].push((ao * d + q, c * x));
                }
            }
        }
    }
    let fwd = Matrix::from_columns(f, na * d, fwd.into_iter().map(crate::scalars::collect_sparse).collect());
    let back = Matrix::from_columns(f, na * d, back.into_iter().map(crate::scalars::collect_sparse).collect());
    // a*(n*d) + k*d + e  ->  k*(na*d) + a*d + e
    let perm_cols: Vec<SparseVec> = (0..na * n * d)
        .map(|idx| {
            let (ai, k, e) = (idx / (n * d), (idx / d) % n, idx % d);
            vec![(k * na * d + ai * d + e, f.one())]
        })
        .collect();
    let perm = Matrix::from_columns(f, na * n * d, perm_cols);
    let ida = Matrix::identity(f, na);
    let inclusion = block_diag(n, &fwd)
        .mul(&perm)
        .and_then(|x| x.mul(&ida.kron(&pb.inclusion)))
        .expect("shapes");
    let retraction = ida
        .kron(&pb.retraction)
        .mul(&perm.transpose())
        .and_then(|x| x.mul(&block_diag(n, &back)))
        .expect("shapes");
    Presentation::new(n * na, inclusion, retraction)
}

/// Dual of a retract. `twist` is the antipode (left dual) or its inverse
/// (right dual); `e_h ↦ λ(twist(e_h) ·)` identifies `H` with its dual.
fn dual(h: &HopfAlgebra, pa: &Presentation, twist: &Matrix) -> Option<Presentation> {
    let f = h.field();
    let d = h.dim();
    let phi = Matrix::from_fn(f, d, d, |x, e| {
        let prod = h.multiply(twist.column(e), &h.basis_vec(x));
        h.eval_integral(&prod)
    });
    let phi_inv = phi.inverse()?;
    let inclusion = block_diag(pa.copies, &phi_inv).mul(&pa.retraction.transpose()).ok()?;
    let retraction = pa.inclusion.transpose().mul(&block_diag(pa.copies, &phi)).ok()?;
    Some(Presentation::new(pa.copies, inclusion, retraction))
}
