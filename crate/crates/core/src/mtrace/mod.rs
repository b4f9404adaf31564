//! The modified trace on projective modules and its dual-basis copairings.

mod battery;

pub use battery::run_battery;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::hopf::{HopfAlgebra, HopfError};
use crate::rep::{
    dual_left, ev_coev, hom_space, pivotal_coev_right, pivotal_ev_right, Module, Morphism, RepError, Side,
};
use crate::scalars::{sparse_dot, FieldElement, Matrix, ScalarError, SparseVec};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("{0} is not projective")]
    NotProjective(String),
    #[error("bad retract presentation for {0}")]
    Presentation(String),
    #[error("trace pairing on {0} is degenerate")]
    DegenerateTrace(String),
    #[error("m-trace needs a unimodular, unibalanced algebra: {0}")]
    Unsupported(String),
    #[error("expected an endomorphism")]
    NotEndomorphism,
    #[error(transparent)]
    Rep(RepError),
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

impl From<RepError> for TraceError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::NotProjective(k) => TraceError::NotProjective(k),
            other => TraceError::Rep(other),
        }
    }
}

/// Dual bases `x^i: X -> 1` (covectors) and `x_i: 1 -> X` (vectors) with
/// `t_X(x_i ∘ x^j) = δ_ij`.
#[derive(Clone, Debug)]
pub struct Omega {
    pub down: Vec<SparseVec>,
    pub up: Vec<SparseVec>,
}

/// The m-trace `t_H(f) = λ(g f(1))` extended to projective modules through
/// retract presentations, with caches keyed by module.
pub struct TraceContext {
    algebra: Arc<HopfAlgebra>,
    weight: Vec<FieldElement>,
    theta: RwLock<HashMap<String, Arc<Matrix>>>,
    omega: RwLock<HashMap<String, Arc<Omega>>>,
}

impl TraceContext {
    pub fn new(algebra: &Arc<HopfAlgebra>) -> Result<Self, TraceError> {
        if !algebra.is_unimodular() {
            return Err(TraceError::Unsupported(format!("{} is not unimodular", algebra.name())));
        }
        if !algebra.is_unibalanced() {
            return Err(TraceError::Unsupported(format!("{} is not unibalanced", algebra.name())));
        }
        let (g, _) = algebra.require_pivot()?;
        // weight_h = λ(g e_h)
        let weight = (0..algebra.dim())
            .map(|e| algebra.eval_integral(&algebra.multiply(g, &algebra.basis_vec(e))))
            .collect();
        Ok(TraceContext {
            algebra: algebra.clone(),
            weight,
            theta: RwLock::new(HashMap::new()),
            omega: RwLock::new(HashMap::new()),
        })
    }

    pub fn algebra(&self) -> &Arc<HopfAlgebra> {
        &self.algebra
    }

    /// The density `Θ_P` with `t_P(f) = tr(Θ_P f)`.
    pub fn theta(&self, p: &Module) -> Result<Arc<Matrix>, TraceError> {
        if let Some(t) = self.theta.read().expect("lock").get(p.key()) {
            return Ok(t.clone());
        }
        let pres = p.presentation()?;
        let h = &self.algebra;
        let f = h.field();
        let d = h.dim();
        if pres.retraction.mul(&pres.inclusion)? != Matrix::identity(f, p.dim()) {
            return Err(TraceError::Presentation(p.key().to_string()));
        }
        let rt = pres.retraction.transpose();
        // image under the retraction of the unit in copy k
        let unit_images: Vec<SparseVec> = (0..pres.copies)
            .map(|k| {
                let shifted: SparseVec = h.unit().iter().map(|(i, x)| (k * d + i, x.clone())).collect();
                let mut col = Vec::new();
                for r in 0..p.dim() {
                    let x = sparse_dot(rt.column(r), &shifted, f);
                    if !x.is_zero() {
                        col.push((r, x));
                    }
                }
                col
            })
            .collect();
        let cols = pres
            .inclusion
            .columns()
            .iter()
            .map(|col| {
                let mut s = vec![f.zero(); pres.copies];
                for (idx, x) in col {
                    s[idx / d] += &(&self.weight[idx % d] * x);
                }
                crate::scalars::collect_sparse(s.iter().enumerate().flat_map(|(k, sk)| {
                    unit_images[k].iter().map(move |(r, y)| (*r, sk * y))
                }))
            })
            .collect();
        let theta = Arc::new(Matrix::from_columns(f, p.dim(), cols));
        self.theta.write().expect("lock").insert(p.key().to_string(), theta.clone());
        Ok(theta)
    }

    /// `t_P(f)` for an endomorphism of a projective module.
    pub fn mtrace(&self, f: &Morphism) -> Result<FieldElement, TraceError> {
        if f.source != f.target {
            return Err(TraceError::NotEndomorphism);
        }
        self.trace_matrix(&f.source, &f.matrix)
    }

    /// `t_P` applied to a raw matrix on `P`, without a linearity check.
    pub fn trace_matrix(&self, p: &Module, m: &Matrix) -> Result<FieldElement, TraceError> {
        Ok(self.theta(p)?.mul(m)?.trace())
    }

    /// `t_Y(u ∘ w)` for `u: 1 -> Y` and `w: Y -> 1` given as vector and covector.
    pub fn pair(&self, y: &Module, w: &SparseVec, u: &SparseVec) -> Result<FieldElement, TraceError> {
        let f = self.algebra.field();
        let tu = self.theta(y)?.apply(u);
        Ok(sparse_dot(w, &tu, f))
    }

    /// Dual bases of `Hom(X, 1)` and `Hom(1, X)` under the trace pairing.
    pub fn omega(&self, x: &Module) -> Result<Arc<Omega>, TraceError> {
        if let Some(o) = self.omega.read().expect("lock").get(x.key()) {
            return Ok(o.clone());
        }
        let one = crate::rep::trivial(&self.algebra);
        let ups: Vec<SparseVec> = hom_space(&one, x)?.into_iter().map(|m| m.matrix.column(0).clone()).collect();
        let downs: Vec<SparseVec> =
            hom_space(x, &one)?.into_iter().map(|m| m.matrix.row_vectors().remove(0)).collect();
        let o = Arc::new(self.dual_bases(x, ups, downs)?);
        self.omega.write().expect("lock").insert(x.key().to_string(), o.clone());
        Ok(o)
    }

    /// Pairs arbitrary bases `ups` of `Hom(1, X)` and `downs` of `Hom(X, 1)`.
    pub fn dual_bases(&self, x: &Module, ups: Vec<SparseVec>, downs: Vec<SparseVec>) -> Result<Omega, TraceError> {
        let f = self.algebra.field();
        if ups.len() != downs.len() {
            return Err(TraceError::DegenerateTrace(x.key().to_string()));
        }
        if ups.is_empty() {
            return Ok(Omega { down: Vec::new(), up: Vec::new() });
        }
        let n = ups.len();
        // gram[a][b] = t(u_a ∘ w_b)
        let theta = self.theta(x)?;
        let tus: Vec<SparseVec> = ups.iter().map(|u| theta.apply(u)).collect();
        let gram = Matrix::from_fn(f, n, n, |a, b| sparse_dot(&downs[b], &tus[a], f));
        let inv = gram.inverse().ok_or_else(|| TraceError::DegenerateTrace(x.key().to_string()))?;
        // x^i = Σ_b (gram^{-T})_{ib} w_b
        let down = (0..n)
            .map(|i| {
                crate::scalars::collect_sparse(inv.column(i).iter().flat_map(|(b, c)| {
                    downs[*b].iter().map(move |(k, w)| (*k, c * w))
                }))
            })
            .collect();
        Ok(Omega { down, up: ups })
    }

    /// `Λ^t_X = Σ x_i ∘ x^i`.
    pub fn lambda_t(&self, x: &Module) -> Result<Morphism, TraceError> {
        let o = self.omega(x)?;
        let f = self.algebra.field();
        let mut acc = Matrix::zeros(f, x.dim(), x.dim());
        for (u, w) in o.up.iter().zip(&o.down) {
            acc = acc.add(&Matrix::outer(f, u, x.dim(), w, x.dim()))?;
        }
        Ok(Morphism::unchecked(x.clone(), x.clone(), acc)?)
    }
}

/// Right partial trace over `y` of an endomorphism of `x ⊗ y`:
/// `(id ⊗ ev_right)(f ⊗ id)(id ⊗ coev_left)`.
pub fn ptr_right(f: &Morphism, x: &Module, y: &Module) -> Result<Morphism, TraceError> {
    let (_, coev) = ev_coev(y, Side::Left)?;
    let ev = pivotal_ev_right(y)?;
    let idx = Morphism::identity(x);
    let idd = Morphism::identity(&dual_left(y));
    let m = idx
        .tensor(&coev)?
        .matrix
        .clone();
    let m = f.tensor(&idd)?.matrix.mul(&m)?;
    let m = idx.tensor(&ev)?.matrix.mul(&m)?;
    Ok(Morphism::unchecked(x.clone(), x.clone(), m)?)
}

/// Left partial trace over `y` of an endomorphism of `y ⊗ x`:
/// `(ev_left ⊗ id)(id ⊗ f)(coev_right ⊗ id)`.
pub fn ptr_left(f: &Morphism, y: &Module, x: &Module) -> Result<Morphism, TraceError> {
    let (ev, _) = ev_coev(y, Side::Left)?;
    let coev = pivotal_coev_right(y)?;
    let idx = Morphism::identity(x);
    let idd = Morphism::identity(&dual_left(y));
    let m = coev.tensor(&idx)?.matrix.clone();
    let m = idd.tensor(f)?.matrix.mul(&m)?;
    let m = ev.tensor(&idx)?.matrix.mul(&m)?;
    Ok(Morphism::unchecked(x.clone(), x.clone(), m)?)
}

/// `Λ^l_M: M ⊗ α -> M`, acting by `S⁻¹(Λ)`.
pub fn lambda_left(m: &Module) -> Result<Morphism, TraceError> {
    let h = m.algebra();
    let src = crate::rep::tensor(m, &crate::rep::alpha(h))?;
    Ok(Morphism::unchecked(src, m.clone(), m.act(&h.apply_antipode_inv(h.cointegral())))?)
}

/// `Λ^r_M: α ⊗ M -> M`, acting by `S(Λ)`.
pub fn lambda_right(m: &Module) -> Result<Morphism, TraceError> {
    let h = m.algebra();
    let src = crate::rep::tensor(&crate::rep::alpha(h), m)?;
    Ok(Morphism::unchecked(src, m.clone(), m.act(&h.apply_antipode(h.cointegral())))?)
}
