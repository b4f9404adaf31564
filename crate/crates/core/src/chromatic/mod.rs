//! Chromatic maps built from the Hopf algebra formulas and checked against
//! their defining identities.

mod verify;
#[cfg(test)]
mod tests;

pub use verify::{composite_matrix, verify_chromatic, ChromaticReport, VerifyEntry};

use std::sync::Arc;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::diagrams::{DiagramError, Signature, Strand};
use crate::hopf::{HopfAlgebra, HopfError};
use crate::mtrace::{lambda_left, lambda_right, TraceContext, TraceError};
use crate::rep::{alpha, dual_left, dual_right, regular, tensor, Module, Morphism, RepError, Side};
use crate::scalars::{collect_sparse, FieldElement, Matrix, ScalarError, SparseVec};

#[derive(Debug, Error)]
pub enum ChromaticError {
    #[error("{0} is not unimodular")]
    NotUnimodular(String),
    #[error("{0} has no pivot")]
    NoPivot(String),
    #[error("retract family does not split: {0}")]
    Retract(String),
    #[error("unknown chromatic kind '{0}'")]
    UnknownKind(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Hopf(#[from] HopfError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    TwoSided,
    Left,
    Right,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::TwoSided => "two_sided",
            Kind::Left => "left",
            Kind::Right => "right",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Formula,
    BasedTransport,
}

/// A chromatic map with its signature: `G⊗P -> G⊗P` (two-sided),
/// `ˡˡG⊗P -> α⊗G⊗P` (left) or `P⊗ʳʳG -> P⊗G⊗α` (right).
#[derive(Clone)]
pub struct ChromaticMap {
    pub kind: Kind,
    pub base: Module,
    pub generator: Module,
    pub input: Signature,
    pub output: Signature,
    pub matrix: Matrix,
    pub provenance: Provenance,
}

impl ChromaticMap {
    pub fn algebra(&self) -> &Arc<HopfAlgebra> {
        self.base.algebra()
    }
}

/// `λ(S(e_i) · w · e_x)` as a table indexed `[i][x]`.
fn pairing_table(h: &HopfAlgebra, w: Option<&SparseVec>) -> Vec<Vec<FieldElement>> {
    let d = h.dim();
    (0..d)
        .map(|i| {
            let s = h.antipode().column(i);
            let sw = match w {
                Some(w) => h.multiply(s, w),
                None => s.clone(),
            };
            (0..d).map(|x| h.eval_integral(&h.multiply(&sw, &h.basis_vec(x)))).collect()
        })
        .collect()
}

/// `c_H(x ⊗ y) = λ(S(y1) g x) y2 ⊗ y3` on `G ⊗ H`.
pub fn chromatic_two_sided(h: &Arc<HopfAlgebra>) -> Result<ChromaticMap, ChromaticError> {
    if !h.is_unimodular() {
        return Err(ChromaticError::NotUnimodular(h.name().into()));
    }
    let (g, _) = h.require_pivot().map_err(|_| ChromaticError::NoPivot(h.name().into()))?;
    let d = h.dim();
    let f = h.field();
    let table = pairing_table(h, Some(g));
    let thirds: Vec<_> = (0..d).map(|y| h.iterated_coproduct(y, 3)).collect();
    let mut cols = Vec::with_capacity(d * d);
    for x in 0..d {
        for terms in &thirds {
            cols.push(collect_sparse(
                terms.iter().map(|(idx, c)| (idx[1] * d + idx[2], &table[idx[0]][x] * c)),
            ));
        }
    }
    let reg = regular(h);
    Ok(ChromaticMap {
        kind: Kind::TwoSided,
        base: reg.clone(),
        generator: reg.clone(),
        input: vec![Strand::up(&reg), Strand::up(&reg)],
        output: vec![Strand::up(&reg), Strand::up(&reg)],
        matrix: Matrix::from_columns(f, d * d, cols),
        provenance: Provenance::Formula,
    })
}

/// `c^l_H(e_x ⊗ y) = λ(S(y1) x) α(y2) y3 ⊗ y4` on `ˡˡG ⊗ H`.
pub fn chromatic_left(h: &Arc<HopfAlgebra>) -> Result<ChromaticMap, ChromaticError> {
    let d = h.dim();
    let f = h.field();
    let table = pairing_table(h, None);
    let a = h.modulus();
    let mut cols = Vec::with_capacity(d * d);
    let fourths: Vec<_> = (0..d).map(|y| h.iterated_coproduct(y, 4)).collect();
    for x in 0..d {
        for terms in &fourths {
            cols.push(collect_sparse(terms.iter().map(|(idx, c)| {
                (idx[2] * d + idx[3], &(&table[idx[0]][x] * &a[idx[1]]) * c)
            })));
        }
    }
    let reg = regular(h);
    let ll = dual_left(&dual_left(&reg));
    Ok(ChromaticMap {
        kind: Kind::Left,
        base: reg.clone(),
        generator: reg.clone(),
        input: vec![Strand::up(&ll), Strand::up(&reg)],
        output: vec![Strand::up(&alpha(h)), Strand::up(&reg), Strand::up(&reg)],
        matrix: Matrix::from_columns(f, d * d, cols),
        provenance: Provenance::Formula,
    })
}

/// `c^r_H(y ⊗ e_x) = λ(S(x) y4) / λ(S(Λ)) · α(y3) y1 ⊗ y2` on `H ⊗ ʳʳG`,
/// the left formula transported to the co-opposite algebra.
pub fn chromatic_right(h: &Arc<HopfAlgebra>) -> Result<ChromaticMap, ChromaticError> {
    let d = h.dim();
    let f = h.field();
    let norm = h.eval_integral(&h.apply_antipode(h.cointegral()));
    let norm_inv = norm
        .inv()
        .map_err(|_| ChromaticError::Invalid("λ(S(Λ)) vanishes".into()))?;
    // table[x][l] = λ(S(e_x) e_l) / λ(S(Λ))
    let table: Vec<Vec<FieldElement>> = (0..d)
        .map(|x| {
            let s = h.antipode().column(x);
            (0..d).map(|l| &h.eval_integral(&h.multiply(s, &h.basis_vec(l))) * &norm_inv).collect()
        })
        .collect();
    let a = h.modulus();
    let fourths: Vec<_> = (0..d).map(|y| h.iterated_coproduct(y, 4)).collect();
    let mut cols = Vec::with_capacity(d * d);
    for terms in &fourths {
        for row in &table {
            cols.push(collect_sparse(terms.iter().map(|(idx, c)| {
                (idx[0] * d + idx[1], &(&row[idx[3]] * &a[idx[2]]) * c)
            })));
        }
    }
    let reg = regular(h);
    let rr = dual_right(&dual_right(&reg));
    Ok(ChromaticMap {
        kind: Kind::Right,
        base: reg.clone(),
        generator: reg.clone(),
        input: vec![Strand::up(&reg), Strand::up(&rr)],
        output: vec![Strand::up(&reg), Strand::up(&reg), Strand::up(&alpha(h))],
        matrix: Matrix::from_columns(f, d * d, cols),
        provenance: Provenance::Formula,
    })
}

/// A splitting family `{(f_i: P -> H, g_i: H -> P)}` read off the retract
/// presentation of `P`.
pub fn presentation_family(p: &Module) -> Result<Vec<(Matrix, Matrix)>, ChromaticError> {
    let pres = p.presentation()?;
    let h = p.algebra();
    let d = h.dim();
    let f = h.field();
    let rows = pres.inclusion.row_vectors();
    let out = (0..pres.copies)
        .map(|k| {
            let mut fcols = vec![Vec::new(); p.dim()];
            for r in 0..d {
                for (c, x) in &rows[k * d + r] {
                    fcols[*c].push((r, x.clone()));
                }
            }
            let fi = Matrix::from_columns(f, d, fcols);
            let gi = Matrix::from_columns(f, p.dim(), (0..d).map(|e| pres.retraction.column(k * d + e).clone()).collect());
            (fi, gi)
        })
        .collect();
    Ok(out)
}

fn check_family(
    src: &Module,
    mid: &Module,
    family: &[(Matrix, Matrix)],
) -> Result<(), ChromaticError> {
    let f = src.algebra().field();
    let mut acc = Matrix::zeros(f, src.dim(), src.dim());
    for (k, (a, b)) in family.iter().enumerate() {
        Morphism::new(src.clone(), mid.clone(), a.clone())
            .map_err(|e| ChromaticError::Retract(format!("map {k} into {}: {e}", mid.key())))?;
        Morphism::new(mid.clone(), src.clone(), b.clone())
            .map_err(|e| ChromaticError::Retract(format!("map {k} out of {}: {e}", mid.key())))?;
        acc = acc.add(&b.mul(a)?)?;
    }
    if acc != Matrix::identity(f, src.dim()) {
        return Err(ChromaticError::Retract(format!("Σ g_i f_i ≠ id on {}", src.key())));
    }
    Ok(())
}

/// `c_P = Σ (id ⊗ g_i) c_H (id ⊗ f_i)` for a family with `Σ g_i f_i = id_P`.
pub fn chromatic_based(
    c: &ChromaticMap,
    p: &Module,
    family: &[(Matrix, Matrix)],
) -> Result<ChromaticMap, ChromaticError> {
    if c.kind != Kind::TwoSided {
        return Err(ChromaticError::Invalid("based maps start from a two-sided map".into()));
    }
    check_family(p, &c.base, family)?;
    let f = p.algebra().field();
    let ig = Matrix::identity(f, c.generator.dim());
    let mut acc = Matrix::zeros(f, c.generator.dim() * p.dim(), c.generator.dim() * p.dim());
    for (fi, gi) in family {
        let term = ig.kron(gi).mul(&c.matrix)?.mul(&ig.kron(fi))?;
        acc = acc.add(&term)?;
    }
    Ok(ChromaticMap {
        kind: Kind::TwoSided,
        base: p.clone(),
        generator: c.generator.clone(),
        input: vec![Strand::up(&c.generator), Strand::up(p)],
        output: vec![Strand::up(&c.generator), Strand::up(p)],
        matrix: acc,
        provenance: Provenance::BasedTransport,
    })
}

/// `c′_P = Σ (γ_i ⊗ id) c_P (δ_i ⊗ id)` for a new generator `G′`, given
/// `γ_i: G -> G′`, `δ_i: G′ -> G` with `Σ δ_i γ_i = id_G`.
pub fn transport_generator(
    c: &ChromaticMap,
    new_generator: &Module,
    family: &[(Matrix, Matrix)],
) -> Result<ChromaticMap, ChromaticError> {
    if c.kind != Kind::TwoSided {
        return Err(ChromaticError::Invalid("generator transport is for two-sided maps".into()));
    }
    check_family(&c.generator, new_generator, family)?;
    let f = c.base.algebra().field();
    let ip = Matrix::identity(f, c.base.dim());
    let n = new_generator.dim() * c.base.dim();
    let mut acc = Matrix::zeros(f, n, n);
    for (gamma, delta) in family {
        acc = acc.add(&gamma.kron(&ip).mul(&c.matrix)?.mul(&delta.kron(&ip))?)?;
    }
    Ok(ChromaticMap {
        kind: Kind::TwoSided,
        base: c.base.clone(),
        generator: new_generator.clone(),
        input: vec![Strand::up(new_generator), Strand::up(&c.base)],
        output: vec![Strand::up(new_generator), Strand::up(&c.base)],
        matrix: acc,
        provenance: Provenance::BasedTransport,
    })
}

/// `Λ^l_M: M ⊗ α -> M` by `S⁻¹(Λ)`, or `Λ^r_M: α ⊗ M -> M` by `S(Λ)`.
pub fn lambda_sided(m: &Module, side: Side) -> Result<Morphism, ChromaticError> {
    Ok(match side {
        Side::Left => lambda_left(m)?,
        Side::Right => lambda_right(m)?,
    })
}

/// One kind of chromatic map: how to build it from the algebra and how to
/// check it against a test module.
pub trait ChromaticKind: Send + Sync {
    fn kind(&self) -> Kind;
    fn construct(&self, h: &Arc<HopfAlgebra>) -> Result<ChromaticMap, ChromaticError>;
    /// Whether verification needs the m-trace.
    fn needs_trace(&self) -> bool;
    fn verify_one(
        &self,
        c: &ChromaticMap,
        x: &Module,
        ctx: Option<&TraceContext>,
    ) -> Result<VerifyEntry, ChromaticError>;
}

struct TwoSided;
struct LeftKind;
struct RightKind;

impl ChromaticKind for TwoSided {
    fn kind(&self) -> Kind {
        Kind::TwoSided
    }
    fn construct(&self, h: &Arc<HopfAlgebra>) -> Result<ChromaticMap, ChromaticError> {
        chromatic_two_sided(h)
    }
    fn needs_trace(&self) -> bool {
        true
    }
    fn verify_one(&self, c: &ChromaticMap, x: &Module, ctx: Option<&TraceContext>) -> Result<VerifyEntry, ChromaticError> {
        let ctx = ctx.ok_or_else(|| ChromaticError::Invalid("two-sided verification needs a trace context".into()))?;
        verify::two_sided_entry(c, x, ctx)
    }
}

impl ChromaticKind for LeftKind {
    fn kind(&self) -> Kind {
        Kind::Left
    }
    fn construct(&self, h: &Arc<HopfAlgebra>) -> Result<ChromaticMap, ChromaticError> {
        chromatic_left(h)
    }
    fn needs_trace(&self) -> bool {
        false
    }
    fn verify_one(&self, c: &ChromaticMap, x: &Module, _: Option<&TraceContext>) -> Result<VerifyEntry, ChromaticError> {
        verify::left_entry(c, x)
    }
}

impl ChromaticKind for RightKind {
    fn kind(&self) -> Kind {
        Kind::Right
    }
    fn construct(&self, h: &Arc<HopfAlgebra>) -> Result<ChromaticMap, ChromaticError> {
        chromatic_right(h)
    }
    fn needs_trace(&self) -> bool {
        false
    }
    fn verify_one(&self, c: &ChromaticMap, x: &Module, _: Option<&TraceContext>) -> Result<VerifyEntry, ChromaticError> {
        verify::right_entry(c, x)
    }
}

/// Chromatic kinds selectable by name.
pub struct KindRegistry {
    kinds: IndexMap<&'static str, Box<dyn ChromaticKind>>,
}

impl Default for KindRegistry {
    fn default() -> Self {
        let mut kinds: IndexMap<&'static str, Box<dyn ChromaticKind>> = IndexMap::new();
        for k in [Box::new(TwoSided) as Box<dyn ChromaticKind>, Box::new(LeftKind), Box::new(RightKind)] {
            kinds.insert(k.kind().as_str(), k);
        }
        KindRegistry { kinds }
    }
}

impl KindRegistry {
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.kinds.keys().copied()
    }

    pub fn get(&self, name: &str) -> Result<&dyn ChromaticKind, ChromaticError> {
        self.kinds.get(name).map(|k| k.as_ref()).ok_or_else(|| ChromaticError::UnknownKind(name.into()))
    }

    pub fn for_kind(&self, kind: Kind) -> &dyn ChromaticKind {
        self.kinds[kind.as_str()].as_ref()
    }
}

/// The standard test objects `1, G, G⊗G, G*`.
pub fn standard_tests(g: &Module) -> Result<Vec<Module>, ChromaticError> {
    let h = g.algebra();
    Ok(vec![crate::rep::trivial(h), g.clone(), tensor(g, g)?, dual_left(g)])
}
