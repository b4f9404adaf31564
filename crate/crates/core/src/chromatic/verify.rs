use rayon::prelude::*;
use serde::Serialize;

use crate::diagrams::{signature_dim, Atom, Bond, BridgedDiagram, CouponDef, SliceDiagram, Strand};
use crate::mtrace::TraceContext;
use crate::rep::{alpha, copairing_matrix, dual_left, dual_right, pairing_matrix, pivotal_coev_matrix, tensor, Module, Side};
use crate::scalars::{Matrix, SparseVec};

use super::{lambda_sided, ChromaticError, ChromaticMap, Kind, KindRegistry};

/// Above this many scalar operations the split evaluation is used.
const FLAT_LIMIT: usize = 1 << 22;

#[derive(Clone, Debug, Serialize)]
pub struct VerifyEntry {
    pub test: String,
    pub passed: bool,
    /// `direct` (whole diagram) or `bridged` (two halves joined by bonds).
    pub method: &'static str,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChromaticReport {
    pub kind: &'static str,
    pub algebra: String,
    pub base: String,
    pub generator: String,
    pub entries: Vec<VerifyEntry>,
}

impl ChromaticReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }
}

/// Checks the defining identity of `c` against every test object, in
/// parallel. Errors while building a composite become failed entries.
pub fn verify_chromatic(c: &ChromaticMap, tests: &[Module], ctx: Option<&TraceContext>) -> ChromaticReport {
    let registry = KindRegistry::default();
    let kind = registry.for_kind(c.kind);
    let entries = tests
        .par_iter()
        .map(|x| {
            kind.verify_one(c, x, ctx).unwrap_or_else(|e| VerifyEntry {
                test: x.key().to_string(),
                passed: false,
                method: "error",
                witness: Some(e.to_string()),
            })
        })
        .collect();
    ChromaticReport {
        kind: c.kind.as_str(),
        algebra: c.algebra().name().to_string(),
        base: c.base.key().to_string(),
        generator: c.generator.key().to_string(),
        entries,
    }
}

fn show(v: &SparseVec) -> String {
    let parts: Vec<String> = v.iter().take(6).map(|(i, x)| format!("{i}:{x}")).collect();
    let more = if v.len() > 6 { ", ..." } else { "" };
    format!("[{}{more}]", parts.join(", "))
}

fn coupon(name: &str, inputs: Vec<Strand>, outputs: Vec<Strand>, m: Matrix) -> Result<Atom, ChromaticError> {
    Ok(Atom::Coupon(CouponDef::new(name, inputs, outputs, m)?))
}

fn chromatic_atom(c: &ChromaticMap) -> Result<Atom, ChromaticError> {
    coupon(c.kind.as_str(), c.input.clone(), c.output.clone(), c.matrix.clone())
}

/// A composite in both forms: the whole diagram, and its split along the
/// generator strand.
pub(super) struct Composite {
    pub flat: SliceDiagram,
    pub bridged: BridgedDiagram,
    /// Identity factors of the expected value on the left and right halves.
    pub left_dim: usize,
    pub right_dim: usize,
}

impl Composite {
    fn cost(&self) -> usize {
        let widest = self
            .flat
            .levels()
            .map(|ls| ls.iter().map(|s| signature_dim(s)).max().unwrap_or(1))
            .unwrap_or(usize::MAX);
        widest.saturating_mul(self.left_dim * self.right_dim)
    }

    fn entry(&self, test: &Module) -> Result<VerifyEntry, ChromaticError> {
        let f = test.algebra().field();
        let ia = Matrix::identity(f, self.left_dim);
        let ib = Matrix::identity(f, self.right_dim);
        let (passed, method, witness) = if self.cost() <= FLAT_LIMIT {
            let got = self.flat.evaluate()?;
            let want = ia.kron(&ib);
            let witness = (got != want).then(|| {
                let c = (0..got.cols()).find(|&c| got.column(c) != want.column(c)).unwrap_or(0);
                format!("column {c}: got {} want {}", show(got.column(c)), show(want.column(c)))
            });
            (witness.is_none(), "direct", witness)
        } else {
            let sum = self.bridged.evaluate()?;
            if sum.equals_kron(&ia, &ib) {
                (true, "bridged", None)
            } else {
                let w = sum
                    .first_difference(&ia, &ib)
                    .map(|(c, got, want)| format!("column {c}: got {} want {}", show(&got), show(&want)))
                    .unwrap_or_else(|| "composite is not the identity".into());
                (false, "bridged", Some(w))
            }
        };
        Ok(VerifyEntry { test: test.key().to_string(), passed, method, witness })
    }
}

/// `(id_X ⊗ ev_G ⊗ id_P)(Λ^t_{X⊗G*} ⊗ c)(id_X ⊗ coev_G ⊗ id_P)` with the
/// pivotal coevaluation.
pub(super) fn two_sided_composite(c: &ChromaticMap, x: &Module, ctx: &TraceContext) -> Result<Composite, ChromaticError> {
    let g = &c.generator;
    let p = &c.base;
    let xg = tensor(x, &dual_left(g))?;
    let lt = ctx.lambda_t(&xg)?;
    let pair = vec![Strand::up(x), Strand::down(g)];
    let lam = coupon("lambda_t", pair.clone(), pair, lt.matrix)?;
    let cc = chromatic_atom(c)?;
    let flat = SliceDiagram::new(
        vec![Strand::up(x), Strand::up(p)],
        vec![Strand::up(x), Strand::up(p)],
        vec![
            vec![Atom::id(x), Atom::CoevR(g.clone()), Atom::id(p)],
            vec![lam.clone(), cc.clone()],
            vec![Atom::id(x), Atom::EvL(g.clone()), Atom::id(p)],
        ],
    )?;
    let f = g.algebra().field();
    let bridged = BridgedDiagram {
        left: SliceDiagram::layer(vec![lam]),
        right: SliceDiagram::layer(vec![cc]),
        left_outer: (1, 1),
        right_outer: (1, 1),
        bonds: vec![
            Bond::Cup { matrix: pivotal_coev_matrix(g)?, left_in: 0, right_in: 0 },
            Bond::Cap { matrix: pairing_matrix(f, g.dim()), left_out: 0, right_out: 0 },
        ],
    };
    Ok(Composite { flat, bridged, left_dim: x.dim(), right_dim: p.dim() })
}

/// Left identity: `ˡG` bends down to feed `c^l`, whose `α` output is
/// absorbed by `Λ^l_{X⊗ˡG}` before the generator closes up.
pub(super) fn left_composite(c: &ChromaticMap, x: &Module) -> Result<Composite, ChromaticError> {
    let h = c.algebra();
    let g = &c.generator;
    let p = &c.base;
    let lg = dual_left(g);
    let a = alpha(h);
    let xl = tensor(x, &lg)?;
    let ll = lambda_sided(&xl, Side::Left)?;
    let lam = coupon(
        "lambda_l",
        vec![Strand::up(x), Strand::up(&lg), Strand::up(&a)],
        vec![Strand::up(x), Strand::up(&lg)],
        ll.matrix,
    )?;
    let cc = chromatic_atom(c)?;
    let flat = SliceDiagram::new(
        vec![Strand::up(x), Strand::up(p)],
        vec![Strand::up(x), Strand::up(p)],
        vec![
            vec![Atom::id(x), Atom::CoevL(lg.clone()), Atom::id(p)],
            vec![Atom::id(x), Atom::id(&lg), cc.clone()],
            vec![lam.clone(), Atom::id(g), Atom::id(p)],
            vec![Atom::id(x), Atom::EvL(g.clone()), Atom::id(p)],
        ],
    )?;
    let f = h.field();
    let bridged = BridgedDiagram {
        left: SliceDiagram::layer(vec![lam]),
        right: SliceDiagram::layer(vec![cc]),
        left_outer: (1, 1),
        right_outer: (1, 1),
        bonds: vec![
            Bond::Cup { matrix: copairing_matrix(f, lg.dim()), left_in: 0, right_in: 0 },
            Bond::RightToLeft { right_out: 0, left_in: 1 },
            Bond::Cap { matrix: pairing_matrix(f, g.dim()), left_out: 0, right_out: 1 },
        ],
    };
    Ok(Composite { flat, bridged, left_dim: x.dim(), right_dim: p.dim() })
}

/// Right identity, the mirror image: `c^r` on `P ⊗ ʳʳG` emits `α` to the
/// right, where `Λ^r_{ʳG⊗X}` absorbs it.
pub(super) fn right_composite(c: &ChromaticMap, x: &Module) -> Result<Composite, ChromaticError> {
    let h = c.algebra();
    let g = &c.generator;
    let p = &c.base;
    let rg = dual_right(g);
    let rr = dual_right(&rg);
    let a = alpha(h);
    let rx = tensor(&rg, x)?;
    let lr = lambda_sided(&rx, Side::Right)?;
    let lam = coupon(
        "lambda_r",
        vec![Strand::up(&a), Strand::up(&rg), Strand::up(x)],
        vec![Strand::up(&rg), Strand::up(x)],
        lr.matrix,
    )?;
    let cc = chromatic_atom(c)?;
    let flat = SliceDiagram::new(
        vec![Strand::up(p), Strand::up(x)],
        vec![Strand::up(p), Strand::up(x)],
        vec![
            vec![Atom::id(p), Atom::CoevL(rr.clone()), Atom::id(x)],
            vec![cc.clone(), Atom::Id(Strand::down(&rr)), Atom::id(x)],
            vec![Atom::id(p), Atom::id(g), lam.clone()],
            vec![Atom::id(p), Atom::EvL(rg.clone()), Atom::id(x)],
        ],
    )?;
    let f = h.field();
    let bridged = BridgedDiagram {
        left: SliceDiagram::layer(vec![cc]),
        right: SliceDiagram::layer(vec![lam]),
        left_outer: (1, 1),
        right_outer: (1, 1),
        bonds: vec![
            Bond::Cup { matrix: copairing_matrix(f, rr.dim()), left_in: 0, right_in: 1 },
            Bond::LeftToRight { left_out: 1, right_in: 0 },
            Bond::Cap { matrix: pairing_matrix(f, rg.dim()), left_out: 0, right_out: 0 },
        ],
    };
    Ok(Composite { flat, bridged, left_dim: p.dim(), right_dim: x.dim() })
}

pub(super) fn two_sided_entry(c: &ChromaticMap, x: &Module, ctx: &TraceContext) -> Result<VerifyEntry, ChromaticError> {
    two_sided_composite(c, x, ctx)?.entry(x)
}

pub(super) fn left_entry(c: &ChromaticMap, x: &Module) -> Result<VerifyEntry, ChromaticError> {
    left_composite(c, x)?.entry(x)
}

pub(super) fn right_entry(c: &ChromaticMap, x: &Module) -> Result<VerifyEntry, ChromaticError> {
    right_composite(c, x)?.entry(x)
}

/// The composite's value as a matrix, by whichever route is affordable.
pub fn composite_matrix(c: &ChromaticMap, x: &Module, ctx: Option<&TraceContext>) -> Result<Matrix, ChromaticError> {
    let comp = match c.kind {
        Kind::TwoSided => two_sided_composite(c, x, ctx.ok_or_else(|| ChromaticError::Invalid("needs a trace context".into()))?)?,
        Kind::Left => left_composite(c, x)?,
        Kind::Right => right_composite(c, x)?,
    };
    if comp.cost() <= FLAT_LIMIT {
        Ok(comp.flat.evaluate()?)
    } else {
        Ok(comp.bridged.evaluate()?.to_matrix())
    }
}
