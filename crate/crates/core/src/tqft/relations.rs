use std::collections::BTreeMap;

use serde::Serialize;

use crate::diagrams::{right_mult, Atom, CouponDef, GateSide, SliceDiagram, Strand};
use crate::rep::{dual_left, hom_space, tensor, trivial, Module};
use crate::scalars::{collect_sparse, FieldElement, SparseVec};

use super::program::{connected_sum, stabilize, Instruction, SurgeryProgram};
use super::{CutOptions, GateDiagram, SkeinVector, StrandRef, Tqft, TqftError};

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl RelationCheck {
    fn from_result(name: &str, r: Result<(bool, String), TqftError>) -> Self {
        match r {
            Ok((passed, detail)) => RelationCheck { name: name.into(), passed, detail },
            Err(e) => RelationCheck { name: name.into(), passed: false, detail: format!("error: {e}") },
        }
    }
}

fn all_equal(values: &[(String, FieldElement)]) -> (bool, String) {
    let ok = values.windows(2).all(|w| w[0].1 == w[1].1);
    let detail = values.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ");
    (ok, detail)
}

fn same_vector(a: &SkeinVector, b: &SkeinVector) -> bool {
    let label = |d: &GateDiagram| -> Vec<Vec<String>> {
        d.diagram.layers.iter().map(|l| l.iter().map(Atom::label).collect()).collect()
    };
    a.terms.len() == b.terms.len()
        && a.terms.iter().zip(&b.terms).all(|((x, d), (y, e))| {
            x == y && d.shifts == e.shifts && d.anchors == e.anchors && label(d) == label(e)
        })
}

fn attach0(gate: usize, turns: usize) -> Instruction {
    Instruction::Attach0 { gate, base: StrandRef::default(), turns }
}

fn attach1(gate: usize) -> Instruction {
    Instruction::Attach1 { gate, basepoint: 0, reversed: false }
}

fn r1(t: &Tqft) -> Result<(bool, String), TqftError> {
    let v = t.attach0(&t.circle_vector()?, 1, &StrandRef::default(), 2)?;
    let w = t.apply(&v, &[])?;
    let same = same_vector(&v, &w);
    let a = t.cap_sphere(&t.attach1(&v, 1, CutOptions::default())?)?;
    let b = t.cap_sphere(&t.attach1(&w, 1, CutOptions::default())?)?;
    Ok((same && a == b, format!("terms {} and {}, values {a} and {b}", v.terms.len(), w.terms.len())))
}

fn r3(t: &Tqft) -> Result<(bool, String), TqftError> {
    let orders: [(&str, Vec<Instruction>); 3] = [
        ("open 1,2 cut 1,2", vec![attach0(1, 1), attach0(2, 2), attach1(1), attach1(2)]),
        ("open 1,2 cut 2,1", vec![attach0(1, 1), attach0(2, 2), attach1(2), attach1(1)]),
        ("open 2,1 cut 1,2", vec![attach0(2, 2), attach0(1, 1), attach1(1), attach1(2)]),
    ];
    let start = t.circle_vector()?;
    let values = orders
        .iter()
        .map(|(name, ins)| Ok((name.to_string(), t.cap_sphere(&t.apply(&start, ins)?)?)))
        .collect::<Result<Vec<_>, TqftError>>()?;
    Ok(all_equal(&values))
}

fn r4_stabilize(t: &Tqft, programs: &[SurgeryProgram]) -> Result<(bool, String), TqftError> {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in programs {
        let k = t.k_invariant(p)?;
        let once = stabilize(p, 0)?;
        let late = stabilize(p, p.instructions.len() - 1)?;
        let twice = stabilize(&once, 0)?;
        let ks = [t.k_invariant(&once)?, t.k_invariant(&late)?, t.k_invariant(&twice)?];
        ok &= ks.iter().all(|x| *x == k);
        parts.push(format!("{}: {k} -> {}, {}, {}", p.name, ks[0], ks[1], ks[2]));
    }
    Ok((ok, parts.join("; ")))
}

/// `Σ_i t_X(u ∘ x^i) x_i = u` for every invariant `u` of `X`.
fn r4_replacement(t: &Tqft) -> Result<(bool, String), TqftError> {
    let g = t.generator().clone();
    let one = trivial(t.algebra());
    let colors: Vec<Module> = vec![g.clone(), tensor(&g, &dual_left(&g))?, tensor(&g, &g)?];
    let mut ok = true;
    let mut parts = Vec::new();
    for x in &colors {
        let omega = t.ctx().omega(x)?;
        let us: Vec<SparseVec> = hom_space(&one, x)?.into_iter().map(|m| m.matrix.column(0).clone()).collect();
        for u in &us {
            let mut terms = Vec::new();
            for (up, down) in omega.up.iter().zip(&omega.down) {
                let c = t.ctx().pair(x, down, u)?;
                terms.extend(up.iter().map(|(i, y)| (*i, y * &c)));
            }
            ok &= collect_sparse(terms) == *u;
        }
        parts.push(format!("{}: {} invariants", x.key(), us.len()));
    }
    Ok((ok, parts.join(", ")))
}

fn with_cut(p: &SurgeryProgram, basepoint: usize, reversed: bool) -> SurgeryProgram {
    let instructions = p
        .instructions
        .iter()
        .map(|ins| match ins {
            Instruction::Attach1 { gate, .. } => Instruction::Attach1 { gate: *gate, basepoint, reversed },
            other => other.clone(),
        })
        .collect();
    SurgeryProgram { name: format!("{} b{basepoint}{}", p.name, if reversed { " rev" } else { "" }), initial: p.initial.clone(), instructions }
}

fn r5(t: &Tqft, programs: &[SurgeryProgram]) -> Result<(bool, String), TqftError> {
    let mut values = Vec::new();
    let mut ok = true;
    for p in programs {
        let mut vs = Vec::new();
        for b in 0..3 {
            for rev in [false, true] {
                let q = with_cut(p, b, rev);
                vs.push((q.name.clone(), t.k_invariant(&q)?));
            }
        }
        let (eq, detail) = all_equal(&vs);
        ok &= eq;
        values.push(detail);
    }
    Ok((ok, values.join("; ")))
}

/// A loop `Q` through the handle next to the generator loop, against the
/// same loop slid off the handle.
pub(super) fn sliding_pair(t: &Tqft) -> Result<(GateDiagram, GateDiagram), TqftError> {
    let h = t.algebra();
    let g = t.generator().clone();
    let gd = Strand::down(&g);
    let gu = Strand::up(&g);
    let weights: SparseVec = (0..h.dim()).map(|j| (j, h.field().from_int(j as i64 + 1))).collect();
    let q = Atom::Coupon(CouponDef::new("q", vec![gu.clone()], vec![gu.clone()], right_mult(h, &weights))?);
    let hc = Atom::Coupon(CouponDef::new("h", vec![gu.clone()], vec![gu.clone()], right_mult(h, &t.normalizer()?))?);
    let c = Atom::Coupon(t.based_coupon(&g)?);
    let id = |s: &Strand| Atom::Id(s.clone());
    let gate = |s: &Strand, side| Atom::Gate { gate: 1, strand: s.clone(), side };
    let threaded = vec![
        vec![Atom::CoevR(g.clone())],
        vec![id(&gd), gate(&gu, GateSide::Out), gate(&gu, GateSide::Out), id(&gu)],
        vec![id(&gd), q.clone(), id(&gu), id(&gu)],
        vec![id(&gd), id(&gu), c.clone()],
        vec![id(&gd), gate(&gu, GateSide::In), gate(&gu, GateSide::In), id(&gu)],
        vec![id(&gd), hc.clone()],
        vec![Atom::EvL(g.clone())],
    ];
    let slid = vec![
        vec![Atom::CoevR(g.clone())],
        vec![id(&gd), Atom::CoevR(g.clone()), id(&gu)],
        vec![id(&gd), id(&gd), q, id(&gu)],
        vec![id(&gd), Atom::EvL(g.clone()), id(&gu)],
        vec![id(&gd), gate(&gu, GateSide::Out), id(&gu)],
        vec![id(&gd), c],
        vec![id(&gd), gate(&gu, GateSide::In), id(&gu)],
        vec![id(&gd), hc],
        vec![Atom::EvL(g)],
    ];
    let make = |layers| -> Result<GateDiagram, TqftError> {
        GateDiagram::new(SliceDiagram::new(Vec::new(), Vec::new(), layers)?, BTreeMap::from([(1, 0)]), BTreeMap::new())
    };
    Ok((make(threaded)?, make(slid)?))
}

fn sliding(t: &Tqft) -> Result<(bool, String), TqftError> {
    let (a, b) = sliding_pair(t)?;
    let h = t.algebra();
    let close = |d: GateDiagram| t.cap_sphere(&t.attach1(&SkeinVector::single(h, d), 1, CutOptions::default())?);
    let values = vec![("threaded".to_string(), close(a)?), ("slid".to_string(), close(b)?)];
    Ok(all_equal(&values))
}

fn multiplicativity(t: &Tqft, programs: &[SurgeryProgram]) -> Result<(bool, String), TqftError> {
    let ks = programs.iter().map(|p| t.k_invariant(p)).collect::<Result<Vec<_>, _>>()?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, p) in programs.iter().enumerate() {
        for (j, q) in programs.iter().enumerate().skip(i) {
            let k = t.k_invariant(&connected_sum(p, q)?)?;
            let want = &ks[i] * &ks[j];
            ok &= k == want;
            parts.push(format!("{} # {}: {k} vs {want}", p.name, q.name));
        }
    }
    Ok((ok, parts.join("; ")))
}

/// The relation battery over the given programs.
pub fn run_relations(t: &Tqft, programs: &[SurgeryProgram]) -> Vec<RelationCheck> {
    let multi: Vec<SurgeryProgram> = programs
        .iter()
        .filter(|p| p.instructions.iter().any(|i| matches!(i, Instruction::Attach0 { turns, .. } if *turns != 1)))
        .cloned()
        .collect();
    vec![
        RelationCheck::from_result("R1 empty move", r1(t)),
        RelationCheck::from_result("R3 disjoint handles commute", r3(t)),
        RelationCheck::from_result("R4 cancelling pair", r4_stabilize(t, programs)),
        RelationCheck::from_result("R4 dual-basis replacement", r4_replacement(t)),
        RelationCheck::from_result("R5 base point and orientation", r5(t, &multi)),
        RelationCheck::from_result("sliding", sliding(t)),
        RelationCheck::from_result("multiplicativity", multiplicativity(t, programs)),
    ]
}
