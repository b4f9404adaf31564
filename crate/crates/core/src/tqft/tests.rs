use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::hopf::AlgebraRegistry;
use crate::rep::{dual_left, hom_space, hom_space_dense, tensor, trivial};
use crate::scalars::Field;

fn load(name: &str) -> Arc<HopfAlgebra> {
    AlgebraRegistry::builtin().load(name, None).unwrap()
}

fn tqft(name: &str) -> Tqft {
    Tqft::new(&load(name)).unwrap()
}

fn program(name: &str) -> SurgeryProgram {
    ProgramRegistry::default().load(name).unwrap()
}

fn int(h: &HopfAlgebra, n: i64) -> FieldElement {
    h.field().from_int(n)
}

/// Elements of `S_3` as permutations of three points.
fn s3_elements() -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                if a != b && b != c && a != c {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn compose(p: &[usize; 3], q: &[usize; 3]) -> [usize; 3] {
    [p[q[0]], p[q[1]], p[q[2]]]
}

/// `#{x : x^p = 1}`, the number of maps from `Z_p` to the group.
fn roots_of_unity_count(group: &str, p: usize) -> i64 {
    match group {
        "s3" => s3_elements()
            .iter()
            .filter(|x| {
                let mut y = [0, 1, 2];
                for _ in 0..p {
                    y = compose(&y, x);
                }
                y == [0, 1, 2]
            })
            .count() as i64,
        zn => {
            let n: usize = zn[1..].parse().unwrap();
            (0..n).filter(|x| (x * p) % n == 0).count() as i64
        }
    }
}

fn group_order(group: &str) -> i64 {
    match group {
        "s3" => 6,
        zn => zn[1..].parse().unwrap(),
    }
}

#[test]
fn circle_caps_to_one() {
    for name in ["trivial", "z2", "z3", "s3", "z2_f2", "z3_f3", "small_quantum_sl2"] {
        let t = tqft(name);
        assert!(t.cap_sphere(&t.circle_vector().unwrap()).unwrap().is_one(), "{name}");
    }
}

#[test]
fn zero_vector_caps_to_zero() {
    let t = tqft("s3");
    assert!(t.cap_sphere(&SkeinVector::zero(t.algebra())).unwrap().is_zero());
}

#[test]
fn trivial_algebra_is_one_everywhere() {
    let t = tqft("trivial");
    let v = t.attach0(&t.circle_vector().unwrap(), 1, &StrandRef::default(), 1).unwrap();
    assert_eq!(v.terms.len(), 1);
    assert!(v.terms[0].0.is_one());
    assert_eq!(v.genus(), Some(1));
    let w = t.attach1(&v, 1, CutOptions::default()).unwrap();
    assert_eq!(w.terms.len(), 1);
    for p in builtin_programs().unwrap() {
        assert!(t.k_invariant(&p).unwrap().is_one(), "{}", p.name);
    }
    let sum = connected_sum(&program("l3_1"), &program("s1xs2")).unwrap();
    assert!(t.k_invariant(&sum).unwrap().is_one());
}

#[test]
fn s1xs2_over_z2_matches_contraction_oracle() {
    // printed by tests/oracle/s1xs2_z2.py
    let t = tqft("z2");
    assert_eq!(t.k_invariant(&program("s1xs2")).unwrap(), int(t.algebra(), 2));
}

#[test]
fn group_algebras_count_homomorphisms() {
    for name in ["z2", "z3", "z4", "z5", "z6", "s3"] {
        let t = tqft(name);
        let h = t.algebra().clone();
        let want = [
            ("s3", 1),
            ("s3_genus1", 1),
            ("s1xs2", group_order(name)),
            ("l2_1", roots_of_unity_count(name, 2)),
            ("l3_1", roots_of_unity_count(name, 3)),
            ("l4_1", roots_of_unity_count(name, 4)),
        ];
        for (p, n) in want {
            assert_eq!(t.k_invariant(&program(p)).unwrap(), int(&h, n), "{name} {p}");
        }
    }
}

#[test]
fn relation_battery_passes() {
    let small: Vec<SurgeryProgram> =
        builtin_programs().unwrap().into_iter().filter(|p| p.name != "L(4,1)").collect();
    for name in ["trivial", "z2", "z3", "s3", "z2_f2", "small_quantum_sl2"] {
        let t = tqft(name);
        for r in run_relations(&t, &small) {
            assert!(r.passed, "{name} {}: {}", r.name, r.detail);
        }
    }
}

#[test]
fn sliding_pair_is_nontrivial_in_the_semisimple_case() {
    let t = tqft("s3");
    let (a, b) = relations::sliding_pair(&t).unwrap();
    let close = |d: GateDiagram| {
        let v = t.attach1(&SkeinVector::single(t.algebra(), d), 1, CutOptions::default()).unwrap();
        t.cap_sphere(&v).unwrap()
    };
    let x = close(a);
    assert!(!x.is_zero());
    assert_eq!(x, close(b));
}

/// A circle split into two parallel strands by module maps `H -> H⊗H -> H`.
fn split_circle(t: &Tqft) -> GateDiagram {
    let h = t.algebra();
    let g = t.generator().clone();
    let gg = tensor(&g, &g).unwrap();
    let up = Strand::up(&g);
    let split = hom_space(&g, &gg).unwrap().remove(0).matrix;
    let merges = hom_space(&gg, &g).unwrap();
    // a merge whose composite with the split has nonzero trace
    let merge = merges
        .into_iter()
        .map(|m| m.matrix)
        .find(|m| !t.ctx().trace_matrix(&g, &m.mul(&split).unwrap()).unwrap().is_zero())
        .unwrap();
    let sc = CouponDef::checked("split", vec![up.clone()], vec![up.clone(), up.clone()], split, h).unwrap();
    let mc = CouponDef::checked("merge", vec![up.clone(), up.clone()], vec![up.clone()], merge, h).unwrap();
    let diagram = SliceDiagram::new(
        Vec::new(),
        Vec::new(),
        vec![
            vec![Atom::CoevR(g.clone())],
            vec![Atom::Id(Strand::down(&g)), Atom::Coupon(sc)],
            vec![Atom::Id(Strand::down(&g)), Atom::Coupon(mc)],
            vec![Atom::EvL(g)],
        ],
    )
    .unwrap();
    let anchors = BTreeMap::from([("a".to_string(), (2, 1)), ("b".to_string(), (2, 2))]);
    GateDiagram::new(diagram, BTreeMap::new(), anchors).unwrap()
}

#[test]
fn base_strand_choice_does_not_matter() {
    for name in ["z2", "s3", "small_quantum_sl2"] {
        let t = tqft(name);
        let v = SkeinVector::single(t.algebra(), split_circle(&t));
        for turns in [0, 1, 2] {
            let at = |anchor: &str| {
                let w = t.attach0(&v, 1, &StrandRef::Anchor(anchor.into()), turns).unwrap();
                t.cap_sphere(&t.attach1(&w, 1, CutOptions::default()).unwrap()).unwrap()
            };
            assert_eq!(at("a"), at("b"), "{name} turns {turns}");
        }
    }
}

#[test]
fn cancelling_pair_is_the_identity_on_the_base() {
    // Σ_i (x^i ⊗ id) c_H (x_i ⊗ id) = id_H
    for name in ["z2", "s3", "sweedler_free", "small_quantum_sl2"] {
        let Ok(h) = AlgebraRegistry::builtin().load(name, None) else { continue };
        let t = Tqft::new(&h).unwrap();
        let g = t.generator().clone();
        let omega = t.ctx().omega(&g).unwrap();
        let c = t.chromatic().matrix.clone();
        let f = h.field();
        let d = h.dim();
        let mut acc = Matrix::zeros(f, d, d);
        for (up, down) in omega.up.iter().zip(&omega.down) {
            let xi = Matrix::from_columns(f, d, vec![up.clone()]).kron(&Matrix::identity(f, d));
            let mut cols = vec![Vec::new(); d];
            for (j, x) in down {
                cols[*j].push((0, x.clone()));
            }
            let xu = Matrix::from_columns(f, 1, cols).kron(&Matrix::identity(f, d));
            acc = acc.add(&xu.mul(&c).unwrap().mul(&xi).unwrap()).unwrap();
        }
        assert_eq!(acc, Matrix::identity(f, d), "{name}");
    }
}

#[test]
fn connected_sums_and_stabilizations() {
    let t = tqft("z3");
    let s3 = program("s3");
    let l3 = program("l3_1");
    assert!(t.k_invariant(&connected_sum(&s3, &s3).unwrap()).unwrap().is_one());
    assert_eq!(t.k_invariant(&connected_sum(&l3, &s3).unwrap()).unwrap(), t.k_invariant(&l3).unwrap());
    let twice = stabilize(&stabilize(&s3, 0).unwrap(), 0).unwrap();
    assert!(t.k_invariant(&twice).unwrap().is_one());
    let sum = connected_sum(&l3, &l3).unwrap();
    assert_eq!(sum.max_gate(), 2);
    assert_eq!(t.k_invariant(&sum).unwrap(), int(t.algebra(), 9));
}

#[test]
fn quantum_lens_space_l4() {
    let t = tqft("small_quantum_sl2");
    let k = t.k_invariant(&program("l4_1")).unwrap();
    let stab = stabilize(&program("l4_1"), 0).unwrap();
    assert_eq!(t.k_invariant(&stab).unwrap(), k);
}

#[test]
fn attach0_needs_a_projective_up_strand() {
    let t = tqft("z2");
    let v = t.circle_vector().unwrap();
    let down = StrandRef::At { level: 1, position: 0 };
    assert!(matches!(t.attach0(&v, 1, &down, 1), Err(TqftError::NoProjectiveStrand(_))));
    let off = StrandRef::At { level: 7, position: 0 };
    assert!(matches!(t.attach0(&v, 1, &off, 1), Err(TqftError::NoProjectiveStrand(_))));

    let t = tqft("z2_f2");
    let p = SurgeryProgram::parse(UNIT_LOOP_PROGRAM).unwrap();
    let v = t.initial(&p).unwrap();
    let one = StrandRef::Anchor("u".into());
    assert!(matches!(t.attach0(&v, 1, &one, 1), Err(TqftError::NoProjectiveStrand(_))));
}

const UNIT_LOOP_PROGRAM: &str = r#"{
  "name": "unit loop beside the circle",
  "initial": {
    "morphisms": {"h": {"in": [["H", "up"]], "out": [["H", "up"]], "right_mult": [1, 0]}},
    "layers": [
      [{"coev_r": "H"}, {"coev_r": "1"}],
      [{"id": ["H", "down"]}, {"coupon": "h"}, {"id": ["1", "down"]}, {"id": ["1", "up"]}],
      [{"ev_l": "H"}, {"ev_l": "1"}]
    ],
    "anchors": {"o": [1, 1], "u": [1, 3]}
  },
  "instructions": [{"op": "cap"}]
}"#;

#[test]
fn custom_initial_diagram() {
    let t = tqft("z2");
    let p = SurgeryProgram::parse(UNIT_LOOP_PROGRAM).unwrap();
    // the unit loop contributes its dimension
    assert!(t.k_invariant(&p).unwrap().is_one());
    let mut q = p.clone();
    q.instructions = program("s1xs2").instructions;
    assert_eq!(t.k_invariant(&q).unwrap(), int(t.algebra(), 2));
}

#[test]
fn cut_errors() {
    let t = tqft("z2_f2");
    let circle = t.circle().unwrap();
    // a gate nothing passes through
    let mut empty = circle.clone();
    empty.shifts.insert(5, 0);
    let v = SkeinVector::single(t.algebra(), empty);
    assert!(matches!(t.attach1(&v, 5, CutOptions::default()), Err(TqftError::InadmissibleCut { .. })));
    // a gate carrying only the unit
    let one = trivial(t.algebra());
    let u = Strand::up(&one);
    let mut layers = circle.diagram.layers.clone();
    layers.insert(1, vec![Atom::Id(Strand::down(t.generator())), Atom::Id(Strand::up(t.generator())), Atom::Gate { gate: 2, strand: u.clone(), side: GateSide::Out }]);
    layers.insert(2, vec![Atom::Id(Strand::down(t.generator())), Atom::Id(Strand::up(t.generator())), Atom::Gate { gate: 2, strand: u, side: GateSide::In }]);
    let d = GateDiagram::new(SliceDiagram::new(Vec::new(), Vec::new(), layers).unwrap(), BTreeMap::from([(2, 0)]), BTreeMap::new()).unwrap();
    let v = SkeinVector::single(t.algebra(), d);
    assert!(matches!(t.attach1(&v, 2, CutOptions::default()), Err(TqftError::InadmissibleCut { .. })));
    // size cap
    let t = tqft("small_quantum_sl2").with_size_cap(32);
    assert!(matches!(t.k_invariant(&program("l2_1")), Err(TqftError::SizeCap { dim: 64, cap: 32 })));
}

#[test]
fn gate_diagrams_are_validated() {
    let t = tqft("z2");
    let g = t.generator().clone();
    let gu = Strand::up(&g);
    let gd = Strand::down(&g);
    let layers = vec![
        vec![Atom::CoevR(g.clone())],
        vec![Atom::Id(gd.clone()), Atom::Gate { gate: 1, strand: gu.clone(), side: GateSide::Out }, Atom::Id(gu.clone())],
        vec![Atom::Id(gd.clone()), Atom::Id(gu.clone()), Atom::Id(gu.clone())],
        vec![Atom::Id(gd), Atom::Gate { gate: 1, strand: gu.clone(), side: GateSide::In }, Atom::Id(gu)],
        vec![Atom::EvL(g)],
    ];
    let d = SliceDiagram::new(Vec::new(), Vec::new(), layers).unwrap();
    assert!(GateDiagram::new(d.clone(), BTreeMap::new(), BTreeMap::new()).is_err());
    let ok = GateDiagram::new(d.clone(), BTreeMap::from([(1, 0)]), BTreeMap::new()).unwrap();
    assert_eq!(ok.genus(), 1);
    assert!(GateDiagram::new(d, BTreeMap::from([(1, 0)]), BTreeMap::from([("x".to_string(), (9, 0))])).is_err());
}

#[test]
fn programs_are_validated() {
    let bad = [
        r#"{"name": "no cap", "instructions": []}"#,
        r#"{"name": "early cap", "instructions": [{"op": "cap"}, {"op": "cap"}]}"#,
        r#"{"name": "unopened", "instructions": [{"op": "attach1", "gate": 1}, {"op": "cap"}]}"#,
        r#"{"name": "left open", "instructions": [{"op": "attach0", "gate": 1}, {"op": "cap"}]}"#,
        r#"{"name": "twice", "instructions": [{"op": "attach0", "gate": 1}, {"op": "attach0", "gate": 1}, {"op": "cap"}]}"#,
    ];
    let t = tqft("z2");
    for text in bad {
        let p = SurgeryProgram::parse(text).unwrap();
        assert!(matches!(t.run(&p), Err(TqftError::InvalidProgram(_))), "{text}");
    }
    assert!(SurgeryProgram::parse(r#"{"name": "x", "instructions": [{"op": "twist"}]}"#).is_err());
    assert!(stabilize(&program("s3"), 1).is_err());
}

#[test]
fn programs_round_trip_through_json() {
    for p in builtin_programs().unwrap() {
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(SurgeryProgram::parse(&text).unwrap(), p);
    }
    let p = SurgeryProgram::parse(r#"{"name": "x", "instructions": [{"op": "stabilize"}, {"op": "cap"}]}"#).unwrap();
    assert_eq!(p.instructions[0], Instruction::Stabilize { base: StrandRef::default() });
    assert!(tqft("s3").k_invariant(&p).unwrap().is_one());
}

#[test]
fn pants_obstruction_dichotomy() {
    for name in ["z2_f2", "small_quantum_sl2"] {
        let p = pants_obstruction(&tqft(name)).unwrap();
        assert!(!p.semisimple);
        assert!(p.value.is_zero(), "{name}");
    }
    // for a group algebra c_1 = Σ_x (1/n) e_x ⊗ e_x* on the diagonal, so its trace is n · 1/n
    for (name, n) in [("trivial", 1), ("z2", 2), ("z3", 3), ("z5", 5), ("s3", 6)] {
        let t = tqft(name);
        let h = t.algebra();
        let want = (0..n).fold(h.field().zero(), |acc, _| &acc + &int(h, n).inv().unwrap());
        let p = pants_obstruction(&t).unwrap();
        assert!(p.semisimple);
        assert_eq!(p.value, want, "{name}");
        assert_eq!(p.value, h.eval_integral(h.unit()));
    }
}

#[test]
fn zero_cap() {
    for name in ["trivial", "z2", "z3", "s3"] {
        let t = tqft(name);
        assert!(zero_cap_check(&t).unwrap().is_one(), "{name}");
        let z = attach_zero_cap(&t, &t.circle_vector().unwrap()).unwrap();
        assert_eq!(z.weight, pants_obstruction(&t).unwrap().value.inv().unwrap());
        assert!(z.sphere.scalar().unwrap().is_one());
        assert_eq!(t.cap_sphere(&z.vector).unwrap(), z.weight);
    }
    for name in ["z2_f2", "small_quantum_sl2"] {
        let t = tqft(name);
        assert!(matches!(zero_cap_check(&t), Err(TqftError::NotSemisimple(_))));
        assert!(matches!(attach_zero_cap(&t, &t.circle_vector().unwrap()), Err(TqftError::NotSemisimple(_))));
    }
}

#[test]
fn spanning_dimension() {
    let reg = AlgebraRegistry::builtin();
    for name in ["trivial", "z2", "z3", "z2_f2", "s3", "sweedler", "small_quantum_sl2"] {
        let h = reg.load(name, None).unwrap();
        assert_eq!(skein_spanning_dim(&h, 0, DEFAULT_SIZE_CAP).unwrap(), 1);
        let g1 = skein_spanning_dim(&h, 1, DEFAULT_SIZE_CAP).unwrap();
        let reg_h = regular(&h);
        let handle = tensor(&reg_h, &dual_left(&reg_h)).unwrap();
        assert_eq!(g1, hom_space_dense(&trivial(&h), &handle).unwrap().len(), "{name}");
        // Hom(1, H ⊗ H*) ≅ End_H(H) ≅ H
        assert_eq!(g1, h.dim(), "{name}");
    }
    let trivial_h = reg.load("trivial", None).unwrap();
    assert_eq!(skein_spanning_dim(&trivial_h, 5, DEFAULT_SIZE_CAP).unwrap(), 1);
    let q = reg.load("small_quantum_sl2", None).unwrap();
    assert!(matches!(skein_spanning_dim(&q, 3, DEFAULT_SIZE_CAP), Err(TqftError::SizeCap { .. })));
}

#[test]
fn prime_field_algebra_over_f5() {
    let h = AlgebraRegistry::builtin().load("z2", Some(Field::prime(5).unwrap())).unwrap();
    let t = Tqft::new(&h).unwrap();
    assert_eq!(t.k_invariant(&program("l2_1")).unwrap(), h.field().from_int(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_are_multiplicative_and_stable(
        which in 0usize..3,
        a in 0usize..5,
        b in 0usize..5,
        pos in 0usize..4,
    ) {
        let name = ["z2", "z3", "s3"][which];
        let t = tqft(name);
        let corpus: Vec<SurgeryProgram> =
            builtin_programs().unwrap().into_iter().filter(|p| p.name != "L(4,1)").collect();
        let (p, q) = (&corpus[a], &corpus[b]);
        let sum = connected_sum(p, q).unwrap();
        let at = pos.min(sum.instructions.len() - 1);
        let k = t.k_invariant(&stabilize(&sum, at).unwrap()).unwrap();
        prop_assert_eq!(k, &t.k_invariant(p).unwrap() * &t.k_invariant(q).unwrap());
    }

    #[test]
    fn cut_choice_does_not_matter(which in 0usize..3, basepoint in 0usize..6, reversed: bool) {
        let name = ["z2", "s3", "small_quantum_sl2"][which];
        let t = tqft(name);
        let v = t.attach0(&t.circle_vector().unwrap(), 1, &StrandRef::default(), 3).unwrap();
        let base = t.cap_sphere(&t.attach1(&v, 1, CutOptions::default()).unwrap()).unwrap();
        let other = t.cap_sphere(&t.attach1(&v, 1, CutOptions { basepoint, reversed }).unwrap()).unwrap();
        prop_assert_eq!(base, other);
    }
}
