use std::sync::Arc;

use proptest::prelude::*;

use super::corpus::closed_graphs;
use super::file::right_mult;
use super::*;
use crate::hopf::{AlgebraRegistry, HopfAlgebra};
use crate::rep::{alpha, hom_space, regular, tensor, trivial};
use crate::scalars::Field;

fn load(name: &str) -> Arc<HopfAlgebra> {
    AlgebraRegistry::builtin().load(name, None).unwrap()
}

fn rm_atom(h: &Arc<HopfAlgebra>, name: &str, a: &SparseVec) -> Atom {
    let up = Strand::up(&regular(h));
    Atom::Coupon(CouponDef::checked(name, vec![up.clone()], vec![up], right_mult(h, a), h).unwrap())
}

fn combo(a: &Module, b: &Module, weights: &[i64]) -> Matrix {
    let f = a.algebra().field();
    let mut m = Matrix::zeros(f, b.dim(), a.dim());
    for (phi, w) in hom_space(a, b).unwrap().iter().zip(weights.iter().cycle()) {
        m = m.add(&phi.matrix.scale(&f.from_int(*w))).unwrap();
    }
    m
}

#[test]
fn identity_layer_and_circle() {
    let h = load("z2");
    let reg = regular(&h);
    let d = SliceDiagram::new(vec![Strand::up(&reg)], vec![Strand::up(&reg)], vec![vec![Atom::id(&reg)]]).unwrap();
    assert_eq!(d.evaluate().unwrap(), Matrix::identity(h.field(), 2));
    let circle = SliceDiagram::new(vec![], vec![], vec![vec![Atom::CoevR(reg.clone())], vec![Atom::EvL(reg)]]).unwrap();
    assert_eq!(circle.scalar().unwrap(), h.field().from_int(2));
}

#[test]
fn snake_on_dual_is_identity() {
    let h = load("small_quantum_sl2");
    let reg = regular(&h);
    let d = SliceDiagram::new(
        vec![Strand::down(&reg)],
        vec![Strand::down(&reg)],
        vec![
            vec![Atom::Id(Strand::down(&reg)), Atom::CoevL(reg.clone())],
            vec![Atom::EvL(reg.clone()), Atom::Id(Strand::down(&reg))],
        ],
    )
    .unwrap();
    assert_eq!(d.evaluate().unwrap(), Matrix::identity(h.field(), 8));
}

#[test]
fn mismatched_layer_is_reported() {
    let h = load("z2");
    let reg = regular(&h);
    let err = SliceDiagram::new(
        vec![Strand::up(&reg)],
        vec![Strand::up(&reg)],
        vec![vec![Atom::id(&reg)], vec![Atom::EvL(reg.clone())]],
    )
    .err()
    .unwrap();
    assert!(matches!(err, DiagramError::SignatureMismatch { layer: 1, .. }));
}

#[test]
fn gates_are_rejected() {
    let h = load("z2");
    let reg = regular(&h);
    let d = SliceDiagram::new(
        vec![Strand::up(&reg)],
        vec![],
        vec![vec![Atom::Gate { gate: 0, strand: Strand::up(&reg), side: GateSide::In }]],
    )
    .unwrap();
    assert!(matches!(d.evaluate(), Err(DiagramError::GateInPlainDiagram(0))));
}

#[test]
fn fprime_examples_on_z2() {
    let h = load("z2");
    let ctx = crate::mtrace::TraceContext::new(&h).unwrap();
    let f = h.field();
    let reg = regular(&h);
    let bare = OpenPresentation::new(SliceDiagram::identity(vec![Strand::up(&reg)])).unwrap();
    assert_eq!(bare.fprime(&ctx).unwrap(), f.one());
    let zero = Atom::Coupon(
        CouponDef::new("0", vec![Strand::up(&reg)], vec![Strand::up(&reg)], Matrix::zeros(f, 2, 2)).unwrap(),
    );
    let t = OpenPresentation::new(SliceDiagram::layer(vec![zero])).unwrap();
    assert!(t.fprime(&ctx).unwrap().is_zero());
    // right multiplication by the generator: t_H = λ(u) = 0
    let t = OpenPresentation::new(SliceDiagram::layer(vec![rm_atom(&h, "u", &h.basis_vec(1))])).unwrap();
    assert!(t.fprime(&ctx).unwrap().is_zero());
}

#[test]
fn rotations() {
    let h = load("z2");
    let ctx = crate::mtrace::TraceContext::new(&h).unwrap();
    let reg = regular(&h);
    let bare = OpenPresentation::new(SliceDiagram::identity(vec![Strand::up(&reg)])).unwrap();
    let rot = bare.rotate_cut(RotateMode::ConjugateLeft).unwrap();
    assert_eq!(rot.color().key(), "H*");
    assert_eq!(rot.diagram.evaluate().unwrap(), Matrix::identity(h.field(), 2));
    assert_eq!(rot.fprime(&ctx).unwrap(), h.field().one());

    for name in ["z2", "s3", "small_quantum_sl2"] {
        let h = load(name);
        let t = OpenPresentation::new(SliceDiagram::layer(vec![rm_atom(
            &h,
            "a",
            &crate::scalars::collect_sparse([(0, h.field().from_int(2)), (h.dim() - 1, h.field().one())]),
        )]))
        .unwrap();
        let want = t.diagram.evaluate().unwrap();
        for (a, b) in [
            (RotateMode::ConjugateLeft, RotateMode::ConjugateRight),
            (RotateMode::ConjugateRight, RotateMode::ConjugateLeft),
        ] {
            let twice = t.rotate_cut(a).unwrap().rotate_cut(b).unwrap();
            assert_eq!(twice.diagram.evaluate().unwrap(), want, "{name}");
        }
    }
}

#[test]
fn admissibility() {
    let h = load("z2");
    let reg = regular(&h);
    assert!(admissibility_check(&SliceDiagram::identity(vec![Strand::up(&reg)])));
    let empty = SliceDiagram::identity(Vec::new());
    assert!(!admissibility_check(&empty));
    let hf2 = AlgebraRegistry::builtin().load("z2", Some(Field::prime(2).unwrap())).unwrap();
    let one = trivial(&hf2);
    assert!(!admissibility_check(&SliceDiagram::identity(vec![Strand::up(&one)])));
}

#[test]
fn cutting_path_corpus() {
    for name in ["z2", "z3", "s3", "z2_f3", "small_quantum_sl2"] {
        let h = load(name);
        let ctx = crate::mtrace::TraceContext::new(&h).unwrap();
        let graphs = closed_graphs(&h).unwrap();
        assert!(graphs.len() >= 10, "{name}: {}", graphs.len());
        let mut nonzero = 0;
        for g in graphs {
            let vals = g.values(&ctx).unwrap();
            assert!(vals.len() >= 2, "{}", g.name);
            for (label, v) in &vals {
                assert_eq!(v, &vals[0].1, "{name} {}: {label}", g.name);
            }
            if !vals[0].1.is_zero() {
                nonzero += 1;
            }
        }
        assert!(nonzero >= 3, "{name}: only {nonzero} nonzero graphs");
    }
}

#[test]
fn skein_relation_carries_to_fprime() {
    let h = load("small_quantum_sl2");
    let ctx = crate::mtrace::TraceContext::new(&h).unwrap();
    let f = h.field();
    let a = crate::scalars::collect_sparse([(1, f.one()), (6, f.from_int(2))]);
    let b = crate::scalars::collect_sparse([(3, f.from_int(-1)), (0, f.one())]);
    let s = crate::scalars::sparse_add(&a, &b);
    let ts: Vec<OpenPresentation> = [a, b, s]
        .iter()
        .enumerate()
        .map(|(k, x)| OpenPresentation::new(SliceDiagram::layer(vec![rm_atom(&h, &format!("c{k}"), x)])).unwrap())
        .collect();
    let coeffs = [f.one(), f.one(), -f.one()];
    let lhs = ts.iter().zip(&coeffs).fold(Matrix::zeros(f, 8, 8), |acc, (t, c)| {
        acc.add(&t.diagram.evaluate().unwrap().scale(c)).unwrap()
    });
    assert!(lhs.is_zero());
    for mode in [RotateMode::ConjugateLeft, RotateMode::ConjugateRight] {
        let total = ts
            .iter()
            .zip(&coeffs)
            .fold(f.zero(), |acc, (t, c)| &acc + &(&t.rotate_cut(mode).unwrap().fprime(&ctx).unwrap() * c));
        assert!(total.is_zero());
    }
}

#[test]
fn bridged_matches_flat() {
    let h = load("small_quantum_sl2");
    let reg = regular(&h);
    let hd = crate::rep::dual_left(&reg);
    let (up, down) = (Strand::up(&reg), Strand::down(&reg));
    let hhd = tensor(&reg, &hd).unwrap();
    let hh = tensor(&reg, &reg).unwrap();
    let a = Atom::Coupon(
        CouponDef::checked("a", vec![up.clone(), down.clone()], vec![up.clone(), down.clone()], combo(&hhd, &hhd, &[1, -2, 3]), &h)
            .unwrap(),
    );
    let b = Atom::Coupon(
        CouponDef::checked("b", vec![up.clone(), up.clone()], vec![up.clone(), up.clone()], combo(&hh, &hh, &[2, 1]), &h)
            .unwrap(),
    );
    let flat = SliceDiagram::new(
        vec![up.clone(), up.clone()],
        vec![up.clone(), up.clone()],
        vec![
            vec![Atom::id(&reg), Atom::CoevR(reg.clone()), Atom::id(&reg)],
            vec![a.clone(), b.clone()],
            vec![Atom::id(&reg), Atom::EvL(reg.clone()), Atom::id(&reg)],
        ],
    )
    .unwrap();
    let bridged = BridgedDiagram {
        left: SliceDiagram::layer(vec![a]),
        right: SliceDiagram::layer(vec![b]),
        left_outer: (1, 1),
        right_outer: (1, 1),
        bonds: vec![
            Bond::Cup { matrix: crate::rep::pivotal_coev_matrix(&reg).unwrap(), left_in: 0, right_in: 0 },
            Bond::Cap { matrix: crate::rep::pairing_matrix(h.field(), 8), left_out: 0, right_out: 0 },
        ],
    };
    let want = flat.evaluate().unwrap();
    let got = bridged.evaluate().unwrap();
    assert_eq!(got.to_matrix(), want);
    let id = Matrix::identity(h.field(), 8);
    let is_id = want == Matrix::identity(h.field(), 64);
    assert_eq!(got.equals_kron(&id, &id), is_id);
    assert_eq!(got.first_difference(&id, &id).is_none(), is_id);
}

#[test]
fn bridged_pass_strand() {
    let h = load("sweedler");
    let reg = regular(&h);
    let al = alpha(&h);
    let up = Strand::up(&reg);
    let ua = Strand::up(&al);
    let ah = tensor(&al, &reg).unwrap();
    let ha = tensor(&reg, &al).unwrap();
    let e = Atom::Coupon(CouponDef::checked("e", vec![up.clone()], vec![ua.clone(), up.clone()], combo(&reg, &ah, &[1, 2, -1]), &h).unwrap());
    let q = Atom::Coupon(CouponDef::checked("q", vec![up.clone(), ua.clone()], vec![up.clone()], combo(&ha, &reg, &[3, 1]), &h).unwrap());
    let flat = SliceDiagram::new(
        vec![up.clone(), up.clone()],
        vec![up.clone(), up.clone()],
        vec![vec![Atom::id(&reg), e.clone()], vec![q.clone(), Atom::id(&reg)]],
    )
    .unwrap();
    let bridged = BridgedDiagram {
        left: SliceDiagram::layer(vec![q]),
        right: SliceDiagram::layer(vec![e]),
        left_outer: (1, 1),
        right_outer: (1, 1),
        bonds: vec![Bond::RightToLeft { right_out: 0, left_in: 0 }],
    };
    assert_eq!(bridged.evaluate().unwrap().to_matrix(), flat.evaluate().unwrap());
}

#[test]
fn diagram_file_round() {
    let h = load("z2");
    let text = r#"{
        "modules": {"G": "regular", "GG": {"tensor": ["G", "G"]}},
        "morphisms": {"f": {"in": [["G", "up"]], "out": [["G", "up"]], "right_mult": [1, 1]}},
        "bottom": [], "top": [],
        "layers": [[{"coev_l": "G"}], [{"coupon": "f"}, {"id": ["G", "down"]}], [{"ev_r": "G"}]],
        "cut": 1
    }"#;
    let file = DiagramFile::parse(text, &h).unwrap();
    assert_eq!(file.cut, Some(1));
    assert_eq!(file.registry.module("GG").unwrap().dim(), 4);
    // categorical trace of right multiplication by 1+u
    assert_eq!(file.diagram.scalar().unwrap(), h.field().from_int(2));
    let bad = text.replace("\"right_mult\": [1, 1]", "\"matrix\": [[1, 0], [1, 0]]");
    assert!(DiagramFile::parse(&bad, &h).is_err());
}

fn small_coupons(h: &Arc<HopfAlgebra>) -> Vec<Atom> {
    let f = h.field();
    (0..h.dim())
        .map(|i| {
            let a = crate::scalars::collect_sparse([(i, f.one()), ((i + 1) % h.dim(), f.from_int(2))]);
            rm_atom(h, &format!("r{i}"), &a)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn functoriality(picks in proptest::collection::vec(0usize..6, 4)) {
        let h = load("s3");
        let cs = small_coupons(&h);
        let (a, b, c, d) = (&cs[picks[0]], &cs[picks[1]], &cs[picks[2]], &cs[picks[3]]);
        let d1 = SliceDiagram::layer(vec![a.clone()]).stack(&SliceDiagram::layer(vec![b.clone()])).unwrap();
        let d2 = SliceDiagram::layer(vec![c.clone()]);
        let stacked = d1.stack(&d2).unwrap();
        prop_assert_eq!(stacked.evaluate().unwrap(), d2.evaluate().unwrap().mul(&d1.evaluate().unwrap()).unwrap());
        let side = d1.beside(&SliceDiagram::layer(vec![d.clone()])).unwrap();
        prop_assert_eq!(side.evaluate().unwrap(), d1.evaluate().unwrap().kron(&SliceDiagram::layer(vec![d.clone()]).evaluate().unwrap()));
    }

    #[test]
    fn height_exchange(i in 0usize..6, j in 0usize..6) {
        let h = load("s3");
        let reg = regular(&h);
        let cs = small_coupons(&h);
        let (a, b) = (&cs[i], &cs[j]);
        let sig = vec![Strand::up(&reg), Strand::up(&reg)];
        let first = SliceDiagram::new(sig.clone(), sig.clone(), vec![vec![a.clone(), Atom::id(&reg)], vec![Atom::id(&reg), b.clone()]]).unwrap();
        let second = SliceDiagram::new(sig.clone(), sig.clone(), vec![vec![Atom::id(&reg), b.clone()], vec![a.clone(), Atom::id(&reg)]]).unwrap();
        let both = SliceDiagram::new(sig.clone(), sig, vec![vec![a.clone(), b.clone()]]).unwrap();
        let v = both.evaluate().unwrap();
        prop_assert_eq!(first.evaluate().unwrap(), v.clone());
        prop_assert_eq!(second.evaluate().unwrap(), v);
    }
}
