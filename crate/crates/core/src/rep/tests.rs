use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::hopf::{AlgebraRegistry, HopfAlgebra};
use crate::scalars::{Field, FieldElement, Matrix};

fn load(name: &str) -> Arc<HopfAlgebra> {
    AlgebraRegistry::builtin().load(name, None).unwrap()
}

fn mat(h: &HopfAlgebra, rows: &[&[i64]]) -> Matrix {
    let f = h.field();
    let rows: Vec<Vec<FieldElement>> = rows.iter().map(|r| r.iter().map(|x| f.from_int(*x)).collect()).collect();
    Matrix::from_rows(f, &rows).unwrap()
}

/// Two-dimensional quantum module: K = diag(1, -1), E lowers, F = 0.
pub(crate) fn quantum_doublet(h: &Arc<HopfAlgebra>) -> Module {
    let k = mat(h, &[&[1, 0], &[0, -1]]);
    let e = mat(h, &[&[0, 0], &[1, 0]]);
    let f0 = Matrix::zeros(h.field(), 2, 2);
    let id = Matrix::identity(h.field(), 2);
    let action = (0..8)
        .map(|i| {
            let mut m = id.clone();
            if i & 1 == 1 {
                m = m.mul(&k).unwrap();
            }
            if i & 2 == 2 {
                m = m.mul(&e).unwrap();
            }
            if i & 4 == 4 {
                m = m.mul(&f0).unwrap();
            }
            m
        })
        .collect();
    HModule::custom(h, "V", action, None).unwrap()
}

#[test]
fn hom_dimensions_over_z2() {
    let h = load("z2");
    let (reg, one) = (regular(&h), trivial(&h));
    assert_eq!(hom_space(&reg, &reg).unwrap().len(), 2);
    assert_eq!(hom_space(&reg, &one).unwrap().len(), 1);
    assert_eq!(hom_space(&one, &alpha(&h)).unwrap().len(), 1);
    assert_eq!(invariants(&reg).unwrap().len(), 1);
}

#[test]
fn sparse_and_dense_hom_agree() {
    for name in ["sweedler", "small_quantum_sl2", "z3_f3"] {
        let h = load(name);
        let reg = regular(&h);
        let m = tensor(&reg, &dual_left(&reg)).unwrap();
        let a = hom_space(&reg, &m).unwrap();
        let b = hom_space_dense(&reg, &m).unwrap();
        assert_eq!(a.len(), b.len(), "{name}");
        for f in a.iter().chain(&b) {
            f.check_linear().unwrap();
        }
    }
}

#[test]
fn quantum_doublet_is_a_module_but_not_projective() {
    let h = load("small_quantum_sl2");
    let v = quantum_doublet(&h);
    v.check_action().unwrap();
    assert!(!v.is_projective());
    assert!(matches!(v.presentation(), Err(RepError::NotProjective(_))));
    assert!(tensor(&v, &regular(&h)).unwrap().presentation().is_ok());
}

#[test]
fn bad_custom_action_is_rejected() {
    let h = load("small_quantum_sl2");
    let mut action: Vec<Matrix> = quantum_doublet(&h).actions().to_vec();
    action[1] = Matrix::identity(h.field(), 2);
    assert!(matches!(HModule::custom(&h, "bad", action, None), Err(RepError::InvalidModule(_))));
}

#[test]
fn duals_cancel_on_the_nose() {
    let h = load("sweedler");
    let m = tensor(&regular(&h), &alpha(&h)).unwrap();
    assert_eq!(dual_left(&dual_right(&m)), m);
    assert_eq!(dual_right(&dual_left(&m)), m);
    assert_ne!(dual_left(&dual_left(&m)), m);
}

fn snake_check(m: &Module, side: Side) {
    let (ev, coev) = ev_coev(m, side).unwrap();
    ev.check_linear().unwrap();
    coev.check_linear().unwrap();
    let id = Morphism::identity(m);
    let (d, left_dual) = match side {
        Side::Left => (dual_left(m), true),
        Side::Right => (dual_right(m), false),
    };
    let idd = Morphism::identity(&d);
    let f = m.algebra().field();
    // M -> M ⊗ M* ⊗ M -> M (left), M -> *M ⊗ M ⊗ *M ... per side
    let (zig, zag) = if left_dual {
        (
            coev.tensor(&id).unwrap().matrix.clone(),
            id.tensor(&ev).unwrap().matrix.clone(),
        )
    } else {
        (
            id.tensor(&coev).unwrap().matrix.clone(),
            ev.tensor(&id).unwrap().matrix.clone(),
        )
    };
    assert_eq!(zag.mul(&zig).unwrap(), Matrix::identity(f, m.dim()));
    let (zig, zag) = if left_dual {
        (idd.tensor(&coev).unwrap().matrix.clone(), ev.tensor(&idd).unwrap().matrix.clone())
    } else {
        (coev.tensor(&idd).unwrap().matrix.clone(), idd.tensor(&ev).unwrap().matrix.clone())
    };
    assert_eq!(zag.mul(&zig).unwrap(), Matrix::identity(f, d.dim()));
}

#[test]
fn snake_identities() {
    for name in ["sweedler", "small_quantum_sl2", "s3"] {
        let h = load(name);
        let reg = regular(&h);
        snake_check(&reg, Side::Left);
        snake_check(&reg, Side::Right);
        snake_check(&alpha(&h), Side::Left);
    }
    let q = load("small_quantum_sl2");
    snake_check(&quantum_doublet(&q), Side::Left);
    snake_check(&quantum_doublet(&q), Side::Right);
}

#[test]
fn pivotal_structure_maps_are_linear() {
    let h = load("small_quantum_sl2");
    for m in [regular(&h), quantum_doublet(&h), tensor(&quantum_doublet(&h), &quantum_doublet(&h)).unwrap()] {
        pivotal_ev_right(&m).unwrap().check_linear().unwrap();
        pivotal_coev_right(&m).unwrap().check_linear().unwrap();
        pivotal_iso(&m).unwrap().check_linear().unwrap();
        // right snake: (ev~ ⊗ id)(id ⊗ coev~) = id on M
        let id = Morphism::identity(&m);
        let zig = id.tensor(&pivotal_coev_right(&m).unwrap()).unwrap();
        let zag = pivotal_ev_right(&m).unwrap().tensor(&id).unwrap();
        assert_eq!(zag.matrix.mul(&zig.matrix).unwrap(), Matrix::identity(h.field(), m.dim()));
    }
    let sw = load("sweedler");
    assert!(matches!(pivotal_iso(&regular(&sw)), Err(RepError::Hopf(_))));
}

#[test]
fn pivotal_iso_is_monoidal_and_natural() {
    let h = load("small_quantum_sl2");
    let v = quantum_doublet(&h);
    let reg = regular(&h);
    let vr = tensor(&v, &reg).unwrap();
    let lhs = pivotal_iso(&vr).unwrap().matrix;
    let rhs = pivotal_iso(&v).unwrap().matrix.kron(&pivotal_iso(&reg).unwrap().matrix);
    assert_eq!(lhs, rhs);
    for f in hom_space(&reg, &vr).unwrap() {
        let ff = f.dual().dual();
        let a = pivotal_iso(&vr).unwrap().matrix.mul(&f.matrix).unwrap();
        let b = ff.matrix.mul(&pivotal_iso(&reg).unwrap().matrix).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn dual_reverses_composition() {
    let h = load("sweedler");
    let reg = regular(&h);
    let homs = hom_space(&reg, &reg).unwrap();
    for f in &homs {
        for g in &homs {
            let gf = f.then(g).unwrap();
            assert_eq!(gf.dual().matrix, g.dual().then(&f.dual()).unwrap().matrix);
            f.dual().check_linear().unwrap();
        }
    }
}

#[test]
fn semisimple_fallback_presents_everything() {
    let h = load("z3");
    for m in [trivial(&h), alpha(&h), tensor(&alpha(&h), &trivial(&h)).unwrap()] {
        let p = m.presentation().unwrap();
        p.check(&m).unwrap();
    }
    let f2 = load("z2_f2");
    assert!(trivial(&f2).presentation().is_err());
}

#[test]
fn custom_retract_is_checked() {
    let h = load("sweedler");
    let reg = regular(&h);
    let id = Matrix::identity(h.field(), 4);
    let good = Presentation::new(1, id.clone(), id.clone());
    let m = HModule::custom(&h, "R", reg.actions().to_vec(), Some(good)).unwrap();
    assert!(m.is_projective());
    let bad = Presentation::new(1, id.scale(&h.field().from_int(2)), id);
    assert!(matches!(HModule::custom(&h, "R", reg.actions().to_vec(), Some(bad)), Err(RepError::Presentation(_))));
}

#[test]
fn module_file_round_trip() {
    let h = load("z2");
    let text = r#"{"label": "sign", "dimension": 1, "action": [[[1]], [[-1]]]}"#;
    let file: ModuleFile = serde_json::from_str(text).unwrap();
    let m = file.build(&h).unwrap();
    assert_eq!(m.dim(), 1);
    assert_eq!(m.action(1).get(0, 0), Field::Rational.from_int(-1));
    assert!(m.presentation().is_ok());
}

fn module_zoo(h: &Arc<HopfAlgebra>) -> Vec<Module> {
    let reg = regular(h);
    let mut zoo = vec![reg.clone(), trivial(h), alpha(h), dual_left(&reg), dual_right(&reg)];
    if h.name() == "small_quantum_sl2" {
        zoo.push(quantum_doublet(h));
    }
    zoo
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn derived_presentations_are_retracts(
        idx in 0usize..3,
        picks in proptest::collection::vec(0usize..16, 1..3),
        dual_mask in 0u8..8,
    ) {
        let h = load(["sweedler", "small_quantum_sl2", "z3_f3"][idx]);
        let zoo = module_zoo(&h);
        let mut ms: Vec<Module> = picks.iter().map(|p| zoo[p % zoo.len()].clone()).collect();
        ms.push(regular(&h));
        let shift = picks[0] % ms.len();
        ms.rotate_right(shift);
        let mut m = tensor_all(&ms).unwrap();
        if dual_mask & 1 == 1 {
            m = dual_left(&m);
        }
        if dual_mask & 2 == 2 {
            m = dual_right(&m);
        }
        if dual_mask & 4 == 4 {
            m = direct_sum(&m, &regular(&h)).unwrap();
        }
        m.check_action().unwrap();
        prop_assert!(m.is_projective());
        let p = m.presentation().unwrap();
        p.check(&m).unwrap();
    }

    #[test]
    fn tensor_and_dual_actions_are_representations(idx in 0usize..3, a in 0usize..6, b in 0usize..6) {
        let h = load(["sweedler", "small_quantum_sl2", "s3"][idx]);
        let zoo = module_zoo(&h);
        let (x, y) = (&zoo[a % zoo.len()], &zoo[b % zoo.len()]);
        let t = tensor(x, y).unwrap();
        t.check_action().unwrap();
        dual_left(&t).check_action().unwrap();
        dual_right(&t).check_action().unwrap();
        prop_assert_eq!(t.dim(), x.dim() * y.dim());
    }
}
