use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::diagrams::CouponDef;
use crate::hopf::AlgebraRegistry;
use crate::rep::{direct_sum, hom_space, trivial};
use crate::scalars::Field;

fn load(name: &str) -> Arc<HopfAlgebra> {
    AlgebraRegistry::builtin().load(name, None).unwrap()
}

fn ctx(h: &Arc<HopfAlgebra>) -> TraceContext {
    TraceContext::new(h).unwrap()
}

fn assert_passes(r: &ChromaticReport) {
    for e in &r.entries {
        assert!(e.passed, "{} on {}: {:?}", r.kind, e.test, e.witness);
    }
}

fn right_mult(h: &HopfAlgebra, a: &SparseVec) -> Matrix {
    Matrix::from_columns(h.field(), h.dim(), (0..h.dim()).map(|e| h.multiply(&h.basis_vec(e), a)).collect())
}

#[test]
fn trivial_algebra_gives_identities() {
    let h = load("trivial");
    let one = Matrix::identity(h.field(), 1);
    assert_eq!(chromatic_two_sided(&h).unwrap().matrix, one);
    assert_eq!(chromatic_left(&h).unwrap().matrix, one);
    assert_eq!(chromatic_right(&h).unwrap().matrix, one);
    assert_eq!(lambda_sided(&regular(&h), Side::Left).unwrap().matrix, one);
    assert_eq!(lambda_sided(&regular(&h), Side::Right).unwrap().matrix, one);
}

#[test]
fn z2_matches_group_formula() {
    // c(x⊗v) = λ(v⁻¹x) v⊗v on the group basis {e, u}
    let h = load("z2");
    let f = h.field();
    let lam = h.integral();
    let want = Matrix::from_fn(f, 4, 4, |r, c| {
        let (x, v) = (c / 2, c % 2);
        if r == v * 2 + v {
            lam[x ^ v].clone()
        } else {
            f.zero()
        }
    });
    let c = chromatic_two_sided(&h).unwrap();
    assert_eq!(c.matrix, want);
    // c(Λ⊗1) = 1⊗1
    let big_lambda = h.cointegral();
    let input = collect_sparse(big_lambda.iter().map(|(i, x)| (i * 2, x.clone())));
    assert_eq!(c.matrix.apply(&input), vec![(0, f.one())]);
}

#[test]
fn unimodularity_and_pivot_are_required() {
    assert!(matches!(chromatic_two_sided(&load("sweedler")), Err(ChromaticError::NotUnimodular(_))));
}

#[test]
fn two_sided_passes_on_standard_tests() {
    for name in ["z2", "z3", "s3", "z2_f2", "z3_f3"] {
        let h = load(name);
        let c = chromatic_two_sided(&h).unwrap();
        let r = verify_chromatic(&c, &standard_tests(&c.generator).unwrap(), Some(&ctx(&h)));
        assert_eq!(r.entries.len(), 4);
        assert_passes(&r);
    }
}

#[test]
fn quantum_two_sided_on_small_tests() {
    let h = load("small_quantum_sl2");
    let c = chromatic_two_sided(&h).unwrap();
    let tests = vec![trivial(&h), regular(&h), dual_left(&regular(&h))];
    assert_passes(&verify_chromatic(&c, &tests, Some(&ctx(&h))));
}

#[test]
fn based_maps() {
    let h = load("z2");
    let c = chromatic_two_sided(&h).unwrap();
    let reg = regular(&h);
    let id = Matrix::identity(h.field(), 2);
    let same = chromatic_based(&c, &reg, &[(id.clone(), id.clone())]).unwrap();
    assert_eq!(same.matrix, c.matrix);

    let hh = tensor(&reg, &reg).unwrap();
    let fam = presentation_family(&hh).unwrap();
    let cp = chromatic_based(&c, &hh, &fam).unwrap();
    assert_eq!(cp.matrix.rows(), 8);
    let tests = vec![trivial(&h), reg.clone(), hh.clone()];
    assert_passes(&verify_chromatic(&cp, &tests, Some(&ctx(&h))));

    let mut bad = fam.clone();
    bad.pop();
    assert!(matches!(chromatic_based(&c, &hh, &bad), Err(ChromaticError::Retract(_))));
    let doubled = vec![(id.clone(), id.clone()), (id.clone(), id)];
    assert!(matches!(chromatic_based(&c, &reg, &doubled), Err(ChromaticError::Retract(_))));
}

#[test]
fn corrupted_map_fails_with_witness() {
    let h = load("z3");
    let mut c = chromatic_two_sided(&h).unwrap();
    let mut cols = c.matrix.columns().to_vec();
    let f = h.field();
    cols[4] = crate::scalars::sparse_add(&cols[4], &vec![(0, f.one())]);
    c.matrix = Matrix::from_columns(f, 9, cols);
    let r = verify_chromatic(&c, &[regular(&h)], Some(&ctx(&h)));
    assert!(!r.passed());
    assert!(r.entries[0].witness.as_deref().unwrap().starts_with("column"));

    let s = load("sweedler");
    let mut l = chromatic_left(&s).unwrap();
    let mut cols = l.matrix.columns().to_vec();
    cols[0] = crate::scalars::sparse_add(&cols[0], &vec![(3, s.field().one())]);
    l.matrix = Matrix::from_columns(s.field(), l.matrix.rows(), cols);
    let r = verify_chromatic(&l, &[regular(&s)], None);
    assert!(!r.passed());
    assert!(r.entries[0].witness.is_some());
}

#[test]
fn sided_maps_on_sweedler() {
    let h = load("sweedler");
    assert!(h.modulus().iter().any(|a| *a == -h.field().one()));
    let reg = regular(&h);
    let tests = vec![trivial(&h), reg.clone(), tensor(&reg, &reg).unwrap()];
    for c in [chromatic_left(&h).unwrap(), chromatic_right(&h).unwrap()] {
        assert_passes(&verify_chromatic(&c, &tests, None));
    }
}

#[test]
fn sided_maps_are_linear() {
    for name in ["sweedler", "s3", "small_quantum_sl2"] {
        let h = load(name);
        for c in [chromatic_left(&h).unwrap(), chromatic_right(&h).unwrap()] {
            CouponDef::checked("c", c.input.clone(), c.output.clone(), c.matrix.clone(), &h)
                .unwrap_or_else(|e| panic!("{name} {}: {e}", c.kind.as_str()));
        }
    }
}

#[test]
fn sided_maps_pass_on_unimodular_algebras() {
    for name in ["z2", "s3", "small_quantum_sl2"] {
        let h = load(name);
        let g = regular(&h);
        let tests = vec![trivial(&h), g.clone(), dual_left(&g)];
        for c in [chromatic_left(&h).unwrap(), chromatic_right(&h).unwrap()] {
            assert_passes(&verify_chromatic(&c, &tests, None));
        }
    }
}

#[test]
fn left_agrees_with_two_sided_on_z2() {
    let h = load("z2");
    assert_eq!(chromatic_left(&h).unwrap().matrix, chromatic_two_sided(&h).unwrap().matrix);
}

#[test]
fn flat_and_bridged_composites_agree() {
    let h = load("s3");
    let t = ctx(&h);
    let g = regular(&h);
    let x = dual_left(&g);
    for c in [chromatic_two_sided(&h).unwrap(), chromatic_left(&h).unwrap(), chromatic_right(&h).unwrap()] {
        let comp = match c.kind {
            Kind::TwoSided => verify::two_sided_composite(&c, &x, &t),
            Kind::Left => verify::left_composite(&c, &x),
            Kind::Right => verify::right_composite(&c, &x),
        }
        .unwrap();
        assert_eq!(comp.bridged.evaluate().unwrap().to_matrix(), comp.flat.evaluate().unwrap(), "{}", c.kind.as_str());
    }
}

#[test]
fn transported_generator() {
    let h = load("z3");
    let f = h.field();
    let c = chromatic_two_sided(&h).unwrap();
    let g = regular(&h);
    let id = Matrix::identity(f, 3);
    let same = transport_generator(&c, &g, &[(id.clone(), id.clone())]).unwrap();
    assert_eq!(same.matrix, c.matrix);

    let gg = direct_sum(&g, &g).unwrap();
    let incl = Matrix::identity(f, 3).direct_sum(&Matrix::zeros(f, 3, 0));
    let proj = incl.transpose();
    let t = transport_generator(&c, &gg, &[(incl.clone(), proj.clone())]).unwrap();
    assert_eq!(t.matrix.rows(), 18);
    let tests = vec![trivial(&h), g.clone(), tensor(&g, &g).unwrap(), dual_left(&g)];
    assert_passes(&verify_chromatic(&t, &tests, Some(&ctx(&h))));

    let half = incl.scale(&f.from_int(2));
    assert!(matches!(transport_generator(&c, &gg, &[(half, proj)]), Err(ChromaticError::Retract(_))));
}

#[test]
fn lambda_sided_examples() {
    let h = load("z2");
    let l = lambda_sided(&regular(&h), Side::Left).unwrap().matrix;
    // image spanned by e + u
    for c in l.columns() {
        if !c.is_empty() {
            assert_eq!(c.len(), 2);
            assert_eq!(c[0].1, c[1].1);
        }
    }
    assert!(!l.is_zero());
    let h2 = load("z2_f2");
    assert!(lambda_sided(&trivial(&h2), Side::Left).unwrap().matrix.is_zero());
    assert!(lambda_sided(&trivial(&h2), Side::Right).unwrap().matrix.is_zero());
}

#[test]
fn lambdas_coincide_on_unimodular_algebras() {
    for name in ["z2", "z3", "s3", "z2_f2", "small_quantum_sl2"] {
        let h = load(name);
        let t = ctx(&h);
        let reg = regular(&h);
        for p in [reg.clone(), tensor(&reg, &reg).unwrap()] {
            let lt = t.lambda_t(&p).unwrap().matrix;
            assert_eq!(lambda_sided(&p, Side::Left).unwrap().matrix, lt, "{name} left {}", p.key());
            assert_eq!(lambda_sided(&p, Side::Right).unwrap().matrix, lt, "{name} right {}", p.key());
        }
    }
}

#[test]
fn composites_do_not_depend_on_the_family() {
    let h = load("s3");
    let f = h.field();
    let t = ctx(&h);
    let c = chromatic_two_sided(&h).unwrap();
    let reg = regular(&h);
    let hh = tensor(&reg, &reg).unwrap();
    let fam = presentation_family(&hh).unwrap();
    // twist every summand by right multiplication with 1 + 2t, t a transposition
    let unit = h.unit().clone();
    let twist_elem = crate::scalars::sparse_add(&unit, &crate::scalars::sparse_scale(&h.basis_vec(1), &f.from_int(2)));
    let phi = right_mult(&h, &twist_elem);
    let phi_inv = phi.inverse().expect("invertible twist");
    let twisted: Vec<_> =
        fam.iter().map(|(fi, gi)| (phi.mul(fi).unwrap(), gi.mul(&phi_inv).unwrap())).collect();
    let a = chromatic_based(&c, &hh, &fam).unwrap();
    let b = chromatic_based(&c, &hh, &twisted).unwrap();
    for x in [trivial(&h), reg.clone()] {
        let ma = composite_matrix(&a, &x, Some(&t)).unwrap();
        let mb = composite_matrix(&b, &x, Some(&t)).unwrap();
        assert_eq!(ma, mb);
        assert_eq!(ma, Matrix::identity(f, x.dim() * hh.dim()));
    }
}

#[test]
fn registry_lists_kinds() {
    let r = KindRegistry::default();
    assert_eq!(r.names().collect::<Vec<_>>(), ["two_sided", "left", "right"]);
    assert!(r.get("sideways").is_err());
    let h = load("z2");
    let c = r.get("left").unwrap().construct(&h).unwrap();
    assert_eq!(c.kind, Kind::Left);
    assert!(!r.get("left").unwrap().needs_trace());
}

#[test]
fn prime_field_override() {
    let h = AlgebraRegistry::builtin().load("s3", Some(Field::prime(5).unwrap())).unwrap();
    let c = chromatic_two_sided(&h).unwrap();
    assert_passes(&verify_chromatic(&c, &standard_tests(&c.generator).unwrap(), Some(&ctx(&h))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lambda_left_is_natural(weights in proptest::collection::vec(-3i64..4, 1..6), which in 0usize..3) {
        let h = load("sweedler");
        let f = h.field();
        let reg = regular(&h);
        let pairs = [(reg.clone(), reg.clone()), (reg.clone(), tensor(&reg, &reg).unwrap()), (tensor(&reg, &reg).unwrap(), reg.clone())];
        let (m, n) = &pairs[which];
        let mut phi = Matrix::zeros(f, n.dim(), m.dim());
        for (b, w) in hom_space(m, n).unwrap().iter().zip(weights.iter().cycle()) {
            phi = phi.add(&b.matrix.scale(&f.from_int(*w))).unwrap();
        }
        for side in [Side::Left, Side::Right] {
            let lm = lambda_sided(m, side).unwrap().matrix;
            let ln = lambda_sided(n, side).unwrap().matrix;
            // α is one-dimensional, so f ⊗ id_α has the matrix of f
            prop_assert_eq!(ln.mul(&phi).unwrap(), phi.mul(&lm).unwrap());
        }
    }
}
