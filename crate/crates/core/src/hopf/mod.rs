//! Finite-dimensional Hopf algebras given by structure constants.

mod algebra;
mod axioms;
mod builtins;
mod data;

pub use algebra::{HopfAlgebra, SolvedSummary};
pub use axioms::{check_hopf_axioms, AxiomCheck, AxiomReport};
pub use builtins::{
    corrupted_z2, cyclic_group_algebra, group_algebra, small_quantum_sl2, symmetric_group_s3,
    sweedler, trivial, AlgebraRegistry, AlgebraSource,
};
pub use data::{parse_constant, CoproductTerm, HopfData};

use thiserror::Error;

use crate::scalars::ScalarError;

#[derive(Debug, Error)]
pub enum HopfError {
    #[error("malformed structure constants: {0}")]
    Shape(String),
    #[error("cannot parse algebra: {0}")]
    Parse(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("lambda(Lambda) = 0 for every right integral")]
    Normalization,
    #[error("no pivotal grouplike element")]
    NoPivot,
    #[error("algebra is not unimodular")]
    NotUnimodular,
    #[error("Hopf axioms fail: {}", .0.failures().map(|c| c.axiom).collect::<Vec<_>>().join(", "))]
    Axioms(AxiomReport),
    #[error("unknown algebra {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("io: {0}")]
    Io(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{sparse_to_dense, Field};

    fn q(n: i64) -> crate::scalars::FieldElement {
        Field::Rational.from_int(n)
    }

    fn load(name: &str) -> std::sync::Arc<HopfAlgebra> {
        AlgebraRegistry::builtin().load(name, None).unwrap()
    }

    #[test]
    fn z2_integrals() {
        let h = load("z2");
        assert_eq!(sparse_to_dense(h.cointegral(), 2, h.field()), vec![q(1), q(1)]);
        assert_eq!(h.integral(), &[q(1), q(0)]);
        assert!(h.is_unimodular() && h.is_semisimple() && h.is_cosemisimple());
        assert_eq!(h.pivot(), Some(h.unit()));
        assert_eq!(h.distinguished(), h.unit());
    }

    #[test]
    fn trivial_integrals() {
        let h = load("trivial");
        assert_eq!(h.cointegral(), h.unit());
        assert_eq!(h.integral(), &[q(1)]);
    }

    #[test]
    fn sweedler_is_not_unimodular() {
        let h = load("sweedler");
        assert_eq!(sparse_to_dense(h.cointegral(), 4, h.field()), vec![q(0), q(0), q(1), q(1)]);
        assert_eq!(h.modulus()[1], q(-1));
        assert!(!h.is_unimodular());
        assert!(h.pivot().is_none());
        assert!(h.eval_integral(h.cointegral()).is_one());
        // λ vanishes off wx up to the solver's choice of normalization
        assert!(h.integral()[0].is_zero() && h.integral()[1].is_zero());
    }

    #[test]
    fn z2_over_f2_is_not_semisimple() {
        let h = load("z2_f2");
        assert!(!h.is_semisimple());
        assert!(h.is_unimodular());
    }

    #[test]
    fn corrupted_antipode_is_rejected() {
        let data = corrupted_z2().unwrap();
        let report = check_hopf_axioms(&data);
        let failed: Vec<_> = report.failures().map(|c| c.axiom).collect();
        assert!(failed.contains(&"antipode"));
        assert!(matches!(HopfAlgebra::new(data), Err(HopfError::Axioms(_))));
    }

    #[test]
    fn json_round_trip_preserves_fingerprint() {
        let data = sweedler(Field::Rational);
        let text = serde_json::to_string(&data.to_json()).unwrap();
        let back = HopfData::from_json(&text, None).unwrap();
        assert_eq!(back.fingerprint(), data.fingerprint());
    }

    #[test]
    fn shipped_files_match_constructors() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data/algebras/");
        let file = |n: &str| HopfData::from_json(&std::fs::read_to_string(format!("{dir}{n}")).unwrap(), None).unwrap();
        assert_eq!(file("z2.json").fingerprint(), cyclic_group_algebra(2, Field::Rational).fingerprint());
        assert_eq!(file("sweedler.json").fingerprint(), sweedler(Field::Rational).fingerprint());
    }

    #[test]
    fn every_builtin_solves() {
        let reg = AlgebraRegistry::builtin();
        for name in reg.names().filter(|n| *n != "corrupted_z2") {
            let h = reg.load(name, None).unwrap_or_else(|e| panic!("{name}: {e}"));
            let lam = h.cointegral();
            for i in 0..h.dim() {
                let e = h.basis_vec(i);
                let left = h.multiply(&e, lam);
                let expect: crate::scalars::SparseVec = if h.counit()[i].is_zero() {
                    Vec::new()
                } else {
                    lam.iter().map(|(k, x)| (*k, x * &h.counit()[i])).collect()
                };
                assert_eq!(left, expect, "{name}: h Lambda");
            }
            assert!(h.eval_integral(lam).is_one());
            if let Some(g) = h.pivot() {
                assert_eq!(&h.multiply(g, g), h.distinguished(), "{name}");
            }
        }
    }

    #[test]
    fn quantum_algebra_has_pivot_k() {
        let h = load("small_quantum_sl2");
        assert_eq!(h.dim(), 8);
        assert!(h.is_unimodular(), "modulus {:?}", h.modulus());
        assert!(!h.is_semisimple());
        let k = h.basis_vec(1);
        assert_eq!(h.pivot(), Some(&k));
    }
}
