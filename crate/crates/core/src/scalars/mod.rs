//! Exact scalars and sparse linear algebra over Q, F_p and Q(zeta_n).

mod field;
mod matrix;
mod rational;
mod solve;

pub use field::{cyclotomic_polynomial, Field, FieldElement};
pub use matrix::{
    collect_sparse, dense_to_sparse, sparse_add, sparse_dot, sparse_scale, sparse_to_dense, Matrix,
    SparseVec,
};
pub use rational::Rational;
pub use solve::{rank, solve_linear_system, RowReducer, SolveMode};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("mixed fields: {left} and {right}")]
    MixedField { left: String, right: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse field constant {0:?}")]
    Parse(String),
    #[error("invalid field modulus or order {0}")]
    InvalidModulus(u64),
    #[error("linear system has no solution")]
    NoSolution,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Field arithmetic entry point that reports mixing instead of panicking.
pub fn field_arithmetic(
    op: char,
    a: &FieldElement,
    b: &FieldElement,
) -> Result<FieldElement, ScalarError> {
    match op {
        '+' => a.try_add(b),
        '-' => a.try_sub(b),
        '*' => a.try_mul(b),
        '/' => a.try_div(b),
        _ => Err(ScalarError::Parse(op.to_string())),
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn small_q() -> impl Strategy<Value = FieldElement> {
        (-20i64..20, 1i64..9).prop_map(|(n, d)| {
            Field::Rational.from_rational(&Rational::new(n, d).unwrap()).unwrap()
        })
    }

    fn cyc(n: u32) -> impl Strategy<Value = FieldElement> {
        let deg = Field::Cyclotomic(n).degree();
        proptest::collection::vec((-5i64..5, 1i64..4), deg).prop_map(move |cs| {
            let rs: Vec<Rational> = cs.iter().map(|(a, b)| Rational::new(*a, *b).unwrap()).collect();
            Field::Cyclotomic(n).from_coefficients(&rs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in small_q(), b in small_q(), c in small_q()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn cyclotomic_field_axioms(a in cyc(12), b in cyc(12), c in cyc(12)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn prime_field_inverse(v in 1u64..101) {
            let f = Field::Prime(101);
            let x = f.from_int(v as i64);
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }

        #[test]
        fn nullspace_vectors_are_annihilated(entries in proptest::collection::vec(-3i64..4, 12)) {
            let f = Field::Rational;
            let rows: Vec<Vec<FieldElement>> =
                entries.chunks(4).map(|r| r.iter().map(|x| f.from_int(*x)).collect()).collect();
            let a = Matrix::from_rows(f, &rows).unwrap();
            let ns = solve_linear_system(&a, SolveMode::Nullspace).unwrap();
            prop_assert_eq!(ns.len() + rank(&a), 4);
            for v in ns {
                prop_assert!(a.apply_dense(&v).iter().all(|x| x.is_zero()));
            }
        }
    }
}
