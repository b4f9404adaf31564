use serde::Serialize;

use crate::scalars::{collect_sparse, FieldElement, SparseVec};

use super::data::{CoproductTerm, HopfData};

/// Outcome of one axiom over all basis tuples.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub passed: bool,
    /// Basis indices of the first failing tuple.
    pub witness: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

type Tensor2 = Vec<CoproductTerm>;

fn canon2(t: impl IntoIterator<Item = CoproductTerm>, d: usize) -> SparseVec {
    collect_sparse(t.into_iter().map(|(j, k, c)| (j * d + k, c)))
}

fn first_failure(d: usize, arity: usize, ok: impl Fn(&[usize]) -> bool) -> Option<Vec<usize>> {
    let total = d.pow(arity as u32);
    let mut idx = vec![0usize; arity];
    for mut n in 0..total {
        for slot in idx.iter_mut().rev() {
            *slot = n % d;
            n /= d;
        }
        if !ok(&idx) {
            return Some(idx.clone());
        }
    }
    None
}

fn check(axiom: &'static str, witness: Option<Vec<usize>>) -> AxiomCheck {
    AxiomCheck { axiom, passed: witness.is_none(), witness }
}

/// Checks every Hopf axiom on all basis tuples. Assumes shapes were validated
/// at parse time.
pub fn check_hopf_axioms(h: &HopfData) -> AxiomReport {
    let d = h.dim;
    let e = |i: usize| h.basis_vec(i);
    let mut checks = Vec::new();

    checks.push(check(
        "associativity",
        first_failure(d, 3, |t| {
            let ab = h.multiply(&e(t[0]), &e(t[1]));
            let bc = h.multiply(&e(t[1]), &e(t[2]));
            h.multiply(&ab, &e(t[2])) == h.multiply(&e(t[0]), &bc)
        }),
    ));
    checks.push(check(
        "unit",
        first_failure(d, 1, |t| {
            h.multiply(&h.unit, &e(t[0])) == e(t[0]) && h.multiply(&e(t[0]), &h.unit) == e(t[0])
        }),
    ));

    let delta_left = |t: &Tensor2| -> SparseVec {
        // (Δ ⊗ id) applied to a 2-tensor, flattened to 3 indices
        collect_sparse(t.iter().flat_map(|(j, k, c)| {
            h.comul[*j].iter().map(move |(a, b, x)| ((a * d + b) * d + k, c * x))
        }))
    };
    let delta_right = |t: &Tensor2| -> SparseVec {
        collect_sparse(t.iter().flat_map(|(j, k, c)| {
            h.comul[*k].iter().map(move |(a, b, x)| ((j * d + a) * d + b, c * x))
        }))
    };
    checks.push(check(
        "coassociativity",
        first_failure(d, 1, |t| delta_left(&h.comul[t[0]]) == delta_right(&h.comul[t[0]])),
    ));
    checks.push(check(
        "counit",
        first_failure(d, 1, |t| {
            let left = collect_sparse(h.comul[t[0]].iter().map(|(j, k, c)| (*k, c * &h.counit[*j])));
            let right = collect_sparse(h.comul[t[0]].iter().map(|(j, k, c)| (*j, c * &h.counit[*k])));
            left == e(t[0]) && right == e(t[0])
        }),
    ));

    // Δ(ab) = Δ(a)Δ(b) in H⊗H
    let mul2 = |x: &Tensor2, y: &Tensor2| -> SparseVec {
        let mut terms = Vec::new();
        for (a1, a2, c) in x {
            for (b1, b2, c2) in y {
                let cc = c * c2;
                for (p, u) in &h.mul[*a1][*b1] {
                    for (q, v) in &h.mul[*a2][*b2] {
                        terms.push((p * d + q, &(&cc * u) * v));
                    }
                }
            }
        }
        collect_sparse(terms)
    };
    checks.push(check(
        "bialgebra_comultiplicative",
        first_failure(d, 2, |t| {
            let prod = h.multiply(&e(t[0]), &e(t[1]));
            canon2(h.coproduct(&prod), d) == mul2(&h.comul[t[0]], &h.comul[t[1]])
        }),
    ));
    checks.push(check(
        "bialgebra_counit_multiplicative",
        first_failure(d, 2, |t| {
            let prod = h.multiply(&e(t[0]), &e(t[1]));
            h.counit_of(&prod) == &h.counit[t[0]] * &h.counit[t[1]]
        }),
    ));
    checks.push(check(
        "bialgebra_unit",
        (canon2(h.coproduct(&h.unit), d)
            != collect_sparse(h.unit.iter().flat_map(|(i, x)| {
                h.unit.iter().map(move |(j, y)| (i * d + j, x * y))
            }))
            || !h.counit_of(&h.unit).is_one())
        .then(Vec::new),
    ));

    let s = |i: usize| h.antipode.column(i).clone();
    checks.push(check(
        "antipode",
        first_failure(d, 1, |t| {
            let expected: SparseVec = if h.counit[t[0]].is_zero() {
                Vec::new()
            } else {
                h.unit.iter().map(|(i, x)| (*i, x * &h.counit[t[0]])).collect()
            };
            let mut left: Vec<(usize, FieldElement)> = Vec::new();
            let mut right: Vec<(usize, FieldElement)> = Vec::new();
            for (j, k, c) in &h.comul[t[0]] {
                for (p, x) in h.multiply(&s(*j), &e(*k)) {
                    left.push((p, &x * c));
                }
                for (p, x) in h.multiply(&e(*j), &s(*k)) {
                    right.push((p, &x * c));
                }
            }
            collect_sparse(left) == expected && collect_sparse(right) == expected
        }),
    ));
    checks.push(check(
        "antipode_invertible",
        h.antipode.inverse().is_none().then(Vec::new),
    ));
    AxiomReport { checks }
}
