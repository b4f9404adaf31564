use std::sync::Arc;

use serde::Serialize;

use crate::scalars::{
    collect_sparse, sparse_to_dense, Field, FieldElement, Matrix, RowReducer, SparseVec,
};

use super::axioms::{check_hopf_axioms, AxiomReport};
use super::data::{CoproductTerm, HopfData};
use super::HopfError;

/// Upper bound on candidates tried by the grouplike search.
const GROUPLIKE_SEARCH_CAP: usize = 1 << 20;

/// A Hopf algebra with its integral data solved.
pub struct HopfAlgebra {
    data: HopfData,
    antipode_inv: Matrix,
    left_mult: Vec<Matrix>,
    generators: Vec<usize>,
    cointegral: SparseVec,
    integral: Vec<FieldElement>,
    modulus: Vec<FieldElement>,
    distinguished: SparseVec,
    grouplikes: Vec<SparseVec>,
    pivot: Option<(SparseVec, SparseVec)>,
    fingerprint: String,
}

/// Summary of the solved data, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct SolvedSummary {
    pub name: String,
    pub field: String,
    pub dimension: usize,
    pub cointegral: Vec<serde_json::Value>,
    pub integral: Vec<serde_json::Value>,
    pub modulus: Vec<serde_json::Value>,
    pub distinguished_grouplike: Vec<serde_json::Value>,
    pub pivot: Option<Vec<serde_json::Value>>,
    pub grouplike_count: usize,
    pub unimodular: bool,
    pub unibalanced: bool,
    pub semisimple: bool,
    pub cosemisimple: bool,
    pub normalization: String,
}

impl HopfAlgebra {
    /// Validates the axioms and solves Λ, λ, α, a and the pivot.
    pub fn new(data: HopfData) -> Result<Arc<HopfAlgebra>, HopfError> {
        let report = check_hopf_axioms(&data);
        if !report.all_passed() {
            return Err(HopfError::Axioms(report));
        }
        Self::solve(data).map(Arc::new)
    }

    fn solve(data: HopfData) -> Result<HopfAlgebra, HopfError> {
        let d = data.dim;
        let field = data.field;
        let antipode_inv = data
            .antipode
            .inverse()
            .ok_or_else(|| HopfError::Solver("antipode is not invertible".into()))?;
        let left_mult: Vec<Matrix> = (0..d)
            .map(|i| Matrix::from_canonical_columns(field, d, data.mul[i].clone()))
            .collect();
        let generators = generating_set(&data);
        let cointegral = left_cointegral(&data, &left_mult)?;
        let integral = right_integral(&data, &cointegral)?;
        let fingerprint = data.fingerprint();
        let mut alg = HopfAlgebra {
            data,
            antipode_inv,
            left_mult,
            generators,
            cointegral,
            integral,
            modulus: Vec::new(),
            distinguished: Vec::new(),
            grouplikes: Vec::new(),
            pivot: None,
            fingerprint,
        };
        alg.modulus = alg.solve_modulus()?;
        alg.distinguished = alg.solve_distinguished()?;
        alg.grouplikes = alg.enumerate_grouplikes();
        alg.pivot = alg.choose_pivot()?;
        Ok(alg)
    }

    pub fn data(&self) -> &HopfData {
        &self.data
    }

    pub fn name(&self) -> &str {
        &self.data.name
    }

    pub fn field(&self) -> Field {
        self.data.field
    }

    pub fn dim(&self) -> usize {
        self.data.dim
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn unit(&self) -> &SparseVec {
        &self.data.unit
    }

    pub fn counit(&self) -> &[FieldElement] {
        &self.data.counit
    }

    pub fn antipode(&self) -> &Matrix {
        &self.data.antipode
    }

    pub fn antipode_inv(&self) -> &Matrix {
        &self.antipode_inv
    }

    /// Left multiplication by the basis element `e_i`.
    pub fn left_mult(&self, i: usize) -> &Matrix {
        &self.left_mult[i]
    }

    /// Basis indices whose products span the algebra.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn cointegral(&self) -> &SparseVec {
        &self.cointegral
    }

    /// Right integral λ as a dense covector, normalized by λ(Λ) = 1.
    pub fn integral(&self) -> &[FieldElement] {
        &self.integral
    }

    /// The distinguished grouplike form α_H as a dense covector.
    pub fn modulus(&self) -> &[FieldElement] {
        &self.modulus
    }

    /// The distinguished grouplike element a.
    pub fn distinguished(&self) -> &SparseVec {
        &self.distinguished
    }

    pub fn grouplikes(&self) -> &[SparseVec] {
        &self.grouplikes
    }

    pub fn pivot(&self) -> Option<&SparseVec> {
        self.pivot.as_ref().map(|p| &p.0)
    }

    pub fn pivot_inv(&self) -> Option<&SparseVec> {
        self.pivot.as_ref().map(|p| &p.1)
    }

    pub fn require_pivot(&self) -> Result<(&SparseVec, &SparseVec), HopfError> {
        self.pivot.as_ref().map(|(g, gi)| (g, gi)).ok_or(HopfError::NoPivot)
    }

    pub fn is_unimodular(&self) -> bool {
        self.modulus == self.data.counit
    }

    pub fn is_unibalanced(&self) -> bool {
        self.pivot.is_some()
    }

    /// Unimodular with a pivot: the m-trace and two-sided chromatic map exist.
    pub fn has_trace(&self) -> bool {
        self.is_unimodular() && self.is_unibalanced()
    }

    pub fn is_semisimple(&self) -> bool {
        !self.data.counit_of(&self.cointegral).is_zero()
    }

    pub fn is_cosemisimple(&self) -> bool {
        !self.eval_integral(&self.data.unit).is_zero()
    }

    pub fn multiply(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        self.data.multiply(a, b)
    }

    pub fn coproduct(&self, a: &SparseVec) -> Vec<CoproductTerm> {
        self.data.coproduct(a)
    }

    /// Δ(e_i) as stored.
    pub fn coproduct_basis(&self, i: usize) -> &[CoproductTerm] {
        &self.data.comul[i]
    }

    pub fn apply_antipode(&self, a: &SparseVec) -> SparseVec {
        self.data.antipode.apply(a)
    }

    pub fn apply_antipode_inv(&self, a: &SparseVec) -> SparseVec {
        self.antipode_inv.apply(a)
    }

    pub fn eval_integral(&self, a: &SparseVec) -> FieldElement {
        eval_covector(&self.integral, a, self.field())
    }

    pub fn eval_counit(&self, a: &SparseVec) -> FieldElement {
        self.data.counit_of(a)
    }

    pub fn eval_modulus(&self, a: &SparseVec) -> FieldElement {
        eval_covector(&self.modulus, a, self.field())
    }

    pub fn basis_vec(&self, i: usize) -> SparseVec {
        self.data.basis_vec(i)
    }

    /// Iterated coproduct Δ^(n-1)(e_i) as a list of (indices, coefficient),
    /// left factor first.
    pub fn iterated_coproduct(&self, i: usize, factors: usize) -> Vec<(Vec<usize>, FieldElement)> {
        let mut terms: Vec<(Vec<usize>, FieldElement)> = vec![(vec![i], self.field().one())];
        for _ in 1..factors {
            let mut acc: std::collections::BTreeMap<Vec<usize>, FieldElement> = Default::default();
            for (idx, c) in &terms {
                let last = *idx.last().unwrap();
                for (a, b, x) in &self.data.comul[last] {
                    let mut key = idx[..idx.len() - 1].to_vec();
                    key.push(*a);
                    key.push(*b);
                    let v = c * x;
                    acc.entry(key).and_modify(|y| *y += &v).or_insert(v);
                }
            }
            terms = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        terms
    }

    pub fn summary(&self) -> SolvedSummary {
        let dense = |v: &SparseVec| -> Vec<serde_json::Value> {
            sparse_to_dense(v, self.dim(), self.field()).iter().map(|x| x.to_json()).collect()
        };
        SolvedSummary {
            name: self.name().to_string(),
            field: self.field().to_string(),
            dimension: self.dim(),
            cointegral: dense(&self.cointegral),
            integral: self.integral.iter().map(|x| x.to_json()).collect(),
            modulus: self.modulus.iter().map(|x| x.to_json()).collect(),
            distinguished_grouplike: dense(&self.distinguished),
            pivot: self.pivot().map(dense),
            grouplike_count: self.grouplikes.len(),
            unimodular: self.is_unimodular(),
            unibalanced: self.is_unibalanced(),
            semisimple: self.is_semisimple(),
            cosemisimple: self.is_cosemisimple(),
            normalization: "lambda(Lambda) = 1".into(),
        }
    }

    pub fn axiom_report(&self) -> AxiomReport {
        check_hopf_axioms(&self.data)
    }

    fn solve_modulus(&self) -> Result<Vec<FieldElement>, HopfError> {
        // Λ S(h) = α(h) Λ
        let (p, lp) = self.cointegral[0].clone();
        let lp_inv = lp.inv()?;
        let mut out = Vec::with_capacity(self.dim());
        for h in 0..self.dim() {
            let prod = self.multiply(&self.cointegral, self.data.antipode.column(h));
            let coeff = prod
                .iter()
                .find(|(i, _)| *i == p)
                .map(|(_, x)| x * &lp_inv)
                .unwrap_or_else(|| self.field().zero());
            let scaled: SparseVec = collect_sparse(self.cointegral.iter().map(|(i, x)| (*i, x * &coeff)));
            if prod != scaled {
                return Err(HopfError::Solver(format!(
                    "Lambda S(e_{h}) is not proportional to Lambda"
                )));
            }
            out.push(coeff);
        }
        Ok(out)
    }

    fn solve_distinguished(&self) -> Result<SparseVec, HopfError> {
        // (id ⊗ λ)Δ(h) = λ(h) a, read off at h = Λ where λ(Λ) = 1
        let contract = |terms: &[CoproductTerm]| -> SparseVec {
            collect_sparse(terms.iter().map(|(j, k, c)| (*j, c * &self.integral[*k])))
        };
        let a = contract(&self.coproduct(&self.cointegral));
        for h in 0..self.dim() {
            let lhs = contract(&self.data.comul[h]);
            let rhs = collect_sparse(a.iter().map(|(i, x)| (*i, x * &self.integral[h])));
            if lhs != rhs {
                return Err(HopfError::Solver(format!(
                    "(id ⊗ lambda)Delta(e_{h}) is not a multiple of the distinguished grouplike"
                )));
            }
        }
        Ok(a)
    }

    fn is_grouplike(&self, x: &SparseVec) -> bool {
        if !self.eval_counit(x).is_one() {
            return false;
        }
        let d = self.dim();
        let lhs = collect_sparse(self.coproduct(x).into_iter().map(|(j, k, c)| (j * d + k, c)));
        let rhs = collect_sparse(
            x.iter().flat_map(|(i, a)| x.iter().map(move |(j, b)| (i * d + j, a * b))),
        );
        lhs == rhs
    }

    /// Grouplikes found by bounded search: candidates are cocommutative
    /// elements whose free coordinates (in the nullspace parametrization) lie
    /// in {0, 1, -1}. The unit comes first, then enumeration order.
    fn enumerate_grouplikes(&self) -> Vec<SparseVec> {
        let d = self.dim();
        let field = self.field();
        // cocommutativity: Δ(x) - τΔ(x) = 0, one equation per (j, k) with j < k
        let mut red = RowReducer::new(field, d);
        for j in 0..d {
            for k in (j + 1)..d {
                let row = collect_sparse((0..d).flat_map(|i| {
                    self.data.comul[i].iter().filter_map(move |(a, b, c)| {
                        if (*a, *b) == (j, k) {
                            Some((i, c.clone()))
                        } else if (*a, *b) == (k, j) {
                            Some((i, -c))
                        } else {
                            None
                        }
                    })
                }));
                if !row.is_empty() {
                    red.push(&row);
                }
            }
        }
        let basis = red.nullspace();
        let m = basis.len();
        let values = [field.zero(), field.one(), field.from_int(-1)];
        let mut found = vec![self.data.unit.clone()];
        let total = 3usize.checked_pow(m as u32).unwrap_or(usize::MAX).min(GROUPLIKE_SEARCH_CAP);
        let mut digits = vec![0usize; m];
        for n in 0..total {
            let mut r = n;
            for slot in digits.iter_mut().rev() {
                *slot = r % 3;
                r /= 3;
            }
            let x = collect_sparse(
                digits
                    .iter()
                    .zip(&basis)
                    .filter(|(dg, _)| **dg != 0)
                    .flat_map(|(dg, v)| v.iter().map(|(i, c)| (*i, c * &values[*dg]))),
            );
            if !x.is_empty() && x != self.data.unit && self.is_grouplike(&x) {
                found.push(x);
            }
        }
        found
    }

    fn implements_square_of_antipode(&self, g: &SparseVec, g_inv: &SparseVec) -> bool {
        (0..self.dim()).all(|i| {
            let e = self.basis_vec(i);
            let s2 = self.apply_antipode(&self.apply_antipode(&e));
            let conj = self.multiply(&self.multiply(g, &e), g_inv);
            s2 == conj
        })
    }

    fn choose_pivot(&self) -> Result<Option<(SparseVec, SparseVec)>, HopfError> {
        let valid = |g: &SparseVec| -> Option<(SparseVec, SparseVec)> {
            let g_inv = self.apply_antipode(g);
            (self.multiply(g, g) == self.distinguished && self.implements_square_of_antipode(g, &g_inv))
                .then_some((g.clone(), g_inv))
        };
        if let Some(p) = &self.data.pivot {
            if !self.is_grouplike(p) {
                return Err(HopfError::Solver("pinned pivot is not grouplike".into()));
            }
            return valid(p)
                .map(Some)
                .ok_or_else(|| HopfError::Solver("pinned pivot does not square to a or implement S^2".into()));
        }
        Ok(self.grouplikes.iter().find_map(valid))
    }
}

pub(crate) fn eval_covector(c: &[FieldElement], a: &SparseVec, field: Field) -> FieldElement {
    let mut acc = field.zero();
    for (i, x) in a {
        acc += &(x * &c[*i]);
    }
    acc
}

fn generating_set(data: &HopfData) -> Vec<usize> {
    let d = data.dim;
    let mut gens: Vec<usize> = Vec::new();
    let mut span = subalgebra_span(data, &gens);
    for i in 0..d {
        if span.rank() == d {
            break;
        }
        if !span.contains(&data.basis_vec(i)) {
            gens.push(i);
            span = subalgebra_span(data, &gens);
        }
    }
    gens
}

fn subalgebra_span(data: &HopfData, gens: &[usize]) -> RowReducer {
    let mut red = RowReducer::new(data.field, data.dim);
    let mut frontier = vec![data.unit.clone()];
    red.push(&data.unit);
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = data.multiply(&x, &data.basis_vec(*g));
            if !y.is_empty() && red.push(&y) {
                frontier.push(y);
            }
        }
    }
    red
}

fn left_cointegral(data: &HopfData, left_mult: &[Matrix]) -> Result<SparseVec, HopfError> {
    let d = data.dim;
    let mut red = RowReducer::new(data.field, d);
    for (h, lm) in left_mult.iter().enumerate() {
        let rows = lm.sub(&Matrix::identity(data.field, d).scale(&data.counit[h]))?.row_vectors();
        for r in rows {
            red.push(&r);
        }
    }
    let ns = red.nullspace();
    if ns.len() != 1 {
        return Err(HopfError::Solver(format!(
            "left cointegral space has dimension {}",
            ns.len()
        )));
    }
    Ok(ns.into_iter().next().unwrap())
}

fn right_integral(data: &HopfData, cointegral: &SparseVec) -> Result<Vec<FieldElement>, HopfError> {
    let d = data.dim;
    let mut red = RowReducer::new(data.field, d);
    for h in 0..d {
        for k in 0..d {
            // Σ_j Δ(e_h)_{jk} λ_j - λ_h 1_k = 0
            let mut row: Vec<(usize, FieldElement)> = data.comul[h]
                .iter()
                .filter(|(_, kk, _)| *kk == k)
                .map(|(j, _, c)| (*j, c.clone()))
                .collect();
            if let Some((_, u)) = data.unit.iter().find(|(i, _)| *i == k) {
                row.push((h, -u));
            }
            let row = collect_sparse(row);
            if !row.is_empty() {
                red.push(&row);
            }
        }
    }
    let ns = red.nullspace();
    if ns.len() != 1 {
        return Err(HopfError::Solver(format!("right integral space has dimension {}", ns.len())));
    }
    let lam = sparse_to_dense(&ns[0], d, data.field);
    let norm = eval_covector(&lam, cointegral, data.field);
    if norm.is_zero() {
        return Err(HopfError::Normalization);
    }
    let inv = norm.inv()?;
    Ok(lam.iter().map(|x| x * &inv).collect())
}
