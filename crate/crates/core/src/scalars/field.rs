use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::rational::Rational;
use super::ScalarError;

/// The base field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Rational,
    Prime(u64),
    Cyclotomic(u32),
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
            Field::Cyclotomic(n) => write!(f, "Q(zeta_{n})"),
        }
    }
}

/// Accepts the display forms (`Q`, `F_5`, `Q(zeta_8)`) and the serialized
/// ones (`rational`, `prime:5`, `cyclotomic:8`).
impl std::str::FromStr for Field {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let num = |x: &str| x.trim().parse::<u64>().map_err(|_| ScalarError::Parse(s.to_string()));
        if t.eq_ignore_ascii_case("q") || t.eq_ignore_ascii_case("rational") {
            return Ok(Field::Rational);
        }
        if let Some(p) = t.strip_prefix("prime:").or_else(|| t.strip_prefix("F_")).or_else(|| t.strip_prefix('F')) {
            return Field::prime(num(p)?);
        }
        if let Some(n) = t.strip_prefix("cyclotomic:").or_else(|| t.strip_prefix("Q(zeta_").and_then(|r| r.strip_suffix(')'))) {
            return Field::cyclotomic(u32::try_from(num(n)?).map_err(|_| ScalarError::Parse(s.to_string()))?);
        }
        Err(ScalarError::Parse(s.to_string()))
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Integer coefficients of the n-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d with d a proper divisor of n
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let div = cyclotomic_polynomial(d);
            num = poly_exact_div(&num, &div);
        }
    }
    let out = Arc::new(num);
    cyclotomic_cache().lock().unwrap().insert(n, out.clone());
    out
}

fn poly_exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut q = vec![0i64; qn + 1];
    for k in (0..=qn).rev() {
        let c = rem[k + dn] / den[dn];
        q[k] = c;
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= c * dj;
        }
    }
    q
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, ScalarError> {
        if !is_prime(p) || p >= (1u64 << 32) {
            return Err(ScalarError::InvalidModulus(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn cyclotomic(n: u32) -> Result<Field, ScalarError> {
        if n == 0 || n > 512 {
            return Err(ScalarError::InvalidModulus(n as u64));
        }
        Ok(Field::Cyclotomic(n))
    }

    /// Degree over the prime field (1 except for cyclotomic fields).
    pub fn degree(&self) -> usize {
        match self {
            Field::Cyclotomic(n) => cyclotomic_polynomial(*n).len() - 1,
            _ => 1,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            _ => 0,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_rational(&Rational::zero()).expect("zero embeds in every field")
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rational(&Rational::from_int(n)).expect("integers embed in every field")
    }

    /// Embeds a rational constant, reducing mod p for prime fields.
    pub fn from_rational(&self, r: &Rational) -> Result<FieldElement, ScalarError> {
        Ok(match self {
            Field::Rational => FieldElement::Rational(r.clone()),
            Field::Prime(p) => FieldElement::Prime {
                value: r.reduce_mod(*p).ok_or(ScalarError::DivisionByZero)?,
                modulus: *p,
            },
            Field::Cyclotomic(n) => {
                let mut c = vec![Rational::zero(); self.degree()];
                c[0] = r.clone();
                FieldElement::Cyclotomic { coeffs: c.into(), order: *n }
            }
        })
    }

    /// Element with the given power-basis coefficients in zeta; longer inputs
    /// are reduced modulo the cyclotomic polynomial.
    pub fn from_coefficients(&self, coeffs: &[Rational]) -> Result<FieldElement, ScalarError> {
        match self {
            Field::Cyclotomic(n) => Ok(FieldElement::Cyclotomic {
                coeffs: reduce_poly(coeffs.to_vec(), *n).into(),
                order: *n,
            }),
            _ if coeffs.len() <= 1 => {
                self.from_rational(coeffs.first().unwrap_or(&Rational::zero()))
            }
            _ => Err(ScalarError::Parse(format!(
                "coefficient list given for field {self}"
            ))),
        }
    }

    /// A primitive n-th root of unity, for cyclotomic fields.
    pub fn zeta(&self) -> Option<FieldElement> {
        match self {
            Field::Cyclotomic(_) => {
                self.from_coefficients(&[Rational::zero(), Rational::one()]).ok()
            }
            _ => None,
        }
    }

    /// Parses `"p/q"`, `"n"` or `"n mod p"`.
    pub fn parse(&self, s: &str) -> Result<FieldElement, ScalarError> {
        if let Some((v, m)) = s.split_once("mod") {
            let m: u64 = m
                .trim()
                .parse()
                .map_err(|_| ScalarError::Parse(s.to_string()))?;
            if *self != Field::Prime(m) {
                return Err(ScalarError::MixedField {
                    left: self.to_string(),
                    right: Field::Prime(m).to_string(),
                });
            }
            let r = Rational::parse(v).ok_or_else(|| ScalarError::Parse(s.to_string()))?;
            return self.from_rational(&r);
        }
        let r = Rational::parse(s).ok_or_else(|| ScalarError::Parse(s.to_string()))?;
        self.from_rational(&r)
    }
}

fn reduce_poly(mut c: Vec<Rational>, n: u32) -> Vec<Rational> {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    if c.len() < deg {
        c.resize(deg, Rational::zero());
        return c;
    }
    for k in (deg..c.len()).rev() {
        if c[k].is_zero() {
            continue;
        }
        let lead = c[k].clone();
        for (j, pj) in phi.iter().enumerate().take(deg) {
            if *pj != 0 {
                let t = lead.mul(&Rational::from_int(*pj));
                c[k - deg + j] = c[k - deg + j].sub(&t);
            }
        }
        c[k] = Rational::zero();
    }
    c.truncate(deg);
    c
}

/// An element of one of the supported fields.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(Rational),
    Prime { value: u64, modulus: u64 },
    Cyclotomic { coeffs: Box<[Rational]>, order: u32 },
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Rational(_) => Field::Rational,
            FieldElement::Prime { modulus, .. } => Field::Prime(*modulus),
            FieldElement::Cyclotomic { order, .. } => Field::Cyclotomic(*order),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_zero(),
            FieldElement::Prime { value, .. } => *value == 0,
            FieldElement::Cyclotomic { coeffs, .. } => coeffs.iter().all(|c| c.is_zero()),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_one(),
            FieldElement::Prime { value, .. } => *value == 1,
            FieldElement::Cyclotomic { coeffs, .. } => {
                coeffs[0].is_one() && coeffs[1..].iter().all(|c| c.is_zero())
            }
        }
    }

    fn mismatch(&self, other: &Self) -> ScalarError {
        ScalarError::MixedField {
            left: self.field().to_string(),
            right: other.field().to_string(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a.add(b)),
            (
                FieldElement::Prime { value: a, modulus: p },
                FieldElement::Prime { value: b, modulus: q },
            ) if p == q => FieldElement::Prime { value: (a + b) % p, modulus: *p },
            (
                FieldElement::Cyclotomic { coeffs: a, order: n },
                FieldElement::Cyclotomic { coeffs: b, order: m },
            ) if n == m => FieldElement::Cyclotomic {
                coeffs: a.iter().zip(b.iter()).map(|(x, y)| x.add(y)).collect(),
                order: *n,
            },
            _ => return Err(self.mismatch(other)),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a.mul(b)),
            (
                FieldElement::Prime { value: a, modulus: p },
                FieldElement::Prime { value: b, modulus: q },
            ) if p == q => FieldElement::Prime { value: mul_mod(*a, *b, *p), modulus: *p },
            (
                FieldElement::Cyclotomic { coeffs: a, order: n },
                FieldElement::Cyclotomic { coeffs: b, order: m },
            ) if n == m => {
                let mut prod = vec![Rational::zero(); a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.iter().enumerate() {
                        if !y.is_zero() {
                            prod[i + j] = prod[i + j].add(&x.mul(y));
                        }
                    }
                }
                FieldElement::Cyclotomic { coeffs: reduce_poly(prod, *n).into(), order: *n }
            }
            _ => return Err(self.mismatch(other)),
        })
    }

    pub fn neg_ref(&self) -> Self {
        match self {
            FieldElement::Rational(a) => FieldElement::Rational(a.neg()),
            FieldElement::Prime { value, modulus } => FieldElement::Prime {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
            FieldElement::Cyclotomic { coeffs, order } => FieldElement::Cyclotomic {
                coeffs: coeffs.iter().map(|c| c.neg()).collect(),
                order: *order,
            },
        }
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match self {
            FieldElement::Rational(a) => FieldElement::Rational(a.inv().unwrap()),
            FieldElement::Prime { value, modulus } => FieldElement::Prime {
                value: inv_mod(*value, *modulus).unwrap(),
                modulus: *modulus,
            },
            FieldElement::Cyclotomic { coeffs, order } => cyclotomic_inverse(coeffs, *order),
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ScalarError> {
        if self.field() != other.field() {
            return Err(self.mismatch(other));
        }
        self.try_mul(&other.inv()?)
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut r = self.field().one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// JSON form used in reports: strings for rationals and F_p, coefficient
    /// lists for cyclotomic elements.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            FieldElement::Cyclotomic { coeffs, .. } => serde_json::Value::Array(
                coeffs.iter().map(|c| serde_json::Value::String(c.to_string())).collect(),
            ),
            _ => serde_json::Value::String(self.to_string()),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            FieldElement::Rational(r) => Some(r),
            _ => None,
        }
    }
}

fn cyclotomic_inverse(a: &[Rational], n: u32) -> FieldElement {
    // columns of the multiplication-by-a matrix are a * zeta^j
    let deg = a.len();
    let field = Field::Cyclotomic(n);
    let elem = FieldElement::Cyclotomic { coeffs: a.to_vec().into(), order: n };
    let mut m: Vec<Vec<Rational>> = vec![vec![Rational::zero(); deg + 1]; deg];
    let mut basis = vec![Rational::zero(); deg];
    for j in 0..deg {
        basis.iter_mut().for_each(|b| *b = Rational::zero());
        basis[j] = Rational::one();
        let col = &elem * &field.from_coefficients(&basis).unwrap();
        if let FieldElement::Cyclotomic { coeffs, .. } = col {
            for i in 0..deg {
                m[i][j] = coeffs[i].clone();
            }
        }
    }
    m[0][deg] = Rational::one();
    // Gauss-Jordan on the augmented system
    for c in 0..deg {
        let p = (c..deg).find(|&r| !m[r][c].is_zero()).expect("nonzero cyclotomic element is invertible");
        m.swap(c, p);
        let iv = m[c][c].inv().unwrap();
        for x in m[c].iter_mut() {
            *x = x.mul(&iv);
        }
        for r in 0..deg {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..=deg {
                    let t = f.mul(&m[c][k]);
                    m[r][k] = m[r][k].sub(&t);
                }
            }
        }
    }
    FieldElement::Cyclotomic { coeffs: m.iter().map(|row| row[deg].clone()).collect(), order: n }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(r) => write!(f, "{r}"),
            FieldElement::Prime { value, modulus } => write!(f, "{value} mod {modulus}"),
            FieldElement::Cyclotomic { coeffs, .. } => {
                let mut first = true;
                for (k, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    match k {
                        0 => write!(f, "{c}")?,
                        1 => write!(f, "({c})z")?,
                        _ => write!(f, "({c})z^{k}")?,
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Operator forms are for same-field arithmetic inside a single computation;
// mixing fields there is a programming error. Public entry points that accept
// user data go through the `try_*` methods.
impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> FieldElement {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> FieldElement {
        self.try_sub(rhs).expect("field mismatch")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> FieldElement {
        self.try_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &FieldElement) {
        *self = &*self - rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_names_round_trip() {
        for f in [Field::Rational, Field::Prime(7), Field::Cyclotomic(8)] {
            assert_eq!(f.to_string().parse::<Field>().unwrap(), f);
        }
        assert_eq!("prime:5".parse::<Field>().unwrap(), Field::Prime(5));
        assert_eq!("rational".parse::<Field>().unwrap(), Field::Rational);
        assert!("F_6".parse::<Field>().is_err());
        assert!("R".parse::<Field>().is_err());
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta_has_exact_order() {
        for n in [3u32, 4, 5, 8, 12] {
            let f = Field::cyclotomic(n).unwrap();
            let z = f.zeta().unwrap();
            for k in 1..n as u64 {
                assert!(!z.pow(k).is_one(), "zeta_{n}^{k}");
            }
            assert!(z.pow(n as u64).is_one());
        }
    }

    #[test]
    fn cyclotomic_inverse_roundtrip() {
        let f = Field::cyclotomic(5).unwrap();
        let a = f
            .from_coefficients(&[Rational::from_int(2), Rational::new(-1, 3).unwrap(), Rational::one()])
            .unwrap();
        assert!((&a * &a.inv().unwrap()).is_one());
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Field::Rational.one();
        let b = Field::Prime(5).one();
        assert!(matches!(a.try_add(&b), Err(ScalarError::MixedField { .. })));
        assert!(matches!(Field::Prime(5).zero().inv(), Err(ScalarError::DivisionByZero)));
    }

    #[test]
    fn parsing() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.parse("7 mod 5").unwrap(), f5.from_int(2));
        assert_eq!(f5.parse("1/2").unwrap(), f5.from_int(3));
        assert!(f5.parse("1 mod 7").is_err());
        assert!(Field::prime(6).is_err());
        assert_eq!(Field::Rational.parse("3/6").unwrap().to_string(), "1/2");
    }
}
