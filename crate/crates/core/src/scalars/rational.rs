use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number.
///
/// Values whose numerator and denominator fit in an `i64` stay in the `Small`
/// form; anything larger is promoted to a `BigRational`. The representation is
/// canonical (reduced, positive denominator, `Small` whenever possible), so the
/// derived equality and hashing are value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rational {
    Small(i64, i64),
    Big(BigRational),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub fn zero() -> Self {
        Rational::Small(0, 1)
    }

    pub fn one() -> Self {
        Rational::Small(1, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Rational::Small(n, 1)
    }

    /// Builds `n / d` from wide integers, reducing and demoting when possible.
    fn from_i128(n: i128, d: i128) -> Self {
        debug_assert!(d != 0);
        let (mut n, mut d) = if d < 0 { (-n, -d) } else { (n, d) };
        if n == 0 {
            return Rational::zero();
        }
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Rational::Small(a, b),
            _ => Rational::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))),
        }
    }

    pub fn new(n: i64, d: i64) -> Option<Self> {
        if d == 0 {
            None
        } else {
            Some(Self::from_i128(n as i128, d as i128))
        }
    }

    pub fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational::Small(n, d),
            _ => Rational::Big(r),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rational::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rational::Big(b) => b.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rational::Small(n, _) => BigInt::from(*n),
            Rational::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rational::Small(_, d) => BigInt::from(*d),
            Rational::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rational::Small(1, 1))
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    return match a.checked_add(*c) {
                        Some(s) => Rational::Small(s, 1),
                        None => Self::from_i128(*a as i128 + *c as i128, 1),
                    };
                }
                let n = (*a as i128) * (*d as i128) + (*c as i128) * (*b as i128);
                Self::from_i128(n, (*b as i128) * (*d as i128))
            }
            _ => Self::from_big(self.to_big() + other.to_big()),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                if *b == 1 && *d == 1 {
                    return match a.checked_mul(*c) {
                        Some(p) => Rational::Small(p, 1),
                        None => Self::from_i128(*a as i128 * *c as i128, 1),
                    };
                }
                Self::from_i128((*a as i128) * (*c as i128), (*b as i128) * (*d as i128))
            }
            _ => Self::from_big(self.to_big() * other.to_big()),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Rational::Small(n, d) => match n.checked_neg() {
                Some(m) => Rational::Small(m, *d),
                None => Self::from_i128(-(*n as i128), *d as i128),
            },
            Rational::Big(b) => Self::from_big(-b.clone()),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Rational::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Rational::Big(b) => Self::from_big(b.recip()),
        })
    }

    /// Reduction modulo a prime; `None` when the denominator vanishes mod `p`.
    pub fn reduce_mod(&self, p: u64) -> Option<u64> {
        let pb = BigInt::from(p);
        let n = self.numer().mod_floor(&pb);
        let d = self.denom().mod_floor(&pb);
        if d.is_zero() {
            return None;
        }
        let n = n.to_u64()?;
        let d = d.to_u64()?;
        Some(crate::scalars::field::mul_mod(n, crate::scalars::field::inv_mod(d, p)?, p))
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Self::from_big(BigRational::new(n, d)))
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rational::Small(n, _) => n.signum() as i32,
            Rational::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rational::Small(a, b), Rational::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational::Small(n, 1) => write!(f, "{n}"),
            Rational::Small(n, d) => write!(f, "{n}/{d}"),
            Rational::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Rational::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
