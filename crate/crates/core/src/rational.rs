//! Exact rational coefficients.
//!
//! Almost every coefficient met in Chern-class arithmetic is a small integer, so
//! [`Rat`] keeps an inline `i64` fraction and only spills to a heap-allocated
//! [`BigRational`] when an operation overflows.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
pub enum Rat {
    /// `num / den` with `den > 0` and `gcd(num, den) == 1`.
    Small(i64, i64),
    Big(Box<BigRational>),
}

impl Rat {
    pub const ZERO: Rat = Rat::Small(0, 1);
    pub const ONE: Rat = Rat::Small(1, 1);

    pub fn int(n: i64) -> Rat {
        Rat::Small(n, 1)
    }

    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_bigint(n: BigInt) -> Rat {
        Self::from_big(BigRational::from_integer(n))
    }

    fn from_i128(mut num: i128, mut den: i128) -> Rat {
        if den < 0 {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) => Rat::Small(n, d),
            _ => Rat::Big(Box::new(BigRational::new_raw(BigInt::from(num), BigInt::from(den)))),
        }
    }

    fn from_big(r: BigRational) -> Rat {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Rat::Small(n, d);
        }
        Rat::Big(Box::new(r))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rat::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(_, d) => *d == 1,
            Rat::Big(b) => b.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n < 0,
            Rat::Big(b) => b.is_negative(),
        }
    }

    /// Numerator of an integral value.
    pub fn to_integer(&self) -> Option<BigInt> {
        match self {
            Rat::Small(n, 1) => Some(BigInt::from(*n)),
            Rat::Small(..) => None,
            Rat::Big(b) => b.is_integer().then(|| b.numer().clone()),
        }
    }

    /// Integral value that fits in an `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Rat::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn numer_denom(&self) -> (BigInt, BigInt) {
        match self {
            Rat::Small(n, d) => (BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(b) => (b.numer().clone(), b.denom().clone()),
        }
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "reciprocal of zero");
        match self {
            Rat::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Rat::Big(b) => Self::from_big(b.recip()),
        }
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Residue modulo a prime `p`; `None` if `p` divides the denominator.
    pub fn mod_prime(&self, p: u64) -> Option<u64> {
        let (n, d) = self.numer_denom();
        let pb = BigInt::from(p);
        let n = n.mod_floor(&pb).to_u64().unwrap();
        let d = d.mod_floor(&pb).to_u64().unwrap();
        if d == 0 {
            return None;
        }
        Some(crate::modular::mul_mod(n, crate::modular::inv_mod(d, p), p))
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::ZERO
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_bigint(n)
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => a == c && b == d,
            // normalized small values never equal a normalized big value
            (Rat::Big(a), Rat::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl std::hash::Hash for Rat {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            Rat::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Rat::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128))),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        match (self, rhs) {
            (Rat::Small(a, 1), Rat::Small(c, 1)) => match a.checked_add(*c) {
                Some(s) => Rat::Small(s, 1),
                None => Rat::from_i128(*a as i128 + *c as i128, 1),
            },
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                match a.checked_mul(d).and_then(|x| c.checked_mul(b).and_then(|y| x.checked_add(y))) {
                    Some(n) => Rat::from_i128(n, b * d),
                    None => Rat::from_big(self.to_big() + rhs.to_big()),
                }
            }
            _ => Rat::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        match (self, rhs) {
            (Rat::Small(a, 1), Rat::Small(c, 1)) => match a.checked_mul(*c) {
                Some(p) => Rat::Small(p, 1),
                None => Rat::from_i128(*a as i128 * *c as i128, 1),
            },
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                // i64 * i64 always fits in i128
                Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rat::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Small(n, d) => match n.checked_neg() {
                Some(m) => Rat::Small(m, *d),
                None => Rat::from_i128(-(*n as i128), *d as i128),
            },
            Rat::Big(b) => Rat::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl<'a> Sub<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        self + &(-rhs)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        *self = &*self * rhs;
    }
}

impl Zero for Rat {
    fn zero() -> Self {
        Rat::ZERO
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
}

impl One for Rat {
    fn one() -> Self {
        Rat::ONE
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{n}"),
            Rat::Small(n, d) => write!(f, "{n}/{d}"),
            Rat::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRatError(String);

impl FromStr for Rat {
    type Err = ParseRatError;
    fn from_str(s: &str) -> Result<Rat, ParseRatError> {
        let err = || ParseRatError(s.to_string());
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| err())?;
                let d: BigInt = d.trim().parse().map_err(|_| err())?;
                if d.is_zero() {
                    return Err(err());
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(s.trim().parse().map_err(|_| err())?),
        };
        Ok(Rat::from_big(r))
    }
}
