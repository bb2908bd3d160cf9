//! Ground fields and exact scalars.
//!
//! Two kinds of field are supported: the rationals and prime fields of odd
//! characteristic. A [`Scalar`] carries its field tag, so arithmetic between
//! scalars of different fields is a programming error and panics.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("modulus {0} is too large (must fit in 31 bits)")]
    TooLarge(u64),
    #[error("denominator {den} vanishes in F_{p}")]
    DenominatorVanishes { den: i64, p: u32 },
    #[error("unknown field `{0}` (expected Q or F<p>)")]
    Unknown(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldSpec {
    Rationals,
    Prime(u32),
}

impl FieldSpec {
    /// Prime field of odd characteristic `p`.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if p > (1 << 31) {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(FieldSpec::Prime(p as u32))
    }

    /// Parses `Q`, `F3`, `F 3` or `F_3`.
    pub fn parse(text: &str) -> Result<Self, FieldError> {
        let t = text.trim();
        if t == "Q" || t == "q" {
            return Ok(FieldSpec::Rationals);
        }
        let rest = t
            .strip_prefix('F')
            .or_else(|| t.strip_prefix('f'))
            .ok_or_else(|| FieldError::Unknown(t.to_string()))?;
        let rest = rest.trim_start_matches('_').trim();
        let p: u64 = rest.parse().map_err(|_| FieldError::Unknown(t.to_string()))?;
        FieldSpec::prime(p)
    }

    pub fn characteristic(self) -> u32 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Q(BigRational::zero()),
            FieldSpec::Prime(p) => Scalar::Fp { v: 0, p },
        }
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::Prime(p) => Scalar::Fp { v: n.rem_euclid(p as i64) as u32, p },
        }
    }

    /// The fraction `num/den`; fails in F_p when p divides `den`.
    pub fn from_fraction(self, num: &BigInt, den: &BigInt) -> Result<Scalar, FieldError> {
        assert!(!den.is_zero(), "zero denominator");
        match self {
            FieldSpec::Rationals => Ok(Scalar::Q(BigRational::new(num.clone(), den.clone()))),
            FieldSpec::Prime(p) => {
                let pm = BigInt::from(p);
                let n = ((num % &pm) + &pm) % &pm;
                let d = ((den % &pm) + &pm) % &pm;
                if d.is_zero() {
                    return Err(FieldError::DenominatorVanishes {
                        den: den.to_i64().unwrap_or(i64::MAX),
                        p,
                    });
                }
                let n = Scalar::Fp { v: n.to_u32().unwrap(), p };
                let d = Scalar::Fp { v: d.to_u32().unwrap(), p };
                Ok(&n / &d)
            }
        }
    }

    pub fn name(self) -> String {
        match self {
            FieldSpec::Rationals => "Q".to_string(),
            FieldSpec::Prime(p) => format!("F{p}"),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// An exact field element. Rationals are kept in lowest terms by
/// `num-rational`; residues lie in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { v: u32, p: u32 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Q(_) => FieldSpec::Rationals,
            Scalar::Fp { p, .. } => FieldSpec::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Q(q) => {
                assert!(!q.is_zero(), "inverse of zero");
                Scalar::Q(q.recip())
            }
            Scalar::Fp { v, p } => {
                assert!(*v != 0, "inverse of zero");
                Scalar::Fp { v: pow_mod(*v as u64, *p as u64 - 2, *p as u64) as u32, p: *p }
            }
        }
    }

    /// Multiplies by ±1.
    pub fn signed(self, negative: bool) -> Scalar {
        if negative {
            -self
        } else {
            self
        }
    }

    /// JSON form: rationals as `"num/den"` strings, residues as integers.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Scalar::Q(q) => serde_json::Value::String(format!("{}/{}", q.numer(), q.denom())),
            Scalar::Fp { v, .. } => serde_json::Value::from(*v),
        }
    }

    /// Whether the printed form needs parentheses when used as a coefficient.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_negative(),
            Scalar::Fp { .. } => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

#[inline]
fn same_field(a: u32, b: u32) {
    assert_eq!(a, b, "scalars from different prime fields");
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) => {
                same_field(*p, *q);
                Scalar::Fp { v: ((*a as u64 + *b as u64) % *p as u64) as u32, p: *p }
            }
            _ => panic!("scalars from different fields"),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a - b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) => {
                same_field(*p, *q);
                Scalar::Fp { v: ((*a as u64 + *p as u64 - *b as u64) % *p as u64) as u32, p: *p }
            }
            _ => panic!("scalars from different fields"),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) => {
                same_field(*p, *q);
                Scalar::Fp { v: ((*a as u64 * *b as u64) % *p as u64) as u32, p: *p }
            }
            _ => panic!("scalars from different fields"),
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self * &rhs.inv()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { v, p } => Scalar::Fp { v: if v == 0 { 0 } else { p - v }, p },
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => *a += b,
            _ => *self = &*self + rhs,
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => *a -= b,
            _ => *self = &*self - rhs,
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => *a *= b,
            _ => *self = &*self * rhs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_fields_validate() {
        assert_eq!(FieldSpec::prime(3), Ok(FieldSpec::Prime(3)));
        assert_eq!(FieldSpec::prime(2), Err(FieldError::EvenCharacteristic));
        assert_eq!(FieldSpec::prime(9), Err(FieldError::NotPrime(9)));
        assert_eq!(FieldSpec::parse("F 5"), Ok(FieldSpec::Prime(5)));
        assert_eq!(FieldSpec::parse("F_7"), Ok(FieldSpec::Prime(7)));
        assert_eq!(FieldSpec::parse("Q"), Ok(FieldSpec::Rationals));
        assert!(FieldSpec::parse("R").is_err());
    }

    #[test]
    fn residues_are_reduced() {
        let f = FieldSpec::Prime(3);
        assert!(f.from_i64(3).is_zero());
        assert_eq!(f.from_i64(-1), Scalar::Fp { v: 2, p: 3 });
        let two = f.from_i64(2);
        assert!((&two * &two.inv()).is_one());
    }

    #[test]
    fn fractions() {
        let q = FieldSpec::Rationals;
        let half = q.from_fraction(&BigInt::from(2), &BigInt::from(4)).unwrap();
        assert_eq!(half.to_json(), serde_json::json!("1/2"));
        let f5 = FieldSpec::Prime(5);
        let x = f5.from_fraction(&BigInt::from(1), &BigInt::from(2)).unwrap();
        assert_eq!(x, Scalar::Fp { v: 3, p: 5 });
        assert!(f5.from_fraction(&BigInt::from(1), &BigInt::from(10)).is_err());
    }

    #[test]
    fn brute_force_inverse_mod_p() {
        for p in [3u32, 5, 7, 11, 13] {
            let f = FieldSpec::Prime(p);
            for a in 1..p {
                let x = f.from_i64(a as i64);
                let inv = (1..p).find(|b| (a * b) % p == 1).unwrap();
                assert_eq!(x.inv(), f.from_i64(inv as i64));
            }
        }
    }
}
