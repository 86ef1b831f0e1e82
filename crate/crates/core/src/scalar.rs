//! Exact scalars: rationals or a prime field chosen once per session.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("cannot parse scalar literal `{0}`")]
    Parse(String),
    #[error("modulus {0} is not a prime below 2^31")]
    BadModulus(u64),
    #[error("denominator is divisible by the field characteristic {0}")]
    NotInvertible(u32),
    #[error("unknown field `{0}` (expected `q` or `fp:P`)")]
    UnknownField(String),
}

/// The scalar field of a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u32),
}

impl Field {
    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if !(2..(1 << 31)).contains(&p) || !is_prime(p) {
            return Err(ScalarError::BadModulus(p));
        }
        Ok(Field::Prime(p as u32))
    }

    /// Parses `q` or `fp:P`.
    pub fn parse(text: &str) -> Result<Self, ScalarError> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(Field::Rational);
        }
        if let Some(p) = t.strip_prefix("fp:") {
            let p: u64 = p.parse().map_err(|_| ScalarError::UnknownField(t.to_string()))?;
            return Field::prime(p);
        }
        Err(ScalarError::UnknownField(t.to_string()))
    }

    pub fn zero(self) -> Scalar {
        self.from_int(0)
    }

    pub fn one(self) -> Scalar {
        self.from_int(1)
    }

    pub fn from_int(self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Fp(n.rem_euclid(p as i64) as u32, p),
        }
    }

    pub fn from_ratio(self, num: i64, den: i64) -> Result<Scalar, ScalarError> {
        if den == 0 {
            return Err(ScalarError::Parse(format!("{num}/{den}")));
        }
        match self {
            Field::Rational => Ok(Scalar::Q(BigRational::new(num.into(), den.into()))),
            Field::Prime(p) => {
                let d = self.from_int(den);
                let inv = d.inverse().ok_or(ScalarError::NotInvertible(p))?;
                Ok(&self.from_int(num) * &inv)
            }
        }
    }

    /// Parses an exact literal such as `3`, `-2/5` or `7/1`.
    pub fn parse_scalar(self, text: &str) -> Result<Scalar, ScalarError> {
        let t = text.trim();
        let bad = || ScalarError::Parse(t.to_string());
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        match self {
            Field::Rational => Ok(Scalar::Q(BigRational::new(num, den))),
            Field::Prime(p) => {
                let m = BigInt::from(p);
                let reduce = |x: &BigInt| -> u32 {
                    let r = ((x % &m) + &m) % &m;
                    r.try_into().unwrap_or(0)
                };
                let n = Scalar::Fp(reduce(&num), p);
                let d = Scalar::Fp(reduce(&den), p);
                let inv = d.inverse().ok_or(ScalarError::NotInvertible(p))?;
                Ok(&n * &inv)
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "q"),
            Field::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact field element. Arithmetic between elements of different fields
/// is a logic error and panics.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp(u32, u32),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rational,
            Scalar::Fp(_, p) => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp(v, _) => *v == 1,
        }
    }

    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Q(q) => Scalar::Q(q.recip()),
            Scalar::Fp(v, p) => Scalar::Fp(pow_mod(*v as u64, *p as u64 - 2, *p as u64) as u32, *p),
        })
    }

    /// True for rationals with a leading minus sign; prime-field values never are.
    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Q(q) if q.is_negative())
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

fn same_prime(a: u32, b: u32) -> u32 {
    assert_eq!(a, b, "scalars from different prime fields");
    a
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) => {
                let p = same_prime(*p, *q);
                Scalar::Fp(((*a as u64 + *b as u64) % p as u64) as u32, p)
            }
            _ => panic!("mixed scalar fields"),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) => {
                let p = same_prime(*p, *q);
                Scalar::Fp(((*a as u64 * *b as u64) % p as u64) as u32, p)
            }
            _ => panic!("mixed scalar fields"),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp(a, p) => Scalar::Fp((*p - *a) % *p, *p),
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
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
            Scalar::Fp(v, _) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals() {
        let q = Field::Rational;
        assert_eq!(q.parse_scalar("-6/4").unwrap(), q.from_ratio(-3, 2).unwrap());
        assert_eq!(q.parse_scalar("-3/2").unwrap().to_string(), "-3/2");
        assert!(q.parse_scalar("1/0").is_err());
        assert!(q.parse_scalar("x").is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::parse("fp:7").unwrap();
        let three = f.from_int(3);
        let inv = three.inverse().unwrap();
        assert!((&three * &inv).is_one());
        assert_eq!(f.parse_scalar("1/2").unwrap(), f.from_int(4));
        assert_eq!((-&three).to_string(), "4");
        assert!(f.parse_scalar("1/7").is_err());
    }

    #[test]
    fn rejects_composite_moduli() {
        assert_eq!(Field::parse("fp:9"), Err(ScalarError::BadModulus(9)));
        assert!(Field::parse("fp:2147483659").is_err());
        assert!(Field::parse("r").is_err());
    }
}
