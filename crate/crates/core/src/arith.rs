//! Exact rational arithmetic and Bernoulli numbers.
//!
//! Every coefficient produced anywhere in the crate is a [`Rational`]; there is
//! no floating point on any computational path.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An arbitrary-precision rational number, always kept reduced with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int<T: Into<BigInt>>(n: T) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// `num/den`, reduced. Panics if `den == 0`.
    pub fn new<T: Into<BigInt>>(num: T, den: T) -> Self {
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        Rational(BigRational::new(num, den))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Largest integer not exceeding `self`.
    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Rational::one();
        }
        Rational(num_traits::pow(self.0.clone(), e as usize))
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_int(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {0:?}")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| err())?;
                let d: BigInt = d.trim().parse().map_err(|_| err())?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Rational::from_big(n, d))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| err())?;
                Ok(Rational::from(n))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(n) => Ok(Rational::from(n)),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `(-1)^e` as a rational.
pub fn sign(e: u32) -> Rational {
    if e % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Coefficients `B_n / n!` of `x/(e^x - 1)`, grown on demand.
static BERNOULLI_SERIES: RwLock<Vec<Rational>> = RwLock::new(Vec::new());

/// Returns `B_t / t!`, the `t`-th coefficient of `x/(e^x - 1)`.
///
/// The series is the reciprocal of `(e^x - 1)/x = sum x^n/(n+1)!`, obtained
/// by truncated power-series division; computed prefixes are memoized.
fn bernoulli_series_coeff(t: usize) -> Rational {
    if let Some(c) = BERNOULLI_SERIES.read().unwrap().get(t) {
        return c.clone();
    }
    let mut series = BERNOULLI_SERIES.write().unwrap();
    while series.len() <= t {
        let n = series.len();
        if n == 0 {
            series.push(Rational::one());
            continue;
        }
        // b_n = -sum_{k=1}^{n} f_k b_{n-k} with f_k = 1/(k+1)!
        let mut acc = Rational::zero();
        for k in 1..=n {
            let f_k = Rational::from_big(BigInt::one(), factorial(k as u32 + 1));
            acc += f_k * &series[n - k];
        }
        series.push(-acc);
    }
    series[t].clone()
}

/// The Bernoulli number `B_t = B_t(0)`, with the convention `B_1 = -1/2`.
pub fn bernoulli_number(t: u32) -> Rational {
    bernoulli_series_coeff(t as usize) * Rational::from(factorial(t))
}

/// The Bernoulli polynomial `B_t(ell)`, defined by
/// `sum_t B_t(ell) x^t / t! = e^{ell x} x / (e^x - 1)`, evaluated at an integer.
pub fn bernoulli_poly(t: u32, ell: i64) -> Rational {
    // [x^t] e^{ell x} * B(x) = sum_k ell^{t-k}/(t-k)! * B_k/k!
    let ell = Rational::from(ell);
    let mut acc = Rational::zero();
    for k in 0..=t {
        let e = t - k;
        let term = ell.pow(e) / Rational::from(factorial(e)) * bernoulli_series_coeff(k as usize);
        acc += term;
    }
    acc * Rational::from(factorial(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn bernoulli_numbers_small() {
        assert_eq!(bernoulli_number(0), q(1, 1));
        assert_eq!(bernoulli_number(1), q(-1, 2));
        assert_eq!(bernoulli_number(2), q(1, 6));
        assert_eq!(bernoulli_number(3), Rational::zero());
        assert_eq!(bernoulli_number(4), q(-1, 30));
        assert_eq!(bernoulli_number(6), q(1, 42));
        assert_eq!(bernoulli_number(12), q(-691, 2730));
    }

    #[test]
    fn bernoulli_poly_examples() {
        assert_eq!(bernoulli_poly(0, 5), Rational::one());
        assert_eq!(bernoulli_poly(1, 0), q(-1, 2));
        for ell in -4i64..=4 {
            let expect = Rational::from(ell * ell - ell) + q(1, 6);
            assert_eq!(bernoulli_poly(2, ell), expect);
        }
    }

    #[test]
    fn shift_identity() {
        for t in 0u32..=12 {
            for ell in -5i64..=5 {
                let lhs = bernoulli_poly(t, ell + 1) - bernoulli_poly(t, ell);
                let rhs =
                    if t == 0 { Rational::zero() } else { Rational::from(t as i64) * Rational::from(ell).pow(t - 1) };
                assert_eq!(lhs, rhs, "t={t} ell={ell}");
            }
        }
    }

    #[test]
    fn reflection_at_one_and_odd_vanishing() {
        for t in 0u32..=12 {
            assert_eq!(bernoulli_poly(t, 1), sign(t) * bernoulli_number(t));
        }
        for t in (3u32..=13).step_by(2) {
            assert!(bernoulli_number(t).is_zero());
        }
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["0", "-3", "7/12", "-1/30"] {
            let r: Rational = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert_eq!("4/6".parse::<Rational>().unwrap().to_string(), "2/3");
        assert_eq!("3/-6".parse::<Rational>().unwrap().to_string(), "-1/2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn binomials_and_floor() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(q(-1, 2).floor(), BigInt::from(-1));
        assert_eq!(q(7, 3).floor(), BigInt::from(2));
    }
}
