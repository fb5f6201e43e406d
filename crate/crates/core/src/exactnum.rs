//! Exact scalars.
//!
//! [`Rational`] is an arbitrary-precision fraction kept in lowest terms. Values whose
//! numerator and denominator fit in an `i64` take a fast path through `i128`
//! intermediates; anything larger falls back to `BigInt`. The representation is
//! canonical, so two equal values always have the same variant.
//!
//! [`ExtRational`] adds `±∞` for limits of cumulative integrals, and [`ApproxReal`]
//! carries a float with an explicit error bound for the few irrational quantities.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone)]
enum Repr {
    // den > 0, gcd(num, den) = 1
    Small(i64, i64),
    // only used when the value does not fit in Small
    Big(BigRational),
}

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Clone)]
pub struct Rational(Repr);

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    /// `num / den`. Fails when `den == 0`.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Argument("zero denominator".into()));
        }
        Ok(Self::from_i128(num as i128, den as i128))
    }

    /// Panicking shorthand for literals in code and tests.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("nonzero denominator")
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let (mut n, mut d) = if den < 0 {
            match (num.checked_neg(), den.checked_neg()) {
                (Some(n), Some(d)) => (n, d),
                _ => return Self::from_big(BigRational::new(num.into(), den.into())),
            }
        } else {
            (num, den)
        };
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(BigRational::new_raw(n.into(), d.into()))),
        }
    }

    /// Wraps an already reduced big rational, shrinking it when possible.
    fn from_big(r: BigRational) -> Self {
        // BigRational::new reduces and fixes the sign; callers may pass unreduced input.
        let r = BigRational::new(r.numer().clone(), r.denom().clone());
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(r)),
        }
    }

    pub fn from_bigint_parts(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Argument("zero denominator".into()));
        }
        Ok(Self::from_big(BigRational::new(num, den)))
    }

    /// Exact value of a finite float.
    pub fn from_f64_exact(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(Self::from_big)
            .ok_or_else(|| Error::Argument(format!("non-finite float {x}")))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or_else(|| {
                if r.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }),
        }
    }

    pub fn signum(&self) -> Ordering {
        match &self.0 {
            Repr::Small(n, _) => n.cmp(&0),
            Repr::Big(r) => {
                if r.is_positive() {
                    Ordering::Greater
                } else if r.is_negative() {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational> {
        if rhs.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(self / rhs)
    }

    pub fn recip(&self) -> Result<Rational> {
        Rational::one().checked_div(self)
    }

    /// Integer power; negative exponents invert (zero base is then an error).
    pub fn pow(&self, exp: i32) -> Result<Rational> {
        if exp < 0 && self.is_zero() {
            return Err(Error::Domain("zero to a negative power".into()));
        }
        Ok(Self::from_big(num_traits::pow::Pow::pow(self.to_big(), exp)))
    }

    /// Midpoint `(a + b) / 2`.
    pub fn midpoint(&self, other: &Rational) -> Rational {
        (self + other) * Rational::frac(1, 2)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n as i64)
    }
}

fn add_impl(a: &Rational, b: &Rational, negate_b: bool) -> Rational {
    if let (Repr::Small(an, ad), Repr::Small(bn, bd)) = (&a.0, &b.0) {
        let bn = if negate_b { -(*bn as i128) } else { *bn as i128 };
        let (an, ad, bd) = (*an as i128, *ad as i128, *bd as i128);
        if ad == bd {
            if let Some(n) = an.checked_add(bn) {
                return Rational::from_i128(n, ad);
            }
        } else if let Some(n) = (an * bd).checked_add(bn * ad) {
            return Rational::from_i128(n, ad * bd);
        }
    }
    let rb = b.to_big();
    let r = if negate_b { a.to_big() - rb } else { a.to_big() + rb };
    Rational::from_big(r)
}

fn mul_impl(a: &Rational, b: &Rational) -> Rational {
    if let (Repr::Small(an, ad), Repr::Small(bn, bd)) = (&a.0, &b.0) {
        return Rational::from_i128(*an as i128 * *bn as i128, *ad as i128 * *bd as i128);
    }
    Rational::from_big(a.to_big() * b.to_big())
}

fn div_impl(a: &Rational, b: &Rational) -> Rational {
    assert!(!b.is_zero(), "rational division by zero");
    if let (Repr::Small(an, ad), Repr::Small(bn, bd)) = (&a.0, &b.0) {
        return Rational::from_i128(*an as i128 * *bd as i128, *ad as i128 * *bn as i128);
    }
    Rational::from_big(a.to_big() / b.to_big())
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(&self, &rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(&self, rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| add_impl(a, b, false));
forward_binop!(Sub, sub, |a, b| add_impl(a, b, true));
forward_binop!(Mul, mul, mul_impl);
forward_binop!(Div, div, div_impl);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, rhs, false);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, rhs, true);
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(n) => Rational(Repr::Small(n, *d)),
                None => Rational::from_big(-self.to_big()),
            },
            Repr::Big(r) => Rational::from_big(-r.clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => {
                (*an as i128 * *bd as i128).cmp(&(*bn as i128 * *ad as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(an, ad), Repr::Small(bn, bd)) => an == bn && ad == bd,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            // canonical representation: a Small never equals a Big
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_bigint(s: &str) -> Result<BigInt> {
    if s.is_empty() {
        return Err(Error::Parse("empty integer".into()));
    }
    s.parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("invalid integer '{s}'")))
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("invalid exponent in '{s}'")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if (int_part.is_empty() && frac_part.is_empty())
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(Error::Parse(format!("invalid number '{s}'")));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut num = parse_bigint(&all_digits)?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(Rational::from_big(value))
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"p"`, `"p/q"` and decimal or scientific notation such as `"0.25"` or `"1e-12"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = parse_bigint(n.trim())?;
            let d = parse_bigint(d.trim())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            return Ok(Rational::from_big(BigRational::new(n, d)));
        }
        if s.contains(['.', 'e', 'E']) {
            return parse_decimal(s);
        }
        Ok(Rational::from_big(BigRational::from_integer(parse_bigint(s)?)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A rational extended by `±∞`.
///
/// The derived order puts `NegInf` below every finite value and `PosInf` above.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtRational {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            _ => None,
        }
    }

    /// `None` for `∞ + (−∞)`.
    pub fn checked_add(&self, rhs: &ExtRational) -> Option<ExtRational> {
        use ExtRational::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => None,
            (PosInf, _) | (_, PosInf) => Some(PosInf),
            (NegInf, _) | (_, NegInf) => Some(NegInf),
        }
    }

    pub fn checked_sub(&self, rhs: &ExtRational) -> Option<ExtRational> {
        self.checked_add(&-rhs)
    }

    pub fn min(self, other: ExtRational) -> ExtRational {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: ExtRational) -> ExtRational {
        std::cmp::max(self, other)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRational::NegInf => f64::NEG_INFINITY,
            ExtRational::Finite(r) => r.to_f64(),
            ExtRational::PosInf => f64::INFINITY,
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(r: Rational) -> Self {
        ExtRational::Finite(r)
    }
}

impl Neg for &ExtRational {
    type Output = ExtRational;
    fn neg(self) -> ExtRational {
        match self {
            ExtRational::NegInf => ExtRational::PosInf,
            ExtRational::Finite(r) => ExtRational::Finite(-r),
            ExtRational::PosInf => ExtRational::NegInf,
        }
    }
}

impl PartialEq<Rational> for ExtRational {
    fn eq(&self, other: &Rational) -> bool {
        self.finite() == Some(other)
    }
}

impl PartialOrd<Rational> for ExtRational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(match self {
            ExtRational::NegInf => Ordering::Less,
            ExtRational::Finite(r) => r.cmp(other),
            ExtRational::PosInf => Ordering::Greater,
        })
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInf => f.write_str("-inf"),
            ExtRational::Finite(r) => write!(f, "{r}"),
            ExtRational::PosInf => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(ExtRational::PosInf),
            "-inf" | "-infinity" => Ok(ExtRational::NegInf),
            other => other.parse().map(ExtRational::Finite),
        }
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A float together with a bound on its absolute error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxReal {
    pub value: f64,
    pub error_bound: f64,
}

impl ApproxReal {
    pub fn new(value: f64, error_bound: f64) -> Self {
        ApproxReal { value, error_bound: error_bound.abs() }
    }

    /// A float known up to its own rounding.
    pub fn from_f64(value: f64) -> Self {
        ApproxReal::new(value, value.abs() * f64::EPSILON)
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error_bound
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error_bound
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.error_bound
    }

    pub fn mul(&self, other: &ApproxReal) -> ApproxReal {
        let value = self.value * other.value;
        let err = self.value.abs() * other.error_bound
            + other.value.abs() * self.error_bound
            + self.error_bound * other.error_bound
            + value.abs() * f64::EPSILON;
        ApproxReal::new(value, err)
    }

    pub fn scale(&self, c: f64) -> ApproxReal {
        let value = self.value * c;
        ApproxReal::new(value, self.error_bound * c.abs() + value.abs() * f64::EPSILON)
    }
}

impl fmt::Display for ApproxReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:e}", self.value, self.error_bound)
    }
}

/// `x^e` for rational `x > 0` and rational `e`, to absolute accuracy `tol`.
///
/// With `e = n/d` the result `z` is the unique positive solution of `z^d = x^n`;
/// it is bracketed by exact rationals (seeded from a float estimate) and bisected
/// until the half-width is at most `tol / 2`. The returned bound also covers the
/// rounding of the midpoint to `f64`.
pub fn rational_pow(x: &Rational, e: &Rational, tol: &Rational) -> Result<ApproxReal> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("rational_pow needs x > 0, got {x}")));
    }
    if !tol.is_positive() {
        return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
    }
    if e.is_zero() || *x == Rational::one() {
        return Ok(ApproxReal::new(1.0, 0.0));
    }
    let n = e
        .numer()
        .to_i32()
        .ok_or_else(|| Error::Argument(format!("exponent numerator too large: {e}")))?;
    let d = e
        .denom()
        .to_i32()
        .ok_or_else(|| Error::Argument(format!("exponent denominator too large: {e}")))?;
    let target = x.pow(n)?;
    if d == 1 {
        return Ok(ApproxReal::from_f64(target.to_f64()));
    }
    let guess = target.to_f64().powf(1.0 / d as f64);
    let below = |z: &Rational| -> Result<bool> { Ok(z.pow(d)? <= target) };

    let (mut lo, mut hi) = if guess.is_finite() && guess > 0.0 {
        let z = Rational::from_f64_exact(guess)?;
        let zd = z.pow(d)?;
        if zd == target {
            return Ok(ApproxReal::new(guess, 0.0));
        }
        let mut delta = Rational::from_f64_exact(guess * 1e-12)?;
        loop {
            let lo = std::cmp::max(&z - &delta, Rational::zero());
            let hi = &z + &delta;
            if below(&lo)? && !below(&hi)? {
                break (lo, hi);
            }
            delta = &delta * Rational::from_integer(1024);
        }
    } else {
        // root lies between target and 1
        let one = Rational::one();
        (std::cmp::min(&target, &one).clone(), std::cmp::max(&target, &one).clone())
    };

    let half_tol = tol * Rational::frac(1, 2);
    while (&hi - &lo) * Rational::frac(1, 2) > half_tol {
        let mid = lo.midpoint(&hi);
        if below(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = lo.midpoint(&hi);
    let value = mid.to_f64();
    let half_width = ((&hi - &lo) * Rational::frac(1, 2)).to_f64();
    Ok(ApproxReal::new(value, half_width + value.abs() * f64::EPSILON))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(r("6/4").to_string(), "3/2");
        assert_eq!(r("-6/-4").to_string(), "3/2");
        assert_eq!(r("7").to_string(), "7");
        assert_eq!(r("0.25"), Rational::frac(1, 4));
        assert_eq!(r("1e-3"), Rational::frac(1, 1000));
        assert_eq!(r("-2.5E1"), Rational::from_integer(-25));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn big_fallback_round_trips() {
        let big = Rational::from_integer(i64::MAX);
        let sum = &big + &big;
        assert_eq!(sum.to_string(), "18446744073709551614");
        let back = &sum - &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(..)));
        let tiny = Rational::frac(1, i64::MAX);
        let sq = &tiny * &tiny;
        assert_eq!(&sq / &tiny, tiny);
        assert_eq!(Rational::from_integer(i64::MIN).abs().to_string(), "9223372036854775808");
    }

    #[test]
    fn extended_order_and_absorption() {
        let one = ExtRational::from(Rational::one());
        assert!(ExtRational::NegInf < one && one < ExtRational::PosInf);
        assert_eq!(one.checked_add(&ExtRational::PosInf), Some(ExtRational::PosInf));
        assert_eq!(ExtRational::PosInf.checked_add(&ExtRational::NegInf), None);
        assert_eq!("-inf".parse::<ExtRational>().unwrap(), ExtRational::NegInf);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(Rational::one().checked_div(&Rational::zero()).is_err());
        assert!(Rational::zero().recip().is_err());
    }

    #[test]
    fn pow_perfect_square() {
        let v = rational_pow(&r("4"), &r("1/2"), &r("1e-12")).unwrap();
        assert!((v.value - 2.0).abs() <= 1e-12);
        assert!(v.error_bound <= 1e-12);
    }

    #[test]
    fn pow_of_one_is_exact() {
        for e in ["1/3", "-7/2", "5"] {
            let v = rational_pow(&Rational::one(), &r(e), &r("1e-9")).unwrap();
            assert_eq!(v.value, 1.0);
            assert_eq!(v.error_bound, 0.0);
        }
    }

    #[test]
    fn pow_sqrt_two_against_bisection() {
        // independent bisection on z^2 = 2 in f64
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if m * m <= 2.0 {
                lo = m
            } else {
                hi = m
            }
        }
        let v = rational_pow(&r("2"), &r("1/2"), &r("1e-10")).unwrap();
        assert!((v.value - lo).abs() <= 1e-10);
        assert!(v.error_bound <= 1e-10);
    }

    #[test]
    fn pow_negative_and_fractional_exponents() {
        let v = rational_pow(&r("8"), &r("-2/3"), &r("1e-13")).unwrap();
        assert!((v.value - 0.25).abs() <= 1e-13);
        let v = rational_pow(&r("3/7"), &r("9/10"), &r("1e-13")).unwrap();
        assert!((v.value - (3.0f64 / 7.0).powf(0.9)).abs() <= 1e-12);
    }

    #[test]
    fn pow_errors() {
        assert!(matches!(rational_pow(&r("0"), &r("1/2"), &r("1e-3")), Err(Error::Domain(_))));
        assert!(matches!(rational_pow(&r("-1"), &r("1/2"), &r("1e-3")), Err(Error::Domain(_))));
        assert!(matches!(rational_pow(&r("2"), &r("1/2"), &r("0")), Err(Error::Argument(_))));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| Rational::frac(n, d))
    }

    proptest! {
        #[test]
        fn add_sub_and_mul_div_invert(a in arb_rational(), b in arb_rational()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a * &b) / &b, a.clone());
            }
        }

        #[test]
        fn trichotomy_and_normalization(a in arb_rational(), b in arb_rational()) {
            let lt = a < b;
            let eq = a == b;
            let gt = a > b;
            prop_assert_eq!(lt as u8 + eq as u8 + gt as u8, 1);
            let reparsed: Rational = a.to_string().parse().unwrap();
            prop_assert_eq!(reparsed, a.clone());
            prop_assert_eq!(a.to_big().cmp(&b.to_big()), a.cmp(&b));
        }

        #[test]
        fn pow_refinement_is_consistent(n in 1i64..1000, d in 1i64..50, en in -5i64..6, ed in 1i64..6) {
            let x = Rational::frac(n, d);
            let e = Rational::frac(en, ed);
            let tol = Rational::frac(1, 1_000_000_000);
            let coarse = rational_pow(&x, &e, &tol).unwrap();
            let fine = rational_pow(&x, &e, &(&tol / Rational::from_integer(10))).unwrap();
            prop_assert!((coarse.value - fine.value).abs() <= tol.to_f64());
        }
    }
}
