//! Number systems a tensor network can be evaluated in.
//!
//! Every network is parameterised by one [`Scalar`] type, so mixing number
//! systems inside a contraction is a type error rather than a runtime one.
//! Four systems are provided:
//!
//! * [`BigInt`]: exact integers, used for deterministic Boolean checkers where
//!   the contraction value is directly a solution count.
//! * [`Dyadic`]: exact rationals with power-of-two denominators. Folded
//!   probability counters of permutation circuits only ever produce these,
//!   because every `1/√2` from a `|+⟩` input meets its conjugate partner.
//! * [`C64`]: complex doubles for general quantum checkers.
//! * `f64`: real doubles.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64 as C64;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Tag for the number system of a scalar type.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum NumberSystem {
    Integer,
    Dyadic,
    Real,
    Complex,
}

impl Display for NumberSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Integer => "integer",
            Self::Dyadic => "dyadic",
            Self::Real => "real",
            Self::Complex => "complex",
        };
        f.write_str(name)
    }
}

/// Why a contraction value could not be read as a solution count.
#[derive(Clone, Debug, PartialEq)]
pub enum CountReadout {
    /// The value is negative beyond tolerance.
    Negative(f64),
    /// The scaled value is too far from an integer.
    Residue(f64),
}

/// Arithmetic required of tensor components.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const SYSTEM: NumberSystem;

    fn conj(&self) -> Self;

    /// `self += a * b`.
    fn mul_add_assign(&mut self, a: &Self, b: &Self);

    fn from_i64(v: i64) -> Self;

    /// `1/2`, when the system can represent it.
    fn half() -> Option<Self>;

    /// `1/√2`, when the system can represent it.
    fn frac_1_sqrt_2() -> Option<Self>;

    /// Converts a complex number whose value is representable exactly.
    /// Exact systems accept only integers.
    fn from_c64(c: C64) -> Option<Self>;

    fn to_c64(&self) -> C64;

    /// `|self|²`.
    fn abs_sqr(&self) -> Self {
        self.clone() * self.conj()
    }

    /// Equality for exact systems; relative closeness for floats.
    fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        let (a, b) = (self.to_c64(), other.to_c64());
        let scale = a.norm().max(b.norm()).max(1.0);
        (a - b).norm() <= rel_tol * scale
    }

    /// Reads `self · 2^shift` as a non-negative integer.
    fn scaled_count(&self, shift: u32, tol: f64) -> Result<BigUint, CountReadout> {
        float_count(self.to_c64(), shift, tol)
    }

    /// Text form used by the tensor fixture format.
    fn to_text(&self) -> String;

    fn parse_text(s: &str) -> Option<Self>;
}

fn float_count(v: C64, shift: u32, tol: f64) -> Result<BigUint, CountReadout> {
    if v.re < -1e-9 {
        return Err(CountReadout::Negative(v.re));
    }
    let scaled = v.re * 2f64.powi(shift as i32);
    let rounded = scaled.round();
    let residue = (scaled - rounded).abs().max(v.im.abs() * 2f64.powi(shift as i32));
    if residue >= tol {
        return Err(CountReadout::Residue(residue));
    }
    Ok(BigUint::from_f64(rounded.max(0.0)).unwrap_or_default())
}

impl Scalar for f64 {
    const SYSTEM: NumberSystem = NumberSystem::Real;

    fn conj(&self) -> Self {
        *self
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn half() -> Option<Self> {
        Some(0.5)
    }

    fn frac_1_sqrt_2() -> Option<Self> {
        Some(std::f64::consts::FRAC_1_SQRT_2)
    }

    fn from_c64(c: C64) -> Option<Self> {
        (c.im == 0.0).then_some(c.re)
    }

    fn to_c64(&self) -> C64 {
        C64::new(*self, 0.0)
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }

    fn parse_text(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl Scalar for C64 {
    const SYSTEM: NumberSystem = NumberSystem::Complex;

    fn conj(&self) -> Self {
        C64::conj(self)
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }

    fn half() -> Option<Self> {
        Some(C64::new(0.5, 0.0))
    }

    fn frac_1_sqrt_2() -> Option<Self> {
        Some(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
    }

    fn from_c64(c: C64) -> Option<Self> {
        Some(c)
    }

    fn to_c64(&self) -> C64 {
        *self
    }

    fn abs_sqr(&self) -> Self {
        C64::new(self.norm_sqr(), 0.0)
    }

    fn to_text(&self) -> String {
        format!("{:?}{:+?}i", self.re, self.im)
    }

    fn parse_text(s: &str) -> Option<Self> {
        parse_complex(s)
    }
}

impl Scalar for BigInt {
    const SYSTEM: NumberSystem = NumberSystem::Integer;

    fn conj(&self) -> Self {
        self.clone()
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self += a * b;
    }

    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }

    fn half() -> Option<Self> {
        None
    }

    fn frac_1_sqrt_2() -> Option<Self> {
        None
    }

    fn from_c64(c: C64) -> Option<Self> {
        (c.im == 0.0 && c.re.fract() == 0.0 && c.re.is_finite())
            .then(|| BigInt::from_f64(c.re))
            .flatten()
    }

    fn to_c64(&self) -> C64 {
        C64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn approx_eq(&self, other: &Self, _rel_tol: f64) -> bool {
        self == other
    }

    fn scaled_count(&self, shift: u32, _tol: f64) -> Result<BigUint, CountReadout> {
        if self.is_negative() {
            return Err(CountReadout::Negative(self.to_f64().unwrap_or(f64::NEG_INFINITY)));
        }
        Ok(self.magnitude() << shift)
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn parse_text(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i` (and the `j` suffix).
pub fn parse_complex(s: &str) -> Option<C64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().ok().map(|re| C64::new(re, 0.0));
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let imag = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse().ok(),
        }
    };
    match split {
        Some(k) => Some(C64::new(body[..k].parse().ok()?, imag(&body[k..])?)),
        None => Some(C64::new(0.0, imag(body)?)),
    }
}

/// Exact rational `numerator / 2^exponent`, kept in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn new(numerator: impl Into<BigInt>, exponent: u32) -> Self {
        let mut d = Dyadic {
            numerator: numerator.into(),
            exponent,
        };
        d.normalise();
        d
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    /// Denominator is `2^exponent`.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    fn normalise(&mut self) {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return;
        }
        let twos = self.numerator.trailing_zeros().unwrap_or(0) as u32;
        let k = twos.min(self.exponent);
        if k > 0 {
            self.numerator >>= k;
            self.exponent -= k;
        }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let e = self.exponent.max(other.exponent);
        (
            &self.numerator << (e - self.exponent),
            &other.numerator << (e - other.exponent),
            e,
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(self.exponent as i32))
    }
}

impl Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

impl Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, BigUint::one() << self.exponent)
        }
    }
}

impl FromStr for Dyadic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigInt = num.trim().parse().map_err(|e| format!("{e}"))?;
        let den: BigUint = den.trim().parse().map_err(|e| format!("{e}"))?;
        if den.is_zero() || den.count_ones() != 1 {
            return Err(format!("denominator {den} is not a power of two"));
        }
        let exponent = den.trailing_zeros().unwrap_or(0) as u32;
        Ok(Dyadic::new(num, exponent))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Self) -> Self::Output {
        let (a, b, e) = self.aligned(&rhs);
        Dyadic::new(a + b, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: Self) -> Self::Output {
        let (a, b, e) = self.aligned(&rhs);
        Dyadic::new(a - b, e)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: Self) -> Self::Output {
        Dyadic::new(self.numerator * rhs.numerator, self.exponent + rhs.exponent)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Self::Output {
        Dyadic {
            numerator: -self.numerator,
            exponent: self.exponent,
        }
    }
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Dyadic {
            numerator: BigInt::zero(),
            exponent: 0,
        }
    }

    fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Dyadic {
            numerator: BigInt::one(),
            exponent: 0,
        }
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::new(v, 0)
    }
}

impl Scalar for Dyadic {
    const SYSTEM: NumberSystem = NumberSystem::Dyadic;

    fn conj(&self) -> Self {
        self.clone()
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let prod = a.clone() * b.clone();
        *self = std::mem::take(self) + prod;
    }

    fn from_i64(v: i64) -> Self {
        Dyadic::from(v)
    }

    fn half() -> Option<Self> {
        Some(Dyadic::new(1, 1))
    }

    fn frac_1_sqrt_2() -> Option<Self> {
        None
    }

    fn from_c64(c: C64) -> Option<Self> {
        BigInt::from_c64(c).map(|n| Dyadic::new(n, 0))
    }

    fn to_c64(&self) -> C64 {
        C64::new(self.to_f64(), 0.0)
    }

    fn approx_eq(&self, other: &Self, _rel_tol: f64) -> bool {
        self == other
    }

    fn scaled_count(&self, shift: u32, _tol: f64) -> Result<BigUint, CountReadout> {
        if self.numerator.sign() == Sign::Minus {
            return Err(CountReadout::Negative(self.to_f64()));
        }
        if self.exponent > shift {
            let scaled = self.to_f64() * 2f64.powi(shift as i32);
            return Err(CountReadout::Residue((scaled - scaled.round()).abs()));
        }
        Ok(self.numerator.magnitude() << (shift - self.exponent))
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn parse_text(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_normalises() {
        let d = Dyadic::new(4, 3);
        assert_eq!(d.numerator(), &BigInt::from(1));
        assert_eq!(d.exponent(), 1);
        assert_eq!(Dyadic::new(0, 9).exponent(), 0);
        assert_eq!(d.to_string(), "1/2");
    }

    #[test]
    fn dyadic_arithmetic_is_exact() {
        let half = Dyadic::half().unwrap();
        let quarter = half.clone() * half.clone();
        assert_eq!(quarter.to_string(), "1/4");
        assert_eq!(quarter.clone() + quarter.clone(), half);
        assert_eq!(half.clone() - quarter.clone(), quarter);
        assert!(Dyadic::new(3, 2) > half);
        let mut acc = Dyadic::zero();
        for _ in 0..4 {
            acc.mul_add_assign(&half, &half);
        }
        assert_eq!(acc, Dyadic::one());
    }

    #[test]
    fn dyadic_parses_its_own_text() {
        for s in ["0", "-3", "5/8", "-7/1024"] {
            let d: Dyadic = s.parse().unwrap();
            assert_eq!(d.to_text(), s);
        }
        assert!("1/3".parse::<Dyadic>().is_err());
    }

    #[test]
    fn dyadic_scaled_count() {
        let p = Dyadic::new(3, 4);
        assert_eq!(p.scaled_count(4, 0.0).unwrap(), BigUint::from(3u8));
        assert_eq!(p.scaled_count(6, 0.0).unwrap(), BigUint::from(12u8));
        assert!(matches!(p.scaled_count(3, 0.0), Err(CountReadout::Residue(_))));
    }

    #[test]
    fn float_count_checks_residue_and_sign() {
        assert_eq!(0.25f64.scaled_count(2, 1e-6).unwrap(), BigUint::from(1u8));
        assert!(matches!(0.3f64.scaled_count(2, 1e-6), Err(CountReadout::Residue(_))));
        assert!(matches!((-0.5f64).scaled_count(0, 1e-6), Err(CountReadout::Negative(_))));
        // small negative noise is tolerated
        assert_eq!((-1e-12f64).scaled_count(0, 1e-6).unwrap(), BigUint::zero());
    }

    #[test]
    fn exact_systems_reject_irrational_entries() {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        assert!(BigInt::from_c64(h).is_none());
        assert!(Dyadic::from_c64(h).is_none());
        assert!(BigInt::from_c64(C64::new(0.0, 1.0)).is_none());
        assert_eq!(BigInt::from_c64(C64::new(-1.0, 0.0)), Some(BigInt::from(-1)));
    }

    #[test]
    fn complex_text_forms() {
        assert_eq!(parse_complex("1"), Some(C64::new(1.0, 0.0)));
        assert_eq!(parse_complex("-i"), Some(C64::new(0.0, -1.0)));
        assert_eq!(parse_complex("0.5+0.5i"), Some(C64::new(0.5, 0.5)));
        assert_eq!(parse_complex("1e-3-2i"), Some(C64::new(1e-3, -2.0)));
        assert_eq!(parse_complex("2.5i"), Some(C64::new(0.0, 2.5)));
        assert_eq!(parse_complex("x"), None);
        let z = C64::new(-0.25, 3.0);
        assert_eq!(C64::parse_text(&z.to_text()), Some(z));
    }
}
