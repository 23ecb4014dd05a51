//! Exact rational arithmetic and binary64 conversions.
//!
//! Everything the audit trusts is computed in [`Rational`] (arbitrary
//! precision, always in canonical form) or [`ExtendedRational`] (rationals
//! extended with `±∞` for bounds). Floating-point values enter the exact
//! world through [`Rational::from_f64`] (exact) or
//! [`reconstruct_rational`] (continued-fraction rounding to a small
//! denominator); they leave it through [`Rational::to_f64`], which rounds
//! to nearest, ties to even.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational number in canonical form: reduced, denominator
/// positive. Canonicality is maintained by construction (every constructor
/// and operation goes through [`num_rational::BigRational`], which reduces).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    /// `n / d`. Panics if `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "rational denominator must be nonzero");
        Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// `n / d` over big integers. Panics if `d == 0`.
    pub fn new_big(n: BigInt, d: BigInt) -> Self {
        assert!(!d.is_zero(), "rational denominator must be nonzero");
        Rational(BigRational::new(n, d))
    }

    /// The exact value of a finite binary64. Returns `None` for NaN and
    /// infinities.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Largest integer `≤ self`, as a rational.
    pub fn floor(&self) -> Self {
        Rational(self.0.floor())
    }

    /// Smallest integer `≥ self`, as a rational.
    pub fn ceil(&self) -> Self {
        Rational(self.0.ceil())
    }

    /// Nearest integer, ties away from zero.
    pub fn round_half_away(&self) -> Self {
        Rational(self.0.round())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Always renders as `p/q`, even for integers (`3` → `"3/1"`).
    pub fn to_fraction_string(&self) -> String {
        use alloc::format;
        format!("{}/{}", self.0.numer(), self.0.denom())
    }

    /// The nearest binary64, rounding ties to even. Values beyond the
    /// finite range map to `±∞`, values below the subnormal range to `±0`.
    pub fn to_f64(&self) -> f64 {
        let numer = self.0.numer();
        if numer.is_zero() {
            return 0.0;
        }
        let negative = numer.sign() == Sign::Minus;
        let magnitude = rational_magnitude_to_f64(numer.magnitude(), self.0.denom().magnitude());
        if negative {
            -magnitude
        } else {
            magnitude
        }
    }
}

/// Correctly rounded conversion of `a / q` (both positive) to binary64.
fn rational_magnitude_to_f64(a: &BigUint, q: &BigUint) -> f64 {
    // Scale so that `quot = floor(a·2^s / q)` carries 54 or 55 significant
    // bits: one or two rounding bits beyond the 53-bit target mantissa.
    let e2 = a.bits() as i64 - q.bits() as i64; // a/q ∈ [2^(e2-1), 2^(e2+1))
    let s = 54 - e2;
    let (scaled_num, scaled_den) = if s >= 0 {
        (a << s as u64, q.clone())
    } else {
        (a.clone(), q << (-s) as u64)
    };
    let (quot, rem) = scaled_num.div_rem(&scaled_den);
    let qbits = quot.bits() as i64; // 54 or 55
    let msb_exp = qbits - 1 - s; // exponent of the value's leading bit
    let mut ulp_exp = core::cmp::max(msb_exp - 52, -1074);
    let drop = (s + ulp_exp) as u64; // low bits of `quot` beyond the mantissa

    let mut mantissa = &quot >> drop;
    let round_bit = quot.bit(drop - 1);
    let sticky = !rem.is_zero() || {
        let below_round = &quot & ((BigUint::one() << (drop - 1)) - BigUint::one());
        !below_round.is_zero()
    };
    if round_bit && (sticky || mantissa.bit(0)) {
        mantissa += 1u32;
        if mantissa.bits() == 54 {
            mantissa >>= 1;
            ulp_exp += 1;
        }
    }
    if ulp_exp > 1023 - 52 {
        return f64::INFINITY;
    }
    let m = mantissa.to_u64().expect("53-bit mantissa fits in u64");
    if m == 0 {
        0.0
    } else if m < (1 << 52) {
        debug_assert_eq!(ulp_exp, -1074);
        f64::from_bits(m)
    } else {
        let biased = (ulp_exp + 52 + 1023) as u64;
        debug_assert!((1..=2046).contains(&biased));
        f64::from_bits((biased << 52) | (m & ((1 << 52) - 1)))
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);
impl_binop!(Div, div);

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

impl SubAssign<Rational> for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
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
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
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

impl FromStr for Rational {
    type Err = ParseRationalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s)
    }
}

/// Error from [`parse_rational`] / `Rational::from_str`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    Empty,
    InvalidCharacter,
    MissingDigits,
    ZeroDenominator,
    ExponentOutOfRange,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseRationalError::Empty => write!(f, "empty numeric literal"),
            ParseRationalError::InvalidCharacter => write!(f, "invalid character in numeric literal"),
            ParseRationalError::MissingDigits => write!(f, "numeric literal has no digits"),
            ParseRationalError::ZeroDenominator => write!(f, "fraction literal has zero denominator"),
            ParseRationalError::ExponentOutOfRange => write!(f, "decimal exponent out of supported range"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseRationalError {}

/// Parses a numeric literal exactly: a fraction `p/q`, an integer, or a
/// decimal with optional scientific exponent (`"0.1"` → 1/10, `"1e-6"` →
/// 1/1000000). No rounding is involved.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_signed_integer(num)?;
        let d = parse_signed_integer(den)?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator);
        }
        return Ok(Rational(BigRational::new(n, d)));
    }
    parse_decimal(s)
}

fn parse_signed_integer(s: &str) -> Result<BigInt, ParseRationalError> {
    let (sign, digits) = split_sign(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::InvalidCharacter);
    }
    let magnitude = BigUint::from_radix_be(
        &digits.bytes().map(|b| b - b'0').collect::<Vec<_>>(),
        10,
    )
    .ok_or(ParseRationalError::InvalidCharacter)?;
    Ok(BigInt::from_biguint(
        if sign < 0 { Sign::Minus } else { Sign::Plus },
        magnitude,
    ))
}

fn split_sign(s: &str) -> (i32, &str) {
    match s.as_bytes().first() {
        Some(b'-') => (-1, &s[1..]),
        Some(b'+') => (1, &s[1..]),
        _ => (1, s),
    }
}

fn parse_decimal(s: &str) -> Result<Rational, ParseRationalError> {
    let (sign, rest) = split_sign(s);
    let (mantissa_str, exp_str) = match rest.find(['e', 'E']) {
        Some(pos) => (&rest[..pos], Some(&rest[pos + 1..])),
        None => (rest, None),
    };
    let (int_part, frac_part) = match mantissa_str.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa_str, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(ParseRationalError::MissingDigits);
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::InvalidCharacter);
    }
    let mut exponent: i64 = 0;
    if let Some(e) = exp_str {
        let (esign, edigits) = split_sign(e);
        if edigits.is_empty() || !edigits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError::InvalidCharacter);
        }
        let magnitude: i64 = edigits
            .parse()
            .map_err(|_| ParseRationalError::ExponentOutOfRange)?;
        if magnitude > 10_000 {
            return Err(ParseRationalError::ExponentOutOfRange);
        }
        exponent = esign as i64 * magnitude;
    }
    let digits: Vec<u8> = int_part
        .bytes()
        .chain(frac_part.bytes())
        .map(|b| b - b'0')
        .collect();
    let mantissa = if digits.is_empty() {
        BigUint::zero()
    } else {
        BigUint::from_radix_be(&digits, 10).ok_or(ParseRationalError::InvalidCharacter)?
    };
    let mantissa = BigInt::from_biguint(if sign < 0 { Sign::Minus } else { Sign::Plus }, mantissa);
    let scale = exponent - frac_part.len() as i64;
    let value = if scale >= 0 {
        BigRational::from_integer(mantissa * BigInt::from(10u32).pow(scale as u32))
    } else {
        BigRational::new(mantissa, BigInt::from(10u32).pow((-scale) as u32))
    };
    Ok(Rational(value))
}

/// Rationals extended with `±∞`, used for variable bounds and dual-bound
/// values. The derived ordering is `-∞ < finite < +∞`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtendedRational {
    NegInf,
    Finite(Rational),
    PosInf,
}

/// Indeterminate extended-rational operation. These are hard errors by
/// design: the audit must never paper over `∞ − ∞` or `0 · ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithmeticError {
    InfMinusInf,
    ZeroTimesInf,
}

impl fmt::Display for ArithmeticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithmeticError::InfMinusInf => write!(f, "indeterminate sum of opposite infinities"),
            ArithmeticError::ZeroTimesInf => write!(f, "indeterminate product of zero and infinity"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ArithmeticError {}

impl ExtendedRational {
    pub fn zero() -> Self {
        ExtendedRational::Finite(Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        ExtendedRational::Finite(Rational::from_int(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRational::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(r) => Some(r),
            _ => None,
        }
    }

    /// Exact value of a binary64, with `±∞` mapping to the infinities.
    /// Returns `None` for NaN.
    pub fn from_f64(x: f64) -> Option<Self> {
        if x.is_nan() {
            None
        } else if x == f64::INFINITY {
            Some(ExtendedRational::PosInf)
        } else if x == f64::NEG_INFINITY {
            Some(ExtendedRational::NegInf)
        } else {
            Rational::from_f64(x).map(ExtendedRational::Finite)
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedRational::NegInf => f64::NEG_INFINITY,
            ExtendedRational::Finite(r) => r.to_f64(),
            ExtendedRational::PosInf => f64::INFINITY,
        }
    }

    pub fn checked_add(&self, rhs: &ExtendedRational) -> Result<ExtendedRational, ArithmeticError> {
        use ExtendedRational::*;
        match (self, rhs) {
            (NegInf, PosInf) | (PosInf, NegInf) => Err(ArithmeticError::InfMinusInf),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
        }
    }

    pub fn checked_sub(&self, rhs: &ExtendedRational) -> Result<ExtendedRational, ArithmeticError> {
        self.checked_add(&(-rhs))
    }

    pub fn checked_mul(&self, rhs: &ExtendedRational) -> Result<ExtendedRational, ArithmeticError> {
        use ExtendedRational::*;
        let sign = |e: &ExtendedRational| match e {
            NegInf => -1,
            PosInf => 1,
            Finite(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        };
        match (self, rhs) {
            (Finite(a), Finite(b)) => Ok(Finite(a * b)),
            (a, b) => {
                let (sa, sb) = (sign(a), sign(b));
                if sa == 0 || sb == 0 {
                    Err(ArithmeticError::ZeroTimesInf)
                } else if sa * sb > 0 {
                    Ok(PosInf)
                } else {
                    Ok(NegInf)
                }
            }
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Neg for &ExtendedRational {
    type Output = ExtendedRational;
    fn neg(self) -> ExtendedRational {
        match self {
            ExtendedRational::NegInf => ExtendedRational::PosInf,
            ExtendedRational::PosInf => ExtendedRational::NegInf,
            ExtendedRational::Finite(r) => ExtendedRational::Finite(-r),
        }
    }
}

impl Neg for ExtendedRational {
    type Output = ExtendedRational;
    fn neg(self) -> ExtendedRational {
        -&self
    }
}

impl From<Rational> for ExtendedRational {
    fn from(r: Rational) -> Self {
        ExtendedRational::Finite(r)
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::NegInf => write!(f, "-inf"),
            ExtendedRational::Finite(r) => write!(f, "{r}"),
            ExtendedRational::PosInf => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtendedRational {
    type Err = ParseRationalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(ExtendedRational::PosInf),
            "-inf" | "-infinity" => Ok(ExtendedRational::NegInf),
            _ => parse_rational(s).map(ExtendedRational::Finite),
        }
    }
}

/// Rounds a finite binary64 to the rational with the smallest representation
/// near it: the last continued-fraction convergent of the exact value of `x`
/// whose denominator does not exceed `max_denominator`.
///
/// The expansion runs on the exact rational value of `x` via the extended
/// Euclidean algorithm, so the result is itself exact. Returns `None` when
/// `x` is NaN or infinite.
pub fn reconstruct_rational(x: f64, max_denominator: u64) -> Option<Rational> {
    let exact = Rational::from_f64(x)?;
    let max_den = BigInt::from(max_denominator.max(1));

    let mut num = exact.numer().clone();
    let mut den = exact.denom().clone();
    // Convergents h/k with seeds h_{-2}/k_{-2} = 0/1, h_{-1}/k_{-1} = 1/0.
    let (mut h_prev, mut k_prev) = (BigInt::zero(), BigInt::one());
    let (mut h, mut k) = (BigInt::one(), BigInt::zero());
    loop {
        let (a, r) = num.div_mod_floor(&den);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        if k_next > max_den {
            // First convergent k_0 = 1 always fits, so h/k is valid here.
            return Some(Rational::new_big(h, k));
        }
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
        if r.is_zero() {
            return Some(Rational::new_big(h, k));
        }
        num = den;
        den = r;
    }
}
