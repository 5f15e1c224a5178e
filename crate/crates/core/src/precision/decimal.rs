//! Exact decimal numerals and directed dyadic-to-decimal conversion.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dyadic::{Dyadic, Round};
use super::PrecisionError;

/// A decimal numeral `digits * 10^-scale`, kept exactly as written (the
/// scale records how many fractional digits were printed).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decimal {
    digits: BigInt,
    scale: u32,
}

impl Decimal {
    pub fn new(digits: BigInt, scale: u32) -> Self {
        Self { digits, scale }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn digits(&self) -> &BigInt {
        &self.digits
    }

    /// Number of printed fractional digits.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.digits.is_negative()
    }

    /// One unit in the last printed place.
    pub fn ulp(&self) -> Decimal {
        Decimal::new(BigInt::one(), self.scale)
    }

    pub fn add(&self, other: &Decimal) -> Decimal {
        let scale = self.scale.max(other.scale);
        let a = &self.digits * pow10(scale - self.scale);
        let b = &other.digits * pow10(scale - other.scale);
        Decimal::new(a + b, scale)
    }

    /// Same value with trailing fractional zeros removed.
    pub fn normalized(&self) -> Decimal {
        let ten = BigInt::from(10);
        let mut digits = self.digits.clone();
        let mut scale = self.scale;
        while scale > 0 && (&digits % &ten).is_zero() {
            digits /= &ten;
            scale -= 1;
        }
        Decimal::new(digits, scale)
    }

    /// Exact rational value as `(num, den)` with `den = 10^scale`.
    pub fn to_ratio(&self) -> (BigInt, BigInt) {
        (self.digits.clone(), pow10(self.scale))
    }

    /// `self` rounded to `prec` bits in direction `dir`.
    pub fn to_dyadic(&self, prec: u32, dir: Round) -> Dyadic {
        let num = Dyadic::from_bigint(self.digits.clone());
        if self.scale == 0 {
            return num.round(prec, dir);
        }
        num.div(&Dyadic::from_bigint(pow10(self.scale)), prec, dir)
    }

    /// True iff the value is exactly representable as a dyadic.
    pub fn to_exact_dyadic(&self) -> Option<Dyadic> {
        let den = pow10(self.scale);
        let five = BigInt::from(5).pow(self.scale);
        let (q, r) = self.digits.div_rem(&five);
        debug_assert_eq!(&five << self.scale as usize, den);
        if r.is_zero() {
            Some(Dyadic::new(q, -(self.scale as i64)))
        } else {
            None
        }
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let scale = self.scale.max(other.scale);
        let a = &self.digits * pow10(scale - self.scale);
        let b = &other.digits * pow10(scale - other.scale);
        a.cmp(&b)
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for Decimal {
    type Err = PrecisionError;

    /// Accepts `[+-]digits[.digits][(e|E)[+-]digits]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PrecisionError::Parse(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (mantissa, exp10) = match body.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = body[i + 1..].parse().map_err(|_| bad())?;
                (&body[..i], e)
            }
            None => (body, 0),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((a, b)) => (a, b),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let all = format!("{int_part}{frac_part}");
        let mut digits = BigInt::parse_bytes(all.as_bytes(), 10).ok_or_else(bad)?;
        let mut scale = frac_part.len() as i64 - exp10;
        if scale < 0 {
            digits *= pow10((-scale) as u32);
            scale = 0;
        }
        if scale > u32::MAX as i64 {
            return Err(bad());
        }
        if neg {
            digits = -digits;
        }
        Ok(Decimal::new(digits, scale as u32))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fixed_point(&self.digits, self.scale))
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn pow10(k: u32) -> BigInt {
    BigInt::from(10).pow(k)
}

/// Formats `digits * 10^-scale` without exponent notation.
fn fixed_point(digits: &BigInt, scale: u32) -> String {
    let neg = digits.sign() == Sign::Minus;
    let mut s = digits.magnitude().to_str_radix(10);
    let scale = scale as usize;
    if scale > 0 {
        if s.len() <= scale {
            s = format!("{}{}", "0".repeat(scale + 1 - s.len()), s);
        }
        s.insert(s.len() - scale, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

fn div_dir(num: &BigInt, den: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => num.div_floor(den),
        Round::Up => -((-num).div_floor(den)),
    }
}

/// `x` written with `frac` fractional digits, rounded in direction `dir`.
pub fn format_fixed(x: &Dyadic, frac: u32, dir: Round) -> String {
    let (num, den) = x.to_ratio();
    let q = div_dir(&(num * pow10(frac)), &den, dir);
    fixed_point(&q, frac)
}

/// `x` with `sig` significant digits, rounded in direction `dir`, in plain
/// (non-exponent) notation.
pub fn format_sig(x: &Dyadic, sig: u32, dir: Round) -> String {
    assert!(sig > 0);
    if x.is_zero() {
        return "0".to_string();
    }
    let (num, den) = x.to_ratio();
    let mag = num.abs();
    // d = floor(log10 |x|), estimated then corrected exactly
    let log2 = x.ilog2().unwrap_or(0) as f64;
    let mut d = (log2 * std::f64::consts::LOG10_2).floor() as i64;
    let le = |d: i64| -> bool {
        // 10^d <= |x|
        if d >= 0 {
            &den * pow10(d as u32) <= mag
        } else {
            den.clone() <= &mag * pow10((-d) as u32)
        }
    };
    while !le(d) {
        d -= 1;
    }
    while le(d + 1) {
        d += 1;
    }
    let shift = sig as i64 - 1 - d;
    let (n2, d2) = if shift >= 0 {
        (num * pow10(shift as u32), den)
    } else {
        (num, den * pow10((-shift) as u32))
    };
    let mut q = div_dir(&n2, &d2, dir);
    let mut shift = shift;
    if q.abs() >= pow10(sig) {
        // rounding carried into a new digit
        q = div_dir(&q, &BigInt::from(10), dir);
        shift -= 1;
    }
    if shift >= 0 {
        fixed_point(&q, shift as u32)
    } else {
        fixed_point(&(q * pow10((-shift) as u32)), 0)
    }
}

/// Round-half-even of the exact value `x` to `frac` fractional digits.
pub fn round_half_even(x: &Dyadic, frac: u32) -> Decimal {
    let (num, den) = x.to_ratio();
    let scaled = num * pow10(frac);
    let (q, r) = scaled.div_mod_floor(&den);
    let twice: BigInt = &r * 2;
    let q = match twice.cmp(&den) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    };
    Decimal::new(q, frac)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn parses_and_prints() {
        assert_eq!(d("1.338887").to_string(), "1.338887");
        assert_eq!(d("-0.5").to_string(), "-0.5");
        assert_eq!(d("+12").to_string(), "12");
        assert_eq!(d(".25").to_string(), "0.25");
        assert_eq!(d("1.5e2").to_string(), "150");
        assert_eq!(d("15e-3").to_string(), "0.015");
        assert_eq!(d("0.99135458644").scale(), 11);
        for bad in ["", "abc", "1.2.3", "1e", "--1", "1,5", "."] {
            assert!(bad.parse::<Decimal>().is_err(), "{bad}");
        }
    }

    #[test]
    fn compares_across_scales() {
        assert!(d("1.30379") > d("1.303787"));
        assert_eq!(d("1.50").cmp(&d("1.5")), Ordering::Equal);
        assert_eq!(d("1.303787").add(&d("1.303787").ulp()), d("1.303788"));
        assert_eq!(d("4.000").normalized(), d("4"));
        assert_eq!(d("-0.0120").normalized(), d("-0.012"));
        assert_eq!(d("100").normalized(), d("100"));
    }

    #[test]
    fn exact_dyadic_detection() {
        assert_eq!(d("0.5").to_exact_dyadic(), Some(Dyadic::pow2(-1)));
        assert_eq!(d("-0.375").to_exact_dyadic(), Some(Dyadic::from_i64(-3).shl(-3)));
        assert_eq!(d("0.1").to_exact_dyadic(), None);
    }

    #[test]
    fn directed_formatting() {
        let third_lo = Dyadic::one().div(&Dyadic::from_i64(3), 200, Round::Down);
        assert_eq!(format_sig(&third_lo, 5, Round::Down), "0.33333");
        assert_eq!(format_sig(&third_lo, 5, Round::Up), "0.33334");
        assert_eq!(format_fixed(&third_lo, 3, Round::Down), "0.333");
        assert_eq!(format_sig(&Dyadic::from_i64(99999), 3, Round::Up), "100000");
        assert_eq!(format_sig(&Dyadic::from_i64(-1234), 2, Round::Down), "-1300");
        assert_eq!(format_sig(&Dyadic::pow2(-10), 3, Round::Down), "0.000976");
        assert_eq!(format_sig(&Dyadic::from_i64(1000), 4, Round::Down), "1000");
    }

    #[test]
    fn half_even_ties() {
        let x = Dyadic::from_i64(5).shl(-3); // 0.625
        assert_eq!(round_half_even(&x, 2).to_string(), "0.62");
        let y = Dyadic::from_i64(7).shl(-3); // 0.875
        assert_eq!(round_half_even(&y, 2).to_string(), "0.88");
        assert_eq!(round_half_even(&Dyadic::from_i64(-3).shl(-2), 1).to_string(), "-0.8");
    }
}
