use std::fmt;

use num_traits::ToPrimitive;

use super::decimal::{format_sig, pow10, Decimal};
use super::dyadic::{Dyadic, Round};
use super::elementary;
use super::PrecisionError;

/// Outcome of a strict interval comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    CertifiedLess,
    CertifiedGreater,
    Inconclusive,
}

/// A closed interval `[lo, hi]` of dyadic endpoints, each rounded outward to
/// `precision_bits` significant bits. Every operation returns an interval
/// that encloses the exact result for all inputs inside its operands.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CertifiedInterval {
    lo: Dyadic,
    hi: Dyadic,
    precision_bits: u32,
}

impl CertifiedInterval {
    /// Builds `[lo, hi]`, rounding the endpoints outward to `prec` bits.
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Result<Self, PrecisionError> {
        if lo > hi {
            return Err(PrecisionError::Domain {
                op: "interval",
                detail: format!("lo {lo:?} exceeds hi {hi:?}"),
            });
        }
        Ok(Self::outward(lo, hi, prec))
    }

    pub(crate) fn outward(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        Self {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
            precision_bits: prec,
        }
    }

    pub fn point(x: Dyadic, prec: u32) -> Self {
        Self::outward(x.clone(), x, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::point(Dyadic::from_i64(v), prec)
    }

    /// Exact rational `num / den` enclosed at `prec` bits.
    pub fn from_ratio(num: i128, den: i128, prec: u32) -> Self {
        let n = Dyadic::from_bigint(num.into());
        let d = Dyadic::from_bigint(den.into());
        Self {
            lo: n.div(&d, prec, Round::Down),
            hi: n.div(&d, prec, Round::Up),
            precision_bits: prec,
        }
    }

    pub fn from_decimal(d: &Decimal, prec: u32) -> Self {
        Self {
            lo: d.to_dyadic(prec, Round::Down),
            hi: d.to_dyadic(prec, Round::Up),
            precision_bits: prec,
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Upper bound on `hi - lo`, exact unless the endpoints differ wildly in scale.
    pub fn width(&self) -> Dyadic {
        self.hi.add_dir(&self.lo.neg(), self.precision_bits + 8, Round::Up)
    }

    /// A point of the interval near its centre.
    pub fn midpoint(&self) -> Dyadic {
        // 2 lo and 2 hi are representable at this precision, so rounding
        // the sum down cannot leave [2 lo, 2 hi]
        let bits = self.lo.bits().max(self.hi.bits()).max(u64::from(self.precision_bits));
        let p = u32::try_from(bits + 2).unwrap_or(u32::MAX);
        self.lo.add_dir(&self.hi, p, Round::Down).shl(-1)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Exact containment test for a decimal value.
    pub fn contains_decimal(&self, d: &Decimal) -> bool {
        self.cmp_decimal_lo(d) && self.cmp_decimal_hi(d)
    }

    fn cmp_decimal_lo(&self, d: &Decimal) -> bool {
        // lo <= d
        let (n, den) = self.lo.to_ratio();
        let (dn, dd) = d.to_ratio();
        n * dd <= dn * den
    }

    fn cmp_decimal_hi(&self, d: &Decimal) -> bool {
        let (n, den) = self.hi.to_ratio();
        let (dn, dd) = d.to_ratio();
        dn * den <= n * dd
    }

    /// `hi <= d`, exactly.
    pub fn hi_le_decimal(&self, d: &Decimal) -> bool {
        let (n, den) = self.hi.to_ratio();
        let (dn, dd) = d.to_ratio();
        n * dd <= dn * den
    }

    /// `hi < d`, exactly.
    pub fn hi_lt_decimal(&self, d: &Decimal) -> bool {
        let (n, den) = self.hi.to_ratio();
        let (dn, dd) = d.to_ratio();
        n * dd < dn * den
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        if !self.overlaps(other) {
            return None;
        }
        Some(Self {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
            precision_bits: self.precision_bits.max(other.precision_bits),
        })
    }

    /// Re-rounds the endpoints outward to `prec` bits.
    pub fn with_precision(&self, prec: u32) -> Self {
        Self::outward(self.lo.clone(), self.hi.clone(), prec)
    }

    fn prec2(&self, other: &Self) -> u32 {
        self.precision_bits.max(other.precision_bits)
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            precision_bits: self.precision_bits,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.prec2(other);
        Self {
            lo: self.lo.add_dir(&other.lo, p, Round::Down),
            hi: self.hi.add_dir(&other.hi, p, Round::Up),
            precision_bits: p,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.prec2(other);
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return Self::outward(self.lo.mul(&other.lo), self.hi.mul(&other.hi), p);
        }
        let cands = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = cands.iter().min().cloned().unwrap_or_else(Dyadic::zero);
        let hi = cands.iter().max().cloned().unwrap_or_else(Dyadic::zero);
        Self::outward(lo, hi, p)
    }

    pub fn div(&self, other: &Self) -> Result<Self, PrecisionError> {
        if !other.lo.is_positive() && !other.hi.is_negative() {
            return Err(PrecisionError::Domain {
                op: "div",
                detail: "divisor interval contains zero".into(),
            });
        }
        let p = self.prec2(other);
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| a.div(b, p, Round::Down))
            .min()
            .unwrap_or_else(Dyadic::zero);
        let hi = pairs
            .iter()
            .map(|(a, b)| a.div(b, p, Round::Up))
            .max()
            .unwrap_or_else(Dyadic::zero);
        Ok(Self {
            lo,
            hi,
            precision_bits: p,
        })
    }

    pub fn recip(&self) -> Result<Self, PrecisionError> {
        Self::from_i64(1, self.precision_bits).div(self)
    }

    pub fn sqr(&self) -> Self {
        let a = self.lo.mul(&self.lo);
        let b = self.hi.mul(&self.hi);
        if !self.lo.is_positive() && !self.hi.is_negative() {
            Self::outward(Dyadic::zero(), a.max(b), self.precision_bits)
        } else {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            Self::outward(lo, hi, self.precision_bits)
        }
    }

    /// Magnitude upper bound `max(|lo|, |hi|)`.
    pub fn mag(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn sqrt(&self) -> Result<Self, PrecisionError> {
        if self.lo.is_negative() {
            return Err(PrecisionError::Domain {
                op: "sqrt",
                detail: "negative lower endpoint".into(),
            });
        }
        let p = self.precision_bits;
        Ok(Self {
            lo: self.lo.sqrt(p, Round::Down),
            hi: self.hi.sqrt(p, Round::Up),
            precision_bits: p,
        })
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: i64) -> Result<Self, PrecisionError> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut result = Self::from_i64(1, self.precision_bits);
        let mut base = self.clone();
        let mut k = n as u64;
        let mut first = true;
        while k > 0 {
            if k & 1 == 1 {
                result = if first { base.clone() } else { result.mul(&base) };
                first = false;
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr();
            }
        }
        Ok(result)
    }

    pub fn exp(&self) -> Self {
        elementary::exp(self)
    }

    pub fn ln(&self) -> Result<Self, PrecisionError> {
        elementary::ln(self)
    }

    /// Base-2 logarithm; exact for point powers of two.
    pub fn log2(&self) -> Result<Self, PrecisionError> {
        elementary::log2(self)
    }

    /// `self^exponent` for a positive base. Point integer exponents use
    /// repeated multiplication; everything else goes through `exp(y ln x)`.
    pub fn pow(&self, exponent: &Self) -> Result<Self, PrecisionError> {
        if !self.lo.is_positive() {
            return Err(PrecisionError::Domain {
                op: "pow",
                detail: "base must be strictly positive".into(),
            });
        }
        if exponent.is_point() && exponent.lo.is_integer() {
            if let Some(k) = exponent.lo.to_bigint().and_then(|b| b.to_i64()) {
                if k.abs() <= 1 << 20 {
                    let p = self.prec2(exponent);
                    return self.with_precision(p).powi(k);
                }
            }
        }
        elementary::pow(self, exponent)
    }

    /// Lower endpoint as a decimal string with `sig` significant digits,
    /// rounded down.
    pub fn lo_string(&self, sig: u32) -> String {
        format_sig(&self.lo, sig, Round::Down)
    }

    /// Upper endpoint as a decimal string with `sig` significant digits,
    /// rounded up.
    pub fn hi_string(&self, sig: u32) -> String {
        format_sig(&self.hi, sig, Round::Up)
    }

    /// `f64` bounds `(lo_down, hi_up)`.
    pub fn to_f64_bounds(&self) -> (f64, f64) {
        (self.lo.to_f64_dir(Round::Down), self.hi.to_f64_dir(Round::Up))
    }

    /// `hi - lo < 10^-digits`.
    pub fn width_below_decimal_digits(&self, digits: u32) -> bool {
        let (n, d) = self.width().to_ratio();
        n * pow10(digits) < d
    }
}

impl fmt::Debug for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]@{}",
            self.lo_string(30),
            self.hi_string(30),
            self.precision_bits
        )
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo_string(25), self.hi_string(25))
    }
}

/// Three-way strict comparison: `CertifiedLess` iff `a.hi < b.lo`,
/// `CertifiedGreater` iff `a.lo > b.hi`.
pub fn compare_strict(a: &CertifiedInterval, b: &CertifiedInterval) -> Comparison {
    if a.hi < b.lo {
        Comparison::CertifiedLess
    } else if a.lo > b.hi {
        Comparison::CertifiedGreater
    } else {
        Comparison::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: i64, hi: i64) -> CertifiedInterval {
        CertifiedInterval::new(Dyadic::from_i64(lo), Dyadic::from_i64(hi), 64).unwrap()
    }

    #[test]
    fn strict_comparison_cases() {
        assert_eq!(compare_strict(&iv(1, 2), &iv(3, 4)), Comparison::CertifiedLess);
        assert_eq!(compare_strict(&iv(3, 4), &iv(1, 2)), Comparison::CertifiedGreater);
        assert_eq!(compare_strict(&iv(1, 3), &iv(2, 4)), Comparison::Inconclusive);
        assert_eq!(compare_strict(&iv(1, 2), &iv(2, 4)), Comparison::Inconclusive);
    }

    #[test]
    fn rejects_inverted_endpoints() {
        assert!(CertifiedInterval::new(Dyadic::one(), Dyadic::zero(), 32).is_err());
    }

    #[test]
    fn mul_handles_signs() {
        let a = iv(-2, 3);
        let b = iv(-5, 1);
        let c = a.mul(&b);
        assert_eq!(c.lo(), &Dyadic::from_i64(-15));
        assert_eq!(c.hi(), &Dyadic::from_i64(10));
        assert_eq!(iv(-2, 3).sqr().lo(), &Dyadic::zero());
        assert_eq!(iv(-2, 3).sqr().hi(), &Dyadic::from_i64(9));
    }

    #[test]
    fn division_by_interval_containing_zero_fails() {
        assert!(iv(1, 2).div(&iv(-1, 1)).is_err());
        assert!(iv(1, 2).div(&iv(0, 0)).is_err());
        let q = iv(1, 1).div(&iv(3, 3)).unwrap();
        assert!(q.contains(&Dyadic::one().div(&Dyadic::from_i64(3), 100, Round::Down)));
    }

    #[test]
    fn powi_and_decimal_containment() {
        let x = CertifiedInterval::from_decimal(&"1.1".parse().unwrap(), 128);
        let x3 = x.powi(3).unwrap();
        assert!(x3.contains_decimal(&"1.331".parse().unwrap()));
        assert!(!x3.contains_decimal(&"1.3310001".parse().unwrap()));
        let inv = x.powi(-1).unwrap();
        assert!(inv.mul(&x).contains(&Dyadic::one()));
    }
}
