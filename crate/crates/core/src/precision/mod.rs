//! Certified real arithmetic: dyadic intervals with outward rounding,
//! elementary functions with explicit series tails, and the constants the
//! bounds are built from.

mod constants;
mod decimal;
mod dyadic;
mod elementary;
mod interval;

pub use constants::{
    d_constant, euler_gamma, gamma_series, log2_d, sqrt2, sqrt_e, two_over_sqrt_pi, FieldTag,
    GAMMA_MAX_BITS, MIN_CONSTANT_BITS,
};
pub use decimal::{format_fixed, format_sig, round_half_even, Decimal};
pub use dyadic::{Dyadic, Round};
pub use elementary::{ln2, pi};
pub use interval::{compare_strict, CertifiedInterval, Comparison};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// Cap for automatic precision doubling on inconclusive comparisons.
pub const MAX_PRECISION: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrecisionError {
    #[error("malformed decimal numeral {0:?}")]
    Parse(String),
    #[error("{op}: argument outside the domain ({detail})")]
    Domain { op: &'static str, detail: String },
    #[error("insufficient digits: {requested} bits requested, embedded literal supports {available}")]
    InsufficientDigits { requested: u32, available: u32 },
    #[error("precision must be at least {min} bits, got {got}")]
    PrecisionTooLow { min: u32, got: u32 },
    #[error("embedded Euler-Mascheroni literal failed its cross-check: {0}")]
    GammaCrossCheck(String),
}

/// Parses a signed decimal numeral into an enclosing interval.
pub fn interval_from_decimal(s: &str, prec: u32) -> Result<CertifiedInterval, PrecisionError> {
    let d: Decimal = s.parse()?;
    Ok(CertifiedInterval::from_decimal(&d, prec))
}

/// `log2` of a positive interval.
pub fn log2_interval(x: &CertifiedInterval) -> Result<CertifiedInterval, PrecisionError> {
    x.log2()
}

/// `base^exponent` for a positive base.
pub fn pow_interval(
    base: &CertifiedInterval,
    exponent: &CertifiedInterval,
) -> Result<CertifiedInterval, PrecisionError> {
    base.pow(exponent)
}

/// Runs `attempt` at `start` bits, doubling on `None` (inconclusive) until
/// it yields a value or the next step would exceed [`MAX_PRECISION`].
/// Returns the value (if any) together with the last precision tried.
pub fn escalate<T, E>(
    start: u32,
    mut attempt: impl FnMut(u32) -> Result<Option<T>, E>,
) -> Result<(Option<T>, u32), E> {
    let mut prec = start.max(MIN_CONSTANT_BITS);
    loop {
        if let Some(v) = attempt(prec)? {
            return Ok((Some(v), prec));
        }
        if prec >= MAX_PRECISION {
            return Ok((None, prec));
        }
        prec = (prec * 2).min(MAX_PRECISION);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_enclosures() {
        let x = interval_from_decimal("1.338887", 128).unwrap();
        assert!(x.contains_decimal(&"1.338887".parse().unwrap()));
        let z = interval_from_decimal("0", 64).unwrap();
        assert!(z.is_point() && z.lo().is_zero());
        let e = interval_from_decimal("0.526322", 128).unwrap();
        assert!(e.width_below_decimal_digits(30));
        assert!(interval_from_decimal("0.52.6", 64).is_err());
    }

    #[test]
    fn decimal_width_bound() {
        // width <= 2^(1-p) |v|
        for (s, p) in [("0.1", 53u32), ("123.456", 80), ("-7.77", 128)] {
            let x = interval_from_decimal(s, p).unwrap();
            let v = Dyadic::from_f64(s.parse::<f64>().unwrap().abs()).unwrap();
            assert!(x.width() <= v.shl(1 - p as i64).mul(&Dyadic::from_f64(1.0001).unwrap()));
        }
    }

    #[test]
    fn escalation_stops_at_cap() {
        let mut seen = vec![];
        let (v, p) = escalate(128, |p| {
            seen.push(p);
            Ok::<Option<()>, ()>(None)
        })
        .unwrap();
        assert!(v.is_none());
        assert_eq!(p, MAX_PRECISION);
        assert_eq!(seen, vec![128, 256, 512, 1024]);
        let (v, p) = escalate(128, |p| Ok::<_, ()>((p >= 256).then_some(p))).unwrap();
        assert_eq!((v, p), (Some(256), 256));
    }
}
