//! The Euler-Mascheroni constant, the doubling factors `D` and the other
//! fixed constants that appear in the bounds.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::decimal::Decimal;
use super::dyadic::{Dyadic, Round};
use super::elementary::{ln_point, pi};
use super::interval::CertifiedInterval;
use super::PrecisionError;

/// Scalar field of the multilinear forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldTag {
    Real,
    Complex,
}

impl FieldTag {
    pub const ALL: [FieldTag; 2] = [FieldTag::Real, FieldTag::Complex];

    pub fn as_str(self) -> &'static str {
        match self {
            FieldTag::Real => "real",
            FieldTag::Complex => "complex",
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(FieldTag::Real),
            "complex" | "c" => Ok(FieldTag::Complex),
            other => Err(format!("unknown field {other:?} (expected real or complex)")),
        }
    }
}

/// Euler-Mascheroni constant truncated (not rounded) to 320 fractional
/// digits, so gamma lies in `[GAMMA_DIGITS, GAMMA_DIGITS + 10^-320]`.
const GAMMA_DIGITS: &str = "0.\
57721566490153286060651209008240243104215933593992359880576723488486772677766467093694706329174674951463144724980708248096050401448654283622417399764492353625350033374293733773767394279259525824709491600873520394816567085323315177661152862119950150798479374508570574002992135478614669402960432542151905877553526733139925";

/// Largest precision the embedded gamma literal can honor:
/// `floor(320 * log2(10)) - 4`.
pub const GAMMA_MAX_BITS: u32 = 1059;

pub const MIN_CONSTANT_BITS: u32 = 32;

/// Bits used for the start-up cross-check (>= 40 decimal digits).
const CROSS_CHECK_BITS: u32 = 160;

static GAMMA_LITERAL: LazyLock<Decimal> =
    LazyLock::new(|| GAMMA_DIGITS.parse().expect("embedded gamma literal parses"));

static GAMMA_CROSS_CHECK: LazyLock<Result<(), String>> = LazyLock::new(|| {
    let series = gamma_series(CROSS_CHECK_BITS);
    let literal = literal_gamma(CROSS_CHECK_BITS);
    if !series.width_below_decimal_digits(40) {
        return Err(format!("series enclosure too wide: {series:?}"));
    }
    if !series.overlaps(&literal) {
        return Err(format!("literal {literal:?} disagrees with series {series:?}"));
    }
    Ok(())
});

fn literal_gamma(prec: u32) -> CertifiedInterval {
    let lit = &*GAMMA_LITERAL;
    let upper = lit.add(&lit.ulp());
    CertifiedInterval::outward(
        lit.to_dyadic(prec, Round::Down),
        upper.to_dyadic(prec, Round::Up),
        prec,
    )
}

fn check_precision(prec: u32) -> Result<(), PrecisionError> {
    if prec < MIN_CONSTANT_BITS {
        return Err(PrecisionError::PrecisionTooLow {
            min: MIN_CONSTANT_BITS,
            got: prec,
        });
    }
    if prec > GAMMA_MAX_BITS {
        return Err(PrecisionError::InsufficientDigits {
            requested: prec,
            available: GAMMA_MAX_BITS,
        });
    }
    Ok(())
}

/// Enclosure of the Euler-Mascheroni constant from the embedded literal.
/// The literal is checked once per process against [`gamma_series`].
pub fn euler_gamma(prec: u32) -> Result<CertifiedInterval, PrecisionError> {
    check_precision(prec)?;
    GAMMA_CROSS_CHECK
        .as_ref()
        .map_err(|e| PrecisionError::GammaCrossCheck(e.clone()))?;
    Ok(literal_gamma(prec))
}

/// Even-index Bernoulli numbers `B_0, B_2, ..., B_{2m}`.
fn bernoulli_even(m: usize) -> Vec<BigRational> {
    let top = 2 * m;
    let mut b: Vec<BigRational> = Vec::with_capacity(top + 1);
    b.push(BigRational::one());
    for n in 1..=top {
        // sum_{j<n} C(n+1, j) B_j = -(n+1) B_n
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                acc += bj * BigRational::from_integer(binom.clone());
            }
            binom = binom * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(n + 1)));
    }
    b.into_iter().step_by(2).collect()
}

fn rational_interval(r: &BigRational, prec: u32) -> CertifiedInterval {
    let n = Dyadic::from_bigint(r.numer().clone());
    let d = Dyadic::from_bigint(r.denom().clone());
    CertifiedInterval::outward(n.div(&d, prec, Round::Down), n.div(&d, prec, Round::Up), prec)
}

/// Independent enclosure of gamma by Euler-Maclaurin summation:
/// `gamma = H_N - ln N - 1/(2N) + sum_k B_2k / (2k N^2k)`, with the
/// remainder bounded by twice the first omitted term.
pub fn gamma_series(prec: u32) -> CertifiedInterval {
    let wp = prec + 32;
    let n = 2 * prec as i64 + 64;
    let mut harmonic = CertifiedInterval::from_i64(0, wp);
    for j in 1..=n {
        harmonic = harmonic.add(&CertifiedInterval::from_ratio(1, j.into(), wp));
    }
    let ln_n = ln_point(&Dyadic::from_i64(n), wp);
    let mut acc = harmonic
        .sub(&ln_n)
        .sub(&CertifiedInterval::from_ratio(1, 2 * i128::from(n), wp));

    let n2 = CertifiedInterval::from_i64(n * n, wp);
    let limit = -(wp as i64) - 4;
    // |B_2k| < 4 (2k)! / (2 pi)^2k gives a float estimate of how many terms we need
    let ln_target = (limit as f64 - 8.0) * std::f64::consts::LN_2;
    let ln_2pi_n = (2.0 * std::f64::consts::PI * n as f64).ln();
    let mut ln_fact = 0.0;
    let mut m = 1usize;
    loop {
        let k2 = 2 * m + 2;
        ln_fact += ((k2 - 1) as f64).ln() + (k2 as f64).ln();
        if 4f64.ln() + ln_fact - k2 as f64 * ln_2pi_n < ln_target {
            break;
        }
        m += 1;
    }
    loop {
        let bern = bernoulli_even(m + 1);
        let mut scaled = CertifiedInterval::from_i64(1, wp);
        let mut sum = CertifiedInterval::from_i64(0, wp);
        let mut done = false;
        for (k, b) in bern.iter().enumerate().skip(1) {
            scaled = scaled.div(&n2).expect("n > 0");
            let coeff = rational_interval(b, wp)
                .div(&CertifiedInterval::from_i64(2 * k as i64, wp))
                .expect("k > 0");
            let term = coeff.mul(&scaled);
            if term.mag().ilog2().is_none_or(|e| e < limit) {
                let bound = term.mag().shl(1);
                sum = sum.add(&CertifiedInterval::outward(bound.neg(), bound, wp));
                done = true;
                break;
            }
            sum = sum.add(&term);
        }
        if done {
            acc = acc.add(&sum);
            break;
        }
        m *= 2;
    }
    acc.with_precision(prec)
}

/// `sqrt(2)`.
pub fn sqrt2(prec: u32) -> CertifiedInterval {
    CertifiedInterval::from_i64(2, prec + 8)
        .sqrt()
        .expect("positive")
        .with_precision(prec)
}

/// `2 / sqrt(pi)`.
pub fn two_over_sqrt_pi(prec: u32) -> CertifiedInterval {
    let wp = prec + 16;
    let root = pi(wp).sqrt().expect("pi > 0");
    CertifiedInterval::from_i64(2, wp)
        .div(&root)
        .expect("pi > 0")
        .with_precision(prec)
}

type ConstCache = RwLock<HashMap<(FieldTag, u32), CertifiedInterval>>;
static D_CACHE: LazyLock<ConstCache> = LazyLock::new(Default::default);
static LOG2_D_CACHE: LazyLock<ConstCache> = LazyLock::new(Default::default);

fn cached(
    cache: &ConstCache,
    key: (FieldTag, u32),
    compute: impl FnOnce() -> Result<CertifiedInterval, PrecisionError>,
) -> Result<CertifiedInterval, PrecisionError> {
    if let Some(v) = cache.read().ok().and_then(|m| m.get(&key).cloned()) {
        return Ok(v);
    }
    let v = compute()?;
    if let Ok(mut m) = cache.write() {
        m.entry(key).or_insert_with(|| v.clone());
    }
    Ok(v)
}

/// The doubling factor of the recurrences: `e^(1 - gamma/2) / sqrt(2)` for
/// real scalars and `e^(1/2 - gamma/2)` for complex scalars.
pub fn d_constant(field: FieldTag, prec: u32) -> Result<CertifiedInterval, PrecisionError> {
    check_precision(prec)?;
    cached(&D_CACHE, (field, prec), || {
        let wp = (prec + 24).min(GAMMA_MAX_BITS);
        let half_gamma = euler_gamma(wp)?.mul(&CertifiedInterval::from_ratio(1, 2, wp));
        let d = match field {
            FieldTag::Real => {
                let e = CertifiedInterval::from_i64(1, wp).sub(&half_gamma).exp();
                e.div(&sqrt2(wp))?
            }
            FieldTag::Complex => CertifiedInterval::from_ratio(1, 2, wp).sub(&half_gamma).exp(),
        };
        Ok(d.with_precision(prec))
    })
}

/// `log2 D` for the given field.
pub fn log2_d(field: FieldTag, prec: u32) -> Result<CertifiedInterval, PrecisionError> {
    cached(&LOG2_D_CACHE, (field, prec), || {
        let wp = (prec + 24).min(GAMMA_MAX_BITS);
        Ok(d_constant(field, wp)?.log2()?.with_precision(prec))
    })
}

/// `exp(1/2)`.
pub fn sqrt_e(prec: u32) -> CertifiedInterval {
    CertifiedInterval::from_ratio(1, 2, prec).exp()
}
