//! Enclosures of exp, ln, pi and friends via truncated series with
//! explicit tail bounds. Every series is summed in interval arithmetic at
//! a working precision above the caller's, then rounded outward.

use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

use super::dyadic::{Dyadic, Round};
use super::interval::CertifiedInterval;
use super::PrecisionError;

const GUARD_BITS: u32 = 24;

type Cache = RwLock<HashMap<u32, CertifiedInterval>>;

static LN2_CACHE: LazyLock<Cache> = LazyLock::new(Default::default);
static PI_CACHE: LazyLock<Cache> = LazyLock::new(Default::default);

fn cached(cache: &Cache, prec: u32, compute: impl FnOnce(u32) -> CertifiedInterval) -> CertifiedInterval {
    if let Some(v) = cache.read().ok().and_then(|m| m.get(&prec).cloned()) {
        return v;
    }
    let v = compute(prec);
    if let Ok(mut m) = cache.write() {
        m.entry(prec).or_insert_with(|| v.clone());
    }
    v
}

fn bit_len(v: u64) -> u32 {
    64 - v.leading_zeros()
}

/// Symmetric tail interval `[-2m, 2m]` for a term of magnitude at most `m`.
fn tail(m: &Dyadic, prec: u32) -> CertifiedInterval {
    let t = m.shl(1);
    CertifiedInterval::outward(t.neg(), t, prec)
}

fn negligible(term: &CertifiedInterval, wp: u32) -> bool {
    let m = term.mag();
    m.is_zero() || m.ilog2().unwrap_or(0) < -(wp as i64) - 2
}

/// Enclosure of `exp(x)` for an exact `x`, at `prec` bits.
pub(crate) fn exp_point(x: &Dyadic, prec: u32) -> CertifiedInterval {
    if x.is_zero() {
        return CertifiedInterval::from_i64(1, prec);
    }
    // reduce to |r| <= 2^-8, then square back up
    let lg = x.ilog2().unwrap_or(0);
    let s = (lg + 9).max(0) as u32;
    let wp = prec + GUARD_BITS + s + bit_len(prec as u64);
    let r = CertifiedInterval::point(x.shl(-(s as i64)), wp);
    let mut sum = CertifiedInterval::from_i64(1, wp);
    let mut term = CertifiedInterval::from_i64(1, wp);
    let mut k: i64 = 1;
    loop {
        term = term
            .mul(&r)
            .div(&CertifiedInterval::from_i64(k, wp))
            .expect("k > 0");
        if negligible(&term, wp) {
            // tail from this term on is at most twice its magnitude since |r| <= 1/2
            sum = sum.add(&tail(&term.mag(), wp));
            break;
        }
        sum = sum.add(&term);
        k += 1;
    }
    for _ in 0..s {
        sum = sum.sqr();
    }
    sum.with_precision(prec)
}

/// `atanh(t)` for an interval `t` with `|t| <= 1/2`.
fn atanh_series(t: &CertifiedInterval, wp: u32) -> CertifiedInterval {
    let t2 = t.sqr();
    let mut power = t.clone();
    let mut sum = t.clone();
    let mut j: i64 = 1;
    loop {
        power = power.mul(&t2);
        let term = power
            .div(&CertifiedInterval::from_i64(2 * j + 1, wp))
            .expect("odd divisor");
        if negligible(&term, wp) {
            // geometric tail with ratio t^2 <= 1/4
            sum = sum.add(&tail(&term.mag(), wp));
            break;
        }
        sum = sum.add(&term);
        j += 1;
    }
    sum
}

fn compute_ln2(prec: u32) -> CertifiedInterval {
    let wp = prec + GUARD_BITS;
    let third = CertifiedInterval::from_ratio(1, 3, wp);
    atanh_series(&third, wp).mul(&CertifiedInterval::from_i64(2, wp)).with_precision(prec)
}

/// Enclosure of ln 2.
pub fn ln2(prec: u32) -> CertifiedInterval {
    cached(&LN2_CACHE, prec, compute_ln2)
}

/// Enclosure of `ln(x)` for an exact positive `x`.
pub(crate) fn ln_point(x: &Dyadic, prec: u32) -> CertifiedInterval {
    debug_assert!(x.is_positive());
    if *x == Dyadic::one() {
        return CertifiedInterval::from_i64(0, prec);
    }
    let mut e = x.ilog2().unwrap_or(0);
    let mut m = x.shl(-e);
    // m in [1, 2); move to [3/4, 3/2) so that |t| <= 1/5
    if m > Dyadic::from_i64(3).shl(-1) {
        m = m.shl(-1);
        e += 1;
    }
    let wp = prec + GUARD_BITS + bit_len(e.unsigned_abs());
    let one = Dyadic::one();
    let num = m.sub(&one);
    let den = m.add(&one);
    let t = CertifiedInterval::outward(
        num.div(&den, wp, Round::Down),
        num.div(&den, wp, Round::Up),
        wp,
    );
    let ln_m = if num.is_zero() {
        CertifiedInterval::from_i64(0, wp)
    } else {
        atanh_series(&t, wp).mul(&CertifiedInterval::from_i64(2, wp))
    };
    let scaled = ln2(wp).mul(&CertifiedInterval::from_i64(e, wp));
    scaled.add(&ln_m).with_precision(prec)
}

/// `atan(1/k)` for an integer `k >= 2`; alternating series, tail bounded
/// by the first omitted term.
fn atan_inv(k: i64, wp: u32) -> CertifiedInterval {
    let kk = CertifiedInterval::from_i64(k * k, wp);
    let mut power = CertifiedInterval::from_ratio(1, k.into(), wp);
    let mut sum = power.clone();
    let mut j: i64 = 1;
    loop {
        power = power.div(&kk).expect("k != 0");
        let term = power
            .div(&CertifiedInterval::from_i64(2 * j + 1, wp))
            .expect("odd divisor");
        if negligible(&term, wp) {
            let m = term.mag();
            sum = sum.add(&CertifiedInterval::outward(m.neg(), m, wp));
            break;
        }
        sum = if j % 2 == 1 { sum.sub(&term) } else { sum.add(&term) };
        j += 1;
    }
    sum
}

fn compute_pi(prec: u32) -> CertifiedInterval {
    let wp = prec + GUARD_BITS;
    let a = atan_inv(5, wp).mul(&CertifiedInterval::from_i64(16, wp));
    let b = atan_inv(239, wp).mul(&CertifiedInterval::from_i64(4, wp));
    a.sub(&b).with_precision(prec)
}

/// Enclosure of pi (Machin's formula).
pub fn pi(prec: u32) -> CertifiedInterval {
    cached(&PI_CACHE, prec, compute_pi)
}

pub(crate) fn exp(x: &CertifiedInterval) -> CertifiedInterval {
    let p = x.precision_bits();
    let lo = exp_point(x.lo(), p);
    if x.is_point() {
        return lo;
    }
    let hi = exp_point(x.hi(), p);
    CertifiedInterval::outward(lo.lo().clone(), hi.hi().clone(), p)
}

pub(crate) fn ln(x: &CertifiedInterval) -> Result<CertifiedInterval, PrecisionError> {
    if !x.lo().is_positive() {
        return Err(PrecisionError::Domain {
            op: "ln",
            detail: "argument must be strictly positive".into(),
        });
    }
    let p = x.precision_bits();
    let lo = ln_point(x.lo(), p);
    if x.is_point() {
        return Ok(lo);
    }
    let hi = ln_point(x.hi(), p);
    Ok(CertifiedInterval::outward(lo.lo().clone(), hi.hi().clone(), p))
}

pub(crate) fn log2(x: &CertifiedInterval) -> Result<CertifiedInterval, PrecisionError> {
    if !x.lo().is_positive() {
        return Err(PrecisionError::Domain {
            op: "log2",
            detail: "argument must be strictly positive".into(),
        });
    }
    let p = x.precision_bits();
    if x.is_point() && x.lo().is_pow2() {
        return Ok(CertifiedInterval::from_i64(x.lo().exponent(), p));
    }
    let wp = p + GUARD_BITS;
    let l = ln(&x.with_precision(wp))?;
    Ok(l.div(&ln2(wp))?.with_precision(p))
}

pub(crate) fn pow(
    base: &CertifiedInterval,
    exponent: &CertifiedInterval,
) -> Result<CertifiedInterval, PrecisionError> {
    let p = base.precision_bits().max(exponent.precision_bits());
    let wp = p + GUARD_BITS;
    let l = ln(&base.with_precision(wp))?;
    let y = l.mul(&exponent.with_precision(wp));
    // exp of a wide argument needs extra bits for its magnitude
    let extra = y.mag().ilog2().unwrap_or(0).max(0) as u32;
    Ok(exp(&y.with_precision(wp + extra)).with_precision(p))
}
