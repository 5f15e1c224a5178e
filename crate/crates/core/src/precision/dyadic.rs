//! Exact binary rationals `mant * 2^exp` with directed rounding to a
//! fixed number of mantissa bits.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for a single endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// An exact dyadic rational. Kept normalized: the mantissa is odd, or zero
/// with a zero exponent, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Self::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        Self {
            mant: mant >> tz,
            exp: exp + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::new(v, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Self {
            mant: BigInt::one(),
            exp: e,
        }
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Self::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Self::new(BigInt::from(m) * sign, e))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Number of significant bits in the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.magnitude().bits()
    }

    /// `floor(log2 |x|)` for nonzero `x`.
    pub fn ilog2(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.bits() as i64 - 1)
        }
    }

    /// True iff the value is an integer power of two (positive).
    pub fn is_pow2(&self) -> bool {
        self.mant.is_one()
    }

    /// True iff the value is an integer.
    pub fn is_integer(&self) -> bool {
        self.is_zero() || self.exp >= 0
    }

    pub fn to_bigint(&self) -> Option<BigInt> {
        if !self.is_integer() {
            return None;
        }
        Some(&self.mant << self.exp as u64)
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    /// Multiply by `2^k` exactly.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Self::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// `self + other` rounded to `prec` bits in direction `dir`. When one
    /// term lies far below the other's rounding grid it is replaced by a
    /// small stand-in of the same sign, which rounds identically and keeps
    /// the exact sum from spanning an enormous exponent range.
    pub fn add_dir(&self, other: &Self, prec: u32, dir: Round) -> Self {
        let (big, small) = match (self.ilog2(), other.ilog2()) {
            (Some(a), Some(b)) if a >= b => (self, other),
            (Some(_), Some(_)) => (other, self),
            _ => return self.add(other).round(prec, dir),
        };
        let top = big.ilog2().expect("nonzero");
        let floor = big.exp.min(top - i64::from(prec));
        if small.ilog2().expect("nonzero") < floor - 2 {
            let stand_in = Self::new(BigInt::from(small.signum()), floor - 2);
            return big.add(&stand_in).round(prec, dir);
        }
        big.add(small).round(prec, dir)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let neg = self.is_negative();
        let mag = self.mant.magnitude();
        let mut q: BigUint = mag >> shift;
        // the discarded bits are nonzero: normalized mantissas are odd
        let away = matches!((dir, neg), (Round::Up, false) | (Round::Down, true));
        if away {
            q += 1u32;
        }
        let q = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, q);
        Self::new(q, self.exp + shift as i64)
    }

    /// `self / other` rounded to `prec` bits in direction `dir`.
    pub fn div(&self, other: &Self, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let neg = self.is_negative() != other.is_negative();
        let a = self.mant.magnitude();
        let b = other.mant.magnitude();
        let shift = (prec as i64 + b.bits() as i64 - a.bits() as i64 + 2).max(0) as u64;
        let (mut q, r) = (a << shift).div_rem(b);
        let away = matches!((dir, neg), (Round::Up, false) | (Round::Down, true));
        if !r.is_zero() && away {
            q += 1u32;
        }
        let q = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, q);
        Self::new(q, self.exp - other.exp - shift as i64).round(prec, dir)
    }

    /// Square root of a nonnegative value rounded to `prec` bits.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.is_negative(), "dyadic sqrt of negative value");
        if self.is_zero() {
            return Self::zero();
        }
        let mag = self.mant.magnitude().clone();
        let want = 2 * prec as i64 + 4;
        let mut shift = (want - mag.bits() as i64).max(0);
        if (self.exp - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = mag << shift as u64;
        let mut s = m.sqrt();
        if &s * &s != m && dir == Round::Up {
            s += 1u32;
        }
        Self::new(BigInt::from(s), (self.exp - shift) / 2).round(prec, dir)
    }

    /// Nearest `f64` in direction `dir` (saturating to +-inf / 0 outside range).
    pub fn to_f64_dir(&self, dir: Round) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(53, dir);
        let m = r.mant.to_f64().unwrap_or(f64::NAN);
        let e = r.exp;
        if e > 1100 {
            return if m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if e + 53 < -1000 {
            // subnormal territory: products would round to nearest
            let tiny = 2f64.powi(-1000);
            return match (dir, m > 0.0) {
                (Round::Up, true) => tiny,
                (Round::Down, false) => -tiny,
                _ => 0.0,
            };
        }
        // two steps keep each power of two representable
        let half = e / 2;
        m * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(60, Round::Down);
        let m = r.mant.to_f64().unwrap_or(f64::NAN);
        let half = r.exp / 2;
        m * 2f64.powi(half as i32) * 2f64.powi((r.exp - half) as i32)
    }

    /// Returns `(num, den)` with `self = num / den`, `den` a power of two.
    pub fn to_ratio(&self) -> (BigInt, BigInt) {
        if self.exp >= 0 {
            (&self.mant << self.exp as u64, BigInt::one())
        } else {
            (self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb || sa == 0 {
            return sa.cmp(&sb);
        }
        // magnitudes in different binades order without subtracting
        let (la, lb) = (self.ilog2(), other.ilog2());
        if la != lb {
            let by_mag = la.cmp(&lb);
            return if sa > 0 { by_mag } else { by_mag.reverse() };
        }
        self.sub(other).signum().cmp(&0)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mant, self.exp)
    }
}
