//! The recursively defined upper-bound sequences.
//!
//! `M_n`: `M_1 = 1`, `M_2 = sqrt(2)` (real) or `2/sqrt(pi)` (complex), and
//! `M_n = D * M_{ceil(n/2)}` for `n > 2`. It is constant on each block
//! `B_k = {2^(k-1)+1, ..., 2^k}`.
//!
//! `J_n`: equal to a configured base `C_n` for `n <= 2^k0`; above that,
//! `J_n = D * J_{n/2}` for even `n` and
//! `J_n = D * J_{(n-1)/2}^((n-1)/2n) * J_{(n+1)/2}^((n+1)/2n)` for odd `n`.

mod base;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

pub use base::{BaseConstants, BaseEntry, BASE_FORMAT, MAX_DENSE_K0, MAX_K0};

use crate::precision::{
    d_constant, sqrt2, two_over_sqrt_pi, CertifiedInterval, FieldTag, PrecisionError,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequenceError {
    #[error("{0}")]
    Domain(String),
    #[error("base constant C_{n} is not configured (k0 = {k0})")]
    MissingBase { n: u64, k0: u32 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Precision(#[from] PrecisionError),
}

/// Block `B_k = {2^(k-1)+1, ..., 2^k}`; `B_1 = {2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockIndex(u32);

impl BlockIndex {
    pub fn new(k: u32) -> Result<Self, SequenceError> {
        if k == 0 || k > 63 {
            return Err(SequenceError::Domain(format!("block index {k} outside 1..=63")));
        }
        Ok(Self(k))
    }

    pub fn k(self) -> u32 {
        self.0
    }

    /// Smallest member, `2^(k-1) + 1`.
    pub fn first(self) -> u64 {
        (1u64 << (self.0 - 1)) + 1
    }

    /// Largest member, `2^k`.
    pub fn last(self) -> u64 {
        1u64 << self.0
    }

    pub fn contains(self, n: u64) -> bool {
        self.first() <= n && n <= self.last()
    }
}

impl fmt::Display for BlockIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B_{}", self.0)
    }
}

/// The block containing `n >= 2`.
pub fn block_of(n: u64) -> Result<BlockIndex, SequenceError> {
    if n < 2 {
        return Err(SequenceError::Domain(format!("block_of requires n >= 2, got {n}")));
    }
    // smallest k with n <= 2^k
    let k = 64 - (n - 1).leading_zeros();
    BlockIndex::new(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    MSequence,
    JSequence,
}

/// Which sequence to evaluate. The M-sequence ignores any base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceSpec {
    field: FieldTag,
    kind: SequenceKind,
    base: Option<Arc<BaseConstants>>,
}

impl SequenceSpec {
    pub fn m(field: FieldTag) -> Self {
        Self {
            field,
            kind: SequenceKind::MSequence,
            base: None,
        }
    }

    pub fn j(base: BaseConstants) -> Self {
        Self::j_shared(Arc::new(base))
    }

    pub fn j_shared(base: Arc<BaseConstants>) -> Self {
        Self {
            field: base.field(),
            kind: SequenceKind::JSequence,
            base: Some(base),
        }
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn base(&self) -> Option<&BaseConstants> {
        self.base.as_deref()
    }

    fn base_fingerprint(&self) -> u64 {
        self.base.as_ref().map_or(0, |b| b.fingerprint())
    }

    pub fn describe(&self) -> String {
        match (&self.kind, &self.base) {
            (SequenceKind::MSequence, _) => format!("M-sequence ({})", self.field),
            (SequenceKind::JSequence, Some(b)) => {
                format!("J-sequence ({}, k0 = {}; {})", self.field, b.k0(), b.description())
            }
            (SequenceKind::JSequence, None) => format!("J-sequence ({}, no base)", self.field),
        }
    }
}

/// `M_2`: `sqrt(2)` for real scalars, `2/sqrt(pi)` for complex scalars.
pub fn m_leading(field: FieldTag, prec: u32) -> CertifiedInterval {
    match field {
        FieldTag::Real => sqrt2(prec),
        FieldTag::Complex => two_over_sqrt_pi(prec),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct MemoKey {
    kind: SequenceKind,
    field: FieldTag,
    base: u64,
    n: u64,
    prec: u32,
}

/// Memoizing evaluator. Safe to share across threads; concurrent inserts of
/// the same key store identical values.
#[derive(Default)]
pub struct SequenceEvaluator {
    cache: RwLock<HashMap<MemoKey, CertifiedInterval>>,
}

static GLOBAL: LazyLock<SequenceEvaluator> = LazyLock::new(SequenceEvaluator::new);

impl SequenceEvaluator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide evaluator used by the free functions.
    pub fn global() -> &'static Self {
        &GLOBAL
    }

    pub fn cached_len(&self) -> usize {
        self.cache.read().map(|m| m.len()).unwrap_or(0)
    }

    fn lookup(&self, key: &MemoKey) -> Option<CertifiedInterval> {
        self.cache.read().ok().and_then(|m| m.get(key).cloned())
    }

    fn store(&self, key: MemoKey, v: &CertifiedInterval) {
        if let Ok(mut m) = self.cache.write() {
            m.entry(key).or_insert_with(|| v.clone());
        }
    }

    pub fn evaluate(
        &self,
        spec: &SequenceSpec,
        n: u64,
        prec: u32,
    ) -> Result<CertifiedInterval, SequenceError> {
        match spec.kind {
            SequenceKind::MSequence => self.m_sequence(n, spec.field, prec),
            SequenceKind::JSequence => self.j_sequence(n, spec, prec),
        }
    }

    pub fn m_sequence(
        &self,
        n: u64,
        field: FieldTag,
        prec: u32,
    ) -> Result<CertifiedInterval, SequenceError> {
        if n == 0 {
            return Err(SequenceError::Domain("M_n is defined for n >= 1".into()));
        }
        let key = MemoKey {
            kind: SequenceKind::MSequence,
            field,
            base: 0,
            n,
            prec,
        };
        if let Some(v) = self.lookup(&key) {
            return Ok(v);
        }
        let v = match n {
            1 => CertifiedInterval::from_i64(1, prec),
            2 => m_leading(field, prec),
            // even n halves; odd n rounds up
            _ => d_constant(field, prec)?.mul(&self.m_sequence(n.div_ceil(2), field, prec)?),
        };
        self.store(key, &v);
        Ok(v)
    }

    pub fn j_sequence(
        &self,
        n: u64,
        spec: &SequenceSpec,
        prec: u32,
    ) -> Result<CertifiedInterval, SequenceError> {
        let base = j_base(spec)?;
        let key = MemoKey {
            kind: SequenceKind::JSequence,
            field: spec.field,
            base: spec.base_fingerprint(),
            n,
            prec,
        };
        if let Some(v) = self.lookup(&key) {
            return Ok(v);
        }
        let v = j_step(n, base, prec, &mut |m| self.j_sequence(m, spec, prec))?;
        self.store(key, &v);
        Ok(v)
    }
}

fn j_base(spec: &SequenceSpec) -> Result<&BaseConstants, SequenceError> {
    if spec.kind != SequenceKind::JSequence {
        return Err(SequenceError::Config("j_sequence requires a J-sequence spec".into()));
    }
    spec.base()
        .ok_or_else(|| SequenceError::Config("J-sequence has no base constants".into()))
}

/// One application of the J-recurrence, with `sub` evaluating smaller indices.
fn j_step(
    n: u64,
    base: &BaseConstants,
    prec: u32,
    sub: &mut dyn FnMut(u64) -> Result<CertifiedInterval, SequenceError>,
) -> Result<CertifiedInterval, SequenceError> {
    if n == 0 {
        return Err(SequenceError::Domain("J_n is defined for n >= 1".into()));
    }
    if n <= base.len() {
        let entry = base.get(n).ok_or(SequenceError::MissingBase { n, k0: base.k0() })?;
        return Ok(CertifiedInterval::from_decimal(&entry.value, prec));
    }
    let d = d_constant(base.field(), prec)?;
    if n % 2 == 0 {
        return Ok(d.mul(&sub(n / 2)?));
    }
    let lower = sub((n - 1) / 2)?;
    let upper = sub(n.div_ceil(2))?;
    let two_n = 2 * n as i128;
    let e_lower = CertifiedInterval::from_ratio(n as i128 - 1, two_n, prec);
    let e_upper = CertifiedInterval::from_ratio(n as i128 + 1, two_n, prec);
    let mean = lower.pow(&e_lower)?.mul(&upper.pow(&e_upper)?);
    Ok(d.mul(&mean))
}

/// `M_n` via the shared memoizing evaluator.
pub fn m_sequence(n: u64, field: FieldTag, prec: u32) -> Result<CertifiedInterval, SequenceError> {
    SequenceEvaluator::global().m_sequence(n, field, prec)
}

/// `J_n` via the shared memoizing evaluator.
pub fn j_sequence(
    n: u64,
    spec: &SequenceSpec,
    prec: u32,
) -> Result<CertifiedInterval, SequenceError> {
    SequenceEvaluator::global().j_sequence(n, spec, prec)
}

/// `J_n` by plain recursion, no cache. Exponential in the number of odd
/// steps; meant as a cross-check for the memoized path.
pub fn j_sequence_uncached(
    n: u64,
    spec: &SequenceSpec,
    prec: u32,
) -> Result<CertifiedInterval, SequenceError> {
    let base = j_base(spec)?;
    fn go(n: u64, base: &BaseConstants, prec: u32) -> Result<CertifiedInterval, SequenceError> {
        j_step(n, base, prec, &mut |m| go(m, base, prec))
    }
    go(n, base, prec)
}

/// Sequence value at `n` for either kind, via the shared evaluator.
pub fn evaluate(
    spec: &SequenceSpec,
    n: u64,
    prec: u32,
) -> Result<CertifiedInterval, SequenceError> {
    SequenceEvaluator::global().evaluate(spec, n, prec)
}

/// Closed form of `M_n`: `M_2 * D^(k-1)` for `n` in `B_k`.
pub fn closed_form_m(
    n: u64,
    field: FieldTag,
    prec: u32,
) -> Result<CertifiedInterval, SequenceError> {
    let k = block_of(n)?.k();
    let d = d_constant(field, prec)?;
    Ok(m_leading(field, prec).mul(&d.powi(i64::from(k) - 1)?))
}

/// Closed form of `J_{2^k}` for `k >= k0`: `D^(k-k0) * C_{2^k0}`.
pub fn closed_form_j_power(
    k: u32,
    base: &BaseConstants,
    prec: u32,
) -> Result<CertifiedInterval, SequenceError> {
    if k < base.k0() {
        return Err(SequenceError::Domain(format!("k = {k} is below k0 = {}", base.k0())));
    }
    let top = base.top().ok_or(SequenceError::MissingBase {
        n: base.len(),
        k0: base.k0(),
    })?;
    let d = d_constant(base.field(), prec)?;
    Ok(CertifiedInterval::from_decimal(&top.value, prec).mul(&d.powi(i64::from(k - base.k0()))?))
}
