//! Envelope claims `K_n < P (n-1)^E`, their certification against the
//! upper-bound sequences, the printed prefactor tables, and crossovers
//! between competing claims.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::precision::{
    compare_strict, d_constant, escalate, format_sig, log2_d, round_half_even, sqrt2,
    two_over_sqrt_pi, CertifiedInterval, Comparison, Decimal, FieldTag, PrecisionError, Round,
};
use crate::sequences::{
    block_of, evaluate, BaseConstants, BlockIndex, SequenceError, SequenceKind, SequenceSpec,
};

/// Provenance label attached to base constants obtained by inverting a
/// printed prefactor.
pub const IMPLIED_PROVENANCE: &str = "implied from printed table";

/// Significant digits kept when an implied base constant is written out.
const IMPLIED_BASE_DIGITS: u32 = 32;

/// Largest `n` considered by [`crossover`].
pub const CROSSOVER_SCAN_CAP: u64 = 1 << 30;

/// Number of blocks above the threshold checked for each table row.
pub const TABLE_BLOCKS: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundsError {
    #[error("{0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Precision(#[from] PrecisionError),
}

/// A claim prefactor: a decimal numeral or one of the two named constants
/// that lead the envelopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficient {
    Decimal(Decimal),
    Sqrt2,
    TwoOverSqrtPi,
}

impl Coefficient {
    /// `M_2` for the field: `sqrt(2)` or `2/sqrt(pi)`.
    pub fn leading(field: FieldTag) -> Self {
        match field {
            FieldTag::Real => Coefficient::Sqrt2,
            FieldTag::Complex => Coefficient::TwoOverSqrtPi,
        }
    }

    pub fn interval(&self, prec: u32) -> CertifiedInterval {
        match self {
            Coefficient::Decimal(d) => CertifiedInterval::from_decimal(d, prec),
            Coefficient::Sqrt2 => sqrt2(prec),
            Coefficient::TwoOverSqrtPi => two_over_sqrt_pi(prec),
        }
    }

    pub fn as_decimal(&self) -> Option<&Decimal> {
        match self {
            Coefficient::Decimal(d) => Some(d),
            _ => None,
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            Coefficient::Decimal(d) => !d.is_negative() && !d.is_zero(),
            _ => true,
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Decimal(d) => write!(f, "{d}"),
            Coefficient::Sqrt2 => f.write_str("sqrt2"),
            Coefficient::TwoOverSqrtPi => f.write_str("2/sqrtpi"),
        }
    }
}

impl FromStr for Coefficient {
    type Err = PrecisionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "sqrt2" | "√2" => Ok(Coefficient::Sqrt2),
            "2/sqrtpi" | "2/√π" => Ok(Coefficient::TwoOverSqrtPi),
            other => other.parse().map(Coefficient::Decimal),
        }
    }
}

impl Serialize for Coefficient {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
        })
    }
}

/// "`K_n` (relation) `prefactor * (n-1)^exponent` for all `n > threshold`".
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundClaim {
    pub field: FieldTag,
    pub prefactor: Coefficient,
    pub exponent: Decimal,
    pub threshold: u64,
    pub relation: Relation,
    pub source: String,
}

impl BoundClaim {
    pub fn new(
        field: FieldTag,
        prefactor: Coefficient,
        exponent: Decimal,
        threshold: u64,
        relation: Relation,
        source: impl Into<String>,
    ) -> Result<Self, BoundsError> {
        if !prefactor.is_positive() {
            return Err(BoundsError::Domain(format!("prefactor {prefactor} must be positive")));
        }
        if exponent <= Decimal::from_i64(0) || exponent >= Decimal::from_i64(1) {
            return Err(BoundsError::Domain(format!("exponent {exponent} must lie in (0, 1)")));
        }
        if threshold == 0 {
            return Err(BoundsError::Domain("threshold must be at least 1".into()));
        }
        Ok(Self {
            field,
            prefactor,
            exponent,
            threshold,
            relation,
            source: source.into(),
        })
    }

    /// `prefactor * (n-1)^exponent` for `n >= 2`.
    pub fn value_at(&self, n: u64, prec: u32) -> Result<CertifiedInterval, BoundsError> {
        if n < 2 {
            return Err(BoundsError::Domain(format!("claims are evaluated at n >= 2, got {n}")));
        }
        let p = self.prefactor.interval(prec);
        if n == 2 {
            return Ok(p);
        }
        let base = CertifiedInterval::from_i64(n as i64 - 1, prec);
        let e = CertifiedInterval::from_decimal(&self.exponent, prec);
        Ok(p.mul(&base.pow(&e)?))
    }
}

impl fmt::Display for BoundClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K_n {} {}*(n-1)^{} for n > {} ({})",
            self.relation, self.prefactor, self.exponent, self.threshold, self.field
        )
    }
}

/// The printed exponents: strict upper bounds for `log2 D`.
pub fn claimed_exponent(field: FieldTag) -> Decimal {
    let s = match field {
        FieldTag::Real => "0.526322",
        FieldTag::Complex => "0.304975",
    };
    s.parse().expect("literal")
}

fn claim(field: FieldTag, p: Coefficient, t: u64, rel: Relation, source: &str) -> BoundClaim {
    BoundClaim::new(field, p, claimed_exponent(field), t, rel, source).expect("literal claim")
}

fn dec(s: &str) -> Coefficient {
    Coefficient::Decimal(s.parse().expect("literal"))
}

/// The two all-`n` envelopes and the two large-`n` refinements.
pub fn envelope_claims() -> Vec<BoundClaim> {
    vec![
        claim(FieldTag::Real, Coefficient::Sqrt2, 1, Relation::Le, "real envelope"),
        claim(
            FieldTag::Complex,
            Coefficient::TwoOverSqrtPi,
            1,
            Relation::Le,
            "complex envelope",
        ),
        claim(FieldTag::Real, dec("1.30379"), 1 << 8, Relation::Lt, "real large-n estimate"),
        claim(
            FieldTag::Complex,
            dec("0.99137"),
            1 << 15,
            Relation::Lt,
            "complex large-n estimate",
        ),
    ]
}

/// `K_n < 1.338887 (n-1)^0.526322` for `n > 16`.
pub fn theorem_claim() -> BoundClaim {
    claim(FieldTag::Real, dec("1.338887"), 16, Relation::Lt, "theorem (n > 16)")
}

/// A printed prefactor table row: the claim for `n > 2^k0` and its `k0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub k0: u32,
    pub claim: BoundClaim,
}

impl TableRow {
    pub fn field(&self) -> FieldTag {
        self.claim.field
    }

    pub fn printed(&self) -> &Decimal {
        self.claim.prefactor.as_decimal().expect("table prefactors are decimals")
    }
}

/// The printed real (`k0` = 6, 7, 8) and complex (`k0` = 3 ... 50) rows.
pub fn printed_tables() -> Vec<TableRow> {
    let real = [(6, "1.310883"), (7, "1.306156"), (8, "1.303787")];
    let complex = [
        (3, "1.02960973695"),
        (4, "1.01089344604"),
        (5, "1.00123230777"),
        (6, "0.99632125476"),
        (14, "0.99137409768"),
        (15, "0.99136434217"),
        (25, "0.99135459597"),
        (50, "0.99135458644"),
    ];
    let rows = |field: FieldTag, list: &[(u32, &str)], label: &str| {
        list.iter()
            .map(|&(k0, p)| TableRow {
                k0,
                claim: claim(field, dec(p), 1 << k0, Relation::Lt, &format!("{label}, k0 = {k0}")),
            })
            .collect::<Vec<_>>()
    };
    let mut out = rows(FieldTag::Real, &real, "real table");
    out.extend(rows(FieldTag::Complex, &complex, "complex table"));
    out
}

/// `C_{2^k0} / D^(k0-1)` with `C_{2^k0}` supplied as an interval.
pub fn prefactor_from_top(
    field: FieldTag,
    k0: u32,
    top: &CertifiedInterval,
    prec: u32,
) -> Result<CertifiedInterval, BoundsError> {
    if k0 == 0 {
        return Err(BoundsError::Domain("k0 must be positive".into()));
    }
    let d = d_constant(field, prec)?;
    Ok(top.div(&d.powi(i64::from(k0) - 1)?)?)
}

/// `C_{2^k0} / D^(k0-1)` for a configured base.
pub fn prefactor(
    k0: u32,
    base: &BaseConstants,
    prec: u32,
) -> Result<CertifiedInterval, BoundsError> {
    if k0 != base.k0() {
        return Err(BoundsError::Config(format!(
            "k0 = {k0} does not match the base (k0 = {})",
            base.k0()
        )));
    }
    let top = base.top().ok_or(SequenceError::MissingBase {
        n: base.len(),
        k0,
    })?;
    prefactor_from_top(base.field(), k0, &CertifiedInterval::from_decimal(&top.value, prec), prec)
}

/// `4 D^(k0-4)` (real `D`), an upper bound for `C_{2^k0}` when `k0 >= 4`.
pub fn base_upper_bound(k0: u32, prec: u32) -> Result<CertifiedInterval, BoundsError> {
    if k0 < 4 {
        return Err(BoundsError::Domain(format!("the bound 4 D^(k0-4) needs k0 >= 4, got {k0}")));
    }
    let d = d_constant(FieldTag::Real, prec)?;
    Ok(CertifiedInterval::from_i64(4, prec).mul(&d.powi(i64::from(k0) - 4)?))
}

/// A real base holding only `C_{2^k0}`, set to a decimal at or above
/// `4 D^(k0-4)`.
pub fn bounded_base(k0: u32) -> Result<BaseConstants, BoundsError> {
    let bound = base_upper_bound(k0, 192)?;
    let value = format_sig(bound.hi(), IMPLIED_BASE_DIGITS, Round::Up).parse::<Decimal>()?.normalized();
    Ok(BaseConstants::top_only(
        FieldTag::Real,
        k0,
        value,
        "upper bound 4 D^(k0-4)",
        format!("C_{} bounded by 4 D^{}", 1u64 << k0, k0 - 4),
    )?)
}

/// Inverts the prefactor formula for one printed row: `C_{2^k0}` is set to
/// a decimal slightly below `printed * D^(k0-1)`, so the recomputed
/// prefactor lies just under the printed value.
pub fn implied_base(row: &TableRow, prec: u32) -> Result<BaseConstants, BoundsError> {
    let field = row.field();
    let wp = prec.max(192);
    let d = d_constant(field, wp)?;
    let c = CertifiedInterval::from_decimal(row.printed(), wp).mul(&d.powi(i64::from(row.k0) - 1)?);
    // drop one unit in the last kept digit so rounding of the recomputed
    // prefactor can never land above the printed numeral
    let floor: Decimal = format_sig(c.lo(), IMPLIED_BASE_DIGITS, Round::Down).parse()?;
    let value = floor.add(&Decimal::new(-floor.ulp().digits().clone(), floor.scale()));
    Ok(BaseConstants::top_only(
        field,
        row.k0,
        value,
        IMPLIED_PROVENANCE,
        format!("C_{} implied by printed prefactor {}", 1u64 << row.k0, row.printed()),
    )?)
}

/// [`implied_base`] for every row of one field.
pub fn implied_bases(
    field: FieldTag,
    rows: &[TableRow],
    prec: u32,
) -> Result<Vec<BaseConstants>, BoundsError> {
    rows.iter()
        .map(|row| {
            if row.field() != field {
                return Err(BoundsError::Config(format!(
                    "table row k0 = {} is {}, expected {field}",
                    row.k0,
                    row.field()
                )));
            }
            implied_base(row, prec)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertStatus {
    Certified,
    Refuted,
    Inconclusive,
}

impl fmt::Display for CertStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertStatus::Certified => "certified",
            CertStatus::Refuted => "refuted",
            CertStatus::Inconclusive => "inconclusive",
        })
    }
}

/// A point where the sequence value is not below the claimed bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub n: u64,
    pub sequence_value: CertifiedInterval,
    pub bound_value: CertifiedInterval,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertResult {
    pub claim: BoundClaim,
    pub status: CertStatus,
    pub witness: Option<Witness>,
    pub precision_used: u32,
    pub n_max: u64,
    pub blocks_checked: u32,
    pub sequence: String,
    pub log2_d: CertifiedInterval,
    pub reason: Option<String>,
    pub assumptions: Vec<String>,
}

impl CertResult {
    pub fn is_certified(&self) -> bool {
        self.status == CertStatus::Certified
    }
}

enum Outcome {
    Certified(u32),
    Refuted(Witness, u32, String),
    Stuck(String),
}

/// Certifies that the upper-bound sequence `seq` stays below the claim on
/// `(threshold, n_max]`.
///
/// First proves `log2 D < exponent`. Then, for each block `B_k` meeting the
/// range, compares the sequence's block value with the claim evaluated at
/// the block's smallest in-range `n`; the right side increases in `n`, so
/// one comparison covers the block. M is constant on blocks; for J the
/// value at `2^k` is used, which covers the whole block when the optimal
/// constants are nondecreasing in `n`. Inconclusive comparisons double the
/// precision up to the cap.
pub fn certify_envelope(
    claim: &BoundClaim,
    seq: &SequenceSpec,
    n_max: u64,
    prec: u32,
) -> Result<CertResult, BoundsError> {
    if claim.field != seq.field() {
        return Err(BoundsError::Config(format!(
            "claim is {} but the sequence is {}",
            claim.field,
            seq.field()
        )));
    }
    let (outcome, used) = escalate(prec, |p| certify_at(claim, seq, n_max, p))?;
    let log2d = log2_d(claim.field, used)?;
    let mut assumptions = vec![
        "certifies the upper-bound sequence, not the unknown optimal constants".to_string(),
        format!("exponent {} is a strict upper bound for log2 D (checked)", claim.exponent),
    ];
    match seq.kind() {
        SequenceKind::MSequence => assumptions.push("M_n is constant on each block".into()),
        SequenceKind::JSequence => assumptions.push(
            "K_n <= J_{2^k} on B_k assumes the optimal constants are nondecreasing in n".into(),
        ),
    }
    let mut result = CertResult {
        claim: claim.clone(),
        status: CertStatus::Inconclusive,
        witness: None,
        precision_used: used,
        n_max,
        blocks_checked: 0,
        sequence: seq.describe(),
        log2_d: log2d,
        reason: None,
        assumptions,
    };
    match outcome {
        Some(Outcome::Certified(blocks)) => {
            result.status = CertStatus::Certified;
            result.blocks_checked = blocks;
            if n_max <= claim.threshold {
                result.reason = Some(format!("range ({}, {n_max}] is empty", claim.threshold));
            }
        }
        Some(Outcome::Refuted(w, blocks, why)) => {
            result.status = CertStatus::Refuted;
            result.witness = Some(w);
            result.blocks_checked = blocks;
            result.reason = Some(why);
        }
        Some(Outcome::Stuck(why)) => result.reason = Some(why),
        None => {
            result.reason = Some(format!(
                "comparison still inconclusive at {used} bits (precision cap)"
            ))
        }
    }
    Ok(result)
}

fn certify_at(
    claim: &BoundClaim,
    seq: &SequenceSpec,
    n_max: u64,
    prec: u32,
) -> Result<Option<Outcome>, BoundsError> {
    let log2d = log2_d(claim.field, prec)?;
    let e = CertifiedInterval::from_decimal(&claim.exponent, prec);
    match compare_strict(&log2d, &e) {
        Comparison::CertifiedLess => {}
        Comparison::Inconclusive => return Ok(None),
        Comparison::CertifiedGreater => {
            return Ok(Some(Outcome::Stuck(format!(
                "exponent {} is below log2 D; block-endpoint argument does not apply",
                claim.exponent
            ))))
        }
    }
    if n_max <= claim.threshold {
        return Ok(Some(Outcome::Certified(0)));
    }
    let k_start = block_of(claim.threshold + 1)?.k();
    let k_end = block_of(n_max)?.k();
    let mut blocks = 0;
    for k in k_start..=k_end {
        let block = BlockIndex::new(k)?;
        let n_left = block.first().max(claim.threshold + 1);
        let at = match seq.kind() {
            SequenceKind::MSequence => n_left,
            SequenceKind::JSequence => block.last(),
        };
        let value = evaluate(seq, at, prec)?;
        let bound = claim.value_at(n_left, prec)?;
        blocks += 1;
        let exact_tie = n_left == 2 && exact_value_at_two(seq).as_ref() == Some(&claim.prefactor);
        let witness = || Witness {
            n: n_left,
            sequence_value: value.clone(),
            bound_value: bound.clone(),
        };
        match compare_strict(&value, &bound) {
            Comparison::CertifiedLess => {}
            Comparison::CertifiedGreater => {
                let why = format!("sequence exceeds the bound on block B_{k}");
                return Ok(Some(Outcome::Refuted(witness(), blocks, why)));
            }
            Comparison::Inconclusive if exact_tie => {
                if claim.relation == Relation::Lt {
                    let why = "sequence equals the bound exactly at n = 2".to_string();
                    return Ok(Some(Outcome::Refuted(witness(), blocks, why)));
                }
            }
            Comparison::Inconclusive => return Ok(None),
        }
    }
    Ok(Some(Outcome::Certified(blocks)))
}

/// The sequence value at `n = 2` when it is an exactly known constant.
fn exact_value_at_two(seq: &SequenceSpec) -> Option<Coefficient> {
    match seq.kind() {
        SequenceKind::MSequence => Some(Coefficient::leading(seq.field())),
        SequenceKind::JSequence => {
            seq.base().and_then(|b| b.get(2)).map(|e| Coefficient::Decimal(e.value.clone()))
        }
    }
}

/// One recomputed table entry.
#[derive(Clone, Debug)]
pub struct TableCheck {
    pub label: String,
    pub claim: BoundClaim,
    /// Printed numeral the row is compared with.
    pub printed: Option<Decimal>,
    /// Recomputed prefactor.
    pub recomputed: Option<CertifiedInterval>,
    /// Round-half-even of the recomputed prefactor to the printed digits,
    /// for rows where digit agreement is checked.
    pub rounded: Option<Decimal>,
    pub digits_match: Option<bool>,
    /// Recomputed prefactor is at or below the printed numeral and strictly
    /// below it plus one unit in the last place.
    pub upper_bound_ok: Option<bool>,
    pub base_provenance: Option<String>,
    pub certification: CertResult,
}

impl TableCheck {
    pub fn passed(&self) -> bool {
        self.certification.is_certified()
            && self.digits_match != Some(false)
            && self.upper_bound_ok != Some(false)
    }
}

fn upper_bound_ok(value: &CertifiedInterval, printed: &Decimal) -> bool {
    value.hi_le_decimal(printed) && value.hi_lt_decimal(&printed.add(&printed.ulp()))
}

fn find_base(bases: &[BaseConstants], field: FieldTag, k0: u32) -> Option<&BaseConstants> {
    bases.iter().find(|b| b.field() == field && b.k0() == k0)
}

fn table_n_max(threshold: u64) -> u64 {
    threshold.saturating_mul(1 << TABLE_BLOCKS).min(1 << 62)
}

/// Checks one printed row against a base (`None` = implied base).
pub fn check_table_row(
    row: &TableRow,
    base: Option<&BaseConstants>,
    prec: u32,
) -> Result<TableCheck, BoundsError> {
    let base = match base {
        Some(b) => b.clone(),
        None => implied_base(row, prec)?,
    };
    let printed = row.printed().clone();
    let recomputed = prefactor(row.k0, &base, prec)?;
    let scale = printed.scale();
    let rounded = round_half_even(&recomputed.midpoint(), scale);
    // both endpoints must round to the printed numeral
    let digits_match = round_half_even(recomputed.lo(), scale) == printed
        && round_half_even(recomputed.hi(), scale) == printed;
    let upper = upper_bound_ok(&recomputed, &printed);
    let provenance = base.top().map(|e| e.provenance.clone());
    let seq = SequenceSpec::j(base);
    let certification = certify_envelope(&row.claim, &seq, table_n_max(row.claim.threshold), prec)?;
    Ok(TableCheck {
        label: row.claim.source.clone(),
        claim: row.claim.clone(),
        printed: Some(printed),
        recomputed: Some(recomputed),
        rounded: Some(rounded),
        digits_match: Some(digits_match),
        upper_bound_ok: Some(upper),
        base_provenance: provenance,
        certification,
    })
}

/// Every claim for one field: envelope, theorem (real only), large-`n`
/// estimate and the printed rows, in [`canonical_order`]. User bases replace
/// implied ones with the same `(field, k0)`.
pub fn table_checks(
    field: FieldTag,
    n_max: u64,
    bases: &[BaseConstants],
    prec: u32,
) -> Result<Vec<TableCheck>, BoundsError> {
    let rows: Vec<TableRow> = printed_tables().into_iter().filter(|r| r.field() == field).collect();
    let claims = envelope_claims();
    let mut out = Vec::new();

    let envelope = &claims[if field == FieldTag::Real { 0 } else { 1 }];
    out.push(TableCheck {
        label: envelope.source.clone(),
        claim: envelope.clone(),
        printed: None,
        recomputed: None,
        rounded: None,
        digits_match: None,
        upper_bound_ok: None,
        base_provenance: None,
        certification: certify_envelope(envelope, &SequenceSpec::m(field), n_max, prec)?,
    });

    if field == FieldTag::Real {
        let theorem = theorem_claim();
        let base = match find_base(bases, FieldTag::Real, 4) {
            Some(b) => b.clone(),
            None => bounded_base(4)?,
        };
        let p = prefactor(4, &base, prec)?;
        let printed = theorem.prefactor.as_decimal().cloned().expect("decimal");
        let certification = certify_envelope(
            &theorem,
            &SequenceSpec::j(base.clone()),
            table_n_max(theorem.threshold),
            prec,
        )?;
        out.push(TableCheck {
            label: theorem.source.clone(),
            upper_bound_ok: Some(p.hi_lt_decimal(&printed)),
            claim: theorem,
            printed: Some(printed),
            recomputed: Some(p),
            rounded: None,
            digits_match: None,
            base_provenance: base.top().map(|e| e.provenance.clone()),
            certification,
        });
    }

    // the large-n estimate rests on the row with the same threshold
    let estimate = &claims[if field == FieldTag::Real { 2 } else { 3 }];
    let row = rows
        .iter()
        .find(|r| r.claim.threshold == estimate.threshold)
        .expect("estimate has a matching row");
    let base = match find_base(bases, field, row.k0) {
        Some(b) => b.clone(),
        None => implied_base(row, prec)?,
    };
    let p = prefactor(row.k0, &base, prec)?;
    let printed = estimate.prefactor.as_decimal().cloned().expect("decimal");
    let certification = certify_envelope(
        estimate,
        &SequenceSpec::j(base.clone()),
        table_n_max(estimate.threshold),
        prec,
    )?;
    out.push(TableCheck {
        label: estimate.source.clone(),
        upper_bound_ok: Some(p.hi_lt_decimal(&printed)),
        claim: estimate.clone(),
        printed: Some(printed),
        recomputed: Some(p),
        rounded: None,
        digits_match: None,
        base_provenance: base.top().map(|e| e.provenance.clone()),
        certification,
    });

    for row in &rows {
        out.push(check_table_row(row, find_base(bases, field, row.k0), prec)?);
    }
    out.sort_by(|a, b| canonical_order(&a.claim, &b.claim));
    Ok(out)
}

/// Smallest `n` (above both thresholds) where `a`'s right side is certified
/// below `b`'s, scanning up to [`CROSSOVER_SCAN_CAP`]. With equal exponents
/// the answer is the first admissible `n` or nothing, depending only on the
/// prefactor order.
pub fn crossover(
    a: &BoundClaim,
    b: &BoundClaim,
    prec: u32,
) -> Result<Option<u64>, BoundsError> {
    if a.field != b.field {
        return Err(BoundsError::Config(format!(
            "claims are for different fields ({} vs {})",
            a.field, b.field
        )));
    }
    let start = a.threshold.max(b.threshold) + 1;
    if start > CROSSOVER_SCAN_CAP {
        return Ok(None);
    }
    let pa = a.prefactor.interval(prec);
    let pb = b.prefactor.interval(prec);
    if a.exponent == b.exponent {
        return Ok(match compare_strict(&pa, &pb) {
            Comparison::CertifiedLess => Some(start),
            _ => None,
        });
    }
    let ln_pa = pa.ln()?;
    let ln_pb = pb.ln()?;
    let ea = CertifiedInterval::from_decimal(&a.exponent, prec);
    let eb = CertifiedInterval::from_decimal(&b.exponent, prec);
    let below = |n: u64| -> Result<bool, BoundsError> {
        let l = CertifiedInterval::from_i64(n as i64 - 1, prec).ln()?;
        let lhs = ln_pa.add(&ea.mul(&l));
        let rhs = ln_pb.add(&eb.mul(&l));
        Ok(compare_strict(&lhs, &rhs) == Comparison::CertifiedLess)
    };
    if below(start)? {
        return Ok(Some(start));
    }
    if a.exponent > b.exponent || !below(CROSSOVER_SCAN_CAP)? {
        // a grows faster: once above, always above
        return Ok(None);
    }
    // below(lo) is false, below(hi) is true
    let (mut lo, mut hi) = (start, CROSSOVER_SCAN_CAP);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Orders checks by field, then threshold, then label.
pub fn canonical_order(a: &BoundClaim, b: &BoundClaim) -> Ordering {
    (a.field as u8, a.threshold, &a.source).cmp(&(b.field as u8, b.threshold, &b.source))
}
