//! Verification reports: a structured JSON document and a flat
//! tab-separated export with one row per check. Interval endpoints are
//! written as directed-rounded decimal strings. Everything run-specific
//! (time stamps, durations) lives in the header so the rest of the
//! document is reproducible byte for byte.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::bounds::{CertResult, CertStatus, TableCheck};
use crate::forms::BatchResult;
use crate::precision::{CertifiedInterval, FieldTag};

pub const REPORT_SCHEMA: &str = "bhbound-report/1";

/// Significant digits written for interval endpoints.
pub const ENDPOINT_DIGITS: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Certified,
    Refuted,
    Inconclusive,
    Passed,
    Failed,
    Info,
}

impl RowStatus {
    pub fn is_ok(self) -> bool {
        matches!(self, RowStatus::Certified | RowStatus::Passed | RowStatus::Info)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Certified => "certified",
            RowStatus::Refuted => "refuted",
            RowStatus::Inconclusive => "inconclusive",
            RowStatus::Passed => "passed",
            RowStatus::Failed => "failed",
            RowStatus::Info => "info",
        }
    }
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<CertStatus> for RowStatus {
    fn from(s: CertStatus) -> Self {
        match s {
            CertStatus::Certified => RowStatus::Certified,
            CertStatus::Refuted => RowStatus::Refuted,
            CertStatus::Inconclusive => RowStatus::Inconclusive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// A claim was refuted or could not be certified.
    Certification,
    /// An empirical ratio exceeded its bound.
    OracleViolation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub id: String,
    pub kind: FailureKind,
    pub message: String,
    pub details: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub id: String,
    pub field: Option<FieldTag>,
    pub status: RowStatus,
    pub quantity: String,
    pub lo: Option<String>,
    pub hi: Option<String>,
    pub reference: Option<String>,
    pub precision_bits: Option<u32>,
    pub details: BTreeMap<String, String>,
}

impl ReportRow {
    pub fn new(id: impl Into<String>, status: RowStatus, quantity: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            field: None,
            status,
            quantity: quantity.into(),
            lo: None,
            hi: None,
            reference: None,
            precision_bits: None,
            details: BTreeMap::new(),
        }
    }

    pub fn field(mut self, field: FieldTag) -> Self {
        self.field = Some(field);
        self
    }

    pub fn interval(mut self, x: &CertifiedInterval) -> Self {
        self.lo = Some(x.lo_string(ENDPOINT_DIGITS));
        self.hi = Some(x.hi_string(ENDPOINT_DIGITS));
        self.precision_bits = Some(x.precision_bits());
        self
    }

    pub fn reference(mut self, r: impl Into<String>) -> Self {
        self.reference = Some(r.into());
        self
    }

    pub fn detail(mut self, key: &str, value: impl ToString) -> Self {
        self.details.insert(key.to_string(), value.to_string());
        self
    }
}

/// Run-specific metadata, excluded when comparing reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch (or `SOURCE_DATE_EPOCH` when set).
    pub generated_at: u64,
    pub elapsed_ms: u64,
}

impl ReportHeader {
    pub fn now(elapsed: Duration) -> Self {
        let generated_at = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or_else(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
        Self {
            tool: "bhbound".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            generated_at,
            elapsed_ms: elapsed.as_millis() as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub header: ReportHeader,
    pub schema: String,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub status: RowStatus,
    pub rows: Vec<ReportRow>,
    pub assumptions: Vec<String>,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            header: ReportHeader::now(Duration::ZERO),
            schema: REPORT_SCHEMA.into(),
            command: command.into(),
            parameters: BTreeMap::new(),
            status: RowStatus::Passed,
            rows: Vec::new(),
            assumptions: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn parameter(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    pub fn assume(&mut self, text: impl Into<String>) {
        let text = text.into();
        if !self.assumptions.contains(&text) {
            self.assumptions.push(text);
        }
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn fail(&mut self, failure: Failure) {
        self.failures.push(failure);
    }

    /// Sets the overall status from the rows and recorded failures.
    pub fn finish(&mut self, elapsed: Duration) {
        self.header = ReportHeader::now(elapsed);
        let ok = self.failures.is_empty() && self.rows.iter().all(|r| r.status.is_ok());
        self.status = if ok { RowStatus::Passed } else { RowStatus::Failed };
    }

    pub fn passed(&self) -> bool {
        self.status.is_ok()
    }

    pub fn has_failure(&self, kind: FailureKind) -> bool {
        self.failures.iter().any(|f| f.kind == kind)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per row; no header metadata.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "id\tfield\tstatus\tquantity\tlo\thi\treference\tprecision_bits\tdetails\n",
        );
        for r in &self.rows {
            let details: Vec<String> = r.details.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let cells = [
                r.id.clone(),
                r.field.map(|f| f.to_string()).unwrap_or_default(),
                r.status.to_string(),
                r.quantity.clone(),
                r.lo.clone().unwrap_or_default(),
                r.hi.clone().unwrap_or_default(),
                r.reference.clone().unwrap_or_default(),
                r.precision_bits.map(|p| p.to_string()).unwrap_or_default(),
                details.join(";"),
            ];
            let cells: Vec<String> = cells.iter().map(|c| tsv_escape(c)).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }
}

fn tsv_escape(s: &str) -> String {
    s.replace(['\t', '\n'], " ")
}

fn witness_details(r: &CertResult) -> BTreeMap<String, String> {
    let mut d = BTreeMap::new();
    if let Some(w) = &r.witness {
        d.insert("n".into(), w.n.to_string());
        d.insert("sequence_lo".into(), w.sequence_value.lo_string(ENDPOINT_DIGITS));
        d.insert("sequence_hi".into(), w.sequence_value.hi_string(ENDPOINT_DIGITS));
        d.insert("bound_lo".into(), w.bound_value.lo_string(ENDPOINT_DIGITS));
        d.insert("bound_hi".into(), w.bound_value.hi_string(ENDPOINT_DIGITS));
    }
    if let Some(reason) = &r.reason {
        d.insert("reason".into(), reason.clone());
    }
    d
}

/// Adds a certification outcome as one row (plus a failure entry unless
/// it certified).
pub fn add_certification(report: &mut Report, id: &str, r: &CertResult) {
    let mut row = ReportRow::new(id, r.status.into(), r.claim.to_string())
        .field(r.claim.field)
        .interval(&r.log2_d)
        .reference(format!("log2 D < {}", r.claim.exponent))
        .detail("sequence", &r.sequence)
        .detail("n_max", r.n_max)
        .detail("blocks_checked", r.blocks_checked)
        .detail("source", &r.claim.source);
    row.precision_bits = Some(r.precision_used);
    for (k, v) in witness_details(r) {
        row.details.insert(k, v);
    }
    report.push(row);
    for a in &r.assumptions {
        report.assume(a.clone());
    }
    if !r.is_certified() {
        report.fail(Failure {
            id: id.into(),
            kind: FailureKind::Certification,
            message: format!("{}: {}", r.status, r.claim),
            details: witness_details(r),
        });
    }
}

/// Adds a recomputed table entry.
pub fn add_table_check(report: &mut Report, id: &str, c: &TableCheck) {
    let status = if c.passed() {
        RowStatus::Certified
    } else if c.certification.status == CertStatus::Refuted {
        RowStatus::Refuted
    } else {
        RowStatus::Failed
    };
    let mut row = ReportRow::new(id, status, c.claim.to_string())
        .field(c.claim.field)
        .detail("label", &c.label)
        .detail("envelope", c.certification.status)
        .detail("envelope_n_max", c.certification.n_max)
        .detail("envelope_blocks", c.certification.blocks_checked)
        .detail("envelope_bits", c.certification.precision_used);
    if let Some(p) = &c.recomputed {
        row = row.interval(p);
    }
    if let Some(p) = &c.printed {
        row = row.reference(p.to_string());
    }
    if let Some(r) = &c.rounded {
        row = row.detail("rounded", r);
    }
    if let Some(m) = c.digits_match {
        row = row.detail("digits_match", m);
    }
    if let Some(u) = c.upper_bound_ok {
        row = row.detail("upper_bound_ok", u);
    }
    if let Some(p) = &c.base_provenance {
        row = row.detail("base_provenance", p);
    }
    report.push(row);
    for a in &c.certification.assumptions {
        report.assume(a.clone());
    }
    if !c.passed() {
        let mut details = witness_details(&c.certification);
        if let Some(m) = c.digits_match {
            details.insert("digits_match".into(), m.to_string());
        }
        if let Some(u) = c.upper_bound_ok {
            details.insert("upper_bound_ok".into(), u.to_string());
        }
        report.fail(Failure {
            id: id.into(),
            kind: FailureKind::Certification,
            message: format!("table check failed: {}", c.claim),
            details,
        });
    }
}

/// Adds an empirical batch as one row, plus one failure per violation.
pub fn add_batch(report: &mut Report, id: &str, b: &BatchResult) {
    let status = if b.passed() { RowStatus::Passed } else { RowStatus::Failed };
    let mut row = ReportRow::new(id, status, format!("max ratio, n = {}, N = {}", b.arity, b.dim))
        .field(b.field)
        .reference(&b.bound.label)
        .detail("max_ratio", format!("{:.15e}", b.max_ratio))
        .detail("bound", format!("{:.15e}", b.bound.value))
        .detail("trials", b.trials)
        .detail("seed", b.seed)
        .detail("argmax_trial", b.argmax_trial)
        .detail("cap_reached", b.cap_reached)
        .detail("violations", b.violations.len());
    if let Some(s) = b.argmax_seed {
        row = row.detail("argmax_seed", s);
    }
    if let Some(l) = b.littlewood_ratio {
        row = row.detail("littlewood_ratio", format!("{l:.15e}"));
    }
    report.push(row);
    for v in &b.violations {
        let mut details = BTreeMap::new();
        details.insert("trial".into(), v.trial.to_string());
        details.insert("ratio".into(), format!("{:.15e}", v.ratio));
        if let Some(s) = v.seed {
            details.insert("seed".into(), s.to_string());
        }
        report.fail(Failure {
            id: id.into(),
            kind: FailureKind::OracleViolation,
            message: format!("ratio {:.15e} exceeds {}", v.ratio, b.bound.label),
            details,
        });
    }
    if b.field == FieldTag::Complex {
        report.assume("complex sup norms come from ascent (lower bounds), so complex ratios are upper estimates");
    }
    report.assume("sup over the open polydisc equals the max over its closure");
}
