use std::time::Instant;

use bhbound::bounds::{
    self, certify_envelope, crossover, bounded_base, envelope_claims, implied_base, claimed_exponent,
    printed_tables, table_checks, theorem_claim, BoundClaim, BoundsError, Coefficient, Relation,
};
use bhbound::forms::{self, sequence_bound, BatchBound, verify_batch, FormsError, OracleOptions};
use bhbound::precision::{
    compare_strict, d_constant, euler_gamma, log2_d, sqrt2, two_over_sqrt_pi, Comparison,
    Decimal, FieldTag, PrecisionError,
};
use bhbound::report::{self, Failure, FailureKind, Report, ReportRow, RowStatus};
use bhbound::sequences::{BaseConstants, SequenceError, SequenceSpec};

use crate::config::{ClaimChoice, Command, RunConfig, SequenceChoice};

#[derive(Debug)]
pub enum RunError {
    /// Bad flags, config or input files.
    Usage(String),
    /// A computation failed outright.
    Compute(String),
}

impl From<SequenceError> for RunError {
    fn from(e: SequenceError) -> Self {
        match e {
            SequenceError::Config(_) | SequenceError::Io(_) | SequenceError::MissingBase { .. } => {
                RunError::Usage(e.to_string())
            }
            _ => RunError::Compute(e.to_string()),
        }
    }
}

impl From<BoundsError> for RunError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Sequence(s) => s.into(),
            BoundsError::Config(_) | BoundsError::Domain(_) => RunError::Usage(e.to_string()),
            BoundsError::Precision(_) => RunError::Compute(e.to_string()),
        }
    }
}

impl From<PrecisionError> for RunError {
    fn from(e: PrecisionError) -> Self {
        match e {
            PrecisionError::Parse(_) => RunError::Usage(e.to_string()),
            _ => RunError::Compute(e.to_string()),
        }
    }
}

impl From<FormsError> for RunError {
    fn from(e: FormsError) -> Self {
        match e {
            FormsError::Sequence(s) => s.into(),
            _ => RunError::Usage(e.to_string()),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    let start = Instant::now();
    let mut report = Report::new(cfg.command.name());
    report.parameter("precision_bits", cfg.precision_bits);
    match cfg.command {
        Command::Constants => constants(cfg, &mut report)?,
        Command::Certify => certify(cfg, &mut report)?,
        Command::Table => table(cfg, &mut report)?,
        Command::VerifyForms => verify_forms(cfg, &mut report)?,
        Command::Crossover => crossover_cmd(cfg, &mut report)?,
    }
    report.finish(start.elapsed());
    Ok(report)
}

fn load_bases(cfg: &RunConfig) -> Result<Vec<BaseConstants>, RunError> {
    let mut out = Vec::new();
    for p in &cfg.base_paths {
        out.push(BaseConstants::load(p)?);
    }
    Ok(out)
}

fn constants(cfg: &RunConfig, report: &mut Report) -> Result<(), RunError> {
    let p = cfg.precision_bits;
    report.push(ReportRow::new("gamma", RowStatus::Info, "Euler-Mascheroni constant").interval(&euler_gamma(p)?));
    for field in FieldTag::ALL {
        let formula = match field {
            FieldTag::Real => "e^(1 - gamma/2) / sqrt(2)",
            FieldTag::Complex => "e^(1/2 - gamma/2)",
        };
        report.push(
            ReportRow::new(format!("d_{field}"), RowStatus::Info, format!("D = {formula}"))
                .field(field)
                .interval(&d_constant(field, p)?),
        );
    }
    for field in FieldTag::ALL {
        let l = log2_d(field, p)?;
        let e = claimed_exponent(field);
        let status = match compare_strict(&l, &bhbound::CertifiedInterval::from_decimal(&e, p)) {
            Comparison::CertifiedLess => RowStatus::Certified,
            Comparison::CertifiedGreater => RowStatus::Refuted,
            Comparison::Inconclusive => RowStatus::Inconclusive,
        };
        report.push(
            ReportRow::new(format!("log2_d_{field}"), status, "log2 D")
                .field(field)
                .interval(&l)
                .reference(format!("< {e}")),
        );
        if !status.is_ok() {
            report.fail(Failure {
                id: format!("log2_d_{field}"),
                kind: FailureKind::Certification,
                message: format!("log2 D not certified below {e}"),
                details: Default::default(),
            });
        }
    }
    report.push(ReportRow::new("sqrt2", RowStatus::Info, "sqrt(2)").interval(&sqrt2(p)));
    report.push(ReportRow::new("two_over_sqrt_pi", RowStatus::Info, "2/sqrt(pi)").interval(&two_over_sqrt_pi(p)));
    report.assume("gamma comes from an embedded literal cross-checked against an Euler-Maclaurin enclosure");
    Ok(())
}

fn parse_claim_triple(s: &str, field: FieldTag, label: &str) -> Result<BoundClaim, RunError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [p, e, t] = parts.as_slice() else {
        return Err(RunError::Usage(format!("{label}: expected P:E:T, got {s:?}")));
    };
    let prefactor: Coefficient = p.parse()?;
    let exponent: Decimal = e.parse()?;
    let threshold: u64 = t
        .trim()
        .parse()
        .map_err(|_| RunError::Usage(format!("{label}: bad threshold {t:?}")))?;
    Ok(BoundClaim::new(field, prefactor, exponent, threshold, Relation::Lt, label)?)
}

fn chosen_claim(cfg: &RunConfig) -> Result<BoundClaim, RunError> {
    let claims = envelope_claims();
    let real = cfg.field == FieldTag::Real;
    let claim = match cfg.claim {
        ClaimChoice::Envelope => claims[if real { 0 } else { 1 }].clone(),
        ClaimChoice::Theorem if real => theorem_claim(),
        ClaimChoice::Theorem => {
            return Err(RunError::Usage("the theorem claim is for real scalars".into()))
        }
        ClaimChoice::Estimate => claims[if real { 2 } else { 3 }].clone(),
    };
    let prefactor = match &cfg.prefactor {
        Some(s) => s.parse()?,
        None => claim.prefactor.clone(),
    };
    let exponent = match &cfg.exponent {
        Some(s) => s.parse()?,
        None => claim.exponent.clone(),
    };
    let overridden = cfg.prefactor.is_some() || cfg.exponent.is_some() || cfg.threshold.is_some();
    let source = if overridden {
        format!("{} (overridden)", claim.source)
    } else {
        claim.source.clone()
    };
    Ok(BoundClaim::new(
        cfg.field,
        prefactor,
        exponent,
        cfg.threshold.unwrap_or(claim.threshold),
        claim.relation,
        source,
    )?)
}

/// Default base for J-sequence runs of the chosen claim.
fn default_base(cfg: &RunConfig) -> Result<BaseConstants, RunError> {
    match (cfg.claim, cfg.field) {
        (ClaimChoice::Estimate, field) => {
            let t = envelope_claims()[if field == FieldTag::Real { 2 } else { 3 }].threshold;
            let row = printed_tables()
                .into_iter()
                .find(|r| r.field() == field && r.claim.threshold == t)
                .expect("estimate row");
            Ok(implied_base(&row, cfg.precision_bits)?)
        }
        (_, FieldTag::Real) => Ok(bounded_base(4)?),
        (_, FieldTag::Complex) => Err(RunError::Usage(
            "J-sequence runs for complex scalars need --base".into(),
        )),
    }
}

fn certify(cfg: &RunConfig, report: &mut Report) -> Result<(), RunError> {
    let claim = chosen_claim(cfg)?;
    let kind = cfg.sequence.unwrap_or(match cfg.claim {
        ClaimChoice::Envelope if cfg.base_paths.is_empty() => SequenceChoice::M,
        _ => SequenceChoice::J,
    });
    let seq = match kind {
        SequenceChoice::M => SequenceSpec::m(cfg.field),
        SequenceChoice::J => {
            let mut bases = load_bases(cfg)?;
            let base = match bases.len() {
                0 => default_base(cfg)?,
                1 => bases.remove(0),
                _ => return Err(RunError::Usage("certify takes a single --base".into())),
            };
            if base.field() != cfg.field {
                return Err(RunError::Usage(format!(
                    "base is for {} scalars but --field is {}",
                    base.field(),
                    cfg.field
                )));
            }
            if let Some(top) = base.top() {
                report.parameter("base_provenance", &top.provenance);
            }
            SequenceSpec::j(base)
        }
    };
    report.parameter("field", cfg.field);
    report.parameter("n_max", cfg.n_max);
    report.parameter("sequence", seq.describe());
    let result = certify_envelope(&claim, &seq, cfg.n_max, cfg.precision_bits)?;
    report::add_certification(report, "claim", &result);
    Ok(())
}

fn table(cfg: &RunConfig, report: &mut Report) -> Result<(), RunError> {
    let bases = load_bases(cfg)?;
    report.parameter("field", cfg.field);
    report.parameter("n_max", cfg.n_max);
    let checks = table_checks(cfg.field, cfg.n_max, &bases, cfg.precision_bits)?;
    for (i, c) in checks.iter().enumerate() {
        report::add_table_check(report, &format!("row{:02}", i + 1), c);
    }
    report.assume("table rows with implied bases check self-consistency of the printed digits, not the external constants");
    if let Some(dir) = &cfg.emit_bases {
        std::fs::create_dir_all(dir)
            .map_err(|e| RunError::Usage(format!("cannot create {}: {e}", dir.display())))?;
        for row in printed_tables().iter().filter(|r| r.field() == cfg.field) {
            let base = implied_base(row, cfg.precision_bits)?;
            base.save(&dir.join(format!("{}_k{}_implied.toml", cfg.field, row.k0)))?;
        }
        if cfg.field == FieldTag::Real {
            bounded_base(4)?.save(&dir.join("real_k4_bound.toml"))?;
        }
    }
    Ok(())
}

fn verify_forms(cfg: &RunConfig, report: &mut Report) -> Result<(), RunError> {
    report.parameter("field", cfg.field);
    report.parameter("arity", cfg.arity);
    report.parameter("dim", cfg.dim);
    report.parameter("seed", cfg.seed);
    report.parameter("trials", cfg.trials);
    let opts = OracleOptions::default();
    if cfg.field == FieldTag::Real && cfg.arity * cfg.dim > opts.vertex_cap {
        return Err(RunError::Usage(format!(
            "n * N = {} exceeds the vertex enumeration cap {}",
            cfg.arity * cfg.dim,
            opts.vertex_cap
        )));
    }
    // an overridden claim replaces M_n as the bound on the ratio
    let bound = if cfg.prefactor.is_some() || cfg.exponent.is_some() {
        let claim = chosen_claim(cfg)?;
        let v = claim.value_at(cfg.arity as u64, cfg.precision_bits)?;
        BatchBound {
            value: v.to_f64_bounds().1,
            label: format!("{} at n = {}", claim, cfg.arity),
        }
    } else {
        sequence_bound(cfg.field, cfg.arity)?
    };
    let result = verify_batch(cfg.arity, cfg.dim, cfg.field, cfg.trials, cfg.seed, &bound, &opts)?;
    report::add_batch(report, "batch", &result);
    report.assume(format!(
        "ratios are compared with the bound up to a relative float slack of {:e}",
        forms::RATIO_SLACK
    ));
    Ok(())
}

fn crossover_cmd(cfg: &RunConfig, report: &mut Report) -> Result<(), RunError> {
    let field = cfg.field;
    let a = match &cfg.a {
        Some(s) => parse_claim_triple(s, field, "a")?,
        None if field == FieldTag::Real => theorem_claim(),
        None => printed_tables()
            .into_iter()
            .find(|r| r.field() == field && r.k0 == 6)
            .expect("row")
            .claim,
    };
    let b = match &cfg.b {
        Some(s) => parse_claim_triple(s, field, "b")?,
        None => envelope_claims()[if field == FieldTag::Real { 0 } else { 1 }].clone(),
    };
    report.parameter("field", field);
    report.parameter("a", &a);
    report.parameter("b", &b);
    let n = crossover(&a, &b, cfg.precision_bits)?;
    let row = ReportRow::new("crossover", RowStatus::Info, "smallest n with a certified below b")
        .field(field)
        .detail("n", n.map_or("none".to_string(), |n| n.to_string()))
        .detail("scan_cap", bounds::CROSSOVER_SCAN_CAP);
    report.push(row);
    Ok(())
}
