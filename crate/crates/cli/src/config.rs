//! Run configuration: command-line flags merged over an optional TOML file.

use std::path::{Path, PathBuf};

use bhbound::precision::{FieldTag, MAX_PRECISION, MIN_CONSTANT_BITS};
use clap::{Parser, ValueEnum};
use serde::Deserialize;

pub const DEFAULT_SEED: u64 = 20_240_101;
pub const DEFAULT_N_MAX: u64 = 1 << 20;
pub const DEFAULT_PRECISION: u32 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Certified enclosures of gamma, D, log2 D, sqrt 2 and 2/sqrt(pi).
    Constants,
    /// Certify one envelope claim against M_n or J_n.
    Certify,
    /// Recompute and check the printed prefactor tables for one field.
    Table,
    /// Randomized check of the inequality on small forms.
    VerifyForms,
    /// First n where one claim's right side drops below another's.
    Crossover,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Certify => "certify",
            Command::Table => "table",
            Command::VerifyForms => "verify-forms",
            Command::Crossover => "crossover",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// JSON document with header, rows, assumptions and failures.
    Structured,
    /// Tab-separated, one row per check, no run metadata.
    Tabular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimChoice {
    /// sqrt2 (real) or 2/sqrtpi (complex) times (n-1)^E for n > 1.
    Envelope,
    /// 1.338887 (n-1)^0.526322 for n > 16 (real only).
    Theorem,
    /// 1.30379 for n > 2^8 (real) or 0.99137 for n > 2^15 (complex).
    Estimate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceChoice {
    M,
    J,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for FieldTag {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Real => FieldTag::Real,
            FieldArg::Complex => FieldTag::Complex,
        }
    }
}

/// Certified bounds for multilinear Bohnenblust-Hille constants.
///
/// Exit status: 0 when every check passes, 2 for usage or configuration
/// errors, 3 when a claim is refuted or stays inconclusive, 4 when an
/// empirical ratio exceeds its bound.
#[derive(Parser, Debug, Default)]
#[command(name = "bhbound", version)]
pub struct Cli {
    /// What to run; may instead come from `command` in the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,

    /// TOML file supplying any of the options below; flags take priority.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Scalar field [default: real].
    #[arg(long, value_enum)]
    pub field: Option<FieldArg>,

    /// Starting precision in bits; inconclusive comparisons double it up to 1024 [default: 128].
    #[arg(long)]
    pub precision_bits: Option<u32>,

    /// Largest n covered by `certify` and the envelope rows of `table` [default: 1048576].
    #[arg(long)]
    pub n_max: Option<u64>,

    /// Base constants file; `table` accepts several, replacing implied bases with the same k0.
    #[arg(long)]
    pub base: Vec<PathBuf>,

    /// Master seed for randomized runs [default: 20240101].
    #[arg(long)]
    pub seed: Option<u64>,

    /// Number of random forms for `verify-forms` [default: 1000].
    #[arg(long)]
    pub trials: Option<u64>,

    /// Report destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Report format [default: structured].
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// Claim certified by `certify` [default: envelope].
    #[arg(long, value_enum)]
    pub claim: Option<ClaimChoice>,

    /// Override the claim's prefactor (decimal, `sqrt2` or `2/sqrtpi`). For
    /// `verify-forms`, the overridden claim at n replaces M_n as the bound.
    #[arg(long)]
    pub prefactor: Option<String>,

    /// Override the claim's exponent (decimal in (0, 1)).
    #[arg(long)]
    pub exponent: Option<String>,

    /// Override the claim's threshold T (claim covers n > T).
    #[arg(long)]
    pub threshold: Option<u64>,

    /// Sequence certified against [default: m for the envelope, j otherwise].
    #[arg(long, value_enum)]
    pub sequence: Option<SequenceChoice>,

    /// Arity n for `verify-forms` [default: 2].
    #[arg(long)]
    pub arity: Option<usize>,

    /// Dimension N for `verify-forms` [default: 2].
    #[arg(long)]
    pub dim: Option<usize>,

    /// First claim for `crossover`, as `P:E:T` [default: theorem (real), k0 = 6 row (complex)].
    #[arg(long)]
    pub a: Option<String>,

    /// Second claim for `crossover`, as `P:E:T` [default: the field's envelope].
    #[arg(long)]
    pub b: Option<String>,

    /// Directory where `table` writes the base constants it used.
    #[arg(long)]
    pub emit_bases: Option<PathBuf>,
}

/// The same options as [`Cli`], read from a file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub command: Option<Command>,
    pub field: Option<FieldArg>,
    pub precision_bits: Option<u32>,
    pub n_max: Option<u64>,
    #[serde(default)]
    pub base: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub claim: Option<ClaimChoice>,
    pub prefactor: Option<String>,
    pub exponent: Option<String>,
    pub threshold: Option<u64>,
    pub sequence: Option<SequenceChoice>,
    pub arity: Option<usize>,
    pub dim: Option<usize>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub emit_bases: Option<PathBuf>,
}

/// Fully resolved options for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub field: FieldTag,
    pub precision_bits: u32,
    pub n_max: u64,
    pub base_paths: Vec<PathBuf>,
    pub seed: u64,
    pub trials: u64,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub claim: ClaimChoice,
    pub prefactor: Option<String>,
    pub exponent: Option<String>,
    pub threshold: Option<u64>,
    pub sequence: Option<SequenceChoice>,
    pub arity: usize,
    pub dim: usize,
    pub a: Option<String>,
    pub b: Option<String>,
    pub emit_bases: Option<PathBuf>,
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn read_file(path: &Path) -> Result<FileConfig, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg: FileConfig = toml::from_str(&text)
        .map_err(|e| UsageError(format!("{}: {}", path.display(), e.message())))?;
    // relative paths in the file are relative to the file
    let dir = path.parent().unwrap_or(Path::new("."));
    let fix = |p: PathBuf| if p.is_relative() { dir.join(p) } else { p };
    cfg.base = cfg.base.into_iter().map(fix).collect();
    cfg.out = cfg.out.map(fix);
    cfg.emit_bases = cfg.emit_bases.map(fix);
    Ok(cfg)
}

impl RunConfig {
    pub fn resolve(cli: Cli) -> Result<Self, UsageError> {
        let file = match &cli.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let command = cli
            .command
            .or(file.command)
            .ok_or_else(|| UsageError("no command given (flag or `command` in --config)".into()))?;
        let field: FieldTag = cli.field.or(file.field).unwrap_or(FieldArg::Real).into();
        let precision_bits = cli.precision_bits.or(file.precision_bits).unwrap_or(DEFAULT_PRECISION);
        if !(MIN_CONSTANT_BITS..=MAX_PRECISION).contains(&precision_bits) {
            return Err(UsageError(format!(
                "--precision-bits must be in {MIN_CONSTANT_BITS}..={MAX_PRECISION}, got {precision_bits}"
            )));
        }
        let n_max = cli.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX);
        if !(2..=1 << 62).contains(&n_max) {
            return Err(UsageError(format!("--n-max must be in 2..=2^62, got {n_max}")));
        }
        let trials = cli.trials.or(file.trials).unwrap_or(1000);
        if trials == 0 {
            return Err(UsageError("--trials must be positive".into()));
        }
        let arity = cli.arity.or(file.arity).unwrap_or(2);
        let dim = cli.dim.or(file.dim).unwrap_or(2);
        if arity == 0 || dim == 0 {
            return Err(UsageError("--arity and --dim must be positive".into()));
        }
        let base_paths = if cli.base.is_empty() { file.base } else { cli.base };
        Ok(Self {
            command,
            field,
            precision_bits,
            n_max,
            base_paths,
            seed: cli.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            trials,
            output_path: cli.out.or(file.out),
            output_format: cli.format.or(file.format).unwrap_or(OutputFormat::Structured),
            claim: cli.claim.or(file.claim).unwrap_or(ClaimChoice::Envelope),
            prefactor: cli.prefactor.or(file.prefactor),
            exponent: cli.exponent.or(file.exponent),
            threshold: cli.threshold.or(file.threshold),
            sequence: cli.sequence.or(file.sequence),
            arity,
            dim,
            a: cli.a.or(file.a),
            b: cli.b.or(file.b),
            emit_bases: cli.emit_bases.or(file.emit_bases),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "command = \"certify\"\nfield = \"complex\"\nn-max = 64\nbase = [\"b.toml\"]\n").unwrap();
        let cli = Cli {
            config: Some(path.clone()),
            n_max: Some(128),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(cli).unwrap();
        assert_eq!(cfg.command, Command::Certify);
        assert_eq!(cfg.field, FieldTag::Complex);
        assert_eq!(cfg.n_max, 128);
        assert_eq!(cfg.base_paths, vec![dir.path().join("b.toml")]);
    }

    #[test]
    fn rejects_bad_values() {
        let cli = Cli {
            command: Some(Command::Constants),
            precision_bits: Some(4096),
            ..Default::default()
        };
        assert!(RunConfig::resolve(cli).is_err());
        assert!(RunConfig::resolve(Cli::default()).is_err());
    }

    #[test]
    fn unknown_file_keys_are_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "comand = \"certify\"\n").unwrap();
        let cli = Cli {
            config: Some(path),
            ..Default::default()
        };
        assert!(RunConfig::resolve(cli).is_err());
    }
}
