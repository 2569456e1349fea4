use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use liftcurv::families::{build_family_variant, FamilySpec};
use liftcurv::lemmas::LemmaKind;
use liftcurv::report::{self, to_json};
use liftcurv::sample::SamplerSpec;
use liftcurv::weyl::Verdict;
use liftcurv::{BaseGeometry, Error, FormulaVariant};

/// Numerical verification of lifted-metric geometry on tangent bundles:
/// connection, curvature, and Weyl conformal flatness in the adapted frame,
/// cross-checked against a finite-difference coordinate pipeline.
#[derive(Parser)]
#[command(name = "liftcurv", version)]
struct Cli {
    /// TOML config file supplying defaults for the run options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named family and assert its conformal-flatness verdict
    /// (flat by default; non-flat with --contrapositive).
    VerifyTheorem {
        /// Family name (thm41_form1, thm41_form2, thm42, cor43, thm44, ...).
        name: String,
        /// Assert a NON-flat verdict instead (e.g. a flat-base family run
        /// on a non-flat base must fail to be conformally flat).
        #[arg(long)]
        contrapositive: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare the adapted-frame connection and curvature against the
    /// finite-difference coordinate pipeline.
    OracleDiff {
        #[command(flatten)]
        run: RunArgs,
        /// Max allowed relative difference.
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
    },
    /// Measure Weyl block sup-norms without asserting a verdict.
    WeylNorm {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Rank check of a lemma's monomial system over random draws.
    LemmaRank {
        /// Which system: lemma1, lemma1_remark, or lemma2.
        which: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Render a previously written JSON report as a summary table.
    Report {
        /// Path to the JSON report file.
        path: PathBuf,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Family name (for subcommands that do not take it positionally).
    #[arg(long)]
    family: Option<String>,
    /// Base geometry: flat | flat-curvilinear | sphere:<c> | perturbed:<eps>.
    #[arg(long)]
    base: Option<String>,
    /// Base dimension n (tangent bundle dimension is 2n).
    #[arg(long)]
    dim: Option<usize>,
    /// Number of sample points / draws.
    #[arg(long)]
    samples: Option<usize>,
    /// RNG seed (env LIFTCURV_SEED overrides).
    #[arg(long)]
    seed: Option<u64>,
    /// Minimum Euclidean norm of sampled tangent vectors.
    #[arg(long)]
    y_min: Option<f64>,
    /// Formula variant: oracle-corrected (default) or printed.
    #[arg(long)]
    variant: Option<String>,
    /// Constant k of the families that use one.
    #[arg(long)]
    k: Option<f64>,
    /// Constant ε of the families that use one.
    #[arg(long)]
    eps: Option<f64>,
    /// Polynomial coefficients of α, ascending degree, comma-separated.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Polynomial coefficients of β.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// Polynomial coefficients of γ.
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Config-file counterpart of the CLI flags; flat TOML key-value schema.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    family: Option<String>,
    base: Option<String>,
    dim: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
    x_range: Option<f64>,
    y_range: Option<f64>,
    y_min: Option<f64>,
    variant: Option<String>,
    k: Option<f64>,
    eps: Option<f64>,
    alpha: Option<Vec<f64>>,
    beta: Option<Vec<f64>>,
    gamma: Option<Vec<f64>>,
    out: Option<String>,
}

/// Fully resolved run configuration: flags override config-file values,
/// which override built-in defaults; LIFTCURV_SEED overrides everything.
struct Resolved {
    family: FamilySpec,
    base_key: String,
    dim: usize,
    sampler: SamplerSpec,
    variant: FormulaVariant,
    out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<FormulaVariant, Error> {
    match s.replace('_', "-").to_lowercase().as_str() {
        "oracle-corrected" => Ok(FormulaVariant::OracleCorrected),
        "printed" => Ok(FormulaVariant::Printed),
        other => Err(Error::Config(format!(
            "unknown formula variant '{other}'; expected oracle-corrected or printed"
        ))),
    }
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig, Error> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))
}

fn resolve(
    cli_config: &Option<PathBuf>,
    run: &RunArgs,
    family_name: Option<&str>,
) -> Result<Resolved, Error> {
    let file = load_file_config(cli_config)?;
    let name = family_name
        .map(str::to_string)
        .or_else(|| run.family.clone())
        .or(file.family)
        .unwrap_or_else(|| "sasaki".to_string());
    let mut spec = FamilySpec::named(&name);
    if let Some(k) = run.k.or(file.k) {
        spec.k = k;
    }
    if let Some(eps) = run.eps.or(file.eps) {
        spec.eps = eps;
    }
    spec.alpha = run.alpha.clone().or(file.alpha);
    spec.beta = run.beta.clone().or(file.beta);
    spec.gamma = run.gamma.clone().or(file.gamma);

    let mut sampler = SamplerSpec::default();
    if let Some(c) = run.samples.or(file.samples) {
        sampler.count = c;
    }
    if let Some(s) = run.seed.or(file.seed) {
        sampler.seed = s;
    }
    if let Ok(s) = std::env::var("LIFTCURV_SEED") {
        sampler.seed = s
            .parse()
            .map_err(|_| Error::Config(format!("LIFTCURV_SEED is not an integer: {s}")))?;
    }
    if let Some(v) = file.x_range {
        sampler.x_range = v;
    }
    if let Some(v) = file.y_range {
        sampler.y_range = v;
    }
    if let Some(v) = run.y_min.or(file.y_min) {
        sampler.y_min = v;
    }
    let variant = match run.variant.clone().or(file.variant) {
        Some(s) => parse_variant(&s)?,
        None => FormulaVariant::OracleCorrected,
    };
    let dim = run.dim.or(file.dim).unwrap_or(2);
    if !(2..=5).contains(&dim) {
        return Err(Error::Config(format!(
            "dim must be between 2 and 5 (cost grows ~n^4 per point), got {dim}"
        )));
    }
    Ok(Resolved {
        family: spec,
        base_key: run
            .base
            .clone()
            .or(file.base)
            .unwrap_or_else(|| "flat".to_string()),
        dim,
        sampler,
        variant,
        out: run.out.clone().or(file.out.map(PathBuf::from)),
    })
}

fn write_out(out: &Option<PathBuf>, json: &str) -> Result<(), Error> {
    if let Some(path) = out {
        std::fs::write(path, json)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// Exit 0 on pass, 1 on assertion violation, 2 on configuration error.
fn run(cli: &Cli) -> Result<bool, Error> {
    match &cli.command {
        Command::VerifyTheorem { name, contrapositive, run } => {
            let r = resolve(&cli.config, run, Some(name))?;
            let family = build_family_variant(&r.family, r.variant)?;
            let base = BaseGeometry::parse(&r.base_key, r.dim)?;
            let expected = if *contrapositive { Verdict::NonFlat } else { Verdict::Flat };
            let rep =
                report::run_flatness(r.variant, &family, &base, &r.base_key, &r.sampler)?;
            let json = to_json(&rep)?;
            write_out(&r.out, &json)?;
            println!(
                "verify-theorem {name}: verdict={} expected={} supnorm={:e} scaled_residual={:e} worst_block={}",
                rep.verdict, expected, rep.supnorm, rep.max_scaled_residual, rep.worst_block
            );
            Ok(rep.verdict == expected)
        }
        Command::OracleDiff { run, tolerance } => {
            let r = resolve(&cli.config, run, None)?;
            let family = build_family_variant(&r.family, r.variant)?;
            let base = BaseGeometry::parse(&r.base_key, r.dim)?;
            let rep = report::run_oracle_diff(
                r.variant, &family, &base, &r.base_key, &r.sampler, *tolerance,
            )?;
            let json = to_json(&rep)?;
            write_out(&r.out, &json)?;
            println!(
                "oracle-diff {}: pass={} christoffel={:e} riemann={:e} tol={:e}",
                family.name(), rep.pass, rep.max_christoffel_rel, rep.max_riemann_rel,
                tolerance
            );
            Ok(rep.pass)
        }
        Command::WeylNorm { run } => {
            let r = resolve(&cli.config, run, None)?;
            let family = build_family_variant(&r.family, r.variant)?;
            let base = BaseGeometry::parse(&r.base_key, r.dim)?;
            let rep =
                report::run_flatness(r.variant, &family, &base, &r.base_key, &r.sampler)?;
            let json = to_json(&rep)?;
            write_out(&r.out, &json)?;
            println!(
                "weyl-norm {}: supnorm={:e} verdict={} worst_block={}",
                family.name(), rep.supnorm, rep.verdict, rep.worst_block
            );
            Ok(true)
        }
        Command::LemmaRank { which, run } => {
            let r = resolve(&cli.config, run, None)?;
            let lemma = LemmaKind::parse(which)?;
            let rep = report::run_lemma(lemma, r.dim, r.sampler.count, r.sampler.seed)?;
            let json = to_json(&rep)?;
            write_out(&r.out, &json)?;
            println!(
                "lemma-rank {}: pass={} full_rank_draws={}/{} expected_rank={}",
                rep.lemma, rep.pass, rep.full_rank_draws, rep.draws, rep.expected_rank
            );
            Ok(rep.pass)
        }
        Command::Report { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read report {}: {e}", path.display()))
            })?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
                Error::Config(format!("corrupt report {}: {e}", path.display()))
            })?;
            print!("{}", report::render_summary(&value)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
