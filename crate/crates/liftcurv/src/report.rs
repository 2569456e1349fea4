//! Machine-readable experiment reports.
//!
//! Reports serialize to JSON with a fixed field order (struct order plus
//! sorted maps) and carry no timestamps, so identical configurations and
//! seeds produce byte-identical artifacts. Aggregation over sample points
//! uses only max/count folds and is therefore order-independent.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::base::BaseGeometry;
use crate::curv::CurvBlocks;
use crate::families::FamilySpec;
use crate::jet::ParamFamily;
use crate::lemmas::{self, LemmaKind};
use crate::oracle;
use crate::sample::{Sampler, SamplerSpec};
use crate::weyl::{self, Verdict, FLAT_TOL, NONFLAT_TOL};
use crate::{Error, FormulaVariant, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Names of the twelve curvature/Weyl blocks, in serialization order.
pub const BLOCK_NAMES: [&str; 12] = [
    "xxxx", "xxxy", "xxyx", "xxyy", "yyxx", "yyxy", "yyyx", "yyyy", "yxxx", "yxxy",
    "yxyx", "yxyy",
];

/// Per-block sup norms as a sorted name → value map.
pub fn block_supnorms(w: &CurvBlocks) -> BTreeMap<String, f64> {
    let arrays = [
        &w.xxxx, &w.xxxy, &w.xxyx, &w.xxyy, &w.yyxx, &w.yyxy, &w.yyyx, &w.yyyy,
        &w.yxxx, &w.yxxy, &w.yxyx, &w.yxyy,
    ];
    BLOCK_NAMES
        .iter()
        .zip(arrays)
        .map(|(name, a)| {
            (name.to_string(), a.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
        })
        .collect()
}

fn worst_block(norms: &BTreeMap<String, f64>) -> (String, f64) {
    let mut best = ("".to_string(), -1.0);
    for name in BLOCK_NAMES {
        let v = norms[name];
        if v > best.1 {
            best = (name.to_string(), v);
        }
    }
    best
}

/// One sampled point's Weyl measurement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointResult {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
    pub supnorm: f64,
    pub scaled_residual: f64,
    pub worst_block: String,
}

/// Conformal-flatness measurement of one family on one base.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub schema_version: u32,
    pub kind: String,
    pub family: String,
    pub base: String,
    pub dim: usize,
    pub variant: FormulaVariant,
    pub seed: u64,
    pub samples_requested: usize,
    pub samples_evaluated: usize,
    pub y_min: f64,
    pub flat_tol: f64,
    pub nonflat_tol: f64,
    pub block_supnorms: BTreeMap<String, f64>,
    pub supnorm: f64,
    /// Max over points of the condition-scaled Weyl residual; the verdict
    /// compares this against the tolerances.
    pub max_scaled_residual: f64,
    pub worst_block: String,
    pub worst_point: Option<PointResult>,
    pub verdict: Verdict,
}

/// Evaluate the Weyl blocks of `family` over sampled points of `base` and
/// aggregate into a flatness verdict.
pub fn run_flatness(
    variant: FormulaVariant,
    family: &ParamFamily,
    base: &BaseGeometry,
    base_key: &str,
    spec: &SamplerSpec,
) -> Result<FlatnessReport> {
    let mut sampler = Sampler::new(spec.clone());
    let mut agg: BTreeMap<String, f64> =
        BLOCK_NAMES.iter().map(|n| (n.to_string(), 0.0)).collect();
    let mut worst: Option<PointResult> = None;
    let mut max_scaled = 0.0f64;
    let mut evaluated = 0usize;
    for _ in 0..spec.count {
        let (p, lp) = sampler.valid_point(family, base)?;
        let data = weyl::weyl_at(variant, family, base, &p.x, &p.y)?;
        let norms = block_supnorms(&data.weyl);
        for (k, v) in &norms {
            let slot = agg.get_mut(k).expect("known block name");
            *slot = slot.max(*v);
        }
        max_scaled = max_scaled.max(data.scaled_residual);
        let (wb, _) = worst_block(&norms);
        if worst
            .as_ref()
            .map(|w| data.scaled_residual > w.scaled_residual)
            .unwrap_or(true)
        {
            worst = Some(PointResult {
                x: p.x.clone(),
                y: p.y.clone(),
                t: lp.t,
                supnorm: data.supnorm,
                scaled_residual: data.scaled_residual,
                worst_block: wb,
            });
        }
        evaluated += 1;
    }
    if evaluated == 0 {
        return Err(Error::Config("no samples requested".into()));
    }
    let (wb, sup) = worst_block(&agg);
    Ok(FlatnessReport {
        schema_version: SCHEMA_VERSION,
        kind: "conformal-flatness".into(),
        family: family.name().to_string(),
        base: base_key.to_string(),
        dim: base.dim(),
        variant,
        seed: spec.seed,
        samples_requested: spec.count,
        samples_evaluated: evaluated,
        y_min: spec.y_min,
        flat_tol: FLAT_TOL,
        nonflat_tol: NONFLAT_TOL,
        block_supnorms: agg,
        supnorm: sup,
        max_scaled_residual: max_scaled,
        worst_block: wb,
        worst_point: worst,
        verdict: weyl::verdict(max_scaled),
    })
}

/// One sampled point's analytic-vs-finite-difference comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OraclePointResult {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub christoffel_rel: f64,
    pub riemann_rel: f64,
}

/// Cross-pipeline comparison report: adapted-frame connection and curvature
/// pushed to induced coordinates versus the finite-difference pipeline.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleDiffReport {
    pub schema_version: u32,
    pub kind: String,
    pub family: String,
    pub base: String,
    pub dim: usize,
    pub variant: FormulaVariant,
    pub seed: u64,
    pub samples_evaluated: usize,
    pub tolerance: f64,
    pub max_christoffel_rel: f64,
    pub max_riemann_rel: f64,
    pub pass: bool,
    pub worst_point: Option<OraclePointResult>,
}

pub fn run_oracle_diff(
    variant: FormulaVariant,
    family: &ParamFamily,
    base: &BaseGeometry,
    base_key: &str,
    spec: &SamplerSpec,
    tolerance: f64,
) -> Result<OracleDiffReport> {
    let mut sampler = Sampler::new(spec.clone());
    let mut max_gamma = 0.0f64;
    let mut max_riem = 0.0f64;
    let mut worst: Option<OraclePointResult> = None;
    let mut evaluated = 0usize;
    for _ in 0..spec.count {
        let (p, _) = sampler.valid_point(family, base)?;
        let dg = oracle::connection_vs_oracle(variant, family, base, &p.x, &p.y)?;
        let dr = oracle::curvature_vs_oracle(variant, family, base, &p.x, &p.y)?;
        max_gamma = max_gamma.max(dg);
        max_riem = max_riem.max(dr);
        let score = dg.max(dr);
        let prev = worst
            .as_ref()
            .map(|w| w.christoffel_rel.max(w.riemann_rel))
            .unwrap_or(-1.0);
        if score > prev {
            worst = Some(OraclePointResult {
                x: p.x.clone(),
                y: p.y.clone(),
                christoffel_rel: dg,
                riemann_rel: dr,
            });
        }
        evaluated += 1;
    }
    if evaluated == 0 {
        return Err(Error::Config("no samples requested".into()));
    }
    Ok(OracleDiffReport {
        schema_version: SCHEMA_VERSION,
        kind: "oracle-diff".into(),
        family: family.name().to_string(),
        base: base_key.to_string(),
        dim: base.dim(),
        variant,
        seed: spec.seed,
        samples_evaluated: evaluated,
        tolerance,
        max_christoffel_rel: max_gamma,
        max_riemann_rel: max_riem,
        pass: max_gamma <= tolerance && max_riem <= tolerance,
        worst_point: worst,
    })
}

/// Rank statistics for one monomial-system lemma over random draws.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaReport {
    pub schema_version: u32,
    pub kind: String,
    pub lemma: String,
    pub dim: usize,
    pub seed: u64,
    pub draws: usize,
    pub expected_rank: usize,
    pub observed_ranks: BTreeMap<String, usize>,
    pub full_rank_draws: usize,
    pub pass: bool,
}

pub fn run_lemma(lemma: LemmaKind, n: usize, draws: usize, seed: u64) -> Result<LemmaReport> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut observed: BTreeMap<String, usize> = BTreeMap::new();
    let mut full = 0usize;
    for _ in 0..draws {
        let (g, y) = lemmas::random_metric_and_vector(n, &mut rng);
        let v = lemmas::lemma_rank(lemma, &g, &y)?;
        *observed.entry(v.rank.to_string()).or_insert(0) += 1;
        if v.full_rank {
            full += 1;
        }
    }
    let name = match lemma {
        LemmaKind::Lemma1 => "lemma1",
        LemmaKind::Lemma1Remark => "lemma1_remark",
        LemmaKind::Lemma2 => "lemma2",
    };
    Ok(LemmaReport {
        schema_version: SCHEMA_VERSION,
        kind: "lemma-rank".into(),
        lemma: name.into(),
        dim: n,
        seed,
        draws,
        expected_rank: lemma.expected_rank(),
        observed_ranks: observed,
        full_rank_draws: full,
        pass: full == draws,
    })
}

/// Build the family + base pair named by a run configuration fragment.
pub fn build_setup(
    family: &FamilySpec,
    base_key: &str,
    dim: usize,
) -> Result<(ParamFamily, BaseGeometry)> {
    let fam = crate::families::build_family(family)?;
    let base = BaseGeometry::parse(base_key, dim)?;
    Ok((fam, base))
}

/// Render any report produced by this module as a short human-readable
/// summary (used by the `report` subcommand).
pub fn render_summary(json: &serde_json::Value) -> Result<String> {
    let kind = json
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Config("report file has no 'kind' field".into()))?;
    let mut out = String::new();
    let push = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    match kind {
        "conformal-flatness" => {
            if json
                .get("samples_evaluated")
                .and_then(|v| v.as_u64())
                .unwrap_or(0)
                == 0
            {
                return Err(Error::Config("no samples in report".into()));
            }
            push(&mut out, format!(
                "conformal-flatness  family={}  base={}  dim={}  variant={}",
                json["family"].as_str().unwrap_or("?"),
                json["base"].as_str().unwrap_or("?"),
                json["dim"],
                json["variant"].as_str().unwrap_or("?"),
            ));
            push(&mut out, format!(
                "verdict={}  supnorm={:e}  scaled_residual={:e}  worst_block={}  seed={}",
                json["verdict"].as_str().unwrap_or("?"),
                json["supnorm"].as_f64().unwrap_or(f64::NAN),
                json["max_scaled_residual"].as_f64().unwrap_or(f64::NAN),
                json["worst_block"].as_str().unwrap_or("?"),
                json["seed"],
            ));
            if let Some(map) = json["block_supnorms"].as_object() {
                for (k, v) in map {
                    push(&mut out, format!("  {k}: {:e}", v.as_f64().unwrap_or(f64::NAN)));
                }
            }
        }
        "oracle-diff" => {
            push(&mut out, format!(
                "oracle-diff  family={}  base={}  dim={}  variant={}",
                json["family"].as_str().unwrap_or("?"),
                json["base"].as_str().unwrap_or("?"),
                json["dim"],
                json["variant"].as_str().unwrap_or("?"),
            ));
            push(&mut out, format!(
                "pass={}  max_christoffel_rel={:e}  max_riemann_rel={:e}  tol={:e}",
                json["pass"],
                json["max_christoffel_rel"].as_f64().unwrap_or(f64::NAN),
                json["max_riemann_rel"].as_f64().unwrap_or(f64::NAN),
                json["tolerance"].as_f64().unwrap_or(f64::NAN),
            ));
        }
        "lemma-rank" => {
            push(&mut out, format!(
                "lemma-rank  lemma={}  dim={}  draws={}  expected_rank={}",
                json["lemma"].as_str().unwrap_or("?"),
                json["dim"],
                json["draws"],
                json["expected_rank"],
            ));
            push(&mut out, format!(
                "pass={}  full_rank_draws={}  observed={}",
                json["pass"], json["full_rank_draws"], json["observed_ranks"],
            ));
        }
        other => {
            return Err(Error::Config(format!("unknown report kind '{other}'")));
        }
    }
    Ok(out)
}

/// Serialize a report with the stable field order.
pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    serde_json::to_string_pretty(report)
        .map_err(|e| Error::Config(format!("report serialization failed: {e}")))
}
