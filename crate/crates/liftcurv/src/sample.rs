//! Deterministic, seeded sampling of tangent-bundle points.
//!
//! All experiment drivers draw their evaluation points from here so that a
//! seed fully determines the sample set. Points respect the base chart
//! domain and, when requested, stay away from the zero section by `y_min`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::base::{BaseGeometry, TangentPoint};
use crate::jet::ParamFamily;
use crate::lift::{energy_density, LiftedPoint};
use crate::{Error, Result};

/// Default keep-away distance from the zero section for families that only
/// live on the bundle of nonzero tangent vectors.
pub const DEFAULT_Y_MIN: f64 = 1e-3;

/// Sampling ranges and counts; deserializable from config.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SamplerSpec {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Half-width of the uniform x-coordinate box around the origin.
    #[serde(default = "default_x_range")]
    pub x_range: f64,
    /// Max Euclidean norm of the sampled y (min is `y_min`).
    #[serde(default = "default_y_range")]
    pub y_range: f64,
    /// Min Euclidean norm of the sampled y; 0 allows the zero section.
    #[serde(default = "default_y_min")]
    pub y_min: f64,
}

fn default_count() -> usize {
    100
}
fn default_seed() -> u64 {
    42
}
fn default_x_range() -> f64 {
    0.5
}
fn default_y_range() -> f64 {
    1.5
}
fn default_y_min() -> f64 {
    DEFAULT_Y_MIN
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec {
            count: default_count(),
            seed: default_seed(),
            x_range: default_x_range(),
            y_range: default_y_range(),
            y_min: default_y_min(),
        }
    }
}

/// Seeded point sampler over a base geometry.
pub struct Sampler {
    spec: SamplerSpec,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(spec: SamplerSpec) -> Sampler {
        let rng = ChaCha8Rng::seed_from_u64(spec.seed);
        Sampler { spec, rng }
    }

    pub fn spec(&self) -> &SamplerSpec {
        &self.spec
    }

    /// Draw one point inside the chart with ‖y‖ in [y_min, y_range].
    /// Rejection-samples the chart predicate (at most 1000 attempts).
    pub fn point(&mut self, base: &BaseGeometry) -> Result<TangentPoint> {
        let n = base.dim();
        for _ in 0..1000 {
            let x: Vec<f64> = (0..n)
                .map(|_| self.rng.gen_range(-self.spec.x_range..self.spec.x_range))
                .collect();
            if !base.in_chart(&x) {
                continue;
            }
            let mut y: Vec<f64> = (0..n).map(|_| self.rng.gen_range(-1.0..1.0f64)).collect();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-9 {
                continue;
            }
            let lo = self.spec.y_min.max(1e-12);
            let target = self.rng.gen_range(lo..self.spec.y_range.max(lo * 2.0));
            for v in &mut y {
                *v *= target / norm;
            }
            return Ok(TangentPoint::new(x, y));
        }
        Err(Error::Domain("sampler failed to find a chart point".into()))
    }

    /// Draw a point at which the family is valid and the lifted metric is
    /// nondegenerate; rejection-samples over `point`.
    pub fn valid_point(
        &mut self,
        family: &ParamFamily,
        base: &BaseGeometry,
    ) -> Result<(TangentPoint, LiftedPoint)> {
        for _ in 0..1000 {
            let p = self.point(base)?;
            let Ok(t) = energy_density(base, &p.x, &p.y) else { continue };
            if !family.valid_at(t) {
                continue;
            }
            match LiftedPoint::new(family, base, &p.x, &p.y) {
                Ok(lp) => return Ok((p, lp)),
                Err(_) => continue,
            }
        }
        Err(Error::Degenerate(format!(
            "sampler found no nondegenerate point for family '{}'",
            family.name()
        )))
    }
}
