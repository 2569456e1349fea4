//! Numerical Riemannian geometry of tangent bundles carrying a general
//! natural lifted metric.
//!
//! The lifted metric is built from six scalar functions of the energy
//! density. The crate evaluates, at a point of TM, the metric blocks and
//! their inverse, the Levi-Civita connection coefficients in the adapted
//! frame, the twelve curvature blocks, Ricci and scalar curvature, and the
//! Weyl conformal curvature blocks. An independent coordinate-frame
//! finite-difference pipeline ([`oracle`]) validates every transcribed
//! formula, and [`families`] provides the metric families that make the
//! tangent bundle conformally flat over a flat base.

pub mod base;
pub mod conn;
pub mod curv;
pub mod families;
pub mod jet;
pub mod lemmas;
pub mod lift;
pub mod oracle;
pub mod report;
pub mod sample;
pub mod weyl;

pub use base::{BaseGeometry, BaseKind};
pub use jet::{Jet3, ParamFamily, ScalarFn};

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate metric: {0}")]
    Degenerate(String),
    #[error("invalid dimension: {0}")]
    Dimension(String),
    #[error("chart domain violation: {0}")]
    Chart(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Which transcription of the adapted-frame formulas to evaluate.
///
/// A handful of printed terms disagree with the coordinate-frame oracle
/// (see FORMULA_NOTES.md). The corrected variant is the default; the
/// printed one is kept for inspection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaVariant {
    #[default]
    OracleCorrected,
    Printed,
}

impl std::fmt::Display for FormulaVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormulaVariant::OracleCorrected => write!(f, "oracle-corrected"),
            FormulaVariant::Printed => write!(f, "printed"),
        }
    }
}
