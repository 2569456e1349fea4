//! Weyl conformal curvature: the Schouten-type L blocks, their raised N
//! blocks, the twelve Weyl blocks of the lifted metric, and the Weyl tensor
//! of the base manifold itself.
//!
//! Everything follows from the invariant formula
//! C(X,Y)Z = K(X,Y)Z + L(Y,Z)X − L(X,Z)Y + G(Y,Z)NX − G(X,Z)NY
//! on the 2n-dimensional total space, with
//! L = −1/(2(n−1))·(Ric − scal·G/(2(2n−1))) and N = L with the second index
//! raised.

use ndarray::{Array2, Array4};

use crate::base::BaseGeometry;
use crate::curv::{self, CurvBlocks, RicciBlocks};
use crate::jet::ParamFamily;
use crate::lift::LiftedPoint;
use crate::{Error, FormulaVariant, Result};

/// Sup-norm at or below which a point counts as conformally flat.
pub const FLAT_TOL: f64 = 1e-8;
/// Sup-norm above which a point counts as decisively non-flat.
pub const NONFLAT_TOL: f64 = 1e-4;

/// The four blocks of the Schouten-type tensor L of the lifted metric.
#[derive(Clone, Debug)]
pub struct SchoutenBlocks {
    pub lxx: Array2<f64>,
    pub lxy: Array2<f64>,
    pub lyx: Array2<f64>,
    pub lyy: Array2<f64>,
}

/// The L blocks with one index raised, `[h][j]` = N(E_j)^h per block.
#[derive(Clone, Debug)]
pub struct NBlocks {
    pub nxx: Array2<f64>,
    pub nxy: Array2<f64>,
    pub nyx: Array2<f64>,
    pub nyy: Array2<f64>,
}

pub fn schouten(ric: &RicciBlocks, lp: &LiftedPoint) -> SchoutenBlocks {
    let n = lp.n;
    let cl = -1.0 / (2.0 * (n as f64 - 1.0));
    let cs = 1.0 / (2.0 * (2.0 * n as f64 - 1.0));
    let mk = |r: &Array2<f64>, g: &Array2<f64>| {
        Array2::from_shape_fn((n, n), |(i, j)| cl * (r[[i, j]] - ric.scal * cs * g[[i, j]]))
    };
    SchoutenBlocks {
        lxx: mk(&ric.xx, &lp.blocks.g1),
        lxy: mk(&ric.xy, &lp.blocks.g3),
        lyx: mk(&ric.yx, &lp.blocks.g3),
        lyy: mk(&ric.yy, &lp.blocks.g2),
    }
}

pub fn n_blocks(l: &SchoutenBlocks, lp: &LiftedPoint) -> NBlocks {
    let n = lp.n;
    let (h1, h2, h3) = (&lp.inv.h1, &lp.inv.h2, &lp.inv.h3);
    let mut nxx = Array2::zeros((n, n));
    let mut nxy = Array2::zeros((n, n));
    let mut nyx = Array2::zeros((n, n));
    let mut nyy = Array2::zeros((n, n));
    for h in 0..n {
        for j in 0..n {
            for k in 0..n {
                nxx[[h, j]] += l.lxx[[j, k]] * h1[[k, h]] + l.lxy[[j, k]] * h3[[k, h]];
                nxy[[h, j]] += l.lxx[[j, k]] * h3[[k, h]] + l.lxy[[j, k]] * h2[[k, h]];
                nyx[[h, j]] += l.lyx[[j, k]] * h1[[k, h]] + l.lyy[[j, k]] * h3[[k, h]];
                nyy[[h, j]] += l.lyx[[j, k]] * h3[[k, h]] + l.lyy[[j, k]] * h2[[k, h]];
            }
        }
    }
    NBlocks { nxx, nxy, nyx, nyy }
}

/// The twelve Weyl blocks, same layout and naming as [`CurvBlocks`].
pub fn weyl_blocks(
    variant: FormulaVariant,
    k: &CurvBlocks,
    l: &SchoutenBlocks,
    nb: &NBlocks,
    lp: &LiftedPoint,
) -> CurvBlocks {
    let n = lp.n;
    let (g1, g2, g3) = (&lp.blocks.g1, &lp.blocks.g2, &lp.blocks.g3);
    let mut w = k.clone();
    for h in 0..n {
        for kk in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let di = if h == i { 1.0 } else { 0.0 };
                    let dj = if h == j { 1.0 } else { 0.0 };
                    // Two published displays carry the wrong N block in the
                    // last term (they break the invariant formula and the
                    // trace-free property); the corrected variant restores
                    // them.
                    let (xxxx_last, yxyy_last) = match variant {
                        FormulaVariant::OracleCorrected => {
                            (nb.nxx[[h, j]], nb.nxy[[h, j]])
                        }
                        FormulaVariant::Printed => (nb.nxy[[h, j]], nb.nxx[[h, j]]),
                    };
                    w.xxxx[[h, kk, i, j]] += l.lxx[[j, kk]] * di - l.lxx[[i, kk]] * dj
                        + g1[[j, kk]] * nb.nxx[[h, i]]
                        - g1[[i, kk]] * xxxx_last;
                    w.xxxy[[h, kk, i, j]] +=
                        g1[[j, kk]] * nb.nxy[[h, i]] - g1[[i, kk]] * nb.nxy[[h, j]];
                    w.xxyx[[h, kk, i, j]] += l.lxy[[j, kk]] * di - l.lxy[[i, kk]] * dj
                        + g3[[j, kk]] * nb.nxx[[h, i]]
                        - g3[[i, kk]] * nb.nxx[[h, j]];
                    w.xxyy[[h, kk, i, j]] +=
                        g3[[j, kk]] * nb.nxy[[h, i]] - g3[[i, kk]] * nb.nxy[[h, j]];
                    w.yxxx[[h, kk, i, j]] += -l.lyx[[i, kk]] * dj
                        + g1[[j, kk]] * nb.nyx[[h, i]]
                        - g3[[i, kk]] * nb.nxx[[h, j]];
                    w.yxxy[[h, kk, i, j]] += l.lxx[[j, kk]] * di
                        + g1[[j, kk]] * nb.nyy[[h, i]]
                        - g3[[i, kk]] * nb.nxy[[h, j]];
                    w.yxyx[[h, kk, i, j]] += -l.lyy[[i, kk]] * dj
                        + g3[[j, kk]] * nb.nyx[[h, i]]
                        - g2[[i, kk]] * nb.nxx[[h, j]];
                    w.yxyy[[h, kk, i, j]] += l.lxy[[j, kk]] * di
                        + g3[[j, kk]] * nb.nyy[[h, i]]
                        - g2[[i, kk]] * yxyy_last;
                    w.yyxx[[h, kk, i, j]] +=
                        g3[[j, kk]] * nb.nyx[[h, i]] - g3[[i, kk]] * nb.nyx[[h, j]];
                    w.yyxy[[h, kk, i, j]] += l.lyx[[j, kk]] * di - l.lyx[[i, kk]] * dj
                        + g3[[j, kk]] * nb.nyy[[h, i]]
                        - g3[[i, kk]] * nb.nyy[[h, j]];
                    w.yyyx[[h, kk, i, j]] +=
                        g2[[j, kk]] * nb.nyx[[h, i]] - g2[[i, kk]] * nb.nyx[[h, j]];
                    w.yyyy[[h, kk, i, j]] += l.lyy[[j, kk]] * di - l.lyy[[i, kk]] * dj
                        + g2[[j, kk]] * nb.nyy[[h, i]]
                        - g2[[i, kk]] * nb.nyy[[h, j]];
                }
            }
        }
    }
    w
}

/// Everything the conformal-flatness verdict needs at one point of TM.
#[derive(Clone, Debug)]
pub struct WeylData {
    pub weyl: CurvBlocks,
    pub ricci: RicciBlocks,
    pub supnorm: f64,
    /// Sup norm of the curvature blocks entering the Weyl combination.
    pub curv_supnorm: f64,
    /// `supnorm` divided by the round-off amplification scale of the
    /// parameter jets at this point; this is what verdicts compare against
    /// the tolerances. See [`condition_scale`].
    pub scaled_residual: f64,
}

/// Round-off amplification scale at a lifted point: the largest magnitude
/// over the channels of the six parameter jets (floored at 1). The
/// curvature pipeline is polynomial in these channels, so the accumulated
/// round-off of an analytically vanishing Weyl tensor grows proportionally
/// to this scale — e.g. a d₃ ~ t^{−3/2} entry has jet channels up to
/// t^{−9/2} near the zero section. Dividing the Weyl sup-norm by this scale
/// keeps the flat/non-flat tolerances meaningful at every valid point.
pub fn condition_scale(lp: &LiftedPoint) -> f64 {
    let mut m = 1.0f64;
    let jets = lp
        .params
        .c
        .iter()
        .chain(lp.params.d.iter())
        .chain(lp.inv.p.iter())
        .chain(lp.inv.q.iter());
    for j in jets {
        for v in [j.v, j.d1, j.d2, j.d3] {
            m = m.max(v.abs());
        }
    }
    m
}

/// Full pipeline: lifted point → connection → curvature → Weyl blocks.
pub fn weyl_at(
    variant: FormulaVariant,
    family: &ParamFamily,
    base: &BaseGeometry,
    x: &[f64],
    y: &[f64],
) -> Result<WeylData> {
    let lp = LiftedPoint::new(family, base, x, y)?;
    let bd = base.data(x, y)?;
    let conn = crate::conn::conn_coeffs(variant, &lp, &bd);
    let cd = crate::conn::conn_derivs(variant, &lp, &bd);
    let k = curv::curv_blocks(variant, &lp, &bd, &conn, &cd);
    let ric = curv::ricci(&k, &lp);
    let l = schouten(&ric, &lp);
    let nb = n_blocks(&l, &lp);
    let curv_supnorm = supnorm(&k);
    let weyl = weyl_blocks(variant, &k, &l, &nb, &lp);
    let supnorm = supnorm(&weyl);
    let scaled_residual = supnorm / condition_scale(&lp);
    Ok(WeylData { weyl, ricci: ric, supnorm, curv_supnorm, scaled_residual })
}

/// Max absolute entry over the twelve blocks.
pub fn supnorm(w: &CurvBlocks) -> f64 {
    [
        &w.xxxx, &w.xxxy, &w.xxyx, &w.xxyy, &w.yyxx, &w.yyxy, &w.yyyx, &w.yyyy, &w.yxxx,
        &w.yxxy, &w.yxyx, &w.yxyy,
    ]
    .iter()
    .flat_map(|a| a.iter())
    .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Max absolute Ricci-type trace Σ_a W^a_{cab} of the assembled Weyl tensor.
pub fn trace_residual(w: &CurvBlocks) -> f64 {
    let assembled = curv::assemble_curvature(w);
    let m = assembled.shape()[0];
    let mut worst = 0.0f64;
    for b in 0..m {
        for c in 0..m {
            let tr: f64 = (0..m).map(|a| assembled[[a, c, a, b]]).sum();
            worst = worst.max(tr.abs());
        }
    }
    worst
}

/// Conformal-flatness verdict from the Weyl sup-norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Flat,
    NonFlat,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Flat => write!(f, "flat"),
            Verdict::NonFlat => write!(f, "non-flat"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Verdict from a (condition-scaled) Weyl residual; see
/// [`WeylData::scaled_residual`].
pub fn verdict(supnorm: f64) -> Verdict {
    if supnorm <= FLAT_TOL {
        Verdict::Flat
    } else if supnorm > NONFLAT_TOL {
        Verdict::NonFlat
    } else {
        Verdict::Inconclusive
    }
}

/// The Weyl tensor of the base manifold itself (dimension ≥ 3), layout
/// `[h][k][i][j]`.
pub fn base_weyl(base: &BaseGeometry, x: &[f64]) -> Result<Array4<f64>> {
    let m = base.dim();
    if m < 3 {
        return Err(Error::Dimension(format!(
            "Weyl tensor needs dimension >= 3, got {m}"
        )));
    }
    let g = base.metric(x)?;
    let ginv = base.inverse_metric(x)?;
    let r = base.riemann(x)?;
    let mut ric: Array2<f64> = Array2::zeros((m, m));
    for b in 0..m {
        for c in 0..m {
            ric[[b, c]] = (0..m).map(|a| r[[a, c, a, b]]).sum();
        }
    }
    let mut scal = 0.0;
    for b in 0..m {
        for c in 0..m {
            scal += ginv[[b, c]] * ric[[b, c]];
        }
    }
    let cl = -1.0 / (m as f64 - 2.0);
    let cs = 1.0 / (2.0 * (m as f64 - 1.0));
    let l: Array2<f64> =
        Array2::from_shape_fn((m, m), |(i, j)| cl * (ric[[i, j]] - scal * cs * g[[i, j]]));
    let mut lraised: Array2<f64> = Array2::zeros((m, m));
    for h in 0..m {
        for i in 0..m {
            lraised[[h, i]] = (0..m).map(|k| ginv[[h, k]] * l[[k, i]]).sum();
        }
    }
    let mut w = Array4::zeros((m, m, m, m));
    for h in 0..m {
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let mut v = r[[h, k, i, j]] + g[[j, k]] * lraised[[h, i]]
                        - g[[i, k]] * lraised[[h, j]];
                    if h == i {
                        v += l[[j, k]];
                    }
                    if h == j {
                        v -= l[[i, k]];
                    }
                    w[[h, k, i, j]] = v;
                }
            }
        }
    }
    Ok(w)
}
