//! Curvature of the lifted metric in the adapted frame: the twelve blocks of
//! R(E_b, E_c)E_d, their assembly into a full 2n tensor, and the Ricci and
//! scalar curvature traces.
//!
//! Block naming: four letters, horizontal/vertical of (arg1, arg2, Z,
//! output) in the order the displays list them; indices are `[h][k][i][j]`
//! with output h, Z-index k, args i, j.

use ndarray::{Array2, Array4};

use crate::base::BaseData;
use crate::conn::{ConnCoeffs, ConnDerivs};
use crate::lift::LiftedPoint;
use crate::FormulaVariant;

/// The twelve adapted-frame curvature blocks, each `[h][k][i][j]`.
#[derive(Clone, Debug)]
pub struct CurvBlocks {
    pub xxxx: Array4<f64>,
    pub xxxy: Array4<f64>,
    pub xxyx: Array4<f64>,
    pub xxyy: Array4<f64>,
    pub yyxx: Array4<f64>,
    pub yyxy: Array4<f64>,
    pub yyyx: Array4<f64>,
    pub yyyy: Array4<f64>,
    pub yxxx: Array4<f64>,
    pub yxxy: Array4<f64>,
    pub yxyx: Array4<f64>,
    pub yxyy: Array4<f64>,
}

pub fn curv_blocks(
    variant: FormulaVariant,
    lp: &LiftedPoint,
    bd: &BaseData,
    conn: &ConnCoeffs,
    cd: &ConnDerivs,
) -> CurvBlocks {
    let n = lp.n;
    let (q, qt, p, pt, s, st) = (&conn.q, &conn.qt, &conn.p, &conn.pt, &conn.s, &conn.st);
    let (dq, dqt, dp, dpt, ds, dst) = (&cd.dq, &cd.dqt, &cd.dp, &cd.dpt, &cd.ds, &cd.dst);
    let g2 = &lp.blocks.g2;
    let (h1, h2, h3) = (&lp.inv.h1, &lp.inv.h2, &lp.inv.h3);
    let c3 = lp.params.c[2].v;

    let z = || Array4::zeros((n, n, n, n));
    let mut xxxx = z();
    let mut xxxy = z();
    let mut xxyx = z();
    let mut xxyy = z();
    let mut yyxx = z();
    let mut yyxy = z();
    let mut yyyx = z();
    let mut yyyy = z();
    let mut yxxx = z();
    let mut yxxy = z();
    let mut yxyx = z();
    let mut yxyy = z();

    // ∇R contractions. On bases with non-parallel curvature every
    // curvature-dependent connection coefficient acquires a horizontal
    // derivative contribution equal to the coefficient's own formula with R
    // replaced by ∇R (all other ingredients of the coefficients are
    // horizontally covariantly constant). The published displays carry only
    // a subset of these, specialized away from the general case; the
    // corrected variant uses the full set, the printed variant reproduces
    // the displays literally (see FORMULA_NOTES.md).
    //
    // nrh_a[[m, i, j, h]] = Σ_{l,r} ∇̇ₘR^l_{0ij} G2_{lr} H_a^{rh}
    // nlow_a[[m, i, j, h]] = Σ_k ∇̇ₘR_{i0jk} H_a^{kh}
    // nrp_a[[m, h, i, j]] = ½ Σ_{k,l} ∇̇ₘR^l_{0jk} G2_{li} H_a^{kh}
    let mut nrh1 = Array4::zeros((n, n, n, n));
    let mut nrh2 = Array4::zeros((n, n, n, n));
    let mut nrh3 = Array4::zeros((n, n, n, n));
    let mut nlow1 = Array4::zeros((n, n, n, n));
    let mut nlow3 = Array4::zeros((n, n, n, n));
    let mut nrp1 = Array4::zeros((n, n, n, n));
    let mut nrp3 = Array4::zeros((n, n, n, n));
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                for h in 0..n {
                    let mut v1 = 0.0;
                    let mut v2 = 0.0;
                    let mut v3 = 0.0;
                    let mut w1 = 0.0;
                    let mut w3 = 0.0;
                    let mut p1 = 0.0;
                    let mut p3 = 0.0;
                    for l in 0..n {
                        for r in 0..n {
                            let e = bd.nr0[[m, l, i, j]] * g2[[l, r]];
                            v1 += e * h1[[r, h]];
                            v2 += e * h2[[r, h]];
                            v3 += e * h3[[r, h]];
                        }
                        w1 += bd.nr0_low[[m, i, j, l]] * h1[[l, h]];
                        w3 += bd.nr0_low[[m, i, j, l]] * h3[[l, h]];
                        for k in 0..n {
                            let e = 0.5 * bd.nr0[[m, l, j, k]] * g2[[l, i]];
                            p1 += e * h1[[k, h]];
                            p3 += e * h3[[k, h]];
                        }
                    }
                    nrh1[[m, i, j, h]] = v1;
                    nrh2[[m, i, j, h]] = v2;
                    nrh3[[m, i, j, h]] = v3;
                    nlow1[[m, i, j, h]] = w1;
                    nlow3[[m, i, j, h]] = w3;
                    nrp1[[m, h, i, j]] = p1;
                    nrp3[[m, h, i, j]] = p3;
                }
            }
        }
    }
    // ∇R parts of the horizontal derivatives of S, S̃, P, P̃ (the derivative
    // index first, then the coefficient's own indices [h][i][j]).
    let ds_nr = |m: usize, h: usize, i: usize, j: usize| {
        -0.5 * nrh2[[m, i, j, h]] + c3 * nlow3[[m, i, j, h]]
    };
    let dst_nr = |m: usize, h: usize, i: usize, j: usize| {
        -0.5 * nrh3[[m, i, j, h]] + c3 * nlow1[[m, i, j, h]]
    };
    let dp_nr = |m: usize, h: usize, i: usize, j: usize| nrp1[[m, h, i, j]];
    let dpt_nr = |m: usize, h: usize, i: usize, j: usize| nrp3[[m, h, i, j]];

    let (nr_xxxx, nr_xxxy, nr_xxyx, nr_xxyy, nr_yxxx, nr_yxxy): (
        Box<dyn Fn(usize, usize, usize, usize) -> f64>,
        Box<dyn Fn(usize, usize, usize, usize) -> f64>,
        Box<dyn Fn(usize, usize, usize, usize) -> f64>,
        Box<dyn Fn(usize, usize, usize, usize) -> f64>,
        Box<dyn Fn(usize, usize, usize, usize) -> f64>,
        Box<dyn Fn(usize, usize, usize, usize) -> f64>,
    ) = match variant {
        FormulaVariant::OracleCorrected => (
            Box::new(|h, k, i, j| dst_nr(i, h, j, k) - dst_nr(j, h, i, k)),
            Box::new(|h, k, i, j| ds_nr(i, h, j, k) - ds_nr(j, h, i, k)),
            Box::new(|h, k, i, j| dp_nr(i, h, k, j) - dp_nr(j, h, k, i)),
            Box::new(|h, k, i, j| dpt_nr(i, h, k, j) - dpt_nr(j, h, k, i)),
            Box::new(|h, k, i, j| -dp_nr(j, h, i, k)),
            Box::new(|h, k, i, j| -dpt_nr(j, h, i, k)),
        ),
        FormulaVariant::Printed => (
            Box::new(|_, _, _, _| 0.0),
            Box::new(|h, k, i, j| -0.5 * nrh3[[i, j, k, h]] + c3 * bd.nr0_low[[i, j, k, h]]),
            Box::new(|_, _, _, _| 0.0),
            Box::new(|_, _, _, _| 0.0),
            Box::new(|h, k, i, j| -nrh3[[j, i, k, h]]),
            Box::new(|h, k, i, j| -nrh1[[j, i, k, h]]),
        ),
    };

    for h in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v_xxxx = bd.riemann[[h, k, i, j]] + nr_xxxx(h, k, i, j);
                    let mut v_xxxy = nr_xxxy(h, k, i, j);
                    let mut v_xxyx = nr_xxyx(h, k, i, j);
                    let mut v_xxyy = bd.riemann[[h, k, i, j]] + nr_xxyy(h, k, i, j);
                    let mut v_yyxx = dp[[i, h, j, k]] - dp[[j, h, i, k]];
                    let mut v_yyxy = dpt[[i, h, j, k]] - dpt[[j, h, i, k]];
                    let mut v_yyyx = dqt[[i, h, j, k]] - dqt[[j, h, i, k]];
                    let mut v_yyyy = dq[[i, h, j, k]] - dq[[j, h, i, k]];
                    let mut v_yxxx = dst[[i, h, j, k]] + nr_yxxx(h, k, i, j);
                    let mut v_yxxy = ds[[i, h, j, k]] + nr_yxxy(h, k, i, j);
                    let mut v_yxyx = dp[[i, h, k, j]];
                    let mut v_yxyy = dpt[[i, h, k, j]];
                    for l in 0..n {
                        v_xxxx += st[[h, i, l]] * st[[l, j, k]] + p[[h, l, i]] * s[[l, j, k]]
                            - st[[h, j, l]] * st[[l, i, k]]
                            - p[[h, l, j]] * s[[l, i, k]]
                            + bd.r0[[l, i, j]] * p[[h, l, k]];
                        v_xxxy += st[[l, j, k]] * s[[h, i, l]] + pt[[h, l, i]] * s[[l, j, k]]
                            - st[[l, i, k]] * s[[h, j, l]]
                            - pt[[h, l, j]] * s[[l, i, k]]
                            + pt[[h, l, k]] * bd.r0[[l, i, j]];
                        v_xxyx += pt[[l, k, j]] * p[[h, l, i]] + p[[l, k, j]] * st[[h, i, l]]
                            - pt[[l, k, i]] * p[[h, l, j]]
                            - p[[l, k, i]] * st[[h, j, l]]
                            + bd.r0[[l, i, j]] * qt[[h, l, k]];
                        v_xxyy += pt[[l, k, j]] * pt[[h, l, i]] + p[[l, k, j]] * s[[h, i, l]]
                            - pt[[l, k, i]] * pt[[h, l, j]]
                            - p[[l, k, i]] * s[[h, j, l]]
                            + bd.r0[[l, i, j]] * q[[h, l, k]];
                        v_yyxx += pt[[l, j, k]] * qt[[h, i, l]] + p[[l, j, k]] * p[[h, i, l]]
                            - pt[[l, i, k]] * qt[[h, j, l]]
                            - p[[l, i, k]] * p[[h, j, l]];
                        v_yyxy += pt[[l, j, k]] * q[[h, i, l]] + p[[l, j, k]] * pt[[h, i, l]]
                            - pt[[l, i, k]] * q[[h, j, l]]
                            - p[[l, i, k]] * pt[[h, j, l]];
                        v_yyyx += q[[l, j, k]] * qt[[h, i, l]] + qt[[l, j, k]] * p[[h, i, l]]
                            - q[[l, i, k]] * qt[[h, j, l]]
                            - qt[[l, i, k]] * p[[h, j, l]];
                        v_yyyy += q[[l, j, k]] * q[[h, i, l]] + qt[[l, j, k]] * pt[[h, i, l]]
                            - q[[l, i, k]] * q[[h, j, l]]
                            - qt[[l, i, k]] * pt[[h, j, l]];
                        v_yxxx += s[[l, j, k]] * qt[[h, i, l]] + st[[l, j, k]] * p[[h, i, l]]
                            - pt[[l, i, k]] * p[[h, l, j]]
                            - p[[l, i, k]] * st[[h, j, l]];
                        v_yxxy += s[[l, j, k]] * q[[h, i, l]] + st[[l, j, k]] * pt[[h, i, l]]
                            - pt[[l, i, k]] * pt[[h, l, j]]
                            - p[[l, i, k]] * s[[h, j, l]];
                        v_yxyx += pt[[l, k, j]] * qt[[h, i, l]] + p[[l, k, j]] * p[[h, i, l]]
                            - q[[l, i, k]] * p[[h, l, j]]
                            - qt[[l, i, k]] * st[[h, j, l]];
                        v_yxyy += pt[[l, k, j]] * q[[h, i, l]] + p[[l, k, j]] * pt[[h, i, l]]
                            - q[[l, i, k]] * pt[[h, l, j]]
                            - qt[[l, i, k]] * s[[h, j, l]];
                    }
                    xxxx[[h, k, i, j]] = v_xxxx;
                    xxxy[[h, k, i, j]] = v_xxxy;
                    xxyx[[h, k, i, j]] = v_xxyx;
                    xxyy[[h, k, i, j]] = v_xxyy;
                    yyxx[[h, k, i, j]] = v_yyxx;
                    yyxy[[h, k, i, j]] = v_yyxy;
                    yyyx[[h, k, i, j]] = v_yyyx;
                    yyyy[[h, k, i, j]] = v_yyyy;
                    yxxx[[h, k, i, j]] = v_yxxx;
                    yxxy[[h, k, i, j]] = v_yxxy;
                    yxyx[[h, k, i, j]] = v_yxyx;
                    yxyy[[h, k, i, j]] = v_yxyy;
                }
            }
        }
    }
    CurvBlocks {
        xxxx,
        xxxy,
        xxyx,
        xxyy,
        yyxx,
        yyxy,
        yyyx,
        yyyy,
        yxxx,
        yxxy,
        yxyx,
        yxyy,
    }
}

/// Assemble the twelve blocks into the full 2n curvature K^a_{dbc} (layout
/// `[a][d][b][c]`, R(E_b, E_c)E_d = K^a E_a), horizontal indices first.
/// The (H, V)-argument blocks follow from pair antisymmetry.
pub fn assemble_curvature(b: &CurvBlocks) -> Array4<f64> {
    let n = b.xxxx.shape()[0];
    let m = 2 * n;
    let mut out = Array4::zeros((m, m, m, m));
    for h in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    // (H, H) arguments
                    out[[h, k, i, j]] = b.xxxx[[h, k, i, j]];
                    out[[n + h, k, i, j]] = b.xxxy[[h, k, i, j]];
                    out[[h, n + k, i, j]] = b.xxyx[[h, k, i, j]];
                    out[[n + h, n + k, i, j]] = b.xxyy[[h, k, i, j]];
                    // (V, V) arguments
                    out[[h, k, n + i, n + j]] = b.yyxx[[h, k, i, j]];
                    out[[n + h, k, n + i, n + j]] = b.yyxy[[h, k, i, j]];
                    out[[h, n + k, n + i, n + j]] = b.yyyx[[h, k, i, j]];
                    out[[n + h, n + k, n + i, n + j]] = b.yyyy[[h, k, i, j]];
                    // (V, H) arguments
                    out[[h, k, n + i, j]] = b.yxxx[[h, k, i, j]];
                    out[[n + h, k, n + i, j]] = b.yxxy[[h, k, i, j]];
                    out[[h, n + k, n + i, j]] = b.yxyx[[h, k, i, j]];
                    out[[n + h, n + k, n + i, j]] = b.yxyy[[h, k, i, j]];
                    // (H, V) arguments by antisymmetry
                    out[[h, k, i, n + j]] = -b.yxxx[[h, k, j, i]];
                    out[[n + h, k, i, n + j]] = -b.yxxy[[h, k, j, i]];
                    out[[h, n + k, i, n + j]] = -b.yxyx[[h, k, j, i]];
                    out[[n + h, n + k, i, n + j]] = -b.yxyy[[h, k, j, i]];
                }
            }
        }
    }
    out
}

/// The four Ricci blocks Ric(E_b, E_c) = tr(X ↦ R(X, E_b)E_c) and the scalar
/// curvature of the lifted metric.
#[derive(Clone, Debug)]
pub struct RicciBlocks {
    pub xx: Array2<f64>,
    pub xy: Array2<f64>,
    pub yx: Array2<f64>,
    pub yy: Array2<f64>,
    pub scal: f64,
}

pub fn ricci(blocks: &CurvBlocks, lp: &LiftedPoint) -> RicciBlocks {
    let n = lp.n;
    let mut xx = Array2::zeros((n, n));
    let mut xy = Array2::zeros((n, n));
    let mut yx = Array2::zeros((n, n));
    let mut yy = Array2::zeros((n, n));
    for b in 0..n {
        for c in 0..n {
            for a in 0..n {
                xx[[b, c]] += blocks.xxxx[[a, c, a, b]] + blocks.yxxy[[a, c, a, b]];
                xy[[b, c]] += blocks.xxyx[[a, c, a, b]] + blocks.yxyy[[a, c, a, b]];
                yx[[b, c]] += -blocks.yxxx[[a, c, b, a]] + blocks.yyxy[[a, c, a, b]];
                yy[[b, c]] += -blocks.yxyx[[a, c, b, a]] + blocks.yyyy[[a, c, a, b]];
            }
        }
    }
    let mut scal = 0.0;
    for j in 0..n {
        for k in 0..n {
            scal += lp.inv.h1[[j, k]] * xx[[j, k]]
                + lp.inv.h3[[j, k]] * (xy[[j, k]] + yx[[j, k]])
                + lp.inv.h2[[j, k]] * yy[[j, k]];
        }
    }
    RicciBlocks { xx, xy, yx, yy, scal }
}
