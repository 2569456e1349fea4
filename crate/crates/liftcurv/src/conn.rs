//! Levi-Civita connection of the lifted metric in the adapted frame: the six
//! coefficient families Q, Q̃, P, P̃, S, S̃ and their tangential (vertical)
//! derivatives.
//!
//! Index layout: coefficients are `[h][i][j]` with
//! ∇_{∂yᵢ}∂yⱼ = Q^h_{ij}∂y_h + Q̃^h_{ij}δx_h, and derivatives are
//! `[i][h][j][k]` = ∂ᵢ(·)^h_{jk}.

use ndarray::{Array3, Array4};

use crate::base::BaseData;
use crate::lift::LiftedPoint;
use crate::FormulaVariant;

/// The six coefficient families of Levi-Civita connection blocks, each
/// indexed `[h][i][j]`.
#[derive(Clone, Debug)]
pub struct ConnCoeffs {
    pub q: Array3<f64>,
    pub qt: Array3<f64>,
    pub p: Array3<f64>,
    pub pt: Array3<f64>,
    pub s: Array3<f64>,
    pub st: Array3<f64>,
}

/// Vertical derivatives of the connection coefficients, indexed
/// `[i][h][j][k]` = ∂ᵢ(·)^h_{jk}.
#[derive(Clone, Debug)]
pub struct ConnDerivs {
    pub dq: Array4<f64>,
    pub dqt: Array4<f64>,
    pub dp: Array4<f64>,
    pub dpt: Array4<f64>,
    pub ds: Array4<f64>,
    pub dst: Array4<f64>,
}

pub fn conn_coeffs(variant: FormulaVariant, lp: &LiftedPoint, bd: &BaseData) -> ConnCoeffs {
    let n = lp.n;
    let dg = &lp.derivs.dg;
    let g2 = &lp.blocks.g2;
    let (h1, h2, h3) = (&lp.inv.h1, &lp.inv.h2, &lp.inv.h3);
    let c3 = lp.params.c[2].v;
    // Which G block's derivative enters the S coefficients. The corrected
    // reading uses G⁽¹⁾ (matching S̃ and the coordinate-frame oracle); the
    // published display of S carries G⁽²⁾.
    let sg = match variant {
        FormulaVariant::OracleCorrected => 0,
        FormulaVariant::Printed => 1,
    };

    let mut q = Array3::zeros((n, n, n));
    let mut qt = Array3::zeros((n, n, n));
    let mut p = Array3::zeros((n, n, n));
    let mut pt = Array3::zeros((n, n, n));
    let mut s = Array3::zeros((n, n, n));
    let mut st = Array3::zeros((n, n, n));

    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut qv = 0.0;
                let mut qtv = 0.0;
                let mut pv = 0.0;
                let mut ptv = 0.0;
                let mut sv = 0.0;
                let mut stv = 0.0;
                for k in 0..n {
                    // Koszul brackets on the vertical pair
                    let b2 = 0.5 * (dg[1][[i, j, k]] + dg[1][[j, i, k]] - dg[1][[k, i, j]]);
                    let b3 = 0.5 * (dg[2][[i, j, k]] + dg[2][[j, i, k]]);
                    qv += b2 * h2[[k, h]] + b3 * h3[[k, h]];
                    qtv += b2 * h3[[k, h]] + b3 * h1[[k, h]];

                    // mixed pair
                    let m3 = 0.5 * (dg[2][[i, j, k]] - dg[2][[k, i, j]]);
                    let mut m1 = 0.5 * dg[0][[i, j, k]];
                    for l in 0..n {
                        m1 += 0.5 * bd.r0[[l, j, k]] * g2[[l, i]];
                    }
                    pv += m3 * h3[[k, h]] + m1 * h1[[k, h]];
                    ptv += m3 * h2[[k, h]] + m1 * h3[[k, h]];

                    // horizontal pair
                    let mut hb = 0.5 * dg[sg][[k, i, j]];
                    for l in 0..n {
                        hb += 0.5 * bd.r0[[l, i, j]] * g2[[l, k]];
                    }
                    sv += -hb * h2[[k, h]] + c3 * bd.rlow0[[i, j, k]] * h3[[k, h]];
                    stv += -0.5
                        * (dg[0][[k, i, j]]
                            + (0..n).map(|l| bd.r0[[l, i, j]] * g2[[l, k]]).sum::<f64>())
                        * h3[[k, h]]
                        + c3 * bd.rlow0[[i, j, k]] * h1[[k, h]];
                }
                q[[h, i, j]] = qv;
                qt[[h, i, j]] = qtv;
                p[[h, i, j]] = pv;
                pt[[h, i, j]] = ptv;
                s[[h, i, j]] = sv;
                st[[h, i, j]] = stv;
            }
        }
    }
    ConnCoeffs { q, qt, p, pt, s, st }
}

pub fn conn_derivs(variant: FormulaVariant, lp: &LiftedPoint, bd: &BaseData) -> ConnDerivs {
    let n = lp.n;
    let dg = &lp.derivs.dg;
    let ddg = &lp.derivs.ddg;
    let dh = &lp.derivs.dh;
    let g2 = &lp.blocks.g2;
    let (h1, h2, h3) = (&lp.inv.h1, &lp.inv.h2, &lp.inv.h3);
    let c3 = lp.params.c[2].v;
    let c3p = lp.params.c[2].d1;
    // ∂S uses the G⁽¹⁾ derivative in both variants: the published displays
    // of ∂S and ∂S̃ both carry G⁽¹⁾ (only the S display itself differs).
    let dsg = match variant {
        FormulaVariant::OracleCorrected | FormulaVariant::Printed => 0,
    };

    let mut dq = Array4::zeros((n, n, n, n));
    let mut dqt = Array4::zeros((n, n, n, n));
    let mut dp = Array4::zeros((n, n, n, n));
    let mut dpt = Array4::zeros((n, n, n, n));
    let mut ds = Array4::zeros((n, n, n, n));
    let mut dst = Array4::zeros((n, n, n, n));

    for i in 0..n {
        for h in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut dqv = 0.0;
                    let mut dqtv = 0.0;
                    let mut dpv = 0.0;
                    let mut dptv = 0.0;
                    let mut dsv = 0.0;
                    let mut dstv = 0.0;
                    for l in 0..n {
                        let b2 = dg[1][[j, k, l]] + dg[1][[k, j, l]] - dg[1][[l, j, k]];
                        let db2 = ddg[1][[i, j, k, l]] + ddg[1][[i, k, j, l]]
                            - ddg[1][[i, l, j, k]];
                        let b3 = dg[2][[j, k, l]] + dg[2][[k, j, l]];
                        let db3 = ddg[2][[i, j, k, l]] + ddg[2][[i, k, j, l]];
                        dqv += 0.5
                            * (dh[1][[i, h, l]] * b2
                                + h2[[h, l]] * db2
                                + dh[2][[i, h, l]] * b3
                                + h3[[h, l]] * db3);
                        dqtv += 0.5
                            * (dh[2][[i, h, l]] * b2
                                + h3[[h, l]] * db2
                                + dh[0][[i, h, l]] * b3
                                + h1[[h, l]] * db3);

                        let m3 = dg[2][[j, k, l]] - dg[2][[l, j, k]];
                        let dm3 = ddg[2][[i, j, k, l]] - ddg[2][[i, l, j, k]];
                        let mut m1 = dg[0][[j, k, l]];
                        let mut dm1 = ddg[0][[i, j, k, l]];
                        for r in 0..n {
                            m1 += bd.r0[[r, k, l]] * g2[[r, j]];
                            dm1 += bd.riemann[[r, i, k, l]] * g2[[r, j]]
                                + bd.r0[[r, k, l]] * dg[1][[i, r, j]];
                        }
                        dptv += 0.5
                            * (dh[1][[i, h, l]] * m3
                                + h2[[h, l]] * dm3
                                + dh[2][[i, h, l]] * m1
                                + h3[[h, l]] * dm1);
                        dpv += 0.5
                            * (dh[2][[i, h, l]] * m3
                                + h3[[h, l]] * dm3
                                + dh[0][[i, h, l]] * m1
                                + h1[[h, l]] * dm1);

                        let mut hb = dg[dsg][[l, j, k]];
                        let mut dhb = ddg[dsg][[i, l, j, k]];
                        for r in 0..n {
                            hb += bd.r0[[r, j, k]] * g2[[r, l]];
                            dhb += bd.riemann[[r, i, j, k]] * g2[[r, l]]
                                + bd.r0[[r, j, k]] * dg[1][[i, r, l]];
                        }
                        dsv += -0.5 * (dhb * h2[[l, h]] + hb * dh[1][[i, l, h]])
                            + c3p * lp.g0[i] * bd.rlow0[[j, k, l]] * h3[[l, h]]
                            + c3
                                * (bd.rlow[[j, i, k, l]] * h3[[l, h]]
                                    + bd.rlow0[[j, k, l]] * dh[2][[i, l, h]]);
                        dstv += -0.5 * (dhb * h3[[l, h]] + hb * dh[2][[i, l, h]])
                            + c3p * lp.g0[i] * bd.rlow0[[j, k, l]] * h1[[l, h]]
                            + c3
                                * (bd.rlow[[j, i, k, l]] * h1[[l, h]]
                                    + bd.rlow0[[j, k, l]] * dh[0][[i, l, h]]);
                    }
                    dq[[i, h, j, k]] = dqv;
                    dqt[[i, h, j, k]] = dqtv;
                    dp[[i, h, j, k]] = dpv;
                    dpt[[i, h, j, k]] = dptv;
                    ds[[i, h, j, k]] = dsv;
                    dst[[i, h, j, k]] = dstv;
                }
            }
        }
    }
    ConnDerivs { dq, dqt, dp, dpt, ds, dst }
}

/// The full adapted-frame connection ω^a_{bc} with ∇_{E_b}E_c = ω^a_{bc}E_a,
/// horizontal indices first (E_i = δxᵢ for i < n, E_{n+i} = ∂yᵢ).
pub fn frame_connection(gamma: &Array3<f64>, conn: &ConnCoeffs) -> Array3<f64> {
    let n = conn.q.shape()[0];
    let mut w = Array3::zeros((2 * n, 2 * n, 2 * n));
    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                // ∇_{δxᵢ}δxⱼ = (Γ^h_{ij} + S̃^h_{ij})δx_h + S^h_{ij}∂y_h
                w[[h, i, j]] = gamma[[h, i, j]] + conn.st[[h, i, j]];
                w[[n + h, i, j]] = conn.s[[h, i, j]];
                // ∇_{δxᵢ}∂yⱼ = (Γ^h_{ij} + P̃^h_{ji})∂y_h + P^h_{ji}δx_h
                w[[n + h, i, n + j]] = gamma[[h, i, j]] + conn.pt[[h, j, i]];
                w[[h, i, n + j]] = conn.p[[h, j, i]];
                // ∇_{∂yᵢ}δxⱼ = P^h_{ij}δx_h + P̃^h_{ij}∂y_h
                w[[h, n + i, j]] = conn.p[[h, i, j]];
                w[[n + h, n + i, j]] = conn.pt[[h, i, j]];
                // ∇_{∂yᵢ}∂yⱼ = Q^h_{ij}∂y_h + Q̃^h_{ij}δx_h
                w[[n + h, n + i, n + j]] = conn.q[[h, i, j]];
                w[[h, n + i, n + j]] = conn.qt[[h, i, j]];
            }
        }
    }
    w
}
