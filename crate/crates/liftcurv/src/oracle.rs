//! Independent coordinate-frame verification pipeline.
//!
//! Everything here is built from the lifted metric expressed in the induced
//! coordinate frame (∂xᵢ, ∂yᵢ) and plain central finite differences with one
//! Richardson refinement — no adapted-frame formula is reused. Adapted-frame
//! quantities are pulled through the exact frame-change matrices and compared
//! against the finite-difference results.

use ndarray::{Array2, Array3, Array4};

use crate::base::{self, BaseData, BaseGeometry};
use crate::conn::ConnCoeffs;
use crate::jet::ParamFamily;
use crate::lift::{self, LiftedPoint};
use crate::Result;

/// Base finite-difference step; scaled per coordinate by (1 + |z|).
pub const FD_STEP: f64 = 1e-4;

/// The lifted metric in the induced coordinate frame, assembled 2n×2n with
/// the x-block first.
///
/// With δxᵢ = ∂xᵢ − Γ^h_{0i}∂y_h the coordinate blocks are
/// Ĝxxᵢⱼ = G⁽¹⁾ᵢⱼ + Γ^k_{0i}G⁽³⁾ₖⱼ + Γ^k_{0j}G⁽³⁾ᵢₖ + Γ^k_{0i}Γ^l_{0j}G⁽²⁾ₖₗ,
/// Ĝxyᵢⱼ = G⁽³⁾ᵢⱼ + Γ^k_{0i}G⁽²⁾ₖⱼ, Ĝyy = G⁽²⁾.
pub fn coordinate_metric(
    family: &ParamFamily,
    base: &BaseGeometry,
    x: &[f64],
    y: &[f64],
) -> Result<Array2<f64>> {
    let n = base.dim();
    let blocks = lift::metric_blocks(family, base, x, y)?;
    let gamma = base.christoffels(x)?;
    let g0 = base::gamma0(&gamma, y);
    let mut out = Array2::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            let mut xx = blocks.g1[[i, j]];
            for k in 0..n {
                xx += g0[[k, i]] * blocks.g3[[k, j]] + g0[[k, j]] * blocks.g3[[i, k]];
                for l in 0..n {
                    xx += g0[[k, i]] * g0[[l, j]] * blocks.g2[[k, l]];
                }
            }
            let mut xy = blocks.g3[[i, j]];
            for k in 0..n {
                xy += g0[[k, i]] * blocks.g2[[k, j]];
            }
            out[[i, j]] = xx;
            out[[i, n + j]] = xy;
            out[[n + j, i]] = xy;
            out[[n + i, n + j]] = blocks.g2[[i, j]];
        }
    }
    Ok(out)
}

/// The frame-change matrices (A, B): columns of A are the adapted frame
/// vectors in coordinate components (A = [[I, 0], [−Γ₀, I]]), and B = A⁻¹ =
/// [[I, 0], [Γ₀, I]] exactly.
pub fn frame_matrices(gamma0: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let n = gamma0.shape()[0];
    let mut a = Array2::eye(2 * n);
    let mut b = Array2::eye(2 * n);
    for h in 0..n {
        for j in 0..n {
            a[[n + h, j]] = -gamma0[[h, j]];
            b[[n + h, j]] = gamma0[[h, j]];
        }
    }
    (a, b)
}

/// Frame derivatives of B: `out[[b, c, r]]` = E_b(B^c_r). Only the lower-left
/// block of B is nonconstant; its entries are Γ^h_{0r} with
/// δx_b(Γ^h_{0r}) = y^k ∂_b Γ^h_{kr} − Γ^m_{0b}Γ^h_{mr} and
/// ∂y_b(Γ^h_{0r}) = Γ^h_{br}.
pub fn frame_matrix_derivatives(bd: &BaseData, y: &[f64]) -> Array3<f64> {
    let n = y.len();
    let mut out = Array3::zeros((2 * n, 2 * n, 2 * n));
    for b in 0..n {
        for h in 0..n {
            for r in 0..n {
                let mut horiz = 0.0;
                for k in 0..n {
                    horiz += y[k] * bd.dgamma[[b, h, k, r]];
                }
                for m in 0..n {
                    horiz -= bd.gamma0[[m, b]] * bd.gamma[[h, m, r]];
                }
                out[[b, n + h, r]] = horiz;
                out[[n + b, n + h, r]] = bd.gamma[[h, b, r]];
            }
        }
    }
    out
}

/// Push an adapted-frame (1,1)-indexed bilinear map T^a_{bc} (connection-like
/// layout `[a][b][c]`) to the coordinate frame as a TENSOR (no frame
/// derivative terms).
pub fn transform_tensor_112(t: &Array3<f64>, a: &Array2<f64>, b: &Array2<f64>) -> Array3<f64> {
    let m = a.shape()[0];
    let mut out = Array3::zeros((m, m, m));
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                let mut v = 0.0;
                for aa in 0..m {
                    for bb in 0..m {
                        for cc in 0..m {
                            v += a[[p, aa]] * t[[aa, bb, cc]] * b[[bb, q]] * b[[cc, r]];
                        }
                    }
                }
                out[[p, q, r]] = v;
            }
        }
    }
    out
}

/// Push an adapted-frame curvature-like tensor T^a_{dbc} (layout `[a][d][b][c]`)
/// to the coordinate frame.
pub fn transform_tensor_113(t: &Array4<f64>, a: &Array2<f64>, b: &Array2<f64>) -> Array4<f64> {
    let m = a.shape()[0];
    let mut out = Array4::zeros((m, m, m, m));
    for p in 0..m {
        for s in 0..m {
            for q in 0..m {
                for r in 0..m {
                    let mut v = 0.0;
                    for aa in 0..m {
                        for dd in 0..m {
                            for bb in 0..m {
                                for cc in 0..m {
                                    v += a[[p, aa]]
                                        * t[[aa, dd, bb, cc]]
                                        * b[[dd, s]]
                                        * b[[bb, q]]
                                        * b[[cc, r]];
                                }
                            }
                        }
                    }
                    out[[p, s, q, r]] = v;
                }
            }
        }
    }
    out
}

/// Push a fully covariant 4-tensor T_{dbca}→ layout `[a][b][c][d]` all-lower
/// to the coordinate frame (every index with B).
pub fn transform_tensor_004(t: &Array4<f64>, b: &Array2<f64>) -> Array4<f64> {
    let m = b.shape()[0];
    let mut out = Array4::zeros((m, m, m, m));
    for p in 0..m {
        for s in 0..m {
            for q in 0..m {
                for r in 0..m {
                    let mut v = 0.0;
                    for aa in 0..m {
                        for dd in 0..m {
                            for bb in 0..m {
                                for cc in 0..m {
                                    v += t[[aa, dd, bb, cc]]
                                        * b[[aa, p]]
                                        * b[[dd, s]]
                                        * b[[bb, q]]
                                        * b[[cc, r]];
                                }
                            }
                        }
                    }
                    out[[p, s, q, r]] = v;
                }
            }
        }
    }
    out
}

/// The adapted connection pushed to coordinate Christoffel symbols:
/// Γ̂^p_{qr} = A^p_a (B^b_q B^c_r ω^a_{bc} + B^b_q E_b(B^a_r)).
pub fn coordinate_christoffels_from_adapted(
    conn: &ConnCoeffs,
    bd: &BaseData,
    y: &[f64],
) -> Array3<f64> {
    let w = crate::conn::frame_connection(&bd.gamma, conn);
    let (a, b) = frame_matrices(&bd.gamma0);
    let db = frame_matrix_derivatives(bd, y);
    let m = a.shape()[0];
    let mut out = Array3::zeros((m, m, m));
    for p in 0..m {
        for qq in 0..m {
            for r in 0..m {
                let mut v = 0.0;
                for aa in 0..m {
                    let mut inner = 0.0;
                    for bb in 0..m {
                        inner += b[[bb, qq]] * db[[bb, aa, r]];
                        for cc in 0..m {
                            inner += b[[bb, qq]] * b[[cc, r]] * w[[aa, bb, cc]];
                        }
                    }
                    v += a[[p, aa]] * inner;
                }
                out[[p, qq, r]] = v;
            }
        }
    }
    out
}

/// Finite-difference geometry of the coordinate metric on the 2n-dimensional
/// chart z = (x, y).
#[derive(Clone, Debug)]
pub struct FdGeometry {
    pub metric: Array2<f64>,
    pub ginv: Array2<f64>,
    /// Γ̂^A_{BC}
    pub gamma: Array3<f64>,
    /// R̂^A_{BCD}, same layout as the base Riemann: `[h][k][i][j]`
    pub riemann: Array4<f64>,
}

fn metric_at(family: &ParamFamily, base: &BaseGeometry, z: &[f64]) -> Result<Array2<f64>> {
    let n = base.dim();
    coordinate_metric(family, base, &z[..n], &z[n..])
}

/// ∂_A Ĝ_{BC} by Richardson-refined central differences.
fn fd_metric_derivs(
    family: &ParamFamily,
    base: &BaseGeometry,
    z: &[f64],
    step: f64,
) -> Result<Array3<f64>> {
    let m = z.len();
    let mut out = Array3::zeros((m, m, m));
    let mut zp = z.to_vec();
    for a in 0..m {
        let h = step * (1.0 + z[a].abs());
        let mut diff = |hh: f64| -> Result<Array2<f64>> {
            zp[a] = z[a] + hh;
            let gp = metric_at(family, base, &zp)?;
            zp[a] = z[a] - hh;
            let gm = metric_at(family, base, &zp)?;
            zp[a] = z[a];
            Ok((gp - gm) / (2.0 * hh))
        };
        let coarse = diff(h)?;
        let fine = diff(0.5 * h)?;
        let refined = fine.mapv(|v| 4.0 * v / 3.0) - coarse.mapv(|v| v / 3.0);
        for bb in 0..m {
            for cc in 0..m {
                out[[a, bb, cc]] = refined[[bb, cc]];
            }
        }
    }
    Ok(out)
}

fn christoffels_at(
    family: &ParamFamily,
    base: &BaseGeometry,
    z: &[f64],
    step: f64,
) -> Result<Array3<f64>> {
    let m = z.len();
    let g = metric_at(family, base, z)?;
    let ginv = base::invert(&g)?;
    let dg = fd_metric_derivs(family, base, z, step)?;
    let mut gamma = Array3::zeros((m, m, m));
    for a in 0..m {
        for bb in 0..m {
            for cc in 0..m {
                let mut v = 0.0;
                for d in 0..m {
                    v += 0.5 * ginv[[a, d]] * (dg[[bb, d, cc]] + dg[[cc, bb, d]] - dg[[d, bb, cc]]);
                }
                gamma[[a, bb, cc]] = v;
            }
        }
    }
    Ok(gamma)
}

pub fn fd_geometry(
    family: &ParamFamily,
    base: &BaseGeometry,
    x: &[f64],
    y: &[f64],
    step: f64,
) -> Result<FdGeometry> {
    let z: Vec<f64> = x.iter().chain(y.iter()).copied().collect();
    let m = z.len();
    let metric = metric_at(family, base, &z)?;
    let ginv = base::invert(&metric)?;
    let gamma = christoffels_at(family, base, &z, step)?;

    // ∂_A Γ̂^B_{CD}, Richardson refined, then curvature from the usual
    // coordinate formula.
    let mut dgamma = Array4::zeros((m, m, m, m));
    let mut zp = z.clone();
    for a in 0..m {
        let h = step * (1.0 + z[a].abs());
        let mut diff = |hh: f64| -> Result<Array3<f64>> {
            zp[a] = z[a] + hh;
            let gp = christoffels_at(family, base, &zp, step)?;
            zp[a] = z[a] - hh;
            let gm = christoffels_at(family, base, &zp, step)?;
            zp[a] = z[a];
            Ok((gp - gm) / (2.0 * hh))
        };
        let coarse = diff(h)?;
        let fine = diff(0.5 * h)?;
        let refined = fine.mapv(|v| 4.0 * v / 3.0) - coarse.mapv(|v| v / 3.0);
        for bb in 0..m {
            for cc in 0..m {
                for dd in 0..m {
                    dgamma[[a, bb, cc, dd]] = refined[[bb, cc, dd]];
                }
            }
        }
    }
    let riemann = base::riemann_from_christoffels(&gamma, &dgamma);
    Ok(FdGeometry { metric, ginv, gamma, riemann })
}

/// max |a - b| / max(1, |a|) over two equally shaped arrays.
pub fn max_scaled_diff<'a, I, J>(a: I, b: J) -> f64
where
    I: IntoIterator<Item = &'a f64>,
    J: IntoIterator<Item = &'a f64>,
{
    a.into_iter()
        .zip(b)
        .map(|(u, v)| (u - v).abs() / u.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Compare the adapted connection against the finite-difference coordinate
/// Christoffels; returns the max scaled deviation.
pub fn connection_vs_oracle(
    variant: crate::FormulaVariant,
    family: &ParamFamily,
    base: &BaseGeometry,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let lp = LiftedPoint::new(family, base, x, y)?;
    let bd = base.data(x, y)?;
    let conn = crate::conn::conn_coeffs(variant, &lp, &bd);
    let ours = coordinate_christoffels_from_adapted(&conn, &bd, y);
    let fd = fd_geometry(family, base, x, y, FD_STEP)?;
    Ok(max_scaled_diff(fd.gamma.iter(), ours.iter()))
}

/// Max scaled difference between the assembled adapted-frame curvature,
/// pushed to induced coordinates, and the finite-difference Riemann tensor
/// of the assembled metric.
pub fn curvature_vs_oracle(
    variant: crate::FormulaVariant,
    family: &ParamFamily,
    base: &BaseGeometry,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let lp = LiftedPoint::new(family, base, x, y)?;
    let bd = base.data(x, y)?;
    let conn = crate::conn::conn_coeffs(variant, &lp, &bd);
    let cd = crate::conn::conn_derivs(variant, &lp, &bd);
    let blocks = crate::curv::curv_blocks(variant, &lp, &bd, &conn, &cd);
    let assembled = crate::curv::assemble_curvature(&blocks);
    let (a, b) = frame_matrices(&bd.gamma0);
    let pushed = transform_tensor_113(&assembled, &a, &b);
    let fd = fd_geometry(family, base, x, y, FD_STEP)?;
    Ok(max_scaled_diff(fd.riemann.iter(), pushed.iter()))
}



/// The Weyl tensor of the assembled 2n metric computed entirely in induced
/// coordinates: finite-difference Riemann, Ricci and scalar by contraction,
/// then the dimension-m conformal curvature formula with m = 2n. Layout
/// `[a][d][b][c]` = (C(∂_b, ∂_c)∂_d)^a.
pub fn fd_weyl(
    family: &ParamFamily,
    base: &BaseGeometry,
    x: &[f64],
    y: &[f64],
    step: f64,
) -> Result<Array4<f64>> {
    let n = base.dim();
    let m = 2 * n;
    let fd = fd_geometry(family, base, x, y, step)?;
    let g = &fd.metric;
    let ginv = &fd.ginv;
    let r = &fd.riemann;
    let mut ric = Array2::<f64>::zeros((m, m));
    for b in 0..m {
        for c in 0..m {
            for a in 0..m {
                ric[[b, c]] += r[[a, c, a, b]];
            }
        }
    }
    let mut scal = 0.0;
    for b in 0..m {
        for c in 0..m {
            scal += ginv[[b, c]] * ric[[b, c]];
        }
    }
    let mf = m as f64;
    let l = Array2::<f64>::from_shape_fn((m, m), |(i, j)| {
        -1.0 / (mf - 2.0) * (ric[[i, j]] - scal * g[[i, j]] / (2.0 * (mf - 1.0)))
    });
    let mut nmat = Array2::<f64>::zeros((m, m));
    for a in 0..m {
        for b in 0..m {
            for k in 0..m {
                nmat[[a, b]] += l[[b, k]] * ginv[[k, a]];
            }
        }
    }
    let mut out = Array4::<f64>::zeros((m, m, m, m));
    for a in 0..m {
        for d in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let da_b = if a == b { 1.0 } else { 0.0 };
                    let da_c = if a == c { 1.0 } else { 0.0 };
                    out[[a, d, b, c]] = r[[a, d, b, c]] + l[[c, d]] * da_b
                        - l[[b, d]] * da_c
                        + g[[c, d]] * nmat[[a, b]]
                        - g[[b, d]] * nmat[[a, c]];
                }
            }
        }
    }
    Ok(out)
}

/// Max scaled difference between the analytic Weyl blocks, assembled and
/// pushed to induced coordinates, and the finite-difference coordinate Weyl.
pub fn weyl_vs_oracle(
    variant: crate::FormulaVariant,
    family: &ParamFamily,
    base: &BaseGeometry,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let data = crate::weyl::weyl_at(variant, family, base, x, y)?;
    let bd = base.data(x, y)?;
    let assembled = crate::curv::assemble_curvature(&data.weyl);
    let (a, b) = frame_matrices(&bd.gamma0);
    let pushed = transform_tensor_113(&assembled, &a, &b);
    let fd = fd_weyl(family, base, x, y, FD_STEP)?;
    Ok(max_scaled_diff(fd.iter(), pushed.iter()))
}
