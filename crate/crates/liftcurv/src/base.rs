//! Base-manifold geometry: metric, Christoffel symbols, Riemann tensor and
//! its covariant derivative at a chart point, plus the y-contractions that
//! appear throughout the adapted-frame formulas.
//!
//! Index layout conventions used across the crate:
//! * metric `g[i][j]`, Christoffels `gamma[h][i][j]` (symmetric in i,j),
//! * Riemann `r[h][k][i][j]` meaning R^h_{kij} with
//!   R(∂_i,∂_j)∂_k = R^h_{kij} ∂_h,
//! * covariant derivative `nr[m][h][k][i][j]` meaning ∇_m R^h_{kij}.

use ndarray::{Array1, Array2, Array3, Array4, Array5};

use crate::{Error, Result};

/// Amplitude of the curvilinear-chart diffeomorphism x̃ⁱ = xⁱ + a·sin(xⁱ⁺¹).
const CURVILINEAR_AMPLITUDE: f64 = 0.3;

/// Finite-difference step for the perturbed base's curvature.
const PERTURBED_FD_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaseKind {
    /// gᵢⱼ = δᵢⱼ in the given chart; everything curvature-like vanishes.
    FlatCartesian,
    /// Pullback of the Euclidean metric under a fixed nonlinear
    /// diffeomorphism: nonzero Christoffels, identically zero curvature.
    FlatCurvilinear,
    /// Conformal chart of the space form of sectional curvature c.
    SpaceForm(f64),
    /// Diagonal perturbation gᵢᵢ = 1 + ε·xᵢ₊₁² (indices cyclic) with
    /// non-constant curvature.
    Perturbed(f64),
}

#[derive(Clone, Debug)]
pub struct BaseGeometry {
    n: usize,
    kind: BaseKind,
}

/// A point of the tangent bundle in an induced chart.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl TangentPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        TangentPoint { x, y }
    }
}

impl BaseGeometry {
    pub fn new(kind: BaseKind, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(format!("base dimension must be >= 2, got {n}")));
        }
        Ok(BaseGeometry { n, kind })
    }

    /// Parse a CLI/config base key: `flat`, `flat-curvilinear`, `sphere:c`,
    /// `perturbed:eps`.
    pub fn parse(key: &str, n: usize) -> Result<Self> {
        let kind = if key == "flat" {
            BaseKind::FlatCartesian
        } else if key == "flat-curvilinear" {
            BaseKind::FlatCurvilinear
        } else if let Some(c) = key.strip_prefix("sphere:") {
            BaseKind::SpaceForm(
                c.parse()
                    .map_err(|_| Error::Config(format!("bad curvature in base key '{key}'")))?,
            )
        } else if let Some(e) = key.strip_prefix("perturbed:") {
            BaseKind::Perturbed(
                e.parse()
                    .map_err(|_| Error::Config(format!("bad epsilon in base key '{key}'")))?,
            )
        } else {
            return Err(Error::Config(format!(
                "unknown base kind '{key}' (expected flat | flat-curvilinear | sphere:c | perturbed:eps)"
            )));
        };
        BaseGeometry::new(kind, n)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> BaseKind {
        self.kind
    }

    /// True when the chart is defined at `x`.
    pub fn in_chart(&self, x: &[f64]) -> bool {
        match self.kind {
            BaseKind::SpaceForm(c) => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                1.0 + 0.25 * c * r2 > 1e-6
            }
            _ => true,
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, base dimension is {}",
                x.len(),
                self.n
            )));
        }
        if !self.in_chart(x) {
            return Err(Error::Chart(format!("x = {x:?} outside the conformal chart")));
        }
        Ok(())
    }

    /// Jacobian of the curvilinear diffeomorphism, J^k_i = ∂x̃^k/∂x^i.
    fn curvilinear_jacobian(&self, x: &[f64]) -> Array2<f64> {
        let n = self.n;
        let a = CURVILINEAR_AMPLITUDE;
        let mut j = Array2::eye(n);
        for k in 0..n {
            let s = (k + 1) % n;
            j[[k, s]] += a * x[s].cos();
        }
        j
    }

    pub fn metric(&self, x: &[f64]) -> Result<Array2<f64>> {
        self.check_point(x)?;
        let n = self.n;
        Ok(match self.kind {
            BaseKind::FlatCartesian => Array2::eye(n),
            BaseKind::FlatCurvilinear => {
                let j = self.curvilinear_jacobian(x);
                let mut g = Array2::zeros((n, n));
                for i in 0..n {
                    for l in 0..n {
                        g[[i, l]] = (0..n).map(|k| j[[k, i]] * j[[k, l]]).sum();
                    }
                }
                g
            }
            BaseKind::SpaceForm(c) => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let lambda = 1.0 / (1.0 + 0.25 * c * r2);
                Array2::eye(n) * (lambda * lambda)
            }
            BaseKind::Perturbed(eps) => {
                let mut g = Array2::eye(n);
                for i in 0..n {
                    let s = (i + 1) % n;
                    g[[i, i]] += eps * x[s] * x[s];
                }
                g
            }
        })
    }

    pub fn inverse_metric(&self, x: &[f64]) -> Result<Array2<f64>> {
        invert_spd(&self.metric(x)?)
    }

    /// Γ^h_{ij}, indexed [h][i][j].
    pub fn christoffels(&self, x: &[f64]) -> Result<Array3<f64>> {
        self.check_point(x)?;
        let n = self.n;
        Ok(match self.kind {
            BaseKind::FlatCartesian => Array3::zeros((n, n, n)),
            BaseKind::FlatCurvilinear => {
                // Γ^h_{ij} = (J⁻¹)^h_k ∂_i∂_j x̃^k
                let a = CURVILINEAR_AMPLITUDE;
                let jinv = invert(&self.curvilinear_jacobian(x))?;
                let mut gamma = Array3::zeros((n, n, n));
                for k in 0..n {
                    let s = (k + 1) % n;
                    let hess = -a * x[s].sin();
                    for h in 0..n {
                        gamma[[h, s, s]] += jinv[[h, k]] * hess;
                    }
                }
                gamma
            }
            BaseKind::SpaceForm(c) => {
                let phi = self.conformal_phi_grad(x, c);
                let mut gamma = Array3::zeros((n, n, n));
                for h in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let mut v = 0.0;
                            if h == i {
                                v += phi[j];
                            }
                            if h == j {
                                v += phi[i];
                            }
                            if i == j {
                                v -= phi[h];
                            }
                            gamma[[h, i, j]] = v;
                        }
                    }
                }
                gamma
            }
            BaseKind::Perturbed(_) => {
                let ginv = self.inverse_metric(x)?;
                let dg = self.perturbed_metric_derivs(x);
                let mut gamma = Array3::zeros((n, n, n));
                for h in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let mut v = 0.0;
                            for l in 0..n {
                                v += 0.5
                                    * ginv[[h, l]]
                                    * (dg[[i, l, j]] + dg[[j, i, l]] - dg[[l, i, j]]);
                            }
                            gamma[[h, i, j]] = v;
                        }
                    }
                }
                gamma
            }
        })
    }

    fn conformal_phi_grad(&self, x: &[f64], c: f64) -> Vec<f64> {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let lambda = 1.0 / (1.0 + 0.25 * c * r2);
        x.iter().map(|&xi| -0.5 * c * xi * lambda).collect()
    }

    /// ∂_i∂_j φ for the conformal factor of the space form chart.
    fn conformal_phi_hess(&self, x: &[f64], c: f64) -> Array2<f64> {
        let n = self.n;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let lambda = 1.0 / (1.0 + 0.25 * c * r2);
        let mut h = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.25 * c * c * x[i] * x[j] * lambda * lambda;
                if i == j {
                    v -= 0.5 * c * lambda;
                }
                h[[i, j]] = v;
            }
        }
        h
    }

    /// ∂_k g_ij of the perturbed base, indexed [k][i][j].
    fn perturbed_metric_derivs(&self, x: &[f64]) -> Array3<f64> {
        let n = self.n;
        let eps = match self.kind {
            BaseKind::Perturbed(e) => e,
            _ => unreachable!(),
        };
        let mut dg = Array3::zeros((n, n, n));
        for i in 0..n {
            let s = (i + 1) % n;
            dg[[s, i, i]] = 2.0 * eps * x[s];
        }
        dg
    }

    /// ∂_m Γ^h_{ij}, indexed [m][h][i][j]. Analytic for the flat and space
    /// form charts, central finite differences for the perturbed base.
    pub fn christoffel_derivs(&self, x: &[f64]) -> Result<Array4<f64>> {
        self.check_point(x)?;
        let n = self.n;
        match self.kind {
            BaseKind::FlatCartesian => Ok(Array4::zeros((n, n, n, n))),
            BaseKind::FlatCurvilinear => {
                let a = CURVILINEAR_AMPLITUDE;
                let j = self.curvilinear_jacobian(x);
                let jinv = invert(&j)?;
                let mut out = Array4::zeros((n, n, n, n));
                for k in 0..n {
                    let s = (k + 1) % n;
                    let hess = -a * x[s].sin();
                    let dhess = -a * x[s].cos(); // ∂_s of hess
                    // ∂_m (J⁻¹)^h_k = -(J⁻¹ ∂_m J J⁻¹)^h_k, and ∂_m J^r_i is
                    // supported on r with σ(r) = m = i.
                    for h in 0..n {
                        // term from differentiating J⁻¹: only m = σ(r) rows of
                        // ∂J are nonzero; ∂_m J^r_i = -a sin(x^{σ(r)}) δ_{i,σ(r)} δ_{m,σ(r)}
                        for r in 0..n {
                            let sr = (r + 1) % n;
                            let dj = -a * x[sr].sin();
                            // contribution to ∂_{sr} Γ^h_{ss}
                            out[[sr, h, s, s]] -= jinv[[h, r]] * dj * jinv[[sr, k]] * hess;
                        }
                        out[[s, h, s, s]] += jinv[[h, k]] * dhess;
                    }
                }
                Ok(out)
            }
            BaseKind::SpaceForm(c) => {
                let hess = self.conformal_phi_hess(x, c);
                let mut out = Array4::zeros((n, n, n, n));
                for m in 0..n {
                    for h in 0..n {
                        for i in 0..n {
                            for j in 0..n {
                                let mut v = 0.0;
                                if h == i {
                                    v += hess[[j, m]];
                                }
                                if h == j {
                                    v += hess[[i, m]];
                                }
                                if i == j {
                                    v -= hess[[h, m]];
                                }
                                out[[m, h, i, j]] = v;
                            }
                        }
                    }
                }
                Ok(out)
            }
            BaseKind::Perturbed(_) => {
                let h = PERTURBED_FD_STEP;
                let mut out = Array4::zeros((n, n, n, n));
                let mut xp = x.to_vec();
                for m in 0..n {
                    xp[m] = x[m] + h;
                    let gp = self.christoffels(&xp)?;
                    xp[m] = x[m] - h;
                    let gm = self.christoffels(&xp)?;
                    xp[m] = x[m];
                    for a in 0..n {
                        for i in 0..n {
                            for j in 0..n {
                                out[[m, a, i, j]] = (gp[[a, i, j]] - gm[[a, i, j]]) / (2.0 * h);
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// R^h_{kij}, indexed [h][k][i][j].
    pub fn riemann(&self, x: &[f64]) -> Result<Array4<f64>> {
        self.check_point(x)?;
        let n = self.n;
        match self.kind {
            BaseKind::FlatCartesian | BaseKind::FlatCurvilinear => Ok(Array4::zeros((n, n, n, n))),
            BaseKind::SpaceForm(c) => {
                let g = self.metric(x)?;
                let mut r = Array4::zeros((n, n, n, n));
                for h in 0..n {
                    for k in 0..n {
                        for i in 0..n {
                            for j in 0..n {
                                let mut v = 0.0;
                                if h == i {
                                    v += c * g[[j, k]];
                                }
                                if h == j {
                                    v -= c * g[[i, k]];
                                }
                                r[[h, k, i, j]] = v;
                            }
                        }
                    }
                }
                Ok(r)
            }
            BaseKind::Perturbed(_) => {
                let gamma = self.christoffels(x)?;
                let dgamma = self.christoffel_derivs(x)?;
                Ok(riemann_from_christoffels(&gamma, &dgamma))
            }
        }
    }

    /// ∇_m R^h_{kij}, indexed [m][h][k][i][j]. Identically zero for flat
    /// bases and space forms (parallel curvature); finite differences for
    /// the perturbed base.
    pub fn nabla_riemann(&self, x: &[f64]) -> Result<Array5<f64>> {
        self.check_point(x)?;
        let n = self.n;
        match self.kind {
            BaseKind::FlatCartesian | BaseKind::FlatCurvilinear | BaseKind::SpaceForm(_) => {
                Ok(Array5::zeros((n, n, n, n, n)))
            }
            BaseKind::Perturbed(_) => {
                let h = 1e-4;
                let gamma = self.christoffels(x)?;
                let r = self.riemann(x)?;
                let mut out = Array5::zeros((n, n, n, n, n));
                let mut xp = x.to_vec();
                for m in 0..n {
                    xp[m] = x[m] + h;
                    let rp = self.riemann(&xp)?;
                    xp[m] = x[m] - h;
                    let rm = self.riemann(&xp)?;
                    xp[m] = x[m];
                    for a in 0..n {
                        for k in 0..n {
                            for i in 0..n {
                                for j in 0..n {
                                    let mut v = (rp[[a, k, i, j]] - rm[[a, k, i, j]]) / (2.0 * h);
                                    for l in 0..n {
                                        v += gamma[[a, m, l]] * r[[l, k, i, j]]
                                            - gamma[[l, m, k]] * r[[a, l, i, j]]
                                            - gamma[[l, m, i]] * r[[a, k, l, j]]
                                            - gamma[[l, m, j]] * r[[a, k, i, l]];
                                    }
                                    out[[m, a, k, i, j]] = v;
                                }
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Every base tensor (and y-contraction) consumed by the adapted-frame
/// connection and curvature formulas, evaluated once at (x, y).
#[derive(Clone, Debug)]
pub struct BaseData {
    pub g: Array2<f64>,
    pub ginv: Array2<f64>,
    /// Γ^h_{ij}
    pub gamma: Array3<f64>,
    /// Γ^h_{0i} = y^k Γ^h_{ki}
    pub gamma0: Array2<f64>,
    /// ∂_m Γ^h_{ij}, indexed [m][h][i][j]
    pub dgamma: Array4<f64>,
    /// R^h_{kij}
    pub riemann: Array4<f64>,
    /// R^l_{0jk}, indexed [l][j][k]
    pub r0: Array3<f64>,
    /// R_{ikjl} = g_{ih} R^h_{kjl}
    pub rlow: Array4<f64>,
    /// R_{i0jk}, indexed [i][j][k]
    pub rlow0: Array3<f64>,
    /// ∇_m R^h_{kij}, indexed [m][h][k][i][j]
    pub nabla_r: Array5<f64>,
    /// ∇̇_i R^r_{0jk} = y^m ∇_i R^r_{mjk}, indexed [i][r][j][k]
    pub nr0: Array4<f64>,
    /// ∇̇_i R_{j0kh} = g_{jr} y^m ∇_i R^r_{mkh}, indexed [i][j][k][h]
    pub nr0_low: Array4<f64>,
}

impl BaseGeometry {
    pub fn data(&self, x: &[f64], y: &[f64]) -> Result<BaseData> {
        let n = self.n;
        if y.len() != n {
            return Err(Error::Dimension(format!(
                "tangent vector has {} components, base dimension is {n}",
                y.len()
            )));
        }
        let g = self.metric(x)?;
        let ginv = self.inverse_metric(x)?;
        let gamma = self.christoffels(x)?;
        let dgamma = self.christoffel_derivs(x)?;
        let riemann = self.riemann(x)?;
        let nabla_r = self.nabla_riemann(x)?;
        let gamma0 = gamma0(&gamma, y);
        let r0 = riemann_y(&riemann, y);
        let rlow = riemann_lowered(&riemann, &g);
        let rlow0 = riemann_lowered_y(&riemann, &g, y);
        let mut nr0 = Array4::zeros((n, n, n, n));
        let mut nr0_low = Array4::zeros((n, n, n, n));
        for i in 0..n {
            for r in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        nr0[[i, r, j, k]] =
                            (0..n).map(|m| y[m] * nabla_r[[i, r, m, j, k]]).sum();
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for h in 0..n {
                        nr0_low[[i, j, k, h]] =
                            (0..n).map(|r| g[[j, r]] * nr0[[i, r, k, h]]).sum();
                    }
                }
            }
        }
        Ok(BaseData {
            g,
            ginv,
            gamma,
            gamma0,
            dgamma,
            riemann,
            r0,
            rlow,
            rlow0,
            nabla_r,
            nr0,
            nr0_low,
        })
    }
}

/// R^h_{kij} = ∂_i Γ^h_{jk} − ∂_j Γ^h_{ik} + Γ^h_{il}Γ^l_{jk} − Γ^h_{jl}Γ^l_{ik}.
pub fn riemann_from_christoffels(gamma: &Array3<f64>, dgamma: &Array4<f64>) -> Array4<f64> {
    let n = gamma.shape()[0];
    let mut r = Array4::zeros((n, n, n, n));
    for h in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dgamma[[i, h, j, k]] - dgamma[[j, h, i, k]];
                    for l in 0..n {
                        v += gamma[[h, i, l]] * gamma[[l, j, k]]
                            - gamma[[h, j, l]] * gamma[[l, i, k]];
                    }
                    r[[h, k, i, j]] = v;
                }
            }
        }
    }
    r
}

/// g_{0i} = y^k g_{ki}.
pub fn g0(g: &Array2<f64>, y: &[f64]) -> Array1<f64> {
    let n = y.len();
    Array1::from_iter((0..n).map(|i| (0..n).map(|k| y[k] * g[[k, i]]).sum()))
}

/// Γ^h_{0i} = y^k Γ^h_{ki}, indexed [h][i].
pub fn gamma0(gamma: &Array3<f64>, y: &[f64]) -> Array2<f64> {
    let n = y.len();
    let mut out = Array2::zeros((n, n));
    for h in 0..n {
        for i in 0..n {
            out[[h, i]] = (0..n).map(|k| y[k] * gamma[[h, k, i]]).sum();
        }
    }
    out
}

/// R^l_{0jk} = y^m R^l_{mjk}, indexed [l][j][k].
pub fn riemann_y(r: &Array4<f64>, y: &[f64]) -> Array3<f64> {
    let n = y.len();
    let mut out = Array3::zeros((n, n, n));
    for l in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[[l, j, k]] = (0..n).map(|m| y[m] * r[[l, m, j, k]]).sum();
            }
        }
    }
    out
}

/// Fully lowered curvature with the y-contraction in the second slot:
/// R_{i0jk} = g_{ih} y^m R^h_{mjk}, indexed [i][j][k].
pub fn riemann_lowered_y(r: &Array4<f64>, g: &Array2<f64>, y: &[f64]) -> Array3<f64> {
    let ry = riemann_y(r, y);
    let n = y.len();
    let mut out = Array3::zeros((n, n, n));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[[i, j, k]] = (0..n).map(|h| g[[i, h]] * ry[[h, j, k]]).sum();
            }
        }
    }
    out
}

/// Fully lowered curvature R_{ikjl} = g_{ih} R^h_{kjl}, indexed [i][k][j][l].
pub fn riemann_lowered(r: &Array4<f64>, g: &Array2<f64>) -> Array4<f64> {
    let n = g.shape()[0];
    let mut out = Array4::zeros((n, n, n, n));
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    out[[i, k, j, l]] = (0..n).map(|h| g[[i, h]] * r[[h, k, j, l]]).sum();
                }
            }
        }
    }
    out
}

/// Fit a single sectional curvature against R^h_{kij} = c(g_{jk}δ^h_i − g_{ik}δ^h_j)
/// over the sample points; returns (is_constant, fitted c, max residual).
pub fn is_constant_curvature(
    base: &BaseGeometry,
    samples: &[Vec<f64>],
    tol: f64,
) -> Result<(bool, f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::Config("need at least 2 sample points".into()));
    }
    let n = base.dim();
    let mut c_fit = 0.0;
    let mut denom = 0.0;
    let mut numer = 0.0;
    // Least-squares fit of c on the first sample, residual check on all.
    {
        let x = &samples[0];
        let g = base.metric(x)?;
        let r = base.riemann(x)?;
        for h in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let model = model_space_form(&g, h, k, i, j);
                        numer += r[[h, k, i, j]] * model;
                        denom += model * model;
                    }
                }
            }
        }
        if denom > 0.0 {
            c_fit = numer / denom;
        }
    }
    let mut max_resid = 0.0f64;
    for x in samples {
        let g = base.metric(x)?;
        let r = base.riemann(x)?;
        for h in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let model = model_space_form(&g, h, k, i, j);
                        max_resid = max_resid.max((r[[h, k, i, j]] - c_fit * model).abs());
                    }
                }
            }
        }
    }
    Ok((max_resid < tol, c_fit, max_resid))
}

fn model_space_form(g: &Array2<f64>, h: usize, k: usize, i: usize, j: usize) -> f64 {
    let mut v = 0.0;
    if h == i {
        v += g[[j, k]];
    }
    if h == j {
        v -= g[[i, k]];
    }
    v
}

/// Invert a small matrix (errors on singular input).
pub fn invert(m: &Array2<f64>) -> Result<Array2<f64>> {
    let n = m.shape()[0];
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| m[[i, j]]);
    let inv = dm
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular matrix".into()))?;
    Ok(Array2::from_shape_fn((n, n), |(i, j)| inv[(i, j)]))
}

/// Invert a symmetric positive definite matrix (same path, named for intent).
pub fn invert_spd(m: &Array2<f64>) -> Result<Array2<f64>> {
    invert(m)
}
