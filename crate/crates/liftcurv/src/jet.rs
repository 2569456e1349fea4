//! Truncated Taylor jets of order 3.
//!
//! The six parameter functions of the lifted metric enter the curvature
//! formulas together with their first, second and third derivatives in the
//! energy density `t`. Carrying those derivatives as jet channels keeps the
//! rational coefficient expressions (quotient rule included) exact to
//! round-off, with no numerical differentiation anywhere on the analytic
//! path.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::{Error, Result};

/// Value and first three derivatives of a scalar function at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet3 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub const ZERO: Jet3 = Jet3::constant(0.0);
    pub const ONE: Jet3 = Jet3::constant(1.0);

    pub const fn new(v: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Jet3 { v, d1, d2, d3 }
    }

    /// A constant: all derivative channels vanish.
    pub const fn constant(v: f64) -> Self {
        Jet3 { v, d1: 0.0, d2: 0.0, d3: 0.0 }
    }

    /// The identity function t ↦ t evaluated at `t`.
    pub const fn variable(t: f64) -> Self {
        Jet3 { v: t, d1: 1.0, d2: 0.0, d3: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite() && self.d3.is_finite()
    }

    /// Composition with a scalar function given by its derivatives at `self.v`
    /// (Faà di Bruno up to order 3).
    pub fn compose(self, f0: f64, f1: f64, f2: f64, f3: f64) -> Jet3 {
        let a1 = self.d1;
        let a2 = self.d2;
        let a3 = self.d3;
        Jet3 {
            v: f0,
            d1: f1 * a1,
            d2: f2 * a1 * a1 + f1 * a2,
            d3: f3 * a1 * a1 * a1 + 3.0 * f2 * a1 * a2 + f1 * a3,
        }
    }

    /// Real power. For non-integer or negative exponents the base value must
    /// be positive.
    pub fn powf(self, p: f64) -> Result<Jet3> {
        let is_int = p.fract() == 0.0;
        if self.v <= 0.0 && (!is_int || p < 0.0 && self.v == 0.0) {
            return Err(Error::Domain(format!(
                "power t^{p} undefined at t = {}",
                self.v
            )));
        }
        let f0 = self.v.powf(p);
        let f1 = p * self.v.powf(p - 1.0);
        let f2 = p * (p - 1.0) * self.v.powf(p - 2.0);
        let f3 = p * (p - 1.0) * (p - 2.0) * self.v.powf(p - 3.0);
        Ok(self.compose(f0, f1, f2, f3))
    }

    pub fn recip(self) -> Result<Jet3> {
        if self.v == 0.0 {
            return Err(Error::Degenerate("jet division by zero value".into()));
        }
        Ok(Jet3::ONE / self)
    }

    pub fn try_div(self, rhs: Jet3) -> Result<Jet3> {
        if rhs.v == 0.0 {
            return Err(Error::Degenerate("jet division by zero value".into()));
        }
        Ok(self / rhs)
    }

    /// Jet of the derivative function t ↦ f'(t). The top channel is lost to
    /// truncation and is set to zero; callers that need an exact third
    /// derivative of f' must differentiate at the closed-form level instead.
    pub fn shift_down(self) -> Jet3 {
        Jet3 { v: self.d1, d1: self.d2, d2: self.d3, d3: 0.0 }
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, rhs: Jet3) -> Jet3 {
        Jet3 {
            v: self.v + rhs.v,
            d1: self.d1 + rhs.d1,
            d2: self.d2 + rhs.d2,
            d3: self.d3 + rhs.d3,
        }
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: Jet3) -> Jet3 {
        Jet3 {
            v: self.v - rhs.v,
            d1: self.d1 - rhs.d1,
            d2: self.d2 - rhs.d2,
            d3: self.d3 - rhs.d3,
        }
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3 { v: -self.v, d1: -self.d1, d2: -self.d2, d3: -self.d3 }
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        // Leibniz rule on derivative channels.
        Jet3 {
            v: self.v * rhs.v,
            d1: self.d1 * rhs.v + self.v * rhs.d1,
            d2: self.d2 * rhs.v + 2.0 * self.d1 * rhs.d1 + self.v * rhs.d2,
            d3: self.d3 * rhs.v
                + 3.0 * self.d2 * rhs.d1
                + 3.0 * self.d1 * rhs.d2
                + self.v * rhs.d3,
        }
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: f64) -> Jet3 {
        Jet3 { v: self.v * rhs, d1: self.d1 * rhs, d2: self.d2 * rhs, d3: self.d3 * rhs }
    }
}

impl Mul<Jet3> for f64 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        rhs * self
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    fn div(self, rhs: Jet3) -> Jet3 {
        // c = a/b solved channel by channel from a = c*b.
        let b = rhs;
        let v = self.v / b.v;
        let d1 = (self.d1 - v * b.d1) / b.v;
        let d2 = (self.d2 - 2.0 * d1 * b.d1 - v * b.d2) / b.v;
        let d3 = (self.d3 - 3.0 * d2 * b.d1 - 3.0 * d1 * b.d2 - v * b.d3) / b.v;
        Jet3 { v, d1, d2, d3 }
    }
}

/// Closed-form scalar families admitted as metric parameter functions.
///
/// Exactly what the conformally-flat families of the classification need:
/// constants, polynomials in t, and scaled real powers of t (covering t⁻¹
/// and e^ε·t^(-3/2)). User-supplied functions are restricted to polynomials.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarFn {
    Const(f64),
    /// Coefficients in ascending degree order.
    Poly(Vec<f64>),
    /// coeff · t^exponent; domain t > 0 unless the exponent is a
    /// non-negative integer.
    ScaledPow { coeff: f64, exponent: f64 },
}

impl ScalarFn {
    pub fn zero() -> ScalarFn {
        ScalarFn::Const(0.0)
    }

    /// True when `t` lies in the validity domain.
    pub fn valid_at(&self, t: f64) -> bool {
        match self {
            ScalarFn::Const(_) | ScalarFn::Poly(_) => true,
            ScalarFn::ScaledPow { exponent, .. } => {
                t > 0.0 || (*exponent >= 0.0 && exponent.fract() == 0.0)
            }
        }
    }

    /// Exact derivative as another closed form.
    pub fn derivative(&self) -> ScalarFn {
        match self {
            ScalarFn::Const(_) => ScalarFn::Const(0.0),
            ScalarFn::Poly(c) => {
                if c.len() <= 1 {
                    ScalarFn::Const(0.0)
                } else {
                    ScalarFn::Poly(
                        c.iter()
                            .enumerate()
                            .skip(1)
                            .map(|(k, a)| k as f64 * a)
                            .collect(),
                    )
                }
            }
            ScalarFn::ScaledPow { coeff, exponent } => {
                if *exponent == 0.0 {
                    ScalarFn::Const(0.0)
                } else {
                    ScalarFn::ScaledPow { coeff: coeff * exponent, exponent: exponent - 1.0 }
                }
            }
        }
    }

    /// Evaluate value and first three derivatives at `t`.
    pub fn eval(&self, t: f64) -> Result<Jet3> {
        match self {
            ScalarFn::Const(k) => Ok(Jet3::constant(*k)),
            ScalarFn::Poly(c) => {
                // Horner for the value and each derivative order.
                let mut out = [0.0f64; 4];
                for (order, slot) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (k, a) in c.iter().enumerate().rev() {
                        if k < order {
                            break;
                        }
                        let mut fac = 1.0;
                        for m in 0..order {
                            fac *= (k - m) as f64;
                        }
                        acc += fac * a * t.powi((k - order) as i32);
                    }
                    *slot = acc;
                }
                Ok(Jet3::new(out[0], out[1], out[2], out[3]))
            }
            ScalarFn::ScaledPow { coeff, exponent } => {
                if !self.valid_at(t) {
                    return Err(Error::Domain(format!(
                        "t^{exponent} requires t > 0, got t = {t}"
                    )));
                }
                Ok(*coeff * Jet3::variable(t).powf(*exponent)?)
            }
        }
    }
}

/// The six jets (c₁,c₂,c₃,d₁,d₂,d₃) of the lifted-metric parameters at a
/// given energy density.
#[derive(Clone, Copy, Debug)]
pub struct ParamJets {
    pub c: [Jet3; 3],
    pub d: [Jet3; 3],
}

type ParamFn = std::sync::Arc<dyn Fn(f64) -> Result<Jet3> + Send + Sync>;

/// The six scalar parameter functions of a lifted metric, evaluated as jets
/// of the energy density, together with a validity-domain predicate.
#[derive(Clone)]
pub struct ParamFamily {
    name: String,
    c: [ParamFn; 3],
    d: [ParamFn; 3],
    domain: std::sync::Arc<dyn Fn(f64) -> bool + Send + Sync>,
}

impl std::fmt::Debug for ParamFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamFamily").field("name", &self.name).finish()
    }
}

impl ParamFamily {
    pub fn new(
        name: impl Into<String>,
        c: [ParamFn; 3],
        d: [ParamFn; 3],
        domain: std::sync::Arc<dyn Fn(f64) -> bool + Send + Sync>,
    ) -> Self {
        ParamFamily { name: name.into(), c, d, domain }
    }

    /// Build from six closed forms; the domain is the intersection of their
    /// validity domains.
    pub fn from_scalar_fns(name: impl Into<String>, c: [ScalarFn; 3], d: [ScalarFn; 3]) -> Self {
        let all: Vec<ScalarFn> = c.iter().chain(d.iter()).cloned().collect();
        let domain = std::sync::Arc::new(move |t: f64| all.iter().all(|f| f.valid_at(t)));
        let mk = |f: ScalarFn| -> ParamFn { std::sync::Arc::new(move |t| f.eval(t)) };
        let [c1, c2, c3] = c;
        let [d1, d2, d3] = d;
        ParamFamily {
            name: name.into(),
            c: [mk(c1), mk(c2), mk(c3)],
            d: [mk(d1), mk(d2), mk(d3)],
            domain,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn valid_at(&self, t: f64) -> bool {
        (self.domain)(t)
    }

    pub fn eval(&self, t: f64) -> Result<ParamJets> {
        if !self.valid_at(t) {
            return Err(Error::Domain(format!(
                "t = {t} outside the validity domain of family '{}'",
                self.name
            )));
        }
        let mut c = [Jet3::ZERO; 3];
        let mut d = [Jet3::ZERO; 3];
        for a in 0..3 {
            c[a] = (self.c[a])(t)?;
            d[a] = (self.d[a])(t)?;
        }
        let jets = ParamJets { c, d };
        for j in jets.c.iter().chain(jets.d.iter()) {
            if !j.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite parameter jet at t = {t} in family '{}'",
                    self.name
                )));
            }
        }
        Ok(jets)
    }

    /// Rescale all six parameter functions by a positive constant (used by
    /// the conformal-invariance checks of the Weyl blocks).
    pub fn scaled(&self, lambda: f64) -> ParamFamily {
        let scale = |f: &ParamFn| -> ParamFn {
            let f = f.clone();
            std::sync::Arc::new(move |t| Ok(f(t)? * lambda))
        };
        ParamFamily {
            name: format!("{}*{lambda}", self.name),
            c: [scale(&self.c[0]), scale(&self.c[1]), scale(&self.c[2])],
            d: [scale(&self.d[0]), scale(&self.d[1]), scale(&self.d[2])],
            domain: self.domain.clone(),
        }
    }
}
