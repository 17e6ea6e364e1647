//! Physical parameters, piecewise-constant coefficient fields and the
//! transformed coefficients that enter the discrete operator.

use log::warn;

use crate::error::{Error, Result};

/// A coefficient that is constant or piecewise constant on the 4x4 grid of
/// subdomains of the unit square.
///
/// Grid entries are given as printed in a table: row 0 is the top band
/// `y in (3/4, 1)`, column 0 the left band `x in (0, 1/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientField {
    Constant(f64),
    Grid([[f64; 4]; 4]),
}

impl CoefficientField {
    /// Value at a point, typically a cell centroid.
    pub fn at(&self, x: [f64; 2]) -> f64 {
        match self {
            CoefficientField::Constant(v) => *v,
            CoefficientField::Grid(g) => {
                let col = ((x[0] * 4.0).floor() as isize).clamp(0, 3) as usize;
                let band = ((x[1] * 4.0).floor() as isize).clamp(0, 3) as usize;
                g[3 - band][col]
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, CoefficientField::Constant(_))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> CoefficientField {
        match self {
            CoefficientField::Constant(v) => CoefficientField::Constant(f(*v)),
            CoefficientField::Grid(g) => CoefficientField::Grid(g.map(|row| row.map(&f))),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            CoefficientField::Constant(v) => vec![*v],
            CoefficientField::Grid(g) => g.iter().flatten().copied().collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// The constant value, or `None` for a genuine grid.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            CoefficientField::Constant(v) => Some(*v),
            CoefficientField::Grid(_) => None,
        }
    }
}

impl From<f64> for CoefficientField {
    fn from(v: f64) -> Self {
        CoefficientField::Constant(v)
    }
}

/// Model coefficients and the time step.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    pub lambda: CoefficientField,
    pub mu: CoefficientField,
    /// Biot-Willis coefficient.
    pub alpha: f64,
    /// Thermal stress coefficient.
    pub beta: f64,
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    /// Permeability over fluid viscosity.
    pub k: CoefficientField,
    /// Thermal conductivity.
    pub theta: CoefficientField,
    pub dt: f64,
}

impl ParameterSet {
    /// The manufactured-solution setup used for convergence studies.
    pub fn convergence_default() -> Self {
        ParameterSet {
            lambda: 3.0.into(),
            mu: 0.5.into(),
            alpha: 3.0,
            beta: 2.0,
            a0: 4.0,
            b0: 0.1,
            c0: 0.3,
            k: 1.0.into(),
            theta: 2.0.into(),
            dt: 1e-2,
        }
    }

    /// Every coefficient equal to one, `dt = 0.01`.
    pub fn unit() -> Self {
        ParameterSet {
            lambda: 1.0.into(),
            mu: 1.0.into(),
            alpha: 1.0,
            beta: 1.0,
            a0: 1.0,
            b0: 1.0,
            c0: 1.0,
            k: 1.0.into(),
            theta: 1.0.into(),
            dt: 1e-2,
        }
    }

    /// Base point of the beta/lambda/theta/K robustness sweep:
    /// `mu = 0.5, c0 = a0 = 2, b0 = alpha = 1`, the swept values at one.
    pub fn sweep_base() -> Self {
        ParameterSet { mu: 0.5.into(), a0: 2.0, c0: 2.0, ..Self::unit() }
    }

    pub fn is_constant(&self) -> bool {
        self.lambda.is_constant() && self.mu.is_constant() && self.k.is_constant() && self.theta.is_constant()
    }

    /// Hard requirements; soft sign conditions only log a warning.
    pub fn validate(&self) -> Result<()> {
        for (name, f) in [("lambda", &self.lambda), ("mu", &self.mu), ("K", &self.k), ("theta", &self.theta)] {
            if !(f.min() > 0.0) || !f.max().is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite")));
            }
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter("time step must be positive".into()));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("a0", self.a0), ("b0", self.b0), ("c0", self.c0)]
        {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
            if v < 0.0 {
                warn!("{name} = {v} is negative");
            }
        }
        if self.a0 < self.b0 || self.c0 < self.b0 {
            warn!("a0 = {}, c0 = {} below b0 = {}", self.a0, self.c0, self.b0);
        }
        Ok(())
    }

    /// Transformed coefficients at a point.
    pub fn derived_at(&self, x: [f64; 2]) -> Result<DerivedCoefficients> {
        DerivedCoefficients::new(
            self.lambda.at(x),
            self.mu.at(x),
            self.alpha,
            self.beta,
            self.a0,
            self.b0,
            self.c0,
            self.k.at(x),
            self.theta.at(x),
            self.dt,
        )
    }

    /// Transformed coefficients; errors for heterogeneous sets.
    pub fn derived(&self) -> Result<DerivedCoefficients> {
        if !self.is_constant() {
            return Err(Error::InvalidParameter("coefficients vary in space; use derived_at".into()));
        }
        self.derived_at([0.5, 0.5])
    }
}

/// Pointwise coefficients of the discrete operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCoefficients {
    pub lambda: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `dt K`
    pub t_k: f64,
    /// `dt theta`
    pub t_theta: f64,
    /// `c0 + alpha^2 / lambda`
    pub c_alpha: f64,
    /// `alpha beta / lambda - b0`
    pub c_alpha_beta: f64,
    /// `a0 + beta^2 / lambda`
    pub c_beta: f64,
    /// `c0 - b0`
    pub c_p: f64,
    /// `a0 - b0`
    pub c_t: f64,
}

impl DerivedCoefficients {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lambda: f64,
        mu: f64,
        alpha: f64,
        beta: f64,
        a0: f64,
        b0: f64,
        c0: f64,
        k: f64,
        theta: f64,
        dt: f64,
    ) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda = {lambda}")));
        }
        Ok(DerivedCoefficients {
            lambda,
            mu,
            alpha,
            beta,
            t_k: dt * k,
            t_theta: dt * theta,
            c_alpha: c0 + alpha * alpha / lambda,
            c_alpha_beta: alpha * beta / lambda - b0,
            c_beta: a0 + beta * beta / lambda,
            c_p: c0 - b0,
            c_t: a0 - b0,
        })
    }

    pub fn inv_lambda(&self) -> f64 {
        1.0 / self.lambda
    }
}

/// Lame coefficients from Young's modulus and Poisson's ratio.
pub fn lame_from_young_poisson(e: f64, nu: f64) -> Result<(f64, f64)> {
    if !(e > 0.0) {
        return Err(Error::InvalidParameter(format!("Young's modulus {e}")));
    }
    if !(0.0..0.5).contains(&nu) {
        return Err(Error::InvalidParameter(format!("Poisson ratio {nu} outside [0, 0.5)")));
    }
    let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let mu = e / (2.0 * (1.0 + nu));
    Ok((lambda, mu))
}
