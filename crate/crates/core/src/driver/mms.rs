//! Manufactured solution on the unit square with homogeneous-in-time decay:
//!
//! `u = e^-t sin(pi x) sin(pi y) (1, 1)`, `p = lambda e^-t sin(pi x) cos(pi y)`,
//! `T = mu e^-t cos(pi x) sin(pi y)`.

use std::f64::consts::PI;

use crate::assembly::{ParameterSet, Sources};
use crate::error::{Error, Result};

/// How the storage terms' time derivative enters the sources.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeDerivative {
    /// `d/dt` of the closed forms.
    Exact,
    /// Backward difference over the given step, so that the closed forms
    /// solve the time-discrete problem exactly.
    BackwardDifference(f64),
}

impl TimeDerivative {
    /// Factor `r` with `D_t e^-t = r e^-t`.
    fn factor(&self) -> f64 {
        match *self {
            TimeDerivative::Exact => -1.0,
            TimeDerivative::BackwardDifference(dt) => -(dt.exp_m1()) / dt,
        }
    }
}

/// Constant coefficients entering the closed forms and their forcing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsSolution {
    pub lambda: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub k: f64,
    pub theta: f64,
    pub time_derivative: TimeDerivative,
}

struct Trig {
    e: f64,
    sx: f64,
    cx: f64,
    sy: f64,
    cy: f64,
}

impl Trig {
    fn at(x: [f64; 2], t: f64) -> Trig {
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        Trig { e: (-t).exp(), sx, cx, sy, cy }
    }
}

impl MmsSolution {
    /// Requires constant coefficients.
    pub fn new(p: &ParameterSet) -> Result<Self> {
        let c = |f: &crate::assembly::CoefficientField, name: &str| {
            f.as_constant().ok_or_else(|| Error::InvalidParameter(format!("{name} must be constant for the closed forms")))
        };
        Ok(MmsSolution {
            lambda: c(&p.lambda, "lambda")?,
            mu: c(&p.mu, "mu")?,
            alpha: p.alpha,
            beta: p.beta,
            a0: p.a0,
            b0: p.b0,
            c0: p.c0,
            k: c(&p.k, "K")?,
            theta: c(&p.theta, "theta")?,
            time_derivative: TimeDerivative::Exact,
        })
    }

    /// Unit values for the spatially varying coefficients, the rest from `p`.
    pub fn with_unit_varying(p: &ParameterSet) -> Self {
        MmsSolution {
            lambda: 1.0,
            mu: 1.0,
            alpha: p.alpha,
            beta: p.beta,
            a0: p.a0,
            b0: p.b0,
            c0: p.c0,
            k: 1.0,
            theta: 1.0,
            time_derivative: TimeDerivative::Exact,
        }
    }

    pub fn displacement(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let s = Trig::at(x, t);
        let v = s.e * s.sx * s.sy;
        [v, v]
    }

    /// Rows are components.
    pub fn displacement_grad(&self, x: [f64; 2], t: f64) -> [[f64; 2]; 2] {
        let s = Trig::at(x, t);
        let g = [PI * s.e * s.cx * s.sy, PI * s.e * s.sx * s.cy];
        [g, g]
    }

    pub fn divergence(&self, x: [f64; 2], t: f64) -> f64 {
        let s = Trig::at(x, t);
        PI * s.e * (s.cx * s.sy + s.sx * s.cy)
    }

    pub fn pressure(&self, x: [f64; 2], t: f64) -> f64 {
        let s = Trig::at(x, t);
        self.lambda * s.e * s.sx * s.cy
    }

    pub fn pressure_grad(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let s = Trig::at(x, t);
        let a = self.lambda * PI * s.e;
        [a * s.cx * s.cy, -a * s.sx * s.sy]
    }

    pub fn temperature(&self, x: [f64; 2], t: f64) -> f64 {
        let s = Trig::at(x, t);
        self.mu * s.e * s.cx * s.sy
    }

    pub fn temperature_grad(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let s = Trig::at(x, t);
        let a = self.mu * PI * s.e;
        [-a * s.sx * s.sy, a * s.cx * s.cy]
    }

    pub fn total_pressure(&self, x: [f64; 2], t: f64) -> f64 {
        -self.lambda * self.divergence(x, t) + self.alpha * self.pressure(x, t) + self.beta * self.temperature(x, t)
    }

    pub fn total_pressure_grad(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let s = Trig::at(x, t);
        // grad div u
        let gd = PI * PI * s.e * (s.cx * s.cy - s.sx * s.sy);
        let (gp, gt) = (self.pressure_grad(x, t), self.temperature_grad(x, t));
        [
            -self.lambda * gd + self.alpha * gp[0] + self.beta * gt[0],
            -self.lambda * gd + self.alpha * gp[1] + self.beta * gt[1],
        ]
    }

    pub fn with_time_derivative(self, time_derivative: TimeDerivative) -> Self {
        MmsSolution { time_derivative, ..self }
    }

    /// `(f, g, H)`.
    pub fn forcing(&self, x: [f64; 2], t: f64) -> ([f64; 2], f64, f64) {
        (self.body_force(x, t), self.mass_source(x, t), self.heat_source(x, t))
    }
}

impl Sources for MmsSolution {
    fn body_force(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let s = Trig::at(x, t);
        let phi = s.e * s.sx * s.sy;
        let gd = PI * PI * s.e * (s.cx * s.cy - s.sx * s.sy);
        let base = 2.0 * self.mu * PI * PI * phi - (self.mu + self.lambda) * gd;
        let (gp, gt) = (self.pressure_grad(x, t), self.temperature_grad(x, t));
        [base + self.alpha * gp[0] + self.beta * gt[0], base + self.alpha * gp[1] + self.beta * gt[1]]
    }

    fn mass_source(&self, x: [f64; 2], t: f64) -> f64 {
        let (p, temp, d) = (self.pressure(x, t), self.temperature(x, t), self.divergence(x, t));
        let r = self.time_derivative.factor();
        r * (self.c0 * p - self.b0 * temp + self.alpha * d) + 2.0 * self.k * PI * PI * p
    }

    fn heat_source(&self, x: [f64; 2], t: f64) -> f64 {
        let (p, temp, d) = (self.pressure(x, t), self.temperature(x, t), self.divergence(x, t));
        let r = self.time_derivative.factor();
        r * (self.a0 * temp - self.b0 * p + self.beta * d) + 2.0 * self.theta * PI * PI * temp
    }
}
