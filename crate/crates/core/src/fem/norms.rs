//! Errors of finite element functions against closed forms.

use crate::error::Result;
use crate::fem::{quadrature, FieldFunction, Tabulation};

/// Squared `L2` and `H1`-seminorm errors, summed over components.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorNorms {
    pub l2_sq: f64,
    pub h1_semi_sq: f64,
}

impl ErrorNorms {
    pub fn l2(&self) -> f64 {
        self.l2_sq.sqrt()
    }

    pub fn h1_semi(&self) -> f64 {
        self.h1_semi_sq.sqrt()
    }

    /// Full `H1` norm.
    pub fn h1(&self) -> f64 {
        (self.l2_sq + self.h1_semi_sq).sqrt()
    }
}

/// `value(x, out)` writes the exact components, `grad(x, out)` the exact
/// gradients (one `[d/dx, d/dy]` per component).
pub fn errors<V, G>(f: &FieldFunction, degree: u32, value: V, grad: G) -> Result<ErrorNorms>
where
    V: Fn([f64; 2], &mut [f64]),
    G: Fn([f64; 2], &mut [[f64; 2]]),
{
    let space = &f.space;
    let rule = quadrature(degree)?;
    let tab = Tabulation::new(space.degree(), &rule.points);
    let nc = space.components();
    let mut ev = vec![0.0; nc];
    let mut eg = vec![[0.0; 2]; nc];
    let mut phys = vec![[0.0; 2]; tab.nodes];
    let mut out = ErrorNorms::default();
    for cell in 0..space.mesh().num_cells() {
        let geo = space.geometry(cell);
        for (q, &w) in rule.weights.iter().enumerate() {
            let x = geo.map(rule.points[q]);
            value(x, &mut ev);
            grad(x, &mut eg);
            for (p, g) in phys.iter_mut().zip(tab.grads_at(q)) {
                *p = geo.push_gradient(*g);
            }
            let s = w * geo.det;
            for c in 0..nc {
                let v = f.value_with(cell, c, tab.values_at(q)) - ev[c];
                let g = f.grad_with(cell, c, &phys);
                out.l2_sq += s * v * v;
                out.h1_semi_sq += s * ((g[0] - eg[c][0]).powi(2) + (g[1] - eg[c][1]).powi(2));
            }
        }
    }
    Ok(out)
}
