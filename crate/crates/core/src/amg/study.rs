//! Smoother comparison on the equal-order (P1) discretization of the
//! coupled total-pressure / pressure / temperature inner product.

use std::sync::Arc;

use super::{AmgHierarchy, AmgOptions, NodeLayout, SmootherKind};
use crate::assembly::forms::{mass, stiffness};
use crate::assembly::ParameterSet;
use crate::error::Result;
use crate::fem::FunctionSpace;
use crate::mesh::Mesh;
use crate::sparse::{lanczos_extreme_eigs, CsrMatrix, LanczosOptions, TripletBuilder};

/// `(theta, K)` cells, top to bottom.
pub const THETA_K_GRID: [(f64, f64); 12] = [
    (1e-6, 1e-9),
    (1e-6, 1e-6),
    (1e-6, 1e-3),
    (1e-6, 1.0),
    (1e-3, 1e-9),
    (1e-3, 1e-6),
    (1e-3, 1e-3),
    (1e-3, 1.0),
    (1.0, 1e-9),
    (1.0, 1e-6),
    (1.0, 1e-3),
    (1.0, 1.0),
];

/// Coupling parameters of the robustness sweep with `beta = 1e-4`,
/// `lambda = 1`.
pub fn study_parameters() -> ParameterSet {
    ParameterSet { beta: 1e-4, ..ParameterSet::sweep_base() }
}

/// The coupled SPD block on P1 x P1 x P1, unknowns interleaved per vertex
/// as `(xi, p, T)`. Pressure and temperature rows on the boundary are
/// identity. Returns the matrix, its node layout and the three
/// field-constant near-nullspace vectors.
pub fn coupled_p1_operator(level: u32, params: &ParameterSet) -> Result<(CsrMatrix, NodeLayout, Vec<Vec<f64>>)> {
    let mesh = Arc::new(Mesh::unit_square(level)?);
    let s = FunctionSpace::new(mesh, 1, 1)?;
    let d = params.derived()?;
    let ones = vec![1.0; s.mesh().num_cells()];
    let m = mass(&s, &s, &ones)?;
    let k = stiffness(&s, &ones)?;
    let n = s.dim();
    let il = 1.0 / d.lambda;
    // Field pairs (row, col) with mass and stiffness weights.
    let couplings = [
        (0, 0, 1.0 + il, 0.0),
        (0, 1, -d.alpha * il, 0.0),
        (0, 2, -d.beta * il, 0.0),
        (1, 1, d.c_alpha, d.t_k),
        (1, 2, d.c_alpha_beta, 0.0),
        (2, 2, d.c_beta, d.t_theta),
    ];
    let mut boundary = vec![false; n];
    for b in s.boundary_dofs() {
        boundary[b] = true;
    }
    let mut t = TripletBuilder::with_capacity(3 * n, 3 * n, 9 * m.nnz());
    for &(f, g, wm, wk) in &couplings {
        for i in 0..n {
            let (cols, vals) = m.row(i);
            let (kcols, kvals) = k.row(i);
            for ((&j, &mv), (&kj, &kv)) in cols.iter().zip(vals).zip(kcols.iter().zip(kvals)) {
                debug_assert_eq!(j, kj);
                let v = wm * mv + wk * kv;
                let fixed = (f > 0 && boundary[i]) || (g > 0 && boundary[j]);
                let v = if fixed { if f == g && i == j { 1.0 } else { 0.0 } } else { v };
                if v == 0.0 {
                    continue;
                }
                t.push(3 * i + f, 3 * j + g, v);
                if f != g {
                    t.push(3 * j + g, 3 * i + f, v);
                }
            }
        }
    }
    let a = t.build();
    let nullspace = (0..3).map(|f| (0..3 * n).map(|i| if i % 3 == f { 1.0 } else { 0.0 }).collect()).collect();
    Ok((a, NodeLayout::interleaved(n, 3), nullspace))
}

#[derive(Debug, Clone)]
pub struct SmootherStudyRow {
    pub theta: f64,
    pub k: f64,
    pub level: u32,
    pub smoother: SmootherKind,
    pub kappa: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub amg_levels: usize,
}

/// Condition numbers of the V-cycle preconditioned coupled block for every
/// `(theta, K)` cell, level and smoother.
pub fn smoother_study(
    base: &ParameterSet,
    grid: &[(f64, f64)],
    levels: &[u32],
    smoothers: &[SmootherKind],
) -> Result<Vec<SmootherStudyRow>> {
    let mut rows = Vec::new();
    for &(theta, k) in grid {
        let params = ParameterSet { theta: theta.into(), k: k.into(), ..base.clone() };
        for &level in levels {
            let (a, layout, ns) = coupled_p1_operator(level, &params)?;
            for &smoother in smoothers {
                let opts = AmgOptions { smoother, ..Default::default() };
                let h = AmgHierarchy::new(&a, layout.clone(), &ns, &opts)?;
                let est = lanczos_extreme_eigs(&a, &h, &LanczosOptions { tol: 1e-8, max_iters: 400, ..Default::default() })?;
                rows.push(SmootherStudyRow {
                    theta,
                    k,
                    level,
                    smoother,
                    kappa: est.lambda_max / est.lambda_min,
                    lambda_min: est.lambda_min,
                    lambda_max: est.lambda_max,
                    amg_levels: h.num_levels(),
                });
            }
        }
    }
    Ok(rows)
}
