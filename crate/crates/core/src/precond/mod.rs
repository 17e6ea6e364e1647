//! The two SPD block preconditioners for the four-field operator.
//!
//! Both share the elasticity block `(2 mu eps(u), eps(v))`. The block
//! diagonal variant treats total pressure, pressure and temperature
//! separately; the coupled variant inverts their joint inner product as a
//! single block. The total-pressure part always contains the mean-free
//! projection, which appears as a rank-one downdate `A - z z^T` and is
//! handled by a Woodbury correction around the base solve.

use std::sync::Arc;
use std::time::Instant;

use log::{debug, warn};

use crate::amg::{AmgHierarchy, AmgOptions, NodeLayout, SmootherKind};
use crate::assembly::{BlockLayout, BlockSystem, Field};
use crate::error::{Error, Result};
use crate::sparse::{dot, CsrMatrix, DeflatedSolve, FactorKind, Factorization, LinearOperator, Ordering, TripletBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecondKind {
    /// Elasticity block plus the coupled three-field block.
    B1,
    /// Fully block diagonal.
    B2,
}

impl PrecondKind {
    pub fn name(&self) -> &'static str {
        match self {
            PrecondKind::B1 => "b1",
            PrecondKind::B2 => "b2",
        }
    }
}

impl std::str::FromStr for PrecondKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "b1" => Ok(PrecondKind::B1),
            "b2" => Ok(PrecondKind::B2),
            _ => Err(Error::Config(format!("unknown preconditioner '{s}' (b1|b2)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Realization {
    /// Sparse Cholesky of every block.
    Exact,
    /// One AMG V-cycle per block.
    Amg,
}

impl Realization {
    pub fn name(&self) -> &'static str {
        match self {
            Realization::Exact => "exact",
            Realization::Amg => "amg",
        }
    }
}

impl std::str::FromStr for Realization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" | "lu" => Ok(Realization::Exact),
            "amg" => Ok(Realization::Amg),
            _ => Err(Error::Config(format!("unknown realization '{s}' (exact|amg)"))),
        }
    }
}

/// Accuracy of `A^{-1} z` under AMG; the V-cycle alone misjudges
/// `1 - z^T A^{-1} z` badly once it is small (large `lambda`).
const DEFLATION_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct PrecondOptions {
    /// Scalar and coupled blocks.
    pub amg: AmgOptions,
    pub elasticity_amg: AmgOptions,
    /// Smoother for the coupled three-field block under AMG.
    pub coupled_smoother: SmootherKind,
}

impl Default for PrecondOptions {
    fn default() -> Self {
        let amg = AmgOptions { sweeps: 2, ..AmgOptions::default() };
        PrecondOptions {
            amg,
            elasticity_amg: AmgOptions { finest_strength: Some(0.25), ..amg },
            coupled_smoother: SmootherKind::PointGaussSeidel,
        }
    }
}

enum Lower {
    Diagonal { xi: DeflatedSolve, p: Arc<dyn LinearOperator>, t: Arc<dyn LinearOperator> },
    Coupled { solve: DeflatedSolve },
}

/// SPD matrices defining a preconditioner (sparse parts; the rank-one
/// downdate is kept as the vector `z`).
#[derive(Debug, Clone)]
pub struct PrecondMatrices {
    pub elasticity: CsrMatrix,
    /// Block diagonal: total pressure, pressure, temperature. Coupled: one
    /// matrix over `xi | p | T`.
    pub lower: Vec<CsrMatrix>,
    /// `(1, phi_i)` on the total-pressure space.
    pub z: Vec<f64>,
}

impl PrecondMatrices {
    pub fn new(kind: PrecondKind, system: &BlockSystem) -> Self {
        let bl = &system.blocks;
        let l = &system.layout;
        let bd = |f: Field| -> Vec<usize> {
            let off = l.offset(f);
            system.boundary_dofs.iter().filter(|&&d| l.range(f).contains(&d)).map(|&d| d - off).collect()
        };
        let constrain = |mut m: CsrMatrix, dofs: &[usize]| {
            m.zero_rows_cols_set_diag(dofs);
            m.pruned()
        };
        let elasticity = constrain(bl.elasticity.clone(), &bd(Field::Displacement));
        let xi_base = bl.mass_q_inv_lambda.add(1.0, &bl.mass_q_inv_two_mu, 1.0);
        let lower = match kind {
            PrecondKind::B2 => {
                let p = bl.mass_w_c_p.add(1.0, &bl.stiffness_w_t_k, 1.0);
                let t = bl.mass_w_c_t.add(1.0, &bl.stiffness_w_t_theta, 1.0);
                vec![xi_base, constrain(p, &bd(Field::Pressure)), constrain(t, &bd(Field::Temperature))]
            }
            PrecondKind::B1 => {
                let nq = l.size(Field::TotalPressure);
                let nw = l.size(Field::Pressure);
                let n = nq + 2 * nw;
                let mut t = TripletBuilder::with_capacity(n, n, xi_base.nnz() + 8 * bl.mass_w.nnz());
                t.push_block(0, 0, &xi_base, 1.0);
                t.push_block(0, nq, &bl.mass_qw_alpha, -1.0);
                t.push_block(0, nq + nw, &bl.mass_qw_beta, -1.0);
                t.push_block(nq, 0, &bl.mass_qw_alpha.transpose(), -1.0);
                t.push_block(nq + nw, 0, &bl.mass_qw_beta.transpose(), -1.0);
                t.push_block(nq, nq, &bl.mass_w_c_alpha, 1.0);
                t.push_block(nq, nq, &bl.stiffness_w_t_k, 1.0);
                t.push_block(nq, nq + nw, &bl.mass_w_c_alpha_beta, 1.0);
                t.push_block(nq + nw, nq, &bl.mass_w_c_alpha_beta, 1.0);
                t.push_block(nq + nw, nq + nw, &bl.mass_w_c_beta, 1.0);
                t.push_block(nq + nw, nq + nw, &bl.stiffness_w_t_theta, 1.0);
                let mut dofs: Vec<usize> = bd(Field::Pressure).into_iter().map(|d| d + nq).collect();
                dofs.extend(bd(Field::Temperature).into_iter().map(|d| d + nq + nw));
                vec![constrain(t.build(), &dofs)]
            }
        };
        PrecondMatrices { elasticity, lower, z: bl.z_inv_two_mu.clone() }
    }
}

/// `B^{-1}` for one of the two preconditioners.
pub struct BlockPreconditioner {
    kind: PrecondKind,
    realization: Realization,
    layout: BlockLayout,
    matrices: PrecondMatrices,
    elasticity: Arc<dyn LinearOperator>,
    lower: Lower,
    setup_seconds: f64,
}

impl std::fmt::Debug for BlockPreconditioner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlockPreconditioner")
            .field("kind", &self.kind)
            .field("realization", &self.realization)
            .field("dim", &self.layout.dim())
            .finish()
    }
}

impl BlockPreconditioner {
    pub fn new(kind: PrecondKind, realization: Realization, system: &BlockSystem) -> Result<Self> {
        Self::with_options(kind, realization, system, &PrecondOptions::default())
    }

    pub fn with_options(
        kind: PrecondKind,
        realization: Realization,
        system: &BlockSystem,
        opts: &PrecondOptions,
    ) -> Result<Self> {
        let start = Instant::now();
        if system.coeffs.min_lambda() < 1.0 {
            warn!("lambda < 1: the lambda^-1 I + I_0 total-pressure weight is used as is");
        }
        let matrices = PrecondMatrices::new(kind, system);
        let spaces = &system.spaces;
        let elasticity: Arc<dyn LinearOperator> = match realization {
            Realization::Exact => Arc::new(spd_factor(&matrices.elasticity)?),
            Realization::Amg => {
                let nodes = spaces.displacement.num_nodes();
                let coords = spaces.displacement.node_coords();
                let free: Vec<bool> = spaces.displacement.node_on_boundary().iter().map(|b| !b).collect();
                let mut modes = vec![vec![0.0; 2 * nodes]; 3];
                for (i, x) in coords.iter().enumerate() {
                    if free[i] {
                        modes[0][2 * i] = 1.0;
                        modes[1][2 * i + 1] = 1.0;
                        modes[2][2 * i] = -x[1];
                        modes[2][2 * i + 1] = x[0];
                    }
                }
                Arc::new(AmgHierarchy::new(&matrices.elasticity, NodeLayout::interleaved(nodes, 2), &modes, &opts.elasticity_amg)?)
            }
        };
        let scalar = |m: &CsrMatrix| -> Result<Arc<dyn LinearOperator>> {
            Ok(match realization {
                Realization::Exact => Arc::new(spd_factor(m)?),
                Realization::Amg => {
                    let n = m.nrows();
                    Arc::new(AmgHierarchy::new(m, NodeLayout::scalar(n), &[vec![1.0; n]], &opts.amg)?)
                }
            })
        };
        let deflate = |base: Arc<dyn LinearOperator>, a: &CsrMatrix, z: Vec<f64>| match realization {
            Realization::Exact => DeflatedSolve::new(base, z),
            Realization::Amg => DeflatedSolve::refined(base, a, z, DEFLATION_RTOL),
        };
        let lower = match kind {
            PrecondKind::B2 => {
                let xi = deflate(scalar(&matrices.lower[0])?, &matrices.lower[0], matrices.z.clone())?;
                Lower::Diagonal { xi, p: scalar(&matrices.lower[1])?, t: scalar(&matrices.lower[2])? }
            }
            PrecondKind::B1 => {
                let a1 = &matrices.lower[0];
                let base: Arc<dyn LinearOperator> = match realization {
                    Realization::Exact => Arc::new(spd_factor(a1)?),
                    Realization::Amg => {
                        let (layout, ns) = coupled_layout(system);
                        let amg = AmgOptions { smoother: opts.coupled_smoother, ..opts.amg };
                        Arc::new(AmgHierarchy::new(a1, layout, &ns, &amg)?)
                    }
                };
                let mut y = matrices.z.clone();
                y.resize(a1.nrows(), 0.0);
                Lower::Coupled { solve: deflate(base, a1, y)? }
            }
        };
        let setup_seconds = start.elapsed().as_secs_f64();
        debug!("{} {} preconditioner set up in {setup_seconds:.3}s", kind.name(), realization.name());
        Ok(BlockPreconditioner { kind, realization, layout: system.layout, matrices, elasticity, lower, setup_seconds })
    }

    pub fn kind(&self) -> PrecondKind {
        self.kind
    }

    pub fn realization(&self) -> Realization {
        self.realization
    }

    pub fn matrices(&self) -> &PrecondMatrices {
        &self.matrices
    }

    pub fn setup_seconds(&self) -> f64 {
        self.setup_seconds
    }

    /// `1 - z^T A^{-1} z` of the total-pressure deflation.
    pub fn deflation_scalar(&self) -> f64 {
        match &self.lower {
            Lower::Diagonal { xi, .. } => xi.scalar(),
            Lower::Coupled { solve } => solve.scalar(),
        }
    }

    /// `B x` (not the inverse).
    pub fn apply_forward(&self, x: &[f64]) -> Vec<f64> {
        let l = &self.layout;
        let m = &self.matrices;
        let mut y = vec![0.0; l.dim()];
        m.elasticity.matvec(l.slice(x, Field::Displacement), l.slice_mut(&mut y, Field::Displacement));
        let ox = l.offset(Field::TotalPressure);
        let lower_x = &x[ox..];
        let nq = l.size(Field::TotalPressure);
        let zx = dot(&m.z, &lower_x[..nq]);
        match self.kind {
            PrecondKind::B2 => {
                for (k, f) in [Field::TotalPressure, Field::Pressure, Field::Temperature].into_iter().enumerate() {
                    m.lower[k].matvec(l.slice(x, f), l.slice_mut(&mut y, f));
                }
            }
            PrecondKind::B1 => m.lower[0].matvec(lower_x, &mut y[ox..]),
        }
        for (yi, zi) in y[ox..ox + nq].iter_mut().zip(&m.z) {
            *yi -= zi * zx;
        }
        y
    }

    /// `x^T B x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.apply_forward(x))
    }

    /// The parameter-dependent norm `sqrt(x^T B x)`.
    pub fn norm(&self, x: &[f64]) -> f64 {
        self.quad_form(x).max(0.0).sqrt()
    }
}

impl LinearOperator for BlockPreconditioner {
    fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let l = &self.layout;
        self.elasticity.apply(l.slice(r, Field::Displacement), &mut z[l.range(Field::Displacement)]);
        match &self.lower {
            Lower::Diagonal { xi, p, t } => {
                xi.apply(l.slice(r, Field::TotalPressure), &mut z[l.range(Field::TotalPressure)]);
                p.apply(l.slice(r, Field::Pressure), &mut z[l.range(Field::Pressure)]);
                t.apply(l.slice(r, Field::Temperature), &mut z[l.range(Field::Temperature)]);
            }
            Lower::Coupled { solve } => {
                let o = l.offset(Field::TotalPressure);
                solve.apply(&r[o..], &mut z[o..]);
            }
        }
    }
}

fn spd_factor(m: &CsrMatrix) -> Result<Factorization> {
    Factorization::new(m, FactorKind::Cholesky, Ordering::Auto)
}

/// Node layout of the coupled `xi | p | T` block: each mesh vertex groups
/// its three unknowns, each edge its pressure and temperature unknowns.
/// Near-nullspace: the three field-wise constants.
fn coupled_layout(system: &BlockSystem) -> (NodeLayout, Vec<Vec<f64>>) {
    let l = &system.layout;
    let nq = l.size(Field::TotalPressure);
    let nw = l.size(Field::Pressure);
    let nv = system.spaces.mesh.num_vertices();
    let mut groups: Vec<Vec<usize>> = (0..nv).map(|v| vec![v, nq + v, nq + nw + v]).collect();
    groups.extend((nv..nw).map(|e| vec![nq + e, nq + nw + e]));
    let n = nq + 2 * nw;
    let layout = NodeLayout::from_groups(n, &groups, None).expect("coupled layout covers all unknowns");
    let ns = (0..3)
        .map(|f| {
            let range = match f {
                0 => 0..nq,
                1 => nq..nq + nw,
                _ => nq + nw..n,
            };
            (0..n).map(|i| if range.contains(&i) { 1.0 } else { 0.0 }).collect()
        })
        .collect();
    (layout, ns)
}
