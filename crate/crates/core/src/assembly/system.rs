//! The four-field block operator, right-hand sides and Dirichlet handling.
//!
//! Unknowns are ordered `u | xi | p | T`. Displacement, pressure and
//! temperature carry Dirichlet conditions on the whole boundary; the total
//! pressure `xi` carries none.

use std::sync::Arc;

use super::forms::{basis_integrals, divergence, elasticity, load, mass, stiffness};
use super::params::{DerivedCoefficients, ParameterSet};
use crate::error::{Error, Result};
use crate::fem::{FieldFunction, FunctionSpace};
use crate::mesh::Mesh;
use crate::sparse::{CsrMatrix, TripletBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Displacement,
    TotalPressure,
    Pressure,
    Temperature,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::Displacement, Field::TotalPressure, Field::Pressure, Field::Temperature];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Displacement in vector P2, total pressure in P1, pressure and
/// temperature in P2.
#[derive(Debug, Clone)]
pub struct Spaces {
    pub mesh: Arc<Mesh>,
    pub displacement: Arc<FunctionSpace>,
    pub total_pressure: Arc<FunctionSpace>,
    /// Shared by pressure and temperature.
    pub scalar: Arc<FunctionSpace>,
}

impl Spaces {
    pub fn new(mesh: Arc<Mesh>) -> Result<Self> {
        Ok(Spaces {
            displacement: Arc::new(FunctionSpace::new(mesh.clone(), 2, 2)?),
            total_pressure: Arc::new(FunctionSpace::new(mesh.clone(), 1, 1)?),
            scalar: Arc::new(FunctionSpace::new(mesh.clone(), 2, 1)?),
            mesh,
        })
    }

    pub fn unit_square(level: u32) -> Result<Self> {
        Self::new(Arc::new(Mesh::unit_square(level)?))
    }

    pub fn space(&self, f: Field) -> &Arc<FunctionSpace> {
        match f {
            Field::Displacement => &self.displacement,
            Field::TotalPressure => &self.total_pressure,
            Field::Pressure | Field::Temperature => &self.scalar,
        }
    }

    pub fn layout(&self) -> BlockLayout {
        BlockLayout::new([self.displacement.dim(), self.total_pressure.dim(), self.scalar.dim(), self.scalar.dim()])
    }

    /// Constrained dofs in global numbering, sorted.
    pub fn boundary_dofs(&self) -> Vec<usize> {
        let layout = self.layout();
        let mut out = Vec::new();
        for f in [Field::Displacement, Field::Pressure, Field::Temperature] {
            let off = layout.offset(f);
            out.extend(self.space(f).boundary_dofs().into_iter().map(|d| d + off));
        }
        out
    }
}

/// Sizes and offsets of the four blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLayout {
    offsets: [usize; 5],
}

impl BlockLayout {
    pub fn new(sizes: [usize; 4]) -> Self {
        let mut offsets = [0; 5];
        for k in 0..4 {
            offsets[k + 1] = offsets[k] + sizes[k];
        }
        BlockLayout { offsets }
    }

    pub fn offset(&self, f: Field) -> usize {
        self.offsets[f.index()]
    }

    pub fn size(&self, f: Field) -> usize {
        self.offsets[f.index() + 1] - self.offsets[f.index()]
    }

    pub fn range(&self, f: Field) -> std::ops::Range<usize> {
        self.offsets[f.index()]..self.offsets[f.index() + 1]
    }

    pub fn dim(&self) -> usize {
        self.offsets[4]
    }

    pub fn slice<'a>(&self, v: &'a [f64], f: Field) -> &'a [f64] {
        &v[self.range(f)]
    }

    pub fn slice_mut<'a>(&self, v: &'a mut [f64], f: Field) -> &'a mut [f64] {
        &mut v[self.range(f)]
    }
}

/// Pointwise coefficients evaluated at every cell centroid.
#[derive(Debug, Clone)]
pub struct CellCoefficients {
    pub cells: Vec<DerivedCoefficients>,
}

impl CellCoefficients {
    pub fn new(mesh: &Mesh, params: &ParameterSet) -> Result<Self> {
        params.validate()?;
        let cells = mesh.geometries().map(|(_, g)| params.derived_at(g.centroid())).collect::<Result<_>>()?;
        Ok(CellCoefficients { cells })
    }

    pub fn field(&self, f: impl Fn(&DerivedCoefficients) -> f64) -> Vec<f64> {
        self.cells.iter().map(f).collect()
    }

    /// Smallest Lame lambda over the cells.
    pub fn min_lambda(&self) -> f64 {
        self.cells.iter().map(|c| c.lambda).fold(f64::INFINITY, f64::min)
    }
}

/// Unconstrained component matrices. Names give the integrand; `qw`
/// matrices have total-pressure rows and scalar-space columns.
#[derive(Debug, Clone)]
pub struct OperatorBlocks {
    /// `(2 mu eps(u), eps(v))`
    pub elasticity: CsrMatrix,
    /// `(div u, phi)`
    pub divergence: CsrMatrix,
    pub mass_q: CsrMatrix,
    pub mass_q_inv_lambda: CsrMatrix,
    /// `(phi / (2 mu), psi)`
    pub mass_q_inv_two_mu: CsrMatrix,
    pub mass_qw_alpha: CsrMatrix,
    pub mass_qw_beta: CsrMatrix,
    pub mass_w: CsrMatrix,
    pub mass_w_c_alpha: CsrMatrix,
    pub mass_w_c_alpha_beta: CsrMatrix,
    pub mass_w_c_beta: CsrMatrix,
    pub mass_w_c_p: CsrMatrix,
    pub mass_w_c_t: CsrMatrix,
    pub stiffness_w: CsrMatrix,
    pub stiffness_w_t_k: CsrMatrix,
    pub stiffness_w_t_theta: CsrMatrix,
    /// `(1, phi_i)` on the total-pressure space.
    pub z: Vec<f64>,
    /// `(1 / (2 mu), phi_i) / sqrt((1 / (2 mu), 1))`, the rank-one term of the
    /// weighted mean-zero inner product.
    pub z_inv_two_mu: Vec<f64>,
}

impl OperatorBlocks {
    pub fn assemble(spaces: &Spaces, coeffs: &CellCoefficients) -> Result<Self> {
        let (v, q, w) = (&spaces.displacement, &spaces.total_pressure, &spaces.scalar);
        if coeffs.cells.len() != spaces.mesh.num_cells() {
            return Err(Error::Dimension { expected: spaces.mesh.num_cells(), got: coeffs.cells.len() });
        }
        let ones = vec![1.0; coeffs.cells.len()];
        let inv_two_mu = coeffs.field(|c| 0.5 / c.mu);
        let mut z_inv_two_mu = load(q, q.degree(), |k, _, o| o[0] = inv_two_mu[k])?;
        let total: f64 = z_inv_two_mu.iter().sum();
        z_inv_two_mu.iter_mut().for_each(|v| *v /= total.sqrt());
        Ok(OperatorBlocks {
            elasticity: elasticity(v, &coeffs.field(|c| 2.0 * c.mu))?,
            divergence: divergence(q, v)?,
            mass_q: mass(q, q, &ones)?,
            mass_q_inv_lambda: mass(q, q, &coeffs.field(|c| 1.0 / c.lambda))?,
            mass_q_inv_two_mu: mass(q, q, &inv_two_mu)?,
            mass_qw_alpha: mass(q, w, &coeffs.field(|c| c.alpha / c.lambda))?,
            mass_qw_beta: mass(q, w, &coeffs.field(|c| c.beta / c.lambda))?,
            mass_w: mass(w, w, &ones)?,
            mass_w_c_alpha: mass(w, w, &coeffs.field(|c| c.c_alpha))?,
            mass_w_c_alpha_beta: mass(w, w, &coeffs.field(|c| c.c_alpha_beta))?,
            mass_w_c_beta: mass(w, w, &coeffs.field(|c| c.c_beta))?,
            mass_w_c_p: mass(w, w, &coeffs.field(|c| c.c_p))?,
            mass_w_c_t: mass(w, w, &coeffs.field(|c| c.c_t))?,
            stiffness_w: stiffness(w, &ones)?,
            stiffness_w_t_k: stiffness(w, &coeffs.field(|c| c.t_k))?,
            stiffness_w_t_theta: stiffness(w, &coeffs.field(|c| c.t_theta))?,
            z: basis_integrals(q)?,
            z_inv_two_mu,
        })
    }

    /// The full symmetric indefinite operator before boundary conditions.
    pub fn operator(&self, layout: &BlockLayout) -> CsrMatrix {
        let (ou, ox, op, ot) = (
            layout.offset(Field::Displacement),
            layout.offset(Field::TotalPressure),
            layout.offset(Field::Pressure),
            layout.offset(Field::Temperature),
        );
        let n = layout.dim();
        let mut t = TripletBuilder::with_capacity(n, n, 2 * self.elasticity.nnz() + 6 * self.mass_w.nnz());
        t.push_block(ou, ou, &self.elasticity, 1.0);
        let dt = self.divergence.transpose();
        t.push_block(ou, ox, &dt, -1.0);
        t.push_block(ox, ou, &self.divergence, -1.0);
        t.push_block(ox, ox, &self.mass_q_inv_lambda, -1.0);
        t.push_block(ox, op, &self.mass_qw_alpha, 1.0);
        t.push_block(ox, ot, &self.mass_qw_beta, 1.0);
        t.push_block(op, ox, &self.mass_qw_alpha.transpose(), 1.0);
        t.push_block(ot, ox, &self.mass_qw_beta.transpose(), 1.0);
        t.push_block(op, op, &self.mass_w_c_alpha, -1.0);
        t.push_block(op, op, &self.stiffness_w_t_k, -1.0);
        t.push_block(op, ot, &self.mass_w_c_alpha_beta, -1.0);
        t.push_block(ot, op, &self.mass_w_c_alpha_beta, -1.0);
        t.push_block(ot, ot, &self.mass_w_c_beta, -1.0);
        t.push_block(ot, ot, &self.stiffness_w_t_theta, -1.0);
        t.build()
    }
}

/// Source terms of the model, evaluated pointwise.
pub trait Sources {
    fn body_force(&self, x: [f64; 2], t: f64) -> [f64; 2];
    fn mass_source(&self, x: [f64; 2], t: f64) -> f64;
    fn heat_source(&self, x: [f64; 2], t: f64) -> f64;
}

/// Vanishing sources.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoSources;

impl Sources for NoSources {
    fn body_force(&self, _: [f64; 2], _: f64) -> [f64; 2] {
        [0.0; 2]
    }

    fn mass_source(&self, _: [f64; 2], _: f64) -> f64 {
        0.0
    }

    fn heat_source(&self, _: [f64; 2], _: f64) -> f64 {
        0.0
    }
}

/// Quadrature degree for source integrals.
pub const RHS_QUADRATURE: u32 = 4;

/// Assembled operator with Dirichlet rows and columns replaced by identity.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub spaces: Spaces,
    pub params: ParameterSet,
    pub coeffs: CellCoefficients,
    pub layout: BlockLayout,
    pub blocks: OperatorBlocks,
    /// Before boundary conditions; used for lifting.
    pub unconstrained: CsrMatrix,
    /// Symmetric, boundary rows and columns are identity.
    pub matrix: CsrMatrix,
    pub boundary_dofs: Vec<usize>,
    pub rhs_quadrature: u32,
}

impl BlockSystem {
    pub fn assemble(spaces: Spaces, params: &ParameterSet) -> Result<Self> {
        let coeffs = CellCoefficients::new(&spaces.mesh, params)?;
        let blocks = OperatorBlocks::assemble(&spaces, &coeffs)?;
        let layout = spaces.layout();
        let unconstrained = blocks.operator(&layout);
        let boundary_dofs = spaces.boundary_dofs();
        let mut matrix = unconstrained.clone();
        matrix.zero_rows_cols_set_diag(&boundary_dofs);
        let matrix = matrix.pruned();
        Ok(BlockSystem {
            spaces,
            params: params.clone(),
            coeffs,
            layout,
            blocks,
            unconstrained,
            matrix,
            boundary_dofs,
            rhs_quadrature: RHS_QUADRATURE,
        })
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// Load vector `(f, v), 0, -(g~, q), -(H~, S)` for the step ending at
    /// `t`, before boundary conditions. `previous` is the full state at the
    /// previous step; its contribution is integrated exactly through the
    /// assembled mass matrices.
    pub fn load_vector(&self, sources: &dyn Sources, t: f64, previous: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if previous.len() != n {
            return Err(Error::Dimension { expected: n, got: previous.len() });
        }
        let dt = self.params.dt;
        let deg = self.rhs_quadrature;
        let mut b = vec![0.0; n];
        let f = load(&self.spaces.displacement, deg, |_, x, out| out.copy_from_slice(&sources.body_force(x, t)))?;
        let g = load(&self.spaces.scalar, deg, |_, x, out| out[0] = sources.mass_source(x, t))?;
        let h = load(&self.spaces.scalar, deg, |_, x, out| out[0] = sources.heat_source(x, t))?;
        let l = &self.layout;
        l.slice_mut(&mut b, Field::Displacement).copy_from_slice(&f);

        let xi0 = l.slice(previous, Field::TotalPressure);
        let p0 = l.slice(previous, Field::Pressure);
        let t0 = l.slice(previous, Field::Temperature);
        let bl = &self.blocks;
        // -(g~, q) = -dt (g, q) + ((alpha/lambda) xi0, q) - (c_alpha p0, q) - (c_ab T0, q)
        let mut bp: Vec<f64> = g.iter().map(|v| -dt * v).collect();
        add_mul_transpose(&mut bp, &bl.mass_qw_alpha, xi0, 1.0);
        add_mul(&mut bp, &bl.mass_w_c_alpha, p0, -1.0);
        add_mul(&mut bp, &bl.mass_w_c_alpha_beta, t0, -1.0);
        let mut bt: Vec<f64> = h.iter().map(|v| -dt * v).collect();
        add_mul_transpose(&mut bt, &bl.mass_qw_beta, xi0, 1.0);
        add_mul(&mut bt, &bl.mass_w_c_alpha_beta, p0, -1.0);
        add_mul(&mut bt, &bl.mass_w_c_beta, t0, -1.0);
        l.slice_mut(&mut b, Field::Pressure).copy_from_slice(&bp);
        l.slice_mut(&mut b, Field::Temperature).copy_from_slice(&bt);
        Ok(b)
    }

    /// Full-length vector holding boundary values (interior entries unused).
    pub fn boundary_vector(&self, u: &FieldFunction, p: &FieldFunction, t: &FieldFunction) -> Result<Vec<f64>> {
        let l = &self.layout;
        let mut g = vec![0.0; self.dim()];
        for (f, ff) in [(Field::Displacement, u), (Field::Pressure, p), (Field::Temperature, t)] {
            if !Arc::ptr_eq(&ff.space, self.spaces.space(f)) && ff.space.dim() != l.size(f) {
                return Err(Error::Mismatch(format!("boundary data for {f:?} on a foreign space")));
            }
            if ff.coeffs.len() != l.size(f) {
                return Err(Error::Dimension { expected: l.size(f), got: ff.coeffs.len() });
            }
            l.slice_mut(&mut g, f).copy_from_slice(&ff.coeffs);
        }
        Ok(g)
    }

    /// Symmetric elimination: `rhs -= A g` over the boundary values `g`,
    /// then boundary entries of `rhs` are set to `g`.
    pub fn apply_dirichlet(&self, rhs: &mut [f64], boundary_values: &[f64]) -> Result<()> {
        let n = self.dim();
        if rhs.len() != n || boundary_values.len() != n {
            return Err(Error::Dimension { expected: n, got: rhs.len().min(boundary_values.len()) });
        }
        let mut g = vec![0.0; n];
        for &d in &self.boundary_dofs {
            g[d] = boundary_values[d];
        }
        let ag = self.unconstrained.mul_vec(&g);
        for (r, a) in rhs.iter_mut().zip(&ag) {
            *r -= a;
        }
        for &d in &self.boundary_dofs {
            rhs[d] = g[d];
        }
        Ok(())
    }

    /// Splits a state vector into finite element functions `(u, xi, p, T)`.
    pub fn split(&self, x: &[f64]) -> Result<[FieldFunction; 4]> {
        let l = &self.layout;
        let mk = |f: Field| FieldFunction::from_coeffs(self.spaces.space(f).clone(), l.slice(x, f).to_vec());
        Ok([mk(Field::Displacement)?, mk(Field::TotalPressure)?, mk(Field::Pressure)?, mk(Field::Temperature)?])
    }
}

fn add_mul(y: &mut [f64], a: &CsrMatrix, x: &[f64], s: f64) {
    for (i, yi) in y.iter_mut().enumerate() {
        let (cols, vals) = a.row(i);
        let mut acc = 0.0;
        for (&j, &v) in cols.iter().zip(vals) {
            acc += v * x[j];
        }
        *yi += s * acc;
    }
}

fn add_mul_transpose(y: &mut [f64], a: &CsrMatrix, x: &[f64], s: f64) {
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            y[j] += s * v * xi;
        }
    }
}
