//! Element loops for the bilinear and linear forms of the model.
//!
//! Coefficients are passed per cell. Every matrix routine emits each element
//! matrix in full, so symmetric forms yield exactly symmetric matrices.

use crate::error::{Error, Result};
use crate::fem::{quadrature, FunctionSpace, QuadratureRule, Tabulation};
use crate::mesh::CellGeometry;
use crate::sparse::{CsrMatrix, TripletBuilder};

/// Quadrature degree for all bilinear forms (exact for P2 x P2 products).
pub const MATRIX_QUADRATURE: u32 = 4;

/// Shape values and physical gradients of one space on one cell.
struct CellBasis {
    tab: Tabulation,
    grads: Vec<[f64; 2]>,
}

impl CellBasis {
    fn new(space: &FunctionSpace, rule: &QuadratureRule) -> Self {
        let tab = Tabulation::new(space.degree(), &rule.points);
        let grads = vec![[0.0; 2]; tab.ref_grads.len()];
        CellBasis { tab, grads }
    }

    fn update(&mut self, geo: &CellGeometry) {
        for (g, r) in self.grads.iter_mut().zip(&self.tab.ref_grads) {
            *g = geo.push_gradient(*r);
        }
    }

    #[inline]
    fn grads(&self, q: usize) -> &[[f64; 2]] {
        let n = self.tab.nodes;
        &self.grads[q * n..(q + 1) * n]
    }
}

fn check_scalar(space: &FunctionSpace) -> Result<()> {
    if space.components() != 1 {
        return Err(Error::Mismatch("expected a scalar space".into()));
    }
    Ok(())
}

fn check_pair(a: &FunctionSpace, b: &FunctionSpace) -> Result<()> {
    if !a.same_mesh(b) {
        return Err(Error::Mismatch("spaces live on different meshes".into()));
    }
    Ok(())
}

fn check_coeff(space: &FunctionSpace, coeff: &[f64]) -> Result<()> {
    let nc = space.mesh().num_cells();
    if coeff.len() != nc {
        return Err(Error::Dimension { expected: nc, got: coeff.len() });
    }
    Ok(())
}

/// `M[i][j] = (c psi_j, phi_i)` with `phi` from `test`, `psi` from `trial`.
pub fn mass(test: &FunctionSpace, trial: &FunctionSpace, coeff: &[f64]) -> Result<CsrMatrix> {
    check_scalar(test)?;
    check_scalar(trial)?;
    check_pair(test, trial)?;
    check_coeff(test, coeff)?;
    let rule = quadrature(MATRIX_QUADRATURE)?;
    let ta = Tabulation::new(test.degree(), &rule.points);
    let tb = Tabulation::new(trial.degree(), &rule.points);
    let (na, nb) = (ta.nodes, tb.nodes);
    let nc = test.mesh().num_cells();
    let mut t = TripletBuilder::with_capacity(test.dim(), trial.dim(), nc * na * nb);
    let mut local = vec![0.0; na * nb];
    for cell in 0..nc {
        let c = coeff[cell];
        let geo = test.geometry(cell);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (q, &w) in rule.weights.iter().enumerate() {
            let s = c * w * geo.det;
            let (va, vb) = (ta.values_at(q), tb.values_at(q));
            for i in 0..na {
                for j in 0..nb {
                    local[i * nb + j] += s * (va[i] * vb[j]);
                }
            }
        }
        let (ra, rb) = (test.cell_nodes(cell), trial.cell_nodes(cell));
        for i in 0..na {
            for j in 0..nb {
                t.push(ra[i], rb[j], local[i * nb + j]);
            }
        }
    }
    Ok(t.build())
}

/// `K[i][j] = (c grad phi_j, grad phi_i)` on a scalar space.
pub fn stiffness(space: &FunctionSpace, coeff: &[f64]) -> Result<CsrMatrix> {
    check_scalar(space)?;
    check_coeff(space, coeff)?;
    let rule = quadrature(MATRIX_QUADRATURE)?;
    let mut basis = CellBasis::new(space, &rule);
    let n = basis.tab.nodes;
    let nc = space.mesh().num_cells();
    let mut t = TripletBuilder::with_capacity(space.dim(), space.dim(), nc * n * n);
    let mut local = vec![0.0; n * n];
    for cell in 0..nc {
        let geo = space.geometry(cell);
        basis.update(&geo);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (q, &w) in rule.weights.iter().enumerate() {
            let s = coeff[cell] * w * geo.det;
            let g = basis.grads(q);
            for i in 0..n {
                for j in 0..n {
                    local[i * n + j] += s * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
            }
        }
        let r = space.cell_nodes(cell);
        for i in 0..n {
            for j in 0..n {
                t.push(r[i], r[j], local[i * n + j]);
            }
        }
    }
    Ok(t.build())
}

/// `A[i][j] = (c eps(v_j), eps(v_i))` on a two-component space, `eps` the
/// symmetric gradient. Pass `c = 2 mu` for the elastic energy.
pub fn elasticity(space: &FunctionSpace, coeff: &[f64]) -> Result<CsrMatrix> {
    if space.components() != 2 {
        return Err(Error::Mismatch("elasticity needs a vector space".into()));
    }
    check_coeff(space, coeff)?;
    let rule = quadrature(MATRIX_QUADRATURE)?;
    let mut basis = CellBasis::new(space, &rule);
    let n = basis.tab.nodes;
    let m = 2 * n;
    let nc = space.mesh().num_cells();
    let mut t = TripletBuilder::with_capacity(space.dim(), space.dim(), nc * m * m);
    let mut local = vec![0.0; m * m];
    // eps of the basis function `node a, component c`: symmetric 2x2 stored
    // as (e00, e11, e01).
    let eps = |g: [f64; 2], c: usize| -> [f64; 3] {
        if c == 0 {
            [g[0], 0.0, 0.5 * g[1]]
        } else {
            [0.0, g[1], 0.5 * g[0]]
        }
    };
    for cell in 0..nc {
        let geo = space.geometry(cell);
        basis.update(&geo);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (q, &w) in rule.weights.iter().enumerate() {
            let s = coeff[cell] * w * geo.det;
            let g = basis.grads(q);
            for a in 0..m {
                let ea = eps(g[a / 2], a % 2);
                for b in 0..m {
                    let eb = eps(g[b / 2], b % 2);
                    local[a * m + b] += s * (ea[0] * eb[0] + ea[1] * eb[1] + 2.0 * ea[2] * eb[2]);
                }
            }
        }
        let r = space.cell_nodes(cell);
        for a in 0..m {
            for b in 0..m {
                t.push(2 * r[a / 2] + a % 2, 2 * r[b / 2] + b % 2, local[a * m + b]);
            }
        }
    }
    Ok(t.build())
}

/// `D[i][j] = (div v_j, phi_i)`, `v` from a vector space, `phi` scalar.
pub fn divergence(scalar: &FunctionSpace, vector: &FunctionSpace) -> Result<CsrMatrix> {
    check_scalar(scalar)?;
    check_pair(scalar, vector)?;
    if vector.components() != 2 {
        return Err(Error::Mismatch("divergence needs a vector space".into()));
    }
    let rule = quadrature(MATRIX_QUADRATURE)?;
    let ts = Tabulation::new(scalar.degree(), &rule.points);
    let mut bv = CellBasis::new(vector, &rule);
    let (ns, nv) = (ts.nodes, bv.tab.nodes);
    let m = 2 * nv;
    let nc = scalar.mesh().num_cells();
    let mut t = TripletBuilder::with_capacity(scalar.dim(), vector.dim(), nc * ns * m);
    let mut local = vec![0.0; ns * m];
    for cell in 0..nc {
        let geo = scalar.geometry(cell);
        bv.update(&geo);
        local.iter_mut().for_each(|v| *v = 0.0);
        for (q, &w) in rule.weights.iter().enumerate() {
            let s = w * geo.det;
            let (phi, g) = (ts.values_at(q), bv.grads(q));
            for i in 0..ns {
                for b in 0..m {
                    local[i * m + b] += s * phi[i] * g[b / 2][b % 2];
                }
            }
        }
        let (rs, rv) = (scalar.cell_nodes(cell), vector.cell_nodes(cell));
        for i in 0..ns {
            for b in 0..m {
                t.push(rs[i], 2 * rv[b / 2] + b % 2, local[i * m + b]);
            }
        }
    }
    Ok(t.build())
}

/// `b[i] = (f, phi_i)` where `f(cell, x, out)` writes all components of the
/// integrand at physical point `x`.
pub fn load<F>(space: &FunctionSpace, degree: u32, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize, [f64; 2], &mut [f64]),
{
    let rule = quadrature(degree)?;
    let tab = Tabulation::new(space.degree(), &rule.points);
    let nc = space.components();
    let mut b = vec![0.0; space.dim()];
    let mut val = vec![0.0; nc];
    for cell in 0..space.mesh().num_cells() {
        let geo = space.geometry(cell);
        let nodes = space.cell_nodes(cell);
        for (q, (&p, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            f(cell, geo.map(p), &mut val);
            let s = w * geo.det;
            for (&node, &phi) in nodes.iter().zip(tab.values_at(q)) {
                for c in 0..nc {
                    b[node * nc + c] += s * phi * val[c];
                }
            }
        }
    }
    Ok(b)
}

/// `z[i] = (1, phi_i)` for a scalar space.
pub fn basis_integrals(space: &FunctionSpace) -> Result<Vec<f64>> {
    check_scalar(space)?;
    load(space, space.degree(), |_, _, out| out[0] = 1.0)
}

/// Per-cell coefficient array from a function of the cell centroid.
pub fn cellwise(space: &FunctionSpace, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
    space.mesh().geometries().map(|(_, g)| f(g.centroid())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{interpolate_scalar, interpolate_vector};
    use crate::mesh::Mesh;
    use std::sync::Arc;

    fn spaces(level: u32) -> (Arc<FunctionSpace>, Arc<FunctionSpace>, Arc<FunctionSpace>) {
        let m = Arc::new(Mesh::unit_square(level).unwrap());
        (
            Arc::new(FunctionSpace::new(m.clone(), 1, 1).unwrap()),
            Arc::new(FunctionSpace::new(m.clone(), 2, 1).unwrap()),
            Arc::new(FunctionSpace::new(m, 2, 2).unwrap()),
        )
    }

    #[test]
    fn p1_element_mass() {
        let (p1, _, _) = spaces(0);
        let ones = vec![1.0; 2];
        let m = mass(&p1, &p1, &ones).unwrap();
        // Two cells of area 1/2: each vertex-pair shared by the cells that contain both.
        let geo = p1.geometry(0);
        let a = geo.area;
        let cell = p1.cell_nodes(0);
        let mut expected = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                expected[i][j] = a / 12.0 * if i == j { 2.0 } else { 1.0 };
            }
        }
        let m0 = mass(&p1, &p1, &[1.0, 0.0]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((m0.get(cell[i], cell[j]) - expected[i][j]).abs() < 1e-15);
            }
        }
        let total: f64 = m.data().iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mass_integrates_products() {
        let (_, p2, _) = spaces(2);
        let ones = vec![1.0; p2.mesh().num_cells()];
        let m = mass(&p2, &p2, &ones).unwrap();
        let f = interpolate_scalar(&p2, |x| x[0] * x[1]);
        let g = interpolate_scalar(&p2, |x| 1.0 + x[0]);
        // int_0^1 int_0^1 x y (1 + x) = 5/12
        let v: f64 = m.mul_vec(&g.coeffs).iter().zip(&f.coeffs).map(|(a, b)| a * b).sum();
        assert!((v - 5.0 / 12.0).abs() < 1e-13);
        assert_eq!(m.asymmetry(), 0.0);
    }

    #[test]
    fn stiffness_energy() {
        let (p1, p2, _) = spaces(2);
        let ones = vec![1.0; p2.mesh().num_cells()];
        let k = stiffness(&p2, &ones).unwrap();
        let f = interpolate_scalar(&p2, |x| x[0] * x[0] + x[1]);
        // |grad|^2 = 4x^2 + 1 -> 4/3 + 1
        assert!((k.quad_form(&f.coeffs) - 7.0 / 3.0).abs() < 1e-12);
        let k1 = stiffness(&p1, &ones).unwrap();
        let c = vec![1.0; p1.dim()];
        assert!(k1.mul_vec(&c).iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn elasticity_rigid_modes() {
        let (_, _, v) = spaces(2);
        let ones = vec![1.0; v.mesh().num_cells()];
        let a = elasticity(&v, &ones).unwrap();
        assert_eq!(a.asymmetry(), 0.0);
        for f in [
            interpolate_vector(&v, |_| [1.0, 0.0]),
            interpolate_vector(&v, |_| [0.0, 1.0]),
            interpolate_vector(&v, |x| [-x[1], x[0]]),
        ] {
            assert!(a.mul_vec(&f.coeffs).iter().all(|r| r.abs() < 1e-12));
        }
        // u = (x^2, 0): eps = diag(2x, 0), (eps, eps) = 4/3
        let u = interpolate_vector(&v, |x| [x[0] * x[0], 0.0]);
        assert!((a.quad_form(&u.coeffs) - 4.0 / 3.0).abs() < 1e-12);
        // u = (y, 0): eps01 = 1/2, (eps, eps) = 2 * 1/4
        let u = interpolate_vector(&v, |x| [x[1], 0.0]);
        assert!((a.quad_form(&u.coeffs) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn divergence_of_bubble_against_constant() {
        let (p1, _, v) = spaces(3);
        let d = divergence(&p1, &v).unwrap();
        let u = interpolate_vector(&v, |x| {
            let b = x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]);
            [b * (1.0 + x[1]), b * x[0]]
        });
        let du = d.mul_vec(&u.coeffs);
        assert!(du.iter().sum::<f64>().abs() < 1e-13);
        // div (x, y) = 2 integrated against 1.
        let w = interpolate_vector(&v, |x| [x[0], x[1]]);
        assert!((d.mul_vec(&w.coeffs).iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn load_partition_of_unity() {
        let (p1, p2, v) = spaces(0);
        let b = load(&v, 4, |_, _, out| {
            out[0] = 1.0;
            out[1] = 0.0;
        })
        .unwrap();
        let sx: f64 = b.iter().step_by(2).sum();
        let sy: f64 = b.iter().skip(1).step_by(2).sum();
        assert!((sx - 1.0).abs() < 1e-15 && sy == 0.0);
        for s in [&p1, &p2] {
            let z = basis_integrals(s).unwrap();
            assert!((z.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
        // P2 vertex functions integrate to zero on a triangle.
        let z = basis_integrals(&p2).unwrap();
        assert!(z[..p2.mesh().num_vertices()].iter().all(|v| v.abs() < 1e-15));
    }
}
