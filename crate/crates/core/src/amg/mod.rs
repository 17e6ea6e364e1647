//! Smoothed-aggregation algebraic multigrid used as a one-V-cycle
//! approximate inverse.

mod layout;
mod smoother;
pub mod study;

pub use layout::NodeLayout;
pub use smoother::SmootherKind;

use smoother::{point_spectral_radius, Smoother};

use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, FactorKind, Factorization, LinearOperator, Ordering, TripletBuilder};

#[derive(Debug, Clone, Copy)]
pub struct AmgOptions {
    /// Symmetric strength threshold `|a_ij| > s sqrt(a_ii a_jj)` (node-block
    /// Frobenius norms for multi-unknown nodes).
    pub strength: f64,
    /// Threshold on the finest level when it differs from the others.
    pub finest_strength: Option<f64>,
    pub smoother: SmootherKind,
    /// Smoothing sweeps before and after the coarse correction.
    pub sweeps: usize,
    /// Levels with at most this many unknowns are solved exactly.
    pub max_coarse: usize,
    pub max_levels: usize,
    /// Damped-Jacobi smoothing of the tentative prolongator.
    pub smooth_prolongator: bool,
}

impl Default for AmgOptions {
    fn default() -> Self {
        AmgOptions {
            strength: 0.08,
            finest_strength: None,
            smoother: SmootherKind::PointGaussSeidel,
            sweeps: 1,
            max_coarse: 64,
            max_levels: 20,
            smooth_prolongator: true,
        }
    }
}

#[derive(Debug, Clone)]
struct Level {
    a: CsrMatrix,
    p: CsrMatrix,
    r: CsrMatrix,
    smoother: Smoother,
}

/// Multigrid hierarchy; [`LinearOperator::apply`] runs one V(1,1)-cycle
/// from a zero initial guess.
#[derive(Debug, Clone)]
pub struct AmgHierarchy {
    levels: Vec<Level>,
    coarse_a: CsrMatrix,
    coarse: Factorization,
    sweeps: usize,
}

impl AmgHierarchy {
    /// `near_nullspace` holds candidate vectors of length `a.nrows()`.
    pub fn new(a: &CsrMatrix, layout: NodeLayout, near_nullspace: &[Vec<f64>], opts: &AmgOptions) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || layout.num_unknowns() != n {
            return Err(Error::Dimension { expected: n, got: layout.num_unknowns() });
        }
        if near_nullspace.is_empty() || near_nullspace.iter().any(|b| b.len() != n) {
            return Err(Error::InvalidParameter("near-nullspace vectors missing or of wrong length".into()));
        }
        let mut levels = Vec::new();
        let mut a = a.clone();
        let mut layout = layout;
        // Candidates stored row-major: b[i * k + c].
        let mut k = near_nullspace.len();
        let mut b: Vec<f64> = (0..n).flat_map(|i| near_nullspace.iter().map(move |v| v[i])).collect();
        loop {
            let n = a.nrows();
            if n <= opts.max_coarse || levels.len() + 1 >= opts.max_levels {
                break;
            }
            let decoupled = decoupled_rows(&a);
            for (i, &d) in decoupled.iter().enumerate() {
                if d {
                    b[i * k..(i + 1) * k].iter_mut().for_each(|v| *v = 0.0);
                }
            }
            let theta = if levels.is_empty() { opts.finest_strength.unwrap_or(opts.strength) } else { opts.strength };
            let graph = strength_graph(&a, &layout, theta);
            let aggs = aggregate(&graph);
            let Some(tent) = tentative(&layout, &aggs, &b, k) else { break };
            if tent.p.ncols() == 0 || tent.p.ncols() >= n {
                break;
            }
            let p = if opts.smooth_prolongator { smooth_prolongator(&a, &tent.p)? } else { tent.p };
            let r = p.transpose();
            let ac = galerkin(&a, &p, &r);
            let smoother = Smoother::new(&a, opts.smoother, &layout)?;
            levels.push(Level { a, p, r, smoother });
            a = ac;
            layout = tent.layout;
            b = tent.b;
            k = tent.k;
        }
        let coarse = match Factorization::new(&a, FactorKind::Cholesky, Ordering::Auto) {
            Ok(f) => f,
            Err(_) => Factorization::new(&a, FactorKind::Ldlt, Ordering::Auto)?,
        };
        Ok(AmgHierarchy { levels, coarse_a: a, coarse, sweeps: opts.sweeps.max(1) })
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.levels.iter().map(|l| l.a.nrows()).collect();
        v.push(self.coarse_a.nrows());
        v
    }

    /// Sum of nonzeros over all levels relative to the finest.
    pub fn operator_complexity(&self) -> f64 {
        let fine = self.levels.first().map_or(self.coarse_a.nnz(), |l| l.a.nnz()) as f64;
        let total: usize = self.levels.iter().map(|l| l.a.nnz()).sum::<usize>() + self.coarse_a.nnz();
        total as f64 / fine
    }

    /// Matrix of level `l` (the last index is the coarsest).
    pub fn matrix(&self, l: usize) -> &CsrMatrix {
        if l < self.levels.len() {
            &self.levels[l].a
        } else {
            &self.coarse_a
        }
    }

    /// Prolongator from level `l + 1` to level `l`.
    pub fn prolongator(&self, l: usize) -> &CsrMatrix {
        &self.levels[l].p
    }

    pub fn smoother(&self) -> Option<SmootherKind> {
        self.levels.first().map(|l| l.smoother.kind())
    }

    pub fn vcycle(&self, b: &[f64], x: &mut [f64]) {
        self.cycle(0, b, x);
    }

    fn cycle(&self, l: usize, b: &[f64], x: &mut [f64]) {
        if l == self.levels.len() {
            self.coarse.solve_into(b, x);
            return;
        }
        let lev = &self.levels[l];
        let n = b.len();
        let mut work = vec![0.0; n];
        x.iter_mut().for_each(|v| *v = 0.0);
        for s in 0..self.sweeps {
            lev.smoother.pre(&lev.a, b, x, &mut work, s == 0);
        }
        lev.a.matvec(x, &mut work);
        for i in 0..n {
            work[i] = b[i] - work[i];
        }
        let bc = lev.r.mul_vec(&work);
        let mut xc = vec![0.0; bc.len()];
        self.cycle(l + 1, &bc, &mut xc);
        lev.p.matvec(&xc, &mut work);
        for i in 0..n {
            x[i] += work[i];
        }
        for _ in 0..self.sweeps {
            lev.smoother.post(&lev.a, b, x, &mut work);
        }
    }
}

impl LinearOperator for AmgHierarchy {
    fn dim(&self) -> usize {
        self.matrix(0).nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.vcycle(x, y)
    }
}

/// Rows whose only stored nonzero is the diagonal (eliminated boundary
/// unknowns).
fn decoupled_rows(a: &CsrMatrix) -> Vec<bool> {
    (0..a.nrows())
        .map(|i| {
            let (cols, vals) = a.row(i);
            cols.iter().zip(vals).all(|(&j, &v)| j == i || v == 0.0)
        })
        .collect()
}

/// Strong node adjacency, without self loops.
struct NodeGraph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

fn strength_graph(a: &CsrMatrix, layout: &NodeLayout, theta: f64) -> NodeGraph {
    let nn = layout.num_nodes();
    let node_of = layout.node_of();
    let mut acc = vec![0.0; nn];
    let mut touched: Vec<usize> = Vec::new();
    let mut diag = vec![0.0; nn];
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(nn);
    for node in 0..nn {
        touched.clear();
        for &i in layout.node(node) {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let nj = node_of[j];
                if acc[nj] == 0.0 && v != 0.0 {
                    touched.push(nj);
                }
                acc[nj] += v * v;
            }
        }
        diag[node] = acc[node].sqrt();
        let mut row = Vec::with_capacity(touched.len());
        for &nj in &touched {
            if nj != node {
                row.push((nj, acc[nj].sqrt()));
            }
            acc[nj] = 0.0;
        }
        acc[node] = 0.0;
        rows.push(row);
    }
    let mut ptr = vec![0];
    let mut adj = Vec::new();
    for (node, row) in rows.iter().enumerate() {
        for &(nj, s) in row {
            let same_field = layout.field(node) == layout.field(nj);
            if same_field && s > theta * (diag[node] * diag[nj]).sqrt() {
                adj.push(nj);
            }
        }
        ptr.push(adj.len());
    }
    NodeGraph { ptr, adj }
}

/// Standard three-pass aggregation. Nodes without strong neighbours stay
/// unaggregated (`None`).
fn aggregate(g: &NodeGraph) -> Vec<Option<usize>> {
    let nn = g.ptr.len() - 1;
    let nbrs = |i: usize| &g.adj[g.ptr[i]..g.ptr[i + 1]];
    let mut agg: Vec<Option<usize>> = vec![None; nn];
    let mut count = 0;
    // Pass 1: seed on nodes whose whole neighbourhood is free.
    for i in 0..nn {
        if agg[i].is_some() || nbrs(i).is_empty() {
            continue;
        }
        if nbrs(i).iter().all(|&j| agg[j].is_none()) {
            agg[i] = Some(count);
            for &j in nbrs(i) {
                agg[j] = Some(count);
            }
            count += 1;
        }
    }
    // Pass 2: attach leftovers to a neighbouring aggregate from pass 1.
    let snapshot = agg.clone();
    for i in 0..nn {
        if agg[i].is_some() || nbrs(i).is_empty() {
            continue;
        }
        if let Some(a) = nbrs(i).iter().find_map(|&j| snapshot[j]) {
            agg[i] = Some(a);
        }
    }
    // Pass 3: whatever remains forms new aggregates with free neighbours.
    for i in 0..nn {
        if agg[i].is_some() || nbrs(i).is_empty() {
            continue;
        }
        agg[i] = Some(count);
        for &j in nbrs(i) {
            if agg[j].is_none() {
                agg[j] = Some(count);
            }
        }
        count += 1;
    }
    agg
}

struct Tentative {
    p: CsrMatrix,
    layout: NodeLayout,
    b: Vec<f64>,
    k: usize,
}

/// Orthonormalizes the candidates on every aggregate; linearly dependent
/// (or vanishing) columns are dropped.
fn tentative(layout: &NodeLayout, aggs: &[Option<usize>], b: &[f64], k: usize) -> Option<Tentative> {
    let n = layout.num_unknowns();
    let num_aggs = aggs.iter().flatten().max().map_or(0, |&m| m + 1);
    if num_aggs == 0 {
        return None;
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); num_aggs];
    let mut agg_field = vec![0usize; num_aggs];
    for (node, a) in aggs.iter().enumerate() {
        if let Some(a) = *a {
            members[a].extend_from_slice(layout.node(node));
            agg_field[a] = layout.field(node).unwrap_or(0);
        }
    }
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::with_capacity(num_aggs);
    let mut fields = Vec::with_capacity(num_aggs);
    let mut coarse_b: Vec<f64> = Vec::new();
    let mut nc = 0;
    for (a, rows) in members.iter().enumerate() {
        let m = rows.len();
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
        for c in 0..k {
            let orig: Vec<f64> = rows.iter().map(|&i| b[i * k + c]).collect();
            let onorm = orig.iter().map(|v| v * v).sum::<f64>().sqrt();
            if onorm == 0.0 {
                continue;
            }
            let mut v = orig;
            for _ in 0..2 {
                for qj in &q {
                    let d: f64 = qj.iter().zip(&v).map(|(x, y)| x * y).sum();
                    v.iter_mut().zip(qj).for_each(|(x, y)| *x -= d * y);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-10 * onorm {
                v.iter_mut().for_each(|x| *x /= norm);
                q.push(v);
            }
        }
        if q.is_empty() {
            continue;
        }
        let mut group = Vec::with_capacity(q.len());
        for qj in &q {
            for (r, &i) in rows.iter().enumerate() {
                if qj[r] != 0.0 {
                    entries.push((i, nc, qj[r]));
                }
            }
            // Coarse candidates are the R factor: R[j][c] = q_j . b_c.
            for c in 0..k {
                coarse_b.push((0..m).map(|r| qj[r] * b[rows[r] * k + c]).sum());
            }
            group.push(nc);
            nc += 1;
        }
        groups.push(group);
        fields.push(agg_field[a]);
    }
    let mut t = TripletBuilder::with_capacity(n, nc, entries.len());
    for (i, j, v) in entries {
        t.push(i, j, v);
    }
    let field = layout.has_fields().then_some(fields);
    let layout = NodeLayout::from_groups(nc, &groups, field).ok()?;
    Some(Tentative { p: t.build(), layout, b: coarse_b, k })
}

/// `P = (I - w D^{-1} A) T` with `w = 4 / (3 rho(D^{-1} A))`.
fn smooth_prolongator(a: &CsrMatrix, t: &CsrMatrix) -> Result<CsrMatrix> {
    let rho = point_spectral_radius(a)?;
    let w = 4.0 / (3.0 * rho);
    let mut dinv_a = a.clone();
    let diag = a.diagonal();
    let indptr = dinv_a.indptr().to_vec();
    let data = dinv_a.data_mut();
    for i in 0..diag.len() {
        for v in &mut data[indptr[i]..indptr[i + 1]] {
            *v /= diag[i];
        }
    }
    let at = dinv_a.matmul(t);
    Ok(t.add(1.0, &at, -w))
}

/// `R A P`, symmetrized.
fn galerkin(a: &CsrMatrix, p: &CsrMatrix, r: &CsrMatrix) -> CsrMatrix {
    let ac = r.matmul(&a.matmul(p));
    let act = ac.transpose();
    ac.add(0.5, &act, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::forms::{mass, stiffness};
    use crate::fem::FunctionSpace;
    use crate::mesh::Mesh;
    use crate::sparse::{lanczos_extreme_eigs, LanczosOptions};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn poisson(level: u32) -> CsrMatrix {
        let mesh = Arc::new(Mesh::unit_square(level).unwrap());
        let s = FunctionSpace::new(mesh, 1, 1).unwrap();
        let ones = vec![1.0; s.mesh().num_cells()];
        let mut k = stiffness(&s, &ones).unwrap();
        k.zero_rows_cols_set_diag(&s.boundary_dofs());
        k.pruned()
    }

    fn hierarchy(a: &CsrMatrix, smoother: SmootherKind) -> AmgHierarchy {
        let opts = AmgOptions { smoother, ..Default::default() };
        AmgHierarchy::new(a, NodeLayout::scalar(a.nrows()), &[vec![1.0; a.nrows()]], &opts).unwrap()
    }

    #[test]
    fn small_problem_is_exact() {
        let a = poisson(2);
        let h = hierarchy(&a, SmootherKind::PointJacobi { omega: 2.0 / 3.0 });
        assert_eq!(h.num_levels(), 1);
        let b: Vec<f64> = (0..a.nrows()).map(|i| (i as f64).cos()).collect();
        let x = h.apply_vec(&b);
        let r = a.mul_vec(&x);
        assert!(r.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-10));
        assert!(h.apply_vec(&vec![0.0; a.nrows()]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn poisson_condition_and_symmetry() {
        let a = poisson(4);
        for smoother in [SmootherKind::PointJacobi { omega: 2.0 / 3.0 }, SmootherKind::PointGaussSeidel] {
            let h = hierarchy(&a, smoother);
            assert!(h.num_levels() >= 2);
            let sizes = h.level_sizes();
            assert!(sizes.windows(2).all(|w| w[1] < w[0]), "{sizes:?}");
            for l in 0..h.num_levels() {
                assert!(h.matrix(l).is_symmetric(1e-12));
            }
            let est = lanczos_extreme_eigs(&a, &h, &LanczosOptions::default()).unwrap();
            assert!(est.lambda_min > 0.0);
            assert!(est.lambda_max / est.lambda_min <= 15.0, "kappa {}", est.condition());
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            for _ in 0..5 {
                let b1: Vec<f64> = (0..a.nrows()).map(|_| rng.gen::<f64>() - 0.5).collect();
                let b2: Vec<f64> = (0..a.nrows()).map(|_| rng.gen::<f64>() - 0.5).collect();
                let l: f64 = h.apply_vec(&b1).iter().zip(&b2).map(|(p, q)| p * q).sum();
                let r: f64 = h.apply_vec(&b2).iter().zip(&b1).map(|(p, q)| p * q).sum();
                assert!((l - r).abs() <= 1e-10 * l.abs().max(1.0));
            }
        }
    }

    #[test]
    fn galerkin_and_tentative_reproduce_constants() {
        let a = poisson(5);
        let opts = AmgOptions { smooth_prolongator: false, ..Default::default() };
        let h = AmgHierarchy::new(&a, NodeLayout::scalar(a.nrows()), &[vec![1.0; a.nrows()]], &opts).unwrap();
        let p = h.prolongator(0);
        // Each row of an unsmoothed prolongator has at most one entry and
        // the columns are orthonormal.
        let ptp = p.transpose().matmul(p);
        for i in 0..ptp.nrows() {
            assert!((ptp.get(i, i) - 1.0).abs() < 1e-12);
        }
        let rap = p.transpose().matmul(&h.matrix(0).matmul(p));
        let diff = rap.add(1.0, h.matrix(1), -1.0).max_abs();
        assert!(diff <= 1e-12 * rap.max_abs());
    }

    #[test]
    fn energy_contraction() {
        let a = poisson(5);
        let h = hierarchy(&a, SmootherKind::PointGaussSeidel);
        // Power iteration on the error propagator E = I - V A.
        let n = a.nrows();
        let mut e: Vec<f64> = (0..n).map(|i| ((i * 31 % 7) as f64) - 3.0).collect();
        let mut rate = 0.0;
        for _ in 0..15 {
            let en0 = a.quad_form(&e).sqrt();
            let ae = a.mul_vec(&e);
            let vae = h.apply_vec(&ae);
            for i in 0..n {
                e[i] -= vae[i];
            }
            let en1 = a.quad_form(&e).sqrt();
            rate = en1 / en0;
            e.iter_mut().for_each(|v| *v /= en1);
        }
        assert!(rate < 1.0, "rate {rate}");
    }

    #[test]
    fn mass_plus_stiffness_block_smoother() {
        let mesh = Arc::new(Mesh::unit_square(4).unwrap());
        let s = FunctionSpace::new(mesh, 1, 2).unwrap();
        let sc = FunctionSpace::new(s.mesh().clone(), 1, 1).unwrap();
        let ones = vec![1.0; sc.mesh().num_cells()];
        let m = mass(&sc, &sc, &ones).unwrap();
        let k = stiffness(&sc, &ones).unwrap();
        let a1 = m.add(1.0, &k, 1.0);
        // Two interleaved copies, weakly coupled.
        let n = sc.dim();
        let mut t = TripletBuilder::new(2 * n, 2 * n);
        for i in 0..n {
            let (cols, vals) = a1.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                t.push(2 * i, 2 * j, v);
                t.push(2 * i + 1, 2 * j + 1, 2.0 * v);
                t.push(2 * i, 2 * j + 1, 0.5 * m.get(i, j));
                t.push(2 * i + 1, 2 * j, 0.5 * m.get(i, j));
            }
        }
        let a = t.build();
        let c0: Vec<f64> = (0..2 * n).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let c1: Vec<f64> = (0..2 * n).map(|i| if i % 2 == 1 { 1.0 } else { 0.0 }).collect();
        let opts = AmgOptions { smoother: SmootherKind::BlockJacobi { omega: 2.0 / 3.0 }, ..Default::default() };
        let h = AmgHierarchy::new(&a, NodeLayout::interleaved(n, 2), &[c0, c1], &opts).unwrap();
        assert!(h.num_levels() >= 2);
        let est = lanczos_extreme_eigs(&a, &h, &LanczosOptions::default()).unwrap();
        assert!(est.lambda_min > 0.0 && est.condition() < 10.0, "{}", est.condition());
    }
}
