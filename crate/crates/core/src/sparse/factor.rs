//! Sparse symmetric `P A P^T = L D L^T` factorization.
//!
//! Up-looking algorithm driven by the elimination tree. No pivoting is
//! performed: the factorization exists for SPD and for symmetric
//! quasi-definite matrices under any symmetric permutation, which covers
//! every matrix this crate factorizes.

use super::ordering::{invert, nested_dissection, reverse_cuthill_mckee, Graph};
use super::{CsrMatrix, LinearOperator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    Natural,
    ReverseCuthillMckee,
    NestedDissection,
    /// Reverse Cuthill-McKee for small systems, nested dissection otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    /// Pivots must be strictly positive.
    Cholesky,
    /// Pivots must be nonzero.
    Ldlt,
}

#[derive(Debug, Clone)]
pub struct Factorization {
    n: usize,
    kind: FactorKind,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    /// Column pointers of the strictly lower factor.
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
}

impl Factorization {
    pub fn cholesky(a: &CsrMatrix) -> Result<Self> {
        Self::new(a, FactorKind::Cholesky, Ordering::Auto)
    }

    pub fn ldlt(a: &CsrMatrix) -> Result<Self> {
        Self::new(a, FactorKind::Ldlt, Ordering::Auto)
    }

    pub fn new(a: &CsrMatrix, kind: FactorKind, ordering: Ordering) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension { expected: n, got: a.ncols() });
        }
        let perm = match ordering {
            Ordering::Natural => (0..n).collect(),
            Ordering::ReverseCuthillMckee => reverse_cuthill_mckee(&Graph::from_matrix(a)),
            Ordering::NestedDissection => nested_dissection(&Graph::from_matrix(a)),
            Ordering::Auto if n <= 2000 => reverse_cuthill_mckee(&Graph::from_matrix(a)),
            Ordering::Auto => nested_dissection(&Graph::from_matrix(a)),
        };
        let iperm = invert(&perm);

        // Symbolic: elimination tree and column counts of L.
        let mut parent = vec![usize::MAX; n];
        let mut flag = vec![usize::MAX; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            let (cols, _) = a.row(perm[k]);
            for &j in cols {
                let mut i = iperm[j];
                if i < k {
                    while flag[i] != k {
                        if parent[i] == usize::MAX {
                            parent[i] = k;
                        }
                        lnz[i] += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }
        let total = lp[n];
        let mut li = vec![0usize; total];
        let mut lx = vec![0.0; total];
        let mut d = vec![0.0; n];

        // Numeric.
        let mut y = vec![0.0; n];
        let mut pattern = vec![0usize; n];
        lnz.iter_mut().for_each(|c| *c = 0);
        for k in 0..n {
            let mut top = n;
            flag[k] = k;
            let (cols, vals) = a.row(perm[k]);
            for (&j, &v) in cols.iter().zip(vals) {
                let mut i = iperm[j];
                if i <= k {
                    y[i] += v;
                    let mut len = 0;
                    while flag[i] != k {
                        pattern[len] = i;
                        len += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                    while len > 0 {
                        top -= 1;
                        len -= 1;
                        pattern[top] = pattern[len];
                    }
                }
            }
            let mut dk = y[k];
            y[k] = 0.0;
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = 0.0;
                let (start, end) = (lp[i], lp[i] + lnz[i]);
                for p in start..end {
                    y[li[p]] -= lx[p] * yi;
                }
                let lki = yi / d[i];
                dk -= lki * yi;
                li[end] = k;
                lx[end] = lki;
                lnz[i] += 1;
            }
            match kind {
                FactorKind::Cholesky if dk.is_nan() || dk <= 0.0 => {
                    return Err(Error::NotSpd { column: perm[k], pivot: dk })
                }
                FactorKind::Ldlt if dk == 0.0 || dk.is_nan() => return Err(Error::ZeroPivot(perm[k])),
                _ => {}
            }
            d[k] = dk;
        }
        Ok(Factorization { n, kind, perm, lp, li, lx, d })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    /// Stored entries of the strictly lower factor.
    pub fn nnz_l(&self) -> usize {
        self.lp[self.n]
    }

    /// Pivots of `D` in factor order.
    pub fn pivots(&self) -> &[f64] {
        &self.d
    }

    /// Number of negative pivots (the inertia's negative count).
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }

    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        assert_eq!(x.len(), n);
        let mut w: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for j in 0..n {
            let wj = w[j];
            if wj != 0.0 {
                for p in self.lp[j]..self.lp[j + 1] {
                    w[self.li[p]] -= self.lx[p] * wj;
                }
            }
        }
        for j in 0..n {
            w[j] /= self.d[j];
        }
        for j in (0..n).rev() {
            let mut s = w[j];
            for p in self.lp[j]..self.lp[j + 1] {
                s -= self.lx[p] * w[self.li[p]];
            }
            w[j] = s;
        }
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = w[new];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        self.solve_into(b, &mut x);
        x
    }
}

impl LinearOperator for Factorization {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.solve_into(x, y)
    }
}
