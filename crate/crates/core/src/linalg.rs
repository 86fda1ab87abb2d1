//! Compressed-row sparse matrices and Jacobi-preconditioned conjugate gradients.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Square matrix from `(row, col, value)` triplets; duplicates are summed in
    /// input order, so the result does not depend on the sort algorithm.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len() / 2);
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len() / 2);
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *values.last_mut().expect("entry exists") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let triplets = rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(move |(j, &v)| (i, j, v))
            })
            .collect();
        Self::from_triplets(n, triplets)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n]; self.n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        out
    }

    /// Largest `|a_ij - a_ji|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    /// Replace every stored value through `f(row, col, value)`.
    pub fn map_entries(&mut self, f: impl Fn(usize, usize, f64) -> f64) {
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                self.values[k] = f(i, self.col_idx[k], self.values[k]);
            }
        }
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        for len in [x.len(), y.len()] {
            if len != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    actual: len,
                });
            }
        }
        y.par_iter_mut().with_min_len(4096).enumerate().for_each(|(i, yi)| {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        });
        Ok(())
    }
}

/// `y = A x`.
pub fn spmv(a: &CsrMatrix, x: &[f64]) -> Result<Vec<f64>> {
    a.spmv(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

impl SparseSystem {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn relative_residual(&self, x: &[f64]) -> Result<f64> {
        let ax = self.matrix.spmv(x)?;
        let r = norm(&ax.iter().zip(&self.rhs).map(|(a, b)| b - a).collect::<Vec<_>>());
        let b = norm(&self.rhs);
        Ok(if b == 0.0 { r } else { r / b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `||b - A x|| / ||b||`, recomputed from the returned solution.
    pub relative_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl CgOptions {
    pub const DEFAULT_REL_TOL: f64 = 1e-10;

    pub fn default_for(dim: usize) -> Self {
        Self {
            rel_tol: Self::DEFAULT_REL_TOL,
            max_iter: default_max_iter(dim),
        }
    }
}

pub fn default_max_iter(dim: usize) -> usize {
    20 * (dim as f64).sqrt().ceil() as usize + 1000
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned CG from a zero initial guess.
pub fn cg_solve(system: &SparseSystem, rel_tol: f64, max_iter: usize) -> Result<(Vec<f64>, SolveReport)> {
    cg_solve_from(system, vec![0.0; system.dim()], rel_tol, max_iter)
}

/// Jacobi-preconditioned CG from the given initial guess.
pub fn cg_solve_from(
    system: &SparseSystem,
    mut x: Vec<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    let a = &system.matrix;
    let b = &system.rhs;
    let n = a.dim();
    if b.len() != n || x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: if b.len() != n { b.len() } else { x.len() },
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveReport {
                iterations: 0,
                relative_residual: 0.0,
                converged: true,
            },
        ));
    }
    let target = rel_tol * b_norm;

    let mut r = a.spmv(&x)?;
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut iterations = 0;

    loop {
        if norm(&r) <= target {
            // guard against drift of the recursive residual
            let true_res = system.relative_residual(&x)?;
            if true_res <= rel_tol {
                return Ok((
                    x,
                    SolveReport {
                        iterations,
                        relative_residual: true_res,
                        converged: true,
                    },
                ));
            }
            r = a.spmv(&x)?;
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri = bi - *ri;
            }
            z = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
            p.clone_from(&z);
            rz = dot(&r, &z);
        }
        if iterations >= max_iter {
            let relative_residual = system.relative_residual(&x)?;
            return Ok((
                x,
                SolveReport {
                    iterations,
                    relative_residual,
                    converged: relative_residual <= rel_tol,
                },
            ));
        }
        a.spmv_into(&p, &mut ap)?;
        let curvature = dot(&p, &ap);
        if curvature <= 0.0 || !curvature.is_finite() {
            return Err(Error::Breakdown {
                iteration: iterations,
                curvature,
            });
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        iterations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, vec![(1, 0, 1.0), (0, 0, 2.0), (1, 0, 3.0), (0, 1, -1.0)]);
        assert_eq!(m.to_dense(), vec![vec![2.0, -1.0], vec![4.0, 0.0]]);
        assert_eq!(m.nnz(), 3);
    }

    #[test]
    fn spmv_identity_and_zero() {
        let v = vec![1.0, -2.0, 3.5];
        assert_eq!(spmv(&CsrMatrix::identity(3), &v).unwrap(), v);
        let zero = CsrMatrix::from_triplets(3, vec![]);
        assert_eq!(spmv(&zero, &v).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let err = spmv(&CsrMatrix::identity(3), &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 3, actual: 2 }));
    }

    #[test]
    fn cg_identity_one_iteration() {
        let sys = SparseSystem {
            matrix: CsrMatrix::identity(4),
            rhs: vec![1.0, 2.0, 3.0, 4.0],
        };
        let (x, rep) = cg_solve(&sys, 1e-10, 10).unwrap();
        assert_eq!(x, sys.rhs);
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
    }

    #[test]
    fn cg_two_by_two() {
        let sys = SparseSystem {
            matrix: CsrMatrix::from_dense(&[vec![4.0, 1.0], vec![1.0, 3.0]]),
            rhs: vec![1.0, 2.0],
        };
        let (x, rep) = cg_solve(&sys, 1e-12, 10).unwrap();
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-14);
        assert!((x[1] - 7.0 / 11.0).abs() < 1e-14);
        assert!(rep.converged && rep.iterations <= 2);
    }

    #[test]
    fn cg_zero_rhs() {
        let sys = SparseSystem {
            matrix: CsrMatrix::identity(3),
            rhs: vec![0.0; 3],
        };
        let (x, rep) = cg_solve(&sys, 1e-10, 10).unwrap();
        assert_eq!(x, vec![0.0; 3]);
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn cg_detects_indefinite_matrix() {
        let sys = SparseSystem {
            matrix: CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, -1.0]]),
            rhs: vec![1.0, 1.0],
        };
        assert!(matches!(cg_solve(&sys, 1e-10, 10), Err(Error::Breakdown { .. })));
    }

    #[test]
    fn cg_reports_nonconvergence() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let sys = SparseSystem {
            matrix: CsrMatrix::from_triplets(n, t),
            rhs: vec![1.0; n],
        };
        let (_, rep) = cg_solve(&sys, 1e-12, 3).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
    }

    #[test]
    fn default_iteration_cap() {
        assert_eq!(default_max_iter(10_000), 3000);
        assert_eq!(CgOptions::default_for(4).rel_tol, 1e-10);
    }
}
