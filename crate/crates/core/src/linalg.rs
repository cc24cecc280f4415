//! Sparse linear algebra: assembly from triplets, sparse LU with iterative
//! refinement, and Krylov fallbacks for large systems.

use faer::linalg::solvers::SolveCore;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Conj, Mat, Par};

use crate::error::{Error, Result};

/// Which linear solver to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearSolver {
    /// Sparse LU up to 256x256 cells, Krylov beyond.
    #[default]
    Auto,
    Direct,
    Iterative,
}

/// Cell count above which `Auto` switches to an iterative solver.
pub const DIRECT_CELL_LIMIT: usize = 256 * 256;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverOptions {
    /// Relative residual the solve must reach.
    pub tolerance: f64,
    /// Iteration cap for the Krylov solvers; `None` picks ten times the unknown count.
    pub max_iterations: Option<usize>,
    pub method: LinearSolver,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: None,
            method: LinearSolver::Auto,
        }
    }
}

impl SolverOptions {
    pub fn use_direct(&self, n_cells: usize) -> bool {
        match self.method {
            LinearSolver::Direct => true,
            LinearSolver::Iterative => false,
            LinearSolver::Auto => n_cells <= DIRECT_CELL_LIMIT,
        }
    }
}

/// Accumulates matrix entries; duplicates are summed.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    pub n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn add(&mut self, row: usize, col: usize, v: f64) {
        debug_assert!(row < self.n && col < self.n);
        if v != 0.0 {
            self.entries.push((row, col, v));
        }
    }

    /// Adds `v` at `(row, col)` and at `(col, row)`.
    pub fn add_sym(&mut self, row: usize, col: usize, v: f64) {
        self.add(row, col, v);
        self.add(col, row, v);
    }

    pub fn to_csr(&self) -> Csr {
        Csr::from_triplets(self.n, &self.entries)
    }
}

/// Compressed sparse row matrix for products and residuals.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    pub fn from_triplets(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<(usize, usize, f64)> = entries.to_vec();
        sorted.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(sorted.len());
        let mut vals: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.vals[k] * x[self.cols[k]])
                    .sum()
            })
            .collect()
    }

    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (r, xr) in x.iter().enumerate().take(self.n) {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[self.cols[k]] += self.vals[k] * xr;
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (r, dr) in d.iter_mut().enumerate() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] == r {
                    *dr += self.vals[k];
                }
            }
        }
        d
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let mut trip = Vec::with_capacity(self.vals.len());
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                trip.push(Triplet::new(r, self.cols[k], self.vals[k]));
            }
        }
        SparseColMat::try_new_from_triplets(self.n, self.n, &trip)
            .map_err(|e| Error::Input(format!("matrix assembly failed: {e:?}")))
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outcome of a linear solve.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct SolveStats {
    pub residual: f64,
    pub iterations: usize,
}

/// Sparse LU factorization that keeps the matrix for residual checks.
pub struct Factorization {
    csr: Csr,
    lu: Lu<usize, f64>,
}

impl Factorization {
    pub fn new(csr: Csr) -> Result<Self> {
        let a = csr.to_faer()?;
        let lu = a.sp_lu().map_err(|e| {
            log::debug!("sparse LU failed: {e:?}");
            Error::Convergence {
                residual: f64::INFINITY,
                iterations: 0,
            }
        })?;
        Ok(Self { csr, lu })
    }

    pub fn matrix(&self) -> &Csr {
        &self.csr
    }

    fn raw(&self, rhs: &[f64], transpose: bool) -> Vec<f64> {
        let mut m = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        if transpose {
            self.lu
                .solve_transpose_in_place_with_conj(Conj::No, m.as_mut());
        } else {
            self.lu.solve_in_place_with_conj(Conj::No, m.as_mut());
        }
        (0..rhs.len()).map(|i| m[(i, 0)]).collect()
    }

    /// Solves `A x = b` (or `A^T x = b`) with up to two refinement steps and
    /// fails if the relative residual stays above `tol`.
    pub fn solve(&self, rhs: &[f64], tol: f64, transpose: bool) -> Result<(Vec<f64>, SolveStats)> {
        let bnorm = norm2(rhs);
        if bnorm == 0.0 {
            return Ok((vec![0.0; rhs.len()], SolveStats::default()));
        }
        let apply = |x: &[f64]| {
            if transpose {
                self.csr.matvec_transpose(x)
            } else {
                self.csr.matvec(x)
            }
        };
        let mut x = self.raw(rhs, transpose);
        let mut rel = f64::INFINITY;
        let mut steps = 0;
        for step in 0..3 {
            let ax = apply(&x);
            let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            rel = norm2(&r) / bnorm;
            steps = step;
            if !rel.is_finite() || rel <= tol * 1e-3 || step == 2 {
                break;
            }
            let dx = self.raw(&r, transpose);
            for (xi, d) in x.iter_mut().zip(&dx) {
                *xi += d;
            }
        }
        if rel.is_nan() || rel > tol {
            return Err(Error::Convergence {
                residual: rel,
                iterations: steps,
            });
        }
        Ok((
            x,
            SolveStats {
                residual: rel,
                iterations: steps,
            },
        ))
    }
}

/// Factors and solves in one go.
pub fn solve_direct(csr: Csr, rhs: &[f64], tol: f64) -> Result<(Vec<f64>, SolveStats)> {
    Factorization::new(csr)?.solve(rhs, tol, false)
}

/// Jacobi-preconditioned conjugate gradients for symmetric positive
/// (semi)definite systems. With `mean_free` the constant mode is projected
/// out of the residual and the iterate, which solves a singular Neumann
/// system in the mean-zero gauge.
pub fn pcg(
    a: &Csr,
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
    mean_free: bool,
) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.n;
    let project = |v: &mut [f64]| {
        if mean_free {
            let m = v.iter().sum::<f64>() / n as f64;
            v.iter_mut().for_each(|x| *x -= m);
        }
    };
    let mut b = rhs.to_vec();
    project(&mut b);
    let bnorm = norm2(&b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], SolveStats::default()));
    }
    let dinv: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|d| if *d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(r, d)| r * d).collect();
    project(&mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        let ap = a.matvec(&p);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        project(&mut r);
        let rel = norm2(&r) / bnorm;
        if rel <= tol {
            project(&mut x);
            return Ok((
                x,
                SolveStats {
                    residual: rel,
                    iterations: it,
                },
            ));
        }
        z = r.iter().zip(&dinv).map(|(r, d)| r * d).collect();
        project(&mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Convergence {
        residual: norm2(&r) / bnorm,
        iterations: max_iter,
    })
}

/// Preconditioned MINRES for symmetric indefinite systems with a positive
/// diagonal preconditioner `m_inv` (applied as a multiplication).
pub fn minres(
    a: &Csr,
    rhs: &[f64],
    m_inv: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.n;
    let bnorm = norm2(rhs);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], SolveStats::default()));
    }
    let prec = |v: &[f64]| -> Vec<f64> { v.iter().zip(m_inv).map(|(a, b)| a * b).collect() };
    let mut x = vec![0.0; n];
    let mut r1 = rhs.to_vec();
    let mut y = prec(&r1);
    let mut beta1 = dot(&r1, &y);
    if beta1 <= 0.0 {
        return Err(Error::Input(
            "MINRES preconditioner is not positive definite".into(),
        ));
    }
    beta1 = beta1.sqrt();
    let mut r2 = r1.clone();
    let (mut oldb, mut beta) = (0.0, beta1);
    let (mut dbar, mut epsln) = (0.0, 0.0);
    let mut phibar = beta1;
    let (mut cs, mut sn) = (-1.0, 0.0);
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let check_every = 10;
    for it in 1..=max_iter {
        let s = 1.0 / beta;
        let v: Vec<f64> = y.iter().map(|yi| s * yi).collect();
        let mut yv = a.matvec(&v);
        if it >= 2 {
            for i in 0..n {
                yv[i] -= (beta / oldb) * r1[i];
            }
        }
        let alfa = dot(&v, &yv);
        for i in 0..n {
            yv[i] -= (alfa / beta) * r2[i];
        }
        r1 = std::mem::replace(&mut r2, yv);
        y = prec(&r2);
        oldb = beta;
        beta = dot(&r2, &y).max(0.0).sqrt();
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = (gbar * gbar + beta * beta).sqrt().max(f64::MIN_POSITIVE);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;
        let denom = 1.0 / gamma;
        let w1 = std::mem::replace(&mut w2, std::mem::take(&mut w));
        w = (0..n)
            .map(|i| (v[i] - oldeps * w1[i] - delta * w2[i]) * denom)
            .collect();
        for i in 0..n {
            x[i] += phi * w[i];
        }
        if it % check_every == 0 || phibar.abs() <= tol * beta1 * 1e-2 {
            let ax = a.matvec(&x);
            let res: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let rel = norm2(&res) / bnorm;
            if rel <= tol {
                return Ok((
                    x,
                    SolveStats {
                        residual: rel,
                        iterations: it,
                    },
                ));
            }
        }
        if beta == 0.0 {
            break;
        }
    }
    let ax = a.matvec(&x);
    let res: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let rel = norm2(&res) / bnorm;
    if rel <= tol {
        Ok((
            x,
            SolveStats {
                residual: rel,
                iterations: max_iter,
            },
        ))
    } else {
        Err(Error::Convergence {
            residual: rel,
            iterations: max_iter,
        })
    }
}

/// Threads used inside the sparse factorizations; `1` makes them sequential
/// and bit-reproducible.
pub fn set_factorization_threads(threads: usize) {
    faer::set_global_parallelism(if threads <= 1 {
        Par::Seq
    } else {
        Par::rayon(threads)
    });
}
