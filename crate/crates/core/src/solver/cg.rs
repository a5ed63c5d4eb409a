//! Matrix-free preconditioned conjugate gradients for the Dirichlet
//! Poisson operator restricted to a set of free nodes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::math;

/// `−Δ_h` on the free nodes, with every other node held fixed.
pub(crate) struct PoissonOperator<'a> {
    pub grid: &'a Grid2D,
    pub free: &'a [bool],
}

impl PoissonOperator<'_> {
    fn diag(&self) -> f64 {
        4.0 / (self.grid.h() * self.grid.h())
    }

    /// `y = A x` where `x` vanishes off the free set.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let nx = self.grid.nx();
        let inv_h2 = 1.0 / (self.grid.h() * self.grid.h());
        for (k, yk) in y.iter_mut().enumerate() {
            *yk = if self.free[k] {
                (4.0 * x[k] - x[k - 1] - x[k + 1] - x[k - nx] - x[k + nx]) * inv_h2
            } else {
                0.0
            };
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct CgOutcome {
    pub iterations: usize,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(math::abs(*x)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Level below which `‖Δ_h u‖∞` cannot be resolved in double precision.
pub(crate) fn roundoff_floor(grid: &Grid2D, u_max: f64) -> f64 {
    32.0 * f64::EPSILON * u_max / (grid.h() * grid.h())
}

/// Solves `A x = b` on the free nodes, starting from `x`, until
/// `‖b − A x‖∞ ≤ tol` (or the round-off floor, if larger). Entries of `x`
/// and `b` off the free set must be zero.
pub(crate) fn solve(op: &PoissonOperator<'_>, b: &[f64], x: &mut [f64], tol: f64) -> Result<CgOutcome> {
    let n = b.len();
    let n_free = op.free.iter().filter(|f| **f).count();
    let max_iter = 20 * n_free + 200;
    let inv_diag = 1.0 / op.diag();

    let mut ax = vec![0.0; n];
    let mut r: Vec<f64> = vec![0.0; n];
    op.apply(x, &mut ax);
    for k in 0..n {
        r[k] = b[k] - ax[k];
    }
    let mut z: Vec<f64> = r.iter().map(|v| v * inv_diag).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];

    let mut it = 0;
    loop {
        let res = max_abs(&r);
        if res <= tol.max(roundoff_floor(op.grid, max_abs(x))) {
            return Ok(CgOutcome { iterations: it });
        }
        if it >= max_iter || !res.is_finite() {
            return Err(Error::LinearSolverBreakdown {
                iterations: it,
                residual: res,
            });
        }
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::LinearSolverBreakdown {
                iterations: it,
                residual: res,
            });
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        it += 1;
        // replace the recursive residual now and then to stop drift
        if it % 64 == 0 {
            op.apply(x, &mut ax);
            for k in 0..n {
                r[k] = b[k] - ax[k];
            }
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag;
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
}
