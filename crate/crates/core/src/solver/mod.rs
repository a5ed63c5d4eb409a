//! Discrete solution of `Δu = (λ₊/2)χ{u>0} − (λ₋/2)χ{u<0}` with Dirichlet
//! data.
//!
//! The discrete problem is the minimization of the convex energy
//!
//! ```text
//! J_h(u) = ½·Σ_edges (u_a − u_b)² + h²·Σ_interior ((λ₊/2)·u⁺ + (λ₋/2)·u⁻)
//! ```
//!
//! whose optimality system is `Δ_h u ∈ ∂φ(u)` node by node: `λ₊/2` where
//! `u > 0`, `−λ₋/2` where `u < 0`, anything in `[−λ₋/2, λ₊/2]` where
//! `u = 0`. It is solved by an active-set iteration over sign patterns:
//! every interior node is marked positive, negative or zero from the
//! pointwise energy minimizer given its neighbours, the resulting linear
//! Poisson problem is solved by conjugate gradients, and the pattern is
//! updated until the optimality system holds. Steps that would raise the
//! energy are damped by an exact line search, and a repeated pattern
//! triggers a pointwise minimization sweep.
//!
//! The first iterate is the harmonic extension of the data on the coarsest
//! grid of a halving hierarchy and the prolonged coarse solution on every
//! finer one, so the fine-grid pattern only has to move near the free
//! boundary.

mod cg;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Grid2D, ScalarField};
use crate::math;
use crate::profiles::SourceStrengths;

use cg::PoissonOperator;

/// Everything that defines one discrete solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub lambdas: SourceStrengths,
    pub boundary: BoundaryData,
    /// Residual target for the discrete equation (and the CG solve). Below
    /// about `32·ε·‖u‖∞/h²` it is replaced by that round-off level.
    pub tol_linear: f64,
    /// Maximum number of pattern sweeps.
    pub max_sweeps: usize,
    /// Nodes with `|u| ≤ tol_zero` count as free boundary band.
    pub tol_zero: f64,
}

impl ProblemSpec {
    pub fn new(lambdas: SourceStrengths, boundary: BoundaryData) -> Self {
        ProblemSpec {
            tol_zero: 1e-10 * lambdas.sum(),
            lambdas,
            boundary,
            tol_linear: 1e-10,
            max_sweeps: 200,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        self.boundary.grid()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_linear.is_finite() && self.tol_linear > 0.0) {
            return Err(Error::InvalidProblem("tol_linear must be positive"));
        }
        if !(self.tol_zero.is_finite() && self.tol_zero >= 0.0) {
            return Err(Error::InvalidProblem("tol_zero must be non-negative"));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidProblem("max_sweeps must be at least 1"));
        }
        // re-check in case the struct was built by hand
        SourceStrengths::new(self.lambdas.plus(), self.lambdas.minus())?;
        Ok(())
    }

    fn forcing(&self, phase: NodePhase) -> f64 {
        match phase {
            NodePhase::Positive => 0.5 * self.lambdas.plus(),
            NodePhase::Negative => -0.5 * self.lambdas.minus(),
            NodePhase::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveReport {
    /// Pattern sweeps performed (linear solves after the initial one).
    pub iterations: usize,
    pub final_energy: f64,
    /// Max-norm of [`residual_field`] at the returned field.
    pub final_residual: f64,
    /// Number of nodes whose phase changed after each sweep.
    pub pattern_changes: Vec<usize>,
    /// Energy of the initial iterate followed by every accepted sweep.
    pub energies: Vec<f64>,
    /// Sweeps that needed damping or a pointwise minimization fallback.
    pub damped_sweeps: usize,
    pub cg_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
enum NodePhase {
    Zero,
    Positive,
    Negative,
}

struct Solver<'a> {
    spec: &'a ProblemSpec,
    grid: Grid2D,
    cg_iterations: usize,
}

impl<'a> Solver<'a> {
    fn new(spec: &'a ProblemSpec) -> Self {
        Solver {
            spec,
            grid: *spec.grid(),
            cg_iterations: 0,
        }
    }

    fn initial_values(&self) -> Vec<f64> {
        let mut u = vec![0.0; self.grid.len()];
        for (i, j, v) in self.spec.boundary.iter() {
            u[self.grid.index(i, j)] = v;
        }
        u
    }

    fn interior(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let g = self.grid;
        (1..g.ny() - 1).flat_map(move |j| (1..g.nx() - 1).map(move |i| (i, j, g.index(i, j))))
    }

    #[inline]
    fn neighbour_sum(&self, u: &[f64], k: usize) -> f64 {
        let nx = self.grid.nx();
        u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx]
    }

    /// Solves the linear problem for a fixed pattern. `None` as pattern
    /// means every interior node is free with zero forcing.
    fn solve_linear(&mut self, pattern: Option<&[NodePhase]>, warm: &[f64]) -> Result<Vec<f64>> {
        let g = self.grid;
        let n = g.len();
        let h2 = g.h() * g.h();
        let mut free = vec![false; n];
        let mut forcing = vec![0.0; n];
        let mut fixed = self.initial_values();
        for (_, _, k) in self.interior() {
            let phase = pattern.map_or(NodePhase::Positive, |p| p[k]);
            if phase == NodePhase::Zero {
                fixed[k] = 0.0;
            } else {
                free[k] = true;
                forcing[k] = if pattern.is_some() { self.spec.forcing(phase) } else { 0.0 };
            }
        }
        let mut b = vec![0.0; n];
        let mut x = vec![0.0; n];
        for (_, _, k) in self.interior() {
            if !free[k] {
                continue;
            }
            let nx = g.nx();
            let mut pinned = 0.0;
            for nb in [k - 1, k + 1, k - nx, k + nx] {
                if !free[nb] {
                    pinned += fixed[nb];
                }
            }
            b[k] = -forcing[k] + pinned / h2;
            x[k] = warm[k];
        }
        let op = PoissonOperator { grid: &g, free: &free };
        let out = cg::solve(&op, &b, &mut x, 0.5 * self.spec.tol_linear)?;
        self.cg_iterations += out.iterations;
        for k in 0..n {
            if free[k] {
                fixed[k] = x[k];
            }
        }
        Ok(fixed)
    }

    fn energy(&self, u: &[f64]) -> f64 {
        energy_of(&self.grid, self.spec.lambdas, u)
    }

    /// Phase of the pointwise energy minimizer with neighbours frozen.
    fn prox_phase(&self, u: &[f64], k: usize) -> NodePhase {
        let h2 = self.grid.h() * self.grid.h();
        let w = 0.25 * self.neighbour_sum(u, k);
        if w > 0.125 * h2 * self.spec.lambdas.plus() {
            NodePhase::Positive
        } else if w < -0.125 * h2 * self.spec.lambdas.minus() {
            NodePhase::Negative
        } else {
            NodePhase::Zero
        }
    }

    fn pattern_of(&self, u: &[f64]) -> Vec<NodePhase> {
        let mut p = vec![NodePhase::Zero; self.grid.len()];
        for (_, _, k) in self.interior() {
            p[k] = self.prox_phase(u, k);
        }
        p
    }

    /// One lexicographic sweep of exact pointwise minimization.
    fn pointwise_sweep(&self, u: &mut [f64]) {
        let h2 = self.grid.h() * self.grid.h();
        let (lp, lm) = (self.spec.lambdas.plus(), self.spec.lambdas.minus());
        let ks: Vec<usize> = self.interior().map(|(_, _, k)| k).collect();
        for k in ks {
            let w = 0.25 * self.neighbour_sum(u, k);
            u[k] = if w > 0.125 * h2 * lp {
                w - 0.125 * h2 * lp
            } else if w < -0.125 * h2 * lm {
                w + 0.125 * h2 * lm
            } else {
                0.0
            };
        }
    }

    /// `tol_linear`, raised to the round-off floor of `Δ_h` on fine grids.
    fn target(&self, u: &[f64]) -> f64 {
        let u_max = u.iter().fold(0.0_f64, |m, v| m.max(math::abs(*v)));
        // CG stops at the floor itself, so allow it twice here
        self.spec.tol_linear.max(2.0 * cg::roundoff_floor(&self.grid, u_max))
    }

    /// Max violation of the optimality system: the equation off the band,
    /// the multiplier interval on it.
    fn kkt_violation(&self, u: &[f64]) -> f64 {
        let field = ScalarField::new(self.grid, u.to_vec()).expect("finite iterate");
        let (lp, lm) = (0.5 * self.spec.lambdas.plus(), 0.5 * self.spec.lambdas.minus());
        let mut worst = 0.0_f64;
        for (i, j, k) in self.interior() {
            let lap = field.laplacian_unchecked(i, j);
            let v = u[k];
            let e = if v > self.spec.tol_zero {
                math::abs(lap - lp)
            } else if v < -self.spec.tol_zero {
                math::abs(lap + lm)
            } else {
                (lap - lp).max(-lm - lap).max(0.0)
            };
            worst = worst.max(e);
        }
        worst
    }
}

/// Minimizes a convex function on `[0, 1]` by golden sections.
fn line_minimum(mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (0.0_f64, 1.0_f64);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-3 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Smallest grid on which a coarse solve is still worth it.
const COARSEST_NODES: usize = 33;

/// Starting iterate: on the coarsest grid the harmonic extension of the
/// boundary data; on finer grids with even cell counts, the bilinear
/// prolongation of the solution on the grid with twice the spacing.
fn initial_guess(spec: &ProblemSpec, s: &mut Solver<'_>) -> Result<Vec<f64>> {
    let g = s.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let coarsenable = (nx - 1) % 2 == 0 && (ny - 1) % 2 == 0 && nx.min(ny) > COARSEST_NODES;
    if coarsenable {
        let cg = Grid2D::new(g.x_min(), g.x_max(), g.y_min(), g.y_max(), (nx + 1) / 2, (ny + 1) / 2)?;
        let values = cg
            .boundary_nodes()
            .map(|(i, j)| spec.boundary.get(2 * i, 2 * j).expect("boundary node"))
            .collect();
        let boundary = BoundaryData::new(cg, values)?;
        let coarse = ProblemSpec {
            boundary,
            ..spec.clone()
        };
        if let Ok((uc, rep)) = solve(&coarse) {
            s.cg_iterations += rep.cg_iterations;
            let mut u = Vec::with_capacity(g.len());
            for k in 0..g.len() {
                u.push(uc.interpolate(g.node_at(k))?);
            }
            for (i, j, v) in spec.boundary.iter() {
                u[g.index(i, j)] = v;
            }
            return Ok(u);
        }
    }
    let zeros = vec![0.0; g.len()];
    s.solve_linear(None, &zeros)
}

fn pattern_hash(p: &[NodePhase]) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &x in p {
        h ^= x as u8 as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn energy_of(grid: &Grid2D, lambdas: SourceStrengths, u: &[f64]) -> f64 {
    let (nx, ny) = (grid.nx(), grid.ny());
    let h2 = grid.h() * grid.h();
    let mut dirichlet = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            let k = grid.index(i, j);
            if i + 1 < nx {
                let d = u[k + 1] - u[k];
                dirichlet += d * d;
            }
            if j + 1 < ny {
                let d = u[k + nx] - u[k];
                dirichlet += d * d;
            }
        }
    }
    let mut potential = 0.0;
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let v = u[grid.index(i, j)];
            potential += 0.5 * lambdas.plus() * v.max(0.0) + 0.5 * lambdas.minus() * (-v).max(0.0);
        }
    }
    0.5 * dirichlet + h2 * potential
}

/// Discrete energy `J_h(u)`.
pub fn energy(spec: &ProblemSpec, u: &ScalarField) -> Result<f64> {
    if !u.grid().same_nodes(spec.grid()) {
        return Err(Error::GridMismatch);
    }
    Ok(energy_of(spec.grid(), spec.lambdas, u.values()))
}

/// Solves the discrete problem.
pub fn solve(spec: &ProblemSpec) -> Result<(ScalarField, SolveReport)> {
    spec.validate()?;
    let mut s = Solver::new(spec);
    let mut report = SolveReport::default();

    let mut u = initial_guess(spec, &mut s)?;
    let mut energy = s.energy(&u);
    report.energies.push(energy);
    let mut pattern = s.pattern_of(&u);
    let mut seen: Vec<u64> = vec![pattern_hash(&pattern)];

    for sweep in 1..=spec.max_sweeps {
        let trial = s.solve_linear(Some(&pattern), &u)?;
        let slack = 1e-10 * (1.0 + math::abs(energy));
        let e_trial = s.energy(&trial);
        if e_trial <= energy + slack {
            u = trial;
        } else {
            report.damped_sweeps += 1;
            // the energy is convex along the segment towards the trial
            let along = |t: f64| -> Vec<f64> { u.iter().zip(&trial).map(|(a, b)| a + t * (b - a)).collect() };
            let (t, e_t) = line_minimum(|t| s.energy(&along(t)));
            if t > 0.0 && e_t < energy {
                u = along(t);
            } else {
                s.pointwise_sweep(&mut u);
            }
        }
        energy = s.energy(&u);
        report.energies.push(energy);
        report.iterations = sweep;

        let violation = s.kkt_violation(&u);
        if violation <= s.target(&u) {
            let field = ScalarField::new(s.grid, u)?;
            let res = residual_field(spec, &field)?;
            report.final_energy = energy;
            report.final_residual = res.max_abs();
            report.cg_iterations = s.cg_iterations;
            return Ok((field, report));
        }

        let mut next = s.pattern_of(&u);
        let mut changes = next.iter().zip(&pattern).filter(|(a, b)| a != b).count();
        let hash = pattern_hash(&next);
        if changes > 0 && seen.contains(&hash) {
            // cycling: fall back to the pointwise minimizer
            report.damped_sweeps += 1;
            s.pointwise_sweep(&mut u);
            energy = s.energy(&u);
            next = s.pattern_of(&u);
            changes = next.iter().zip(&pattern).filter(|(a, b)| a != b).count();
        }
        report.pattern_changes.push(changes);
        seen.push(pattern_hash(&next));
        pattern = next;
    }

    Err(Error::NotConverged {
        sweeps: spec.max_sweeps,
        residual: s.kkt_violation(&u),
        last_pattern_changes: report.pattern_changes.last().copied().unwrap_or(0),
    })
}

/// `Δ_h u − (λ₊/2)χ{u > tol_zero} + (λ₋/2)χ{u < −tol_zero}` at interior
/// nodes; zero on the band `|u| ≤ tol_zero` and on the boundary.
pub fn residual_field(spec: &ProblemSpec, u: &ScalarField) -> Result<ScalarField> {
    let g = *spec.grid();
    if !u.grid().same_nodes(&g) {
        return Err(Error::GridMismatch);
    }
    let mut out = vec![0.0; g.len()];
    for j in 1..g.ny() - 1 {
        for i in 1..g.nx() - 1 {
            let v = u.get(i, j);
            let f = if v > spec.tol_zero {
                0.5 * spec.lambdas.plus()
            } else if v < -spec.tol_zero {
                -0.5 * spec.lambdas.minus()
            } else {
                continue;
            };
            out[g.index(i, j)] = u.laplacian_unchecked(i, j) - f;
        }
    }
    ScalarField::new(g, out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonOutcome {
    pub sup_interior_diff: f64,
    pub sup_boundary_diff: f64,
    /// `sup_interior_diff ≤ sup_boundary_diff + 10·tol_linear`.
    pub holds: bool,
}

/// Checks the discrete comparison principle between two solutions.
pub fn comparison_check(
    u1: &ScalarField,
    u2: &ScalarField,
    d1: &BoundaryData,
    d2: &BoundaryData,
    tol_linear: f64,
) -> Result<ComparisonOutcome> {
    let g = u1.grid();
    if !g.same_nodes(u2.grid()) || !g.same_nodes(d1.grid()) || !g.same_nodes(d2.grid()) {
        return Err(Error::GridMismatch);
    }
    let mut sup_int = 0.0_f64;
    for j in 1..g.ny() - 1 {
        for i in 1..g.nx() - 1 {
            sup_int = sup_int.max(math::abs(u1.get(i, j) - u2.get(i, j)));
        }
    }
    let sup_bdy = d1.sup_diff(d2)?;
    Ok(ComparisonOutcome {
        sup_interior_diff: sup_int,
        sup_boundary_diff: sup_bdy,
        holds: sup_int <= sup_bdy + 10.0 * tol_linear,
    })
}
