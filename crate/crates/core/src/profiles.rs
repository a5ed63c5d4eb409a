//! Exact global solutions used as boundary data, references and oracles.
//!
//! A [`GlobalProfile`] is the one-dimensional two-phase solution
//!
//! ```text
//! v(x) = β₁·((λ₊/4)·max(x₁,0)² − (λ₋/4)·min(x₁−τ,0)²) + β₂·x₁
//! ```
//!
//! composed with the counterclockwise rotation `U_θ`, i.e. `u = v ∘ U_θ`.
//! The unrotated members form the class `M*`, all rotations the class `M`.
//! [`OnePhasePolynomial`] covers the sign-definite homogeneous quadratic
//! solutions, which are excluded from `M`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::grid::{BoundaryData, Grid2D, PointSampler, ScalarField};
use crate::math;

/// Source strengths `λ₊`, `λ₋`, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceStrengths {
    plus: f64,
    minus: f64,
}

impl SourceStrengths {
    pub fn new(plus: f64, minus: f64) -> Result<Self> {
        if !(plus.is_finite() && plus > 0.0) {
            return Err(Error::InvalidProblem("lambda_plus must be positive"));
        }
        if !(minus.is_finite() && minus > 0.0) {
            return Err(Error::InvalidProblem("lambda_minus must be positive"));
        }
        Ok(SourceStrengths { plus, minus })
    }

    /// `λ₊ = λ₋ = 2`, the normalization used throughout the examples.
    pub fn symmetric_two() -> Self {
        SourceStrengths {
            plus: 2.0,
            minus: 2.0,
        }
    }

    pub fn plus(&self) -> f64 {
        self.plus
    }

    pub fn minus(&self) -> f64 {
        self.minus
    }

    pub fn sum(&self) -> f64 {
        self.plus + self.minus
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.plus * s, self.minus * s)
    }
}

/// Parameter box `0 ≤ β₁ ≤ a`, `0 ≤ β₂ ≤ b`, `β₁ + β₂ ≥ c > 0` of `M*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MStarBounds {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for MStarBounds {
    fn default() -> Self {
        MStarBounds {
            a: 4.0,
            b: 4.0,
            c: 0.05,
        }
    }
}

impl MStarBounds {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.a >= self.c && self.b >= 0.0) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidArgument("bounds need a >= c > 0 and b >= 0"));
        }
        Ok(())
    }
}

/// The one-dimensional profile along its normal coordinate `s`.
#[inline]
pub(crate) fn profile_1d(beta1: f64, beta2: f64, tau: f64, lp: f64, lm: f64, s: f64) -> f64 {
    let pos = s.max(0.0);
    let neg = (s - tau).min(0.0);
    beta1 * (0.25 * lp * pos * pos - 0.25 * lm * neg * neg) + beta2 * s
}

/// A member of `M` (or `M*` when `θ = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalProfile {
    beta1: f64,
    beta2: f64,
    tau: f64,
    theta: f64,
    lambdas: SourceStrengths,
}

impl GlobalProfile {
    /// Validates against the default [`MStarBounds`].
    pub fn new(beta1: f64, beta2: f64, tau: f64, theta: f64, lambdas: SourceStrengths) -> Result<Self> {
        Self::with_bounds(beta1, beta2, tau, theta, lambdas, MStarBounds::default())
    }

    pub fn with_bounds(
        beta1: f64,
        beta2: f64,
        tau: f64,
        theta: f64,
        lambdas: SourceStrengths,
        bounds: MStarBounds,
    ) -> Result<Self> {
        bounds.validate()?;
        if !(beta1.is_finite() && beta2.is_finite() && tau.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidProfile("parameters must be finite"));
        }
        if !(-1.0..=0.0).contains(&tau) {
            return Err(Error::InvalidProfile("tau must lie in [-1, 0]"));
        }
        if !(0.0..=bounds.a).contains(&beta1) {
            return Err(Error::InvalidProfile("beta1 outside [0, a]"));
        }
        if !(0.0..=bounds.b).contains(&beta2) {
            return Err(Error::InvalidProfile("beta2 outside [0, b]"));
        }
        if beta1 + beta2 < bounds.c {
            return Err(Error::InvalidProfile("beta1 + beta2 below c"));
        }
        if beta2 != 0.0 && tau != 0.0 {
            return Err(Error::InvalidProfile("beta2 != 0 requires tau = 0"));
        }
        Ok(GlobalProfile {
            beta1,
            beta2,
            tau,
            theta,
            lambdas,
        })
    }

    /// `(λ₊/4)·max(x₁,0)² − (λ₋/4)·min(x₁,0)²`.
    pub fn two_phase(lambdas: SourceStrengths) -> Self {
        GlobalProfile {
            beta1: 1.0,
            beta2: 0.0,
            tau: 0.0,
            theta: 0.0,
            lambdas,
        }
    }

    pub fn rotated(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }
    pub fn beta2(&self) -> f64 {
        self.beta2
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn lambdas(&self) -> SourceStrengths {
        self.lambdas
    }

    /// First coordinate of `U_θ p`.
    #[inline]
    pub fn normal_coordinate(&self, p: Point) -> f64 {
        math::cos(self.theta) * p.x - math::sin(self.theta) * p.y
    }

    /// Value of the unrotated profile at normal coordinate `s`.
    pub fn along_normal(&self, s: f64) -> f64 {
        profile_1d(self.beta1, self.beta2, self.tau, self.lambdas.plus, self.lambdas.minus, s)
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.along_normal(self.normal_coordinate(p))
    }

    pub fn gradient(&self, p: Point) -> Point {
        let s = self.normal_coordinate(p);
        let d = self.beta1 * (0.5 * self.lambdas.plus * s.max(0.0) - 0.5 * self.lambdas.minus * (s - self.tau).min(0.0))
            + self.beta2;
        // ∇(s) = (cos θ, −sin θ)
        Point::new(d * math::cos(self.theta), -d * math::sin(self.theta))
    }
}

impl PointSampler for GlobalProfile {
    fn sample(&self, p: Point) -> Result<f64> {
        Ok(self.eval(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Positive,
    Negative,
}

impl Phase {
    pub fn sign(self) -> f64 {
        match self {
            Phase::Positive => 1.0,
            Phase::Negative => -1.0,
        }
    }
}

/// `p(x) = α·x₁² + β·x₁x₂ + γ·x₂²`, sign-definite, solving the equation in
/// its single phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnePhasePolynomial {
    alpha: f64,
    beta: f64,
    gamma: f64,
    phase: Phase,
}

impl OnePhasePolynomial {
    pub fn new(alpha: f64, beta: f64, gamma: f64, phase: Phase, lambdas: SourceStrengths) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::IndefinitePolynomial);
        }
        let (a, g) = (phase.sign() * alpha, phase.sign() * gamma);
        let slack = 1e-12 * (a.abs() + g.abs() + beta.abs());
        if a < 0.0 || g < 0.0 || (a == 0.0 && g == 0.0) || beta * beta > 4.0 * a * g + slack {
            return Err(Error::IndefinitePolynomial);
        }
        let target = match phase {
            Phase::Positive => 0.5 * lambdas.plus,
            Phase::Negative => -0.5 * lambdas.minus,
        };
        let lap = 2.0 * alpha + 2.0 * gamma;
        if math::abs(lap - target) > 1e-12 * target.abs() {
            return Err(Error::InvalidProfile("polynomial Laplacian must equal ±λ/2"));
        }
        Ok(OnePhasePolynomial {
            alpha,
            beta,
            gamma,
            phase,
        })
    }

    /// `±(λ/8)·|x|²`.
    pub fn radial(phase: Phase, lambdas: SourceStrengths) -> Self {
        let k = match phase {
            Phase::Positive => lambdas.plus / 8.0,
            Phase::Negative => -lambdas.minus / 8.0,
        };
        OnePhasePolynomial {
            alpha: k,
            beta: 0.0,
            gamma: k,
            phase,
        }
    }

    /// `±(λ/4)·(s·(x·e)² + (1−s)·(x·e⊥)²)` with `e = (cos φ, sin φ)`.
    pub fn from_shape(phase: Phase, lambdas: SourceStrengths, split: f64, angle: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&split) {
            return Err(Error::InvalidArgument("split must lie in [0, 1]"));
        }
        let k = match phase {
            Phase::Positive => lambdas.plus / 4.0,
            Phase::Negative => -lambdas.minus / 4.0,
        };
        let (c, s) = (math::cos(angle), math::sin(angle));
        let (alpha, beta, gamma) = quadratic_coefficients(split, c, s);
        Ok(OnePhasePolynomial {
            alpha: k * alpha,
            beta: k * beta,
            gamma: k * gamma,
            phase,
        })
    }

    pub fn coefficients(&self) -> (f64, f64, f64) {
        (self.alpha, self.beta, self.gamma)
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.alpha * p.x * p.x + self.beta * p.x * p.y + self.gamma * p.y * p.y
    }

    pub fn gradient(&self, p: Point) -> Point {
        Point::new(
            2.0 * self.alpha * p.x + self.beta * p.y,
            self.beta * p.x + 2.0 * self.gamma * p.y,
        )
    }
}

impl PointSampler for OnePhasePolynomial {
    fn sample(&self, p: Point) -> Result<f64> {
        Ok(self.eval(p))
    }
}

/// Coefficients of `s·(x·e)² + (1−s)·(x·e⊥)²` for `e = (c, sn)`.
#[inline]
fn quadratic_coefficients(split: f64, c: f64, sn: f64) -> (f64, f64, f64) {
    let t = 1.0 - split;
    (
        split * c * c + t * sn * sn,
        2.0 * (split - t) * c * sn,
        split * sn * sn + t * c * c,
    )
}

/// Exact Dirichlet data from a global solution.
pub fn profile_boundary_trace(v: &impl PointSampler, grid: Grid2D) -> Result<BoundaryData> {
    let values = grid
        .boundary_nodes()
        .map(|(i, j)| v.sample(grid.node(i, j)))
        .collect::<Result<Vec<_>>>()?;
    BoundaryData::new(grid, values)
}

/// Result of a sup-norm fit against `M*` or `M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileFit {
    pub distance: f64,
    pub profile: GlobalProfile,
}

/// Knobs for the derivative-free distance searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Coarse grid points per parameter axis.
    pub coarse: usize,
    /// Uniform rotation samples on `[-π, π)` for [`dist_to_m`].
    pub theta_samples: usize,
    /// Step size at which pattern refinement stops.
    pub tol: f64,
    /// Coarse candidates refined per family.
    pub starts: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            coarse: 32,
            theta_samples: 360,
            tol: 1e-6,
            starts: 3,
        }
    }
}

/// Grid nodes of a field inside the closed unit disk.
struct DiskSamples {
    xs: Vec<f64>,
    ys: Vec<f64>,
    fs: Vec<f64>,
}

impl DiskSamples {
    fn from_field(f: &ScalarField) -> Result<Self> {
        let g = f.grid();
        let tol = 1e-12;
        if g.x_min() > -1.0 + tol || g.x_max() < 1.0 - tol || g.y_min() > -1.0 + tol || g.y_max() < 1.0 - tol {
            return Err(Error::NotCoveringUnitDisk);
        }
        let mut out = DiskSamples {
            xs: Vec::new(),
            ys: Vec::new(),
            fs: Vec::new(),
        };
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                let p = g.node(i, j);
                if p.dot(p) <= 1.0 + tol {
                    out.xs.push(p.x);
                    out.ys.push(p.y);
                    out.fs.push(f.get(i, j));
                }
            }
        }
        // outermost nodes first: the sup error is usually attained near the
        // rim, which lets early cutoffs trigger sooner
        let mut order: Vec<usize> = (0..out.fs.len()).collect();
        let r2 = |k: usize| out.xs[k] * out.xs[k] + out.ys[k] * out.ys[k];
        order.sort_by(|&a, &b| r2(b).total_cmp(&r2(a)));
        Ok(DiskSamples {
            xs: order.iter().map(|&k| out.xs[k]).collect(),
            ys: order.iter().map(|&k| out.ys[k]).collect(),
            fs: order.iter().map(|&k| out.fs[k]).collect(),
        })
    }
}

/// A point of `M` with its sup error.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    b1: f64,
    b2: f64,
    tau: f64,
    theta: f64,
    value: f64,
}

/// Golden-section search for a convex function on `[lo, hi]`; returns the
/// best point seen, endpoints included.
///
/// `f(x, cutoff)` may stop early and return any value above `cutoff`; the
/// retained point is always evaluated exactly.
fn golden(lo: f64, hi: f64, tol: f64, mut f: impl FnMut(f64, f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut best = (lo, f(lo, f64::INFINITY));
    let fh = f(hi, best.1);
    if fh < best.1 {
        best = (hi, fh);
    }
    if b - a <= tol {
        return best;
    }
    let mut x1 = b - INV_PHI * (b - a);
    let f1_exact = f(x1, f64::INFINITY);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f1_exact, f(x2, f1_exact));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1, f2);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2, f1);
        }
    }
    let inner = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if inner.1 < best.1 {
        inner
    } else {
        best
    }
}

/// Sup-norm fit of the disk samples against `M`.
///
/// Every feasible member lies on one of two slices: `τ = 0` with free
/// `(β₁, β₂)`, or `β₂ = 0` with free `(β₁, τ)`. For a fixed rotation the
/// error is jointly convex in the linear coefficients, so those are found
/// by nested golden sections; only `θ` and `τ` need a local search.
struct MStarObjective<'a> {
    disk: &'a DiskSamples,
    bounds: MStarBounds,
    lp: f64,
    lm: f64,
}

impl MStarObjective<'_> {
    /// Normal coordinates `cos θ·x − sin θ·y` of the samples.
    fn normals(&self, theta: f64) -> Vec<f64> {
        let (c, s) = (math::cos(theta), math::sin(theta));
        self.disk.xs.iter().zip(&self.disk.ys).map(|(x, y)| c * x - s * y).collect()
    }

    /// Quadratic part `(λ₊/4)·max(t,0)² − (λ₋/4)·min(t−τ,0)²` per sample.
    fn quadratic_part(&self, ts: &[f64], tau: f64) -> Vec<f64> {
        ts.iter().map(|&t| profile_1d(1.0, 0.0, tau, self.lp, self.lm, t)).collect()
    }

    /// `sup |β₁·q + β₂·t − f|`, abandoned as soon as it exceeds `cutoff`.
    fn sup_error(&self, q: &[f64], ts: &[f64], b1: f64, b2: f64, cutoff: f64) -> f64 {
        let mut worst = 0.0_f64;
        for ((&qk, &t), &f) in q.iter().zip(ts).zip(&self.disk.fs) {
            worst = worst.max(math::abs(b1 * qk + b2 * t - f));
            if worst > cutoff {
                break;
            }
        }
        worst
    }

    /// Global minimizer over `(β₁, β₂)` with `τ = 0`.
    fn best_linear(&self, ts: &[f64], theta: f64, tol: f64) -> Candidate {
        let MStarBounds { a, b, c } = self.bounds;
        let q = self.quadratic_part(ts, 0.0);
        let inner = |b2: f64| golden((c - b2).max(0.0), a, tol, |b1, cut| self.sup_error(&q, ts, b1, b2, cut));
        let (b2, value) = golden(0.0, b, tol, |b2, _| inner(b2).1);
        Candidate {
            b1: inner(b2).0,
            b2,
            tau: 0.0,
            theta,
            value,
        }
    }

    /// Minimizer over `β₁` with `β₂ = 0` and `τ` fixed.
    fn best_slab_at(&self, ts: &[f64], theta: f64, tau: f64, tol: f64) -> Candidate {
        let MStarBounds { a, c, .. } = self.bounds;
        let tau = tau.clamp(-1.0, 0.0);
        let q = self.quadratic_part(ts, tau);
        let (b1, value) = golden(c, a, tol, |b1, cut| self.sup_error(&q, ts, b1, 0.0, cut));
        Candidate {
            b1,
            b2: 0.0,
            tau,
            theta,
            value,
        }
    }

    /// Slab fit at fixed rotation: `τ` grid, then compass refinement of
    /// the best `starts` grid points.
    fn best_slab(&self, ts: &[f64], theta: f64, opts: &SearchOptions, tol: f64) -> Candidate {
        let n = opts.coarse.max(2);
        let mut grid: Vec<Candidate> = (0..n)
            .map(|k| self.best_slab_at(ts, theta, -(k as f64) / (n - 1) as f64, tol))
            .collect();
        grid.sort_by(|x, y| x.value.total_cmp(&y.value));
        grid.truncate(opts.starts.max(1));
        let step = 1.0 / (n - 1) as f64;
        grid.into_iter()
            .map(|start| self.compass(start, 0.0, step, opts.tol, tol))
            .min_by(|x, y| x.value.total_cmp(&y.value))
            .expect("at least one start")
    }

    fn evaluate(&self, family_slab: bool, theta: f64, tau: f64, tol: f64) -> Candidate {
        let ts = self.normals(theta);
        if family_slab {
            self.best_slab_at(&ts, theta, tau, tol)
        } else {
            self.best_linear(&ts, theta, tol)
        }
    }

    /// Compass search with step halving over `θ` (when `theta_step > 0`)
    /// and `τ` (when `tau_step > 0`, slab slice only).
    fn compass(&self, start: Candidate, theta_step: f64, tau_step: f64, stop: f64, tol: f64) -> Candidate {
        let slab = start.b2 == 0.0 && tau_step > 0.0;
        let (mut st, mut sp) = (theta_step, if slab { tau_step } else { 0.0 });
        let mut dirs: Vec<(f64, f64)> = Vec::new();
        for dt in [0.0, 1.0, -1.0] {
            for dp in [0.0, 1.0, -1.0] {
                if (dt != 0.0 && st > 0.0 || dt == 0.0) && (dp != 0.0 && sp > 0.0 || dp == 0.0) && (dt != 0.0 || dp != 0.0) {
                    dirs.push((dt, dp));
                }
            }
        }
        let mut cur = start;
        if dirs.is_empty() {
            return cur;
        }
        let mut guard = 0usize;
        while st.max(sp) >= stop && guard < 10_000 {
            guard += 1;
            let mut improved = false;
            for &(dt, dp) in &dirs {
                let theta = cur.theta + dt * st;
                let tau = (cur.tau + dp * sp).clamp(-1.0, 0.0);
                if dt == 0.0 && tau == cur.tau {
                    continue;
                }
                let cand = self.evaluate(slab, theta, tau, tol);
                if cand.value < cur.value {
                    cur = cand;
                    improved = true;
                    break;
                }
            }
            if !improved {
                st *= 0.5;
                sp *= 0.5;
            }
        }
        cur
    }

    fn to_fit(&self, cand: Candidate) -> Result<ProfileFit> {
        let lambdas = SourceStrengths::new(self.lp, self.lm)?;
        let profile = GlobalProfile::with_bounds(
            cand.b1,
            cand.b2,
            cand.tau,
            math::wrap_angle(cand.theta),
            lambdas,
            self.bounds,
        )?;
        Ok(ProfileFit {
            distance: cand.value,
            profile,
        })
    }
}

fn better(x: Candidate, y: Candidate) -> Candidate {
    if y.value < x.value {
        y
    } else {
        x
    }
}

/// Local minima of the rotation scan refined per slice.
const REFINED_MINIMA: usize = 3;

/// Inner tolerance of the rotation scan, which only ranks angles.
const SCAN_TOL: f64 = 1e-2;

/// Tolerance of the inner golden sections relative to the search tolerance.
const INNER_TOL: f64 = 1e-2;

/// `inf_{v ∈ M*} sup_{B₁} |v − f|` over the grid nodes of `f` inside the
/// closed unit disk. The returned profile attains the returned distance, so
/// the distance is an upper bound of the true infimum.
pub fn dist_to_mstar(
    f: &ScalarField,
    bounds: MStarBounds,
    lambdas: SourceStrengths,
    opts: &SearchOptions,
) -> Result<ProfileFit> {
    bounds.validate()?;
    let disk = DiskSamples::from_field(f)?;
    let obj = MStarObjective {
        disk: &disk,
        bounds,
        lp: lambdas.plus,
        lm: lambdas.minus,
    };
    let tol = opts.tol * INNER_TOL;
    let ts = obj.normals(0.0);
    let best = better(obj.best_linear(&ts, 0.0, tol), obj.best_slab(&ts, 0.0, opts, tol));
    obj.to_fit(best)
}

/// Like [`dist_to_mstar`] but also minimizing over the rotation `θ`.
///
/// A cheap scan over `opts.theta_samples` rotations ranks the angles; the
/// few best local minima are refined by compass search in `θ` (and `τ`
/// for the slab slice).
pub fn dist_to_m(
    f: &ScalarField,
    bounds: MStarBounds,
    lambdas: SourceStrengths,
    opts: &SearchOptions,
) -> Result<ProfileFit> {
    bounds.validate()?;
    if opts.theta_samples < 4 {
        return Err(Error::InvalidArgument("need at least 4 rotation samples"));
    }
    let disk = DiskSamples::from_field(f)?;
    let obj = MStarObjective {
        disk: &disk,
        bounds,
        lp: lambdas.plus,
        lm: lambdas.minus,
    };
    let m = opts.theta_samples;
    let dtheta = 2.0 * PI / m as f64;
    // per angle: the linear slice and the slab slice on a coarse τ grid
    let scan: Vec<(Candidate, Candidate)> = (0..m)
        .map(|k| {
            let theta = -PI + dtheta * k as f64;
            let ts = obj.normals(theta);
            let lin = obj.best_linear(&ts, theta, SCAN_TOL);
            let slab = (0..5)
                .map(|j| obj.best_slab_at(&ts, theta, -(j as f64) / 4.0, SCAN_TOL))
                .reduce(better)
                .expect("nonempty");
            (lin, slab)
        })
        .collect();

    // each slice is refined from its own best circular local minima, so a
    // compass walk never has to cross to the other slice's basin
    let minima = |value: &dyn Fn(usize) -> f64| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..m)
            .filter(|&k| value(k) <= value((k + m - 1) % m) && value(k) <= value((k + 1) % m))
            .collect();
        idx.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
        idx.truncate(REFINED_MINIMA);
        idx
    };
    let lin_minima = minima(&|k| scan[k].0.value);
    let slab_minima = minima(&|k| scan[k].1.value);

    // refine every local minimum loosely, then only the winner tightly
    let loose = 1e-3;
    let tau_step = 1.0 / (opts.coarse.max(2) - 1) as f64;
    let refine = |slab: bool, theta: f64, stop: f64, tol: f64, theta_step: f64| -> Candidate {
        let ts = obj.normals(theta);
        if slab {
            obj.compass(obj.best_slab(&ts, theta, opts, tol), theta_step, tau_step, stop, tol)
        } else {
            obj.compass(obj.best_linear(&ts, theta, tol), theta_step, 0.0, stop, tol)
        }
    };
    let mut best: Option<(bool, Candidate)> = None;
    let starts = lin_minima.iter().map(|&k| (false, k)).chain(slab_minima.iter().map(|&k| (true, k)));
    for (slab, k) in starts {
        let theta = -PI + dtheta * k as f64;
        let c = refine(slab, theta, loose, loose * INNER_TOL, dtheta);
        if best.map_or(true, |(_, b)| c.value < b.value) {
            best = Some((slab, c));
        }
    }
    let (slab, rough) = best.expect("a circular sequence has a local minimum");
    let fine = refine(slab, rough.theta, opts.tol.min(loose), opts.tol * INNER_TOL, 2.0 * loose);
    obj.to_fit(better(rough, fine))
}

/// Best fit among sign-definite homogeneous quadratics normalized to
/// `∫_{∂B₁} p² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialFit {
    pub distance: f64,
    pub phase: Phase,
    /// Eigenvalue split `s ∈ [0, 1]` of the quadratic form.
    pub split: f64,
    /// Angle of the eigenvector belonging to `s`.
    pub angle: f64,
}

/// `∫_{∂B₁} (s·cos²ψ + (1−s)·sin²ψ)² dψ`.
fn circle_energy(split: f64) -> f64 {
    let t = 1.0 - split;
    0.75 * PI * (split * split + t * t) + 0.5 * PI * split * t
}

/// Sup-norm distance from `f` (on the unit disk) to the class of
/// sign-definite homogeneous quadratics with unit circle norm. Blow-ups
/// normalized by `S_r` at one-phase singular points converge into this
/// class.
pub fn dist_to_normalized_polynomials(f: &ScalarField, opts: &SearchOptions) -> Result<PolynomialFit> {
    let disk = DiskSamples::from_field(f)?;
    let eval = |phase: Phase, split: f64, angle: f64, cutoff: f64| -> f64 {
        let k = phase.sign() / math::sqrt(circle_energy(split));
        let (a, b, g) = quadratic_coefficients(split, math::cos(angle), math::sin(angle));
        let mut worst = 0.0_f64;
        for i in 0..disk.fs.len() {
            let (x, y) = (disk.xs[i], disk.ys[i]);
            let e = math::abs(k * (a * x * x + b * x * y + g * y * y) - disk.fs[i]);
            if e > worst {
                worst = e;
                if worst > cutoff {
                    return worst;
                }
            }
        }
        worst
    };

    let ns = opts.coarse.max(2);
    let na = 2 * opts.coarse.max(2);
    let mut best = PolynomialFit {
        distance: f64::INFINITY,
        phase: Phase::Positive,
        split: 0.5,
        angle: 0.0,
    };
    for phase in [Phase::Positive, Phase::Negative] {
        for i in 0..ns {
            let split = i as f64 / (ns - 1) as f64;
            for j in 0..na {
                let angle = PI * j as f64 / na as f64;
                let d = eval(phase, split, angle, best.distance);
                if d < best.distance {
                    best = PolynomialFit {
                        distance: d,
                        phase,
                        split,
                        angle,
                    };
                }
            }
        }
    }

    let (mut ss, mut sa) = (1.0 / (ns - 1) as f64, PI / na as f64);
    let dirs: Vec<(f64, f64)> = [-1.0, 0.0, 1.0]
        .iter()
        .flat_map(|&dx| [-1.0, 0.0, 1.0].map(|dy| (dx, dy)))
        .filter(|&(dx, dy)| dx != 0.0 || dy != 0.0)
        .collect();
    let mut guard = 0;
    while ss.max(sa) >= opts.tol && guard < 20_000 {
        guard += 1;
        let mut improved = false;
        for &(dx, dy) in &dirs {
            let split = (best.split + dx * ss).clamp(0.0, 1.0);
            let angle = best.angle + dy * sa;
            let d = eval(best.phase, split, angle, best.distance);
            if d < best.distance {
                best.distance = d;
                best.split = split;
                best.angle = angle;
                improved = true;
                break;
            }
        }
        if !improved {
            ss *= 0.5;
            sa *= 0.5;
        }
    }
    best.angle = math::wrap_angle(best.angle);
    Ok(best)
}
