//! Weiss and Alt–Caffarelli–Friedman functionals in the plane, the circle
//! norm `S_r`, blow-up rescalings and radius ladders.
//!
//! Disk integrals use a polar midpoint rule with `nq` radial × `nq`
//! angular nodes, circle integrals an `nq`-point trapezoid rule. Gradients
//! come from precomputed central-difference fields, bilinearly
//! interpolated.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::grid::{GradientField, Grid2D, PointSampler, ScalarField};
use crate::math;
use crate::profiles::SourceStrengths;

pub const DEFAULT_NQ: usize = 256;

/// Relative part of the default monotonicity tolerance.
pub const DEFAULT_TOL_MONO: f64 = 1e-2;

const NEGATIVE_SLACK: f64 = 1e-12;

fn check_nq(nq: usize) -> Result<()> {
    if nq < 4 {
        return Err(Error::InvalidArgument("quadrature density below 4"));
    }
    Ok(())
}

fn check_ball(grid: &Grid2D, c: Point, r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument("radius must be positive and finite"));
    }
    if !grid.contains_ball(c, r) {
        return Err(Error::BallOutsideDomain { x: c.x, y: c.y, r });
    }
    Ok(())
}

fn check_resolved(grid: &Grid2D, r: f64) -> Result<()> {
    if r <= 2.0 * grid.h() {
        return Err(Error::UnderResolved { r, h: grid.h() });
    }
    Ok(())
}

/// Cosines and sines of `n` equally spaced angles, offset by `shift`
/// fractions of a step.
fn unit_circle(n: usize, shift: f64) -> Vec<(f64, f64)> {
    let d = 2.0 * PI / n as f64;
    (0..n)
        .map(|k| {
            let t = (k as f64 + shift) * d;
            (math::cos(t), math::sin(t))
        })
        .collect()
}

/// Polar midpoint rule for `∫_{B_r(c)} f`.
fn disk_integral(c: Point, r: f64, nq: usize, mut f: impl FnMut(Point) -> Result<f64>) -> Result<f64> {
    let dirs = unit_circle(nq, 0.5);
    let dr = r / nq as f64;
    let dt = 2.0 * PI / nq as f64;
    let mut total = 0.0;
    for a in 0..nq {
        let rho = (a as f64 + 0.5) * dr;
        let mut ring = 0.0;
        for &(cs, sn) in &dirs {
            ring += f(Point::new(c.x + rho * cs, c.y + rho * sn))?;
        }
        total += ring * rho;
    }
    Ok(total * dr * dt)
}

/// Trapezoid rule for `∫_{∂B_r(c)} f ds`.
fn circle_integral(c: Point, r: f64, nq: usize, mut f: impl FnMut(Point) -> Result<f64>) -> Result<f64> {
    let mut total = 0.0;
    for (cs, sn) in unit_circle(nq, 0.0) {
        total += f(Point::new(c.x + r * cs, c.y + r * sn))?;
    }
    Ok(total * r * 2.0 * PI / nq as f64)
}

fn weiss_with(
    u: &ScalarField,
    grad: &GradientField,
    x0: Point,
    r: f64,
    lambdas: SourceStrengths,
    nq: usize,
) -> Result<f64> {
    let (lp, lm) = (lambdas.plus(), lambdas.minus());
    let bulk = disk_integral(x0, r, nq, |p| {
        let v = u.interpolate(p)?;
        Ok(grad.norm_sq_at(p)? + lp * v.max(0.0) + lm * (-v).max(0.0))
    })?;
    let edge = circle_integral(x0, r, nq, |p| {
        let v = u.interpolate(p)?;
        Ok(v * v)
    })?;
    let r4 = r * r * r * r;
    Ok(bulk / r4 - 2.0 * edge / (r4 * r))
}

/// Weiss functional
/// `Φ(r) = r⁻⁴∫_{B_r}(|∇u|² + λ₊u⁺ + λ₋u⁻) − 2r⁻⁵∫_{∂B_r}u²`.
pub fn weiss_phi(u: &ScalarField, x0: Point, r: f64, lambdas: SourceStrengths, nq: usize) -> Result<f64> {
    check_nq(nq)?;
    check_ball(u.grid(), x0, r)?;
    check_resolved(u.grid(), r)?;
    weiss_with(u, &u.gradient_fields(), x0, r, lambdas, nq)
}

fn dirichlet_with(grad: &GradientField, z: Point, r: f64, nq: usize) -> Result<f64> {
    disk_integral(z, r, nq, |p| grad.norm_sq_at(p))
}

fn check_nonnegative(f: &ScalarField) -> Result<()> {
    let m = f.min_value();
    if m < -NEGATIVE_SLACK {
        return Err(Error::NegativeInput { min: m });
    }
    Ok(())
}

fn check_pair(h1: &ScalarField, h2: &ScalarField) -> Result<()> {
    if !h1.grid().same_nodes(h2.grid()) {
        return Err(Error::GridMismatch);
    }
    check_nonnegative(h1)?;
    check_nonnegative(h2)
}

/// Alt–Caffarelli–Friedman functional
/// `Ψ(r) = r⁻⁴·∫_{B_r}|∇h₁|²·∫_{B_r}|∇h₂|²` (planar weight is 1).
pub fn acf_psi(h1: &ScalarField, h2: &ScalarField, z: Point, r: f64, nq: usize) -> Result<f64> {
    check_nq(nq)?;
    check_pair(h1, h2)?;
    check_ball(h1.grid(), z, r)?;
    check_resolved(h1.grid(), r)?;
    psi_with(&h1.gradient_fields(), &h2.gradient_fields(), z, r, nq)
}

fn psi_with(g1: &GradientField, g2: &GradientField, z: Point, r: f64, nq: usize) -> Result<f64> {
    let a = dirichlet_with(g1, z, r, nq)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    let b = dirichlet_with(g2, z, r, nq)?;
    let r2 = r * r;
    Ok(a * b / (r2 * r2))
}

/// `(max(∂ₑu, 0), −min(∂ₑu, 0))` from difference quotients.
pub fn directional_parts(u: &ScalarField, e: Point) -> Result<(ScalarField, ScalarField)> {
    if !e.is_finite() || math::abs(e.norm() - 1.0) > 1e-9 {
        return Err(Error::InvalidDirection);
    }
    let grad = u.gradient_fields();
    let de: Vec<f64> = grad
        .gx
        .values()
        .iter()
        .zip(grad.gy.values())
        .map(|(gx, gy)| e.x * gx + e.y * gy)
        .collect();
    let grid = *u.grid();
    let plus = de.iter().map(|&d| d.max(0.0)).collect();
    let minus = de.iter().map(|&d| (-d).max(0.0)).collect();
    Ok((ScalarField::new(grid, plus)?, ScalarField::new(grid, minus)?))
}

/// `S_r = sqrt(r⁻¹∫_{∂B_r(y)} u²)` by an `nq`-point trapezoid rule, for
/// any sampler.
pub fn s_norm_of(u: &impl PointSampler, y: Point, r: f64, nq: usize) -> Result<f64> {
    check_nq(nq)?;
    let edge = circle_integral(y, r, nq, |p| {
        let v = u.sample(p)?;
        Ok(v * v)
    })?;
    Ok(math::sqrt(edge / r))
}

/// [`s_norm_of`] for a grid field, rejecting circles that leave the grid.
pub fn s_norm(u: &ScalarField, y: Point, r: f64, nq: usize) -> Result<f64> {
    check_ball(u.grid(), y, r)?;
    s_norm_of(u, y, r, nq)
}

/// How a blow-up is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// `u(y + rx) / S_r(y, u)`.
    #[default]
    SNorm,
    /// `u(y + rx) / r²`.
    Quadratic,
}

/// Rescales `u` around `y` by the factor `r` onto `target` with the circle
/// norm `S_r`.
pub fn blowup_rescale(u: &ScalarField, y: Point, r: f64, target: &Grid2D) -> Result<ScalarField> {
    blowup_rescale_with(u, y, r, target, Normalization::SNorm, DEFAULT_NQ)
}

pub fn blowup_rescale_with(
    u: &ScalarField,
    y: Point,
    r: f64,
    target: &Grid2D,
    norm: Normalization,
    nq: usize,
) -> Result<ScalarField> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive and finite"));
    }
    let b = target.bounds();
    let src = u.grid();
    let corners = [
        Point::new(b.x_min, b.y_min),
        Point::new(b.x_max, b.y_max),
    ];
    for c in corners {
        let q = y + c * r;
        if !src.contains(q) {
            return Err(Error::BallOutsideDomain { x: y.x, y: y.y, r });
        }
    }
    let scale = match norm {
        Normalization::SNorm => {
            let s = s_norm(u, y, r, nq)?;
            if s <= 1e-300 {
                return Err(Error::VanishingNorm { r });
            }
            s
        }
        Normalization::Quadratic => r * r,
    };
    let mut out = Vec::with_capacity(target.len());
    for k in 0..target.len() {
        let q = y + target.node_at(k) * r;
        out.push(u.interpolate(q)? / scale);
    }
    ScalarField::new(*target, out)
}

/// Center and strictly decreasing radii.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusLadder {
    center: Point,
    radii: Vec<f64>,
}

impl RadiusLadder {
    pub fn new(center: Point, radii: Vec<f64>) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidLadder("center is not finite"));
        }
        if radii.is_empty() {
            return Err(Error::InvalidLadder("no radii"));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidLadder("radii must be positive"));
        }
        if radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidLadder("radii must be strictly decreasing"));
        }
        Ok(RadiusLadder { center, radii })
    }

    /// Radii `m·h` for the given multiples, sorted decreasing.
    pub fn grid_multiples(center: Point, h: f64, multiples: &[u32]) -> Result<Self> {
        let mut m: Vec<u32> = multiples.to_vec();
        m.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(center, m.iter().map(|&k| k as f64 * h).collect())
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn smallest(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }

    pub fn largest(&self) -> f64 {
        self.radii[0]
    }

    /// Checks that every ball fits in `grid` and is resolvable.
    pub fn check(&self, grid: &Grid2D) -> Result<()> {
        check_ball(grid, self.center, self.largest())?;
        check_resolved(grid, self.smallest())
    }
}

/// Functional values along a ladder with the pairs that break
/// monotonicity.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityProfile {
    pub ladder: RadiusLadder,
    pub values: Vec<f64>,
    /// Index `i` flags the pair `(radii[i], radii[i+1])` where the value at
    /// the smaller radius exceeds the larger one by more than `tolerance`.
    pub violations: Vec<usize>,
    pub tolerance: f64,
}

impl MonotonicityProfile {
    /// Flags violations at tolerance `rel·max|value| + 1e-8`.
    pub fn from_values(ladder: RadiusLadder, values: Vec<f64>, rel: f64) -> Result<Self> {
        if values.len() != ladder.len() {
            return Err(Error::SizeMismatch {
                expected: ladder.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(math::abs(*v)));
        let tolerance = rel * scale + 1e-8;
        let violations = values
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0] + tolerance)
            .map(|(i, _)| i)
            .collect();
        Ok(MonotonicityProfile {
            ladder,
            values,
            violations,
            tolerance,
        })
    }

    /// Per-radius flag: true where the row is the smaller radius of a
    /// violating pair.
    pub fn violation_flags(&self) -> Vec<bool> {
        let mut flags = alloc::vec![false; self.values.len()];
        for &i in &self.violations {
            flags[i + 1] = true;
        }
        flags
    }
}

/// Weiss functional along a ladder centered at the ladder's center.
pub fn phi_ladder(
    u: &ScalarField,
    ladder: &RadiusLadder,
    lambdas: SourceStrengths,
    nq: usize,
    rel_tol: f64,
) -> Result<MonotonicityProfile> {
    check_nq(nq)?;
    ladder.check(u.grid())?;
    let grad = u.gradient_fields();
    let values = ladder
        .radii()
        .iter()
        .map(|&r| weiss_with(u, &grad, ladder.center(), r, lambdas, nq))
        .collect::<Result<Vec<_>>>()?;
    MonotonicityProfile::from_values(ladder.clone(), values, rel_tol)
}

/// ACF functional along a ladder.
pub fn psi_ladder(
    h1: &ScalarField,
    h2: &ScalarField,
    ladder: &RadiusLadder,
    nq: usize,
    rel_tol: f64,
) -> Result<MonotonicityProfile> {
    check_nq(nq)?;
    check_pair(h1, h2)?;
    ladder.check(h1.grid())?;
    let (g1, g2) = (h1.gradient_fields(), h2.gradient_fields());
    let values = ladder
        .radii()
        .iter()
        .map(|&r| psi_with(&g1, &g2, ladder.center(), r, nq))
        .collect::<Result<Vec<_>>>()?;
    MonotonicityProfile::from_values(ladder.clone(), values, rel_tol)
}
