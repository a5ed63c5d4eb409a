//! Free-boundary extraction and the geometric diagnostics built on it.
//!
//! `∂{u>0}` is contoured at level `+tol_zero` and `∂{u<0}` at `−tol_zero`
//! by marching squares, so a plateau `{|u| ≤ tol_zero}` yields two curves.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::grid::{GradientField, Grid2D, PointSampler, ScalarField};
use crate::math;
use crate::monotonicity::{self, Normalization, RadiusLadder, DEFAULT_NQ};
use crate::profiles::{
    dist_to_m, dist_to_normalized_polynomials, GlobalProfile, MStarBounds, Phase, PolynomialFit,
    SearchOptions, SourceStrengths,
};

/// An ordered chain of contour points.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
    /// The last point connects back to the first.
    pub closed: bool,
}

impl Polyline {
    /// Consecutive point pairs, including the closing pair.
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        let count = if self.closed && n > 2 { n } else { n.saturating_sub(1) };
        (0..count).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeBoundarySet {
    /// `∂{u>0}`.
    pub plus: Vec<Polyline>,
    /// `∂{u<0}`.
    pub minus: Vec<Polyline>,
    /// Spacing of the grid the set was extracted from.
    pub spacing: f64,
}

impl FreeBoundarySet {
    pub fn phase(&self, phase: Phase) -> &[Polyline] {
        match phase {
            Phase::Positive => &self.plus,
            Phase::Negative => &self.minus,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty() && self.minus.is_empty()
    }

    /// All polylines with their phase.
    pub fn polylines(&self) -> impl Iterator<Item = (Phase, &Polyline)> {
        self.plus
            .iter()
            .map(|p| (Phase::Positive, p))
            .chain(self.minus.iter().map(|p| (Phase::Negative, p)))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point> + '_ {
        self.polylines().flat_map(|(_, p)| p.points.iter().copied())
    }

    /// Length of one phase's curves clipped to `window`.
    pub fn clipped_length(&self, phase: Phase, window: &Rect) -> f64 {
        self.phase(phase)
            .iter()
            .flat_map(|p| p.segments())
            .filter_map(|(a, b)| window.clip_segment(a, b))
            .map(|(a, b)| a.dist(b))
            .sum()
    }
}

/// Edge ids: `2·k` for the horizontal edge leaving node `k` to the right,
/// `2·k + 1` for the vertical edge leaving it upwards.
fn contour(grid: &Grid2D, g: &[f64]) -> Vec<Polyline> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let inside = |k: usize| g[k] > 0.0;
    let crossing = |edge: usize| -> Point {
        let k = edge / 2;
        let other = if edge % 2 == 0 { k + 1 } else { k + nx };
        let (a, b) = (g[k], g[other]);
        let t = a / (a - b);
        let p = grid.node_at(k);
        let q = grid.node_at(other);
        p + (q - p) * t
    };

    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let k0 = grid.index(i, j);
            let corners = [k0, k0 + 1, k0 + 1 + nx, k0 + nx];
            let ins = corners.map(inside);
            let bottom = 2 * k0;
            let right = 2 * (k0 + 1) + 1;
            let top = 2 * (k0 + nx);
            let left = 2 * k0 + 1;
            // edge between corner c and c+1 (cyclic)
            let edges = [bottom, right, top, left];
            let cut: Vec<usize> = (0..4).filter(|&c| ins[c] != ins[(c + 1) % 4]).map(|c| edges[c]).collect();
            match cut.len() {
                0 => {}
                2 => segments.push((cut[0], cut[1])),
                _ => {
                    let center = corners.iter().map(|&k| g[k]).sum::<f64>() > 0.0;
                    // corner c sits between edges (c+3)%4 and c
                    for c in 0..4 {
                        if ins[c] != center {
                            segments.push((edges[(c + 3) % 4], edges[c]));
                        }
                    }
                }
            }
        }
    }

    let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(s);
        incident.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start_edge: usize, first_seg: usize, used: &mut Vec<bool>| -> (Vec<usize>, bool) {
        let mut chain = vec![start_edge];
        let mut seg = first_seg;
        let mut at = start_edge;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            if next == start_edge {
                return (chain, true);
            }
            chain.push(next);
            at = next;
            match incident[&next].iter().copied().find(|&s| !used[s]) {
                Some(s) => seg = s,
                None => return (chain, false),
            }
        }
    };

    // open chains start at edges with a single incident segment
    let ends: Vec<usize> = incident
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(&e, _)| e)
        .collect();
    for e in ends {
        let s = incident[&e][0];
        if !used[s] {
            let (chain, closed) = walk(e, s, &mut used);
            lines.push((chain, closed));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            let (chain, closed) = walk(segments[s].0, s, &mut used);
            lines.push((chain, closed));
        }
    }

    lines
        .into_iter()
        .map(|(chain, closed)| Polyline {
            points: chain.into_iter().map(crossing).collect(),
            closed,
        })
        .collect()
}

/// Contours `u = tol_zero` (boundary of the positive phase) and
/// `u = −tol_zero` (boundary of the negative phase).
pub fn extract_free_boundary(u: &ScalarField, tol_zero: f64) -> FreeBoundarySet {
    let tol = tol_zero.max(0.0);
    let grid = u.grid();
    let plus: Vec<f64> = u.values().iter().map(|v| v - tol).collect();
    let minus: Vec<f64> = u.values().iter().map(|v| -v - tol).collect();
    FreeBoundarySet {
        plus: contour(grid, &plus),
        minus: contour(grid, &minus),
        spacing: grid.h(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointKind {
    /// `∇u ≠ 0`.
    Regular,
    /// Two-phase point with vanishing gradient.
    Branch,
    /// Blow-up close to a sign-definite quadratic.
    OnePhaseSingular,
    Indeterminate,
}

impl PointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::Regular => "regular",
            PointKind::Branch => "branch",
            PointKind::OnePhaseSingular => "one_phase_singular",
            PointKind::Indeterminate => "indeterminate",
        }
    }
}

/// What the classification measured. Fields past the decisive test stay
/// empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Evidence {
    pub gradient_norm: f64,
    /// `(direction, Ψ at the smallest ladder radius)`.
    pub psi: Vec<(Point, f64)>,
    pub dist_to_m: Option<f64>,
    pub fitted_profile: Option<GlobalProfile>,
    pub dist_to_polynomials: Option<f64>,
    pub fitted_polynomial: Option<PolynomialFit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointClass {
    pub point: Point,
    pub kind: PointKind,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyThresholds {
    pub tol_grad: f64,
    pub tol_psi: f64,
    pub tol_dist: f64,
    /// Unit directions `e` for the `(∂ₑu)±` test.
    pub directions: Vec<Point>,
    pub nq: usize,
    /// Nodes per axis of the blow-up grid on `[−1, 1]²`.
    pub blowup_nodes: usize,
    pub bounds: MStarBounds,
    pub search: SearchOptions,
}

impl ClassifyThresholds {
    /// `tol_grad = 10·h·(λ₊+λ₋)`, `tol_psi = 10⁻²·(π²/4)·(λ₊λ₋/4)²`,
    /// `tol_dist = 0.1`, axis and diagonal directions.
    ///
    /// The `λ` factor in `tol_psi` makes the threshold scale like `Ψ`
    /// under `u ↦ s·u`; it is 1 for `λ₊ = λ₋ = 2`.
    pub fn defaults(h: f64, lambdas: SourceStrengths) -> Self {
        let d = core::f64::consts::FRAC_1_SQRT_2;
        let lam = 0.25 * lambdas.plus() * lambdas.minus();
        ClassifyThresholds {
            tol_grad: 10.0 * h * lambdas.sum(),
            tol_psi: 1e-2 * (PI * PI / 4.0) * lam * lam,
            tol_dist: 0.1,
            directions: vec![
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
                Point::new(d, d),
                Point::new(d, -d),
            ],
            nq: DEFAULT_NQ,
            blowup_nodes: 33,
            bounds: MStarBounds::default(),
            search: SearchOptions::default(),
        }
    }
}

/// Shared precomputation for classifying many points of one field.
pub struct Classifier<'a> {
    u: &'a ScalarField,
    lambdas: SourceStrengths,
    thresholds: ClassifyThresholds,
    grad: GradientField,
    parts: Vec<(Point, GradientField, GradientField)>,
    target: Grid2D,
}

impl<'a> Classifier<'a> {
    pub fn new(u: &'a ScalarField, lambdas: SourceStrengths, thresholds: ClassifyThresholds) -> Result<Self> {
        if thresholds.directions.is_empty() {
            return Err(Error::InvalidArgument("no test directions"));
        }
        let mut parts = Vec::with_capacity(thresholds.directions.len());
        for &e in &thresholds.directions {
            let (h1, h2) = monotonicity::directional_parts(u, e)?;
            parts.push((e, h1.gradient_fields(), h2.gradient_fields()));
        }
        let target = Grid2D::centered_square(1.0, thresholds.blowup_nodes)?;
        Ok(Classifier {
            u,
            lambdas,
            grad: u.gradient_fields(),
            thresholds,
            parts,
            target,
        })
    }

    pub fn thresholds(&self) -> &ClassifyThresholds {
        &self.thresholds
    }

    /// Gradient magnitude from interpolated central differences.
    pub fn gradient_norm(&self, p: Point) -> Result<f64> {
        Ok(self.grad.at(p)?.norm())
    }

    pub fn classify(&self, ladder: &RadiusLadder) -> Result<PointClass> {
        let t = &self.thresholds;
        let p = ladder.center();
        ladder.check(self.u.grid())?;
        let mut ev = Evidence {
            gradient_norm: self.gradient_norm(p)?,
            ..Evidence::default()
        };
        let done = |kind, ev| Ok(PointClass { point: p, kind, evidence: ev });
        if ev.gradient_norm > t.tol_grad {
            return done(PointKind::Regular, ev);
        }

        let r = ladder.smallest();
        for (e, g1, g2) in &self.parts {
            let a = dirichlet(g1, p, r, t.nq)?;
            let b = dirichlet(g2, p, r, t.nq)?;
            ev.psi.push((*e, a * b / (r * r * r * r)));
        }
        let blowup = monotonicity::blowup_rescale_with(self.u, p, r, &self.target, Normalization::SNorm, t.nq);
        let blowup = match blowup {
            Ok(b) => b,
            // u vanishes on the circle: no normalized blow-up exists
            Err(Error::VanishingNorm { .. }) => return done(PointKind::Indeterminate, ev),
            Err(e) => return Err(e),
        };
        if ev.psi.iter().all(|(_, v)| *v < t.tol_psi) {
            let fit = dist_to_m(&blowup, t.bounds, self.lambdas, &t.search)?;
            ev.dist_to_m = Some(fit.distance);
            ev.fitted_profile = Some(fit.profile);
            if fit.distance < t.tol_dist {
                return done(PointKind::Branch, ev);
            }
        }
        let poly = dist_to_normalized_polynomials(&blowup, &t.search)?;
        ev.dist_to_polynomials = Some(poly.distance);
        ev.fitted_polynomial = Some(poly);
        if poly.distance < t.tol_dist {
            return done(PointKind::OnePhaseSingular, ev);
        }
        done(PointKind::Indeterminate, ev)
    }
}

fn dirichlet(g: &GradientField, c: Point, r: f64, nq: usize) -> Result<f64> {
    let n = nq as f64;
    let (dr, dt) = (r / n, 2.0 * PI / n);
    let mut total = 0.0;
    for a in 0..nq {
        let rho = (a as f64 + 0.5) * dr;
        let mut ring = 0.0;
        for b in 0..nq {
            let th = (b as f64 + 0.5) * dt;
            ring += g.norm_sq_at(c + Point::new(math::cos(th), math::sin(th)) * rho)?;
        }
        total += ring * rho;
    }
    Ok(total * dr * dt)
}

/// Classifies the free-boundary point at the ladder's center.
pub fn classify_point(
    u: &ScalarField,
    ladder: &RadiusLadder,
    lambdas: SourceStrengths,
    thresholds: &ClassifyThresholds,
) -> Result<PointClass> {
    Classifier::new(u, lambdas, thresholds.clone())?.classify(ladder)
}

/// The two graphs bounding the zero set near a point, in the frame of the
/// best-fit rotated profile.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFit {
    /// Unit vector of the first (graph-valued) frame coordinate.
    pub direction: Point,
    pub theta: f64,
    /// Transverse sample positions.
    pub t: Vec<f64>,
    /// Supremum of the first coordinate over the zero set at each `t`.
    pub gplus: Vec<f64>,
    /// Infimum of the first coordinate over the zero set at each `t`.
    pub gminus: Vec<f64>,
    pub lipschitz_estimate: f64,
    /// Largest turning angle between consecutive polyline segments in the
    /// window (radians).
    pub max_normal_oscillation: f64,
    /// Sup distance of the blow-up used to choose the frame.
    pub fit_distance: f64,
}

/// Fits `g⁺ ≥ g⁻` around `p` inside a square window of side `window`.
pub fn fit_two_graphs(
    u: &ScalarField,
    p: Point,
    window: f64,
    tol_zero: f64,
    lambdas: SourceStrengths,
    opts: &SearchOptions,
) -> Result<GraphFit> {
    let h = u.grid().h();
    if !(window >= 8.0 * h) {
        return Err(Error::UnderResolved { r: window, h });
    }
    let target = Grid2D::centered_square(1.0, 33)?;
    let blowup = monotonicity::blowup_rescale_with(u, p, 0.5 * window, &target, Normalization::SNorm, DEFAULT_NQ)?;
    let fit = dist_to_m(&blowup, MStarBounds::default(), lambdas, opts)?;
    let theta = fit.profile.theta();
    let fb = extract_free_boundary(u, tol_zero);
    graphs_in_frame(&fb, p, theta, window, fit.distance)
}

/// Graph extraction in the frame `s = n·(q − p)`, `t = n⊥·(q − p)` with
/// `n = (cos θ, −sin θ)`.
pub fn graphs_in_frame(fb: &FreeBoundarySet, p: Point, theta: f64, window: f64, fit_distance: f64) -> Result<GraphFit> {
    let h = fb.spacing;
    let n = Point::new(math::cos(theta), -math::sin(theta));
    let perp = Point::new(-n.y, n.x);
    let frame = |q: Point| {
        let d = q - p;
        (d.dot(n), d.dot(perp))
    };
    let half = 0.5 * window;

    let mut segs: Vec<(Phase, (f64, f64), (f64, f64))> = Vec::new();
    let mut turn = 0.0_f64;
    for (phase, line) in fb.polylines() {
        let mut prev: Option<Point> = None;
        for (a, b) in line.segments() {
            let (fa, fb_) = (frame(a), frame(b));
            let inside = |f: (f64, f64)| math::abs(f.0) <= half && math::abs(f.1) <= half;
            if !(inside(fa) || inside(fb_)) {
                prev = None;
                continue;
            }
            segs.push((phase, fa, fb_));
            let d = b - a;
            if d.norm() <= 1e-12 * h {
                continue;
            }
            if let Some(q) = prev {
                let cross = q.x * d.y - q.y * d.x;
                turn = turn.max(math::abs(math::atan2(cross, q.dot(d))));
            }
            prev = Some(d);
        }
    }
    if segs.is_empty() {
        return Err(Error::EmptyZeroSet);
    }

    let count = (math::ceil(window / (2.0 * h)) as usize).max(4);
    let mut ts = Vec::with_capacity(count + 1);
    let mut gplus = Vec::with_capacity(count + 1);
    let mut gminus = Vec::with_capacity(count + 1);
    for k in 0..=count {
        let t = -half + window * k as f64 / count as f64;
        let mut hits: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for (phase, a, b) in &segs {
            let (lo, hi) = if a.1 <= b.1 { (a, b) } else { (b, a) };
            if lo.1 == hi.1 || t < lo.1 || t >= hi.1 {
                continue;
            }
            let s = lo.0 + (hi.0 - lo.0) * (t - lo.1) / (hi.1 - lo.1);
            if math::abs(s) <= half {
                hits[(*phase == Phase::Negative) as usize].push(s);
            }
        }
        let mut all = Vec::new();
        for hs in &hits {
            if let (Some(lo), Some(hi)) = (
                hs.iter().copied().reduce(f64::min),
                hs.iter().copied().reduce(f64::max),
            ) {
                if hi - lo > 2.0 * h {
                    return Err(Error::NotAGraph { t });
                }
                all.extend_from_slice(hs);
            }
        }
        if all.is_empty() {
            return Err(Error::NotAGraph { t });
        }
        ts.push(t);
        gplus.push(all.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        gminus.push(all.iter().copied().fold(f64::INFINITY, f64::min));
    }

    let mut lip = 0.0_f64;
    for k in 1..ts.len() {
        let dt = ts[k] - ts[k - 1];
        lip = lip
            .max(math::abs(gplus[k] - gplus[k - 1]) / dt)
            .max(math::abs(gminus[k] - gminus[k - 1]) / dt);
    }
    Ok(GraphFit {
        direction: n,
        theta,
        t: ts,
        gplus,
        gminus,
        lipschitz_estimate: lip,
        max_normal_oscillation: turn,
        fit_distance,
    })
}

/// `φ(r, θ_k)` at `θ_k = −π + 2πk/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularSamples {
    pub r: f64,
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
}

impl AngularSamples {
    /// `θ ↦ φ(−θ)` on the same nodes.
    pub fn reflected(&self) -> AngularSamples {
        let m = self.values.len();
        AngularSamples {
            r: self.r,
            thetas: self.thetas.clone(),
            values: (0..m).map(|k| self.values[(m - k) % m]).collect(),
        }
    }
}

/// `φ(r, θ) = u(y + r·U(cos θ, sin θ)) / S_r(y, u)`, with `U` the rotation
/// by `rotation` and `S_r` from the same `m` trapezoid nodes.
pub fn circle_trace(u: &impl PointSampler, y: Point, rotation: f64, r: f64, m: usize) -> Result<AngularSamples> {
    if m < 4 {
        return Err(Error::InvalidArgument("need at least 4 circle samples"));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive and finite"));
    }
    let thetas: Vec<f64> = (0..m).map(|k| -PI + 2.0 * PI * k as f64 / m as f64).collect();
    let raw = thetas
        .iter()
        .map(|&t| u.sample(y + Point::polar(t).rotate(rotation) * r))
        .collect::<Result<Vec<_>>>()?;
    let s = math::sqrt(2.0 * PI / m as f64 * raw.iter().map(|v| v * v).sum::<f64>());
    if s <= 1e-300 {
        return Err(Error::VanishingNorm { r });
    }
    Ok(AngularSamples {
        r,
        thetas,
        values: raw.into_iter().map(|v| v / s).collect(),
    })
}

/// `ξ(θ) = φ(θ) − φ(−θ)` on the nodes of `[0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionXi {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn reflection_xi(phi: &AngularSamples) -> Result<ReflectionXi> {
    let m = phi.values.len();
    if m < 2 || m % 2 != 0 {
        return Err(Error::InvalidArgument("reflection needs an even sample count"));
    }
    let half = m / 2;
    let mut thetas = Vec::with_capacity(half + 1);
    let mut values = Vec::with_capacity(half + 1);
    for j in 0..=half {
        thetas.push(2.0 * PI * j as f64 / m as f64);
        values.push(phi.values[(half + j) % m] - phi.values[half - j]);
    }
    Ok(ReflectionXi { thetas, values })
}

/// Clipped length of each phase's boundary inside `window`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerimeterEstimate {
    pub plus: f64,
    pub minus: f64,
}

pub fn perimeter_estimate(u: &ScalarField, window: &Rect, tol_zero: f64) -> Result<PerimeterEstimate> {
    let b = u.grid().bounds();
    let slack = 1e-12 * (1.0 + b.diameter());
    if window.x_min < b.x_min - slack
        || window.x_max > b.x_max + slack
        || window.y_min < b.y_min - slack
        || window.y_max > b.y_max + slack
        || !(window.x_min < window.x_max && window.y_min < window.y_max)
    {
        return Err(Error::InvalidArgument("window must be a nonempty rectangle inside the grid"));
    }
    let fb = extract_free_boundary(u, tol_zero);
    Ok(PerimeterEstimate {
        plus: fb.clipped_length(Phase::Positive, window),
        minus: fb.clipped_length(Phase::Negative, window),
    })
}

/// Greedy count of `ε`-balls centered on the curves that cover every
/// polyline point of `fb` inside `window`.
pub fn covering_count(fb: &FreeBoundarySet, eps: f64, window: &Rect) -> Result<usize> {
    if !(eps.is_finite() && eps >= 2.0 * fb.spacing * (1.0 - 1e-12)) {
        return Err(Error::UnderResolved { r: eps, h: fb.spacing });
    }
    let delta = eps / 16.0;
    let reach = eps - delta;
    let cell = |p: Point| (math::floor(p.x / eps) as i64, math::floor(p.y / eps) as i64);
    let mut centers: BTreeMap<(i64, i64), Vec<Point>> = BTreeMap::new();
    let mut count = 0;

    let mut visit = |q: Point| {
        if !window.contains(q) {
            return;
        }
        let (ci, cj) = cell(q);
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(list) = centers.get(&(ci + di, cj + dj)) {
                    if list.iter().any(|c| c.dist(q) <= reach) {
                        return;
                    }
                }
            }
        }
        centers.entry((ci, cj)).or_default().push(q);
        count += 1;
    };

    for (_, line) in fb.polylines() {
        if line.points.len() == 1 {
            visit(line.points[0]);
        }
        for (a, b) in line.segments() {
            let steps = (math::ceil(a.dist(b) / delta) as usize).max(1);
            for s in 0..steps {
                visit(a + (b - a) * (s as f64 / steps as f64));
            }
        }
        if !line.closed {
            if let Some(&last) = line.points.last() {
                visit(last);
            }
        }
    }
    Ok(count)
}
