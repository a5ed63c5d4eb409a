//! Boundary-perturbation stability sweeps.
//!
//! Each row re-solves with `u_D + δ·g`, checks the comparison bound, and
//! measures how far the perturbed free boundary lies from the reference one.

use std::path::Path;

use membrane_core::freeboundary::{
    extract_free_boundary, fit_two_graphs, ClassifyThresholds, Classifier, FreeBoundarySet, PointClass, PointKind,
    Polyline,
};
use membrane_core::monotonicity::RadiusLadder;
use membrane_core::profiles::{Phase, SearchOptions};
use membrane_core::solver::{comparison_check, solve, ProblemSpec, SolveReport};
use membrane_core::{Point, ScalarField};
use serde_json::{json, Value};

use crate::config::SweepConfig;
use crate::error::LabError;
use crate::output::{free_boundary_csv, num, write_text};
use crate::report;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("Hausdorff distance of an empty point set")]
pub struct EmptySet;

fn samples(lines: &[Polyline], densify: Option<f64>) -> Vec<Point> {
    let mut out = Vec::new();
    for line in lines {
        match densify {
            None => out.extend_from_slice(&line.points),
            Some(step) => {
                for (a, b) in line.segments() {
                    let k = ((a.dist(b) / step).ceil() as usize).max(1);
                    out.extend((0..k).map(|i| a + (b - a) * (i as f64 / k as f64)));
                }
                if !line.closed {
                    out.extend(line.points.last().copied());
                }
            }
        }
    }
    out
}

fn directed(a: &[Point], b: &[Point]) -> f64 {
    a.iter()
        .map(|p| b.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between the vertex sets of two polyline
/// families (optionally resampled at spacing `densify`).
pub fn hausdorff_distance(a: &[Polyline], b: &[Polyline], densify: Option<f64>) -> Result<f64, EmptySet> {
    let (pa, pb) = (samples(a, densify), samples(b, densify));
    if pa.is_empty() || pb.is_empty() {
        return Err(EmptySet);
    }
    Ok(directed(&pa, &pb).max(directed(&pb, &pa)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphRow {
    pub point: Point,
    pub fit: Result<Value, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub amplitude: f64,
    pub sup_boundary_diff: f64,
    pub sup_interior_diff: f64,
    pub comparison_holds: bool,
    /// Per phase; `None` when a set is empty.
    pub hausdorff_plus: Option<f64>,
    pub hausdorff_minus: Option<f64>,
    pub graphs: Vec<GraphRow>,
    pub solve: SolveReport,
}

impl SweepRow {
    /// Larger of the two phase distances, `None` if neither exists.
    pub fn hausdorff(&self) -> Option<f64> {
        match (self.hausdorff_plus, self.hausdorff_minus) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub perturbation: &'static str,
    /// Ordered by decreasing amplitude.
    pub rows: Vec<SweepRow>,
    pub precheck_points: usize,
    /// Grid spacing, the tolerance of the monotonicity check.
    pub h: f64,
}

impl StabilityReport {
    pub fn comparison_holds(&self) -> bool {
        self.rows.iter().all(|r| r.comparison_holds)
    }

    /// Distances shrink with δ up to `2h`; every row must have a distance.
    pub fn hausdorff_non_increasing(&self) -> bool {
        let d: Vec<Option<f64>> = self.rows.iter().map(SweepRow::hausdorff).collect();
        d.iter().all(Option::is_some)
            && d.windows(2).all(|w| w[1].unwrap() <= w[0].unwrap() + 2.0 * self.h)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "amplitude": num(r.amplitude),
                    "sup_boundary_diff": num(r.sup_boundary_diff),
                    "sup_interior_diff": num(r.sup_interior_diff),
                    "comparison_holds": r.comparison_holds,
                    "hausdorff_plus": r.hausdorff_plus.map(num),
                    "hausdorff_minus": r.hausdorff_minus.map(num),
                    "graphs": r.graphs.iter().map(|g| match &g.fit {
                        Ok(v) => json!({"point": report::point(g.point), "fit": v}),
                        Err(e) => json!({"point": report::point(g.point), "error": e}),
                    }).collect::<Vec<_>>(),
                    "solve": report::solve_report(&r.solve),
                })
            })
            .collect();
        json!({
            "perturbation": self.perturbation,
            "precheck_points": self.precheck_points,
            "comparison_holds": self.comparison_holds(),
            "hausdorff_non_increasing": self.hausdorff_non_increasing(),
            "rows": rows,
        })
    }
}

/// Free-boundary points where the gradient is small enough that a
/// singular classification is possible, spaced at least `spacing` apart.
fn precheck_candidates(u: &ScalarField, fb: &FreeBoundarySet, classifier: &Classifier<'_>, spacing: f64) -> Vec<Point> {
    let g = u.grid();
    let h = g.h();
    let mut picked: Vec<Point> = Vec::new();
    for v in fb.vertices() {
        let Some((i, j)) = g.locate(v).ok().map(|(i, j, _, _)| (i, j)) else {
            continue;
        };
        // snap to the nearest node so ladders are grid-aligned
        let mut q = g.node(i, j);
        for (di, dj) in [(1, 0), (0, 1), (1, 1)] {
            let c = g.node((i + di).min(g.nx() - 1), (j + dj).min(g.ny() - 1));
            if c.dist(v) < q.dist(v) {
                q = c;
            }
        }
        if picked.iter().any(|p| p.dist(q) < spacing - 1e-9 * h) {
            continue;
        }
        if classifier.gradient_norm(q).is_ok_and(|n| n <= classifier.thresholds().tol_grad) {
            picked.push(q);
        }
    }
    picked
}

/// Classifies the reference free boundary and returns the first
/// one-phase singular point, if any, with the number of points checked.
pub fn find_singular_point(
    u: &ScalarField,
    spec: &ProblemSpec,
    spacing_multiple: u32,
) -> Result<(Option<PointClass>, usize), LabError> {
    let h = u.grid().h();
    let th = ClassifyThresholds::defaults(h, spec.lambdas);
    let classifier = Classifier::new(u, spec.lambdas, th).map_err(LabError::Numerics)?;
    let fb = extract_free_boundary(u, spec.tol_zero);
    let mut points = precheck_candidates(u, &fb, &classifier, spacing_multiple as f64 * h);
    // an isolated zero node yields no contour; look at near-zero minima too
    let g = u.grid();
    for j in 1..g.ny() - 1 {
        for i in 1..g.nx() - 1 {
            let v = u.get(i, j).abs();
            if v <= spec.tol_zero
                && [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)].iter().all(|&(a, b)| u.get(a, b).abs() > spec.tol_zero)
            {
                let q = g.node(i, j);
                if points.iter().all(|p| p.dist(q) >= spacing_multiple as f64 * h - 1e-9 * h) {
                    points.push(q);
                }
            }
        }
    }
    let mut checked = 0;
    for p in points {
        let Ok(ladder) = RadiusLadder::grid_multiples(p, h, &[32, 16, 8]) else {
            continue;
        };
        if ladder.check(g).is_err() {
            continue;
        }
        checked += 1;
        let c = classifier.classify(&ladder).map_err(LabError::Numerics)?;
        if c.kind == PointKind::OnePhaseSingular {
            return Ok((Some(c), checked));
        }
    }
    Ok((None, checked))
}

fn phase_distance(a: &FreeBoundarySet, b: &FreeBoundarySet, phase: Phase, densify: Option<f64>) -> Option<f64> {
    hausdorff_distance(a.phase(phase), b.phase(phase), densify).ok()
}

/// Runs the sweep against the solved reference `u_ref`. Per-row free
/// boundaries go to `dir` when given.
pub fn stability_sweep(
    reference: &ProblemSpec,
    u_ref: &ScalarField,
    cfg: &SweepConfig,
    dir: Option<&Path>,
) -> Result<StabilityReport, LabError> {
    let (singular, checked) = find_singular_point(u_ref, reference, cfg.precheck_spacing)?;
    if let Some(c) = singular {
        return Err(LabError::Hypothesis {
            x: c.point.x,
            y: c.point.y,
        });
    }
    let fb_ref = extract_free_boundary(u_ref, reference.tol_zero);
    let mut rows = Vec::with_capacity(cfg.amplitudes.len());
    for (k, &delta) in cfg.amplitudes.iter().enumerate() {
        let mut spec = reference.clone();
        spec.boundary = reference
            .boundary
            .perturbed(|p| delta * cfg.perturbation.eval(cfg.wavenumber, p))
            .map_err(LabError::Numerics)?;
        let (u, rep) = solve(&spec).map_err(LabError::Solve)?;
        let cmp = comparison_check(u_ref, &u, &reference.boundary, &spec.boundary, reference.tol_linear)
            .map_err(LabError::Numerics)?;
        let fb = extract_free_boundary(&u, spec.tol_zero);
        if let Some(dir) = dir {
            write_text(&dir.join(format!("sweep_row_{k:02}_free_boundary.csv")), &free_boundary_csv(&fb))?;
        }
        let graphs = cfg
            .graph_points
            .iter()
            .map(|p| {
                let p = Point::new(p[0], p[1]);
                let fit = fit_two_graphs(&u, p, cfg.graph_window, spec.tol_zero, spec.lambdas, &SearchOptions::default());
                GraphRow {
                    point: p,
                    fit: fit.map(|f| report::graph_summary(&f)).map_err(|e| e.to_string()),
                }
            })
            .collect();
        rows.push(SweepRow {
            amplitude: delta,
            sup_boundary_diff: cmp.sup_boundary_diff,
            sup_interior_diff: cmp.sup_interior_diff,
            comparison_holds: cmp.holds,
            hausdorff_plus: phase_distance(&fb_ref, &fb, Phase::Positive, cfg.densify),
            hausdorff_minus: phase_distance(&fb_ref, &fb, Phase::Negative, cfg.densify),
            graphs,
            solve: rep,
        });
    }
    Ok(StabilityReport {
        perturbation: cfg.perturbation.as_str(),
        rows,
        precheck_points: checked,
        h: u_ref.grid().h(),
    })
}
