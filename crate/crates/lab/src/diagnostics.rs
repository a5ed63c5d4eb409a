//! Runs the configured diagnostics on a solved field and writes one
//! artifact per diagnostic.

use std::fmt::Write as _;
use std::path::Path;

use membrane_core::freeboundary::{
    circle_trace, covering_count, extract_free_boundary, fit_two_graphs, perimeter_estimate, reflection_xi,
    ClassifyThresholds, Classifier,
};
use membrane_core::monotonicity::{directional_parts, phi_ladder, psi_ladder, RadiusLadder};
use membrane_core::profiles::SearchOptions;
use membrane_core::solver::ProblemSpec;
use membrane_core::{Point, Rect, ScalarField};
use serde_json::{json, Value};

use crate::config::{window_rect, DiagnosticConfig};
use crate::error::LabError;
use crate::output::{fmt17, ladder_csv, num, to_json_string, write_text};
use crate::report;

/// What one diagnostic produced.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticOutcome {
    pub index: usize,
    pub kind: &'static str,
    /// Artifact file name inside the output directory.
    pub file: Option<String>,
    pub completed: bool,
    /// The checked property failed (meaningful only when completed).
    pub violation: bool,
    pub fatal: bool,
    pub message: String,
}

impl DiagnosticOutcome {
    /// Whether this outcome forces a nonzero exit status.
    pub fn fails_run(&self) -> bool {
        !self.completed || (self.fatal && self.violation)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "index": self.index,
            "kind": self.kind,
            "file": self.file,
            "completed": self.completed,
            "violation": self.violation,
            "fatal": self.fatal,
            "message": self.message,
        })
    }
}

fn ladder(center: Point, h: f64, radii: &Option<Vec<f64>>, multiples: &Option<Vec<u32>>, default: &[u32]) -> membrane_core::Result<RadiusLadder> {
    match (radii, multiples) {
        (Some(r), _) => RadiusLadder::new(center, r.clone()),
        (None, Some(m)) => RadiusLadder::grid_multiples(center, h, m),
        (None, None) => RadiusLadder::grid_multiples(center, h, default),
    }
}

fn pt(p: [f64; 2]) -> Point {
    Point::new(p[0], p[1])
}

/// Produced artifact: file body, violation flag, message.
type Produced = (String, bool, String);

/// Runs diagnostic `index` and writes its artifact to `dir`.
pub fn run_one(
    index: usize,
    d: &DiagnosticConfig,
    u: &ScalarField,
    spec: &ProblemSpec,
    dir: &Path,
) -> Result<DiagnosticOutcome, LabError> {
    let ext = match d {
        DiagnosticConfig::PhiLadder { .. } | DiagnosticConfig::PsiLadder { .. } | DiagnosticConfig::Xi { .. } => "csv",
        DiagnosticConfig::Covering { .. } => "csv",
        _ => "json",
    };
    let file = format!("{:02}_{}.{ext}", index, d.kind());
    let mut outcome = DiagnosticOutcome {
        index,
        kind: d.kind(),
        file: None,
        completed: false,
        violation: false,
        fatal: d.fatal(),
        message: String::new(),
    };
    match produce(d, u, spec) {
        Ok((body, violation, message)) => {
            write_text(&dir.join(&file), &body)?;
            outcome.file = Some(file);
            outcome.completed = true;
            outcome.violation = violation;
            outcome.message = message;
        }
        Err(e) => outcome.message = e.to_string(),
    }
    Ok(outcome)
}

fn produce(d: &DiagnosticConfig, u: &ScalarField, spec: &ProblemSpec) -> membrane_core::Result<Produced> {
    let grid = *u.grid();
    let h = grid.h();
    let lambdas = spec.lambdas;
    let full = grid.bounds();
    let window_or_full = |w: &Option<[f64; 4]>| -> membrane_core::Result<Rect> {
        match w {
            Some(w) => window_rect("window", *w)
                .map_err(|_| membrane_core::Error::InvalidArgument("invalid window")),
            None => Ok(full),
        }
    };
    match d {
        DiagnosticConfig::PhiLadder {
            center,
            radii,
            multiples,
            nq,
            tol_mono,
            ..
        } => {
            let l = ladder(pt(*center), h, radii, multiples, &[64, 32, 16, 8])?;
            let prof = phi_ladder(u, &l, lambdas, *nq, *tol_mono)?;
            let n = prof.violations.len();
            Ok((ladder_csv(&prof), n > 0, format!("{n} violations")))
        }
        DiagnosticConfig::PsiLadder {
            center,
            radii,
            multiples,
            direction,
            nq,
            tol_mono,
            ..
        } => {
            let l = ladder(pt(*center), h, radii, multiples, &[64, 32, 16, 8])?;
            let (h1, h2) = directional_parts(u, pt(*direction))?;
            let prof = psi_ladder(&h1, &h2, &l, *nq, *tol_mono)?;
            let n = prof.violations.len();
            Ok((ladder_csv(&prof), n > 0, format!("{n} violations")))
        }
        DiagnosticConfig::Classify {
            points,
            radii,
            multiples,
            expect,
            ..
        } => {
            let classifier = Classifier::new(u, lambdas, ClassifyThresholds::defaults(h, lambdas))?;
            let mut out = Vec::with_capacity(points.len());
            let mut mismatches = 0;
            for p in points {
                let l = ladder(pt(*p), h, radii, multiples, &[32, 16, 8])?;
                let c = classifier.classify(&l)?;
                if expect.is_some_and(|e| e.as_str() != c.kind.as_str()) {
                    mismatches += 1;
                }
                out.push(report::classification(&c));
            }
            let msg = match expect {
                Some(e) => format!("{mismatches} of {} points not {}", points.len(), e.as_str()),
                None => format!("{} points classified", points.len()),
            };
            Ok((to_json_string(Value::Array(out)), mismatches > 0, msg))
        }
        DiagnosticConfig::Graphs {
            point,
            window,
            max_lipschitz,
            max_oscillation,
            ..
        } => {
            let fit = fit_two_graphs(u, pt(*point), *window, spec.tol_zero, lambdas, &SearchOptions::default())?;
            let too_steep = max_lipschitz.is_some_and(|m| fit.lipschitz_estimate > m);
            let too_curved = max_oscillation.is_some_and(|m| fit.max_normal_oscillation > m);
            let msg = format!(
                "lipschitz {}, oscillation {}",
                fmt17(fit.lipschitz_estimate),
                fmt17(fit.max_normal_oscillation)
            );
            Ok((to_json_string(report::graph_fit(&fit)), too_steep || too_curved, msg))
        }
        DiagnosticConfig::Xi {
            center,
            radius,
            rotation,
            samples,
            tol,
            ..
        } => {
            let phi = circle_trace(u, pt(*center), *rotation, *radius, *samples)?;
            let xi = reflection_xi(&phi)?;
            let mut body = String::from("theta,value\n");
            for (t, v) in xi.thetas.iter().zip(&xi.values) {
                let _ = writeln!(body, "{},{}", fmt17(*t), fmt17(*v));
            }
            let min = xi.values.iter().copied().fold(f64::INFINITY, f64::min);
            Ok((body, min < -tol, format!("min xi {}", fmt17(min))))
        }
        DiagnosticConfig::Perimeter {
            window,
            expect_plus,
            expect_minus,
            tolerance,
            ..
        } => {
            let w = window_or_full(window)?;
            let per = perimeter_estimate(u, &w, spec.tol_zero)?;
            let tol = tolerance.unwrap_or(2.0 * h);
            let off = |got: f64, want: Option<f64>| want.is_some_and(|w| (got - w).abs() > tol);
            let violation = off(per.plus, *expect_plus) || off(per.minus, *expect_minus);
            let body = to_json_string(json!({
                "window": [num(w.x_min), num(w.x_max), num(w.y_min), num(w.y_max)],
                "plus": num(per.plus),
                "minus": num(per.minus),
                "tolerance": num(tol),
            }));
            Ok((body, violation, format!("plus {}, minus {}", fmt17(per.plus), fmt17(per.minus))))
        }
        DiagnosticConfig::Covering {
            window,
            eps,
            multiples,
            bound,
            ..
        } => {
            let w = window_or_full(window)?;
            let bound = bound.unwrap_or(4.0 * w.diameter());
            let eps: Vec<f64> = match (eps, multiples) {
                (Some(e), _) => e.clone(),
                (None, Some(m)) => m.iter().map(|k| *k as f64 * h).collect(),
                (None, None) => [8.0, 16.0, 32.0].iter().map(|k| k * h).collect(),
            };
            let fb = extract_free_boundary(u, spec.tol_zero);
            let mut body = String::from("eps,count,product\n");
            let mut worst = 0.0_f64;
            for e in eps {
                let n = covering_count(&fb, e, &w)?;
                let prod = n as f64 * e;
                worst = worst.max(prod);
                let _ = writeln!(body, "{},{n},{}", fmt17(e), fmt17(prod));
            }
            Ok((body, worst > bound, format!("max N(eps)*eps {} (bound {})", fmt17(worst), fmt17(bound))))
        }
    }
}
