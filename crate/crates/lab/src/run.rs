//! Orchestration of the `solve`, `diagnose` and `sweep` verbs.

use std::path::Path;

use membrane_core::freeboundary::extract_free_boundary;
use membrane_core::solver::{solve, SolveReport};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::diagnostics::{run_one, DiagnosticOutcome};
use crate::error::{io_err, LabError};
use crate::output::{field_csv, free_boundary_csv, write_json, write_text};
use crate::report;
use crate::sweep::{stability_sweep, StabilityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Solve,
    Diagnose,
    Sweep,
}

impl Verb {
    pub fn as_str(self) -> &'static str {
        match self {
            Verb::Solve => "solve",
            Verb::Diagnose => "diagnose",
            Verb::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub verb: Verb,
    pub solve: SolveReport,
    pub diagnostics: Vec<DiagnosticOutcome>,
    pub sweep: Option<StabilityReport>,
    pub sweep_fatal: bool,
}

impl RunSummary {
    /// 0 iff every diagnostic completed and nothing fatal was flagged.
    pub fn exit_code(&self) -> i32 {
        let diag_failed = self.diagnostics.iter().any(DiagnosticOutcome::fails_run);
        let sweep_failed = self.sweep_fatal
            && self
                .sweep
                .as_ref()
                .is_some_and(|s| !s.comparison_holds() || !s.hausdorff_non_increasing());
        if diag_failed || sweep_failed {
            4
        } else {
            0
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "verb": self.verb.as_str(),
            "solve": report::solve_report(&self.solve),
            "diagnostics": self.diagnostics.iter().map(DiagnosticOutcome::to_json).collect::<Vec<_>>(),
            "sweep_report": self.sweep.as_ref().map(|_| "stability_report.json"),
            "status": self.exit_code(),
        })
    }
}

/// Solves, writes the field artifacts, then runs what `verb` asks for.
/// Everything goes to `cfg.output_dir`.
pub fn run(cfg: &ExperimentConfig, verb: Verb) -> Result<RunSummary, LabError> {
    let dir: &Path = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let spec = cfg.problem.spec()?;
    let sweep_cfg = match verb {
        Verb::Sweep => Some(
            cfg.sweep
                .as_ref()
                .ok_or_else(|| LabError::Config("the sweep verb needs a [sweep] section".into()))?,
        ),
        _ => None,
    };

    let (u, rep) = match solve(&spec) {
        Ok(r) => r,
        Err(e) => {
            write_json(&dir.join("solve_failure.json"), json!({ "error": e.to_string() }))?;
            return Err(LabError::Solve(e));
        }
    };
    write_text(&dir.join("field.csv"), &field_csv(&u))?;
    write_json(&dir.join("solve_report.json"), report::solve_report(&rep))?;
    let fb = extract_free_boundary(&u, spec.tol_zero);
    write_text(&dir.join("free_boundary.csv"), &free_boundary_csv(&fb))?;

    let mut diagnostics = Vec::new();
    if verb == Verb::Diagnose {
        for (k, d) in cfg.diagnostics.iter().enumerate() {
            diagnostics.push(run_one(k, d, &u, &spec, dir)?);
        }
    }

    let mut sweep = None;
    if let Some(s) = sweep_cfg {
        match stability_sweep(&spec, &u, s, Some(dir)) {
            Ok(r) => {
                write_json(&dir.join("stability_report.json"), r.to_json())?;
                sweep = Some(r);
            }
            Err(e @ LabError::Hypothesis { x, y }) => {
                write_json(
                    &dir.join("sweep_aborted.json"),
                    json!({ "reason": "one_phase_singular", "point": [x, y] }),
                )?;
                return Err(e);
            }
            Err(e) => return Err(e),
        }
    }

    let summary = RunSummary {
        verb,
        solve: rep,
        diagnostics,
        sweep,
        sweep_fatal: sweep_cfg.is_some_and(|s| s.fatal),
    };
    write_json(&dir.join("summary.json"), summary.to_json())?;
    Ok(summary)
}
