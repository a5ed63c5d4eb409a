//! Experiment configuration read from TOML.
//!
//! One file describes one experiment: the problem, the diagnostics to run on
//! its solution, an optional stability sweep, and the output directory.

use std::path::{Path, PathBuf};

use membrane_core::profiles::{profile_boundary_trace, GlobalProfile, OnePhasePolynomial, Phase};
use membrane_core::solver::ProblemSpec;
use membrane_core::{BoundaryData, Grid2D, Point, Rect, SourceStrengths};
use serde::Deserialize;

use crate::error::LabError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output_dir: PathBuf,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub diagnostics: Vec<DiagnosticConfig>,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default = "minus_one")]
    pub x_min: f64,
    #[serde(default = "one")]
    pub x_max: f64,
    #[serde(default = "minus_one")]
    pub y_min: f64,
    #[serde(default = "one")]
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    #[serde(default = "default_tol_linear")]
    pub tol_linear: f64,
    /// Sweep limit of the pattern iteration.
    #[serde(default = "default_max_sweeps", alias = "tol_pattern")]
    pub max_sweeps: usize,
    /// Defaults to `1e-10·(λ₊+λ₋)`.
    pub tol_zero: Option<f64>,
    pub boundary: BoundaryConfig,
}

fn minus_one() -> f64 {
    -1.0
}
fn one() -> f64 {
    1.0
}
fn default_tol_linear() -> f64 {
    1e-10
}
fn default_max_sweeps() -> usize {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseName {
    Positive,
    Negative,
}

impl From<PhaseName> for Phase {
    fn from(p: PhaseName) -> Phase {
        match p {
            PhaseName::Positive => Phase::Positive,
            PhaseName::Negative => Phase::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// `g ≡ 1`.
    Constant,
    /// `g(x) = x₂`.
    Linear,
    /// `g(x) = sin(kπx₂)`.
    Sinusoidal,
}

impl PerturbationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PerturbationKind::Constant => "constant",
            PerturbationKind::Linear => "linear",
            PerturbationKind::Sinusoidal => "sinusoidal",
        }
    }

    pub fn eval(self, wavenumber: f64, p: Point) -> f64 {
        match self {
            PerturbationKind::Constant => 1.0,
            PerturbationKind::Linear => p.y,
            PerturbationKind::Sinusoidal => (wavenumber * std::f64::consts::PI * p.y).sin(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
pub enum BoundaryConfig {
    #[serde(rename = "profile")]
    Profile {
        #[serde(default = "one")]
        beta1: f64,
        #[serde(default)]
        beta2: f64,
        #[serde(default)]
        tau: f64,
        #[serde(default)]
        theta: f64,
    },
    /// Sign-definite quadratic; either `coefficients = [α, β, γ]` of
    /// `αx₁² + βx₁x₂ + γx₂²` or the shape `(split, angle)`, radial by default.
    #[serde(rename = "polynomial")]
    Polynomial {
        phase: PhaseName,
        coefficients: Option<[f64; 3]>,
        split: Option<f64>,
        #[serde(default)]
        angle: f64,
    },
    #[serde(rename = "profile+perturbation")]
    PerturbedProfile {
        #[serde(default = "one")]
        beta1: f64,
        #[serde(default)]
        beta2: f64,
        #[serde(default)]
        tau: f64,
        #[serde(default)]
        theta: f64,
        perturbation: PerturbationKind,
        amplitude: f64,
        #[serde(default = "one")]
        wavenumber: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DiagnosticConfig {
    PhiLadder {
        #[serde(default)]
        center: [f64; 2],
        radii: Option<Vec<f64>>,
        multiples: Option<Vec<u32>>,
        #[serde(default = "default_nq")]
        nq: usize,
        #[serde(default = "default_tol_mono")]
        tol_mono: f64,
        #[serde(default)]
        fatal: bool,
    },
    PsiLadder {
        #[serde(default)]
        center: [f64; 2],
        radii: Option<Vec<f64>>,
        multiples: Option<Vec<u32>>,
        #[serde(default = "default_direction")]
        direction: [f64; 2],
        #[serde(default = "default_nq")]
        nq: usize,
        #[serde(default = "default_tol_mono")]
        tol_mono: f64,
        #[serde(default)]
        fatal: bool,
    },
    Classify {
        points: Vec<[f64; 2]>,
        radii: Option<Vec<f64>>,
        multiples: Option<Vec<u32>>,
        expect: Option<ClassName>,
        #[serde(default)]
        fatal: bool,
    },
    Graphs {
        #[serde(default)]
        point: [f64; 2],
        window: f64,
        max_lipschitz: Option<f64>,
        max_oscillation: Option<f64>,
        #[serde(default)]
        fatal: bool,
    },
    Xi {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
        #[serde(default)]
        rotation: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_tol_xi")]
        tol: f64,
        #[serde(default)]
        fatal: bool,
    },
    Perimeter {
        window: Option<[f64; 4]>,
        expect_plus: Option<f64>,
        expect_minus: Option<f64>,
        /// Defaults to `2h`.
        tolerance: Option<f64>,
        #[serde(default)]
        fatal: bool,
    },
    Covering {
        window: Option<[f64; 4]>,
        eps: Option<Vec<f64>>,
        multiples: Option<Vec<u32>>,
        /// Upper bound for `N(ε)·ε`; defaults to 4 × window diameter.
        bound: Option<f64>,
        #[serde(default)]
        fatal: bool,
    },
}

fn default_nq() -> usize {
    membrane_core::monotonicity::DEFAULT_NQ
}
fn default_tol_mono() -> f64 {
    membrane_core::monotonicity::DEFAULT_TOL_MONO
}
fn default_direction() -> [f64; 2] {
    [1.0, 0.0]
}
fn default_samples() -> usize {
    720
}
fn default_tol_xi() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassName {
    Regular,
    Branch,
    OnePhaseSingular,
    Indeterminate,
}

impl ClassName {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassName::Regular => "regular",
            ClassName::Branch => "branch",
            ClassName::OnePhaseSingular => "one_phase_singular",
            ClassName::Indeterminate => "indeterminate",
        }
    }
}

impl DiagnosticConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            DiagnosticConfig::PhiLadder { .. } => "phi_ladder",
            DiagnosticConfig::PsiLadder { .. } => "psi_ladder",
            DiagnosticConfig::Classify { .. } => "classify",
            DiagnosticConfig::Graphs { .. } => "graphs",
            DiagnosticConfig::Xi { .. } => "xi",
            DiagnosticConfig::Perimeter { .. } => "perimeter",
            DiagnosticConfig::Covering { .. } => "covering",
        }
    }

    pub fn fatal(&self) -> bool {
        match *self {
            DiagnosticConfig::PhiLadder { fatal, .. }
            | DiagnosticConfig::PsiLadder { fatal, .. }
            | DiagnosticConfig::Classify { fatal, .. }
            | DiagnosticConfig::Graphs { fatal, .. }
            | DiagnosticConfig::Xi { fatal, .. }
            | DiagnosticConfig::Perimeter { fatal, .. }
            | DiagnosticConfig::Covering { fatal, .. } => fatal,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub perturbation: PerturbationKind,
    #[serde(default = "one")]
    pub wavenumber: f64,
    /// Strictly decreasing positive amplitudes δ.
    pub amplitudes: Vec<f64>,
    /// Reference points at which graphs are fitted in every row.
    #[serde(default)]
    pub graph_points: Vec<[f64; 2]>,
    #[serde(default = "default_graph_window")]
    pub graph_window: f64,
    /// Spacing of the singular-point precheck along the reference free
    /// boundary, in multiples of `h`.
    #[serde(default = "default_precheck_spacing")]
    pub precheck_spacing: u32,
    /// Resample polylines at this spacing before measuring Hausdorff
    /// distances; vertices only when absent.
    pub densify: Option<f64>,
    /// Comparison failures or growing Hausdorff distances fail the run.
    #[serde(default)]
    pub fatal: bool,
}

fn default_graph_window() -> f64 {
    0.5
}
fn default_precheck_spacing() -> u32 {
    16
}

/// Parse and validate a config file.
pub fn load(path: &Path) -> Result<ExperimentConfig, LabError> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut cfg = parse(&text).map_err(|e| match e {
        LabError::Config(msg) => LabError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    if cfg.output_dir.is_relative() {
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        cfg.output_dir = base.join(&cfg.output_dir);
    }
    Ok(cfg)
}

pub fn parse(text: &str) -> Result<ExperimentConfig, LabError> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn bad(field: &str, why: impl std::fmt::Display) -> LabError {
    LabError::Config(format!("field `{field}`: {why}"))
}

fn finite_point(field: &str, p: [f64; 2]) -> Result<Point, LabError> {
    let q = Point::new(p[0], p[1]);
    if !q.is_finite() {
        return Err(bad(field, "coordinates must be finite"));
    }
    Ok(q)
}

pub fn window_rect(field: &str, w: [f64; 4]) -> Result<Rect, LabError> {
    if w.iter().any(|v| !v.is_finite()) || !(w[0] < w[1] && w[2] < w[3]) {
        return Err(bad(field, "window must be [x_min, x_max, y_min, y_max] with x_min < x_max, y_min < y_max"));
    }
    Ok(Rect::new(w[0], w[1], w[2], w[3]))
}

fn check_ladder(field: &str, radii: &Option<Vec<f64>>, multiples: &Option<Vec<u32>>) -> Result<(), LabError> {
    match (radii, multiples) {
        (Some(_), Some(_)) => Err(bad(field, "give either `radii` or `multiples`, not both")),
        (Some(r), None) => {
            if r.is_empty() || r.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(bad(field, "radii must be positive"));
            }
            if r.windows(2).any(|w| w[1] >= w[0]) {
                return Err(bad(field, "radii must be strictly decreasing"));
            }
            Ok(())
        }
        (None, Some(m)) => {
            let mut s = m.clone();
            s.sort_unstable();
            s.dedup();
            if m.is_empty() || m.contains(&0) || s.len() != m.len() {
                return Err(bad(field, "multiples must be distinct positive integers"));
            }
            Ok(())
        }
        (None, None) => Ok(()),
    }
}

impl ProblemConfig {
    pub fn lambdas(&self) -> Result<SourceStrengths, LabError> {
        SourceStrengths::new(self.lambda_plus, self.lambda_minus)
            .map_err(|e| bad("problem.lambda_plus/lambda_minus", e))
    }

    pub fn grid(&self) -> Result<Grid2D, LabError> {
        Grid2D::new(self.x_min, self.x_max, self.y_min, self.y_max, self.nx, self.ny)
            .map_err(|e| bad("problem", e))
    }

    pub fn tol_zero(&self) -> f64 {
        self.tol_zero
            .unwrap_or(1e-10 * (self.lambda_plus + self.lambda_minus))
    }

    pub fn boundary_data(&self) -> Result<BoundaryData, LabError> {
        let lambdas = self.lambdas()?;
        let grid = self.grid()?;
        let field = "problem.boundary";
        let profile = |b1, b2, tau, theta| {
            GlobalProfile::new(b1, b2, tau, theta, lambdas).map_err(|e| bad(field, e))
        };
        let data = match self.boundary {
            BoundaryConfig::Profile { beta1, beta2, tau, theta } => {
                profile_boundary_trace(&profile(beta1, beta2, tau, theta)?, grid)
            }
            BoundaryConfig::Polynomial {
                phase,
                coefficients,
                split,
                angle,
            } => {
                let poly = match (coefficients, split) {
                    (Some(_), Some(_)) => return Err(bad(field, "give either `coefficients` or `split`, not both")),
                    (Some([a, b, c]), None) => OnePhasePolynomial::new(a, b, c, phase.into(), lambdas),
                    (None, Some(s)) => OnePhasePolynomial::from_shape(phase.into(), lambdas, s, angle),
                    (None, None) => Ok(OnePhasePolynomial::radial(phase.into(), lambdas)),
                }
                .map_err(|e| bad(field, e))?;
                profile_boundary_trace(&poly, grid)
            }
            BoundaryConfig::PerturbedProfile {
                beta1,
                beta2,
                tau,
                theta,
                perturbation,
                amplitude,
                wavenumber,
            } => {
                if !amplitude.is_finite() || !wavenumber.is_finite() {
                    return Err(bad(field, "amplitude and wavenumber must be finite"));
                }
                profile_boundary_trace(&profile(beta1, beta2, tau, theta)?, grid)
                    .and_then(|d| d.perturbed(|p| amplitude * perturbation.eval(wavenumber, p)))
            }
        };
        data.map_err(|e| bad(field, e))
    }

    pub fn spec(&self) -> Result<ProblemSpec, LabError> {
        let mut spec = ProblemSpec::new(self.lambdas()?, self.boundary_data()?);
        spec.tol_linear = self.tol_linear;
        spec.max_sweeps = self.max_sweeps;
        spec.tol_zero = self.tol_zero();
        spec.validate().map_err(|e| bad("problem", e))?;
        Ok(spec)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), LabError> {
        let spec = self.problem.spec()?;
        let h = spec.grid().h();
        for (k, d) in self.diagnostics.iter().enumerate() {
            let field = format!("diagnostics[{k}] ({})", d.kind());
            match d {
                DiagnosticConfig::PhiLadder {
                    center,
                    radii,
                    multiples,
                    nq,
                    tol_mono,
                    ..
                }
                | DiagnosticConfig::PsiLadder {
                    center,
                    radii,
                    multiples,
                    nq,
                    tol_mono,
                    ..
                } => {
                    finite_point(&field, *center)?;
                    check_ladder(&field, radii, multiples)?;
                    if *nq < 4 {
                        return Err(bad(&field, "nq must be at least 4"));
                    }
                    if !(tol_mono.is_finite() && *tol_mono >= 0.0) {
                        return Err(bad(&field, "tol_mono must be non-negative"));
                    }
                    if let DiagnosticConfig::PsiLadder { direction, .. } = d {
                        let e = finite_point(&field, *direction)?;
                        if (e.norm() - 1.0).abs() > 1e-9 {
                            return Err(bad(&field, "direction must be a unit vector"));
                        }
                    }
                }
                DiagnosticConfig::Classify {
                    points, radii, multiples, ..
                } => {
                    if points.is_empty() {
                        return Err(bad(&field, "no points to classify"));
                    }
                    for p in points {
                        finite_point(&field, *p)?;
                    }
                    check_ladder(&field, radii, multiples)?;
                }
                DiagnosticConfig::Graphs { point, window, .. } => {
                    finite_point(&field, *point)?;
                    if !(window.is_finite() && *window >= 8.0 * h) {
                        return Err(bad(&field, format!("window must be at least 8h = {}", 8.0 * h)));
                    }
                }
                DiagnosticConfig::Xi {
                    center,
                    radius,
                    samples,
                    tol,
                    rotation,
                    ..
                } => {
                    finite_point(&field, *center)?;
                    if !(radius.is_finite() && *radius > 0.0) || !rotation.is_finite() {
                        return Err(bad(&field, "radius must be positive"));
                    }
                    if *samples < 4 || samples % 2 != 0 {
                        return Err(bad(&field, "samples must be even and at least 4"));
                    }
                    if !(tol.is_finite() && *tol >= 0.0) {
                        return Err(bad(&field, "tol must be non-negative"));
                    }
                }
                DiagnosticConfig::Perimeter { window, tolerance, .. } => {
                    if let Some(w) = window {
                        window_rect(&field, *w)?;
                    }
                    if tolerance.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
                        return Err(bad(&field, "tolerance must be non-negative"));
                    }
                }
                DiagnosticConfig::Covering {
                    window, eps, multiples, ..
                } => {
                    if let Some(w) = window {
                        window_rect(&field, *w)?;
                    }
                    if eps.is_some() && multiples.is_some() {
                        return Err(bad(&field, "give either `eps` or `multiples`, not both"));
                    }
                    if let Some(e) = eps {
                        if e.is_empty() || e.iter().any(|v| !(v.is_finite() && *v >= 2.0 * h)) {
                            return Err(bad(&field, format!("eps values must be at least 2h = {}", 2.0 * h)));
                        }
                    }
                    if let Some(m) = multiples {
                        if m.is_empty() || m.iter().any(|v| *v < 2) {
                            return Err(bad(&field, "multiples must be at least 2"));
                        }
                    }
                }
            }
        }
        if let Some(s) = &self.sweep {
            if s.amplitudes.is_empty() {
                return Err(bad("sweep.amplitudes", "at least one amplitude is required"));
            }
            if s.amplitudes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                return Err(bad("sweep.amplitudes", "amplitudes must be positive"));
            }
            if s.amplitudes.windows(2).any(|w| w[1] >= w[0]) {
                return Err(bad("sweep.amplitudes", "amplitudes must be strictly decreasing"));
            }
            if !s.wavenumber.is_finite() {
                return Err(bad("sweep.wavenumber", "must be finite"));
            }
            for p in &s.graph_points {
                finite_point("sweep.graph_points", *p)?;
            }
            if !(s.graph_window.is_finite() && s.graph_window >= 8.0 * h) {
                return Err(bad("sweep.graph_window", format!("must be at least 8h = {}", 8.0 * h)));
            }
            if s.precheck_spacing == 0 {
                return Err(bad("sweep.precheck_spacing", "must be positive"));
            }
            if s.densify.is_some_and(|d| !(d.is_finite() && d > 0.0)) {
                return Err(bad("sweep.densify", "must be positive"));
            }
        }
        Ok(())
    }
}
