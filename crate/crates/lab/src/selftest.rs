//! A quick oracle suite on small grids, runnable from the binary.

use std::f64::consts::PI;

use membrane_core::freeboundary::{circle_trace, perimeter_estimate, reflection_xi};
use membrane_core::monotonicity::{acf_psi, s_norm, weiss_phi, DEFAULT_NQ};
use membrane_core::profiles::{profile_boundary_trace, GlobalProfile, OnePhasePolynomial, Phase};
use membrane_core::solver::{comparison_check, solve, ProblemSpec};
use membrane_core::{Grid2D, Point, ScalarField, SourceStrengths};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, value: f64, want: f64, tol: f64) -> Check {
    let err = (value - want).abs();
    Check {
        name,
        pass: err <= tol,
        detail: format!("value {value:.10e}, expected {want:.10e}, error {err:.3e} (tol {tol:.1e})"),
    }
}

fn failed(name: &'static str, e: impl std::fmt::Display) -> Check {
    Check {
        name,
        pass: false,
        detail: e.to_string(),
    }
}

fn run_check(name: &'static str, f: impl FnOnce() -> membrane_core::Result<Check>) -> Check {
    f().unwrap_or_else(|e| failed(name, e))
}

pub fn run() -> Vec<Check> {
    let two = SourceStrengths::symmetric_two();
    let profile = GlobalProfile::two_phase(two);
    vec![
        run_check("polynomial data reproduced", || {
            let g = Grid2D::centered_square(1.0, 33)?;
            let p = OnePhasePolynomial::radial(Phase::Positive, two);
            let (u, _) = solve(&ProblemSpec::new(two, profile_boundary_trace(&p, g)?))?;
            let exact = ScalarField::sample_from(g, &p)?;
            Ok(check("polynomial data reproduced", u.max_abs_diff(&exact)?, 0.0, 1e-8))
        }),
        run_check("1-D profile within 5h^2", || {
            let g = Grid2D::centered_square(1.0, 65)?;
            let (u, _) = solve(&ProblemSpec::new(two, profile_boundary_trace(&profile, g)?))?;
            let exact = ScalarField::sample_from(g, &profile)?;
            Ok(check("1-D profile within 5h^2", u.max_abs_diff(&exact)?, 0.0, 5.0 * g.h() * g.h()))
        }),
        run_check("Weiss functional pi/8", || {
            let u = ScalarField::sample_from(Grid2D::centered_square(1.0, 129)?, &profile)?;
            let phi = weiss_phi(&u, Point::ORIGIN, 0.5, two, DEFAULT_NQ)?;
            Ok(check("Weiss functional pi/8", phi, PI / 8.0, 1e-2 * PI / 8.0))
        }),
        run_check("ACF functional pi^2/4", || {
            let g = Grid2D::centered_square(1.5, 385)?;
            let h1 = ScalarField::from_fn(g, |p| p.x.max(0.0))?;
            let h2 = ScalarField::from_fn(g, |p| (-p.x).max(0.0))?;
            let psi = acf_psi(&h1, &h2, Point::ORIGIN, 1.0, DEFAULT_NQ)?;
            Ok(check("ACF functional pi^2/4", psi, PI * PI / 4.0, 1e-2 * PI * PI / 4.0))
        }),
        run_check("circle norm S_1", || {
            let u = ScalarField::sample_from(Grid2D::centered_square(1.25, 161)?, &profile)?;
            let s = s_norm(&u, Point::ORIGIN, 1.0, DEFAULT_NQ)?;
            let want = (3.0 * PI / 16.0).sqrt();
            Ok(check("circle norm S_1", s, want, 5e-3 * want))
        }),
        run_check("reflection of rotated profile", || {
            let gamma = -0.3;
            let phi = circle_trace(&profile.rotated(gamma), Point::ORIGIN, 0.0, 1.0, 720)?;
            let xi = reflection_xi(&phi)?;
            let s1 = (3.0 * PI / 16.0).sqrt();
            let phi0 = |t: f64| 0.5 * t.cos() * t.cos().abs() / s1;
            let err = xi
                .thetas
                .iter()
                .zip(&xi.values)
                .map(|(t, v)| (v - (phi0(gamma + t) - phi0(gamma - t))).abs())
                .fold(0.0, f64::max);
            Ok(check("reflection of rotated profile", err, 0.0, 1e-6))
        }),
        run_check("perimeter of a circle", || {
            let g = Grid2D::centered_square(1.0, 129)?;
            let u = ScalarField::from_fn(g, |p| 0.25 - p.dot(p))?;
            let per = perimeter_estimate(&u, &g.bounds(), 1e-10)?;
            Ok(check("perimeter of a circle", per.plus, PI, 0.02 * PI))
        }),
        run_check("comparison under constant shift", || {
            let g = Grid2D::centered_square(1.0, 33)?;
            let spec = ProblemSpec::new(two, profile_boundary_trace(&profile, g)?);
            let (u1, _) = solve(&spec)?;
            let shifted = spec.boundary.perturbed(|_| 0.05)?;
            let (u2, _) = solve(&ProblemSpec::new(two, shifted.clone()))?;
            let c = comparison_check(&u1, &u2, &spec.boundary, &shifted, spec.tol_linear)?;
            Ok(Check {
                name: "comparison under constant shift",
                pass: c.holds && c.sup_interior_diff <= 0.05 + 1e-8,
                detail: format!("interior {:.10e}, boundary {:.10e}", c.sup_interior_diff, c.sup_boundary_diff),
            })
        }),
    ]
}
