use std::time::Instant;

use membrane_core::profiles::{profile_boundary_trace, GlobalProfile, OnePhasePolynomial, Phase};
use membrane_core::solver::{comparison_check, energy, residual_field, solve, ProblemSpec};
use membrane_core::{BoundaryData, Grid2D, Point, ScalarField, SourceStrengths};
use proptest::prelude::*;

fn two() -> SourceStrengths {
    SourceStrengths::symmetric_two()
}

/// `u(x) = ½·x₁|x₁|` written out independently of the library.
fn exact_1d(p: Point) -> f64 {
    0.5 * p.x * p.x.abs()
}

fn bilinear_error(u: &ScalarField, exact: impl Fn(Point) -> f64) -> f64 {
    let g = u.grid();
    let h = g.h();
    let mut worst = 0.0_f64;
    for j in 0..g.ny() - 1 {
        for i in 0..g.nx() - 1 {
            let p = g.node(i, j);
            for (a, b) in [(0.5, 0.5), (0.25, 0.75), (0.75, 0.25)] {
                let q = Point::new(p.x + a * h, p.y + b * h);
                worst = worst.max((u.interpolate(q).unwrap() - exact(q)).abs());
            }
        }
    }
    worst
}

#[test]
fn one_dimensional_profile_at_h_64() {
    let g = Grid2D::new(-1.0, 1.0, -1.0, 1.0, 129, 129).unwrap();
    let spec = ProblemSpec::new(two(), BoundaryData::from_fn(g, exact_1d).unwrap());
    let t = Instant::now();
    let (u, rep) = solve(&spec).unwrap();
    assert!(t.elapsed().as_secs_f64() < 30.0);
    let h = g.h();
    let nodal = ScalarField::from_fn(g, exact_1d).unwrap();
    assert!(u.max_abs_diff(&nodal).unwrap() <= 5.0 * h * h);
    assert!(rep.final_residual <= spec.tol_linear);
    let r = residual_field(&spec, &u).unwrap();
    assert!(r.max_abs() <= spec.tol_linear);
}

#[test]
fn continuum_error_halves_twice_per_refinement() {
    let mut errs = Vec::new();
    for n in [65, 129] {
        let g = Grid2D::centered_square(1.0, n).unwrap();
        let spec = ProblemSpec::new(two(), BoundaryData::from_fn(g, exact_1d).unwrap());
        let (u, _) = solve(&spec).unwrap();
        errs.push(bilinear_error(&u, exact_1d));
    }
    let ratio = errs[0] / errs[1];
    assert!((3.0..=5.0).contains(&ratio), "{errs:?}");
}

#[test]
fn radial_polynomial_is_exact() {
    let g = Grid2D::centered_square(1.0, 129).unwrap();
    let p = OnePhasePolynomial::radial(Phase::Positive, two());
    let spec = ProblemSpec::new(two(), profile_boundary_trace(&p, g).unwrap());
    let (u, _) = solve(&spec).unwrap();
    let want = ScalarField::from_fn(g, |q| 0.25 * q.dot(q)).unwrap();
    assert!(u.max_abs_diff(&want).unwrap() <= 1e-8);
}

fn generic_data(g: Grid2D, a: f64, b: f64, c: f64) -> BoundaryData {
    BoundaryData::from_fn(g, |p| {
        a * p.x + b * (3.0 * p.y).sin() + c * (p.x * p.x - p.y * p.y) + 0.1 * (p.x * p.y)
    })
    .unwrap()
}

#[test]
fn phase_pattern_agrees_with_sign_at_convergence() {
    let g = Grid2D::centered_square(1.0, 49).unwrap();
    let spec = ProblemSpec::new(SourceStrengths::new(1.5, 3.0).unwrap(), generic_data(g, 0.3, 0.2, 0.4));
    let (u, rep) = solve(&spec).unwrap();
    // equation holds with the forcing given by the sign of u
    for j in 1..g.ny() - 1 {
        for i in 1..g.nx() - 1 {
            let v = u.get(i, j);
            let lap = u.discrete_laplacian(i, j).unwrap();
            if v > spec.tol_zero {
                assert!((lap - 0.75).abs() <= spec.tol_linear);
            } else if v < -spec.tol_zero {
                assert!((lap + 1.5).abs() <= spec.tol_linear);
            } else {
                assert!(lap >= -1.5 - spec.tol_linear && lap <= 0.75 + spec.tol_linear);
            }
        }
    }
    for w in rep.energies.windows(2) {
        assert!(w[1] <= w[0] + 1e-10 * (1.0 + w[0].abs()));
    }
    assert!((energy(&spec, &u).unwrap() - rep.final_energy).abs() <= 1e-12 * (1.0 + rep.final_energy.abs()));
}

/// Energy of perturbed fields is never below the solver's minimum.
#[test]
fn solution_minimizes_energy_locally() {
    let g = Grid2D::centered_square(1.0, 33).unwrap();
    let spec = ProblemSpec::new(two(), generic_data(g, 0.5, 0.1, 0.2));
    let (u, rep) = solve(&spec).unwrap();
    let mut seed = 7u64;
    for _ in 0..50 {
        let mut vals = u.values().to_vec();
        for j in 1..g.ny() - 1 {
            for i in 1..g.nx() - 1 {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let r = ((seed >> 33) as f64 / (1u64 << 31) as f64) - 0.5;
                vals[g.index(i, j)] += 1e-3 * r;
            }
        }
        let w = ScalarField::new(g, vals).unwrap();
        assert!(energy(&spec, &w).unwrap() >= rep.final_energy - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn comparison_principle_holds(
        a in -0.5f64..0.5, b in -0.3f64..0.3, c in -0.5f64..0.5,
        shift in -0.05f64..0.05, amp in 0.0f64..0.1, k in 1u32..4,
    ) {
        let g = Grid2D::centered_square(1.0, 25).unwrap();
        let d1 = generic_data(g, a, b, c);
        let d2 = d1.perturbed(|p| shift + amp * (k as f64 * std::f64::consts::PI * p.y).sin()).unwrap();
        let (u1, _) = solve(&ProblemSpec::new(two(), d1.clone())).unwrap();
        let (u2, _) = solve(&ProblemSpec::new(two(), d2.clone())).unwrap();
        let out = comparison_check(&u1, &u2, &d1, &d2, 1e-10).unwrap();
        prop_assert!(out.holds, "{:?}", out);
    }

    #[test]
    fn energies_never_increase(a in -1.0f64..1.0, c in -1.0f64..1.0, lp in 0.5f64..4.0, lm in 0.5f64..4.0) {
        let g = Grid2D::centered_square(1.0, 33).unwrap();
        let spec = ProblemSpec::new(SourceStrengths::new(lp, lm).unwrap(), generic_data(g, a, 0.2, c));
        let (_, rep) = solve(&spec).unwrap();
        for w in rep.energies.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10 * (1.0 + w[0].abs()));
        }
        prop_assert!(rep.final_residual <= spec.tol_linear);
    }
}

#[test]
fn rotated_profile_data_converges() {
    let g = Grid2D::centered_square(1.0, 65).unwrap();
    let v = GlobalProfile::new(1.0, 0.0, -0.3, 0.4, two()).unwrap();
    let spec = ProblemSpec::new(two(), profile_boundary_trace(&v, g).unwrap());
    let (u, rep) = solve(&spec).unwrap();
    let exact = ScalarField::sample_from(g, &v).unwrap();
    assert!(u.max_abs_diff(&exact).unwrap() < 5.0 * g.h());
    assert!(rep.final_residual <= spec.tol_linear);
}

#[test]
fn fine_grid_stops_at_roundoff_level() {
    // at h = 1/256 a 1e-10 residual on Δ_h u is below double precision
    let g = Grid2D::centered_square(1.0, 513).unwrap();
    let tilted = |p: Point| 0.5 * p.x * p.x.abs() + 0.5 * p.x;
    let spec = ProblemSpec::new(two(), BoundaryData::from_fn(g, tilted).unwrap());
    let t = Instant::now();
    let (u, rep) = solve(&spec).unwrap();
    assert!(t.elapsed().as_secs_f64() < 30.0);
    let floor = 64.0 * f64::EPSILON * u.max_abs() / (g.h() * g.h());
    assert!(rep.final_residual <= floor, "{} vs {floor}", rep.final_residual);
    let exact = ScalarField::from_fn(g, tilted).unwrap();
    assert!(u.max_abs_diff(&exact).unwrap() < 1e-9);
}
