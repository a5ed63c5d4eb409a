//! Free-boundary extraction, classification, graph fits, reflection and
//! measure estimates.

use std::f64::consts::{FRAC_PI_2, PI};

use membrane_core::freeboundary::{
    circle_trace, classify_point, covering_count, extract_free_boundary, fit_two_graphs, perimeter_estimate,
    reflection_xi, AngularSamples, ClassifyThresholds, FreeBoundarySet, PointKind,
};
use membrane_core::monotonicity::RadiusLadder;
use membrane_core::profiles::{GlobalProfile, OnePhasePolynomial, Phase, SearchOptions};
use membrane_core::solver::{solve, ProblemSpec};
use membrane_core::{BoundaryData, Grid2D, Point, PointSampler, Rect, ScalarField, SourceStrengths};
use proptest::prelude::*;

fn two() -> SourceStrengths {
    SourceStrengths::symmetric_two()
}

fn solved_1d(n: usize) -> ScalarField {
    let g = Grid2D::centered_square(1.0, n).unwrap();
    let spec = ProblemSpec::new(two(), BoundaryData::from_fn(g, |p| 0.5 * p.x * p.x.abs()).unwrap());
    solve(&spec).unwrap().0
}

/// Independent greedy cover of densely resampled curve points: a point
/// opens a new ball unless an existing center is within `eps`.
fn brute_cover(fb: &FreeBoundarySet, eps: f64) -> usize {
    let mut pts = Vec::new();
    for (_, line) in fb.polylines() {
        let mut segs: Vec<(Point, Point)> = line.points.windows(2).map(|w| (w[0], w[1])).collect();
        if line.closed {
            segs.push((*line.points.last().unwrap(), line.points[0]));
        }
        for (a, b) in segs {
            let k = ((a.dist(b) / (eps / 64.0)).ceil() as usize).max(1);
            for i in 0..k {
                pts.push(a + (b - a) * (i as f64 / k as f64));
            }
        }
    }
    let mut centers: Vec<Point> = Vec::new();
    for p in pts {
        if centers.iter().all(|c| c.dist(p) > eps) {
            centers.push(p);
        }
    }
    centers.len()
}

#[test]
fn circle_covering_matches_brute_force() {
    let g = Grid2D::centered_square(1.0, 257).unwrap();
    let u = ScalarField::from_fn(g, |p| 0.25 - p.dot(p)).unwrap();
    let fb = extract_free_boundary(&u, 1e-10);
    let window = g.bounds();
    for eps in [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0] {
        let n = covering_count(&fb, eps, &window).unwrap();
        let ne = n as f64 * eps;
        assert!((PI / 1.2..=1.2 * PI * 1.3).contains(&ne), "{eps}: {ne}");
        let brute = brute_cover(&fb, eps) as f64 * eps;
        assert!((PI / 1.2..=1.2 * PI * 1.3).contains(&brute), "{eps}: {brute}");
        // both are greedy covers of the same curve; they differ only in
        // visiting order and center placement
        assert!((ne - brute).abs() <= 0.25 * brute, "{ne} vs {brute}");
    }
}

#[test]
fn covering_halving_ratio() {
    let g = Grid2D::centered_square(1.0, 257).unwrap();
    let u = ScalarField::from_fn(g, |p| 0.3 - p.x * p.x - 2.0 * p.y * p.y + 0.2 * p.x).unwrap();
    let fb = extract_free_boundary(&u, 1e-10);
    let window = g.bounds();
    let mut eps = 0.25;
    while eps >= 2.0 * g.h() * 2.0 {
        let n1 = covering_count(&fb, eps, &window).unwrap();
        let n2 = covering_count(&fb, eps / 2.0, &window).unwrap();
        assert!(n2 as f64 <= 2.5 * n1 as f64, "{eps}: {n1} {n2}");
        eps /= 2.0;
    }
}

#[test]
fn solved_field_measures() {
    let u = solved_1d(129);
    let g = *u.grid();
    let h = g.h();
    let window = g.bounds();
    let tol_zero = 1e-10 * two().sum();
    let per = perimeter_estimate(&u, &window, tol_zero).unwrap();
    assert!((per.plus - 2.0).abs() <= 2.0 * h, "{per:?}");
    assert!((per.minus - 2.0).abs() <= 2.0 * h, "{per:?}");
    let fb = extract_free_boundary(&u, tol_zero);
    for k in [8.0, 16.0, 32.0] {
        let eps = k * h;
        let n = covering_count(&fb, eps, &window).unwrap();
        assert!(n as f64 * eps <= 4.0, "{k}: {n}");
    }
    // extraction consistency with the Lipschitz constant of u on the square
    for q in fb.vertices() {
        assert!(u.interpolate(q).unwrap().abs() <= tol_zero + 1.0 * h);
    }
}

#[test]
fn solved_field_graphs() {
    let u = solved_1d(129);
    let h = u.grid().h();
    let fit = fit_two_graphs(&u, Point::ORIGIN, 0.5, 1e-10 * two().sum(), two(), &SearchOptions::default()).unwrap();
    // the frame axis is ±x₁
    assert!(fit.direction.x.abs() > 1.0 - 1e-3, "{:?}", fit.direction);
    assert!(fit.gplus.iter().chain(&fit.gminus).all(|g| g.abs() <= 2.0 * h));
    assert!(fit.gminus.iter().zip(&fit.gplus).all(|(a, b)| a <= b));
    assert!(fit.lipschitz_estimate <= 0.1);
    assert!(fit.max_normal_oscillation <= 0.2);
}

#[test]
fn rotated_profile_graph_direction() {
    let g = Grid2D::centered_square(1.0, 129).unwrap();
    let v = GlobalProfile::two_phase(two()).rotated(0.3);
    let u = ScalarField::sample_from(g, &v).unwrap();
    let h = g.h();
    let fit = fit_two_graphs(&u, Point::ORIGIN, 0.5, 1e-10, two(), &SearchOptions::default()).unwrap();
    let d = (fit.theta - 0.3).rem_euclid(PI);
    assert!(d.min(PI - d) <= 2.0 * PI / 360.0, "{}", fit.theta);
    assert!(fit.gplus.iter().chain(&fit.gminus).all(|g| g.abs() <= 2.0 * h));
    // τ = 0: no plateau, the two graphs coincide up to the contour offset
    assert!(fit.gminus.iter().zip(&fit.gplus).all(|(a, b)| a <= b && b - a <= 1e-6));
}

fn rotated_field(g: Grid2D, s: &impl PointSampler, phi: f64, scale: f64) -> ScalarField {
    ScalarField::from_fn(g, |p| scale * s.sample(p.rotate(-phi)).unwrap()).unwrap()
}

/// Quarter turns map nodes onto nodes and scaling `u`, `λ` together keeps
/// every decision.
#[test]
fn classification_is_invariant() {
    let g = Grid2D::centered_square(1.0, 129).unwrap();
    let h = g.h();
    let branch = GlobalProfile::two_phase(two());
    let singular = OnePhasePolynomial::from_shape(Phase::Negative, two(), 0.3, 0.4).unwrap();
    let cases: [(&dyn PointSampler, Point, PointKind); 2] = [
        (&branch, Point::new(0.0, 0.25), PointKind::Branch),
        (&singular, Point::ORIGIN, PointKind::OnePhaseSingular),
    ];
    for (s, p, kind) in cases {
        for quarter in 0..4 {
            let phi = FRAC_PI_2 * quarter as f64;
            for scale in [1.0, 0.5, 3.0] {
                let lambdas = two().scaled(scale).unwrap();
                let u = rotated_field(g, &s, phi, scale);
                let q = p.rotate(phi);
                let q = Point::new((q.x / h).round() * h, (q.y / h).round() * h);
                let ladder = RadiusLadder::grid_multiples(q, h, &[32, 16, 8]).unwrap();
                let th = ClassifyThresholds::defaults(h, lambdas);
                let c = classify_point(&u, &ladder, lambdas, &th).unwrap();
                assert_eq!(c.kind, kind, "quarter {quarter} scale {scale}: {:?}", c.evidence);
                if kind == PointKind::Branch {
                    assert!(c.evidence.psi.iter().all(|(_, v)| *v <= th.tol_psi));
                }
            }
        }
    }
}

#[test]
fn reflection_of_rotated_profile_matches_closed_form() {
    let v = GlobalProfile::two_phase(two());
    let gamma = -0.3;
    let m = 720;
    let phi = circle_trace(&v.rotated(gamma), Point::ORIGIN, 0.0, 1.0, m).unwrap();
    let xi = reflection_xi(&phi).unwrap();
    // φ₀(θ) = ½cos θ|cos θ| / S₁ with S₁² = 3π/16
    let s1 = (3.0 * PI / 16.0).sqrt();
    let phi0 = |t: f64| 0.5 * t.cos() * t.cos().abs() / s1;
    assert_eq!(xi.values[0], 0.0);
    assert_eq!(*xi.values.last().unwrap(), 0.0);
    for (t, x) in xi.thetas.iter().zip(&xi.values) {
        let exact = phi0(gamma + t) - phi0(gamma - t);
        assert!((x - exact).abs() <= 1e-6, "{t}: {x} vs {exact}");
        assert!(*x >= -1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn xi_is_antisymmetric_under_reflection(values in proptest::collection::vec(-3.0f64..3.0, 1..40)) {
        let m = 2 * values.len();
        let mut full = values.clone();
        full.extend(values.iter().rev().map(|v| v * 0.7 + 0.1));
        let phi = AngularSamples {
            r: 1.0,
            thetas: (0..m).map(|k| -PI + 2.0 * PI * k as f64 / m as f64).collect(),
            values: full,
        };
        let a = reflection_xi(&phi).unwrap();
        let b = reflection_xi(&phi.reflected()).unwrap();
        prop_assert_eq!(a.values[0], 0.0);
        prop_assert_eq!(*a.values.last().unwrap(), 0.0);
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn extracted_vertices_lie_on_the_level_sets(
        a in -1.0f64..1.0, b in -1.0f64..1.0, c in -0.5f64..0.5, k in 1.0f64..4.0, tol_zero in 0.0f64..0.05,
    ) {
        let g = Grid2D::centered_square(1.0, 49).unwrap();
        let f = |p: Point| a * (k * p.x).sin() + b * (k * p.y).cos() + c;
        let u = ScalarField::from_fn(g, f).unwrap();
        let lip = k * (a.abs() + b.abs());
        let fb = extract_free_boundary(&u, tol_zero);
        for q in fb.vertices() {
            prop_assert!(u.interpolate(q).unwrap().abs() <= tol_zero + lip * g.h() + 1e-12);
        }
        // window diameter bound on the covering product
        let window = g.bounds();
        for eps in [8.0 * g.h(), 16.0 * g.h()] {
            let n = covering_count(&fb, eps, &window).unwrap();
            prop_assert!(n as f64 * eps <= 4.0 * window.diameter() * (fb.polylines().count().max(1) as f64));
        }
    }
}

#[test]
fn slab_boundaries_are_two_curves() {
    let g = Grid2D::centered_square(1.0, 129).unwrap();
    let u = ScalarField::sample_from(g, &GlobalProfile::new(1.0, 0.0, -0.4, 0.0, two()).unwrap()).unwrap();
    let h = g.h();
    let fit = fit_two_graphs(&u, Point::new(-0.2, 0.0), 1.0, 1e-10, two(), &SearchOptions::default()).unwrap();
    assert!(fit.gplus.iter().all(|v| (v - 0.2).abs() <= 2.0 * h));
    assert!(fit.gminus.iter().all(|v| (v + 0.2).abs() <= 2.0 * h));
    let window = Rect::new(-1.0, 1.0, -1.0, 1.0);
    let per = perimeter_estimate(&u, &window, 1e-10).unwrap();
    assert!((per.plus - 2.0).abs() <= 2.0 * h && (per.minus - 2.0).abs() <= 2.0 * h);
}
