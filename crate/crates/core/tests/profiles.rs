//! Distance searches against independent brute-force oracles.

use membrane_core::profiles::{dist_to_m, dist_to_mstar, GlobalProfile, SearchOptions};
use membrane_core::{Grid2D, MStarBounds, Point, ScalarField, SourceStrengths};
use proptest::prelude::*;

fn two() -> SourceStrengths {
    SourceStrengths::symmetric_two()
}

/// Grid nodes inside the closed unit disk with their values.
fn disk(f: &ScalarField) -> Vec<(f64, f64, f64)> {
    let g = f.grid();
    let mut out = Vec::new();
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let p = g.node(i, j);
            if p.x * p.x + p.y * p.y <= 1.0 + 1e-12 {
                out.push((p.x, p.y, f.get(i, j)));
            }
        }
    }
    out
}

fn member(b1: f64, b2: f64, tau: f64, s: f64) -> f64 {
    // λ± = 2
    let pos = s.max(0.0);
    let neg = (s - tau).min(0.0);
    b1 * 0.5 * (pos * pos - neg * neg) + b2 * s
}

/// Exhaustive search over a 200-step grid of every feasible
/// `(β₁, β₂, τ)` of `M*` with `a = b = 4`, `c = 0.05`: the feasible set is
/// the union of the `τ = 0` and `β₂ = 0` slices, and infeasible `β₁ + β₂ < c`
/// points are replaced by their projection onto `β₁ + β₂ = c`.
fn brute_mstar(pts: &[(f64, f64, f64)], theta: f64) -> f64 {
    let (c, s) = (theta.cos(), theta.sin());
    let ts: Vec<f64> = pts.iter().map(|(x, y, _)| c * x - s * y).collect();
    let sup = |b1: f64, b2: f64, tau: f64, best: f64| {
        let mut w = 0.0_f64;
        for (t, (_, _, f)) in ts.iter().zip(pts) {
            w = w.max((member(b1, b2, tau, *t) - f).abs());
            if w >= best {
                break;
            }
        }
        w
    };
    let n = 200;
    let mut best = f64::INFINITY;
    for i in 0..=n {
        for j in 0..=n {
            let b2 = 4.0 * j as f64 / n as f64;
            let b1 = (4.0 * i as f64 / n as f64).max(0.05 - b2);
            best = best.min(sup(b1, b2, 0.0, best));
            let b1 = 0.05 + (4.0 - 0.05) * i as f64 / n as f64;
            let tau = -(j as f64) / n as f64;
            best = best.min(sup(b1, 0.0, tau, best));
        }
    }
    best
}

fn opts() -> SearchOptions {
    SearchOptions::default()
}

#[test]
fn quarter_turn_member_matches_brute_force() {
    let g = Grid2D::centered_square(1.0, 65).unwrap();
    let f = ScalarField::from_fn(g, |p| member(1.0, 0.0, 0.0, -p.y)).unwrap();
    let fit = dist_to_mstar(&f, MStarBounds::default(), two(), &opts()).unwrap();
    let oracle = brute_mstar(&disk(&f), 0.0);
    assert!((fit.distance - oracle).abs() <= 1e-3, "{} vs {oracle}", fit.distance);
    assert!((oracle - 0.5).abs() < 1e-3);
}

#[test]
fn zero_field_distance_is_smallest_profile() {
    let g = Grid2D::centered_square(1.0, 65).unwrap();
    let f = ScalarField::zeros(g);
    let pts = disk(&f);
    let oracle = brute_mstar(&pts, 0.0);
    assert!((oracle - 0.025).abs() < 1e-9);
    let fit = dist_to_mstar(&f, MStarBounds::default(), two(), &opts()).unwrap();
    assert!((fit.distance - oracle).abs() <= 1e-3);
    // rotation invariant data: the rotation adds nothing beyond node
    // anisotropy of the disk sampling
    let fit = dist_to_m(&f, MStarBounds::default(), two(), &opts()).unwrap();
    assert!((fit.distance - oracle).abs() <= 1e-3, "{}", fit.distance);
}

#[test]
fn radial_polynomial_is_strictly_away_from_m() {
    let g = Grid2D::centered_square(1.0, 65).unwrap();
    let f = ScalarField::from_fn(g, |p| 0.25 * (p.x * p.x + p.y * p.y)).unwrap();
    let pts = disk(&f);
    let oracle = brute_mstar(&pts, 0.0);
    let fit = dist_to_mstar(&f, MStarBounds::default(), two(), &opts()).unwrap();
    assert!((fit.distance - oracle).abs() <= 1e-3, "{} vs {oracle}", fit.distance);
    let fit = dist_to_m(&f, MStarBounds::default(), two(), &opts()).unwrap();
    assert!(fit.distance > 0.1);
    assert!((fit.distance - oracle).abs() <= 1e-3, "{} vs {oracle}", fit.distance);
}

#[test]
fn rotated_slab_member_is_recovered() {
    let g = Grid2D::centered_square(1.0, 33).unwrap();
    let v = GlobalProfile::new(1.2, 0.0, -0.35, -2.0, two()).unwrap();
    let f = ScalarField::sample_from(g, &v).unwrap();
    let fit = dist_to_m(&f, MStarBounds::default(), two(), &opts()).unwrap();
    assert!(fit.distance <= 1e-4, "{}", fit.distance);
    assert!((fit.profile.theta() + 2.0).abs() < 2.0 * std::f64::consts::PI / 360.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn members_of_mstar_have_tiny_distance(b1 in 0.2f64..3.0, b2 in 0.0f64..2.0, tau in -1.0f64..0.0, slab in any::<bool>()) {
        let g = Grid2D::centered_square(1.0, 33).unwrap();
        let v = if slab {
            GlobalProfile::new(b1, 0.0, tau, 0.0, two()).unwrap()
        } else {
            GlobalProfile::new(b1, b2, 0.0, 0.0, two()).unwrap()
        };
        let f = ScalarField::sample_from(g, &v).unwrap();
        let fit = dist_to_mstar(&f, MStarBounds::default(), two(), &opts()).unwrap();
        prop_assert!(fit.distance <= 1e-6, "{}", fit.distance);
    }

    #[test]
    fn distance_to_m_is_rotation_invariant(
        b1 in 0.2f64..2.0, tau in -0.8f64..0.0, theta in -3.0f64..3.0, amp in 0.0f64..0.05, quarter in 1u32..4,
    ) {
        let g = Grid2D::centered_square(1.0, 33).unwrap();
        let v = GlobalProfile::new(b1, 0.0, tau, theta, two()).unwrap();
        let bump = |p: Point| amp * (3.0 * p.x + p.y).sin();
        let f = ScalarField::from_fn(g, |p| v.eval(p) + bump(p)).unwrap();
        // quarter turns map grid nodes onto grid nodes
        let phi = std::f64::consts::FRAC_PI_2 * quarter as f64;
        let fr = ScalarField::from_fn(g, |p| {
            let q = p.rotate(-phi);
            v.eval(q) + bump(q)
        }).unwrap();
        let d0 = dist_to_m(&f, MStarBounds::default(), two(), &opts()).unwrap().distance;
        let d1 = dist_to_m(&fr, MStarBounds::default(), two(), &opts()).unwrap().distance;
        prop_assert!((d0 - d1).abs() <= 2e-3, "{} vs {}", d0, d1);
    }
}
