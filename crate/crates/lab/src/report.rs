//! JSON views of core results.

use membrane_core::freeboundary::{GraphFit, PointClass};
use membrane_core::profiles::{GlobalProfile, Phase};
use membrane_core::solver::SolveReport;
use membrane_core::Point;
use serde_json::{json, Value};

use crate::output::num;

pub fn point(p: Point) -> Value {
    json!([num(p.x), num(p.y)])
}

pub fn solve_report(r: &SolveReport) -> Value {
    json!({
        "iterations": r.iterations,
        "final_energy": num(r.final_energy),
        "final_residual": num(r.final_residual),
        "pattern_changes": r.pattern_changes,
        "energies": r.energies.iter().map(|e| num(*e)).collect::<Vec<_>>(),
        "damped_sweeps": r.damped_sweeps,
        "cg_iterations": r.cg_iterations,
    })
}

fn profile(p: &GlobalProfile) -> Value {
    json!({
        "beta1": num(p.beta1()),
        "beta2": num(p.beta2()),
        "tau": num(p.tau()),
        "theta": num(p.theta()),
    })
}

pub fn classification(c: &PointClass) -> Value {
    let ev = &c.evidence;
    json!({
        "point": point(c.point),
        "class": c.kind.as_str(),
        "evidence": {
            "gradient_norm": num(ev.gradient_norm),
            "psi": ev.psi.iter().map(|(e, v)| json!({"direction": point(*e), "value": num(*v)})).collect::<Vec<_>>(),
            "dist_to_m": ev.dist_to_m.map(num),
            "fitted_profile": ev.fitted_profile.as_ref().map(profile),
            "dist_to_polynomials": ev.dist_to_polynomials.map(num),
            "fitted_polynomial": ev.fitted_polynomial.map(|f| json!({
                "phase": match f.phase { Phase::Positive => "positive", Phase::Negative => "negative" },
                "split": num(f.split),
                "angle": num(f.angle),
            })),
        },
    })
}

fn range(v: &[f64]) -> Value {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    json!([num(lo), num(hi)])
}

/// Metrics only.
pub fn graph_summary(g: &GraphFit) -> Value {
    json!({
        "direction": point(g.direction),
        "theta": num(g.theta),
        "lipschitz_estimate": num(g.lipschitz_estimate),
        "max_normal_oscillation": num(g.max_normal_oscillation),
        "fit_distance": num(g.fit_distance),
        "gplus_range": range(&g.gplus),
        "gminus_range": range(&g.gminus),
    })
}

/// Metrics plus the sampled graphs.
pub fn graph_fit(g: &GraphFit) -> Value {
    let mut v = graph_summary(g);
    v["t"] = g.t.iter().map(|x| num(*x)).collect();
    v["gplus"] = g.gplus.iter().map(|x| num(*x)).collect();
    v["gminus"] = g.gminus.iter().map(|x| num(*x)).collect();
    v
}
