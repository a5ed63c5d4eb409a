//! CSV and JSON artifacts. Every float is written with 17 significant
//! digits so values round-trip exactly and runs are byte-comparable.

use std::fmt::Write as _;
use std::path::Path;

use membrane_core::freeboundary::FreeBoundarySet;
use membrane_core::monotonicity::MonotonicityProfile;
use membrane_core::profiles::Phase;
use membrane_core::ScalarField;
use serde_json::{Number, Value};

use crate::error::{io_err, LabError};

/// `x` in scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rewrites every floating-point number of `v` with [`fmt17`]; non-finite
/// values become `null`. Integers are left alone.
pub fn normalize_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => match n.as_f64() {
            Some(x) if x.is_finite() => {
                Value::Number(fmt17(x).parse::<Number>().expect("formatted float is a JSON number"))
            }
            _ => Value::Null,
        },
        Value::Array(a) => Value::Array(a.into_iter().map(normalize_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize_floats(v))).collect()),
        other => other,
    }
}

/// Float that may be NaN or infinite, as a JSON value.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn to_json_string(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&normalize_floats(v)).expect("values serialize");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), LabError> {
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn write_json(path: &Path, v: Value) -> Result<(), LabError> {
    write_text(path, &to_json_string(v))
}

pub fn field_csv(u: &ScalarField) -> String {
    let g = u.grid();
    let mut s = String::from("x,y,value\n");
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let p = g.node(i, j);
            let _ = writeln!(s, "{},{},{}", fmt17(p.x), fmt17(p.y), fmt17(u.get(i, j)));
        }
    }
    s
}

pub fn ladder_csv(p: &MonotonicityProfile) -> String {
    let mut s = String::from("r,value,violation_flag\n");
    for ((r, v), flag) in p.ladder.radii().iter().zip(&p.values).zip(p.violation_flags()) {
        let _ = writeln!(s, "{},{},{}", fmt17(*r), fmt17(*v), u8::from(flag));
    }
    s
}

fn phase_name(p: Phase) -> &'static str {
    match p {
        Phase::Positive => "plus",
        Phase::Negative => "minus",
    }
}

/// `phase,component_id,x,y`; closed chains repeat their first vertex last.
pub fn free_boundary_csv(fb: &FreeBoundarySet) -> String {
    let mut s = String::from("phase,component_id,x,y\n");
    for phase in [Phase::Positive, Phase::Negative] {
        for (id, line) in fb.phase(phase).iter().enumerate() {
            let closing = line.closed.then(|| line.points[0]);
            for q in line.points.iter().copied().chain(closing) {
                let _ = writeln!(s, "{},{id},{},{}", phase_name(phase), fmt17(q.x), fmt17(q.y));
            }
        }
    }
    s
}
