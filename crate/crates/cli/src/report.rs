//! JSON shapes shared by the subcommands.

use crate::config::RunConfig;
use nalgebra::{DMatrix, DVector};
use scarot_core::inference::{ConfidenceRegion, FrameReport};
use scarot_core::{Certificate, EigenDecomp, SpdMatrix};
use serde_json::{json, Value};

pub fn matrix(m: &DMatrix<f64>) -> Value {
    Value::from(m.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn vector(v: &DVector<f64>) -> Value {
    Value::from(v.as_slice().to_vec())
}

pub fn spd(x: &SpdMatrix) -> Value {
    matrix(x.matrix())
}

pub fn decomposition(m: &EigenDecomp) -> Value {
    json!({
        "rotation": matrix(m.rotation().matrix()),
        "eigenvalues": vector(&m.diag().values()),
        "matrix": spd(&m.compose()),
    })
}

/// Wraps a payload with the library version and the configuration.
pub fn envelope(command: &str, config: &RunConfig, body: Value) -> Value {
    let mut out = json!({
        "command": command,
        "version": scarot_core::VERSION,
        "config": config,
    });
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    out
}

pub fn certificate(kind: &str, c: scarot_core::Result<Certificate>) -> Value {
    match c {
        Ok(c) => serde_json::to_value(c).expect("certificate serializes"),
        Err(e) => json!({ "kind": kind, "error": e.to_string() }),
    }
}

fn region(r: &ConfidenceRegion) -> Value {
    json!({
        "center": vector(&r.center),
        "covariance": matrix(&r.cov),
        "threshold": r.threshold,
        "rank": r.rank,
        "pseudo_inverse": r.pseudo_inverse,
    })
}

pub fn frame(f: &FrameReport) -> Value {
    json!({
        "frame": f.frame,
        "means": [vector(&f.means[0]), vector(&f.means[1])],
        "covariances": [matrix(&f.covs[0]), matrix(&f.covs[1])],
        "regions": [region(&f.regions[0]), region(&f.regions[1])],
        "statistic": f.statistic,
        "dof": f.dof,
        "p_value": f.p_value,
        "separated": f.separated,
        "mean1_in_region2": f.mean1_in_region2,
        "mean2_in_region1": f.mean2_in_region1,
    })
}
