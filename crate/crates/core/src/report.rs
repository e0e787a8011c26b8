//! JSON report assembly.
//!
//! Matrices serialize as nested `[re, im]` pairs:
//! `[[[re,im],[re,im]],[[re,im],[re,im]]]`. Every monodromy entry carries
//! the loop hash, sheet, basepoint and integrator settings, so a report is
//! enough to reproduce the run.

use crate::linalg::Mat2;
use crate::transport::{IntegratorConfig, MonodromyResult};
use num_complex::Complex64;
use serde_json::{json, Value};

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn mat2_json(m: &Mat2) -> Value {
    json!([
        [complex_json(m.0[0][0]), complex_json(m.0[0][1])],
        [complex_json(m.0[1][0]), complex_json(m.0[1][1])]
    ])
}

pub fn integrator_json(cfg: &IntegratorConfig) -> Value {
    json!({
        "rel_tol": cfg.rel_tol,
        "abs_tol": cfg.abs_tol,
        "max_steps": cfg.max_steps,
    })
}

pub fn monodromy_json(label: &str, r: &MonodromyResult) -> Value {
    json!({
        "label": label,
        "matrix": mat2_json(&r.matrix),
        "err_estimate": r.err_estimate,
        "det_defect": r.det_defect,
        "loop_hash": r.loop_path.hash_hex(),
        "sheet": r.loop_path.start_sheet(),
        "base_point": complex_json(r.loop_path.base_point()),
        "winding": r.loop_path.winding(),
        "clearance": r.loop_path.clearance(),
        "cfg": integrator_json(&r.cfg),
    })
}

/// The envelope every command's report shares.
pub fn envelope(command: &str, seed: u64, inputs_echo: &Value, results: Value) -> Value {
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "inputs": inputs_echo,
        "results": results,
    })
}
