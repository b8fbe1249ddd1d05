//! WebAssembly bindings for the browser demo. Every entry point returns a JSON string.

use diaboli::eigensolver::{sweep, Segment};
use diaboli::format::sorted_json;
use diaboli::perturbation::prediction_error_on;
use diaboli::{berry_phase, parse_dimacs, LoopPath, Variant, ViolationDiagonal};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Keeps a browser tab responsive.
const MAX_WEB_VARS: usize = 10;
const MAX_SAMPLES: usize = 2001;

/// `wc:n=<k>,sol=<i|none>` or DIMACS text.
fn load(instance: &str) -> Result<ViolationDiagonal, String> {
    let instance = instance.trim();
    let diag = if let Some(rest) = instance.strip_prefix("wc:") {
        let (mut n, mut sol) = (None, None);
        for kv in rest.split(',') {
            match kv.split_once('=').map(|(k, v)| (k.trim(), v.trim())) {
                Some(("n", v)) => n = Some(v.parse::<usize>().map_err(|_| format!("bad n {v:?}"))?),
                Some(("sol", "none")) => sol = Some(None),
                Some(("sol", v)) => sol = Some(Some(v.parse::<usize>().map_err(|_| format!("bad sol {v:?}"))?)),
                _ => return Err(format!("unexpected {kv:?}")),
            }
        }
        let (Some(n), Some(sol)) = (n, sol) else {
            return Err("wc: needs n= and sol=".into());
        };
        ViolationDiagonal::worst_case(n, sol).map_err(|e| e.to_string())?
    } else {
        ViolationDiagonal::from_instance(&parse_dimacs(instance).map_err(|e| e.to_string())?)
    };
    if diag.dim() > 1 << MAX_WEB_VARS {
        return Err(format!("the demo is limited to {MAX_WEB_VARS} variables"));
    }
    Ok(diag)
}

fn variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: diaboli::hamiltonian::HamiltonianError| e.to_string())
}

fn to_json(v: &impl serde::Serialize) -> Result<String, String> {
    sorted_json(v).map_err(|e| e.to_string())
}

#[allow(clippy::too_many_arguments)]
pub fn spectrum_json(
    instance: &str,
    variant_name: &str,
    axis: &str,
    fixed: f64,
    from: f64,
    to: f64,
    samples: usize,
    levels: usize,
) -> Result<String, String> {
    let diag = load(instance)?;
    let v = variant(variant_name)?;
    let seg = match axis {
        "x" => Segment::along_x(fixed, from, to),
        "z" => Segment::along_z(fixed, from, to),
        _ => return Err(format!("axis must be x or z, got {axis:?}")),
    };
    let rows = sweep(&diag, v, &seg, samples.min(MAX_SAMPLES)).map_err(|e| e.to_string())?;
    let param: Vec<f64> = rows.iter().map(|r| if axis == "x" { r.point.x } else { r.point.z }).collect();
    let k = levels.max(1).min(rows[0].eigenvalues.len());
    let curves: Vec<Vec<f64>> = (0..k).map(|i| rows.iter().map(|r| r.eigenvalues[i]).collect()).collect();
    let gap: Vec<f64> = rows.iter().map(|r| r.gap01).collect();
    to_json(&json!({ "axis": axis, "param": param, "levels": curves, "gap01": gap }))
}

pub fn berry_json(instance: &str, variant_name: &str, half_x: f64, half_z: f64, samples_per_edge: usize) -> Result<String, String> {
    let diag = load(instance)?;
    let path = LoopPath::rectangle_from_top(half_x, half_z, samples_per_edge).map_err(|e| e.to_string())?;
    let r = berry_phase(&diag, variant(variant_name)?, &path).map_err(|e| e.to_string())?;
    to_json(&r)
}

pub fn predict_gap_json(instance: &str, variant_name: &str, z: f64) -> Result<String, String> {
    let diag = load(instance)?;
    let r = prediction_error_on(&diag, z, variant(variant_name)?, 1.0, 401).map_err(|e| e.to_string())?;
    to_json(&r)
}

/// Eigenvalue curves along one axis: `{axis, param, levels, gap01}`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn spectrum(
    instance: &str,
    variant: &str,
    axis: &str,
    fixed: f64,
    from: f64,
    to: f64,
    samples: usize,
    levels: usize,
) -> Result<String, JsError> {
    spectrum_json(instance, variant, axis, fixed, from, to, samples, levels).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn berry(instance: &str, variant: &str, half_x: f64, half_z: f64, samples_per_edge: usize) -> Result<String, JsError> {
    berry_json(instance, variant, half_x, half_z, samples_per_edge).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn predict_gap(instance: &str, variant: &str, z: f64) -> Result<String, JsError> {
    predict_gap_json(instance, variant, z).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use serde_json::Value;

    use super::*;

    fn parse(s: Result<String, String>) -> Value {
        serde_json::from_str(&s.unwrap()).unwrap()
    }

    #[test]
    fn spectrum_shape() {
        let v = parse(spectrum_json("wc:n=3,sol=5", "unscaled", "z", 0.0, -1.0, 1.0, 21, 3));
        assert_eq!(v["levels"].as_array().unwrap().len(), 3);
        assert_eq!(v["param"].as_array().unwrap().len(), 21);
        assert_eq!(v["gap01"][10], 0.0);
    }

    #[test]
    fn berry_sign() {
        assert_eq!(parse(berry_json("wc:n=4,sol=9", "unscaled", 1.0, 1.0, 16))["phase"], "pi");
        assert_eq!(parse(berry_json("wc:n=4,sol=none", "unscaled", 1.0, 1.0, 16))["phase"], "0");
    }

    #[test]
    fn dimacs_text() {
        let cnf = "p cnf 3 2\n1 2 3 0\n-1 2 3 0\n";
        assert_eq!(parse(berry_json(cnf, "unscaled", 1.0, 1.0, 16))["phase"], "pi");
    }

    #[test]
    fn gap_prediction() {
        let v = parse(predict_gap_json("wc:n=5,sol=0", "unscaled", -1.0));
        assert_eq!(v["delta_a2_coeff"], -2.0);
        assert!(v["x_gap_predicted"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(load("wc:n=3").is_err());
        assert!(load("wc:n=12,sol=1").is_err());
        assert!(spectrum_json("wc:n=3,sol=1", "unscaled", "y", 0.0, 0.0, 1.0, 5, 2).is_err());
        assert!(berry_json("wc:n=3,sol=1", "sideways", 1.0, 1.0, 8).is_err());
    }
}
