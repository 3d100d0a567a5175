//! Browser bindings: three JSON-returning entry points behind `www/index.html`.
//!
//! The `*_json` functions are plain Rust so they can be tested natively; the
//! exported wrappers only turn errors into JavaScript exceptions.

use rumin_core::model::{FlatBundle, ModelManifold};
use rumin_core::spectral::{self, LaplacianKind, Tolerances};
use rumin_core::suite::{run_suite, Suite, SuiteConfig};
use rumin_core::torsion::{torsion_estimate, validate_s_grid};
use wasm_bindgen::prelude::*;

/// Keeps a single request within a couple of seconds in the browser.
pub const MAX_WEIGHT_LIMIT: u32 = 8;

fn model(name: &str, p: u32, character: u32) -> Result<ModelManifold, String> {
    match name {
        "s3" => Ok(ModelManifold::su2_model()),
        "lens" => ModelManifold::lens_space(p as usize, FlatBundle { character: character as usize }).map_err(|e| e.to_string()),
        other => Err(format!("unknown model {other:?}")),
    }
}

fn weight(max_weight: u32) -> Result<usize, String> {
    if max_weight > MAX_WEIGHT_LIMIT {
        return Err(format!("max weight is capped at {MAX_WEIGHT_LIMIT} in the browser"));
    }
    Ok(max_weight as usize)
}

fn laplacian(op: &str, t: f64) -> Result<LaplacianKind, String> {
    Ok(match op {
        "delta-rn" => LaplacianKind::Rumin,
        "delta-dr" => LaplacianKind::DeRham,
        "delta-b" => LaplacianKind::Tangential,
        "delta-t" if t > 0.0 && t.is_finite() => LaplacianKind::Forman { t },
        "delta-t" => return Err(format!("t must be positive, got {t}")),
        other => return Err(format!("unknown operator {other:?}")),
    })
}

fn suite(name: &str) -> Result<Suite, String> {
    Ok(match name {
        "all" => Suite::All,
        "thm1" => Suite::Kernel,
        "cor2" => Suite::Primitivity,
        "cor3" => Suite::Forman,
        "sec4" => Suite::Eigen,
        "thm5" => Suite::Reeb,
        other => return Err(format!("unknown suite {other:?}")),
    })
}

pub fn spectrum_json(model_name: &str, p: u32, character: u32, max_weight: u32, op: &str, t: f64, degree: u32) -> Result<String, String> {
    if degree > 3 {
        return Err(format!("degree must be at most 3, got {degree}"));
    }
    let m = model(model_name, p, character)?;
    let table = spectral::spectrum(&m, weight(max_weight)?, laplacian(op, t)?, &[degree as usize]).map_err(|e| e.to_string())?;
    serde_json::to_string(&table).map_err(|e| e.to_string())
}

pub fn verify_json(model_name: &str, p: u32, character: u32, max_weight: u32, suite_name: &str) -> Result<String, String> {
    let m = model(model_name, p, character)?;
    let report = run_suite(&m, suite(suite_name)?, &SuiteConfig::new(weight(max_weight)?)).map_err(|e| e.to_string())?;
    let mut value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    value["passed"] = report.passed().into();
    serde_json::to_string(&value).map_err(|e| e.to_string())
}

pub fn torsion_json(model_name: &str, p: u32, character: u32, max_weight: u32, s_grid: &[f64]) -> Result<String, String> {
    validate_s_grid(s_grid).map_err(|e| e.to_string())?;
    let m = model(model_name, p, character)?;
    let report = torsion_estimate(&m, weight(max_weight)?, s_grid, &Tolerances::default()).map_err(|e| e.to_string())?;
    report.to_json().map_err(|e| e.to_string())
}

/// Eigenvalues of one Laplacian in one degree, as a JSON spectrum table.
#[wasm_bindgen]
pub fn spectrum(model: &str, p: u32, character: u32, max_weight: u32, op: &str, t: f64, degree: u32) -> Result<String, JsError> {
    spectrum_json(model, p, character, max_weight, op, t, degree).map_err(|e| JsError::new(&e))
}

/// A verification suite as a JSON report with a top-level `passed` flag.
#[wasm_bindgen]
pub fn verify(model: &str, p: u32, character: u32, max_weight: u32, suite: &str) -> Result<String, JsError> {
    verify_json(model, p, character, max_weight, suite).map_err(|e| JsError::new(&e))
}

/// κ partial sums and the Reeb-frequency comparison, as JSON.
#[wasm_bindgen]
pub fn torsion(model: &str, p: u32, character: u32, max_weight: u32, s_grid: Vec<f64>) -> Result<String, JsError> {
    torsion_json(model, p, character, max_weight, &s_grid).map_err(|e| JsError::new(&e))
}
