//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The plain functions hold the logic and are tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use qoc::geometry::{self, packs, GenerationConfig, UnitVectorSet};
use qoc::plane::{self, PlaneMode};
use qoc::qsoftmax::{qsoftmax, CoordinateMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

/// Points of the plane demo, flattened as `x, y, out_x, out_y` per sample.
pub fn plane_points(
    mode: &str,
    samples: usize,
    radius: f64,
    seed: u32,
) -> Result<Vec<f64>, String> {
    let mode: PlaneMode = mode.parse()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err("radius must be positive".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    Ok(plane::sample(mode, samples, radius, &mut rng)
        .into_iter()
        .flat_map(|p| [p.x, p.y, p.out_x, p.out_y])
        .collect())
}

/// The plane vectors of `mode`, flattened as `x, y` pairs.
pub fn plane_vectors(mode: &str) -> Result<Vec<f64>, String> {
    let mode: PlaneMode = mode.parse()?;
    Ok(mode.vectors().into_iter().flatten().collect())
}

/// A generated basis together with its validation numbers.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct GeneratedBasis {
    set: UnitVectorSet,
    text: String,
}

#[wasm_bindgen]
impl GeneratedBasis {
    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn count(&self) -> usize {
        self.set.len()
    }

    #[wasm_bindgen(js_name = maxAbsDot)]
    pub fn max_abs_dot(&self) -> f64 {
        self.set.max_abs_dot()
    }

    /// Smallest angle between two basis lines, in degrees.
    #[wasm_bindgen(js_name = minAngle)]
    pub fn min_angle(&self) -> f64 {
        self.set.max_abs_dot().clamp(-1.0, 1.0).acos().to_degrees()
    }

    /// The set in `qoc-basis v1` format.
    pub fn text(&self) -> String {
        self.text.clone()
    }

    pub fn vectors(&self) -> Vec<f64> {
        self.set.as_flat().to_vec()
    }
}

fn wrap(set: UnitVectorSet) -> Result<GeneratedBasis, String> {
    let mut text = Vec::new();
    geometry::write_set(&set, &mut text).map_err(|e| e.to_string())?;
    Ok(GeneratedBasis {
        set,
        text: String::from_utf8(text).map_err(|e| e.to_string())?,
    })
}

/// Runs the basis search with fewer restarts than the CLI, to keep the page responsive.
pub fn generate(
    dim: usize,
    count: usize,
    max_dot: f64,
    seed: u32,
) -> Result<GeneratedBasis, String> {
    let config = GenerationConfig {
        restarts: 4,
        max_iterations: 2000,
        ..GenerationConfig::new(dim, count, max_dot, seed as u64)
    };
    wrap(geometry::generate_basis(&config).map_err(|e| e.to_string())?)
}

/// One of the bundled sets: `qoe4` (12 in R^4), `qoe7` (28 in R^7) or
/// `sphere3` (10 in R^3).
pub fn builtin(name: &str) -> Result<GeneratedBasis, String> {
    let set = match name {
        "qoe4" => geometry::code_to_basis(&packs::four_dim_24()),
        "qoe7" => geometry::code_to_basis(&packs::seven_dim_56()),
        "sphere3" => Ok(packs::three_dim_10()),
        _ => return Err(format!("unknown set {name:?}")),
    }
    .map_err(|e| e.to_string())?;
    wrap(set)
}

/// `qsoftmax(z)` over the vectors of a `qoc-basis v1` text.
pub fn probe(basis_text: &str, z: &[f64]) -> Result<Vec<f64>, String> {
    let set = geometry::read_set(basis_text.as_bytes()).map_err(|e| e.to_string())?;
    let q = CoordinateMatrix::from_set(&set);
    qsoftmax(z, &q)
        .map(|p| p.into_inner())
        .map_err(|e| e.to_string())
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen(js_name = planePoints)]
pub fn plane_points_js(
    mode: &str,
    samples: usize,
    radius: f64,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    plane_points(mode, samples, radius, seed).map_err(js)
}

#[wasm_bindgen(js_name = planeVectors)]
pub fn plane_vectors_js(mode: &str) -> Result<Vec<f64>, JsError> {
    plane_vectors(mode).map_err(js)
}

#[wasm_bindgen(js_name = generateBasis)]
pub fn generate_js(
    dim: usize,
    count: usize,
    max_dot: f64,
    seed: u32,
) -> Result<GeneratedBasis, JsError> {
    generate(dim, count, max_dot, seed).map_err(js)
}

#[wasm_bindgen(js_name = builtinBasis)]
pub fn builtin_js(name: &str) -> Result<GeneratedBasis, JsError> {
    builtin(name).map_err(js)
}

#[wasm_bindgen(js_name = qsoftmaxProbe)]
pub fn probe_js(basis_text: &str, z: &[f64]) -> Result<Vec<f64>, JsError> {
    probe(basis_text, z).map_err(js)
}
