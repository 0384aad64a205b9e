//! Browser bindings for the demo page in `www/`. Point sets cross the
//! boundary as flat `[x0, y0, x1, y1, ...]` arrays in the plane.

use sliced_core::counterexample::{gaussian_example_sw_closed_form, gaussian_example_w1};
use sliced_core::slicing::{per_direction_w1, sw};
use sliced_core::{w1_exact, DiscreteMeasure};
use wasm_bindgen::prelude::*;

fn planar(coords: &[f64], weights: &[f64]) -> Result<DiscreteMeasure, String> {
    if coords.len() != 2 * weights.len() {
        return Err(format!("{} coordinates for {} weights", coords.len(), weights.len()));
    }
    DiscreteMeasure::from_flat(2, coords.to_vec(), weights.to_vec()).map_err(|e| e.to_string())
}

/// `[SW₁, its standard error, W₁]`.
pub fn compare(mu: &[f64], mu_w: &[f64], nu: &[f64], nu_w: &[f64], n_directions: usize, seed: u64) -> Result<Vec<f64>, String> {
    let (a, b) = (planar(mu, mu_w)?, planar(nu, nu_w)?);
    let s = sw(&a, &b, 1.0, n_directions, seed).map_err(|e| e.to_string())?;
    let w = w1_exact(&a, &b).map_err(|e| e.to_string())?.cost;
    Ok(vec![s.value, s.std_error, w])
}

/// `W₁` of the projections on `n_angles` equally spaced directions of the
/// half circle `[0, π)`.
pub fn angle_profile(mu: &[f64], mu_w: &[f64], nu: &[f64], nu_w: &[f64], n_angles: usize) -> Result<Vec<f64>, String> {
    let (a, b) = (planar(mu, mu_w)?, planar(nu, nu_w)?);
    let dirs: Vec<Vec<f64>> = (0..n_angles)
        .map(|i| {
            let t = std::f64::consts::PI * i as f64 / n_angles as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    per_direction_w1(&a, &b, &dirs).map_err(|e| e.to_string())
}

/// `[SW₁, W₁]` for `N(0, diag(1, 0))` against `N(0, diag(1, ε²))`.
pub fn gaussian(eps: f64) -> Result<Vec<f64>, String> {
    let s = gaussian_example_sw_closed_form(eps).map_err(|e| e.to_string())?;
    Ok(vec![s, gaussian_example_w1(eps)])
}

#[wasm_bindgen(js_name = compare)]
pub fn compare_js(mu: &[f64], mu_w: &[f64], nu: &[f64], nu_w: &[f64], n_directions: u32, seed: u32) -> Result<Vec<f64>, JsError> {
    compare(mu, mu_w, nu, nu_w, n_directions as usize, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = angleProfile)]
pub fn angle_profile_js(mu: &[f64], mu_w: &[f64], nu: &[f64], nu_w: &[f64], n_angles: u32) -> Result<Vec<f64>, JsError> {
    angle_profile(mu, mu_w, nu, nu_w, n_angles as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = gaussian)]
pub fn gaussian_js(eps: f64) -> Result<Vec<f64>, JsError> {
    gaussian(eps).map_err(|e| JsError::new(&e))
}
