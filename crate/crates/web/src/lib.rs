//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export has a plain Rust twin returning `Result<_, String>` so the logic is testable natively.

use kpz_lab::asep_exact::AsepParams;
use kpz_lab::asep_sim::{hydrodynamic_limit, sample_heights, GeometryKind};
use kpz_lab::kpz::tw_gue_painleve;
use kpz_lab::polymer::{partition_transfer, DisorderField, WeightDistribution};
use kpz_lab::table::uniform_grid;
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 20_000;
const MAX_ASEP_TIME: f64 = 2_000.0;
const MAX_POLYMER_N: usize = 4_000;

/// `[s_0, F(s_0), s_1, F(s_1), …]` for the GUE Tracy–Widom CDF.
pub fn gue_table(s_min: f64, s_max: f64, step: f64) -> Result<Vec<f64>, String> {
    let grid = uniform_grid(s_min, s_max, step).map_err(|e| e.to_string())?;
    if grid.len() > MAX_POINTS {
        return Err(format!("at most {MAX_POINTS} grid points"));
    }
    let mut out = Vec::with_capacity(2 * grid.len());
    for s in grid {
        out.push(s);
        out.push(tw_gue_painleve(s).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// One step-initial-data ASEP height profile at time `t/γ` on `|x| ≤ half_width`, as
/// `[x, h(x), limit(x), …]` where `limit` is the hydrodynamic profile.
pub fn asep_profile(gamma: f64, t: f64, half_width: u32, seed: u64) -> Result<Vec<f64>, String> {
    if !(t > 0.0 && t <= MAX_ASEP_TIME) {
        return Err(format!("t must lie in (0, {MAX_ASEP_TIME}]"));
    }
    let params = AsepParams::from_gamma(gamma).map_err(|e| e.to_string())?;
    let w = half_width.min(MAX_POINTS as u32) as i64;
    let sites: Vec<i64> = (-w..=w).collect();
    let row = sample_heights(GeometryKind::Wedge, &params, t / gamma, &sites, 1, seed).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * sites.len());
    for (&x, &h) in sites.iter().zip(&row[0]) {
        out.extend([x as f64, h as f64, hydrodynamic_limit(t, x as f64)]);
    }
    Ok(out)
}

/// Point-to-point free energies `[y, log Z̃(n, y)/n, …]` of one Gaussian polymer environment.
pub fn polymer_free_energy(n: usize, beta: f64, seed: u64) -> Result<Vec<f64>, String> {
    if n == 0 || n > MAX_POLYMER_N {
        return Err(format!("n must lie in 1..={MAX_POLYMER_N}"));
    }
    let field = DisorderField::new(n, WeightDistribution::StandardNormal, seed);
    let z = partition_transfer(&field, n, beta).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(2 * z.log_values.len());
    for (k, &v) in z.log_values.iter().enumerate() {
        out.extend([2.0 * k as f64 - n as f64, v / n as f64]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = gueTable)]
pub fn gue_table_js(s_min: f64, s_max: f64, step: f64) -> Result<Vec<f64>, JsValue> {
    gue_table(s_min, s_max, step).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = asepProfile)]
pub fn asep_profile_js(gamma: f64, t: f64, half_width: u32, seed: u32) -> Result<Vec<f64>, JsValue> {
    asep_profile(gamma, t, half_width, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = polymerFreeEnergy)]
pub fn polymer_free_energy_js(n: u32, beta: f64, seed: u32) -> Result<Vec<f64>, JsValue> {
    polymer_free_energy(n as usize, beta, seed as u64).map_err(|e| JsValue::from_str(&e))
}
