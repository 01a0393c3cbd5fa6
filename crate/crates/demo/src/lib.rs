//! Browser bindings: a space-time picture of the exclusion process, Hermite
//! test functions, and Gaussian pairings of a Brownian sheet.

use ckpz::basis::hermite_eval;
use ckpz::exclusion::{SimParams, Trajectory};
use ckpz::field::TestFunction;
use ckpz::gaussian::{sample_sheet, GridSpec, SheetPairing};
use ckpz::rng::{replica_stream, seeded};
use wasm_bindgen::prelude::*;

/// Spins `±1` at `frames` equally spaced macroscopic times in `[0, horizon]`,
/// row-major `frames × L` with `L = round(window/epsilon)`.
#[wasm_bindgen]
pub fn simulate_spins(
    epsilon: f64,
    gamma: f64,
    window: f64,
    horizon: f64,
    frames: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    if frames < 2 {
        return Err("need at least two frames".into());
    }
    let params = SimParams::new(epsilon, gamma, window, horizon).map_err(|e| e.to_string())?;
    if params.sites > 4000 {
        return Err(format!("{} sites is too many for the page", params.sites));
    }
    let times: Vec<f64> = (0..frames)
        .map(|k| horizon * k as f64 / (frames - 1) as f64)
        .collect();
    let path = Trajectory::simulate(params, &mut seeded(seed), &times);
    Ok(path
        .snapshots
        .iter()
        .flat_map(|s| s.spins().into_iter().map(f64::from))
        .collect())
}

/// `∂^deriv G_n` on `points` equally spaced nodes of `[-half_width, half_width]`.
#[wasm_bindgen]
pub fn hermite_curve(
    n: usize,
    deriv: usize,
    half_width: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    if points < 2 || deriv > 3 {
        return Err("need points >= 2 and deriv <= 3".into());
    }
    (0..points)
        .map(|k| {
            let u = -half_width + 2.0 * half_width * k as f64 / (points - 1) as f64;
            hermite_eval(n, u, deriv).map_err(|e| e.to_string())
        })
        .collect()
}

/// `samples` draws of `√2⟨B_t, G_n''⟩` from independent Brownian sheets on a
/// coarse grid over `[0, t]`.
#[wasm_bindgen]
pub fn sheet_pairings(n: usize, t: f64, samples: usize, seed: u64) -> Result<Vec<f64>, String> {
    if !(1..=12).contains(&n) || !(t > 0.0) {
        return Err("need 1 <= n <= 12 and t > 0".into());
    }
    let g = TestFunction::hermite(n);
    let cover = GridSpec::covering(t, std::slice::from_ref(&g));
    let grid = GridSpec::with_steps(
        t,
        cover.half_width,
        1,
        (cover.half_width * 16.0).ceil() as usize,
    );
    let pairing = SheetPairing::new(&grid, &g).map_err(|e| e.to_string())?;
    (0..samples)
        .map(|s| {
            let sheet = sample_sheet(grid, &mut replica_stream(seed, 0, s as u32))
                .map_err(|e| e.to_string())?;
            Ok(pairing.eval(&sheet, t))
        })
        .collect()
}

/// Limit variance `2t‖G_n'‖² = 2t(n − ½)`.
#[wasm_bindgen]
pub fn pairing_variance(n: usize, t: f64) -> f64 {
    2.0 * t * (n as f64 - 0.5)
}
