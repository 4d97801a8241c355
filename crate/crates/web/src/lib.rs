//! Browser bindings: a TV curve, a gap-bound sweep over delta, and an exact kernel row.
//!
//! Each operation has a plain Rust form returning JSON text, which the native
//! tests call, and a thin `wasm_bindgen` wrapper for the page.

use rado_walk::chain::{kernel_row_exact, TvEngine};
use rado_walk::graph::GraphOracle;
use rado_walk::hardy::gap_bounds;
use rado_walk::measure::WeightFamily;
use rado_walk::numerics::ExactRational;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Keeps page requests interactive.
pub const MAX_CAP: u32 = 1 << 14;
pub const MAX_STEPS: u32 = 500;
pub const MAX_SWEEP_POINTS: u32 = 400;

fn weights(delta: &str) -> Result<WeightFamily, String> {
    let d: ExactRational = delta.parse().map_err(|e: rado_walk::Error| e.to_string())?;
    WeightFamily::geometric(d).map_err(|e| e.to_string())
}

fn check_cap(cap: u32) -> Result<(), String> {
    if cap > MAX_CAP {
        return Err(format!("cap is limited to {MAX_CAP} in the browser"));
    }
    Ok(())
}

/// TV bracket to stationarity for the binary model, with the decay fit.
pub fn tv_curve_json(delta: &str, x0: u32, steps: u32, cap: u32) -> Result<String, String> {
    check_cap(cap)?;
    if steps > MAX_STEPS {
        return Err(format!("at most {MAX_STEPS} steps"));
    }
    let engine = TvEngine::new(&GraphOracle::binary(), &weights(delta)?, u64::from(cap)).map_err(|e| e.to_string())?;
    let curve = engine.curve(u64::from(x0), u64::from(steps)).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&curve).expect("curve serializes"))
}

/// Analytic gap bounds at `points` evenly spaced deltas in `[from, to]`.
pub fn gap_sweep_json(from: f64, to: f64, points: u32) -> Result<String, String> {
    if !(0.0 < from && from < to && to < 1.0) || !(2..=MAX_SWEEP_POINTS).contains(&points) {
        return Err(format!("need 0 < from < to < 1 and 2..={MAX_SWEEP_POINTS} points"));
    }
    let step = (to - from) / f64::from(points - 1);
    let rows = (0..points)
        .map(|i| gap_bounds(from + step * f64::from(i)).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(serde_json::to_string(&rows).expect("bounds serialize"))
}

/// Exact kernel row of the binary model on `[0, cap]`, entries as `"num/den"`.
pub fn kernel_row_json(delta: &str, x: u32, cap: u32) -> Result<String, String> {
    check_cap(cap)?;
    let row = kernel_row_exact(&GraphOracle::binary(), &weights(delta)?, u64::from(x), u64::from(cap)).map_err(|e| e.to_string())?;
    let entries: Vec<_> = row
        .window
        .iter()
        .map(|&j| {
            let value = row.entry_value(j).map_or_else(|| row.entry(j).to_string(), |v| v.to_string());
            json!({ "j": j, "value": value, "approx": row.entry_lower(j).to_f64() })
        })
        .collect();
    let v = json!({
        "source": row.source, "cap": row.cap, "entries": entries,
        "tail": row.tail().to_string(), "sums_to_one": row.sums_to_one(),
    });
    Ok(v.to_string())
}

#[wasm_bindgen]
pub fn tv_curve(delta: &str, x0: u32, steps: u32, cap: u32) -> Result<String, JsValue> {
    tv_curve_json(delta, x0, steps, cap).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn gap_sweep(from: f64, to: f64, points: u32) -> Result<String, JsValue> {
    gap_sweep_json(from, to, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn kernel_row(delta: &str, x: u32, cap: u32) -> Result<String, JsValue> {
    kernel_row_json(delta, x, cap).map_err(|e| JsValue::from_str(&e))
}
