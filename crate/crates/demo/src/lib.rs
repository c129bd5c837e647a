//! Browser bindings. Every export takes and returns JSON strings; the logic
//! lives in [`ops`] so it can be tested natively.

use wasm_bindgen::prelude::*;

pub mod ops;

fn js(result: Result<String, String>) -> Result<String, JsValue> {
    result.map_err(|e| JsValue::from_str(&e))
}

/// Capped water-filling plus the rate-versus-budget curve.
/// Input: `{"gains": [...], "caps": [...], "budget": P, "points": n}`.
#[wasm_bindgen]
pub fn waterfill(input: &str) -> Result<String, JsValue> {
    js(ops::waterfill(input))
}

/// Random instance solved by the two-stage sum-rate solver.
/// Input: `{"receivers": K, "subcarriers": N, "seed": s, "budget": P}`.
#[wasm_bindgen]
pub fn solve_random(input: &str) -> Result<String, JsValue> {
    js(ops::solve_random(input))
}

/// Both oracles on a 3-partition instance.
/// Input: `{"items": [...], "bound": B, "groups": K}`.
#[wasm_bindgen]
pub fn verify_partition(input: &str) -> Result<String, JsValue> {
    js(ops::verify_partition(input))
}
