//! Browser bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string. Failures come back as
//! `{"error": "..."}` so the page can show them inline.

use rach_core::format::rational_to_f64;
use rach_core::{
    compare_to_exact, estimate_pmf, optimal_data_slots, success_pmf, sweep, DetectionMode,
    SimParams, SweepAxis, SystemConfig,
};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

// keeps the exact path interactive
const MAX_TOKENS: u32 = 64;
const MAX_USERS: u32 = 128;
const MAX_SLOTS: u32 = 128;
const MAX_ITERATIONS: u64 = 1_000_000;

fn checked(tokens: u32, slots: u32, users: u32) -> Result<SystemConfig, String> {
    if tokens > MAX_TOKENS || users > MAX_USERS || slots > MAX_SLOTS {
        return Err(format!(
            "demo limits: M <= {MAX_TOKENS}, K <= {MAX_SLOTS}, T <= {MAX_USERS}"
        ));
    }
    SystemConfig::new(tokens, slots, users).map_err(|e| e.to_string())
}

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).expect("response serializes"),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

#[derive(Serialize)]
struct PmfView {
    exact: Vec<f64>,
    exact_fractions: Vec<String>,
    simulated: Vec<f64>,
    tv_distance: f64,
    expected_successes: f64,
    success_rate: Option<f64>,
    efficiency: f64,
}

fn pmf_view_inner(
    tokens: u32,
    slots: u32,
    users: u32,
    iterations: u32,
    seed: u32,
) -> Result<PmfView, String> {
    let cfg = checked(tokens, slots, users)?;
    if iterations as u64 > MAX_ITERATIONS {
        return Err(format!("demo limit: N <= {MAX_ITERATIONS}"));
    }
    let exact = success_pmf(&cfg).map_err(|e| e.to_string())?;
    let params = SimParams::new(cfg, iterations as u64, seed as u64, DetectionMode::Binary)
        .map_err(|e| e.to_string())?;
    let report = estimate_pmf(&params).map_err(|e| e.to_string())?;
    let cmp = compare_to_exact(&report).map_err(|e| e.to_string())?;
    let mean = exact.mean();
    let metrics = rach_core::FrameMetrics::from_mean(cfg, mean);
    Ok(PmfView {
        exact: exact.to_f64(),
        exact_fractions: exact.mass().iter().map(ToString::to_string).collect(),
        simulated: report.pmf_hat().to_f64(),
        tv_distance: cmp.tv_distance,
        expected_successes: rational_to_f64(&metrics.expected_successes),
        success_rate: metrics.success_rate.as_ref().map(rational_to_f64),
        efficiency: rational_to_f64(&metrics.efficiency),
    })
}

/// Exact pmf of the number of successes next to a seeded simulation of
/// `iterations` frames.
#[wasm_bindgen]
pub fn pmf_view(tokens: u32, slots: u32, users: u32, iterations: u32, seed: u32) -> String {
    respond(pmf_view_inner(tokens, slots, users, iterations, seed))
}

#[derive(Serialize)]
struct RateCurve {
    slots: u32,
    success_rate: Vec<f64>,
}

fn rate_curves_inner(tokens: u32, max_users: u32, slots: &[u32]) -> Result<Vec<RateCurve>, String> {
    if slots.is_empty() {
        return Err("pick at least one K".into());
    }
    slots
        .iter()
        .map(|&k| {
            let base = checked(tokens, k, max_users)?
                .with_users(1)
                .map_err(|e| e.to_string())?;
            let report =
                sweep(base, SweepAxis::Users, 1, max_users.max(1)).map_err(|e| e.to_string())?;
            Ok(RateCurve {
                slots: k,
                success_rate: report
                    .rows
                    .iter()
                    .map(|r| r.success_rate.as_ref().map(rational_to_f64).unwrap_or(0.0))
                    .collect(),
            })
        })
        .collect()
}

/// Success rate against `T = 1 ..= max_users`, one curve per entry of `slots`.
#[wasm_bindgen]
pub fn rate_curves(tokens: u32, max_users: u32, slots: &[u32]) -> String {
    respond(rate_curves_inner(tokens, max_users, slots))
}

#[derive(Serialize)]
struct EfficiencyCurve {
    efficiency: Vec<f64>,
    success_rate: Vec<f64>,
    optimal_slots: u32,
    optimal_efficiency: f64,
    optimal_efficiency_fraction: String,
}

fn efficiency_curve_inner(tokens: u32, users: u32, k_max: u32) -> Result<EfficiencyCurve, String> {
    let base = checked(tokens, k_max.max(1), users)?
        .with_data_slots(1)
        .map_err(|e| e.to_string())?;
    let report = sweep(base, SweepAxis::DataSlots, 1, k_max).map_err(|e| e.to_string())?;
    let best = optimal_data_slots(tokens, users, k_max).map_err(|e| e.to_string())?;
    Ok(EfficiencyCurve {
        efficiency: report
            .rows
            .iter()
            .map(|r| rational_to_f64(&r.efficiency))
            .collect(),
        success_rate: report
            .rows
            .iter()
            .map(|r| r.success_rate.as_ref().map(rational_to_f64).unwrap_or(0.0))
            .collect(),
        optimal_slots: best.data_slots,
        optimal_efficiency: rational_to_f64(&best.efficiency),
        optimal_efficiency_fraction: rach_core::format::rational_to_string(&best.efficiency),
    })
}

/// Efficiency for `K = 1 ..= k_max` and the `K` that maximizes it.
#[wasm_bindgen]
pub fn efficiency_curve(tokens: u32, users: u32, k_max: u32) -> String {
    respond(efficiency_curve_inner(tokens, users, k_max))
}
