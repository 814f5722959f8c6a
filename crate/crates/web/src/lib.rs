//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every entry point takes the flat configuration text shown on the page and
//! returns a JSON document for the page to draw. The `*_json` functions hold
//! the logic and run natively as well; the `#[wasm_bindgen]` wrappers only
//! convert errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use highway_core::config::Config;
use highway_core::envelope::{invariant_behind, stop_dist_ego, stop_dist_other};
use highway_core::nn::{builtin_network, Action, FULL_INPUT};
use highway_core::plant::Integrator;
use highway_core::shield::{allow_behind, DenialReason};
use highway_core::sim::{braking_gap_series, braking_min_gap, run_episode, sample_initial, Controller, EpisodeOptions};
use highway_core::CarState;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Verdict codes of [`monitor_map_json`]: 0 is "allowed", `k > 0` is
/// `REASONS[k - 1]`.
const REASONS: [DenialReason; 5] = [
    DenialReason::NotBehind,
    DenialReason::GapViolation,
    DenialReason::StoppingMargin,
    DenialReason::IdleMargin,
    DenialReason::AccelMargin,
];

fn config(text: &str) -> Result<Config, String> {
    Config::parse(text).map_err(|e| e.to_string())
}

fn reason_code(r: Option<DenialReason>) -> usize {
    r.map_or(0, |r| 1 + REASONS.iter().position(|&k| k == r).unwrap_or(0))
}

/// Monitor verdicts for `action` on a `cells × cells` grid over the gap
/// `x_O - x_E ∈ [0, gap_max]` and the ego speed `v_E ∈ [0, V]`, with the
/// other car at speed `v_other`. Also marks where the invariant holds.
pub fn monitor_map_json(
    config_text: &str,
    action: &str,
    v_other: f64,
    gap_max: f64,
    cells: usize,
) -> Result<Value, String> {
    let cfg = config(config_text)?;
    let c = cfg.constants;
    let act: Action = action.parse().map_err(|e: highway_core::Error| e.to_string())?;
    if !(gap_max > 0.0) || !(2..=400).contains(&cells) {
        return Err(format!("need gap_max > 0 and 2 to 400 cells, got {gap_max} and {cells}"));
    }
    if !(0.0..=c.v).contains(&v_other) {
        return Err(format!("v_other must lie in [0, {}]", c.v));
    }
    let axis = |hi: f64| -> Vec<f64> { (0..cells).map(|i| hi * (i as f64 + 0.5) / cells as f64).collect() };
    let gaps = axis(gap_max);
    let speeds = axis(c.v);
    let other = |gap: f64| CarState::new(gap, v_other, 0.0);
    let ego = |v: f64| CarState::new(0.0, v, 0.0);
    let verdicts: Vec<Vec<usize>> = speeds
        .iter()
        .map(|&v| gaps.iter().map(|&g| reason_code(allow_behind(act, &ego(v), &other(g), &c).reason)).collect())
        .collect();
    let invariant: Vec<Vec<bool>> = speeds
        .iter()
        .map(|&v| gaps.iter().map(|&g| invariant_behind(&ego(v), &other(g), &c)).collect())
        .collect();
    let legend: Vec<String> = std::iter::once("allowed".to_string())
        .chain(REASONS.iter().map(ToString::to_string))
        .collect();
    Ok(json!({
        "action": act,
        "gaps": gaps,
        "speeds": speeds,
        "verdicts": verdicts,
        "invariant": invariant,
        "legend": legend,
    }))
}

/// Gap curves of the all-brake scenario (ego at `B_min`, front car at
/// `B_max`) under coarse Euler, fine Euler and exact integration. The front
/// car is placed so that the stopping distances leave `margin` metres beyond
/// `L`.
pub fn euler_curves_json(
    config_text: &str,
    v_ego: f64,
    v_other: f64,
    margin: f64,
    coarse: u32,
    fine: u32,
) -> Result<Value, String> {
    let cfg = config(config_text)?;
    let c = cfg.constants;
    let e = |e: highway_core::Error| e.to_string();
    if !(0.0..=c.v).contains(&v_ego) || !(0.0..=c.v).contains(&v_other) {
        return Err(format!("speeds must lie in [0, {}]", c.v));
    }
    let x_o = stop_dist_ego(0.0, v_ego, c.b_min).map_err(e)? + c.l + margin - stop_dist_other(0.0, v_other, &c);
    let ego = CarState::new(0.0, v_ego, 0.0);
    let front = CarState::new(x_o, v_other, 0.0);
    let mut curves = serde_json::Map::new();
    for integ in [Integrator::euler(coarse).map_err(e)?, Integrator::euler(fine).map_err(e)?, Integrator::Exact] {
        let series = braking_gap_series(ego, front, integ, 0.01, &c).map_err(e)?;
        curves.insert(
            integ.to_string(),
            json!({
                "points": series,
                "min_gap": braking_min_gap(ego, front, integ, &c),
            }),
        );
    }
    Ok(json!({
        "ego": ego,
        "front": front,
        "L": c.l,
        "in_invariant": invariant_behind(&ego, &front, &c),
        "curves": curves,
    }))
}

/// One episode from a sampled start with the given controller, built-in
/// network and environment policy.
pub fn episode_json(
    config_text: &str,
    policy: &str,
    network: &str,
    env: &str,
    integrator: &str,
    seed: u64,
) -> Result<Value, String> {
    let mut cfg = config(config_text)?;
    cfg.seed = seed;
    let c = cfg.constants;
    let e = |e: highway_core::Error| e.to_string();
    let net = builtin_network(network, FULL_INPUT, cfg.feature_order).map_err(e)?;
    let ctrl = Controller::from_name(policy, Some(net)).map_err(e)?;
    let env = cfg.env_policy(env).map_err(e)?;
    let integ: Integrator = integrator.parse().map_err(e)?;
    let w0 = sample_initial(&c, cfg.pattern, seed, cfg.density).map_err(e)?;
    let r = run_episode(&w0, &ctrl, &[env], &EpisodeOptions::from_config(&cfg, integ), &c).map_err(e)?;
    let rows: Vec<Value> = r
        .trajectory
        .iter()
        .map(|row| {
            json!({
                "t": row.t,
                "x": row.cars.iter().map(|s| s.x).collect::<Vec<_>>(),
                "v": row.cars.iter().map(|s| s.v).collect::<Vec<_>>(),
                "a": row.cars.iter().map(|s| s.a).collect::<Vec<_>>(),
                "action": row.action,
                "overridden": row.overridden,
                "collided": row.collided,
                "in_invariant": row.in_invariant,
            })
        })
        .collect();
    Ok(json!({
        "policy": ctrl.name(),
        "rows": rows,
        "crashed": r.crashed,
        "cause": r.cause.map(|k| k.to_string()),
        "reward": r.reward,
        "overrides": r.overrides,
        "L": c.l,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn default_config() -> String {
    let c = Config::default();
    let k = c.constants;
    format!(
        "# model constants\nT = {}\nL = {}\nV = {}\nA_min = {}\nA_max = {}\nB_min = {}\nB_max = {}\n\n# scenario\npattern = {}\ndensity = {}\nsteps = {}\n",
        k.t, k.l, k.v, k.a_min, k.a_max, k.b_min, k.b_max, c.pattern, c.density, c.steps
    )
}

#[wasm_bindgen]
pub fn monitor_map(config_text: &str, action: &str, v_other: f64, gap_max: f64, cells: usize) -> Result<String, JsError> {
    to_js(monitor_map_json(config_text, action, v_other, gap_max, cells))
}

#[wasm_bindgen]
pub fn euler_curves(
    config_text: &str,
    v_ego: f64,
    v_other: f64,
    margin: f64,
    coarse: u32,
    fine: u32,
) -> Result<String, JsError> {
    to_js(euler_curves_json(config_text, v_ego, v_other, margin, coarse, fine))
}

#[wasm_bindgen]
pub fn episode(
    config_text: &str,
    policy: &str,
    network: &str,
    env: &str,
    integrator: &str,
    seed: u32,
) -> Result<String, JsError> {
    to_js(episode_json(config_text, policy, network, env, integrator, u64::from(seed)))
}
