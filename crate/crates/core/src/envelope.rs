//! Stopping distances and the control envelope conditions.
//!
//! `safe_back` accepts a candidate ego acceleration when the ego drives behind
//! the other car, `safe_front` when it drives ahead. Strict and non-strict
//! comparisons are kept exactly as in the verified formulas.
//!
//! # Frame shift in `safe_front`
//!
//! The ahead case is the behind case seen from an observer moving at the speed
//! limit `V`: velocities become `v̄ = v - V ≤ 0` and positions `x̄ = x - V·t`.
//! "Stopping" in that frame means reaching `V`. Every comparison in
//! `safe_front` has one shifted position on each side, so the `V·t` terms
//! cancel and the predicate is evaluated on unshifted positions:
//!
//! ```text
//! x̄_O + L ≤ x̄_E         ⇔  x_O + L ≤ x_E
//! d̄_O + L < d̄_E(a)       ⇔  x_O - v̄_O²/(2·Amax) + L < x_E - v̄_E²/(2a)
//! ```

use crate::error::{Error, Result};
use crate::model::{CarState, Constants};

/// Position where a car at `x` with speed `v` stops under constant braking
/// `a < 0`: `x - v²/(2a)`.
pub fn stop_dist_ego(x: f64, v: f64, a: f64) -> Result<f64> {
    if a < 0.0 {
        Ok(stop_point(x, v, a))
    } else {
        Err(Error::Domain(format!(
            "stopping distance needs a negative acceleration, got {a}"
        )))
    }
}

/// Worst-case stopping position of the other car, braking at `Bmax`.
pub fn stop_dist_other(x: f64, v: f64, c: &Constants) -> f64 {
    stop_point(x, v, c.b_max)
}

/// Extra distance covered when the ego holds `a` for up to `T` seconds before
/// braking at `Bmin`, compared to braking at `Bmin` right away:
/// `(-a/Bmin + 1)(a/2·T² + T·v)`.
pub fn corr(a: f64, v: f64, c: &Constants) -> f64 {
    (-a / c.b_min + 1.0) * (a / 2.0 * c.t * c.t + c.t * v)
}

#[inline]
fn stop_point(x: f64, v: f64, a: f64) -> f64 {
    x - v * v / (2.0 * a)
}

/// Acceptance condition for the ego acceleration `ego.a` when the ego drives
/// behind `other`.
///
/// The second disjunct divides by `ego.a`; it can only hold for `ego.a < 0`
/// on in-context states (`v_E ≥ 0`), and is treated as false otherwise.
pub fn safe_back(ego: &CarState, other: &CarState, c: &Constants) -> bool {
    let a = ego.a;
    let dist_o = stop_dist_other(other.x, other.v, c);
    if ego.x + c.l > other.x {
        return false;
    }
    (a <= c.b_min && stop_point(ego.x, ego.v, c.b_min) + c.l < dist_o)
        || (c.b_min <= a
            && a < 0.0
            && ego.v + a * c.t < 0.0
            && stop_point(ego.x, ego.v, a) + c.l < dist_o)
        || (c.b_min <= a
            && ego.v + a * c.t >= 0.0
            && stop_point(ego.x, ego.v, c.b_min) + corr(a, ego.v, c) + c.l < dist_o)
}

/// Acceptance condition for the ego acceleration `ego.a` when the ego drives
/// ahead of `other`, with the frame shift cancelled (see module docs).
pub fn safe_front(ego: &CarState, other: &CarState, c: &Constants) -> bool {
    let a = ego.a;
    let ve = ego.v - c.v;
    let vo = other.v - c.v;
    let dist_o = stop_point(other.x, vo, c.a_max);
    if other.x + c.l > ego.x {
        return false;
    }
    (c.a_min <= a && dist_o + c.l < stop_point(ego.x, ve, c.a_min))
        || (a <= c.a_min && a > 0.0 && ve + a * c.t > 0.0 && dist_o + c.l < stop_point(ego.x, ve, a))
        || (a <= c.a_min
            && ve + a * c.t <= 0.0
            && dist_o + c.l
                < stop_point(ego.x, ve, c.a_min)
                    + (-a / c.a_min + 1.0) * (a / 2.0 * c.t * c.t + ve * c.t))
}

/// Invariant for the behind case: both speeds within `[0, V]`, the gap at
/// least `L`, and braking at `Bmin` stops the ego more than `L` before the
/// other car's worst-case stopping position.
pub fn invariant_behind(ego: &CarState, other: &CarState, c: &Constants) -> bool {
    invariant_behind_relaxed(ego, other, c, 0.0)
}

/// [`invariant_behind`] with the velocity bounds widened to
/// `[-eps_v, V + eps_v]`.
pub(crate) fn invariant_behind_relaxed(
    ego: &CarState,
    other: &CarState,
    c: &Constants,
    eps_v: f64,
) -> bool {
    let in_speed = |v: f64| -eps_v <= v && v <= c.v + eps_v;
    in_speed(other.v)
        && in_speed(ego.v)
        && ego.x + c.l <= other.x
        && stop_point(ego.x, ego.v, c.b_min) + c.l < stop_dist_other(other.x, other.v, c)
}

/// Invariant for the ahead case, in the shifted frame.
pub fn invariant_ahead(ego: &CarState, other: &CarState, c: &Constants) -> bool {
    let in_speed = |v: f64| 0.0 <= v && v <= c.v;
    in_speed(ego.v)
        && in_speed(other.v)
        && other.x + c.l <= ego.x
        && stop_point(other.x, other.v - c.v, c.a_max) + c.l
            < stop_point(ego.x, ego.v - c.v, c.a_min)
}
