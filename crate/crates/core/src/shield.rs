//! Controller monitors and the two runtime safeguards built on them.
//!
//! [`allow_behind`] is the closed-form per-action monitor for the ego driving
//! behind; [`ctrl_nn_allows`] is the guard of the discrete-action controller
//! and serves as its semantic reference. [`veriphy_step`] overrides a denied
//! action with the fallback, [`jsc_filter`] picks the best-ranked allowed
//! action while the state is inside the (relaxed) invariant.

use serde::{Deserialize, Serialize};

use crate::envelope::{invariant_behind_relaxed, safe_back, safe_front, stop_dist_other};
use crate::model::{CarState, Constants};
use crate::nn::{action_to_accel, select_action, Action, ActionScores};

/// Default velocity slack of the model monitor (m/s).
pub const DEFAULT_EPS_V: f64 = 0.5;

/// Why a monitor rejected an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DenialReason {
    /// The ego is ahead of the other car.
    NotBehind,
    /// The cars are closer than `L`.
    GapViolation,
    /// Even braking at `Bmin` right away does not keep the stopping margin.
    StoppingMargin,
    /// Idling for one cycle uses up the stopping margin.
    IdleMargin,
    /// Accelerating for one cycle uses up the stopping margin.
    AccelMargin,
}

impl std::fmt::Display for DenialReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DenialReason::NotBehind => "ego is not behind the other car",
            DenialReason::GapViolation => "gap below L",
            DenialReason::StoppingMargin => "stopping margin violated even when braking",
            DenialReason::IdleMargin => "idling for one cycle violates the stopping margin",
            DenialReason::AccelMargin => "accelerating for one cycle violates the stopping margin",
        };
        f.write_str(s)
    }
}

/// Monitor outcome; `reason` is set exactly when the action is denied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub allowed: bool,
    pub reason: Option<DenialReason>,
}

impl Verdict {
    pub const ALLOW: Verdict = Verdict {
        allowed: true,
        reason: None,
    };

    pub fn deny(reason: DenialReason) -> Self {
        Self {
            allowed: false,
            reason: Some(reason),
        }
    }
}

/// What a safeguard let through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShieldDecision {
    pub action: Action,
    /// The proposed action was replaced.
    pub overridden: bool,
    /// The monitor was consulted (always for VeriPhy, inside the invariant
    /// for JSC).
    pub monitor_active: bool,
}

#[inline]
fn stop_point(x: f64, v: f64, a: f64) -> f64 {
    x - v * v / (2.0 * a)
}

/// Side condition of idling behind the other car:
/// `Bmin ≤ 0 ≤ Amax ∧ v_E ≥ 0 ∧ d_E(Bmin) + (0/Bmin + 1)·T·v_E + L < d_O`.
pub fn idle_condition(ego: &CarState, other: &CarState, c: &Constants) -> bool {
    let dist_o = stop_dist_other(other.x, other.v, c);
    c.b_min <= 0.0
        && 0.0 <= c.a_max
        && ego.v >= 0.0
        && stop_point(ego.x, ego.v, c.b_min) + (0.0 / c.b_min + 1.0) * c.t * ego.v + c.l < dist_o
}

/// Side condition of accelerating at `Amax` behind the other car. The first
/// two disjuncts are vacuous for positive `Amax` and kept as derived.
pub fn accel_condition(ego: &CarState, other: &CarState, c: &Constants) -> bool {
    let dist_o = stop_dist_other(other.x, other.v, c);
    let a = c.a_max;
    (c.b_max <= a && a <= c.b_min && stop_point(ego.x, ego.v, c.b_min) + c.l < dist_o)
        || (c.b_min <= a && ego.v + a * c.t < 0.0 && stop_point(ego.x, ego.v, a) + c.l < dist_o)
        || (c.b_min <= a
            && ego.v + a * c.t >= 0.0
            && stop_point(ego.x, ego.v, c.b_min)
                + (-a / c.b_min + 1.0) * (a / 2.0 * c.t * c.t + c.t * ego.v)
                + c.l
                < dist_o)
}

/// Simplified controller monitor for the ego behind the other car.
///
/// Braking is always allowed. Idle and accelerate are allowed iff their side
/// condition holds and the ego is at least `L` behind; the reason of a denial
/// is diagnostic only.
pub fn allow_behind(act: Action, ego: &CarState, other: &CarState, c: &Constants) -> Verdict {
    let (ok, margin_reason) = match act {
        Action::Brake => return Verdict::ALLOW,
        Action::Idle => (idle_condition(ego, other, c), DenialReason::IdleMargin),
        Action::Accelerate => (accel_condition(ego, other, c), DenialReason::AccelMargin),
    };
    if ego.x > other.x {
        Verdict::deny(DenialReason::NotBehind)
    } else if ego.x + c.l > other.x {
        Verdict::deny(DenialReason::GapViolation)
    } else if ok {
        Verdict::ALLOW
    } else if stop_point(ego.x, ego.v, c.b_min) + c.l >= stop_dist_other(other.x, other.v, c) {
        Verdict::deny(DenialReason::StoppingMargin)
    } else {
        Verdict::deny(margin_reason)
    }
}

/// Guard of the discrete-action controller with `a := action_to_accel(act)`:
/// `(x_E ≤ x_O ∧ Bmax ≤ a ≤ Bmin) ∨ (x_E ≥ x_O ∧ Amin ≤ a ≤ Amax) ∨ safeBack ∨ safeFront`.
pub fn ctrl_nn_allows(act: Action, ego: &CarState, other: &CarState, c: &Constants) -> bool {
    let a = action_to_accel(act, c);
    let ego = ego.with_accel(a);
    (ego.x <= other.x && c.b_max <= a && a <= c.b_min)
        || (ego.x >= other.x && c.a_min <= a && a <= c.a_max)
        || safe_back(&ego, other, c)
        || safe_front(&ego, other, c)
}

/// Relaxed model monitor: the behind invariant with velocity bounds widened
/// to `[-eps_v, V + eps_v]`.
pub fn model_monitor(ego: &CarState, other: &CarState, c: &Constants, eps_v: f64) -> bool {
    invariant_behind_relaxed(ego, other, c, eps_v)
}

fn fallback_action(ego: &CarState, other: &CarState) -> Action {
    if ego.x <= other.x {
        Action::Brake
    } else {
        Action::Accelerate
    }
}

/// VeriPhy-style sandbox: keep the network's action if the guard allows it,
/// otherwise brake (behind) or accelerate (ahead).
pub fn veriphy_step(
    scores: &ActionScores,
    ego: &CarState,
    other: &CarState,
    c: &Constants,
) -> ShieldDecision {
    let proposed = select_action(scores);
    if ctrl_nn_allows(proposed, ego, other, c) {
        ShieldDecision {
            action: proposed,
            overridden: false,
            monitor_active: true,
        }
    } else {
        ShieldDecision {
            action: fallback_action(ego, other),
            overridden: true,
            monitor_active: true,
        }
    }
}

/// JSC shield: outside the relaxed invariant the network acts unchecked;
/// inside, the highest-scored allowed action is taken.
pub fn jsc_filter(
    scores: &ActionScores,
    ego: &CarState,
    other: &CarState,
    c: &Constants,
    eps_v: f64,
) -> ShieldDecision {
    let proposed = select_action(scores);
    if !model_monitor(ego, other, c, eps_v) {
        return ShieldDecision {
            action: proposed,
            overridden: false,
            monitor_active: false,
        };
    }
    let action = scores
        .ranked()
        .into_iter()
        .find(|a| ctrl_nn_allows(*a, ego, other, c))
        // braking is always allowed behind; ahead, fall back like VeriPhy
        .unwrap_or_else(|| fallback_action(ego, other));
    ShieldDecision {
        action,
        overridden: action != proposed,
        monitor_active: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> Constants {
        Constants::highway(-3.0)
    }

    fn duo() -> (CarState, CarState) {
        (CarState::new(0.0, 12.0, 0.0), CarState::new(40.0, 10.0, 0.0))
    }

    #[test]
    fn brake_is_always_allowed() {
        let c = c();
        for (ego, other) in [
            duo(),
            (CarState::new(100.0, 40.0, 0.0), CarState::new(0.0, 0.0, 0.0)),
            (CarState::new(0.0, 40.0, 0.0), CarState::new(1.0, 0.0, 0.0)),
        ] {
            assert_eq!(allow_behind(Action::Brake, &ego, &other, &c), Verdict::ALLOW);
        }
    }

    #[test]
    fn allow_behind_examples() {
        let c = c();
        let (ego, other) = duo();
        assert!(allow_behind(Action::Idle, &ego, &other, &c).allowed);
        assert!(ctrl_nn_allows(Action::Idle, &ego, &other, &c));
        let v = allow_behind(Action::Accelerate, &ego, &other, &c);
        assert_eq!(v, Verdict::deny(DenialReason::AccelMargin));
        assert!(!ctrl_nn_allows(Action::Accelerate, &ego, &other, &c));
    }

    #[test]
    fn denial_reasons() {
        let c = c();
        let other = CarState::new(40.0, 10.0, 0.0);
        let r = |ego: CarState, act| allow_behind(act, &ego, &other, &c).reason;
        assert_eq!(r(CarState::new(50.0, 0.0, 0.0), Action::Idle), Some(DenialReason::NotBehind));
        assert_eq!(r(CarState::new(37.0, 0.0, 0.0), Action::Idle), Some(DenialReason::GapViolation));
        assert_eq!(
            r(CarState::new(0.0, 40.0, 0.0), Action::Accelerate),
            Some(DenialReason::StoppingMargin)
        );
        // braking keeps the margin (37.5 + 5 < 50), idling does not (37.5 + 15 + 5 ≥ 50)
        assert_eq!(r(CarState::new(0.0, 15.0, 0.0), Action::Idle), Some(DenialReason::IdleMargin));
    }

    #[test]
    fn ctrl_nn_branches() {
        let c = c();
        let (ego, other) = duo();
        // behind, brake in [Bmax, Bmin]
        assert!(ctrl_nn_allows(Action::Brake, &ego, &other, &c));
        // ahead of a slower car with a large gap
        let ahead = CarState::new(50.0, 30.0, 0.0);
        let behind = CarState::new(0.0, 35.0, 0.0);
        assert!(ctrl_nn_allows(Action::Accelerate, &ahead, &behind, &c));
    }

    #[test]
    fn model_monitor_relaxation() {
        let c = c();
        let (ego, other) = duo();
        assert!(model_monitor(&ego, &other, &c, DEFAULT_EPS_V));
        let fast = CarState::new(0.0, c.v + DEFAULT_EPS_V / 2.0, 0.0);
        let far = CarState::new(1000.0, 10.0, 0.0);
        assert!(model_monitor(&fast, &far, &c, DEFAULT_EPS_V));
        assert!(!model_monitor(&fast, &far, &c, 0.0));
        let close = CarState::new(36.0, 0.0, 0.0);
        assert!(!model_monitor(&close, &other, &c, DEFAULT_EPS_V));
    }

    #[test]
    fn veriphy_examples() {
        let c = c();
        let (ego, other) = duo();
        let idle = veriphy_step(&ActionScores::new(0.0, 1.0, 0.0), &ego, &other, &c);
        assert_eq!((idle.action, idle.overridden), (Action::Idle, false));
        let accel = veriphy_step(&ActionScores::new(0.0, 0.0, 1.0), &ego, &other, &c);
        assert_eq!((accel.action, accel.overridden), (Action::Brake, true));
        assert!(accel.monitor_active);
        let brake = veriphy_step(&ActionScores::new(1.0, 0.0, 0.0), &ego, &other, &c);
        assert!(!brake.overridden);
    }

    #[test]
    fn jsc_examples() {
        let c = c();
        let (ego, other) = duo();
        let d = jsc_filter(&ActionScores::new(0.0, 1.0, 2.0), &ego, &other, &c, DEFAULT_EPS_V);
        assert_eq!((d.action, d.overridden, d.monitor_active), (Action::Idle, true, true));

        // outside the invariant: pass through
        let close = CarState::new(36.0, 10.0, 0.0);
        let d = jsc_filter(&ActionScores::new(0.0, 1.0, 2.0), &close, &other, &c, DEFAULT_EPS_V);
        assert_eq!((d.action, d.overridden, d.monitor_active), (Action::Accelerate, false, false));

        // far away: everything allowed
        let far = CarState::new(1000.0, 10.0, 0.0);
        let d = jsc_filter(&ActionScores::new(0.0, 1.0, 2.0), &ego, &far, &c, DEFAULT_EPS_V);
        assert_eq!((d.action, d.overridden), (Action::Accelerate, false));
    }
}
