//! Acceleration-producing controllers: the envelope fallback and guard, the
//! environment drivers, and the reference-velocity action controller.

use serde::{Deserialize, Serialize};

use crate::envelope::{safe_back, safe_front};
use crate::error::{Error, Result};
use crate::model::{CarState, Constants};
use crate::nn::Action;

/// Deterministic fallback: brake at `Bmin` when behind (ties count as
/// behind), accelerate at `Amin` when ahead.
pub fn fallback_accel(ego: &CarState, other: &CarState, c: &Constants) -> f64 {
    if ego.x <= other.x {
        c.b_min
    } else {
        c.a_min
    }
}

/// The controller guard: the candidate acceleration is kept iff it satisfies
/// `safe_back ∨ safe_front`.
pub fn envelope_check(ego: &CarState, other: &CarState, a_candidate: f64, c: &Constants) -> bool {
    let ego = ego.with_accel(a_candidate);
    safe_back(&ego, other, c) || safe_front(&ego, other, c)
}

/// Envelope controller: the candidate if the guard accepts it, the fallback
/// otherwise.
pub fn guarded_accel(ego: &CarState, other: &CarState, a_candidate: f64, c: &Constants) -> f64 {
    if envelope_check(ego, other, a_candidate, c) {
        a_candidate
    } else {
        fallback_accel(ego, other, c)
    }
}

/// Intelligent Driver Model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdmParams {
    /// Desired speed (m/s).
    pub v0: f64,
    /// Jam distance (m).
    pub s0: f64,
    /// Desired time headway (s).
    pub time_headway: f64,
    /// Maximal acceleration (m/s²).
    pub a: f64,
    /// Comfortable deceleration (m/s², positive).
    pub b: f64,
    pub delta: f64,
}

impl Default for IdmParams {
    fn default() -> Self {
        Self {
            v0: 30.0,
            s0: 10.0,
            time_headway: 1.5,
            a: 3.0,
            b: 5.0,
            delta: 4.0,
        }
    }
}

impl IdmParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.v0, self.s0, self.time_headway, self.a, self.b, self.delta];
        if all.iter().all(|p| *p > 0.0) {
            Ok(())
        } else {
            Err(Error::Argument(format!("IDM parameters must be positive: {self:?}")))
        }
    }
}

/// IDM acceleration clamped to `[Bmax, Amax]`:
/// `a·(1 - (v/v0)^δ - (s*/s)²)` with `s* = s0 + v·Th + v·Δv/(2·√(a·b))`.
///
/// The gap `s` is bumper to bumper, `leader.x - x - L`. Without a leader the
/// interaction term vanishes; a non-positive gap yields `Bmax`.
pub fn idm_accel(me: &CarState, leader: Option<&CarState>, p: &IdmParams, c: &Constants) -> f64 {
    let free = p.a * (1.0 - (me.v / p.v0).powf(p.delta));
    let raw = match leader {
        None => free,
        Some(lead) => {
            let gap = lead.x - me.x - c.l;
            if gap <= 0.0 {
                return c.b_max;
            }
            let dv = me.v - lead.v;
            let desired = p.s0 + me.v * p.time_headway + me.v * dv / (2.0 * (p.a * p.b).sqrt());
            free - p.a * (desired / gap).powi(2)
        }
    };
    raw.clamp(c.b_max, c.a_max)
}

pub fn emergency_brake_accel(c: &Constants) -> f64 {
    c.b_max
}

/// Reference-velocity grid step and ceiling of the meta-action controller.
pub const META_STEP: f64 = 5.0;
pub const META_MAX: f64 = 40.0;

/// Default gain of the reference-velocity proportional controller (1/s).
pub const META_GAIN: f64 = 1.0 / 0.6;

/// Meta-action semantics: the action moves a reference velocity on the grid
/// `{0, 5, …, 40}` and a proportional controller tracks it.
///
/// Returns the commanded acceleration `clamp(gain·(v_r' - v), Bmax, Amax)`
/// and the new reference `v_r'`. "Brake" can thus accelerate a car that is
/// slower than its reference.
pub fn meta_action_accel(v: f64, v_ref: f64, act: Action, gain: f64, c: &Constants) -> (f64, f64) {
    let next = match act {
        Action::Brake => (v_ref - META_STEP).max(0.0),
        Action::Idle => v_ref,
        Action::Accelerate => (v_ref + META_STEP).min(META_MAX),
    };
    ((gain * (next - v)).clamp(c.b_max, c.a_max), next)
}

/// Behaviour of an environment car.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EnvPolicy {
    Idm(IdmParams),
    EmergencyBrake,
    ConstantAccel(f64),
    /// Piecewise-constant acceleration: `(duration, a)` segments played in
    /// order; the last acceleration is held afterwards.
    Scripted(Vec<(f64, f64)>),
    /// IDM until an emergency brake is triggered, which happens with the
    /// given probability in each control round and then persists.
    RandomBrake { probability: f64, idm: IdmParams },
}

impl EnvPolicy {
    pub fn validate(&self, c: &Constants) -> Result<()> {
        let in_range = |a: f64| c.b_max <= a && a <= c.a_max;
        match self {
            EnvPolicy::Idm(p) => p.validate(),
            EnvPolicy::EmergencyBrake => Ok(()),
            EnvPolicy::ConstantAccel(a) if in_range(*a) => Ok(()),
            EnvPolicy::ConstantAccel(a) => {
                Err(Error::Argument(format!("acceleration {a} outside [Bmax, Amax]")))
            }
            EnvPolicy::Scripted(steps) => {
                if steps.is_empty() {
                    return Err(Error::Argument("empty script".into()));
                }
                match steps.iter().find(|(d, a)| !(*d >= 0.0) || !in_range(*a)) {
                    Some((d, a)) => Err(Error::Argument(format!(
                        "script segment ({d}, {a}) needs a non-negative duration and an acceleration in [Bmax, Amax]"
                    ))),
                    None => Ok(()),
                }
            }
            EnvPolicy::RandomBrake { probability, idm } => {
                if !(0.0..=1.0).contains(probability) {
                    return Err(Error::Argument(format!("brake probability {probability}")));
                }
                idm.validate()
            }
        }
    }

    /// Acceleration of a car driving this policy at time `t`. `braking` is the
    /// latched emergency-brake flag used by [`EnvPolicy::RandomBrake`].
    pub fn accel(
        &self,
        me: &CarState,
        leader: Option<&CarState>,
        t: f64,
        braking: bool,
        c: &Constants,
    ) -> f64 {
        match self {
            EnvPolicy::Idm(p) => idm_accel(me, leader, p, c),
            EnvPolicy::EmergencyBrake => emergency_brake_accel(c),
            EnvPolicy::ConstantAccel(a) => *a,
            EnvPolicy::Scripted(steps) => script_at(steps, t),
            EnvPolicy::RandomBrake { idm, .. } => {
                if braking {
                    emergency_brake_accel(c)
                } else {
                    idm_accel(me, leader, idm, c)
                }
            }
        }
    }

    /// Per-round probability of latching an emergency brake.
    pub fn brake_probability(&self) -> f64 {
        match self {
            EnvPolicy::RandomBrake { probability, .. } => *probability,
            _ => 0.0,
        }
    }
}

fn script_at(steps: &[(f64, f64)], t: f64) -> f64 {
    let mut end = 0.0;
    for (d, a) in steps {
        end += d;
        if t < end {
            return *a;
        }
    }
    steps.last().map_or(0.0, |s| s.1)
}

impl std::fmt::Display for EnvPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnvPolicy::Idm(_) => f.write_str("idm"),
            EnvPolicy::EmergencyBrake => f.write_str("brake"),
            EnvPolicy::ConstantAccel(a) => write!(f, "const:{a}"),
            EnvPolicy::Scripted(_) => f.write_str("scripted"),
            EnvPolicy::RandomBrake { probability, .. } => write!(f, "random-brake:{probability}"),
        }
    }
}
