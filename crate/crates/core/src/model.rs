//! Constants and state types shared by every other module.
//!
//! Naming: `ego` is the controlled car, `other` the car it must keep its
//! distance from. Accelerations are signed; braking values are negative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symbolic parameters of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Maximal time between two ego controller runs (s).
    pub t: f64,
    /// Car length and minimal gap (m).
    pub l: f64,
    /// Speed limit (m/s).
    pub v: f64,
    /// Acceleration the ego can always produce (m/s²).
    pub a_min: f64,
    /// Maximal acceleration of any car (m/s²).
    pub a_max: f64,
    /// Braking deceleration the ego can always produce (m/s², negative).
    pub b_min: f64,
    /// Maximal braking deceleration of any car (m/s², negative).
    pub b_max: f64,
}

impl Constants {
    /// The highway instantiation: T=1, L=5, V=40, Amin=Amax=5, Bmax=-5 and the
    /// given guaranteed brake `b_min` (usually -3 or -5).
    pub fn highway(b_min: f64) -> Self {
        Self {
            t: 1.0,
            l: 5.0,
            v: 40.0,
            a_min: 5.0,
            a_max: 5.0,
            b_min,
            b_max: -5.0,
        }
    }

    pub fn is_valid(&self) -> bool {
        ctx_valid(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Constants(format!(
                "need T > 0, L > 0, V > 0 and B_max <= B_min < 0 < A_min <= A_max, got {self:?}"
            )))
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::highway(-3.0)
    }
}

/// True iff the constants satisfy the context assumptions
/// `T > 0 ∧ L > 0 ∧ V > 0 ∧ Bmax ≤ Bmin < 0 < Amin ≤ Amax`.
pub fn ctx_valid(c: &Constants) -> bool {
    c.t > 0.0
        && c.l > 0.0
        && c.v > 0.0
        && c.b_max <= c.b_min
        && c.b_min < 0.0
        && 0.0 < c.a_min
        && c.a_min <= c.a_max
}

/// Longitudinal state of one car.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CarState {
    /// Position (m).
    pub x: f64,
    /// Velocity (m/s).
    pub v: f64,
    /// Commanded acceleration (m/s²).
    pub a: f64,
}

impl CarState {
    pub const fn new(x: f64, v: f64, a: f64) -> Self {
        Self { x, v, a }
    }

    pub fn with_accel(self, a: f64) -> Self {
        Self { a, ..self }
    }

    /// Whether the state lies in the modelled context:
    /// `Bmax ≤ a ≤ Amax` and `0 ≤ v ≤ V`.
    pub fn in_context(&self, c: &Constants) -> bool {
        c.b_max <= self.a && self.a <= c.a_max && 0.0 <= self.v && self.v <= c.v
    }
}

/// The two modelled cars plus the controller clock.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DuoState {
    pub ego: CarState,
    pub other: CarState,
    /// Global time (s).
    pub t: f64,
    /// Time of the last ego controller run (s).
    pub tc: f64,
}

impl DuoState {
    pub fn new(ego: CarState, other: CarState) -> Self {
        Self {
            ego,
            other,
            t: 0.0,
            tc: 0.0,
        }
    }

    /// `tc ≤ t ≤ tc + T`.
    pub fn clock_valid(&self, c: &Constants) -> bool {
        self.tc <= self.t && self.t <= self.tc + c.t
    }
}
