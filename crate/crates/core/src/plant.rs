//! Car kinematics: acceleration saturation, closed-form and forward-Euler
//! integration with velocity clamping, and collision checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CarState, Constants};

/// How the continuous dynamics are integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrator {
    /// Closed-form piecewise-constant-acceleration kinematics.
    Exact,
    /// Forward Euler with a fixed number of substeps per simulated second.
    Euler { substeps_per_second: u32 },
}

impl Integrator {
    pub fn euler(substeps_per_second: u32) -> Result<Self> {
        if substeps_per_second == 0 {
            return Err(Error::Argument("Euler needs at least one substep per second".into()));
        }
        Ok(Self::Euler {
            substeps_per_second,
        })
    }

    /// Substeps per second; `None` stands for the exact integrator.
    pub fn resolution(&self) -> Option<u32> {
        match self {
            Self::Exact => None,
            Self::Euler {
                substeps_per_second,
            } => Some(*substeps_per_second),
        }
    }
}

impl std::fmt::Display for Integrator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Exact => f.write_str("exact"),
            Self::Euler {
                substeps_per_second,
            } => write!(f, "euler:{substeps_per_second}"),
        }
    }
}

impl std::str::FromStr for Integrator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(Self::Exact);
        }
        let n = s
            .strip_prefix("euler:")
            .and_then(|n| n.parse::<u32>().ok())
            .ok_or_else(|| Error::Argument(format!("unknown integrator `{s}`, use exact or euler:N")))?;
        Self::euler(n)
    }
}

/// A car that stands still cannot brake further and a car at the speed limit
/// cannot accelerate further: its acceleration is set to 0.
pub fn acc_correction(s: CarState, c: &Constants) -> CarState {
    if (s.v == 0.0 && s.a < 0.0) || (s.v == c.v && s.a > 0.0) {
        s.with_accel(0.0)
    } else {
        s
    }
}

/// Closed-form integration over `dt` with the velocity confined to `[0, V]`.
///
/// When the velocity reaches a bound inside the step, the car continues at
/// that bound for the rest of the step. The `a` field is left untouched. An
/// initial velocity outside `[0, V]` is clamped first.
pub fn exact_step(s: CarState, dt: f64, c: &Constants) -> Result<CarState> {
    if !(dt >= 0.0) {
        return Err(Error::Argument(format!("negative time step {dt}")));
    }
    Ok(exact_step_unchecked(s, dt, c))
}

pub(crate) fn exact_step_unchecked(s: CarState, dt: f64, c: &Constants) -> CarState {
    let v = s.v.clamp(0.0, c.v);
    let a = s.a;
    let bound = if a > 0.0 {
        c.v
    } else if a < 0.0 {
        0.0
    } else {
        return CarState::new(s.x + v * dt, v, a);
    };
    let t_hit = (bound - v) / a;
    if t_hit < dt {
        let x = s.x + v * t_hit + 0.5 * a * t_hit * t_hit + bound * (dt - t_hit);
        CarState::new(x, bound, a)
    } else {
        let x = s.x + v * dt + 0.5 * a * dt * dt;
        CarState::new(x, (v + a * dt).clamp(0.0, c.v), a)
    }
}

/// One forward-Euler substep: position from the pre-step velocity, then the
/// velocity update clamped to `[0, V]`.
pub fn euler_substep(s: CarState, h: f64, c: &Constants) -> CarState {
    CarState::new(s.x + s.v * h, (s.v + s.a * h).clamp(0.0, c.v), s.a)
}

/// Advance one car by `dt` with the chosen integrator. Euler runs
/// `round(dt · N)` substeps of length `1/N`.
pub fn integrate(s: CarState, dt: f64, integ: Integrator, c: &Constants) -> Result<CarState> {
    match integ {
        Integrator::Exact => exact_step(s, dt, c),
        Integrator::Euler {
            substeps_per_second,
        } => {
            if !(dt >= 0.0) {
                return Err(Error::Argument(format!("negative time step {dt}")));
            }
            let h = 1.0 / f64::from(substeps_per_second);
            let n = (dt * f64::from(substeps_per_second)).round() as usize;
            Ok((0..n).fold(s, |s, _| euler_substep(s, h, c)))
        }
    }
}

/// Two cars collide when their positions are less than `L` apart.
pub fn collision(a: &CarState, b: &CarState, c: &Constants) -> bool {
    (a.x - b.x).abs() < c.l
}

/// Smallest signed distance `b.x - a.x` reached while both cars evolve
/// exactly over `[0, dt]`; `b` is the car in front.
///
/// The gap is piecewise quadratic; its minimum lies at the step ends, at a
/// time where one car reaches a velocity bound, or where the relative
/// velocity vanishes. All those candidates are evaluated.
pub fn min_gap_exact(a: &CarState, b: &CarState, dt: f64, c: &Constants) -> f64 {
    let mut knots = vec![0.0, dt];
    for s in [a, b] {
        if let Some(t) = bound_hit_time(s, c) {
            if t > 0.0 && t < dt {
                knots.push(t);
            }
        }
    }
    knots.sort_by(f64::total_cmp);
    let mut candidates = knots.clone();
    for w in knots.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let (sa, sb) = (exact_step_unchecked(*a, t0, c), exact_step_unchecked(*b, t0, c));
        // no velocity bound is reached inside (t0, t1): each car either keeps
        // its acceleration or already rests at a bound for the whole piece
        let mid = 0.5 * (t0 + t1);
        let acc = |s: &CarState| match bound_hit_time(s, c) {
            Some(hit) if hit <= mid => 0.0,
            _ => s.a,
        };
        let rel_v = sb.v - sa.v;
        let rel_a = acc(b) - acc(a);
        if rel_a != 0.0 {
            let tau = -rel_v / rel_a;
            if tau > 0.0 && t0 + tau < t1 {
                candidates.push(t0 + tau);
            }
        }
    }
    candidates
        .into_iter()
        .map(|t| exact_step_unchecked(*b, t, c).x - exact_step_unchecked(*a, t, c).x)
        .fold(f64::INFINITY, f64::min)
}

fn bound_hit_time(s: &CarState, c: &Constants) -> Option<f64> {
    let v = s.v.clamp(0.0, c.v);
    if s.a > 0.0 {
        Some((c.v - v) / s.a)
    } else if s.a < 0.0 {
        Some(v / -s.a)
    } else {
        None
    }
}

/// Advance all cars together for `dt`. Returns the new states and whether any
/// two adjacent cars (in slice order) collided at some checked instant.
///
/// Exact integration checks the continuous-time minimum gap; Euler checks
/// after every substep.
pub fn advance_cars(
    cars: &[CarState],
    dt: f64,
    integ: Integrator,
    c: &Constants,
) -> Result<(Vec<CarState>, bool)> {
    advance_cars_detailed(cars, dt, integ, c).map(|(next, pair)| (next, pair.is_some()))
}

/// Like [`advance_cars`], reporting the lowest index `i` such that cars `i`
/// and `i + 1` collided.
pub fn advance_cars_detailed(
    cars: &[CarState],
    dt: f64,
    integ: Integrator,
    c: &Constants,
) -> Result<(Vec<CarState>, Option<usize>)> {
    if !(dt >= 0.0) {
        return Err(Error::Argument(format!("negative time step {dt}")));
    }
    match integ {
        Integrator::Exact => {
            let pair = cars
                .windows(2)
                .position(|w| min_gap_exact(&w[0], &w[1], dt, c) < c.l);
            let next = cars.iter().map(|s| exact_step_unchecked(*s, dt, c)).collect();
            Ok((next, pair))
        }
        Integrator::Euler {
            substeps_per_second,
        } => {
            let h = 1.0 / f64::from(substeps_per_second);
            let n = (dt * f64::from(substeps_per_second)).round() as usize;
            let mut cur = cars.to_vec();
            let mut pair: Option<usize> = None;
            for _ in 0..n {
                for s in cur.iter_mut() {
                    *s = euler_substep(*s, h, c);
                }
                if let Some(i) = cur.windows(2).position(|w| collision(&w[0], &w[1], c)) {
                    pair = Some(pair.map_or(i, |p| p.min(i)));
                }
            }
            Ok((cur, pair))
        }
    }
}
