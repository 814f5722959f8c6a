//! Oracles shared by the integration tests. Nothing here calls the plant or
//! the verifier, so agreement with them is evidence rather than tautology.

#![allow(dead_code)]

use highway_core::envelope::invariant_behind;
use highway_core::nn::{Action, Mlp};
use highway_core::shield::ctrl_nn_allows;
use highway_core::{CarState, Constants};
use rand::Rng;

/// One constant-acceleration stretch of a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct Piece {
    pub t0: f64,
    pub x0: f64,
    pub v0: f64,
    pub a: f64,
}

impl Piece {
    pub fn pos(&self, t: f64) -> f64 {
        let d = t - self.t0;
        self.x0 + self.v0 * d + 0.5 * self.a * d * d
    }

    pub fn vel(&self, t: f64) -> f64 {
        self.v0 + self.a * (t - self.t0)
    }
}

/// Exact trajectory on `[0, horizon]` of a car that applies `schedule[i].1`
/// for `schedule[i].0` seconds, holding the last acceleration until the
/// horizon, with velocity kept in `[0, vmax]` (a bound, once reached, stops
/// the acceleration that pushes against it).
pub fn trajectory(x: f64, v: f64, schedule: &[(f64, f64)], vmax: f64, horizon: f64) -> Vec<Piece> {
    let mut pieces = Vec::new();
    let (mut t, mut x, mut v) = (0.0, x, v.clamp(0.0, vmax));
    let mut seg_start = 0.0;
    for (k, &(dur, a)) in schedule.iter().enumerate() {
        let seg_end = if k + 1 == schedule.len() {
            horizon
        } else {
            (seg_start + dur).min(horizon)
        };
        while t < seg_end {
            let blocked = (a < 0.0 && v <= 0.0) || (a > 0.0 && v >= vmax);
            let a_eff = if blocked { 0.0 } else { a };
            let mut end = seg_end;
            let mut bound = None;
            if a_eff != 0.0 {
                let target = if a_eff < 0.0 { 0.0 } else { vmax };
                let tb = t + (target - v) / a_eff;
                if tb < seg_end {
                    end = tb;
                    bound = Some(target);
                }
            }
            let p = Piece { t0: t, x0: x, v0: v, a: a_eff };
            pieces.push(p);
            x = p.pos(end);
            v = bound.unwrap_or_else(|| p.vel(end));
            t = end;
        }
        seg_start = seg_end;
        if t >= horizon {
            break;
        }
    }
    if pieces.is_empty() {
        pieces.push(Piece { t0: 0.0, x0: x, v0: v, a: 0.0 });
    }
    pieces
}

fn piece_at(ps: &[Piece], t: f64) -> &Piece {
    ps.iter().rev().find(|p| p.t0 <= t).unwrap_or(&ps[0])
}

/// Minimum over `[0, horizon]` of `front(t) - back(t)`.
pub fn min_gap(back: &[Piece], front: &[Piece], horizon: f64) -> f64 {
    let mut knots: Vec<f64> = back
        .iter()
        .chain(front)
        .map(|p| p.t0)
        .chain([0.0, horizon])
        .filter(|t| (0.0..=horizon).contains(t))
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let gap = |t: f64| piece_at(front, t).pos(t) - piece_at(back, t).pos(t);
    let mut best = f64::INFINITY;
    for w in knots.windows(2) {
        let (ta, tb) = (w[0], w[1]);
        let mid = 0.5 * (ta + tb);
        let (pb, pf) = (piece_at(back, mid), piece_at(front, mid));
        best = best.min(gap(ta)).min(gap(tb));
        // stationary point of the relative motion on this stretch
        let da = pf.a - pb.a;
        if da != 0.0 {
            let ts = ta - (pf.vel(ta) - pb.vel(ta)) / da;
            if ta < ts && ts < tb {
                best = best.min(pf.pos(ts) - pb.pos(ts));
            }
        }
    }
    best.min(gap(horizon))
}

/// Worst case behind the other car: the ego holds `ego.a` for `t` seconds
/// then brakes at `b_min`; the other car brakes at `b_max` throughout.
pub fn behind_rollout_min_gap(
    ego: &CarState,
    other: &CarState,
    t: f64,
    b_min: f64,
    b_max: f64,
    vmax: f64,
) -> f64 {
    let horizon = t + vmax / -b_min + vmax / -b_max + 1.0;
    let e = trajectory(ego.x, ego.v, &[(t, ego.a), (f64::INFINITY, b_min)], vmax, horizon);
    let o = trajectory(other.x, other.v, &[(f64::INFINITY, b_max)], vmax, horizon);
    min_gap(&e, &o, horizon)
}

/// Worst case ahead of the other car: the ego holds `ego.a` for `t` seconds
/// then accelerates at `a_min`; the other car accelerates at `a_max`.
pub fn ahead_rollout_min_gap(
    ego: &CarState,
    other: &CarState,
    t: f64,
    a_min: f64,
    a_max: f64,
    vmax: f64,
) -> f64 {
    let horizon = t + 2.0 * vmax / a_min + vmax / a_max + 1.0;
    let e = trajectory(ego.x, ego.v, &[(t, ego.a), (f64::INFINITY, a_min)], vmax, horizon);
    let o = trajectory(other.x, other.v, &[(f64::INFINITY, a_max)], vmax, horizon);
    min_gap(&o, &e, horizon)
}

/// The action an argmax with ties toward the slower action picks, written
/// out independently of the library.
pub fn argmax_slowest(y: &[f64]) -> Action {
    let mut best = 0;
    for i in 1..3 {
        if y[i] > y[best] {
            best = i;
        }
    }
    [Action::Brake, Action::Idle, Action::Accelerate][best]
}

/// Physical cars of a normalized network input in `(p, x, y, vx, vy)`
/// order: ego `x/(5V)`, `v/(2V)`, others relative to the ego.
pub fn decode(input: &[f64], vmax: f64) -> Vec<CarState> {
    let ego = CarState::new(input[1] * 5.0 * vmax, input[3] * 2.0 * vmax, 0.0);
    let mut cars = vec![ego];
    for car in input.chunks(5).skip(1) {
        if car[0] != 1.0 {
            break;
        }
        cars.push(CarState::new(
            ego.x + car[1] * 5.0 * vmax,
            ego.v + car[3] * 2.0 * vmax,
            0.0,
        ));
    }
    cars
}

/// Uniform input of the verification region with `present` cars, in
/// `(p, x, y, vx, vy)` order; extra cars are not forced into order.
pub fn uniform_input(rng: &mut impl Rng, width: usize, present: usize) -> Vec<f64> {
    let mut input = vec![0.0; width];
    for car in 0..present {
        let b = car * 5;
        input[b] = 1.0;
        if car == 0 {
            input[b + 1] = rng.gen_range(0.0..=1.0);
            input[b + 3] = rng.gen_range(0.0..=1.0);
        } else {
            input[b + 1] = rng.gen_range(-1.0..=1.0);
            input[b + 3] = rng.gen_range(-1.0..=1.0);
        }
    }
    input
}

/// Smallest gap making `pred` true, by bisection; the envelope predicates
/// are monotone in the gap. `None` if even a huge gap fails.
pub fn threshold_gap(pred: impl Fn(f64) -> bool) -> Option<f64> {
    let (mut lo, mut hi) = (0.0, 5000.0);
    if !pred(hi) {
        return None;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Gap at which the stopping condition of `act` has zero margin, written
/// from the kinematics rather than taken from the library.
pub fn zero_margin_gap(act: Action, v_e: f64, v_o: f64, c: &Constants) -> f64 {
    let d_e = v_e * v_e / (2.0 * -c.b_min);
    let d_o = v_o * v_o / (2.0 * -c.b_max);
    let reaction = match act {
        Action::Brake => 0.0,
        Action::Idle => c.t * v_e,
        Action::Accelerate => (c.a_max / -c.b_min + 1.0) * (c.a_max / 2.0 * c.t * c.t + c.t * v_e),
    };
    d_e + reaction + c.l - d_o
}

/// Random behind state: half uniform gaps, a quarter within 1 m of the
/// minimal gap `L`, a quarter within 1 m of a zero stopping margin.
pub fn behind_state(rng: &mut impl Rng, act: Action, c: &Constants) -> (CarState, CarState) {
    let v_e = rng.gen_range(0.0..=c.v);
    let v_o = rng.gen_range(0.0..=c.v);
    let x_e = rng.gen_range(-100.0..100.0);
    let gap = match rng.gen_range(0..4) {
        0 | 1 => rng.gen_range(c.l..300.0),
        2 => rng.gen_range(c.l..c.l + 1.0),
        _ => {
            let band = [Action::Brake, act][rng.gen_range(0..2)];
            (zero_margin_gap(band, v_e, v_o, c) + rng.gen_range(-1.0..1.0)).max(c.l)
        }
    };
    (CarState::new(x_e, v_e, 0.0), CarState::new(x_e + gap, v_o, 0.0))
}

/// Independent violation check: inside the invariant with the front car
/// ahead, the argmax is forbidden by the guard semantics.
pub fn oracle_violation(m: &Mlp, input: &[f64], c: &Constants) -> Option<Action> {
    let cars = decode(input, c.v);
    if cars.len() < 2 || !(0.0..=c.v).contains(&cars[0].v) {
        return None;
    }
    let ordered = cars
        .windows(2)
        .skip(1)
        .all(|w| w[0].x + c.l <= w[1].x && w[0].v <= w[1].v);
    if !ordered || !invariant_behind(&cars[0], &cars[1], c) {
        return None;
    }
    let act = argmax_slowest(&m.eval(input).unwrap());
    (!ctrl_nn_allows(act, &cars[0], &cars[1], c)).then_some(act)
}
