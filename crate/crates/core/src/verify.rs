//! Open-loop verification of a policy network against the behind-case
//! controller monitor.
//!
//! The property: for every normalized input inside the verification region
//! whose two-car part satisfies the behind invariant, the action selected by
//! the network is allowed by the monitor. The region covers 2 to 5 present
//! cars (presence is prefix-closed), the ego inputs `x/(5V)` and `v/(2V)`,
//! and per other car its position and velocity relative to the ego. Extra
//! cars must keep `x_{i-1} + L ≤ x_i` and `v_{i-1} ≤ v_i`.
//!
//! Boxes are processed by branch and bound. Interval bound propagation
//! encloses the network outputs, which gives the set of possibly selected
//! actions; interval arithmetic decides the invariant and the per-action
//! monitor conditions. A box where the invariant holds everywhere and some
//! possible action is forbidden everywhere becomes a counterexample region
//! once a concrete representative is confirmed by exact evaluation.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::envelope::invariant_behind;
use crate::error::{Error, Result};
use crate::interval::{Interval, Tri};
use crate::model::{CarState, Constants};
use crate::nn::{
    select_action, Action, ActionScores, FeatureOrder, Mlp, ObsVector, DUO_INPUT,
    FEATURES_PER_CAR, FULL_INPUT, MAX_CARS,
};
use crate::shield::{allow_behind, DenialReason};

/// Ranges of the normalized inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputRegion {
    /// `x_E / (5V)`.
    pub ego_x: Interval,
    /// `v_E / (2V)`.
    pub ego_v: Interval,
    /// `(x_i - x_E) / (5V)`.
    pub rel_x: Interval,
    /// `(v_i - v_E) / (2V)`.
    pub rel_v: Interval,
}

impl Default for InputRegion {
    fn default() -> Self {
        Self {
            ego_x: Interval::new(0.0, 1.0),
            ego_v: Interval::new(0.0, 1.0),
            rel_x: Interval::new(-1.0, 1.0),
            rel_v: Interval::new(-1.0, 1.0),
        }
    }
}

/// A box of normalized inputs for a fixed number of present cars.
///
/// `dims` holds `[x̂_E, v̂_E, Δx̂_2, Δv̂_2, …, Δx̂_k, Δv̂_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputBox {
    pub cars: usize,
    pub dims: Vec<Interval>,
}

impl InputBox {
    /// The whole region for `cars` present cars.
    pub fn root(cars: usize, region: &InputRegion) -> Self {
        assert!((2..=MAX_CARS).contains(&cars), "2 to 5 cars");
        let mut dims = vec![region.ego_x, region.ego_v];
        for _ in 1..cars {
            dims.push(region.rel_x);
            dims.push(region.rel_v);
        }
        Self { cars, dims }
    }

    pub fn dim_name(i: usize) -> String {
        match i {
            0 => "ego_x".into(),
            1 => "ego_v".into(),
            _ if i.is_multiple_of(2) => format!("dx{}", i / 2 + 1),
            _ => format!("dv{}", i / 2 + 1),
        }
    }

    pub fn center(&self) -> Vec<f64> {
        self.dims.iter().map(Interval::mid).collect()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dims.len() && self.dims.iter().zip(point).all(|(d, x)| d.contains(*x))
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.dims
            .iter()
            .map(|d| if d.is_point() { d.lo } else { rng.gen_range(d.lo..=d.hi) })
            .collect()
    }

    fn split(&self, dim: usize) -> (Self, Self) {
        let (l, r) = self.dims[dim].bisect();
        let mut a = self.clone();
        let mut b = self.clone();
        a.dims[dim] = l;
        b.dims[dim] = r;
        (a, b)
    }

    fn widest(&self, candidates: impl Iterator<Item = usize>) -> Option<usize> {
        candidates.max_by(|&a, &b| {
            self.dims[a]
                .width()
                .total_cmp(&self.dims[b].width())
                .then(b.cmp(&a))
        })
    }

    /// Network input intervals: presence and lateral features fixed, absent
    /// cars zero.
    pub fn embed(&self, input_dim: usize, order: FeatureOrder) -> Vec<Interval> {
        let mut out = vec![Interval::point(0.0); input_dim];
        for car in 0..self.cars {
            let base = car * FEATURES_PER_CAR;
            if base >= input_dim {
                break;
            }
            out[base] = Interval::point(1.0);
            out[base + order.x_slot()] = self.dims[2 * car];
            out[base + order.v_slot()] = self.dims[2 * car + 1];
        }
        out
    }

    fn lex_key(&self) -> Vec<f64> {
        self.dims.iter().flat_map(|d| [d.lo, d.hi]).collect()
    }
}

/// Network input for a concrete point of a box.
pub fn embed_point(point: &[f64], input_dim: usize, order: FeatureOrder) -> Vec<f64> {
    let b = InputBox {
        cars: point.len() / 2,
        dims: point.iter().map(|x| Interval::point(*x)).collect(),
    };
    b.embed(input_dim, order).into_iter().map(|i| i.lo).collect()
}

/// Interval bound propagation through `m` for raw input intervals.
pub fn ibp(m: &Mlp, input: &[Interval]) -> Result<Vec<Interval>> {
    if input.len() != m.input_dim() {
        return Err(Error::Dimension {
            layer: 0,
            msg: format!("box has {} inputs, network expects {}", input.len(), m.input_dim()),
        });
    }
    let mut cur = input.to_vec();
    for layer in m.layers() {
        cur = layer
            .weights
            .iter()
            .zip(&layer.bias)
            .map(|(row, b)| {
                // same operation order as the point forward pass
                let (lo, hi) = row.iter().zip(&cur).fold((0.0, 0.0), |(lo, hi), (w, x)| {
                    if *w >= 0.0 {
                        (lo + w * x.lo, hi + w * x.hi)
                    } else {
                        (lo + w * x.hi, hi + w * x.lo)
                    }
                });
                let z = Interval::new(lo + b, hi + b);
                match layer.activation {
                    crate::nn::Activation::Relu => z.relu(),
                    crate::nn::Activation::Linear => z,
                }
            })
            .collect();
    }
    Ok(cur)
}

/// Sound enclosures of the three scores over a box.
pub fn ibp_bounds(m: &Mlp, b: &InputBox, order: FeatureOrder) -> Result<[Interval; 3]> {
    if m.input_dim() == DUO_INPUT && b.cars > 2 {
        return Err(Error::Dimension {
            layer: 0,
            msg: format!("a {DUO_INPUT}-input network cannot see {} cars", b.cars),
        });
    }
    let y = ibp(m, &b.embed(m.input_dim(), order))?;
    match y.as_slice() {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => Err(Error::Dimension {
            layer: m.layers().len() - 1,
            msg: format!("policy needs 3 outputs, got {}", y.len()),
        }),
    }
}

/// Actions the argmax can select for some scores inside the intervals.
pub fn possible_actions(y: &[Interval; 3]) -> Vec<Action> {
    let [y1, y2, y3] = y;
    let mut acts = Vec::with_capacity(3);
    if y1.hi >= y2.lo && y1.hi >= y3.lo {
        acts.push(Action::Brake);
    }
    if y2.hi > y1.lo && y2.hi >= y3.lo {
        acts.push(Action::Idle);
    }
    if y3.hi > y1.lo && y3.hi > y2.lo {
        acts.push(Action::Accelerate);
    }
    acts
}

/// Predicates decided over boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predicate {
    Invariant,
    AllowIdle,
    AllowAccel,
}

struct Physical {
    ego_v: Interval,
    gap: Interval,
    other_v: Interval,
}

fn physical(b: &InputBox, c: &Constants) -> Physical {
    let ego_v = b.dims[1].scale(2.0 * c.v);
    Physical {
        ego_v,
        gap: b.dims[2].scale(5.0 * c.v),
        other_v: ego_v + b.dims[3].scale(2.0 * c.v),
    }
}

/// Distance covered while braking from `v` at constant `a < 0`, or, for
/// `a > 0`, its negated mirror: `v² / (-2a)`.
fn brake_offset(v: Interval, a: f64) -> Interval {
    v.square().div_const(-2.0 * a)
}

/// Three-valued evaluation of a predicate over a box, in physical units.
///
/// Positions enter only through the gap `x_O - x_E`, so the ego position does
/// not widen the result.
pub fn predicate_tri(pred: Predicate, b: &InputBox, c: &Constants) -> Tri {
    let p = physical(b, c);
    let zero = Interval::point(0.0);
    let vmax = Interval::point(c.v);
    let l = Interval::point(c.l);
    let dist_o = p.gap + brake_offset(p.other_v, c.b_max);
    match pred {
        Predicate::Invariant => zero
            .le(p.other_v)
            .and(p.other_v.le(vmax))
            .and(zero.le(p.ego_v))
            .and(p.ego_v.le(vmax))
            .and(l.le(p.gap))
            .and((brake_offset(p.ego_v, c.b_min) + l).lt(dist_o)),
        Predicate::AllowIdle => {
            let consts = Tri::from_bool(c.b_min <= 0.0 && 0.0 <= c.a_max);
            let reach = brake_offset(p.ego_v, c.b_min)
                + p.ego_v.scale(c.t).scale(0.0 / c.b_min + 1.0)
                + l;
            consts.and(zero.le(p.ego_v)).and(reach.lt(dist_o))
        }
        Predicate::AllowAccel => {
            let a = c.a_max;
            let t = c.t;
            let first = Tri::from_bool(c.b_max <= a && a <= c.b_min)
                .and((brake_offset(p.ego_v, c.b_min) + l).lt(dist_o));
            let speed_after = p.ego_v.add_const(a * t);
            let second = Tri::from_bool(c.b_min <= a)
                .and(speed_after.lt(zero))
                .and((brake_offset(p.ego_v, a) + l).lt(dist_o));
            let corr = p
                .ego_v
                .scale(t)
                .add_const(a / 2.0 * t * t)
                .scale(-a / c.b_min + 1.0);
            let third = Tri::from_bool(c.b_min <= a)
                .and(speed_after.ge(zero))
                .and((brake_offset(p.ego_v, c.b_min) + corr + l).lt(dist_o));
            first.or(second).or(third)
        }
    }
}

/// `x_{i-1} + L ≤ x_i ∧ v_{i-1} ≤ v_i` for the extra cars.
fn ordering_tri(b: &InputBox, c: &Constants) -> Tri {
    (3..=b.cars).fold(Tri::True, |acc, car| {
        let (prev, cur) = (2 * (car - 2), 2 * (car - 1));
        let x_prev = b.dims[prev].scale(5.0 * c.v);
        let x_cur = b.dims[cur].scale(5.0 * c.v);
        let v_prev = b.dims[prev + 1].scale(2.0 * c.v);
        let v_cur = b.dims[cur + 1].scale(2.0 * c.v);
        acc.and(x_prev.add_const(c.l).le(x_cur)).and(v_prev.le(v_cur))
    })
}

fn allow_tri(act: Action, b: &InputBox, c: &Constants) -> Tri {
    match act {
        Action::Brake => Tri::True,
        Action::Idle => predicate_tri(Predicate::AllowIdle, b, c),
        Action::Accelerate => predicate_tri(Predicate::AllowAccel, b, c),
    }
}

/// A concrete network input decoded into physical cars.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedInput {
    pub cars: Vec<CarState>,
}

/// Decodes a network input of the verification region; `None` if the input
/// breaks the region's encoding, range or ordering constraints.
pub fn decode_input(
    input: &[f64],
    c: &Constants,
    order: FeatureOrder,
    region: &InputRegion,
) -> Option<DecodedInput> {
    if input.len() != DUO_INPUT && input.len() != FULL_INPUT {
        return None;
    }
    let mut features = [0.0; FULL_INPUT];
    features[..input.len()].copy_from_slice(input);
    let obs = ObsVector { features, order };
    let n_slots = input.len() / FEATURES_PER_CAR;
    let present = obs.present();
    for car in 0..n_slots {
        let block = &input[car * FEATURES_PER_CAR..(car + 1) * FEATURES_PER_CAR];
        let p = block[0];
        let lateral_zero = (0..FEATURES_PER_CAR)
            .filter(|&s| s != 0 && s != order.x_slot() && s != order.v_slot())
            .all(|s| block[s] == 0.0);
        let x = block[order.x_slot()];
        let v = block[order.v_slot()];
        let ok = if car < present {
            let (rx, rv) = if car == 0 {
                (region.ego_x, region.ego_v)
            } else {
                (region.rel_x, region.rel_v)
            };
            rx.contains(x) && rv.contains(v)
        } else {
            p == 0.0 && x == 0.0 && v == 0.0
        };
        if !ok || !lateral_zero {
            return None;
        }
    }
    if present < 2 {
        return None;
    }
    let cars = obs.denormalize(c);
    let ordered = cars
        .windows(2)
        .skip(1)
        .all(|w| w[0].x + c.l <= w[1].x && w[0].v <= w[1].v);
    ordered.then_some(DecodedInput { cars })
}

/// Exact check of a single input: inside the region and the invariant, the
/// network selects an action the monitor forbids. Returns that action.
pub fn exact_violation(
    m: &Mlp,
    input: &[f64],
    c: &Constants,
    order: FeatureOrder,
    region: &InputRegion,
) -> Option<(Action, DenialReason)> {
    if input.len() != m.input_dim() {
        return None;
    }
    let decoded = decode_input(input, c, order, region)?;
    let (ego, front) = (decoded.cars[0], decoded.cars[1]);
    if !invariant_behind(&ego, &front, c) {
        return None;
    }
    let y = m.eval(input).ok()?;
    let act = select_action(&ActionScores::new(y[0], y[1], y[2]));
    allow_behind(act, &ego, &front, c).reason.map(|r| (act, r))
}

/// Exact evaluation of `invariant ∧ selected = act ∧ ¬allow` at `input`.
pub fn confirm(
    m: &Mlp,
    input: &[f64],
    act: Action,
    c: &Constants,
    order: FeatureOrder,
    region: &InputRegion,
) -> bool {
    matches!(exact_violation(m, input, c, order, region), Some((a, _)) if a == act)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionStatus {
    Confirmed,
    Spurious,
}

/// A counterexample region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    pub region: InputBox,
    pub action: Action,
    /// Network input of the representative (confirmed or last tried).
    pub representative: Vec<f64>,
    pub status: RegionStatus,
    pub reason: Option<DenialReason>,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Boxes whose splittable dimensions are all narrower stay undecided.
    pub eps: f64,
    /// Maximal number of processed boxes over all presence patterns.
    pub budget: usize,
    pub order: FeatureOrder,
    pub region: InputRegion,
    /// Presence patterns (number of cars) to explore; empty means all the
    /// network can see.
    pub patterns: Vec<usize>,
    /// Random representatives tried after the box center.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            eps: 1e-3,
            budget: 1_000_000,
            order: FeatureOrder::default(),
            region: InputRegion::default(),
            patterns: Vec::new(),
            samples: 32,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyStatus {
    Safe,
    Violations,
    Undecided,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyStats {
    pub nodes: usize,
    pub time_s: f64,
    pub safe_boxes: usize,
    pub infeasible_boxes: usize,
    pub undecided: usize,
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub status: VerifyStatus,
    /// Sorted by presence pattern, then box bounds.
    pub regions: Vec<RegionReport>,
    pub undecided: Vec<InputBox>,
    pub stats: VerifyStats,
}

impl VerifyOutcome {
    pub fn confirmed(&self) -> impl Iterator<Item = &RegionReport> {
        self.regions
            .iter()
            .filter(|r| r.status == RegionStatus::Confirmed)
    }
}

struct Node {
    region: InputBox,
    resplit: bool,
}

/// Branch-and-bound verification; see the module docs.
pub fn verify(m: &Mlp, c: &Constants, opts: &VerifyOptions) -> Result<VerifyOutcome> {
    c.validate()?;
    m.validate_policy()?;
    if !(opts.eps > 0.0) {
        return Err(Error::Argument(format!("eps must be positive, got {}", opts.eps)));
    }
    let max_cars = if m.input_dim() == DUO_INPUT { 2 } else { MAX_CARS };
    let patterns: Vec<usize> = if opts.patterns.is_empty() {
        (2..=max_cars).collect()
    } else {
        opts.patterns.clone()
    };
    if let Some(p) = patterns.iter().find(|p| !(2..=max_cars).contains(*p)) {
        return Err(Error::Argument(format!(
            "pattern {p} outside 2..={max_cars} for a {}-input network",
            m.input_dim()
        )));
    }

    #[cfg(not(target_arch = "wasm32"))]
    let started = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut stats = VerifyStats::default();
    let mut regions = Vec::new();
    let mut undecided = Vec::new();

    for &cars in &patterns {
        let mut stack = vec![Node {
            region: InputBox::root(cars, &opts.region),
            resplit: false,
        }];
        while let Some(node) = stack.pop() {
            if stats.nodes >= opts.budget {
                undecided.push(node.region);
                continue;
            }
            stats.nodes += 1;
            let b = &node.region;

            let ordering = ordering_tri(b, c);
            if ordering.is_false() {
                stats.infeasible_boxes += 1;
                continue;
            }
            let invariant = predicate_tri(Predicate::Invariant, b, c);
            if invariant.is_false() {
                stats.safe_boxes += 1;
                continue;
            }
            let y = ibp_bounds(m, b, opts.order)?;
            let actions = possible_actions(&y);
            let verdicts: Vec<(Action, Tri)> =
                actions.iter().map(|a| (*a, allow_tri(*a, b, c))).collect();
            if verdicts.iter().all(|(_, t)| t.is_true()) {
                stats.safe_boxes += 1;
                continue;
            }

            let violating: Vec<Action> = verdicts
                .iter()
                .filter(|(_, t)| t.is_false())
                .map(|(a, _)| *a)
                .collect();
            let mut spurious = None;
            if invariant.is_true() && !violating.is_empty() {
                let found = find_representative(m, b, &violating, c, opts, &mut rng);
                match found {
                    Ok(reports) => {
                        regions.extend(reports);
                        continue;
                    }
                    Err(last) if node.resplit => {
                        regions.push(last);
                        continue;
                    }
                    Err(_) => spurious = Some(()),
                }
            }

            // split a dimension that can still change the outcome: every
            // dimension feeds the network, the predicates read dimensions 1
            // to 3 and the ordering reads the extra cars
            let all = 0..b.dims.len();
            let preferred = if actions.len() > 1 || spurious.is_some() {
                b.widest(all.clone())
            } else if !invariant.is_true() || verdicts.iter().any(|(_, t)| *t == Tri::Unknown) {
                b.widest(1..=3)
            } else if ordering == Tri::Unknown {
                b.widest(2..b.dims.len())
            } else {
                None
            };
            let dim = preferred
                .or_else(|| b.widest(all))
                .expect("box has dimensions");
            if b.dims[dim].width() < opts.eps {
                undecided.push(node.region);
                continue;
            }
            let (lo, hi) = b.split(dim);
            let resplit = node.resplit || spurious.is_some();
            stack.push(Node {
                region: hi,
                resplit,
            });
            stack.push(Node {
                region: lo,
                resplit,
            });
        }
    }

    regions.sort_by(|a, b| {
        (a.region.cars, a.region.lex_key())
            .partial_cmp(&(b.region.cars, b.region.lex_key()))
            .expect("finite bounds")
    });
    stats.undecided = undecided.len();
    #[cfg(not(target_arch = "wasm32"))]
    {
        stats.time_s = started.elapsed().as_secs_f64();
    }
    let status = if regions.iter().any(|r| r.status == RegionStatus::Confirmed) {
        VerifyStatus::Violations
    } else if undecided.is_empty() && regions.is_empty() {
        VerifyStatus::Safe
    } else {
        VerifyStatus::Undecided
    };
    Ok(VerifyOutcome {
        status,
        regions,
        undecided,
        stats,
    })
}

/// Tries the box center, then random points. Returns one report per
/// violating action confirmed somewhere, or the spurious report of the last
/// attempt.
fn find_representative(
    m: &Mlp,
    b: &InputBox,
    violating: &[Action],
    c: &Constants,
    opts: &VerifyOptions,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<Vec<RegionReport>, RegionReport> {
    let mut reports: Vec<RegionReport> = Vec::new();
    let mut last = Vec::new();
    for k in 0..=opts.samples {
        let point = match k {
            0 => b.center(),
            _ => {
                let p = b.sample(rng);
                ordered_variant(b, &p).unwrap_or(p)
            }
        };
        let input = embed_point(&point, m.input_dim(), opts.order);
        if let Some((act, reason)) = exact_violation(m, &input, c, opts.order, &opts.region) {
            if violating.contains(&act) && reports.iter().all(|r| r.action != act) {
                reports.push(RegionReport {
                    region: b.clone(),
                    action: act,
                    representative: input.clone(),
                    status: RegionStatus::Confirmed,
                    reason: Some(reason),
                });
            }
        }
        last = input;
        if reports.len() == violating.len() {
            break;
        }
    }
    if reports.is_empty() {
        Err(RegionReport {
            region: b.clone(),
            action: violating[0],
            representative: last,
            status: RegionStatus::Spurious,
            reason: None,
        })
    } else {
        Ok(reports)
    }
}

/// `p` with the extra cars' offsets sorted increasingly, which satisfies the
/// ordering constraints more often; `None` if that leaves the box.
fn ordered_variant(b: &InputBox, p: &[f64]) -> Option<Vec<f64>> {
    if b.cars <= 2 {
        return None;
    }
    let mut q = p.to_vec();
    for offset in [2, 3] {
        let mut vals: Vec<f64> = q[offset..].iter().step_by(2).copied().collect();
        vals.sort_by(f64::total_cmp);
        for (slot, v) in q[offset..].iter_mut().step_by(2).zip(vals) {
            *slot = v;
        }
    }
    b.contains(&q).then_some(q)
}

#[derive(Serialize, Deserialize)]
struct RegionJson {
    pattern: usize,
    #[serde(rename = "box")]
    bounds: BTreeMap<String, [f64; 2]>,
    action: Action,
    representative: Vec<f64>,
    confirmed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    reason: Option<DenialReason>,
}

/// JSON document of a verification run.
#[derive(Serialize, Deserialize)]
pub struct ReportJson {
    pub status: VerifyStatus,
    regions: Vec<RegionJson>,
    pub stats: VerifyStats,
}

/// Largest number of undecided boxes listed in [`VerifyOutcome::to_json`];
/// the full count is in the stats.
pub const MAX_LISTED_UNDECIDED: usize = 1000;

fn box_map(b: &InputBox) -> BTreeMap<String, [f64; 2]> {
    b.dims
        .iter()
        .enumerate()
        .map(|(i, d)| (InputBox::dim_name(i), [d.lo, d.hi]))
        .collect()
}

impl VerifyOutcome {
    pub fn to_json(&self) -> serde_json::Value {
        let regions: Vec<RegionJson> = self
            .regions
            .iter()
            .map(|r| RegionJson {
                pattern: r.region.cars,
                bounds: box_map(&r.region),
                action: r.action,
                representative: r.representative.clone(),
                confirmed: r.status == RegionStatus::Confirmed,
                reason: r.reason,
            })
            .collect();
        let undecided: Vec<_> = self
            .undecided
            .iter()
            .take(MAX_LISTED_UNDECIDED)
            .map(|b| serde_json::json!({"pattern": b.cars, "box": box_map(b)}))
            .collect();
        serde_json::json!({
            "status": self.status,
            "regions": regions,
            "undecided": undecided,
            "stats": self.stats,
        })
    }
}

/// Confirmed representatives of a report file, as `(action, network input)`.
pub fn representatives_from_json(text: &str) -> Result<Vec<(Action, Vec<f64>)>> {
    let report: ReportJson = serde_json::from_str(text)?;
    Ok(report
        .regions
        .into_iter()
        .filter(|r| r.confirmed)
        .map(|r| (r.action, r.representative))
        .collect())
}
