//! Closed-loop simulation: episodes, initial-state sampling, campaigns,
//! falsification from verifier representatives and the Euler-crash search.
//!
//! One control cycle lasts `T`. At its start the ego observes the world, its
//! controller picks an action, every environment car picks an acceleration,
//! the clock `tc` is reset, accelerations are saturated and all cars are
//! integrated for `T`. The episode stops at the first collision between
//! adjacent cars.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::envelope::{invariant_behind, stop_dist_ego, stop_dist_other};
use crate::error::{Error, Result};
use crate::model::{CarState, Constants};
use crate::nn::{
    action_to_accel_with, forward, observe, select_action, Action, FeatureOrder, Mlp, MAX_CARS,
};
use crate::plant::{acc_correction, advance_cars_detailed, min_gap_exact, Integrator};
use crate::policy::{fallback_accel, EnvPolicy};
use crate::shield::{jsc_filter, veriphy_step, DEFAULT_EPS_V};
use crate::verify::{decode_input, InputRegion};

/// All cars of a scenario: the ego first, then the others by increasing
/// position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub cars: Vec<CarState>,
    pub t: f64,
    pub tc: f64,
}

impl WorldState {
    /// A world at time 0 with 2 to 5 cars ordered by position.
    pub fn new(cars: Vec<CarState>) -> Result<Self> {
        if !(2..=MAX_CARS).contains(&cars.len()) {
            return Err(Error::Argument(format!(
                "a world holds 2 to {MAX_CARS} cars, got {}",
                cars.len()
            )));
        }
        if let Some(w) = cars.windows(2).find(|w| w[1].x < w[0].x) {
            return Err(Error::Argument(format!(
                "cars must be ordered by position, {} is behind {}",
                w[1].x, w[0].x
            )));
        }
        Ok(Self {
            cars,
            t: 0.0,
            tc: 0.0,
        })
    }

    pub fn ego(&self) -> &CarState {
        &self.cars[0]
    }

    pub fn front(&self) -> &CarState {
        &self.cars[1]
    }

    /// The behind invariant between the ego and the car in front.
    pub fn in_invariant(&self, c: &Constants) -> bool {
        invariant_behind(self.ego(), self.front(), c)
    }
}

/// How the ego picks its action.
#[derive(Debug, Clone, PartialEq)]
pub enum Controller {
    /// The network's argmax, unchecked.
    Raw(Mlp),
    /// Network action, replaced by the fallback when the monitor forbids it.
    VeriPhy(Mlp),
    /// Highest-ranked allowed action while the relaxed invariant holds.
    Jsc(Mlp),
    /// The verified fallback alone.
    FallbackOnly,
}

impl Controller {
    pub fn name(&self) -> &'static str {
        match self {
            Controller::Raw(_) => "raw",
            Controller::VeriPhy(_) => "veriphy",
            Controller::Jsc(_) => "jsc",
            Controller::FallbackOnly => "fallback",
        }
    }

    /// Builds a controller from its name; every kind but `fallback` needs a
    /// network.
    pub fn from_name(name: &str, net: Option<Mlp>) -> Result<Self> {
        let need = |net: Option<Mlp>| {
            net.ok_or_else(|| Error::Argument(format!("policy `{name}` needs a network")))
        };
        match name {
            "raw" => Ok(Controller::Raw(need(net)?)),
            "veriphy" => Ok(Controller::VeriPhy(need(net)?)),
            "jsc" => Ok(Controller::Jsc(need(net)?)),
            "fallback" => Ok(Controller::FallbackOnly),
            _ => Err(Error::Argument(format!(
                "unknown policy `{name}`, expected raw, veriphy, jsc or fallback"
            ))),
        }
    }

    pub fn is_shielded(&self) -> bool {
        !matches!(self, Controller::Raw(_))
    }

    pub fn network(&self) -> Option<&Mlp> {
        match self {
            Controller::Raw(m) | Controller::VeriPhy(m) | Controller::Jsc(m) => Some(m),
            Controller::FallbackOnly => None,
        }
    }
}

/// Parameters of a single episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeOptions {
    /// Number of control cycles.
    pub steps: usize,
    pub integrator: Integrator,
    pub order: FeatureOrder,
    /// Acceleration of the brake action.
    pub brake: f64,
    /// Velocity slack of the JSC model monitor.
    pub eps_v: f64,
    /// Seed of the environment's random choices.
    pub seed: u64,
}

impl EpisodeOptions {
    pub fn new(c: &Constants) -> Self {
        Self {
            steps: 60,
            integrator: Integrator::Exact,
            order: FeatureOrder::default(),
            brake: c.b_min,
            eps_v: DEFAULT_EPS_V,
            seed: 0,
        }
    }

    pub fn from_config(cfg: &Config, integrator: Integrator) -> Self {
        Self {
            steps: cfg.steps,
            integrator,
            order: cfg.feature_order,
            brake: cfg.brake(),
            eps_v: cfg.eps_v,
            seed: cfg.seed,
        }
    }
}

/// One control cycle, recorded at its start after saturation: `cars[i].a`
/// is the acceleration applied during the cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub cars: Vec<CarState>,
    /// `None` on the final row, which only records the end state.
    pub action: Option<Action>,
    pub overridden: bool,
    /// Adjacent cars collided during this cycle.
    pub collided: bool,
    /// The behind invariant held at the start of the cycle.
    pub in_invariant: bool,
}

/// Why an episode ended in a collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrashCause {
    /// Two environment cars collided.
    Environment,
    /// The episode started outside the behind invariant.
    OutsideInvariant,
    /// The ego drove an unshielded network.
    Unshielded,
    /// Coarse Euler integration.
    Discretization,
    /// None of the above; never expected.
    Unexplained,
}

impl std::fmt::Display for CrashCause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CrashCause::Environment => "environment",
            CrashCause::OutsideInvariant => "outside_invariant",
            CrashCause::Unshielded => "unshielded",
            CrashCause::Discretization => "discretization",
            CrashCause::Unexplained => "unexplained",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub crashed: bool,
    /// Control cycles executed.
    pub steps: usize,
    pub trajectory: Vec<TrajectoryRow>,
    /// Sum over completed cycles of `0.5 + 0.5·v_E/V`.
    pub reward: f64,
    pub overrides: usize,
    pub cause: Option<CrashCause>,
    /// Index `i` of the colliding pair `(i, i + 1)`.
    pub collision_pair: Option<usize>,
}

impl EpisodeResult {
    pub fn action_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for a in self.trajectory.iter().filter_map(|r| r.action) {
            counts[a.index()] += 1;
        }
        counts
    }
}

/// Per-cycle reward: `0.5 + 0.5·v_E/V`.
pub fn step_reward(ego: &CarState, c: &Constants) -> f64 {
    0.5 + 0.5 * ego.v / c.v
}

fn ego_decision(
    ctrl: &Controller,
    cars: &[CarState],
    opts: &EpisodeOptions,
    c: &Constants,
) -> Result<(Action, bool, f64)> {
    let (ego, front) = (&cars[0], &cars[1]);
    let scores = |m: &Mlp| forward(m, &observe(cars, c, opts.order)?);
    let (action, overridden) = match ctrl {
        Controller::Raw(m) => (select_action(&scores(m)?), false),
        Controller::VeriPhy(m) => {
            let d = veriphy_step(&scores(m)?, ego, front, c);
            (d.action, d.overridden)
        }
        Controller::Jsc(m) => {
            let d = jsc_filter(&scores(m)?, ego, front, c, opts.eps_v);
            (d.action, d.overridden)
        }
        Controller::FallbackOnly => {
            let a = fallback_accel(ego, front, c);
            let act = if a < 0.0 { Action::Brake } else { Action::Accelerate };
            return Ok((act, false, a));
        }
    };
    Ok((action, overridden, action_to_accel_with(action, c, opts.brake)))
}

fn env_for(env: &[EnvPolicy], car: usize) -> &EnvPolicy {
    if env.len() == 1 {
        &env[0]
    } else {
        &env[car - 1]
    }
}

/// Runs one episode from `w0`.
///
/// `env` holds one policy per non-ego car, or a single policy shared by all
/// of them. The leader of environment car `i` is car `i + 1`.
pub fn run_episode(
    w0: &WorldState,
    ctrl: &Controller,
    env: &[EnvPolicy],
    opts: &EpisodeOptions,
    c: &Constants,
) -> Result<EpisodeResult> {
    c.validate()?;
    let n = w0.cars.len();
    if env.len() != 1 && env.len() != n - 1 {
        return Err(Error::Argument(format!(
            "need 1 or {} environment policies, got {}",
            n - 1,
            env.len()
        )));
    }
    for p in env {
        p.validate(c)?;
    }
    if !(c.b_max <= opts.brake && opts.brake <= c.b_min) {
        return Err(Error::Argument(format!(
            "brake acceleration {} outside [Bmax, Bmin]",
            opts.brake
        )));
    }
    if let Some(m) = ctrl.network() {
        m.validate_policy()?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut latched = vec![false; n];
    let mut w = w0.clone();
    let mut rows = Vec::with_capacity(opts.steps + 1);
    let mut reward = 0.0;
    let mut overrides = 0;
    let mut collision_pair = None;
    let started_inside = w0.in_invariant(c);

    for _ in 0..opts.steps {
        let (action, overridden, a_ego) = ego_decision(ctrl, &w.cars, opts, c)?;
        let mut next = w.cars.clone();
        next[0].a = a_ego;
        for i in 1..n {
            let policy = env_for(env, i);
            let p = policy.brake_probability();
            if p > 0.0 && !latched[i] && rng.gen_bool(p) {
                latched[i] = true;
            }
            let leader = w.cars.get(i + 1);
            next[i].a = policy.accel(&w.cars[i], leader, w.t, latched[i], c);
        }
        w.tc = w.t;
        let cars: Vec<CarState> = next.into_iter().map(|s| acc_correction(s, c)).collect();
        let (after, mut pair) = advance_cars_detailed(&cars, c.t, opts.integrator, c)?;
        if pair.is_none() {
            // a coarse integrator can jump one car over another
            pair = after.windows(2).position(|p| p[1].x < p[0].x);
        }
        let collided = pair.is_some();
        rows.push(TrajectoryRow {
            t: w.t,
            cars,
            action: Some(action),
            overridden,
            collided,
            in_invariant: w.in_invariant(c),
        });
        overrides += usize::from(overridden);
        w.cars = after;
        w.t += c.t;
        if collided {
            collision_pair = pair;
            break;
        }
        reward += step_reward(&w.cars[0], c);
    }
    let steps = rows.len();
    if steps > 0 {
        rows.push(TrajectoryRow {
            t: w.t,
            cars: w.cars.clone(),
            action: None,
            overridden: false,
            collided: false,
            in_invariant: w.in_invariant(c),
        });
    }
    let crashed = collision_pair.is_some();
    let cause = collision_pair.map(|pair| {
        if pair > 0 {
            CrashCause::Environment
        } else if !started_inside {
            CrashCause::OutsideInvariant
        } else if !ctrl.is_shielded() {
            CrashCause::Unshielded
        } else if opts.integrator != Integrator::Exact {
            CrashCause::Discretization
        } else {
            CrashCause::Unexplained
        }
    });
    Ok(EpisodeResult {
        crashed,
        steps,
        trajectory: rows,
        reward,
        overrides,
        cause,
        collision_pair,
    })
}

/// Most proposals [`sample_initial`] draws before giving up.
pub const MAX_PROPOSALS: usize = 100_000;

/// Rejection sampler for initial worlds.
///
/// The ego position is uniform on `[0, 5V]`, gaps between consecutive cars
/// are exponential with mean `1000/density` metres and velocities uniform on
/// `[0, V]`. A proposal is accepted when the ego and the car in front satisfy
/// the behind invariant and every further car keeps `x_{i-1} + L ≤ x_i` and
/// `v_{i-1} ≤ v_i`.
pub fn sample_initial(c: &Constants, pattern: usize, seed: u64, density: f64) -> Result<WorldState> {
    c.validate()?;
    if !(density > 0.0) {
        return Err(Error::Argument(format!("density must be positive, got {density}")));
    }
    if !(2..=MAX_CARS).contains(&pattern) {
        return Err(Error::Argument(format!("pattern must be 2 to 5 cars, got {pattern}")));
    }
    let mean_gap = 1000.0 / density;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_PROPOSALS {
        let mut x = rng.gen_range(0.0..=5.0 * c.v);
        let mut cars = Vec::with_capacity(pattern);
        for i in 0..pattern {
            if i > 0 {
                let u: f64 = rng.gen();
                x += -mean_gap * (1.0 - u).ln();
            }
            cars.push(CarState::new(x, rng.gen_range(0.0..=c.v), 0.0));
        }
        let extras_ordered = cars
            .windows(2)
            .skip(1)
            .all(|w| w[0].x + c.l <= w[1].x && w[0].v <= w[1].v);
        if extras_ordered && invariant_behind(&cars[0], &cars[1], c) {
            return WorldState::new(cars);
        }
    }
    Err(Error::Sampling {
        attempts: MAX_PROPOSALS,
        msg: format!("no admissible start at density {density} cars/km"),
    })
}

/// A batch of episodes from sampled starts.
#[derive(Debug, Clone)]
pub struct CampaignSpec {
    pub controller: Controller,
    pub env: Vec<EnvPolicy>,
    pub episodes: usize,
    pub pattern: usize,
    pub density: f64,
    pub master_seed: u64,
    pub options: EpisodeOptions,
}

impl CampaignSpec {
    pub fn from_config(
        cfg: &Config,
        controller: Controller,
        env: Vec<EnvPolicy>,
        episodes: usize,
        integrator: Integrator,
    ) -> Self {
        Self {
            controller,
            env,
            episodes,
            pattern: cfg.pattern,
            density: cfg.density,
            master_seed: cfg.seed,
            options: EpisodeOptions::from_config(cfg, integrator),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub episode: usize,
    pub seed: u64,
    pub crashed: bool,
    pub steps: usize,
    pub reward: f64,
    pub overrides: usize,
    pub cause: Option<CrashCause>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub policy: String,
    pub env: String,
    pub integrator: String,
    pub episodes: usize,
    pub crashes: usize,
    pub crash_rate: f64,
    pub reward_mean: f64,
    pub reward_sd: f64,
    pub actions: BTreeMap<String, usize>,
    pub override_rate: f64,
    pub causes: BTreeMap<String, usize>,
    pub master_seed: u64,
}

/// Runs `spec.episodes` episodes; episode `i` uses seed `master_seed + i`
/// for both its start and its environment.
pub fn campaign(c: &Constants, spec: &CampaignSpec) -> Result<(CampaignSummary, Vec<EpisodeSummary>)> {
    if spec.episodes == 0 {
        return Err(Error::Argument("a campaign needs at least one episode".into()));
    }
    let mut per_episode = Vec::with_capacity(spec.episodes);
    let mut actions = [0usize; 3];
    let mut causes = BTreeMap::new();
    for i in 0..spec.episodes {
        let seed = spec.master_seed.wrapping_add(i as u64);
        let w0 = sample_initial(c, spec.pattern, seed, spec.density)?;
        let opts = EpisodeOptions {
            seed,
            ..spec.options
        };
        let r = run_episode(&w0, &spec.controller, &spec.env, &opts, c)?;
        for (acc, n) in actions.iter_mut().zip(r.action_counts()) {
            *acc += n;
        }
        if let Some(cause) = r.cause {
            *causes.entry(cause.to_string()).or_insert(0) += 1;
        }
        per_episode.push(EpisodeSummary {
            episode: i,
            seed,
            crashed: r.crashed,
            steps: r.steps,
            reward: r.reward,
            overrides: r.overrides,
            cause: r.cause,
        });
    }
    let n = per_episode.len() as f64;
    let crashes = per_episode.iter().filter(|e| e.crashed).count();
    let reward_mean = per_episode.iter().map(|e| e.reward).sum::<f64>() / n;
    let reward_sd = (per_episode
        .iter()
        .map(|e| (e.reward - reward_mean).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let total_steps: usize = per_episode.iter().map(|e| e.steps).sum();
    let total_overrides: usize = per_episode.iter().map(|e| e.overrides).sum();
    let env_name = spec
        .env
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let summary = CampaignSummary {
        policy: spec.controller.name().into(),
        env: env_name,
        integrator: spec.options.integrator.to_string(),
        episodes: spec.episodes,
        crashes,
        crash_rate: crashes as f64 / n,
        reward_mean,
        reward_sd,
        actions: Action::ALL
            .iter()
            .map(|a| (a.name().to_string(), actions[a.index()]))
            .collect(),
        override_rate: if total_steps == 0 {
            0.0
        } else {
            total_overrides as f64 / total_steps as f64
        },
        causes,
        master_seed: spec.master_seed,
    };
    Ok((summary, per_episode))
}

/// Worlds encoded by verifier representatives (network inputs). Inputs
/// outside the verification region are skipped.
pub fn representative_starts(
    reps: &[Vec<f64>],
    c: &Constants,
    order: FeatureOrder,
) -> Vec<WorldState> {
    reps.iter()
        .filter_map(|r| decode_input(r, c, order, &InputRegion::default()))
        .filter_map(|d| WorldState::new(d.cars).ok())
        .collect()
}

/// A start that ended in a collision.
#[derive(Debug, Clone, PartialEq)]
pub struct Crash {
    /// Index of the start in the input list.
    pub start: usize,
    pub result: EpisodeResult,
}

/// Runs `ctrl` from every start and keeps the episodes that collide.
pub fn falsify(
    starts: &[WorldState],
    ctrl: &Controller,
    env: &[EnvPolicy],
    opts: &EpisodeOptions,
    c: &Constants,
) -> Result<Vec<Crash>> {
    let mut crashes = Vec::new();
    for (i, w0) in starts.iter().enumerate() {
        let result = run_episode(w0, ctrl, env, opts, c)?;
        if result.crashed {
            crashes.push(Crash { start: i, result });
        }
    }
    Ok(crashes)
}

/// A start that collides under the coarse integrator only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerScenario {
    pub ego: CarState,
    pub front: CarState,
    /// `dist_O - (dist_E(Bmin) + L)` at the start.
    pub margin: f64,
    pub min_gap_coarse: f64,
    pub min_gap_fine: f64,
    pub min_gap_exact: f64,
}

/// Cycles long enough for both cars of a braking scenario to stop.
fn braking_cycles(c: &Constants) -> usize {
    (c.v / -c.b_max.max(c.b_min) / c.t).ceil() as usize + 2
}

/// Smallest gap `front.x - ego.x` reached while the ego brakes at `Bmin` and
/// the front car at `Bmax` until both stand still. Exact integration uses
/// the continuous minimum; Euler integration checks after every substep.
pub fn braking_min_gap(ego: CarState, front: CarState, integ: Integrator, c: &Constants) -> f64 {
    let mut cars = [
        acc_correction(ego.with_accel(c.b_min), c),
        acc_correction(front.with_accel(c.b_max), c),
    ];
    let mut min_gap = cars[1].x - cars[0].x;
    let end = braking_cycles(c) as f64 * c.t;
    match integ {
        Integrator::Exact => {
            min_gap = min_gap.min(min_gap_exact(&cars[0], &cars[1], end, c));
        }
        Integrator::Euler {
            substeps_per_second,
        } => {
            let h = 1.0 / f64::from(substeps_per_second);
            let n = (end * f64::from(substeps_per_second)).round() as usize;
            for _ in 0..n {
                for s in cars.iter_mut() {
                    *s = crate::plant::euler_substep(*s, h, c);
                }
                min_gap = min_gap.min(cars[1].x - cars[0].x);
            }
        }
    }
    min_gap
}

/// Gap `front.x - ego.x` over time in the braking scenario, one point per
/// Euler substep, or every `exact_dt` seconds for exact integration.
pub fn braking_gap_series(
    ego: CarState,
    front: CarState,
    integ: Integrator,
    exact_dt: f64,
    c: &Constants,
) -> Result<Vec<(f64, f64)>> {
    let cars = [
        acc_correction(ego.with_accel(c.b_min), c),
        acc_correction(front.with_accel(c.b_max), c),
    ];
    let end = braking_cycles(c) as f64 * c.t;
    let h = match integ {
        Integrator::Exact => exact_dt,
        Integrator::Euler {
            substeps_per_second,
        } => 1.0 / f64::from(substeps_per_second),
    };
    if !(h > 0.0) {
        return Err(Error::Argument(format!("sampling step must be positive, got {h}")));
    }
    let n = (end / h).round() as usize;
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = cars;
    out.push((0.0, cur[1].x - cur[0].x));
    for k in 1..=n {
        match integ {
            Integrator::Exact => {
                let t = k as f64 * h;
                cur = [
                    crate::plant::exact_step(cars[0], t, c)?,
                    crate::plant::exact_step(cars[1], t, c)?,
                ];
            }
            Integrator::Euler { .. } => {
                for s in cur.iter_mut() {
                    *s = crate::plant::euler_substep(*s, h, c);
                }
            }
        }
        out.push((k as f64 * h, cur[1].x - cur[0].x));
    }
    Ok(out)
}

/// Searches for invariant starts of the all-brake scenario (ego at `Bmin`,
/// front car at `Bmax`, both from time 0) that collide under `coarse` Euler
/// integration but under neither `fine` nor exact integration.
///
/// Each of the `seeds` proposals draws a faster ego and a slower front car
/// and places them so that the invariant margin is a random fraction of the
/// coarse integrator's worst position error, `Δv·h/2`.
pub fn euler_gap_search(
    c: &Constants,
    seeds: usize,
    coarse: Integrator,
    fine: Integrator,
) -> Result<Vec<EulerScenario>> {
    c.validate()?;
    let Some(coarse_res) = coarse.resolution() else {
        return Ok(Vec::new());
    };
    if fine.resolution().is_some_and(|f| f <= coarse_res) {
        return Ok(Vec::new());
    }
    let h = 1.0 / f64::from(coarse_res);
    let mut found = Vec::new();
    for seed in 0..seeds as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v_e = rng.gen_range(0.25 * c.v..=c.v);
        let v_o = rng.gen_range(0.0..v_e);
        let margin = rng.gen_range(0.0..1.0) * (v_e - v_o) * h;
        let ego = CarState::new(0.0, v_e, 0.0);
        let x_o = stop_dist_ego(0.0, v_e, c.b_min)? + c.l + margin - stop_dist_other(0.0, v_o, c);
        let front = CarState::new(x_o, v_o, 0.0);
        if !invariant_behind(&ego, &front, c) {
            continue;
        }
        let gaps = [coarse, fine, Integrator::Exact].map(|i| braking_min_gap(ego, front, i, c));
        if gaps[0] < c.l && gaps[1] >= c.l && gaps[2] >= c.l {
            found.push(EulerScenario {
                ego,
                front,
                margin,
                min_gap_coarse: gaps[0],
                min_gap_fine: gaps[1],
                min_gap_exact: gaps[2],
            });
        }
    }
    Ok(found)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Csv(e)
}

/// Writes trajectory rows as CSV with the columns
/// `t, x_1..x_k, v_1..v_k, a_1..a_k, action, overridden, collided`.
pub fn write_trajectory_csv<W: Write>(rows: &[TrajectoryRow], out: W) -> Result<()> {
    let k = rows.first().map_or(0, |r| r.cars.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    for prefix in ["x", "v", "a"] {
        header.extend((1..=k).map(|i| format!("{prefix}_{i}")));
    }
    header.extend(["action", "overridden", "collided"].map(String::from));
    w.write_record(&header).map_err(csv_error)?;
    for r in rows {
        let mut rec = vec![r.t.to_string()];
        rec.extend(r.cars.iter().map(|s| s.x.to_string()));
        rec.extend(r.cars.iter().map(|s| s.v.to_string()));
        rec.extend(r.cars.iter().map(|s| s.a.to_string()));
        rec.push(r.action.map_or(String::new(), |a| a.name().to_string()));
        rec.push(r.overridden.to_string());
        rec.push(r.collided.to_string());
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one CSV line per episode summary.
pub fn write_episodes_csv<W: Write>(episodes: &[EpisodeSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["episode", "seed", "crashed", "steps", "reward", "overrides", "cause"])
        .map_err(csv_error)?;
    for e in episodes {
        w.write_record([
            e.episode.to_string(),
            e.seed.to_string(),
            e.crashed.to_string(),
            e.steps.to_string(),
            e.reward.to_string(),
            e.overrides.to_string(),
            e.cause.map_or(String::new(), |c| c.to_string()),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
