//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
//! if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{
    ahead_rollout_min_gap, behind_rollout_min_gap, behind_state, oracle_violation, threshold_gap,
    trajectory, uniform_input,
};
use highway_core::envelope::{safe_back, safe_front};
use highway_core::nn::{builtin_network, Action, FeatureOrder, Mlp, FULL_INPUT};
use highway_core::plant::{integrate, Integrator};
use highway_core::policy::{meta_action_accel, EnvPolicy, IdmParams, META_GAIN};
use highway_core::shield::{allow_behind, ctrl_nn_allows};
use highway_core::sim::{
    campaign, euler_gap_search, falsify, representative_starts, run_episode, sample_initial,
    CampaignSpec, Controller, EpisodeOptions,
};
use highway_core::verify::{confirm, verify, VerifyOptions, VerifyOutcome, VerifyStatus};
use highway_core::{CarState, Constants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    check(took <= limit, || format!("took {:.1}s, limit {}s", took.as_secs_f64(), limit.as_secs()))
}

fn envelope_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut behind = 0;
    for b_min in [-3.0, -5.0] {
        let c = Constants::highway(b_min);
        let mut n = 0;
        while n < 10_000 {
            let v_o = rng.gen_range(0.0..=c.v);
            let ego = CarState::new(0.0, rng.gen_range(0.0..=c.v), rng.gen_range(c.b_max..=c.a_max));
            let at = |gap: f64| CarState::new(gap, v_o, 0.0);
            let gap = if rng.gen_bool(0.5) {
                rng.gen_range(c.l..300.0)
            } else {
                match threshold_gap(|g| safe_back(&ego, &at(g), &c)) {
                    Some(g) => g + rng.gen_range(0.0..1.0),
                    None => continue,
                }
            };
            let other = at(gap);
            if !safe_back(&ego, &other, &c) {
                continue;
            }
            let m = behind_rollout_min_gap(&ego, &other, c.t, c.b_min, c.b_max, c.v);
            check(m >= c.l - 1e-9, || format!("behind collision {ego:?} {other:?} gap {m}"))?;
            n += 1;
        }
        behind += n;
    }
    let c = Constants::highway(-3.0);
    let mut ahead = 0;
    while ahead < 10_000 {
        let other = CarState::new(0.0, rng.gen_range(0.0..=c.v), 0.0);
        let (v_e, a) = (rng.gen_range(0.0..=c.v), rng.gen_range(c.b_max..=c.a_max));
        let at = |gap: f64| CarState::new(gap, v_e, a);
        let gap = if rng.gen_bool(0.5) {
            rng.gen_range(c.l..400.0)
        } else {
            match threshold_gap(|g| safe_front(&at(g), &other, &c)) {
                Some(g) => g + rng.gen_range(0.0..1.0),
                None => continue,
            }
        };
        let ego = at(gap);
        if !safe_front(&ego, &other, &c) {
            continue;
        }
        let m = ahead_rollout_min_gap(&ego, &other, c.t, c.a_min, c.a_max, c.v);
        check(m >= c.l - 1e-9, || format!("ahead collision {ego:?} {other:?} gap {m}"))?;
        ahead += 1;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{behind} behind and {ahead} ahead samples, no collision"))
}

fn fallback_keeps_invariant() -> Outcome {
    let c = Constants::highway(-3.0);
    let env = [EnvPolicy::EmergencyBrake];
    let opts = EpisodeOptions::new(&c);
    check(opts.steps == 60 && opts.integrator == Integrator::Exact, || "unexpected defaults".into())?;
    let mut boundaries = 0;
    for seed in 0..1000 {
        let w0 = sample_initial(&c, 2, seed, 5.0).map_err(|e| e.to_string())?;
        check(w0.in_invariant(&c), || format!("start {seed} outside the invariant"))?;
        let r = run_episode(&w0, &Controller::FallbackOnly, &env, &opts, &c).map_err(|e| e.to_string())?;
        check(!r.crashed, || format!("collision from start {seed}"))?;
        check(r.steps == 60, || format!("episode {seed} ended after {} cycles", r.steps))?;
        check(r.trajectory.iter().all(|row| row.in_invariant), || {
            format!("episode {seed} left the invariant")
        })?;
        boundaries += r.trajectory.len();
    }
    Ok(format!("1000 episodes x 60 cycles, invariant at all {boundaries} boundaries"))
}

fn monitor_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut per_action = [0usize; 3];
    for b_min in [-3.0, -5.0] {
        let c = Constants::highway(b_min);
        for act in Action::ALL {
            for _ in 0..100_000 {
                let (ego, other) = behind_state(&mut rng, act, &c);
                let full = allow_behind(act, &ego, &other, &c).allowed;
                let simple = ctrl_nn_allows(act, &ego, &other, &c);
                check(full == simple, || format!("{act} disagrees at {ego:?} {other:?}"))?;
                per_action[act.index()] += 1;
            }
        }
    }
    Ok(format!("{} samples per action, all agree", per_action[0]))
}

fn campaigns() -> Outcome {
    let start = Instant::now();
    let c = Constants::highway(-3.0);
    let accel = builtin_network("accel", FULL_INPUT, FeatureOrder::default()).map_err(|e| e.to_string())?;
    let spec = |controller: Controller, env: EnvPolicy| CampaignSpec {
        controller,
        env: vec![env],
        episodes: 1000,
        pattern: 2,
        density: 5.0,
        master_seed: 0,
        options: EpisodeOptions::new(&c),
    };
    let mut parts = Vec::new();
    for env in [EnvPolicy::Idm(IdmParams::default()), EnvPolicy::EmergencyBrake] {
        for ctrl in [Controller::VeriPhy(accel.clone()), Controller::Jsc(accel.clone())] {
            let (s, _) = campaign(&c, &spec(ctrl, env.clone())).map_err(|e| e.to_string())?;
            check(s.crashes == 0, || format!("{} vs {} crashed {} times", s.policy, s.env, s.crashes))?;
            parts.push(format!("{}/{} 0%", s.policy, s.env));
        }
    }
    let (raw, _) =
        campaign(&c, &spec(Controller::Raw(accel), EnvPolicy::EmergencyBrake)).map_err(|e| e.to_string())?;
    check(raw.crash_rate > 0.5, || format!("raw crash rate only {:.1}%", 100.0 * raw.crash_rate))?;
    parts.push(format!("raw/{} {:.1}%", raw.env, 100.0 * raw.crash_rate));
    within(start, Duration::from_secs(300))?;
    Ok(parts.join(", "))
}

fn verifier(accel_out: &mut Option<(Mlp, VerifyOutcome)>) -> Outcome {
    let start = Instant::now();
    let c = Constants::highway(-3.0);
    let order = FeatureOrder::default();
    let opts = VerifyOptions::default();
    let err = |e: highway_core::Error| e.to_string();

    let brake = builtin_network("brake", FULL_INPUT, order).map_err(err)?;
    let out = verify(&brake, &c, &opts).map_err(err)?;
    check(out.status == VerifyStatus::Safe, || format!("brake net reported {:?}", out.status))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..1_000_000 {
        let input = uniform_input(&mut rng, FULL_INPUT, 2 + i % 4);
        check(oracle_violation(&brake, &input, &c).is_none(), || format!("brake net violates at {input:?}"))?;
    }

    let accel = builtin_network("accel", FULL_INPUT, order).map_err(err)?;
    let out = verify(&accel, &c, &opts).map_err(err)?;
    let mut confirmed = 0;
    for r in out.confirmed() {
        check(confirm(&accel, &r.representative, r.action, &c, order, &opts.region), || {
            format!("representative {:?} does not confirm", r.representative)
        })?;
        check(oracle_violation(&accel, &r.representative, &c) == Some(r.action), || {
            format!("oracle rejects representative {:?}", r.representative)
        })?;
        confirmed += 1;
    }
    let witness = [0.0, 12.0 / 80.0, 40.0 / 200.0, -2.0 / 80.0];
    check(out.confirmed().any(|r| r.region.cars == 2 && r.region.contains(&witness)), || {
        "no confirmed region contains the witness".into()
    })?;
    within(start, Duration::from_secs(600))?;
    let msg = format!(
        "brake net safe, 1e6 samples clean; accel net {confirmed} confirmed regions ({} nodes), witness covered",
        out.stats.nodes
    );
    *accel_out = Some((accel, out));
    Ok(msg)
}

fn falsification(accel_out: &Option<(Mlp, VerifyOutcome)>) -> Outcome {
    let Some((accel, out)) = accel_out else {
        return Err("no verifier report".into());
    };
    let c = Constants::highway(-3.0);
    let reps: Vec<Vec<f64>> = out.confirmed().map(|r| r.representative.clone()).collect();
    let starts = representative_starts(&reps, &c, FeatureOrder::default());
    check(!starts.is_empty(), || "no starts".into())?;
    let env = [EnvPolicy::EmergencyBrake];
    let opts = EpisodeOptions::new(&c);
    let err = |e: highway_core::Error| e.to_string();
    let raw = falsify(&starts, &Controller::Raw(accel.clone()), &env, &opts, &c).map_err(err)?;
    check(!raw.is_empty(), || "raw controller never crashed".into())?;
    let fb = falsify(&starts, &Controller::FallbackOnly, &env, &opts, &c).map_err(err)?;
    let ego_crashes = fb.iter().filter(|k| k.result.collision_pair == Some(0)).count();
    check(ego_crashes == 0, || format!("fallback crashed {ego_crashes} times"))?;
    Ok(format!("{} starts: raw {} crashes, fallback {} ego crashes", starts.len(), raw.len(), ego_crashes))
}

fn euler_gap() -> Outcome {
    let start = Instant::now();
    let mut c = Constants::highway(-5.0);
    c.b_max = -5.0;
    let coarse = Integrator::euler(10).map_err(|e| e.to_string())?;
    let fine = Integrator::euler(100).map_err(|e| e.to_string())?;
    let found = euler_gap_search(&c, 1000, coarse, fine).map_err(|e| e.to_string())?;
    check(!found.is_empty(), || "no scenario found".into())?;
    for s in &found {
        check(s.min_gap_coarse < c.l && s.min_gap_fine >= c.l && s.min_gap_exact >= c.l, || {
            format!("inconsistent scenario {s:?}")
        })?;
        // the exact gap is confirmed by the independent trajectory oracle
        let horizon = 20.0;
        let e = trajectory(s.ego.x, s.ego.v, &[(f64::INFINITY, c.b_min)], c.v, horizon);
        let o = trajectory(s.front.x, s.front.v, &[(f64::INFINITY, c.b_max)], c.v, horizon);
        let m = common::min_gap(&e, &o, horizon);
        check(m >= c.l - 1e-9, || format!("oracle gap {m} for {s:?}"))?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("{} scenarios collide at 10 substeps/s only", found.len()))
}

fn meta_action_brake() -> Outcome {
    let c = Constants::highway(-3.0);
    let (a, v_ref) = meta_action_accel(10.0, 20.0, Action::Brake, META_GAIN, &c);
    check(a > 0.0, || format!("commanded {a}"))?;
    Ok(format!("Brake at v=10, v_ref=20 commands {a:.3} m/s^2 (v_ref -> {v_ref})"))
}

fn euler_convergence() -> Outcome {
    let c = Constants::highway(-3.0);
    let steps: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
    let horizon = 10.0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = [0.0f64; 4];
    let mut scenarios = 0;
    while scenarios < 200 {
        let v0 = rng.gen_range(0.0..=c.v);
        let a = rng.gen_range(c.b_max..0.0);
        let s = CarState::new(0.0, v0, a);
        let exact = integrate(s, horizon, Integrator::Exact, &c).map_err(|e| e.to_string())?;
        let dv = exact.v - v0;
        if dv.abs() >= 20.0 || dv == 0.0 {
            continue;
        }
        let p = trajectory(0.0, v0, &[(f64::INFINITY, a)], c.v, horizon);
        let oracle_x = p.last().unwrap().pos(horizon);
        check((exact.x - oracle_x).abs() < 1e-9, || format!("exact plant disagrees with oracle at {s:?}"))?;
        let mut errs = [0.0; 4];
        for (k, h) in steps.iter().enumerate() {
            let integ = Integrator::euler((1.0 / h).round() as u32).map_err(|e| e.to_string())?;
            let x = integrate(s, horizon, integ, &c).map_err(|e| e.to_string())?.x;
            errs[k] = (x - oracle_x).abs();
            worst[k] = worst[k].max(errs[k]);
            let bound = dv.abs() * h / 2.0 + a.abs() * h * h;
            check(errs[k] <= bound + 1e-9, || format!("error {} above {bound} at h={h}, {s:?}", errs[k]))?;
        }
        scenarios += 1;
    }
    for k in 1..4 {
        let ratio = worst[k - 1] / worst[k];
        check((8.0..=12.0).contains(&ratio), || format!("error ratio {ratio:.2} between h={} and h={}", steps[k - 1], steps[k]))?;
    }
    check(worst[3] < 1e-3, || format!("error {} at h=1e-4", worst[3]))?;
    Ok(format!(
        "{scenarios} scenarios, max error {:.2e} / {:.2e} / {:.2e} / {:.2e}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn main() -> ExitCode {
    let mut accel_out = None;
    let mut failed = 0;
    let mut run = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS {n} {name}: {msg} ({secs:.1}s)"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {n} {name}: {msg} ({secs:.1}s)");
            }
        }
    };
    run(1, "envelope soundness", &mut envelope_soundness);
    run(2, "fallback keeps the invariant", &mut fallback_keeps_invariant);
    run(3, "monitor equivalence", &mut monitor_equivalence);
    run(4, "shielded campaigns", &mut campaigns);
    run(5, "verifier", &mut || verifier(&mut accel_out));
    run(6, "falsification", &mut || falsification(&accel_out));
    run(7, "euler gap search", &mut euler_gap);
    run(8, "meta-action brake", &mut meta_action_brake);
    run(9, "euler convergence", &mut euler_convergence);
    if failed == 0 {
        println!("all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
