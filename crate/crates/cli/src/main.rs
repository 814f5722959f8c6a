//! `highway`: simulate, verify and falsify neural car-following controllers
//! guarded by a verified safety envelope.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use highway_core::config::Config;
use highway_core::nn::{builtin_network, load_mlp, Action, Mlp, BUILTIN_NETWORKS, FULL_INPUT};
use highway_core::plant::Integrator;
use highway_core::shield::allow_behind;
use highway_core::sim::{
    braking_gap_series, campaign, euler_gap_search, falsify, representative_starts, run_episode,
    sample_initial, write_episodes_csv, write_trajectory_csv, CampaignSpec, Controller,
    EpisodeOptions,
};
use highway_core::verify::{representatives_from_json, verify, VerifyOptions, VerifyStatus};
use highway_core::CarState;

#[derive(Parser)]
#[command(name = "highway", version, about = "Verified safety envelope toolkit for car-following controllers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop episode and write its trajectory as CSV.
    Simulate(SimulateArgs),
    /// Run many episodes and summarize crash rates and rewards.
    Campaign(CampaignArgs),
    /// Search a network for inputs where it picks a forbidden action.
    Verify(VerifyArgs),
    /// Replay the confirmed regions of a verification report in closed loop.
    Falsify(FalsifyArgs),
    /// Find braking scenarios that crash only under coarse Euler integration.
    EulerDemo(EulerArgs),
    /// Ask the controller monitor about one action in one state.
    MonitorCheck(MonitorArgs),
    /// Write a built-in network as a JSON weight file.
    Weights(WeightsArgs),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file; defaults apply without one.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<Config> {
        match &self.config {
            Some(p) => Config::load(p).with_context(|| format!("reading {}", p.display())),
            None => Ok(Config::default()),
        }
    }
}

#[derive(Args)]
struct PolicyArgs {
    /// raw, veriphy, jsc or fallback; `falsify` defaults to raw, the
    /// other commands to veriphy.
    #[arg(long)]
    policy: Option<String>,
    /// JSON weight file or a built-in network name (brake, idle, accel, gap, random[:SEED]).
    #[arg(long)]
    weights: Option<String>,
    /// Environment cars: idm, brake, scripted, random-brake or const:A.
    #[arg(long, default_value = "brake")]
    env: String,
    /// exact or euler:N (N substeps per second).
    #[arg(long, default_value = "exact")]
    integrator: Integrator,
    /// Episode horizon in control cycles (overrides the configuration).
    #[arg(long)]
    steps: Option<usize>,
    /// Seed (overrides the configuration).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of cars, 2 to 5 (overrides the configuration).
    #[arg(long)]
    pattern: Option<usize>,
}

impl PolicyArgs {
    fn apply(&self, cfg: &mut Config) -> Result<()> {
        if let Some(s) = self.steps {
            cfg.steps = s;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(p) = self.pattern {
            cfg.pattern = p;
        }
        cfg.validate()?;
        Ok(())
    }

    fn controller(&self, cfg: &Config, default: &str) -> Result<Controller> {
        let net = self.weights.as_deref().map(|w| network(w, cfg)).transpose()?;
        Ok(Controller::from_name(self.policy.as_deref().unwrap_or(default), net)?)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Trajectory CSV; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CampaignArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, default_value_t = 1000)]
    episodes: usize,
    /// Summary JSON; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-episode CSV.
    #[arg(long)]
    episodes_csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// JSON weight file or a built-in network name.
    #[arg(long)]
    weights: String,
    /// Boxes narrower than this in every useful dimension stay undecided.
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Maximal number of boxes processed.
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
    /// Presence patterns to explore, e.g. `2,3`; all by default.
    #[arg(long, value_delimiter = ',')]
    patterns: Vec<usize>,
    /// Report JSON; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FalsifyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Report written by `verify`.
    #[arg(long)]
    report: PathBuf,
    /// One line per crash; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory receiving one trajectory CSV per crash.
    #[arg(long)]
    traces: Option<PathBuf>,
}

#[derive(Args)]
struct EulerArgs {
    #[command(flatten)]
    common: Common,
    /// Coarse resolution, substeps per second.
    #[arg(long, default_value_t = 10)]
    coarse: u32,
    /// Fine resolution, substeps per second.
    #[arg(long, default_value_t = 100)]
    fine: u32,
    /// Number of random proposals.
    #[arg(long, default_value_t = 1000)]
    seeds: usize,
    /// Scenario CSV; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Gap curves of the first scenario (integrator, t, gap) as CSV.
    #[arg(long)]
    curves: Option<PathBuf>,
}

#[derive(Args)]
struct MonitorArgs {
    #[command(flatten)]
    common: Common,
    /// Ego and other car as `xe,ve,xo,vo`.
    #[arg(long, allow_hyphen_values = true)]
    state: String,
    /// brake, idle or accel.
    #[arg(long)]
    action: Action,
}

#[derive(Args)]
struct WeightsArgs {
    /// Built-in network name.
    name: String,
    /// Input width, 10 or 25.
    #[arg(long, default_value_t = FULL_INPUT)]
    input_dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn network(name: &str, cfg: &Config) -> Result<Mlp> {
    let path = Path::new(name);
    if path.exists() {
        return load_mlp(path).with_context(|| format!("loading weights from {name}"));
    }
    builtin_network(name, FULL_INPUT, cfg.feature_order).with_context(|| {
        format!(
            "`{name}` is neither a weight file nor a built-in network ({})",
            BUILTIN_NETWORKS.join(", ")
        )
    })
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut cfg = args.common.load()?;
    args.policy.apply(&mut cfg)?;
    let c = cfg.constants;
    let ctrl = args.policy.controller(&cfg, "veriphy")?;
    let env = cfg.env_policy(&args.policy.env)?;
    let w0 = sample_initial(&c, cfg.pattern, cfg.seed, cfg.density)?;
    let opts = EpisodeOptions::from_config(&cfg, args.policy.integrator);
    let r = run_episode(&w0, &ctrl, &[env], &opts, &c)?;
    write_trajectory_csv(&r.trajectory, output(args.out.as_deref())?)?;
    eprintln!(
        "{} cycles, crashed: {}, reward {:.3}, overrides {}{}",
        r.steps,
        r.crashed,
        r.reward,
        r.overrides,
        r.cause.map(|c| format!(", cause {c}")).unwrap_or_default()
    );
    Ok(())
}

fn run_campaign(args: CampaignArgs) -> Result<()> {
    let mut cfg = args.common.load()?;
    args.policy.apply(&mut cfg)?;
    let ctrl = args.policy.controller(&cfg, "veriphy")?;
    let env = cfg.env_policy(&args.policy.env)?;
    let spec = CampaignSpec::from_config(&cfg, ctrl, vec![env], args.episodes, args.policy.integrator);
    let (summary, episodes) = campaign(&cfg.constants, &spec)?;
    let mut out = output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &summary)?;
    writeln!(out)?;
    out.flush()?;
    if let Some(p) = &args.episodes_csv {
        write_episodes_csv(&episodes, output(Some(p))?)?;
    }
    eprintln!(
        "{} vs {}: {} of {} episodes crashed ({:.2}%)",
        summary.policy,
        summary.env,
        summary.crashes,
        summary.episodes,
        100.0 * summary.crash_rate
    );
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<()> {
    let cfg = args.common.load()?;
    let m = network(&args.weights, &cfg)?;
    let opts = VerifyOptions {
        eps: args.eps,
        budget: args.budget,
        order: cfg.feature_order,
        patterns: args.patterns,
        seed: cfg.seed,
        ..VerifyOptions::default()
    };
    let out = verify(&m, &cfg.constants, &opts)?;
    let mut w = output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &out.to_json())?;
    writeln!(w)?;
    w.flush()?;
    eprintln!(
        "{}: {} confirmed, {} spurious, {} undecided boxes, {} nodes in {:.2}s",
        match out.status {
            VerifyStatus::Safe => "safe",
            VerifyStatus::Violations => "violations",
            VerifyStatus::Undecided => "undecided",
        },
        out.confirmed().count(),
        out.regions.len() - out.confirmed().count(),
        out.stats.undecided,
        out.stats.nodes,
        out.stats.time_s
    );
    Ok(())
}

fn run_falsify(args: FalsifyArgs) -> Result<()> {
    let mut cfg = args.common.load()?;
    args.policy.apply(&mut cfg)?;
    let c = cfg.constants;
    let text = std::fs::read_to_string(&args.report)
        .with_context(|| format!("reading {}", args.report.display()))?;
    let reps: Vec<Vec<f64>> = representatives_from_json(&text)?.into_iter().map(|(_, r)| r).collect();
    let starts = representative_starts(&reps, &c, cfg.feature_order);
    let ctrl = args.policy.controller(&cfg, "raw")?;
    let env = cfg.env_policy(&args.policy.env)?;
    let opts = EpisodeOptions::from_config(&cfg, args.policy.integrator);
    let crashes = falsify(&starts, &ctrl, &[env], &opts, &c)?;

    let mut w = csv::Writer::from_writer(output(args.out.as_deref())?);
    w.write_record(["start", "cars", "ego_x", "ego_v", "front_x", "front_v", "crash_time", "cause"])?;
    for k in &crashes {
        let w0 = &starts[k.start];
        let last = k.result.trajectory.iter().rev().find(|r| r.collided);
        w.serialize((
            k.start,
            w0.cars.len(),
            w0.ego().x,
            w0.ego().v,
            w0.front().x,
            w0.front().v,
            last.map(|r| r.t),
            k.result.cause.map(|c| c.to_string()),
        ))?;
    }
    w.flush()?;
    if let Some(dir) = &args.traces {
        std::fs::create_dir_all(dir)?;
        for k in &crashes {
            let p = dir.join(format!("crash_{:06}.csv", k.start));
            write_trajectory_csv(&k.result.trajectory, output(Some(&p))?)?;
        }
    }
    eprintln!("{} of {} starts crashed under {}", crashes.len(), starts.len(), ctrl.name());
    Ok(())
}

fn euler_demo(args: EulerArgs) -> Result<()> {
    let cfg = args.common.load()?;
    let c = cfg.constants;
    let coarse = Integrator::euler(args.coarse)?;
    let fine = Integrator::euler(args.fine)?;
    if args.fine <= args.coarse {
        bail!("the fine resolution must exceed the coarse one");
    }
    let found = euler_gap_search(&c, args.seeds, coarse, fine)?;
    let mut w = csv::Writer::from_writer(output(args.out.as_deref())?);
    w.write_record([
        "ego_x",
        "ego_v",
        "front_x",
        "front_v",
        "margin",
        "min_gap_coarse",
        "min_gap_fine",
        "min_gap_exact",
    ])?;
    for s in &found {
        w.serialize((
            s.ego.x,
            s.ego.v,
            s.front.x,
            s.front.v,
            s.margin,
            s.min_gap_coarse,
            s.min_gap_fine,
            s.min_gap_exact,
        ))?;
    }
    w.flush()?;
    if let (Some(p), Some(s)) = (&args.curves, found.first()) {
        let mut w = csv::Writer::from_writer(output(Some(p))?);
        w.write_record(["integrator", "t", "gap"])?;
        for integ in [coarse, fine, Integrator::Exact] {
            for (t, gap) in braking_gap_series(s.ego, s.front, integ, 0.01, &c)? {
                w.serialize((integ.to_string(), t, gap))?;
            }
        }
        w.flush()?;
    }
    eprintln!("{} of {} proposals crash only at {} substeps/s", found.len(), args.seeds, args.coarse);
    Ok(())
}

fn monitor_check(args: MonitorArgs) -> Result<()> {
    let cfg = args.common.load()?;
    let c = cfg.constants;
    let vals: Vec<f64> = args
        .state
        .split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number `{s}` in --state")))
        .collect::<Result<_>>()?;
    let [xe, ve, xo, vo] = vals[..] else {
        bail!("--state needs four numbers `xe,ve,xo,vo`, got {}", vals.len());
    };
    let ego = CarState::new(xe, ve, 0.0);
    let other = CarState::new(xo, vo, 0.0);
    let verdict = allow_behind(args.action, &ego, &other, &c);
    match verdict.reason {
        None => println!("{}: allowed", args.action),
        Some(r) => println!("{}: denied ({r})", args.action),
    }
    Ok(())
}

fn weights(args: WeightsArgs) -> Result<()> {
    let cfg = args.common.load()?;
    let m = builtin_network(&args.name, args.input_dim, cfg.feature_order)?;
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "{}", m.to_json())?;
    w.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    let result = match Cli::parse().command {
        Command::Simulate(a) => simulate(a),
        Command::Campaign(a) => run_campaign(a),
        Command::Verify(a) => run_verify(a),
        Command::Falsify(a) => run_falsify(a),
        Command::EulerDemo(a) => euler_demo(a),
        Command::MonitorCheck(a) => monitor_check(a),
        Command::Weights(a) => weights(a),
    };
    // a closed pipe (`highway ... | head`) is not an error
    let broken_pipe = |e: &anyhow::Error| {
        e.chain().any(|c| {
            c.downcast_ref::<io::Error>().map(io::Error::kind) == Some(io::ErrorKind::BrokenPipe)
                || matches!(c.downcast_ref::<csv::Error>().map(csv::Error::kind), Some(csv::ErrorKind::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe)
        })
    };
    match result {
        Err(e) if broken_pipe(&e) => Ok(()),
        other => other,
    }
}
