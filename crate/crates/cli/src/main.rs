use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dogfight_core::ddqn::{self, episode_rng, evaluate_in, load_checkpoint, run_episode, Pilot, QNetwork};
use dogfight_core::dt_policy::DtOptions;
use dogfight_core::env::{write_summary_file, write_trajectory_file, EpisodeSummary};

mod config;
use config::{strategy, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "dogfight", version, about = "One-on-one air combat with a DDQN maneuver selector")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat key = value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a network against a decision-tree opponent.
    Train {
        #[command(flatten)]
        common: Common,
        /// Decision steps to train for.
        #[arg(long)]
        steps: Option<usize>,
        /// Opponent strategy, 1..=8.
        #[arg(long)]
        strategy: Option<usize>,
    },
    /// Win/loss/tie table of one pilot against decision-tree strategies.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Blue as `dt:N` instead of a checkpoint.
        #[arg(long)]
        blue: Option<String>,
        /// Comma-separated strategies or `all`.
        #[arg(long, default_value = "all")]
        strategy: String,
        #[arg(long)]
        episodes: Option<usize>,
    },
    /// One recorded engagement.
    Duel {
        #[command(flatten)]
        common: Common,
        /// `dt:N` or a checkpoint path.
        #[arg(long)]
        blue: Option<String>,
        /// Shorthand for `--blue <path>`.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// `dt:N`.
        #[arg(long)]
        red: Option<String>,
        /// Red strategy index; same as `--red dt:N`.
        #[arg(long)]
        strategy: Option<usize>,
        /// random, case1 or case2.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Trajectories of several random engagements, one CSV each.
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        blue: Option<String>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        strategy: Option<usize>,
        #[arg(long, default_value_t = 1)]
        episodes: usize,
        #[arg(long)]
        scenario: Option<String>,
    },
}

enum Agent {
    Network(QNetwork),
    Dt(DtOptions),
}

impl Agent {
    fn parse(spec: &str) -> Result<Self> {
        match spec.strip_prefix("dt:") {
            Some(n) => {
                let n: usize = n.parse().with_context(|| format!("agent: bad strategy in {spec:?}"))?;
                Ok(Agent::Dt(strategy(n)?))
            }
            None => Ok(Agent::Network(load(Path::new(spec))?)),
        }
    }

    fn pick(blue: Option<&str>, checkpoint: Option<&Path>) -> Result<Self> {
        match (blue, checkpoint) {
            (Some(_), Some(_)) => bail!("agent: give either --blue or --checkpoint"),
            (Some(spec), None) => Self::parse(spec),
            (None, Some(path)) => Ok(Agent::Network(load(path)?)),
            (None, None) => bail!("agent: a --checkpoint or --blue dt:N is required"),
        }
    }

    fn pilot(&self) -> Pilot<'_> {
        match self {
            Agent::Network(net) => Pilot::Network(net),
            Agent::Dt(options) => Pilot::Dt(*options),
        }
    }

    fn label(&self) -> String {
        match self {
            Agent::Network(_) => "network".into(),
            Agent::Dt(o) => format!("dt:{}", o.strategy_index()),
        }
    }
}

fn load(path: &Path) -> Result<QNetwork> {
    load_checkpoint(path).with_context(|| format!("checkpoint: cannot load {}", path.display()))
}

fn red_index(spec: &str) -> Result<usize> {
    match Agent::parse(spec)? {
        Agent::Dt(o) => Ok(o.strategy_index()),
        Agent::Network(_) => bail!("agent: red must be dt:N, got {spec:?}"),
    }
}

/// Loads the config file, applies the common flags and prepares the output
/// directory.
fn resolve(common: &Common, edit: impl FnOnce(&mut RunConfig) -> Result<()>) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    edit(&mut cfg)?;
    // fail on bad values before anything runs
    cfg.episode()?;
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("output: cannot create {}", cfg.out.display()))?;
    cfg.write(&cfg.out)?;
    Ok(cfg)
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).context("output: serialize")?;
    std::fs::write(path, text).with_context(|| format!("output: cannot write {}", path.display()))
}

#[derive(Serialize)]
struct TrainSummary {
    steps: usize,
    episodes: usize,
    wins: usize,
    losses: usize,
    ties: usize,
    seconds: f64,
}

fn cmd_train(common: Common, steps: Option<usize>, red: Option<usize>) -> Result<()> {
    let cfg = resolve(&common, |c| {
        if let Some(s) = steps {
            c.steps = s;
        }
        if let Some(r) = red {
            c.strategy = r;
        }
        Ok(())
    })?;
    let started = std::time::Instant::now();
    let every = (cfg.steps / 20).max(1);
    let trainer = ddqn::train_in(cfg.env()?, &cfg.train(), cfg.seed, Some(&cfg.out), |t, rec| {
        if rec.step % every == 0 {
            eprintln!("step {} episode {} loss {:?}", rec.step, t.episodes_done(), rec.loss);
        }
    })
    .context("train")?;
    trainer.log.write_steps_csv(&cfg.out.join("train_log.csv")).context("train: log")?;
    trainer.log.write_curve_csv(&cfg.out.join("outcome_curve.csv")).context("train: curve")?;
    let last = trainer.log.cumulative().last().copied();
    let summary = TrainSummary {
        steps: trainer.steps_done(),
        episodes: trainer.episodes_done(),
        wins: last.map_or(0, |r| r.wins),
        losses: last.map_or(0, |r| r.losses),
        ties: last.map_or(0, |r| r.ties),
        seconds: started.elapsed().as_secs_f64(),
    };
    write_json(&summary, &cfg.out.join("train_summary.json"))?;
    println!(
        "trained {} steps over {} episodes: {} wins, {} losses, {} ties",
        summary.steps, summary.episodes, summary.wins, summary.losses, summary.ties
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct EvalRow {
    strategy: usize,
    sp: bool,
    es: bool,
    yy: bool,
    episodes: usize,
    wins: usize,
    losses: usize,
    ties: usize,
    win_pct: f64,
    loss_pct: f64,
    tie_pct: f64,
}

fn parse_strategies(list: &str) -> Result<Vec<usize>> {
    if list.trim() == "all" {
        return Ok((1..=8).collect());
    }
    list.split(',')
        .map(|s| {
            let n: usize = s.trim().parse().with_context(|| format!("evaluate: bad strategy {s:?}"))?;
            strategy(n).map(|_| n)
        })
        .collect()
}

fn cmd_evaluate(common: Common, checkpoint: Option<PathBuf>, blue: Option<String>, list: String, episodes: Option<usize>) -> Result<()> {
    let strategies = parse_strategies(&list)?;
    let agent = Agent::pick(blue.as_deref(), checkpoint.as_deref()).context("evaluate")?;
    let cfg = resolve(&common, |c| {
        if let Some(n) = episodes {
            c.episodes = n;
        }
        Ok(())
    })?;
    let mut rows = Vec::new();
    for &index in &strategies {
        let run = RunConfig {
            strategy: index,
            ..cfg.clone()
        };
        let report = evaluate_in(&run.env()?, &agent.pilot(), cfg.episodes, cfg.seed).with_context(|| format!("evaluate: strategy {index}"))?;
        let o = strategy(index)?;
        let row = EvalRow {
            strategy: index,
            sp: o.sp,
            es: o.es,
            yy: o.yy,
            episodes: report.episodes,
            wins: report.wins,
            losses: report.losses,
            ties: report.ties,
            win_pct: report.win_pct,
            loss_pct: report.loss_pct,
            tie_pct: report.tie_pct,
        };
        println!(
            "strategy {}  win {:6.2}%  loss {:6.2}%  tie {:6.2}%",
            row.strategy, row.win_pct, row.loss_pct, row.tie_pct
        );
        rows.push(row);
    }
    let path = cfg.out.join("evaluation.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("output: cannot write {}", path.display()))?;
    for row in &rows {
        w.serialize(row).context("output: evaluation row")?;
    }
    w.flush().context("output: evaluation csv")?;
    #[derive(Serialize)]
    struct Report<'a> {
        blue: String,
        seed: u64,
        rows: &'a [EvalRow],
    }
    write_json(
        &Report {
            blue: agent.label(),
            seed: cfg.seed,
            rows: &rows,
        },
        &cfg.out.join("evaluation.json"),
    )
}

/// Red spec from `--red` / `--strategy`, which must agree when both given.
fn red_override(red: Option<&str>, index: Option<usize>) -> Result<Option<usize>> {
    let from_red = red.map(red_index).transpose()?;
    match (from_red, index) {
        (Some(a), Some(b)) if a != b => bail!("agent: --red and --strategy disagree"),
        (a, b) => Ok(a.or(b)),
    }
}

fn cmd_duel(common: Common, blue: Option<String>, checkpoint: Option<PathBuf>, red: Option<String>, index: Option<usize>, scenario: Option<String>) -> Result<()> {
    let blue = match (&blue, &checkpoint) {
        (None, None) => Agent::Dt(strategy(8)?),
        _ => Agent::pick(blue.as_deref(), checkpoint.as_deref()).context("duel")?,
    };
    let red = red_override(red.as_deref(), index)?;
    let cfg = resolve(&common, |c| {
        if let Some(r) = red {
            c.strategy = r;
        }
        if let Some(s) = scenario {
            c.scenario = s;
        }
        Ok(())
    })?;
    let mut env = cfg.env()?;
    env.set_recording(true);
    let outcome = run_episode(&mut env, &blue.pilot(), &mut episode_rng(cfg.seed, 0)).context("duel")?;
    write_trajectory_file(env.trajectory(), &cfg.out.join("trajectory.csv")).context("duel: trajectory")?;
    let summary = env.summary(Some(cfg.seed));
    write_summary_file(&summary, &cfg.out.join("summary.json")).context("duel: summary")?;
    println!(
        "{} vs dt:{} ({}): {} after {} steps, blood {:.3} / {:.3}",
        blue.label(),
        cfg.strategy,
        cfg.scenario,
        outcome.blue_label().unwrap_or("ongoing"),
        summary.steps,
        summary.blood_blue,
        summary.blood_red
    );
    Ok(())
}

#[derive(Serialize)]
struct ExportRow {
    episode: usize,
    file: String,
    #[serde(flatten)]
    summary: EpisodeSummary,
}

fn cmd_export(common: Common, blue: Option<String>, checkpoint: Option<PathBuf>, index: Option<usize>, episodes: usize, scenario: Option<String>) -> Result<()> {
    let blue = Agent::pick(blue.as_deref(), checkpoint.as_deref()).context("export")?;
    let cfg = resolve(&common, |c| {
        if let Some(r) = index {
            c.strategy = r;
        }
        if let Some(s) = scenario {
            c.scenario = s;
        }
        Ok(())
    })?;
    let template = cfg.env()?;
    let dir = cfg.out.join("trajectories");
    std::fs::create_dir_all(&dir).with_context(|| format!("output: cannot create {}", dir.display()))?;
    let mut index_rows = Vec::new();
    for i in 0..episodes {
        let mut env = template.clone();
        env.set_recording(true);
        run_episode(&mut env, &blue.pilot(), &mut episode_rng(cfg.seed, i as u64)).with_context(|| format!("export: episode {i}"))?;
        let file = format!("episode_{i:04}.csv");
        write_trajectory_file(env.trajectory(), &dir.join(&file)).context("export: trajectory")?;
        index_rows.push(ExportRow {
            episode: i,
            file: format!("trajectories/{file}"),
            summary: env.summary(Some(cfg.seed)),
        });
    }
    write_json(&index_rows, &cfg.out.join("episodes.json"))?;
    println!("exported {episodes} episodes to {}", dir.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { common, steps, strategy } => cmd_train(common, steps, strategy),
        Command::Evaluate {
            common,
            checkpoint,
            blue,
            strategy,
            episodes,
        } => cmd_evaluate(common, checkpoint, blue, strategy, episodes),
        Command::Duel {
            common,
            blue,
            checkpoint,
            red,
            strategy,
            scenario,
        } => cmd_duel(common, blue, checkpoint, red, strategy, scenario),
        Command::Export {
            common,
            blue,
            checkpoint,
            strategy,
            episodes,
            scenario,
        } => cmd_export(common, blue, checkpoint, strategy, episodes, scenario),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
