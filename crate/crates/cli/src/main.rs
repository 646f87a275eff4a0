//! `landmarks`: run the detection pipeline on a simulated scenario or a
//! recorded replay, or generate benchmark scenarios.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use landmark_core::classifier::ClassifierKind;
use landmark_core::io::export_replay;
use landmark_core::par::Execution;
use landmark_core::pipeline::{run, PipelineConfig, RunSummary};
use landmark_core::simulator::Scenario;

#[derive(Parser, Debug)]
#[command(name = "landmarks", version, about = "Semantic landmark detection from LiDAR and camera detections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the pipeline. Flags override values from --config.
    Run(RunArgs),
    /// Write a benchmark scenario, optionally rendered to a replay directory.
    Simulate(SimulateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Classifier {
    Geom,
    External,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Sequential,
    Parallel,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// JSON pipeline configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario JSON to simulate.
    #[arg(long, conflicts_with = "replay")]
    scenario: Option<PathBuf>,
    /// Replay directory with frames.json and calibration.json.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// IoU threshold for 2D/3D matching.
    #[arg(long)]
    tau: Option<f64>,
    /// Points per classifier input.
    #[arg(long)]
    np: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    classifier: Option<Classifier>,
    /// Command for the external classifier process.
    #[arg(long)]
    external_cmd: Option<String>,
    /// Per-call external classifier timeout in milliseconds.
    #[arg(long)]
    external_timeout_ms: Option<u64>,
    #[arg(long)]
    metrics_out: Option<PathBuf>,
    #[arg(long)]
    tracks_out: Option<PathBuf>,
    /// Directory for labeled per-component training records.
    #[arg(long)]
    export_components: Option<PathBuf>,
    #[arg(long, value_enum)]
    execution: Option<Mode>,
}

#[derive(clap::Args, Debug)]
struct SimulateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of frames.
    #[arg(long)]
    frames: Option<usize>,
    /// Where to write the scenario JSON.
    #[arg(long)]
    out: PathBuf,
    /// Also render every frame into this replay directory.
    #[arg(long)]
    replay_dir: Option<PathBuf>,
}

fn build_config(a: RunArgs) -> Result<PipelineConfig> {
    let mut cfg = match &a.config {
        Some(p) => PipelineConfig::load(p).with_context(|| format!("loading config {}", p.display()))?,
        None => PipelineConfig::default(),
    };
    if a.scenario.is_some() {
        cfg.scenario = a.scenario;
        cfg.replay = None;
    }
    if a.replay.is_some() {
        cfg.replay = a.replay;
        cfg.scenario = None;
    }
    if let Some(v) = a.tau {
        cfg.tau = v;
    }
    if let Some(v) = a.np {
        cfg.n_p = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.classifier {
        cfg.classifier = match v {
            Classifier::Geom => ClassifierKind::GeometricBaseline,
            Classifier::External => ClassifierKind::ExternalProtocol,
        };
    }
    if a.external_cmd.is_some() {
        cfg.external_cmd = a.external_cmd;
    }
    if let Some(v) = a.external_timeout_ms {
        cfg.external_timeout_ms = v;
    }
    if a.metrics_out.is_some() {
        cfg.metrics_out = a.metrics_out;
    }
    if a.tracks_out.is_some() {
        cfg.tracks_out = a.tracks_out;
    }
    if a.export_components.is_some() {
        cfg.export_components = a.export_components;
    }
    if let Some(m) = a.execution {
        cfg.execution = match m {
            Mode::Sequential => Execution::Sequential,
            Mode::Parallel => Execution::Parallel,
        };
    }
    if cfg.scenario.is_none() && cfg.replay.is_none() {
        bail!("give --scenario or --replay (or set one in --config)");
    }
    Ok(cfg)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.3}"))
}

fn print_summary(s: &RunSummary) {
    println!("frames: {}", s.frames);
    if let Some(m) = &s.metrics {
        for (name, c) in &m.per_class {
            println!(
                "{name}: recall {} precision {} rmse_xy {} overlap {} (tp {} fp {} fn {})",
                fmt_opt(c.recall),
                fmt_opt(c.precision),
                fmt_opt(c.rmse_xy),
                fmt_opt(c.mean_overlap),
                c.tp,
                c.fp,
                c.fn_
            );
        }
    }
    for (stage, st) in &s.runtime_ms {
        println!("{stage}: mean {:.2} ms, p95 {:.2} ms", st.mean, st.p95);
    }
    if s.exported_records > 0 {
        println!("exported component records: {}", s.exported_records);
    }
    if s.degraded_calls > 0 {
        println!("classifier calls degraded to prior: {}", s.degraded_calls);
    }
}

fn run_cmd(a: RunArgs) -> Result<()> {
    let cfg = build_config(a)?;
    let summary = run(&cfg)?;
    for w in summary.warnings.iter().take(10) {
        log::warn!("{w}");
    }
    print_summary(&summary);
    Ok(())
}

fn simulate_cmd(a: SimulateArgs) -> Result<()> {
    let mut s = Scenario::benchmark(a.seed)?;
    if let Some(n) = a.frames {
        s.n_frames = n;
    }
    let json = serde_json::to_string_pretty(&s)?;
    std::fs::write(&a.out, json).with_context(|| format!("writing {}", a.out.display()))?;
    println!("scenario: {} ({} landmarks, {} frames)", a.out.display(), s.world.landmarks.len(), s.n_frames);
    if let Some(dir) = a.replay_dir {
        export_replay(&s, &dir, Execution::Parallel)?;
        println!("replay: {}", dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
