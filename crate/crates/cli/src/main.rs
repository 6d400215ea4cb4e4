//! `rl-aod`: dataset generation, degradation, agent training, joint
//! inference, evaluation and reporting.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rlaod_core::environment::load_dataset;
use rlaod_core::imaging::{write_ppm, ActionFamily};
use rlaod_core::orchestrator::{
    degrade_dataset_cmd, emit_report, evaluate_modes, format_table, generate_dataset_cmd, load_agent, load_report,
    parse_modes, run_rl_aod, test_scenes, train_and_save, train_scenes, AgentBundle, RunConfig, REPORT_JSON,
};
use rlaod_core::{Error, Result};

#[derive(Parser)]
#[command(name = "rl-aod", version, about = "Active object detection with brightness and scale agents")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct GlobalArgs {
    /// JSON run configuration; flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Detector name: oracle or external.
    #[arg(long, global = true)]
    detector: Option<String>,
    /// External detector endpoint: tcp://host:port or a command line.
    #[arg(long, global = true)]
    endpoint: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate synthetic scenes into a dataset directory.
    GenData {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Write each scene of a dataset plus its four degradations.
    Degrade {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one agent and save its weights and log.
    Train {
        #[arg(long, value_parser = ["brightness", "scale"])]
        agent: String,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Adjust a dataset with both agents; writes final images and trajectories.
    Run {
        /// Dataset directory; defaults to the configured test scenes.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Evaluate modes on the degraded test set and write the report.
    Evaluate {
        /// Comma-separated modes: FR, B2, BS2, B4, BS4, FR*, BS4*.
        #[arg(long)]
        modes: Option<String>,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        reports: Option<PathBuf>,
    },
    /// Print a saved report and rewrite its CSV and plot files.
    Report {
        /// Report JSON; defaults to report.json in the reports directory.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        reports: Option<PathBuf>,
    },
}

fn load_config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(endpoint) = &g.endpoint {
        cfg.detector_config.endpoint = Some(endpoint.clone());
        if g.detector.is_none() {
            cfg.detector = "external".into();
        }
    }
    if let Some(d) = &g.detector {
        cfg.detector = d.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<()> {
    let mut cfg = load_config(&cli.global)?;
    match cli.command {
        Cmd::GenData { out, count } => {
            let manifest = generate_dataset_cmd(cfg.seed, count, &cfg.scene, &out)?;
            println!("wrote {} images to {}", manifest.images.len(), out.display());
        }
        Cmd::Degrade { input, out } => {
            let manifest = degrade_dataset_cmd(&input, cfg.seed, &out)?;
            println!("wrote {} images to {}", manifest.images.len(), out.display());
        }
        Cmd::Train { agent, weights } => {
            let family: ActionFamily = agent.parse()?;
            if let Some(w) = weights {
                cfg.weights_dir = w;
            }
            let env = cfg.environment()?;
            let trained = train_and_save(family, &cfg, &env, &train_scenes(&cfg)?)?;
            let last = trained.log.last();
            println!(
                "trained {family} agent: {} iterations, last loss {}, mean episode reward {}",
                trained.log.len(),
                last.and_then(|r| r.loss).map_or("-".into(), |v| format!("{v:.5}")),
                last.and_then(|r| r.mean_episode_reward).map_or("-".into(), |v| format!("{v:.3}")),
            );
            println!("weights in {}", cfg.weights_dir.display());
        }
        Cmd::Run {
            input,
            out,
            horizon,
            weights,
        } => {
            if let Some(w) = weights {
                cfg.weights_dir = w;
            }
            let horizon = horizon.unwrap_or(cfg.horizon);
            let images = match input {
                Some(dir) => load_dataset(&dir)?,
                None => test_scenes(&cfg)?,
            };
            let bundle = AgentBundle::load(&cfg.weights_dir)?;
            let env = cfg.environment()?;
            let outputs = run_rl_aod(&env, &bundle, &images, horizon)?;
            std::fs::create_dir_all(&out)?;
            for o in &outputs {
                write_ppm(&out.join(format!("final_{:06}.ppm", o.trajectory.image_id)), &o.image)?;
            }
            let trajectories: Vec<_> = outputs.iter().map(|o| &o.trajectory).collect();
            std::fs::write(out.join("trajectory.json"), serde_json::to_string_pretty(&trajectories)? + "\n")?;
            println!("adjusted {} images into {}", outputs.len(), out.display());
        }
        Cmd::Evaluate {
            modes,
            weights,
            reports,
        } => {
            if let Some(w) = weights {
                cfg.weights_dir = w;
            }
            if let Some(r) = reports {
                cfg.reports_dir = r;
            }
            let modes = match modes {
                Some(list) => parse_modes(&list)?,
                None => cfg.modes.clone(),
            };
            let bundle = if modes.iter().any(|m| m.uses_agents()) {
                Some(AgentBundle {
                    brightness: load_agent(&cfg.weights_dir, ActionFamily::Brightness)?,
                    scale: load_agent(&cfg.weights_dir, ActionFamily::Scale)?,
                })
            } else {
                None
            };
            let env = cfg.environment()?;
            let scenes = test_scenes(&cfg)?;
            let report = evaluate_modes(&env, bundle.as_ref(), &scenes, &modes, cfg.seed)?;
            emit_report(&cfg.reports_dir, &report)?;
            print!("{}", format_table(&report));
            println!("report in {}", cfg.reports_dir.display());
        }
        Cmd::Report { input, reports } => {
            if let Some(r) = reports {
                cfg.reports_dir = r;
            }
            let path = input.unwrap_or_else(|| cfg.reports_dir.join(REPORT_JSON));
            let report = load_report(&path)?;
            emit_report(&cfg.reports_dir, &report)?;
            print!("{}", format_table(&report));
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::WeightFile { .. } => 2,
        Error::Protocol(_) | Error::Transport(_) => 3,
        Error::Contract(_) | Error::Training(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
