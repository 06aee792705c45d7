//! The `hri` command line. Exit codes: 0 success, 1 runtime failure, 2 usage
//! error. `HRI_SEED` supplies the default `--seed`.

use std::ffi::OsString;
use std::fs;
use std::net::SocketAddr;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use crate::executor::ExecutorConfig;
use crate::gesture::{build_dataset, DatasetSpec};
use crate::interaction::{run_scenario, InteractionConfig};
use crate::recognizer::{evaluate, gradient_check_many, load_weights, save_weights, train, LstmRecognizer, TrainConfig};
use crate::serve::{LiveSession, ServeConfig};

/// Plain `seed` default when neither the flag nor `HRI_SEED` is given.
const DEFAULT_SEED: u64 = 1;
const GRAD_CHECK_LIMIT: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "hri", version, about = "Gesture-driven service-robot interaction simulator", arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Train the activity classifier on a synthetic corpus.
    Train {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        per_class: usize,
        /// Per-coordinate noise standard deviation in meters.
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
        #[arg(long, env = "HRI_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        epochs: Option<usize>,
        /// Hidden size used for all three layers.
        #[arg(long)]
        hidden: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
    },
    /// Report accuracy and the confusion matrix on a fresh synthetic corpus.
    Eval {
        #[arg(long)]
        weights: PathBuf,
        /// Corpus seed; use one different from training for a held-out set.
        #[arg(long, env = "HRI_SEED", default_value_t = DEFAULT_SEED + 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        per_class: usize,
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
    },
    /// Play a scenario script and write the event log.
    RunScenario {
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        /// Write the JSON-lines log here instead of standard output.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Priority and executor overrides (`key = value` lines).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compare BPTT gradients with finite differences on random small networks.
    GradCheck {
        #[arg(long, default_value_t = 20)]
        instances: u64,
        #[arg(long, env = "HRI_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1e-5)]
        epsilon: f64,
    },
    /// Run the live session behind a WebSocket endpoint at /ws.
    Serve {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory of console assets served at /.
        #[arg(long)]
        static_dir: Option<PathBuf>,
        /// Simulated seconds per wall-clock second.
        #[arg(long, default_value_t = 1.0)]
        speed: f64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn interaction_config(path: Option<&PathBuf>) -> anyhow::Result<InteractionConfig> {
    let mut cfg = InteractionConfig::default();
    if let Some(p) = path {
        cfg.executor = ExecutorConfig::load(p).with_context(|| format!("reading {}", p.display()))?;
    }
    Ok(cfg)
}

fn execute(cmd: Cmd) -> anyhow::Result<i32> {
    match cmd {
        Cmd::Train { out, per_class, noise, seed, epochs, hidden, learning_rate } => {
            let data = build_dataset(&DatasetSpec::all_activities(per_class, noise, seed))?;
            let mut cfg = TrainConfig { seed, ..TrainConfig::default() };
            if let Some(e) = epochs {
                cfg.epochs = e;
            }
            if let Some(h) = hidden {
                cfg.hidden = [h; 3];
            }
            if let Some(lr) = learning_rate {
                cfg.learning_rate = lr;
            }
            let model = train(&data, &cfg)?;
            let last = model.epoch_losses.len() - 1;
            println!(
                "trained {} samples for {last} epochs: loss {:.5}, training accuracy {:.2}%",
                data.len(),
                model.epoch_losses[last],
                model.epoch_accuracy[last] * 100.0
            );
            save_weights(&model.network, &out).with_context(|| format!("writing {}", out.display()))?;
            println!("weights written to {}", out.display());
            Ok(0)
        }
        Cmd::Eval { weights, seed, per_class, noise } => {
            let net = load_weights(&weights).with_context(|| format!("loading {}", weights.display()))?;
            let data = build_dataset(&DatasetSpec::all_activities(per_class, noise, seed))?;
            let m = evaluate(&net, &data)?;
            println!("accuracy {:.2}% ({} samples)", m.accuracy() * 100.0, m.total());
            print!("{m}");
            Ok(0)
        }
        Cmd::RunScenario { script, weights, log, config } => {
            let cfg = interaction_config(config.as_ref())?;
            let run = run_scenario(&script, &weights, cfg)?;
            match log {
                Some(path) => {
                    fs::write(&path, run.log.to_jsonl()).with_context(|| format!("writing {}", path.display()))?;
                    for e in run.log.events() {
                        println!("{:>9.3}  {}", e.time, e.label());
                    }
                }
                None => print!("{}", run.log.to_jsonl()),
            }
            Ok(0)
        }
        Cmd::GradCheck { instances, seed, epsilon } => {
            if instances == 0 {
                bail!("--instances must be positive");
            }
            let r = gradient_check_many(seed, instances, epsilon)?;
            println!(
                "max relative error {:.3e} over {instances} networks (worst parameter {} of {})",
                r.max_relative_error, r.worst_index, r.parameters
            );
            Ok(if r.max_relative_error < GRAD_CHECK_LIMIT { 0 } else { 1 })
        }
        Cmd::Serve { weights, port, host, static_dir, speed, config } => {
            let net = load_weights(&weights).with_context(|| format!("loading {}", weights.display()))?;
            let cfg = interaction_config(config.as_ref())?;
            let addr: SocketAddr = format!("{host}:{port}").parse().context("invalid --host/--port")?;
            if !(speed.is_finite() && speed > 0.0) {
                bail!("--speed must be positive");
            }
            let session = LiveSession::new(LstmRecognizer { net, stride: cfg.stride }, cfg);
            let serve_cfg = ServeConfig { speed, static_dir, ..ServeConfig::default() };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(addr)
                    .await
                    .with_context(|| format!("binding {addr}"))?;
                println!("serving on ws://{}/ws", listener.local_addr()?);
                crate::serve::serve(listener, session, serve_cfg, async {
                    let _ = tokio::signal::ctrl_c().await;
                })
                .await?;
                Ok::<_, anyhow::Error>(())
            })?;
            Ok(0)
        }
    }
}
