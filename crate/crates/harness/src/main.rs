//! Command-line experiment runner.
//!
//! Subcommands: `train` (fit one scenario draw and checkpoint the network),
//! `infer` (run a checkpoint on a held-out draw), `sweep` (Monte Carlo
//! trend study over one axis), `baseline` (unencrypted and MRT reference
//! points). Flags mirror the scenario config fields; `--config` loads a TOML
//! file first and flags override it.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use secwave::cmlp::{load_checkpoint, save_checkpoint};
use secwave::joint::{infer, train};
use secwave::power::check_constraint;
use secwave::waveform::ser_per_subcarrier;

use secwave_harness::config::{BeamGainModeCfg, PowerConventionCfg, ScenarioConfig, TrainingMode};
use secwave_harness::emit::{emit, EmitFormat};
use secwave_harness::runner::{draw_channels, run_scenario, sweep, Scheme, SweepAxis};
use secwave_harness::{HarnessError, Result};

#[derive(Parser)]
#[command(name = "secwave", version, about = "Secure OFDM waveform experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the secure-coding network on one channel draw and save it.
    Train(TrainArgs),
    /// Run a saved network on a held-out channel draw.
    Infer(InferArgs),
    /// Monte Carlo sweep over one axis, all schemes, CSV + JSON output.
    Sweep(SweepArgs),
    /// Evaluate the unencrypted and MRT baselines at the configured point.
    Baseline(BaselineArgs),
}

/// Scenario overrides; every field mirrors the config file key of the same
/// name.
#[derive(Args)]
struct ConfigArgs {
    /// TOML scenario config; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p_s_w: Option<f64>,
    #[arg(long)]
    epsilon_e: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    noise_bob_w: Option<f64>,
    #[arg(long)]
    noise_eve_w: Option<f64>,
    #[arg(long)]
    wavelength_m: Option<f64>,
    #[arg(long)]
    altitude_km: Option<f64>,
    #[arg(long)]
    bob_radius_km: Option<f64>,
    #[arg(long)]
    eve_radius_km: Option<f64>,
    #[arg(long)]
    beamwidth_3db_rad: Option<f64>,
    #[arg(long)]
    mean_gain_bob_db: Option<f64>,
    #[arg(long)]
    mean_gain_eve_db: Option<f64>,
    #[arg(long)]
    rain_mu: Option<f64>,
    #[arg(long)]
    rain_sigma: Option<f64>,
    #[arg(long)]
    rician_k_db: Option<f64>,
    #[arg(long)]
    num_taps: Option<usize>,
    #[arg(long)]
    num_draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    adam_beta1: Option<f64>,
    #[arg(long)]
    adam_beta2: Option<f64>,
    #[arg(long)]
    adam_epsilon: Option<f64>,
    #[arg(long)]
    leaky_slope: Option<f64>,
    /// literature | paper_literal
    #[arg(long)]
    beam_gain_mode: Option<String>,
    /// energy | coherent
    #[arg(long)]
    power_convention: Option<String>,
    /// per_draw | amortized
    #[arg(long)]
    training_mode: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => ScenarioConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        apply!(
            n,
            p_s_w,
            epsilon_e,
            delta,
            max_iterations,
            noise_bob_w,
            noise_eve_w,
            wavelength_m,
            altitude_km,
            bob_radius_km,
            eve_radius_km,
            beamwidth_3db_rad,
            mean_gain_bob_db,
            mean_gain_eve_db,
            rain_mu,
            rain_sigma,
            rician_k_db,
            num_taps,
            num_draws,
            seed,
            epochs,
            learning_rate,
            adam_beta1,
            adam_beta2,
            adam_epsilon,
            leaky_slope
        );
        if let Some(mode) = &self.beam_gain_mode {
            cfg.beam_gain_mode = match mode.as_str() {
                "literature" => BeamGainModeCfg::Literature,
                "paper_literal" => BeamGainModeCfg::PaperLiteral,
                other => {
                    return Err(HarnessError::Config(format!(
                        "unknown beam gain mode '{other}'"
                    )))
                }
            };
        }
        if let Some(conv) = &self.power_convention {
            cfg.power_convention = match conv.as_str() {
                "energy" => PowerConventionCfg::Energy,
                "coherent" => PowerConventionCfg::Coherent,
                other => {
                    return Err(HarnessError::Config(format!(
                        "unknown power convention '{other}'"
                    )))
                }
            };
        }
        if let Some(mode) = &self.training_mode {
            cfg.training_mode = match mode.as_str() {
                "per_draw" => TrainingMode::PerDraw,
                "amortized" => TrainingMode::Amortized,
                other => {
                    return Err(HarnessError::Config(format!(
                        "unknown training mode '{other}'"
                    )))
                }
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Channel draw index to train on.
    #[arg(long, default_value_t = 0)]
    draw: usize,
    /// Checkpoint output path.
    #[arg(long, default_value = "params.json")]
    params: PathBuf,
    /// Optional per-epoch trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct InferArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Checkpoint to load.
    #[arg(long)]
    params: PathBuf,
    /// Held-out channel draw index.
    #[arg(long, default_value_t = 1)]
    draw: usize,
    /// Write the metrics JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Sweep axis: p_s, epsilon_e, or n.
    #[arg(long)]
    axis: String,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long, default_value = "sweep.csv")]
    out_csv: PathBuf,
    #[arg(long, default_value = "sweep.json")]
    out_json: PathBuf,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value = "baseline.csv")]
    out_csv: PathBuf,
}

#[derive(Serialize)]
struct InferReport {
    sum_secrecy_rate: f64,
    ser_bob: f64,
    ser_eve: f64,
    min_eve_ser: f64,
    allocation_converged: bool,
    constraint_satisfied: bool,
    power: Vec<f64>,
}

fn write_text(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let (bob, eve) = draw_channels(&cfg, args.draw)?;
    let outcome = train(&bob, &eve, &cfg.joint()?, cfg.seed)?;
    save_checkpoint(&outcome.params, &args.params)?;
    if let Some(trace_path) = &args.trace {
        let mut body =
            String::from("epoch,loss,sum_secrecy_rate,min_eve_ser,constraint_satisfied\n");
        for r in &outcome.trace {
            body.push_str(&format!(
                "{},{},{},{},{}\n",
                r.epoch, r.loss, r.sum_secrecy_rate, r.min_eve_ser, r.constraint_satisfied
            ));
        }
        write_text(trace_path, &body)?;
    }
    let last = outcome.trace.last().expect("at least one epoch");
    println!(
        "trained {} epochs; final loss {:.6}, sum secrecy rate {:.6} bits/s/Hz; checkpoint: {}",
        outcome.trace.len(),
        last.loss,
        last.sum_secrecy_rate,
        args.params.display()
    );
    Ok(())
}

fn cmd_infer(args: &InferArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let params = load_checkpoint(&args.params)?;
    if params.n() != cfg.n {
        return Err(HarnessError::Config(format!(
            "checkpoint is for n = {}, config asks for n = {}",
            params.n(),
            cfg.n
        )));
    }
    let (bob, eve) = draw_channels(&cfg, args.draw)?;
    let joint_cfg = cfg.joint()?;
    let inference = infer(&params, &bob, &eve, &joint_cfg)?;
    let (constraint_ok, _) = check_constraint(
        &inference.power,
        &eve,
        &inference.coding,
        &joint_cfg.bisection,
    )?;
    let min_eve_ser = ser_per_subcarrier(&inference.metrics.sinr_eve)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let report = InferReport {
        sum_secrecy_rate: inference.metrics.sum_secrecy_rate,
        ser_bob: inference.metrics.ser_bob,
        ser_eve: inference.metrics.ser_eve,
        min_eve_ser,
        allocation_converged: inference.allocation_converged,
        constraint_satisfied: inference.allocation_converged && constraint_ok,
        power: inference.power.as_slice().to_vec(),
    };
    let body = serde_json::to_string_pretty(&report)?;
    match &args.out {
        Some(path) => write_text(path, &body)?,
        None => println!("{body}"),
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    if args.config.seed.is_none() {
        return Err(HarnessError::Config(
            "sweep requires an explicit --seed for reproducibility".into(),
        ));
    }
    let cfg = args.config.resolve()?;
    let axis: SweepAxis = args.axis.parse()?;
    let rows = sweep(&cfg, axis, &args.values)?;
    emit(&rows, &args.out_csv, EmitFormat::Csv)?;
    emit(&rows, &args.out_json, EmitFormat::Json)?;
    println!(
        "swept {} over {} values x {} schemes ({} draws each): {} and {}",
        axis.name(),
        args.values.len(),
        Scheme::ALL.len(),
        cfg.num_draws,
        args.out_csv.display(),
        args.out_json.display()
    );
    Ok(())
}

fn cmd_baseline(args: &BaselineArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let mut rows = Vec::new();
    for scheme in [Scheme::Unencrypted, Scheme::Mrt] {
        rows.push(run_scenario(&cfg, scheme, "p_s", cfg.p_s_w)?);
    }
    emit(&rows, &args.out_csv, EmitFormat::Csv)?;
    for row in &rows {
        println!(
            "{}: mean secrecy rate {:.6} bits/s/Hz (stderr {:.6}), mean Eve SER {:.6}",
            row.scheme.name(),
            row.mean_secrecy_rate,
            row.stderr_secrecy_rate,
            row.mean_ser_eve
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Infer(args) => cmd_infer(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Baseline(args) => cmd_baseline(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
