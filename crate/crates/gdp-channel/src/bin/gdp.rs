//! `gdp` — generalized depolarizing channel experiments.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical invariant
//! failure, 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gdp_channel::experiments::{
    cmd_entangle, cmd_kraus, cmd_metrics, cmd_rates, cmd_sweep, csv_series, render_svg,
    ChannelChoice, CliError, ExperimentConfig, SWEEP_DEFAULT,
};

#[derive(Parser)]
#[command(name = "gdp", version, about = "Generalized depolarizing channel experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print damping rates, Lamb shift and channel parameters.
    Rates(Common),
    /// Print the closed-form and pipeline Kraus sets at a given time.
    Kraus(KrausArgs),
    /// Emit the channel-metrics CSV over the time grid.
    Metrics(Common),
    /// Emit concurrence/EoF curves for a Bell pair under local channels.
    Entangle(Common),
    /// Emit metrics blocks over a (T, alpha, omega_c) parameter sweep.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// key=value config file ('#' comments); flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Channel selection: gdp|dp|both|identity.
    #[arg(long)]
    channel: Option<String>,
    /// Bath temperature.
    #[arg(long = "T")]
    temperature: Option<f64>,
    /// Coupling strength of the Ohmic spectral density.
    #[arg(long)]
    alpha: Option<f64>,
    /// Qubit transition frequency.
    #[arg(long)]
    omega0: Option<f64>,
    /// Ohmic cutoff frequency.
    #[arg(long)]
    omegac: Option<f64>,
    /// Upper limit of the Lamb-shift principal-value integral.
    #[arg(long)]
    omegamax: Option<f64>,
    #[arg(long = "t-start")]
    t_start: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Number of grid points (>= 2).
    #[arg(long)]
    points: Option<usize>,
    /// Azimuthal angle of the initial Bloch vector.
    #[arg(long)]
    u: Option<f64>,
    /// Polar angle of the initial Bloch vector.
    #[arg(long)]
    v: Option<f64>,
    /// Free frequency of qubit 1 (dressing only).
    #[arg(long)]
    omega1: Option<f64>,
    /// Free frequency of qubit 2 (dressing only).
    #[arg(long)]
    omega2: Option<f64>,
    /// Use the high-temperature identification for the rates.
    #[arg(long = "high-t-approx")]
    high_t_approx: bool,
    /// Also write an SVG plot next to the output file.
    #[arg(long = "emit-svg")]
    emit_svg: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KrausArgs {
    #[command(flatten)]
    common: Common,
    /// Evaluation time.
    #[arg(long, default_value_t = 0.1)]
    t: f64,
}

fn apply_overrides(cfg: &mut ExperimentConfig, c: &Common) {
    if let Some(v) = c.temperature {
        cfg.temperature = v;
    }
    if let Some(v) = c.alpha {
        cfg.coupling = v;
    }
    if let Some(v) = c.omega0 {
        cfg.omega0 = v;
    }
    if let Some(v) = c.omegac {
        cfg.omegac = v;
    }
    if let Some(v) = c.omegamax {
        cfg.omegamax = Some(v);
    }
    if let Some(v) = c.t_start {
        cfg.t_start = v;
    }
    if let Some(v) = c.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = c.points {
        cfg.points = v;
    }
    if let Some(v) = c.u {
        cfg.u = v;
    }
    if let Some(v) = c.v {
        cfg.v = v;
    }
    if let Some(v) = c.omega1 {
        cfg.omega1 = v;
    }
    if let Some(v) = c.omega2 {
        cfg.omega2 = v;
    }
    if c.high_t_approx {
        cfg.high_t_approx = true;
    }
    if c.emit_svg {
        cfg.emit_svg = true;
    }
    if let Some(p) = &c.out {
        cfg.out = Some(p.clone());
    }
}

fn config_from(c: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path)?;
        cfg.apply_file(&text)?;
    }
    if let Some(ch) = &c.channel {
        cfg.channel = match ch.as_str() {
            "gdp" => ChannelChoice::Gdp,
            "dp" => ChannelChoice::Dp,
            "both" => ChannelChoice::Both,
            "identity" => ChannelChoice::Identity,
            other => {
                return Err(CliError::Config(format!(
                    "unknown channel '{other}' (expected gdp|dp|both|identity)"
                )))
            }
        };
    }
    apply_overrides(&mut cfg, c);
    Ok(cfg)
}

fn emit(cfg: &ExperimentConfig, text: &str, svg: Option<String>) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let Some(svg) = svg {
        let path = cfg
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from("gdp-plot.csv"))
            .with_extension("svg");
        std::fs::write(path, svg)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.cmd {
        Cmd::Rates(c) => {
            let cfg = config_from(c)?;
            emit(&cfg, &cmd_rates(&cfg)?, None)?;
            Ok(0)
        }
        Cmd::Kraus(k) => {
            let cfg = config_from(&k.common)?;
            let report = cmd_kraus(&cfg, k.t)?;
            emit(&cfg, &report.text, None)?;
            Ok(if report.discrepancy > 1e-8 { 3 } else { 0 })
        }
        Cmd::Metrics(c) => {
            let cfg = config_from(c)?;
            let csv = cmd_metrics(&cfg)?;
            let svg = cfg.emit_svg.then(|| {
                let s = csv_series(&csv, &[2, 3]);
                render_svg(
                    "Bloch volume: GDP vs DP",
                    &[("V_gdp", s[0].clone()), ("V_dp", s[1].clone())],
                )
            });
            emit(&cfg, &csv, svg)?;
            Ok(0)
        }
        Cmd::Entangle(c) => {
            let cfg = config_from(c)?;
            let csv = cmd_entangle(&cfg)?;
            let svg = cfg.emit_svg.then(|| {
                let s = csv_series(&csv, &[1, 2]);
                render_svg(
                    "Concurrence: GDP vs DP",
                    &[("C_gdp", s[0].clone()), ("C_dp", s[1].clone())],
                )
            });
            emit(&cfg, &csv, svg)?;
            Ok(0)
        }
        Cmd::Sweep(c) => {
            let cfg = config_from(c)?;
            emit(&cfg, &cmd_sweep(&cfg, &SWEEP_DEFAULT)?, None)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("gdp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
