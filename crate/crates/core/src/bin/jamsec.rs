//! Command-line front end: single runs, arrival-rate sweeps, attacker
//! strategy optimization, and the validation suite.
//!
//! Exit codes: 0 ok, 1 usage, 2 config/IO error, 3 validation failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use jamsec::optimizer::{GridSpec, Objective};
use jamsec::params::{self, AttackerPolicy, ConfigFile, SystemConfig};
use jamsec::sensing::DetectorModel;
use jamsec::sim::{self, SimOptions, StarvedSecrecy};
use jamsec::sweep::{self, AttackMode};
use jamsec::validate;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "jamsec", version, about = "Slot-based simulator of a buffered link under an energy-harvesting jammer/eavesdropper")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation and write the report as JSON.
    Run(RunArgs),
    /// Sweep the arrival rate and write the secure-throughput curves as CSV.
    Fig1(Fig1Args),
    /// Grid-search the attacker strategy and export the value surface.
    Optimize(OptimizeArgs),
    /// Run the oracle/invariant self-checks.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Config file (TOML). Missing fields take documented defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Simulated slots.
    #[arg(long, default_value_t = 100_000)]
    slots: u64,
    /// Fraction of slots discarded before estimation.
    #[arg(long, default_value_t = 0.1)]
    burn_in: f64,
    /// Force sensing on.
    #[arg(long, overrides_with = "no_sense")]
    sense: bool,
    /// Force sensing off.
    #[arg(long)]
    no_sense: bool,
    /// Secrecy accounting for slots where the attacker is not listening.
    #[arg(long, value_enum, default_value_t = StarvedSecrecyArg::AsWritten)]
    eve_starved_secrecy: StarvedSecrecyArg,
    /// Count jam-surviving decodes as departures.
    #[arg(long)]
    jam_departs: bool,
    /// Detector statistic model.
    #[arg(long, value_enum, default_value_t = DetectorModelArg::Gaussian)]
    detector: DetectorModelArg,
    /// Override a config field by name, e.g. --set lambda_a=0.7 (repeatable).
    #[arg(long = "set", value_name = "FIELD=VALUE")]
    sets: Vec<String>,

    // Dedicated overrides for every config field.
    #[arg(long)]
    p_a: Option<f64>,
    #[arg(long)]
    p_j: Option<f64>,
    #[arg(long)]
    p_d: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    w_bw: Option<f64>,
    #[arg(long)]
    t_slot: Option<f64>,
    #[arg(long)]
    b_bits: Option<f64>,
    #[arg(long)]
    lambda_a: Option<f64>,
    #[arg(long)]
    alpha_a: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    e_const: Option<f64>,
    #[arg(long)]
    sigma2_ab: Option<f64>,
    #[arg(long)]
    sigma2_ae: Option<f64>,
    #[arg(long)]
    sigma2_eb: Option<f64>,

    // Attacker policy overrides.
    #[arg(long)]
    alpha_e: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    p_fa: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StarvedSecrecyArg {
    AsWritten,
    LinkBased,
}

impl From<StarvedSecrecyArg> for StarvedSecrecy {
    fn from(a: StarvedSecrecyArg) -> Self {
        match a {
            StarvedSecrecyArg::AsWritten => StarvedSecrecy::AsWritten,
            StarvedSecrecyArg::LinkBased => StarvedSecrecy::LinkBased,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorModelArg {
    Gaussian,
    ChiSquare,
}

impl From<DetectorModelArg> for DetectorModel {
    fn from(a: DetectorModelArg) -> Self {
        match a {
            DetectorModelArg::Gaussian => DetectorModel::GaussianApprox,
            DetectorModelArg::ChiSquare => DetectorModel::ChiSquareExact,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Report output path (JSON).
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
}

#[derive(Args)]
struct Fig1Args {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated arrival rates.
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    lambdas: String,
    /// Comma-separated curves: no_attack, attack_nosense, attack_sense.
    #[arg(long, default_value = "no_attack,attack_nosense,attack_sense")]
    modes: String,
    /// Grid points per strategy axis for the attack curves.
    #[arg(long, alias = "grid-M", default_value_t = 11)]
    grid_m: usize,
    /// CSV output path.
    #[arg(long, default_value = "fig1.csv")]
    out: PathBuf,
    /// Optional SVG line-plot output path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid points per axis.
    #[arg(long, alias = "grid-M", default_value_t = 11)]
    grid_m: usize,
    /// Add the sensing window as a third axis.
    #[arg(long)]
    optimize_tau: bool,
    /// Objective per cell.
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Simulation)]
    objective: ObjectiveArg,
    /// Surface CSV output path.
    #[arg(long, default_value = "surface.csv")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Simulation,
    SemiAnalytic,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn load_setup(common: &CommonArgs) -> Result<(SystemConfig, AttackerPolicy, SimOptions), String> {
    let file = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
            ConfigFile::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ConfigFile::default(),
    };
    let (mut cfg, mut policy) = file.resolve().map_err(|e| e.to_string())?;

    let overrides: [(&str, Option<f64>); 14] = [
        ("p_a", common.p_a),
        ("p_j", common.p_j),
        ("p_d", common.p_d),
        ("kappa", common.kappa),
        ("w_bw", common.w_bw),
        ("t_slot", common.t_slot),
        ("b_bits", common.b_bits),
        ("lambda_a", common.lambda_a),
        ("alpha_a", common.alpha_a),
        ("eta", common.eta),
        ("e_const", common.e_const),
        ("sigma2_ab", common.sigma2_ab),
        ("sigma2_ae", common.sigma2_ae),
        ("sigma2_eb", common.sigma2_eb),
    ];
    for (name, value) in overrides {
        if let Some(v) = value {
            params::set_field(&mut cfg, name, v).map_err(|e| e.to_string())?;
        }
    }
    for kv in &common.sets {
        let (name, value) = kv
            .split_once('=')
            .ok_or_else(|| format!("--set expects FIELD=VALUE, got `{kv}`"))?;
        let value: f64 = value
            .parse()
            .map_err(|_| format!("--set {name}: `{value}` is not a number"))?;
        params::set_field(&mut cfg, name.trim(), value).map_err(|e| e.to_string())?;
    }

    if let Some(v) = common.alpha_e {
        policy.alpha_e = v;
    }
    if let Some(v) = common.rho {
        policy.rho = v;
    }
    if let Some(v) = common.tau {
        policy.tau = v;
    }
    if let Some(v) = common.p_fa {
        policy.p_fa = v;
    }
    if common.sense {
        policy.sensing_enabled = true;
    }
    if common.no_sense {
        policy.sensing_enabled = false;
    }

    params::derive(&cfg).map_err(|e| e.to_string())?;
    params::validate_policy(&policy, &cfg).map_err(|e| e.to_string())?;

    let opts = SimOptions {
        burn_in_frac: common.burn_in,
        jam_success_departs: common.jam_departs,
        starved_secrecy: common.eve_starved_secrecy.into(),
        detector_model: common.detector.into(),
        ..Default::default()
    };
    Ok((cfg, policy, opts))
}

#[derive(Serialize)]
struct RunDocument<'a> {
    config: &'a SystemConfig,
    policy: &'a AttackerPolicy,
    options: &'a SimOptions,
    report: &'a sim::SimReport,
}

fn write_text(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn cmd_run(args: &RunArgs) -> Result<(), (u8, String)> {
    let (cfg, policy, opts) = load_setup(&args.common).map_err(|e| (2, e))?;
    let report = sim::run(&cfg, &policy, args.common.seed, args.common.slots, &opts)
        .map_err(|e| (2, e.to_string()))?;
    let doc = RunDocument {
        config: &cfg,
        policy: &policy,
        options: &opts,
        report: &report,
    };
    let json = serde_json::to_string_pretty(&doc).map_err(|e| (2, e.to_string()))?;
    write_text(&args.out, &json).map_err(|e| (2, e))?;
    println!(
        "slots={} counted={} mu_a={:.6}±{:.6} mu_sec={:.6}±{:.6} report={}",
        report.n_slots,
        report.counted,
        report.mu_a_hat,
        report.mu_a_ci,
        report.mu_sec_hat,
        report.mu_sec_ci,
        args.out.display()
    );
    Ok(())
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{tok}` is not a number"))
        })
        .collect()
}

fn cmd_fig1(args: &Fig1Args) -> Result<(), (u8, String)> {
    let (cfg, policy, opts) = load_setup(&args.common).map_err(|e| (2, e))?;
    let lambdas = parse_list(&args.lambdas).map_err(|e| (2, e))?;
    let modes: Vec<AttackMode> = args
        .modes
        .split(',')
        .map(|tok| {
            AttackMode::parse(tok.trim())
                .ok_or_else(|| format!("unknown mode `{tok}` (expected no_attack, attack_nosense, attack_sense)"))
        })
        .collect::<Result<_, _>>()
        .map_err(|e| (2, e))?;
    let rows = sweep::run_arrival_sweep(
        &cfg,
        &policy,
        &lambdas,
        &modes,
        args.common.seed,
        args.common.slots,
        args.grid_m,
        &opts,
    )
    .map_err(|e| (2, e.to_string()))?;
    sweep::write_arrival_sweep_csv(&rows, &args.out).map_err(|e| (2, e.to_string()))?;
    if let Some(svg) = &args.svg {
        sweep::write_arrival_sweep_svg(&rows, svg).map_err(|e| (2, e.to_string()))?;
    }
    println!(
        "{} rows ({} rates x {} modes) -> {}",
        rows.len(),
        lambdas.len(),
        modes.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<(), (u8, String)> {
    let (cfg, policy, opts) = load_setup(&args.common).map_err(|e| (2, e))?;
    let spec = GridSpec {
        m_points: args.grid_m,
        optimize_tau: args.optimize_tau,
        objective: match args.objective {
            ObjectiveArg::Simulation => Objective::Simulation,
            ObjectiveArg::SemiAnalytic => Objective::SemiAnalytic,
        },
        slots_per_cell: args.common.slots,
    };
    let result = jamsec::optimizer::grid_search(&cfg, &policy, &spec, &opts, args.common.seed)
        .map_err(|e| (2, e.to_string()))?;
    sweep::write_surface_csv(&result, &args.out).map_err(|e| (2, e.to_string()))?;
    let best = result.best;
    match best.tau {
        Some(tau) => println!(
            "best: rho={:.3} alpha_e={:.3} tau={:.3e} mu_sec={:.6}±{:.6} ({} cells, {} failed) -> {}",
            best.rho,
            best.alpha_e,
            tau,
            best.mu_sec,
            best.ci,
            result.cells.len(),
            result.failed.len(),
            args.out.display()
        ),
        None => println!(
            "best: rho={:.3} alpha_e={:.3} mu_sec={:.6}±{:.6} ({} cells, {} failed) -> {}",
            best.rho,
            best.alpha_e,
            best.mu_sec,
            best.ci,
            result.cells.len(),
            result.failed.len(),
            args.out.display()
        ),
    }
    if !result.failed.is_empty() {
        for (idx, err) in &result.failed {
            eprintln!("cell {idx} failed: {err}");
        }
        return Err((2, format!("{} grid cells failed", result.failed.len())));
    }
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), (u8, String)> {
    let report = validate::run_suite(args.seed);
    print!("{}", report.render());
    if report.all_passed() {
        Ok(())
    } else {
        Err((3, format!("{} validation checks failed", report.failures())))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own message; usage problems exit 1.
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = match &cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Fig1(args) => cmd_fig1(args),
        Cmd::Optimize(args) => cmd_optimize(args),
        Cmd::Validate(args) => cmd_validate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => fail(code, msg),
    }
}
