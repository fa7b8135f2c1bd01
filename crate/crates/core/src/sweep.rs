//! Parameter sweeps and result emission: the secure-throughput-versus-arrival
//! curve under the no-attack baseline and the grid-optimized attack (with and
//! without sensing), generic single-parameter sweeps, and the CSV/SVG
//! writers.

use crate::analytics::{self, DEFAULT_ACCESS_MARGIN};
use crate::channel;
use crate::optimizer::{self, GridResult, GridSpec};
use crate::params::{self, AttackerPolicy, ConfigError, SystemConfig};
use crate::sim::{self, SimError, SimOptions};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Grid(#[from] optimizer::GridError),
    #[error("infeasible sweep point: {0}")]
    Infeasible(#[from] analytics::InfeasibleError),
    #[error("sweep value list is empty")]
    EmptyValues,
    #[error("io error writing {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Attack arrangement for one curve of the arrival-rate sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackMode {
    /// Silent attacker: zero jam probability, zero split, no sensing.
    NoAttack,
    /// Grid-optimized attacker without sensing.
    AttackNosense,
    /// Grid-optimized attacker with sensing enabled.
    AttackSense,
}

impl AttackMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            AttackMode::NoAttack => "no_attack",
            AttackMode::AttackNosense => "attack_nosense",
            AttackMode::AttackSense => "attack_sense",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "no_attack" => Some(AttackMode::NoAttack),
            "attack_nosense" => Some(AttackMode::AttackNosense),
            "attack_sense" => Some(AttackMode::AttackSense),
            _ => None,
        }
    }
}

/// One point of the arrival-rate sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalSweepRow {
    pub lambda_a: f64,
    pub mode: AttackMode,
    pub mu_sec: f64,
    pub ci: f64,
    /// Access probability the stability rule assigned at this point.
    pub alpha_a: f64,
    /// The optimized policy for attack modes.
    pub policy: AttackerPolicy,
}

/// Configure the base config for one arrival rate: set the rate and derive
/// the access probability from the stability rule (assuming a silent
/// attacker, who never reveals the jam probability in advance).
pub fn config_at_arrival_rate(
    base: &SystemConfig,
    lambda_a: f64,
) -> Result<SystemConfig, SweepError> {
    let mut cfg = *base;
    cfg.lambda_a = lambda_a;
    let derived = params::derive(&SystemConfig { alpha_a: 1.0, ..cfg })?;
    let p1 = channel::connection_prob(derived.r_target, derived.gamma_a, cfg.sigma2_ab);
    cfg.alpha_a = analytics::stable_access_prob(lambda_a, 0.0, p1, DEFAULT_ACCESS_MARGIN)?;
    Ok(cfg)
}

/// Run the secure-throughput-versus-arrival-rate sweep. Attack modes search a
/// fresh grid per point; every point derives its own deterministic seed from
/// `base_seed` and the point index.
#[allow(clippy::too_many_arguments)]
pub fn run_arrival_sweep(
    base: &SystemConfig,
    base_policy: &AttackerPolicy,
    lambdas: &[f64],
    modes: &[AttackMode],
    base_seed: u64,
    n_slots: u64,
    grid_m: usize,
    opts: &SimOptions,
) -> Result<Vec<ArrivalSweepRow>, SweepError> {
    if lambdas.is_empty() {
        return Err(SweepError::EmptyValues);
    }
    let mut rows = Vec::with_capacity(lambdas.len() * modes.len());
    for (idx, &lambda) in lambdas.iter().enumerate() {
        let cfg = config_at_arrival_rate(base, lambda)?;
        let seed = base_seed.wrapping_add(1000 * (idx as u64 + 1));
        for &mode in modes {
            let row = match mode {
                AttackMode::NoAttack => {
                    let policy = AttackerPolicy {
                        alpha_e: 0.0,
                        rho: 0.0,
                        sensing_enabled: false,
                        ..*base_policy
                    };
                    let report = sim::run(&cfg, &policy, seed, n_slots, opts)?;
                    ArrivalSweepRow {
                        lambda_a: lambda,
                        mode,
                        mu_sec: report.mu_sec_hat,
                        ci: report.mu_sec_ci,
                        alpha_a: cfg.alpha_a,
                        policy,
                    }
                }
                AttackMode::AttackNosense | AttackMode::AttackSense => {
                    let policy = AttackerPolicy {
                        sensing_enabled: mode == AttackMode::AttackSense,
                        ..*base_policy
                    };
                    let spec = GridSpec {
                        m_points: grid_m,
                        slots_per_cell: n_slots,
                        ..Default::default()
                    };
                    let result = optimizer::grid_search(&cfg, &policy, &spec, opts, seed)?;
                    let best = result.best;
                    ArrivalSweepRow {
                        lambda_a: lambda,
                        mode,
                        mu_sec: best.mu_sec,
                        ci: best.ci,
                        alpha_a: cfg.alpha_a,
                        policy: AttackerPolicy {
                            rho: best.rho,
                            alpha_e: best.alpha_e,
                            tau: best.tau.unwrap_or(policy.tau),
                            ..policy
                        },
                    }
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Where the per-point policy of a generic sweep comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicySource {
    Fixed(AttackerPolicy),
    Optimized { grid_m: usize },
}

/// Generic single-parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Config field to sweep (see [`params::FIELD_NAMES`]).
    pub param: String,
    pub values: Vec<f64>,
    pub policy: PolicySource,
    pub seed: u64,
    pub n_slots: u64,
    /// Re-derive the access probability from the stability rule at each
    /// point (only meaningful when the swept field changes the rule inputs).
    pub recompute_access: bool,
}

/// One row of a generic sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub mu_sec: f64,
    pub ci: f64,
    pub mu_a: f64,
}

pub fn run_sweep(
    base: &SystemConfig,
    base_policy: &AttackerPolicy,
    spec: &SweepSpec,
    opts: &SimOptions,
) -> Result<Vec<SweepRow>, SweepError> {
    if spec.values.is_empty() {
        return Err(SweepError::EmptyValues);
    }
    let mut rows = Vec::with_capacity(spec.values.len());
    for (idx, &value) in spec.values.iter().enumerate() {
        let mut cfg = *base;
        params::set_field(&mut cfg, &spec.param, value)?;
        if spec.recompute_access {
            cfg = config_at_arrival_rate(&cfg, cfg.lambda_a)?;
        }
        let seed = spec.seed.wrapping_add(1000 * (idx as u64 + 1));
        let (policy, report) = match &spec.policy {
            PolicySource::Fixed(p) => {
                let report = sim::run(&cfg, p, seed, spec.n_slots, opts)?;
                (*p, report)
            }
            PolicySource::Optimized { grid_m } => {
                let gspec = GridSpec {
                    m_points: *grid_m,
                    slots_per_cell: spec.n_slots,
                    ..Default::default()
                };
                let result = optimizer::grid_search(&cfg, base_policy, &gspec, opts, seed)?;
                let p = AttackerPolicy {
                    rho: result.best.rho,
                    alpha_e: result.best.alpha_e,
                    tau: result.best.tau.unwrap_or(base_policy.tau),
                    ..*base_policy
                };
                let report = sim::run(&cfg, &p, seed, spec.n_slots, opts)?;
                (p, report)
            }
        };
        let _ = policy;
        rows.push(SweepRow {
            value,
            mu_sec: report.mu_sec_hat,
            ci: report.mu_sec_ci,
            mu_a: report.mu_a_hat,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

fn write_file(path: &Path, contents: &str) -> Result<(), SweepError> {
    std::fs::write(path, contents).map_err(|source| SweepError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// CSV for the arrival sweep: `lambda_a,mode,mu_sec,ci`.
pub fn arrival_sweep_csv(rows: &[ArrivalSweepRow]) -> String {
    let mut out = String::from("lambda_a,mode,mu_sec,ci\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.6},{},{:.6},{:.6}",
            r.lambda_a,
            r.mode.as_str(),
            r.mu_sec,
            r.ci
        );
    }
    out
}

pub fn write_arrival_sweep_csv(rows: &[ArrivalSweepRow], path: &Path) -> Result<(), SweepError> {
    write_file(path, &arrival_sweep_csv(rows))
}

/// CSV for a grid surface: `rho,alpha_e[,tau],mu_sec,ci`.
pub fn surface_csv(result: &GridResult) -> String {
    let with_tau = result.cells.iter().any(|c| c.tau.is_some());
    let mut out = String::new();
    if with_tau {
        out.push_str("rho,alpha_e,tau,mu_sec,ci\n");
    } else {
        out.push_str("rho,alpha_e,mu_sec,ci\n");
    }
    for c in &result.cells {
        if with_tau {
            let _ = writeln!(
                out,
                "{:.6},{:.6},{:.6e},{:.6},{:.6}",
                c.rho,
                c.alpha_e,
                c.tau.unwrap_or(f64::NAN),
                c.mu_sec,
                c.ci
            );
        } else {
            let _ = writeln!(out, "{:.6},{:.6},{:.6},{:.6}", c.rho, c.alpha_e, c.mu_sec, c.ci);
        }
    }
    out
}

pub fn write_surface_csv(result: &GridResult, path: &Path) -> Result<(), SweepError> {
    write_file(path, &surface_csv(result))
}

/// Minimal SVG line plot of the arrival sweep, one polyline per mode.
pub fn arrival_sweep_svg(rows: &[ArrivalSweepRow]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 440.0;
    const ML: f64 = 60.0;
    const MR: f64 = 20.0;
    const MT: f64 = 20.0;
    const MB: f64 = 50.0;
    let modes: Vec<AttackMode> = {
        let mut seen = Vec::new();
        for r in rows {
            if !seen.contains(&r.mode) {
                seen.push(r.mode);
            }
        }
        seen
    };
    let xs: Vec<f64> = rows.iter().map(|r| r.lambda_a).collect();
    let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let y_max = rows
        .iter()
        .map(|r| r.mu_sec)
        .fold(0.0f64, f64::max)
        .max(1e-9)
        * 1.1;
    let x_span = (x_max - x_min).max(1e-9);
    let px = |x: f64| ML + (x - x_min) / x_span * (W - ML - MR);
    let py = |y: f64| H - MB - y / y_max * (H - MT - MB);
    let colors = ["#1f77b4", "#d62728", "#2ca02c"];

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\
         <line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\
         <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>",
        H - MB,
        W - MR,
        H - MB,
        H - MB
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">arrival rate (packets/slot)</text>\
         <text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">secure throughput (packets/slot)</text>",
        (W + ML - MR) / 2.0,
        H - 12.0,
        (H - MB + MT) / 2.0,
        (H - MB + MT) / 2.0
    );
    // Axis ticks.
    for i in 0..=5 {
        let fx = x_min + x_span * i as f64 / 5.0;
        let fy = y_max * i as f64 / 5.0;
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">{:.2}</text>\
             <text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{:.2}</text>",
            px(fx),
            H - MB + 18.0,
            fx,
            ML - 6.0,
            py(fy) + 4.0,
            fy
        );
    }
    for (mi, mode) in modes.iter().enumerate() {
        let pts: Vec<String> = rows
            .iter()
            .filter(|r| r.mode == *mode)
            .map(|r| format!("{:.2},{:.2}", px(r.lambda_a), py(r.mu_sec)))
            .collect();
        let color = colors[mi % colors.len()];
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.join(" ")
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>",
            W - MR - 150.0,
            MT + 16.0 * (mi as f64 + 1.0),
            mode.as_str()
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_arrival_sweep_svg(rows: &[ArrivalSweepRow], path: &Path) -> Result<(), SweepError> {
    write_file(path, &arrival_sweep_svg(rows))
}
