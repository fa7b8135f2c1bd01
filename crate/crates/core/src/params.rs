//! Configuration: physical and protocol parameters, the attacker policy, and
//! every derived quantity shared by the simulator and the analytic
//! expressions.
//!
//! Units are fixed by convention: Watts, Joules, seconds, Hertz, bits.
//! Channel variances are dimensionless mean power gains.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Current config file schema version.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("field `{field}` = {value} violates: {rule}")]
    Invalid {
        field: &'static str,
        value: f64,
        rule: &'static str,
    },
    #[error("jam energy e_j = {e_j} J below decode energy e_d = {e_d} J")]
    JamBelowDecode { e_j: f64, e_d: f64 },
    #[error("unknown config field `{0}`")]
    UnknownField(String),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("arrival rate {lambda_a} not stabilizable: bound (1-alpha_e)*p1 = {bound}")]
    Unstabilizable { lambda_a: f64, bound: f64 },
    #[error("config parse error: {0}")]
    Parse(String),
}

/// Convert decibels to a linear power ratio.
pub fn db_to_linear(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Convert a linear power ratio to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

// ---------------------------------------------------------------------------
// System configuration
// ---------------------------------------------------------------------------

/// All physical and protocol parameters of the legitimate pair and the
/// attacker hardware. Immutable once validated; share freely across workers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Transmit power at the source (W).
    pub p_a: f64,
    /// Jamming power at the attacker (W).
    pub p_j: f64,
    /// Decode/processing power at the attacker (W).
    pub p_d: f64,
    /// Noise power (W).
    pub kappa: f64,
    /// Channel bandwidth (Hz).
    pub w_bw: f64,
    /// Slot duration (s).
    pub t_slot: f64,
    /// Packet size (bits).
    pub b_bits: f64,
    /// Packet arrival probability per slot.
    pub lambda_a: f64,
    /// Source channel-access probability per slot.
    pub alpha_a: f64,
    /// RF-to-DC conversion efficiency.
    pub eta: f64,
    /// External energy supplied to the attacker per slot (J).
    pub e_const: f64,
    /// Source-destination mean channel power gain.
    pub sigma2_ab: f64,
    /// Source-attacker mean channel power gain.
    pub sigma2_ae: f64,
    /// Attacker-destination mean channel power gain.
    pub sigma2_eb: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        // 10 dB SNRs over unit noise, 1 ms slots over 1 MHz, 1000-bit packets
        // (target spectral rate 1 bit/s/Hz), 5 uJ decode energy.
        let mut cfg = Self {
            p_a: 10.0,
            p_j: 10.0,
            p_d: 5e-3,
            kappa: 1.0,
            w_bw: 1e6,
            t_slot: 1e-3,
            b_bits: 1000.0,
            lambda_a: 0.5,
            alpha_a: 1.0,
            eta: 0.6,
            e_const: 0.0,
            sigma2_ab: 1.0,
            sigma2_ae: 1.0,
            sigma2_eb: 1.0,
        };
        cfg.alpha_a = default_access_prob(&cfg).unwrap_or(1.0);
        cfg
    }
}

/// Access probability from the stability rule assuming a silent attacker,
/// with the default 5% service margin.
pub fn default_access_prob(cfg: &SystemConfig) -> Result<f64, ConfigError> {
    let derived = derive_unchecked(cfg);
    let p1 = crate::channel::connection_prob(derived.r_target, derived.gamma_a, cfg.sigma2_ab);
    crate::analytics::stable_access_prob(cfg.lambda_a, 0.0, p1, crate::analytics::DEFAULT_ACCESS_MARGIN)
        .map_err(|_| ConfigError::Unstabilizable {
            lambda_a: cfg.lambda_a,
            bound: p1,
        })
}

/// Names accepted by [`set_field`]/[`get_field`] and the CLI `--set` flag.
pub const FIELD_NAMES: [&str; 14] = [
    "p_a", "p_j", "p_d", "kappa", "w_bw", "t_slot", "b_bits", "lambda_a", "alpha_a", "eta",
    "e_const", "sigma2_ab", "sigma2_ae", "sigma2_eb",
];

/// Set a config field by name.
pub fn set_field(cfg: &mut SystemConfig, name: &str, value: f64) -> Result<(), ConfigError> {
    match name {
        "p_a" => cfg.p_a = value,
        "p_j" => cfg.p_j = value,
        "p_d" => cfg.p_d = value,
        "kappa" => cfg.kappa = value,
        "w_bw" => cfg.w_bw = value,
        "t_slot" => cfg.t_slot = value,
        "b_bits" => cfg.b_bits = value,
        "lambda_a" => cfg.lambda_a = value,
        "alpha_a" => cfg.alpha_a = value,
        "eta" => cfg.eta = value,
        "e_const" => cfg.e_const = value,
        "sigma2_ab" => cfg.sigma2_ab = value,
        "sigma2_ae" => cfg.sigma2_ae = value,
        "sigma2_eb" => cfg.sigma2_eb = value,
        other => return Err(ConfigError::UnknownField(other.to_string())),
    }
    Ok(())
}

/// Read a config field by name.
pub fn get_field(cfg: &SystemConfig, name: &str) -> Result<f64, ConfigError> {
    Ok(match name {
        "p_a" => cfg.p_a,
        "p_j" => cfg.p_j,
        "p_d" => cfg.p_d,
        "kappa" => cfg.kappa,
        "w_bw" => cfg.w_bw,
        "t_slot" => cfg.t_slot,
        "b_bits" => cfg.b_bits,
        "lambda_a" => cfg.lambda_a,
        "alpha_a" => cfg.alpha_a,
        "eta" => cfg.eta,
        "e_const" => cfg.e_const,
        "sigma2_ab" => cfg.sigma2_ab,
        "sigma2_ae" => cfg.sigma2_ae,
        "sigma2_eb" => cfg.sigma2_eb,
        other => return Err(ConfigError::UnknownField(other.to_string())),
    })
}

// ---------------------------------------------------------------------------
// Derived parameters
// ---------------------------------------------------------------------------

/// Quantities derived from [`SystemConfig`], validated at construction.
/// `e_j >= e_d` always holds for a value of this type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Source SNR over noise, `p_a / kappa`.
    pub gamma_a: f64,
    /// Jammer SNR over noise, `p_j / kappa`.
    pub gamma_e: f64,
    /// Mean received SNR at the attacker, `sigma2_ae * gamma_a`.
    pub gamma_tilde_a: f64,
    /// Target spectral rate `b / (W T)` (bits/s/Hz).
    pub r_target: f64,
    /// Decode energy per slot `p_d * t_slot` (J).
    pub e_d: f64,
    /// Jam energy per slot `p_j * t_slot` (J).
    pub e_j: f64,
}

fn derive_unchecked(cfg: &SystemConfig) -> DerivedParams {
    DerivedParams {
        gamma_a: cfg.p_a / cfg.kappa,
        gamma_e: cfg.p_j / cfg.kappa,
        gamma_tilde_a: cfg.sigma2_ae * cfg.p_a / cfg.kappa,
        r_target: cfg.b_bits / (cfg.w_bw * cfg.t_slot),
        e_d: cfg.p_d * cfg.t_slot,
        e_j: cfg.p_j * cfg.t_slot,
    }
}

fn check(field: &'static str, value: f64, ok: bool, rule: &'static str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Invalid { field, value, rule })
    }
}

/// Validate a config and compute the derived parameters. Pure and
/// deterministic: equal configs produce identical results.
pub fn derive(cfg: &SystemConfig) -> Result<DerivedParams, ConfigError> {
    let fin = |v: f64| v.is_finite();
    check("p_a", cfg.p_a, fin(cfg.p_a) && cfg.p_a >= 0.0, ">= 0")?;
    check("p_j", cfg.p_j, fin(cfg.p_j) && cfg.p_j >= 0.0, ">= 0")?;
    check("p_d", cfg.p_d, fin(cfg.p_d) && cfg.p_d >= 0.0, ">= 0")?;
    check("kappa", cfg.kappa, fin(cfg.kappa) && cfg.kappa > 0.0, "> 0")?;
    check("w_bw", cfg.w_bw, fin(cfg.w_bw) && cfg.w_bw > 0.0, "> 0")?;
    check("t_slot", cfg.t_slot, fin(cfg.t_slot) && cfg.t_slot > 0.0, "> 0")?;
    check("b_bits", cfg.b_bits, fin(cfg.b_bits) && cfg.b_bits > 0.0, "> 0")?;
    check(
        "lambda_a",
        cfg.lambda_a,
        fin(cfg.lambda_a) && (0.0..=1.0).contains(&cfg.lambda_a),
        "in [0, 1]",
    )?;
    check(
        "alpha_a",
        cfg.alpha_a,
        fin(cfg.alpha_a) && (0.0..=1.0).contains(&cfg.alpha_a),
        "in [0, 1]",
    )?;
    check(
        "eta",
        cfg.eta,
        fin(cfg.eta) && (0.0..=1.0).contains(&cfg.eta),
        "in [0, 1]",
    )?;
    check("e_const", cfg.e_const, fin(cfg.e_const) && cfg.e_const >= 0.0, ">= 0")?;
    check(
        "sigma2_ab",
        cfg.sigma2_ab,
        fin(cfg.sigma2_ab) && cfg.sigma2_ab > 0.0,
        "> 0",
    )?;
    check(
        "sigma2_ae",
        cfg.sigma2_ae,
        fin(cfg.sigma2_ae) && cfg.sigma2_ae > 0.0,
        "> 0",
    )?;
    check(
        "sigma2_eb",
        cfg.sigma2_eb,
        fin(cfg.sigma2_eb) && cfg.sigma2_eb > 0.0,
        "> 0",
    )?;
    let d = derive_unchecked(cfg);
    if d.e_j < d.e_d {
        return Err(ConfigError::JamBelowDecode { e_j: d.e_j, e_d: d.e_d });
    }
    check("r_target", d.r_target, d.r_target > 0.0, "> 0")?;
    Ok(d)
}

// ---------------------------------------------------------------------------
// Attacker policy
// ---------------------------------------------------------------------------

/// The attacker's per-slot decision parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackerPolicy {
    /// Jam probability when the battery can afford a jam.
    pub alpha_e: f64,
    /// Power-splitting fraction routed to the decoder.
    pub rho: f64,
    /// Whether the attacker senses activity before decoding.
    pub sensing_enabled: bool,
    /// Sensing duration (s), in `(0, t_slot]`.
    pub tau: f64,
    /// Target false-alarm probability of the energy detector.
    pub p_fa: f64,
}

impl Default for AttackerPolicy {
    fn default() -> Self {
        Self {
            alpha_e: 0.0,
            rho: 0.0,
            sensing_enabled: false,
            tau: 1e-4,
            p_fa: 0.1,
        }
    }
}

/// Validate a policy against a config (the sensing window must fit the slot
/// and contain at least one sample).
pub fn validate_policy(policy: &AttackerPolicy, cfg: &SystemConfig) -> Result<(), ConfigError> {
    let fin = |v: f64| v.is_finite();
    check(
        "alpha_e",
        policy.alpha_e,
        fin(policy.alpha_e) && (0.0..=1.0).contains(&policy.alpha_e),
        "in [0, 1]",
    )?;
    check(
        "rho",
        policy.rho,
        fin(policy.rho) && (0.0..=1.0).contains(&policy.rho),
        "in [0, 1]",
    )?;
    check(
        "tau",
        policy.tau,
        fin(policy.tau) && policy.tau > 0.0 && policy.tau <= cfg.t_slot,
        "in (0, t_slot]",
    )?;
    check(
        "p_fa",
        policy.p_fa,
        fin(policy.p_fa) && policy.p_fa > 0.0 && policy.p_fa < 1.0,
        "in (0, 1)",
    )?;
    if policy.sensing_enabled {
        check(
            "tau",
            policy.tau * cfg.w_bw,
            policy.tau * cfg.w_bw >= 1.0,
            "tau * w_bw >= 1 (at least one detector sample)",
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

/// On-disk config schema. Every field is optional; missing fields take the
/// documented defaults, and a missing `alpha_a` is resolved from the queue
/// stability rule assuming a silent attacker.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: Option<u32>,
    pub p_a: Option<f64>,
    pub p_j: Option<f64>,
    pub p_d: Option<f64>,
    pub kappa: Option<f64>,
    pub w_bw: Option<f64>,
    pub t_slot: Option<f64>,
    pub b_bits: Option<f64>,
    pub lambda_a: Option<f64>,
    pub alpha_a: Option<f64>,
    pub eta: Option<f64>,
    pub e_const: Option<f64>,
    pub sigma2_ab: Option<f64>,
    pub sigma2_ae: Option<f64>,
    pub sigma2_eb: Option<f64>,
    pub policy: Option<PolicyFile>,
}

/// Policy section of the config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyFile {
    pub alpha_e: Option<f64>,
    pub rho: Option<f64>,
    pub sensing: Option<bool>,
    pub tau: Option<f64>,
    pub p_fa: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Resolve the file into a validated `(config, policy)` pair.
    pub fn resolve(&self) -> Result<(SystemConfig, AttackerPolicy), ConfigError> {
        if let Some(v) = self.schema_version {
            if v != SCHEMA_VERSION {
                return Err(ConfigError::SchemaVersion(v));
            }
        }
        let base = SystemConfig::default();
        let mut cfg = SystemConfig {
            p_a: self.p_a.unwrap_or(base.p_a),
            p_j: self.p_j.unwrap_or(base.p_j),
            p_d: self.p_d.unwrap_or(base.p_d),
            kappa: self.kappa.unwrap_or(base.kappa),
            w_bw: self.w_bw.unwrap_or(base.w_bw),
            t_slot: self.t_slot.unwrap_or(base.t_slot),
            b_bits: self.b_bits.unwrap_or(base.b_bits),
            lambda_a: self.lambda_a.unwrap_or(base.lambda_a),
            alpha_a: 1.0,
            eta: self.eta.unwrap_or(base.eta),
            e_const: self.e_const.unwrap_or(base.e_const),
            sigma2_ab: self.sigma2_ab.unwrap_or(base.sigma2_ab),
            sigma2_ae: self.sigma2_ae.unwrap_or(base.sigma2_ae),
            sigma2_eb: self.sigma2_eb.unwrap_or(base.sigma2_eb),
        };
        cfg.alpha_a = match self.alpha_a {
            Some(a) => a,
            None => default_access_prob(&cfg)?,
        };
        derive(&cfg)?;

        let pf = self.policy.clone().unwrap_or_default();
        let dp = AttackerPolicy::default();
        let policy = AttackerPolicy {
            alpha_e: pf.alpha_e.unwrap_or(dp.alpha_e),
            rho: pf.rho.unwrap_or(dp.rho),
            sensing_enabled: pf.sensing.unwrap_or(dp.sensing_enabled),
            tau: pf.tau.unwrap_or(dp.tau),
            p_fa: pf.p_fa.unwrap_or(dp.p_fa),
        };
        validate_policy(&policy, &cfg)?;
        Ok((cfg, policy))
    }
}
