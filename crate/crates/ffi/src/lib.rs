//! C ABI for the jamsec simulator.
//!
//! Conventions: configurations and grid results are opaque handles created
//! and destroyed through this API; policies, options, reports and grid cells
//! are plain structs passed by pointer. Every fallible call returns a
//! [`JamsecStatus`]; on failure a thread-local message is retrievable with
//! [`jamsec_last_error`]. The generated header lives at `include/jamsec.h`.

use jamsec::optimizer::{self, GridResult, GridSpec, Objective};
use jamsec::params::{self, AttackerPolicy, ConfigFile, SystemConfig};
use jamsec::sensing::{DetectorModel, SampleCountRule};
use jamsec::sim::{self, SimOptions, StarvedSecrecy};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl std::fmt::Display) {
    let text = CString::new(msg.to_string()).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

/// Result codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JamsecStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ConfigError = 3,
    SimError = 4,
    GridError = 5,
    Panic = 6,
}

/// Opaque validated system configuration.
pub struct JamsecConfig {
    inner: SystemConfig,
}

/// Opaque grid-search result (full surface plus argmin).
pub struct JamsecGridResult {
    inner: GridResult,
}

/// Attacker policy (plain data).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct JamsecPolicy {
    pub alpha_e: f64,
    pub rho: f64,
    pub sensing_enabled: bool,
    pub tau: f64,
    pub p_fa: f64,
}

impl From<JamsecPolicy> for AttackerPolicy {
    fn from(p: JamsecPolicy) -> Self {
        AttackerPolicy {
            alpha_e: p.alpha_e,
            rho: p.rho,
            sensing_enabled: p.sensing_enabled,
            tau: p.tau,
            p_fa: p.p_fa,
        }
    }
}

impl From<AttackerPolicy> for JamsecPolicy {
    fn from(p: AttackerPolicy) -> Self {
        JamsecPolicy {
            alpha_e: p.alpha_e,
            rho: p.rho,
            sensing_enabled: p.sensing_enabled,
            tau: p.tau,
            p_fa: p.p_fa,
        }
    }
}

/// Secrecy accounting for slots where the attacker is not listening.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JamsecStarvedSecrecy {
    AsWritten = 0,
    LinkBased = 1,
}

/// Detector statistic model.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JamsecDetectorModel {
    GaussianApprox = 0,
    ChiSquareExact = 1,
}

/// Engine options (plain data).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct JamsecOptions {
    pub burn_in_frac: f64,
    pub jam_success_departs: bool,
    pub starved_secrecy: JamsecStarvedSecrecy,
    pub detector_model: JamsecDetectorModel,
    pub initial_queue: u64,
    pub initial_battery: f64,
}

impl From<JamsecOptions> for SimOptions {
    fn from(o: JamsecOptions) -> Self {
        SimOptions {
            burn_in_frac: o.burn_in_frac,
            jam_success_departs: o.jam_success_departs,
            starved_secrecy: match o.starved_secrecy {
                JamsecStarvedSecrecy::AsWritten => StarvedSecrecy::AsWritten,
                JamsecStarvedSecrecy::LinkBased => StarvedSecrecy::LinkBased,
            },
            detector_model: match o.detector_model {
                JamsecDetectorModel::GaussianApprox => DetectorModel::GaussianApprox,
                JamsecDetectorModel::ChiSquareExact => DetectorModel::ChiSquareExact,
            },
            sample_count_rule: SampleCountRule::BandwidthTimesTau,
            initial_queue: o.initial_queue,
            initial_battery: o.initial_battery,
        }
    }
}

/// Simulation estimates (plain data mirror of the library report).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct JamsecReport {
    pub n_slots: u64,
    pub counted: u64,
    pub mu_a_hat: f64,
    pub mu_a_ci: f64,
    pub service_rate_hat: f64,
    pub service_rate_ci: f64,
    pub mu_sec_hat: f64,
    pub mu_sec_ci: f64,
    pub p_low: f64,
    pub p_mid: f64,
    pub p_high: f64,
    pub p_queue_nonempty: f64,
    pub p_jam_capable: f64,
    pub eh_rate: f64,
    pub depletion_rate: f64,
    pub queue_mean: f64,
    pub queue_max: u64,
    pub queue_final: u64,
    pub battery_mean: f64,
    pub battery_final: f64,
    pub arrivals_total: u64,
    pub departures_total: u64,
}

/// One grid cell (plain data).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct JamsecGridCell {
    pub rho: f64,
    pub alpha_e: f64,
    /// Sensing window of the cell when the window axis was searched;
    /// meaningless when `has_tau` is false.
    pub tau: f64,
    pub has_tau: bool,
    pub mu_sec: f64,
    pub ci: f64,
}

fn cell_out(c: &optimizer::GridCell) -> JamsecGridCell {
    JamsecGridCell {
        rho: c.rho,
        alpha_e: c.alpha_e,
        tau: c.tau.unwrap_or(0.0),
        has_tau: c.tau.is_some(),
        mu_sec: c.mu_sec,
        ci: c.ci,
    }
}

fn report_out(r: &sim::SimReport) -> JamsecReport {
    JamsecReport {
        n_slots: r.n_slots,
        counted: r.counted,
        mu_a_hat: r.mu_a_hat,
        mu_a_ci: r.mu_a_ci,
        service_rate_hat: r.service_rate_hat,
        service_rate_ci: r.service_rate_ci,
        mu_sec_hat: r.mu_sec_hat,
        mu_sec_ci: r.mu_sec_ci,
        p_low: r.state_probs.p_low,
        p_mid: r.state_probs.p_mid,
        p_high: r.state_probs.p_high,
        p_queue_nonempty: r.state_probs.p_queue_nonempty,
        p_jam_capable: r.state_probs.p_jam_capable,
        eh_rate: r.eh_rate,
        depletion_rate: r.depletion_rate,
        queue_mean: r.queue_mean,
        queue_max: r.queue_max,
        queue_final: r.queue_final,
        battery_mean: r.battery_mean,
        battery_final: r.battery_final,
        arrivals_total: r.arrivals_total,
        departures_total: r.departures_total,
    }
}

fn guard(f: impl FnOnce() -> JamsecStatus) -> JamsecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic crossed the ABI boundary");
            JamsecStatus::Panic
        }
    }
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn jamsec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copy the last error message for this thread into `buf` (truncated to
/// `cap - 1` bytes, always NUL-terminated when `cap > 0`). Returns the full
/// message length in bytes, or 0 when no error is pending.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null (then only the
/// length is returned).
#[no_mangle]
pub unsafe extern "C" fn jamsec_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Default configuration (documented defaults; access probability from the
/// stability rule). Free with [`jamsec_config_free`].
#[no_mangle]
pub extern "C" fn jamsec_config_default() -> *mut JamsecConfig {
    Box::into_raw(Box::new(JamsecConfig {
        inner: SystemConfig::default(),
    }))
}

/// Parse a TOML config. On success `*out_config` receives a new handle and,
/// when `out_policy` is non-null, the file's policy section (or defaults) is
/// written there.
///
/// # Safety
/// `text` must be a NUL-terminated string; out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jamsec_config_from_toml(
    text: *const c_char,
    out_config: *mut *mut JamsecConfig,
    out_policy: *mut JamsecPolicy,
) -> JamsecStatus {
    guard(|| {
        if text.is_null() || out_config.is_null() {
            set_error("null argument");
            return JamsecStatus::NullArgument;
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            set_error("config text is not valid UTF-8");
            return JamsecStatus::InvalidUtf8;
        };
        let file = match ConfigFile::parse(text) {
            Ok(f) => f,
            Err(e) => {
                set_error(e);
                return JamsecStatus::ConfigError;
            }
        };
        match file.resolve() {
            Ok((cfg, policy)) => {
                *out_config = Box::into_raw(Box::new(JamsecConfig { inner: cfg }));
                if !out_policy.is_null() {
                    *out_policy = policy.into();
                }
                JamsecStatus::Ok
            }
            Err(e) => {
                set_error(e);
                JamsecStatus::ConfigError
            }
        }
    })
}

/// Free a configuration handle. Null is a no-op.
///
/// # Safety
/// `config` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn jamsec_config_free(config: *mut JamsecConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Set a configuration field by name (see the header for the field list).
/// The change is validated together with the rest of the config.
///
/// # Safety
/// Pointers must be valid; `key` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn jamsec_config_set(
    config: *mut JamsecConfig,
    key: *const c_char,
    value: f64,
) -> JamsecStatus {
    guard(|| {
        if config.is_null() || key.is_null() {
            set_error("null argument");
            return JamsecStatus::NullArgument;
        }
        let Ok(key) = CStr::from_ptr(key).to_str() else {
            set_error("key is not valid UTF-8");
            return JamsecStatus::InvalidUtf8;
        };
        let cfg = &mut (*config).inner;
        let mut probe = *cfg;
        if let Err(e) = params::set_field(&mut probe, key, value) {
            set_error(e);
            return JamsecStatus::ConfigError;
        }
        if let Err(e) = params::derive(&probe) {
            set_error(e);
            return JamsecStatus::ConfigError;
        }
        *cfg = probe;
        JamsecStatus::Ok
    })
}

/// Read a configuration field by name.
///
/// # Safety
/// Pointers must be valid; `key` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn jamsec_config_get(
    config: *const JamsecConfig,
    key: *const c_char,
    out: *mut f64,
) -> JamsecStatus {
    guard(|| {
        if config.is_null() || key.is_null() || out.is_null() {
            set_error("null argument");
            return JamsecStatus::NullArgument;
        }
        let Ok(key) = CStr::from_ptr(key).to_str() else {
            set_error("key is not valid UTF-8");
            return JamsecStatus::InvalidUtf8;
        };
        match params::get_field(&(*config).inner, key) {
            Ok(v) => {
                *out = v;
                JamsecStatus::Ok
            }
            Err(e) => {
                set_error(e);
                JamsecStatus::ConfigError
            }
        }
    })
}

/// Default attacker policy.
#[no_mangle]
pub extern "C" fn jamsec_policy_default() -> JamsecPolicy {
    AttackerPolicy::default().into()
}

/// Default engine options.
#[no_mangle]
pub extern "C" fn jamsec_options_default() -> JamsecOptions {
    JamsecOptions {
        burn_in_frac: 0.1,
        jam_success_departs: false,
        starved_secrecy: JamsecStarvedSecrecy::AsWritten,
        detector_model: JamsecDetectorModel::GaussianApprox,
        initial_queue: 0,
        initial_battery: 0.0,
    }
}

/// Run the slot engine; fills `*out` on success. `options` may be null for
/// defaults.
///
/// # Safety
/// Pointers must be valid for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn jamsec_run(
    config: *const JamsecConfig,
    policy: *const JamsecPolicy,
    options: *const JamsecOptions,
    seed: u64,
    n_slots: u64,
    out: *mut JamsecReport,
) -> JamsecStatus {
    guard(|| {
        if config.is_null() || policy.is_null() || out.is_null() {
            set_error("null argument");
            return JamsecStatus::NullArgument;
        }
        let opts: SimOptions = if options.is_null() {
            SimOptions::default()
        } else {
            (*options).into()
        };
        let policy: AttackerPolicy = (*policy).into();
        match sim::run(&(*config).inner, &policy, seed, n_slots, &opts) {
            Ok(report) => {
                *out = report_out(&report);
                JamsecStatus::Ok
            }
            Err(e) => {
                set_error(e);
                JamsecStatus::SimError
            }
        }
    })
}

/// Exhaustive strategy search over the split fraction and jam probability
/// (plus the sensing window when `optimize_tau` is set), minimizing the
/// simulated secure throughput with common random numbers across cells.
/// `options` may be null. Free the result with [`jamsec_grid_free`].
///
/// # Safety
/// Pointers must be valid for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn jamsec_grid_search(
    config: *const JamsecConfig,
    base_policy: *const JamsecPolicy,
    m_points: u32,
    optimize_tau: bool,
    slots_per_cell: u64,
    options: *const JamsecOptions,
    seed: u64,
    out: *mut *mut JamsecGridResult,
) -> JamsecStatus {
    guard(|| {
        if config.is_null() || base_policy.is_null() || out.is_null() {
            set_error("null argument");
            return JamsecStatus::NullArgument;
        }
        let opts: SimOptions = if options.is_null() {
            SimOptions::default()
        } else {
            (*options).into()
        };
        let spec = GridSpec {
            m_points: m_points as usize,
            optimize_tau,
            objective: Objective::Simulation,
            slots_per_cell,
        };
        let policy: AttackerPolicy = (*base_policy).into();
        match optimizer::grid_search(&(*config).inner, &policy, &spec, &opts, seed) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(JamsecGridResult { inner: result }));
                JamsecStatus::Ok
            }
            Err(e) => {
                set_error(e);
                JamsecStatus::GridError
            }
        }
    })
}

/// Argmin cell of a grid result.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jamsec_grid_best(
    result: *const JamsecGridResult,
    out: *mut JamsecGridCell,
) -> JamsecStatus {
    if result.is_null() || out.is_null() {
        set_error("null argument");
        return JamsecStatus::NullArgument;
    }
    *out = cell_out(&(*result).inner.best);
    JamsecStatus::Ok
}

/// Number of successfully evaluated cells.
///
/// # Safety
/// `result` must be valid.
#[no_mangle]
pub unsafe extern "C" fn jamsec_grid_cell_count(result: *const JamsecGridResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (*result).inner.cells.len()
}

/// Fetch cell `index` (lexicographic order over the axes).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn jamsec_grid_cell(
    result: *const JamsecGridResult,
    index: usize,
    out: *mut JamsecGridCell,
) -> JamsecStatus {
    if result.is_null() || out.is_null() {
        set_error("null argument");
        return JamsecStatus::NullArgument;
    }
    let cells = &(*result).inner.cells;
    match cells.get(index) {
        Some(cell) => {
            *out = cell_out(cell);
            JamsecStatus::Ok
        }
        None => {
            set_error(format!(
                "cell index {index} out of range ({} cells)",
                cells.len()
            ));
            JamsecStatus::GridError
        }
    }
}

/// Free a grid result. Null is a no-op.
///
/// # Safety
/// `result` must have come from this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn jamsec_grid_free(result: *mut JamsecGridResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
