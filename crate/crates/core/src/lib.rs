//! jamsec: slot-based simulator and semi-analytic evaluator of a buffer-aided
//! transmitter/receiver pair attacked by an RF-energy-harvesting node that
//! probabilistically jams or eavesdrops.
//!
//! The crate is organized around the per-slot protocol:
//!
//! * [`params`]: physical/protocol configuration and derived quantities
//!   (SNRs, target spectral rate, per-slot energy costs).
//! * [`channel`]: Rayleigh block-fading draws, instantaneous rates, and the
//!   closed-form outage/secrecy probabilities with Monte Carlo oracles in the
//!   test suite.
//! * [`sensing`]: the attacker's energy detector: threshold calibration from
//!   a false-alarm target, per-slot detection simulation, and the analytic
//!   missed-detection probability (adaptive quadrature).
//! * [`actors`]: state machines for the transmitter queue and the attacker
//!   battery, plus the per-slot energy harvest/depletion accounting.
//! * [`sim`]: the slot engine producing a [`sim::SimReport`] with batch-means
//!   confidence intervals.
//! * [`analytics`]: semi-analytic throughput expressions evaluated from
//!   measured state probabilities, and the queue-stability access rule.
//! * [`optimizer`]: the attacker's offline grid search over its strategy
//!   parameters using common random numbers.
//! * [`sweep`]: parameter sweeps (secure throughput vs. arrival rate) and
//!   CSV/SVG emitters.
//! * [`validate`]: the self-check suite wired to `jamsec validate`.
//!
//! All randomness flows through [`rng::SlotRng`], a counter-based stream RNG,
//! so every run, sweep, and grid search is reproducible from a single seed.

// Reference constants and quadrature tables keep their published digits.
#![allow(clippy::excessive_precision)]

pub mod actors;
pub mod analytics;
pub mod channel;
pub mod numeric;
pub mod optimizer;
pub mod params;
pub mod rng;
pub mod sensing;
pub mod sim;
pub mod sweep;
pub mod validate;

pub use params::{AttackerPolicy, ConfigError, DerivedParams, SystemConfig};
pub use sim::{SimOptions, SimReport, StarvedSecrecy};
