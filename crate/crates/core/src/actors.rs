//! Per-slot state machines: the transmitter's buffer and access rule, the
//! attacker's battery-gated action choice, and the energy harvest/depletion
//! accounting for both the plain and the sensing-assisted modes.

use crate::channel::rate_ab;
use crate::params::{AttackerPolicy, DerivedParams, SystemConfig};
use crate::rng::SlotRng;
use crate::sensing::DetectionResult;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Raised when the accounting would drive the battery negative; this is a
/// gating bug, never a recoverable condition.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invariant breach: {0}")]
pub struct InvariantBreach(pub String);

/// Transmitter state: packet buffer plus access probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AliceState {
    pub queue_len: u64,
}

/// The attacker's battery. The level never goes negative: every spend is
/// gated on the band check in [`eve_choose_action`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveBattery {
    level: f64,
}

impl EveBattery {
    pub fn new(level: f64) -> Self {
        assert!(level >= 0.0 && level.is_finite());
        Self { level }
    }

    pub fn level(&self) -> f64 {
        self.level
    }
}

/// Battery band at the attacker's decision point. The three intervals
/// partition `[0, inf)`, so exactly one action rule applies per slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatteryBand {
    /// `level < e_d`: cannot decode, harvest without splitting.
    Starved,
    /// `e_d <= level < e_j`: split between decoding and harvesting.
    DecodeOnly,
    /// `level >= e_j`: may jam.
    JamCapable,
}

pub fn battery_band(level: f64, derived: &DerivedParams) -> BatteryBand {
    if level < derived.e_d {
        BatteryBand::Starved
    } else if level < derived.e_j {
        BatteryBand::DecodeOnly
    } else {
        BatteryBand::JamCapable
    }
}

/// What the attacker does with the slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EveAction {
    /// Harvest the whole received signal; no decoding.
    HarvestOnly,
    /// Split: fraction `rho` to the decoder, `1 - rho` to the harvester.
    SplitDecode,
    /// Transmit noise at the jamming power.
    Jam,
}

/// Transmitter activity rule: nonempty queue, access coin, and a direct link
/// above the target rate. Consumes exactly one uniform word per call.
pub fn alice_slot_decision(
    rng: &mut SlotRng,
    alice: &AliceState,
    access_prob: f64,
    g_ab: f64,
    derived: &DerivedParams,
) -> bool {
    let coin = rng.uniform();
    alice.queue_len > 0 && coin < access_prob && rate_ab(g_ab, derived.gamma_a) >= derived.r_target
}

/// Attacker action rule from the battery band. Jam only when the battery can
/// afford a jam, and then only with probability `alpha_e`. Consumes exactly
/// one uniform word per call.
pub fn eve_choose_action(
    rng: &mut SlotRng,
    battery: &EveBattery,
    policy: &AttackerPolicy,
    derived: &DerivedParams,
) -> EveAction {
    let coin = rng.uniform();
    match battery_band(battery.level(), derived) {
        BatteryBand::Starved => EveAction::HarvestOnly,
        BatteryBand::DecodeOnly => EveAction::SplitDecode,
        BatteryBand::JamCapable => {
            if coin < policy.alpha_e {
                EveAction::Jam
            } else {
                EveAction::SplitDecode
            }
        }
    }
}

/// Harvested energy for the slot.
///
/// Without sensing: the full received energy when starved, the `1 - rho`
/// share while split-decoding, nothing while jamming, all gated on the
/// source being active. With sensing, the split-decode share is additionally
/// scaled by `tau/t_slot` on a missed detection (the harvester stops with the
/// decoder) and is the full share on a correct detection; the starved branch
/// harvests the whole slot either way.
pub fn energy_harvested(
    action: EveAction,
    alice_active: bool,
    g_ae: f64,
    policy: &AttackerPolicy,
    cfg: &SystemConfig,
    sensing: Option<&DetectionResult>,
) -> f64 {
    if !alice_active {
        return 0.0;
    }
    let full = cfg.eta * g_ae * cfg.p_a * cfg.t_slot;
    match action {
        EveAction::Jam => 0.0,
        EveAction::HarvestOnly => full,
        EveAction::SplitDecode => {
            let share = (1.0 - policy.rho) * full;
            match sensing {
                None => share,
                Some(det) => {
                    let window = policy.tau / cfg.t_slot;
                    if det.missed {
                        share * window
                    } else {
                        share
                    }
                }
            }
        }
    }
}

/// Depleted energy for the slot.
///
/// Without sensing, every cost is gated on the source being active: the
/// decode energy while split-decoding, the jam energy while jamming. With
/// sensing, the jam cost is charged unconditionally, and the decode cost
/// follows the sensing outcome: `e_d * tau/t_slot` when the window ends the
/// slot early (missed detection, or correct rejection of an idle source) and
/// the full `e_d` otherwise (correct detection, or a false alarm that wastes
/// the decoding energy on noise).
pub fn energy_depleted(
    action: EveAction,
    alice_active: bool,
    policy: &AttackerPolicy,
    cfg: &SystemConfig,
    derived: &DerivedParams,
    sensing: Option<&DetectionResult>,
) -> f64 {
    match sensing {
        None => {
            if !alice_active {
                return 0.0;
            }
            match action {
                EveAction::HarvestOnly => 0.0,
                EveAction::SplitDecode => derived.e_d,
                EveAction::Jam => derived.e_j,
            }
        }
        Some(det) => match action {
            EveAction::Jam => derived.e_j,
            EveAction::HarvestOnly => 0.0,
            EveAction::SplitDecode => {
                let window = policy.tau / cfg.t_slot;
                if alice_active {
                    if det.missed {
                        derived.e_d * window
                    } else {
                        derived.e_d
                    }
                } else if det.false_alarm {
                    derived.e_d
                } else {
                    derived.e_d * window
                }
            }
        },
    }
}

/// Battery recursion: `level' = level - e_out + e_h + e_const`.
/// Errors if the spend exceeds the level (gating bug).
pub fn battery_step(
    battery: &mut EveBattery,
    e_out: f64,
    e_h: f64,
    e_const: f64,
) -> Result<(), InvariantBreach> {
    if e_out > battery.level {
        return Err(InvariantBreach(format!(
            "energy spend {e_out} exceeds battery level {}",
            battery.level
        )));
    }
    let next = battery.level - e_out + e_h + e_const;
    if next < 0.0 {
        return Err(InvariantBreach(format!(
            "battery would go negative: {next}"
        )));
    }
    battery.level = next;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive;

    fn setup() -> (SystemConfig, DerivedParams, AttackerPolicy) {
        let cfg = SystemConfig::default();
        let derived = derive(&cfg).unwrap();
        (cfg, derived, AttackerPolicy::default())
    }

    #[test]
    fn alice_decision_gates() {
        let (_, derived, _) = setup();
        let mut rng = SlotRng::from_seed_stream(1, 0);
        // Empty queue blocks regardless of channel and access.
        let empty = AliceState { queue_len: 0 };
        for _ in 0..100 {
            assert!(!alice_slot_decision(&mut rng, &empty, 1.0, 1e9, &derived));
        }
        // Zero access probability blocks.
        let full = AliceState { queue_len: 3 };
        for _ in 0..100 {
            assert!(!alice_slot_decision(&mut rng, &full, 0.0, 1e9, &derived));
        }
        // Marginally sufficient link with unit access admits. r_target = 1
        // needs gamma_a * g >= 1, i.e. g >= 0.1 at gamma_a = 10.
        assert!(alice_slot_decision(&mut rng, &full, 1.0, 0.100001, &derived));
        assert!(!alice_slot_decision(&mut rng, &full, 1.0, 0.0999, &derived));
    }

    #[test]
    fn eve_action_band_gating() {
        let (_, derived, mut policy) = setup();
        let mut rng = SlotRng::from_seed_stream(2, 0);
        policy.alpha_e = 1.0;
        let starved = EveBattery::new(0.0);
        assert_eq!(
            eve_choose_action(&mut rng, &starved, &policy, &derived),
            EveAction::HarvestOnly
        );
        let mid = EveBattery::new(derived.e_d);
        assert_eq!(
            eve_choose_action(&mut rng, &mid, &policy, &derived),
            EveAction::SplitDecode
        );
        let rich = EveBattery::new(derived.e_j);
        assert_eq!(
            eve_choose_action(&mut rng, &rich, &policy, &derived),
            EveAction::Jam
        );
        policy.alpha_e = 0.0;
        assert_eq!(
            eve_choose_action(&mut rng, &rich, &policy, &derived),
            EveAction::SplitDecode
        );
    }

    #[test]
    fn jam_coin_calibration() {
        let (_, derived, mut policy) = setup();
        policy.alpha_e = 0.5;
        let rich = EveBattery::new(derived.e_j * 2.0);
        let mut rng = SlotRng::from_seed_stream(3, 0);
        let trials = 1_000_000;
        let jams = (0..trials)
            .filter(|_| eve_choose_action(&mut rng, &rich, &policy, &derived) == EveAction::Jam)
            .count() as f64;
        let freq = jams / trials as f64;
        let se = (0.25f64 / trials as f64).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * se, "jam frequency {freq}");
    }

    #[test]
    fn harvest_examples() {
        let (mut cfg, _, mut policy) = setup();
        cfg.eta = 0.6;
        cfg.p_a = 10.0;
        cfg.t_slot = 1e-3;
        // Inactive source: nothing to harvest.
        assert_eq!(
            energy_harvested(EveAction::HarvestOnly, false, 5.0, &policy, &cfg, None),
            0.0
        );
        // Full harvest: 0.6 * 1 * 10 * 1e-3.
        let e = energy_harvested(EveAction::HarvestOnly, true, 1.0, &policy, &cfg, None);
        assert!((e - 6e-3).abs() < 1e-15);
        // Split share.
        policy.rho = 0.25;
        let e = energy_harvested(EveAction::SplitDecode, true, 1.0, &policy, &cfg, None);
        assert!((e - 4.5e-3).abs() < 1e-15);
        // Jamming harvests nothing.
        assert_eq!(
            energy_harvested(EveAction::Jam, true, 1.0, &policy, &cfg, None),
            0.0
        );
    }

    #[test]
    fn harvest_missed_detection_scales_by_window() {
        let (cfg, _, mut policy) = setup();
        policy.rho = 0.5;
        policy.tau = cfg.t_slot * 0.1;
        let missed = DetectionResult {
            detected: false,
            missed: true,
            false_alarm: false,
        };
        let detected = DetectionResult {
            detected: true,
            missed: false,
            false_alarm: false,
        };
        let full = energy_harvested(EveAction::SplitDecode, true, 1.0, &policy, &cfg, Some(&detected));
        let cut = energy_harvested(EveAction::SplitDecode, true, 1.0, &policy, &cfg, Some(&missed));
        assert!((cut - 0.1 * full).abs() < 1e-15);
        // Starved harvest is unaffected by sensing.
        let starved = energy_harvested(EveAction::HarvestOnly, true, 1.0, &policy, &cfg, Some(&missed));
        assert!((starved - 6e-3).abs() < 1e-15);
    }

    #[test]
    fn depletion_without_sensing_is_gated_on_activity() {
        let (cfg, derived, policy) = setup();
        assert_eq!(
            energy_depleted(EveAction::HarvestOnly, true, &policy, &cfg, &derived, None),
            0.0
        );
        assert_eq!(
            energy_depleted(EveAction::SplitDecode, true, &policy, &cfg, &derived, None),
            derived.e_d
        );
        assert_eq!(
            energy_depleted(EveAction::Jam, true, &policy, &cfg, &derived, None),
            derived.e_j
        );
        for action in [EveAction::HarvestOnly, EveAction::SplitDecode, EveAction::Jam] {
            assert_eq!(
                energy_depleted(action, false, &policy, &cfg, &derived, None),
                0.0
            );
        }
    }

    #[test]
    fn depletion_with_sensing_follows_outcomes() {
        let (cfg, derived, mut policy) = setup();
        policy.tau = cfg.t_slot * 0.1;
        let missed = DetectionResult { detected: false, missed: true, false_alarm: false };
        let detected = DetectionResult { detected: true, missed: false, false_alarm: false };
        let fa = DetectionResult { detected: true, missed: false, false_alarm: true };
        let quiet = DetectionResult { detected: false, missed: false, false_alarm: false };

        // Jam cost is charged regardless of the source's activity.
        assert_eq!(
            energy_depleted(EveAction::Jam, false, &policy, &cfg, &derived, Some(&quiet)),
            derived.e_j
        );
        // Active source: window cost on a miss, full cost on detection.
        let miss_cost = energy_depleted(EveAction::SplitDecode, true, &policy, &cfg, &derived, Some(&missed));
        assert!((miss_cost - 0.1 * derived.e_d).abs() < 1e-18);
        assert_eq!(
            energy_depleted(EveAction::SplitDecode, true, &policy, &cfg, &derived, Some(&detected)),
            derived.e_d
        );
        // Idle source: full decode energy wasted on a false alarm, window
        // cost on a correct rejection.
        assert_eq!(
            energy_depleted(EveAction::SplitDecode, false, &policy, &cfg, &derived, Some(&fa)),
            derived.e_d
        );
        let reject_cost =
            energy_depleted(EveAction::SplitDecode, false, &policy, &cfg, &derived, Some(&quiet));
        assert!((reject_cost - 0.1 * derived.e_d).abs() < 1e-18);
    }

    #[test]
    fn battery_step_arithmetic() {
        let mut b = EveBattery::new(10.0);
        battery_step(&mut b, 3.0, 2.0, 0.0).unwrap();
        assert_eq!(b.level(), 9.0);
        let mut b = EveBattery::new(0.0);
        battery_step(&mut b, 0.0, 5e-6, 0.0).unwrap();
        assert_eq!(b.level(), 5e-6);
    }

    #[test]
    fn battery_step_rejects_overspend() {
        let mut b = EveBattery::new(1.0);
        assert!(battery_step(&mut b, 1.5, 0.0, 0.0).is_err());
        // Level untouched after the failure.
        assert_eq!(b.level(), 1.0);
    }

    #[test]
    fn never_spending_battery_is_monotone() {
        // Forced harvest-only (decode energy priced out of reach): the level
        // never decreases over a long random horizon.
        let (cfg, mut derived, policy) = setup();
        derived.e_d = f64::INFINITY;
        derived.e_j = f64::INFINITY;
        let mut rng = SlotRng::from_seed_stream(9, 0);
        let mut b = EveBattery::new(0.0);
        let mut prev = 0.0;
        for i in 0..100_000 {
            let active = rng.bernoulli(0.6);
            let g_ae = rng.exponential(1.0);
            let action = eve_choose_action(&mut rng, &b, &policy, &derived);
            assert_eq!(action, EveAction::HarvestOnly);
            let e_h = energy_harvested(action, active, g_ae, &policy, &cfg, None);
            let e_out = energy_depleted(action, active, &policy, &cfg, &derived, None);
            assert_eq!(e_out, 0.0);
            battery_step(&mut b, e_out, e_h, cfg.e_const).unwrap();
            assert!(b.level() >= prev, "battery decreased at slot {i}");
            prev = b.level();
        }
    }
}
