//! Rayleigh block fading: per-slot gain draws, instantaneous rates, and the
//! closed-form connection/secrecy probabilities.
//!
//! The closed forms below are derived for independent exponential power gains
//! and are gated by brute-force Monte Carlo oracles in the test suite and the
//! `validate` command; they are never trusted blind.

use crate::rng::SlotRng;
use serde::{Deserialize, Serialize};

/// Mean power gains of the three links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelVariances {
    pub ab: f64,
    pub ae: f64,
    pub eb: f64,
}

/// One slot's channel power gains (block fading: constant within the slot,
/// independent across slots).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRealization {
    pub g_ab: f64,
    pub g_ae: f64,
    pub g_eb: f64,
}

/// Draw the three link gains for one slot. Consumes exactly three uniform
/// words in a fixed order, which the common-random-number grid search relies
/// on.
pub fn sample_slot(rng: &mut SlotRng, v: &ChannelVariances) -> SlotRealization {
    SlotRealization {
        g_ab: rng.exponential(v.ab),
        g_ae: rng.exponential(v.ae),
        g_eb: rng.exponential(v.eb),
    }
}

/// Spectral rate of the direct link, `log2(1 + gamma_a * g_ab)`.
pub fn rate_ab(g_ab: f64, gamma_a: f64) -> f64 {
    (1.0 + gamma_a * g_ab).log2()
}

/// Spectral rate of the direct link under jamming interference.
pub fn rate_ab_jammed(g_ab: f64, g_eb: f64, gamma_a: f64, gamma_e: f64) -> f64 {
    (1.0 + gamma_a * g_ab / (1.0 + gamma_e * g_eb)).log2()
}

/// Attacker decode rate with power-splitting fraction `rho`.
pub fn eve_rate(g_ae: f64, gamma_a: f64, rho: f64) -> f64 {
    (1.0 + rho * gamma_a * g_ae).log2()
}

/// Nonnegative secrecy rate when the attacker listens (no jamming):
/// `[rate_ab - eve_rate]+`.
pub fn secrecy_rate_nojam(g_ab: f64, g_ae: f64, gamma_a: f64, rho: f64) -> f64 {
    (rate_ab(g_ab, gamma_a) - eve_rate(g_ae, gamma_a, rho)).max(0.0)
}

/// Probability that the direct link supports spectral rate `r`:
/// `exp(-(2^r - 1) / (sigma2_ab * gamma_a))`.
pub fn connection_prob(r: f64, gamma_a: f64, sigma2_ab: f64) -> f64 {
    (-((2f64.powf(r) - 1.0) / (sigma2_ab * gamma_a))).exp()
}

/// Probability that the no-jam secrecy rate reaches `r`, over independent
/// exponential direct and attacker gains:
/// `connection_prob * sigma2_ab / (sigma2_ab + 2^r * rho * sigma2_ae)`.
/// The event is almost sure at `r = 0` because the rate is clamped at zero.
pub fn secrecy_prob_nojam(r: f64, gamma_a: f64, rho: f64, sigma2_ab: f64, sigma2_ae: f64) -> f64 {
    if r <= 0.0 {
        return 1.0;
    }
    connection_prob(r, gamma_a, sigma2_ab) * sigma2_ab
        / (sigma2_ab + 2f64.powf(r) * rho * sigma2_ae)
}

/// Probability that the direct link survives jamming at spectral rate `r`:
/// `connection_prob / (1 + (2^r - 1) * gamma_e * sigma2_eb / (gamma_a * sigma2_ab))`.
pub fn jammed_connection_prob(
    r: f64,
    gamma_a: f64,
    gamma_e: f64,
    sigma2_ab: f64,
    sigma2_eb: f64,
) -> f64 {
    let x = 2f64.powf(r) - 1.0;
    connection_prob(r, gamma_a, sigma2_ab) / (1.0 + x * gamma_e * sigma2_eb / (gamma_a * sigma2_ab))
}

/// Probability that the attacker's own link supports spectral rate `r`.
pub fn eve_link_prob(r: f64, gamma_a: f64, sigma2_ae: f64) -> f64 {
    (-((2f64.powf(r) - 1.0) / (sigma2_ae * gamma_a))).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::oracles;

    const E_INV: f64 = 0.36787944117144233;

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let v = ChannelVariances { ab: 1.0, ae: 2.0, eb: 0.5 };
        let mut a = SlotRng::from_seed_stream(7, 0);
        let mut b = SlotRng::from_seed_stream(7, 0);
        for _ in 0..100 {
            let x = sample_slot(&mut a, &v);
            let y = sample_slot(&mut b, &v);
            assert_eq!(x.g_ab.to_bits(), y.g_ab.to_bits());
            assert_eq!(x.g_ae.to_bits(), y.g_ae.to_bits());
            assert_eq!(x.g_eb.to_bits(), y.g_eb.to_bits());
        }
    }

    #[test]
    fn rate_examples() {
        assert_eq!(rate_ab(0.0, 10.0), 0.0);
        assert!((rate_ab(0.1, 10.0) - 1.0).abs() < 1e-12); // log2(2)
        assert!((rate_ab(0.3, 10.0) - 2.0).abs() < 1e-12); // log2(4)
    }

    #[test]
    fn jammed_rate_collapses_under_strong_interference() {
        // Overwhelming jamming drives the SINR (and the rate) to zero.
        assert!(rate_ab_jammed(1.0, 1e12, 10.0, 10.0) < 1e-10);
        // No interference reduces to the plain rate.
        assert_eq!(rate_ab_jammed(0.3, 5.0, 10.0, 0.0), rate_ab(0.3, 10.0));
        // The attacker's decode rate vanishes with a zero split.
        assert_eq!(eve_rate(7.0, 10.0, 0.0), 0.0);
    }

    #[test]
    fn secrecy_rate_examples() {
        // rho = 0 removes the attacker's term entirely.
        assert_eq!(secrecy_rate_nojam(0.4, 5.0, 10.0, 0.0), rate_ab(0.4, 10.0));
        // Equal arguments clamp to zero.
        assert_eq!(secrecy_rate_nojam(0.2, 0.2, 10.0, 1.0), 0.0);
        // log2(4) - log2(2) = 1.
        assert!((secrecy_rate_nojam(0.3, 0.1, 10.0, 1.0) - 1.0).abs() < 1e-12);
        // Never negative even when the attacker's link dominates.
        assert_eq!(secrecy_rate_nojam(0.01, 50.0, 10.0, 1.0), 0.0);
    }

    #[test]
    fn connection_prob_forced_points() {
        assert_eq!(connection_prob(0.0, 10.0, 1.0), 1.0);
        // sigma2 * gamma = 2^r - 1 puts the exponent at -1.
        let r = 1.0;
        let got = connection_prob(r, 1.0, 1.0);
        assert!((got - E_INV).abs() < 1e-12);
        assert!((connection_prob(1.0, 10.0, 1.0) - 0.9048374180359595).abs() < 1e-12);
    }

    #[test]
    fn eve_link_prob_forced_points() {
        assert_eq!(eve_link_prob(0.0, 10.0, 1.0), 1.0);
        assert!((eve_link_prob(1.0, 1.0, 1.0) - E_INV).abs() < 1e-12);
    }

    #[test]
    fn secrecy_prob_reductions() {
        // rho = 0 reduces to the connection event.
        assert_eq!(
            secrecy_prob_nojam(1.0, 10.0, 0.0, 1.0, 1.0),
            connection_prob(1.0, 10.0, 1.0)
        );
        assert_eq!(secrecy_prob_nojam(0.0, 10.0, 0.0, 1.0, 1.0), 1.0);
        // Clamped event is almost sure at r = 0 for any rho.
        assert_eq!(secrecy_prob_nojam(0.0, 10.0, 0.7, 1.0, 1.0), 1.0);
    }

    #[test]
    fn jammed_prob_reductions() {
        assert_eq!(
            jammed_connection_prob(1.0, 10.0, 0.0, 1.0, 1.0),
            connection_prob(1.0, 10.0, 1.0)
        );
        assert_eq!(jammed_connection_prob(0.0, 10.0, 10.0, 1.0, 1.0), 1.0);
    }

    // Closed forms against brute-force Monte Carlo over sampled gains. The
    // frozen values are the oracle outputs at the recorded seeds.

    #[test]
    fn connection_prob_against_oracle() {
        let n = 1_000_000;
        let (mc, se) = oracles::mc_connection_prob(1.0, 10.0, 1.0, n, 2024);
        assert!((mc - 0.904656).abs() < 1e-6, "oracle drifted: {mc}");
        let cf = connection_prob(1.0, 10.0, 1.0);
        assert!((cf - mc).abs() < 3.0 * se, "closed form {cf} vs oracle {mc}");
        assert!((cf - mc).abs() < 0.002);
    }

    #[test]
    fn secrecy_prob_against_oracle() {
        let n = 1_000_000;
        let (mc, se) = oracles::mc_secrecy_prob_nojam(1.0, 10.0, 0.5, 1.0, 1.0, n, 2025);
        assert!((mc - 0.452319).abs() < 1e-6, "oracle drifted: {mc}");
        let cf = secrecy_prob_nojam(1.0, 10.0, 0.5, 1.0, 1.0);
        assert!((cf - 0.4524187090179798).abs() < 1e-12);
        assert!((cf - mc).abs() < 3.0 * se, "closed form {cf} vs oracle {mc}");
        assert!((cf - mc).abs() < 0.003);
    }

    #[test]
    fn jammed_prob_against_oracle() {
        let n = 1_000_000;
        let (mc, se) = oracles::mc_jammed_connection_prob(1.0, 10.0, 10.0, 1.0, 1.0, n, 2026);
        assert!((mc - 0.451540).abs() < 1e-6, "oracle drifted: {mc}");
        let cf = jammed_connection_prob(1.0, 10.0, 10.0, 1.0, 1.0);
        assert!((cf - mc).abs() < 3.0 * se, "closed form {cf} vs oracle {mc}");
        assert!((cf - mc).abs() < 0.003);
    }

    #[test]
    fn eve_link_prob_against_oracle() {
        let n = 1_000_000;
        let (mc, se) = oracles::mc_eve_link_prob(1.0, 10.0, 1.0, n, 2027);
        assert!((mc - 0.904447).abs() < 1e-6, "oracle drifted: {mc}");
        let cf = eve_link_prob(1.0, 10.0, 1.0);
        assert!((cf - mc).abs() < 3.0 * se, "closed form {cf} vs oracle {mc}");
        assert!((cf - mc).abs() < 0.002);
    }

    #[test]
    fn probability_outputs_bounded_and_monotone() {
        let rs = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
        let gammas = [0.5, 1.0, 3.16, 10.0, 100.0];
        let rhos = [0.0, 0.25, 0.5, 0.75, 1.0];
        for &g in &gammas {
            let mut prev = f64::INFINITY;
            for &r in &rs {
                let p = connection_prob(r, g, 1.0);
                assert!((0.0..=1.0).contains(&p));
                assert!(p <= prev + 1e-15, "not nonincreasing in r");
                prev = p;
            }
        }
        // connection_prob nondecreasing in gamma.
        for &r in &rs {
            let mut prev = -1.0;
            for &g in &gammas {
                let p = connection_prob(r, g, 1.0);
                assert!(p >= prev - 1e-15);
                prev = p;
            }
        }
        // secrecy prob nonincreasing in rho, and bounded by the connection prob.
        for &r in &rs {
            for &g in &gammas {
                let mut prev = f64::INFINITY;
                for &rho in &rhos {
                    let p = secrecy_prob_nojam(r, g, rho, 1.0, 1.0);
                    assert!((0.0..=1.0).contains(&p));
                    assert!(p <= prev + 1e-15);
                    assert!(p <= connection_prob(r, g, 1.0) + 1e-15);
                    prev = p;
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn closed_forms_stay_in_unit_interval(
            r in 0.0f64..6.0,
            gamma_a in 0.01f64..1e4,
            gamma_e in 0.0f64..1e4,
            rho in 0.0f64..1.0,
            s_ab in 0.01f64..100.0,
            s_ae in 0.01f64..100.0,
            s_eb in 0.01f64..100.0,
        ) {
            for p in [
                connection_prob(r, gamma_a, s_ab),
                secrecy_prob_nojam(r, gamma_a, rho, s_ab, s_ae),
                jammed_connection_prob(r, gamma_a, gamma_e, s_ab, s_eb),
                eve_link_prob(r, gamma_a, s_ae),
            ] {
                proptest::prop_assert!((0.0..=1.0).contains(&p));
            }
            let sec = secrecy_prob_nojam(r, gamma_a, rho, s_ab, s_ae);
            proptest::prop_assert!(sec <= connection_prob(r, gamma_a, s_ab) + 1e-12);
        }
    }
}
