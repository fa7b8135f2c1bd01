//! Semi-analytic throughput evaluation.
//!
//! These functions take the joint battery/queue state probabilities as inputs
//! (measured by the simulator; the stationary law of the coupled chain is not
//! derived) and evaluate the service-rate and secure-throughput expressions.
//!
//! Two groupings are provided for the secure throughput:
//!
//! * the `literal` forms reproduce the published per-term grouping verbatim,
//!   including its quirks: the starved mass appears both under the no-jam
//!   secrecy term and under the attacker-link term (a double count), the
//!   starved term omits the direct-link connection factor, and the sensing
//!   form multiplies the average missed-detection probability against
//!   attacker-link events it is correlated with;
//! * the `exact` forms group terms the way the slot engine actually accounts
//!   them, so feeding back a run's measured state probabilities reproduces
//!   the run's secure throughput to within estimator noise. The sensing
//!   version integrates the detector curve jointly with the fading density
//!   instead of assuming independence.

use crate::channel;
use crate::numeric::{self, NumericError};
use crate::params::{DerivedParams, SystemConfig};
use crate::sensing::DetectorSpec;
use crate::sim::StarvedSecrecy;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default multiplicative service margin applied by the stability rule.
pub const DEFAULT_ACCESS_MARGIN: f64 = 1.05;

/// No access probability in `[0, 1]` can stabilize the queue under the
/// service-rate lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("arrival rate {lambda_a} is at or above the service bound {bound}")]
pub struct InfeasibleError {
    pub lambda_a: f64,
    pub bound: f64,
}

/// Joint battery-band/queue state probabilities measured at the attacker's
/// decision point, with the queue observed after the slot's arrival.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateProbs {
    /// Pr{battery < e_d, queue nonempty}.
    pub p_low: f64,
    /// Pr{e_d <= battery < e_j, queue nonempty}.
    pub p_mid: f64,
    /// Pr{battery >= e_j, queue nonempty}.
    pub p_high: f64,
    /// Pr{queue nonempty}; equals `p_low + p_mid + p_high` by construction.
    pub p_queue_nonempty: f64,
    /// Marginal Pr{battery >= e_j} (not conditioned on the queue).
    pub p_jam_capable: f64,
}

impl StateProbs {
    /// Battery-band masses conditioned on a nonempty queue; zero when the
    /// queue was never nonempty.
    pub fn conditional(&self) -> (f64, f64, f64) {
        if self.p_queue_nonempty <= 0.0 {
            (0.0, 0.0, 0.0)
        } else {
            (
                self.p_low / self.p_queue_nonempty,
                self.p_mid / self.p_queue_nonempty,
                self.p_high / self.p_queue_nonempty,
            )
        }
    }
}

/// The per-slot channel event probabilities entering the throughput
/// expressions, precomputed from the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelProbs {
    /// Direct link supports the target rate.
    pub connection: f64,
    /// No-jam secrecy rate reaches the target (depends on the split `rho`).
    pub secrecy_nojam: f64,
    /// Direct link survives jamming at the target rate.
    pub jammed: f64,
    /// Attacker's own link supports the target rate.
    pub eve_link: f64,
}

impl ChannelProbs {
    pub fn from_params(cfg: &SystemConfig, derived: &DerivedParams, rho: f64) -> Self {
        let r = derived.r_target;
        Self {
            connection: channel::connection_prob(r, derived.gamma_a, cfg.sigma2_ab),
            secrecy_nojam: channel::secrecy_prob_nojam(
                r,
                derived.gamma_a,
                rho,
                cfg.sigma2_ab,
                cfg.sigma2_ae,
            ),
            jammed: channel::jammed_connection_prob(
                r,
                derived.gamma_a,
                derived.gamma_e,
                cfg.sigma2_ab,
                cfg.sigma2_eb,
            ),
            eve_link: channel::eve_link_prob(r, derived.gamma_a, cfg.sigma2_ae),
        }
    }
}

/// Mean service rate of the transmitter's queue given the two battery-band
/// weights: `(alpha_a (1 - alpha_e) w_jam + alpha_a * w_nojam) * p1`.
///
/// Feeding the unconditional battery marginals (summing to one) gives the
/// saturated service rate used by the stability bound; feeding the
/// queue-joint masses gives the unconditional departure rate.
pub fn service_rate(alpha_a: f64, alpha_e: f64, w_jam_capable: f64, w_below_jam: f64, p1: f64) -> f64 {
    (alpha_a * (1.0 - alpha_e) * w_jam_capable + alpha_a * w_below_jam) * p1
}

/// Secure throughput without sensing, literal per-term grouping.
pub fn secure_throughput_nosensing(
    alpha_a: f64,
    alpha_e: f64,
    probs: &StateProbs,
    ch: &ChannelProbs,
) -> f64 {
    let term1 = (probs.p_high * (1.0 - alpha_e) + (probs.p_low + probs.p_mid)) * ch.secrecy_nojam;
    let term2 = probs.p_low * ch.eve_link;
    let term3 = alpha_e * ch.jammed * probs.p_high;
    alpha_a * (term1 + term2 + term3)
}

/// Secure throughput without sensing, grouped exactly as the slot engine
/// adjudicates slots: listening mass carries the no-jam secrecy event,
/// starved mass carries the activity gate times the starved-slot secrecy
/// event, jam mass carries the jamming survival event.
pub fn secure_throughput_nosensing_exact(
    alpha_a: f64,
    alpha_e: f64,
    probs: &StateProbs,
    ch: &ChannelProbs,
    starved: StarvedSecrecy,
) -> f64 {
    let listening = probs.p_mid + (1.0 - alpha_e) * probs.p_high;
    let starved_event = match starved {
        StarvedSecrecy::AsWritten => ch.eve_link,
        StarvedSecrecy::LinkBased => 1.0,
    };
    let term1 = listening * ch.secrecy_nojam;
    let term2 = probs.p_low * ch.connection * starved_event;
    let term3 = alpha_e * ch.jammed * probs.p_high;
    alpha_a * (term1 + term2 + term3)
}

/// Secure throughput with sensing, literal per-term grouping with the
/// average missed-detection probability `p_md`.
pub fn secure_throughput_sensing(
    alpha_a: f64,
    alpha_e: f64,
    probs: &StateProbs,
    ch: &ChannelProbs,
    p_md: f64,
) -> f64 {
    let decode_high = probs.p_high * (1.0 - alpha_e);
    let term1 = ((1.0 - p_md) * decode_high + (1.0 - p_md) * probs.p_mid) * ch.secrecy_nojam;
    let term2 = (p_md * decode_high + p_md * probs.p_mid + probs.p_low) * ch.eve_link;
    let term3 = alpha_e * ch.jammed * probs.p_high;
    alpha_a * (term1 + term2 + term3)
}

/// Joint detector/channel event probabilities over the attacker-link fading,
/// computed by quadrature of the Gaussian-model detection curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingJoints {
    /// Pr{detected and no-jam secrecy rate >= target}.
    pub detect_and_secret: f64,
    /// Pr{missed and attacker link supports the target} (starved-secrecy
    /// event among missed slots, as-written semantics).
    pub miss_and_eve_link: f64,
    /// Pr{missed} under the same detection curve (exact average miss rate).
    pub miss_total: f64,
}

/// Integrate the detector curve against the exponential gain density to get
/// the joint probabilities entering the exact sensing throughput. `abs_tol`
/// is per integral.
pub fn sensing_joints(
    det: &DetectorSpec,
    rho: f64,
    sigma2_ab: f64,
    r: f64,
    abs_tol: f64,
) -> Result<SensingJoints, NumericError> {
    let s_ae = det.sigma2_ae;
    let gamma_a = det.gamma_a;
    let g_max = s_ae * 32.0;
    let density = move |g: f64| (-g / s_ae).exp() / s_ae;
    let pow = 2f64.powf(r);

    // Secrecy of the direct link conditioned on the attacker's gain.
    let secret_given_g =
        move |g: f64| (-((pow * (1.0 + rho * gamma_a * g) - 1.0) / (sigma2_ab * gamma_a))).exp();

    // Detection-curve transition band in the gain domain, seeded into the
    // integrator so it cannot be stepped over at large sample counts.
    let n = det.n_samples as f64;
    let thr = det.normalized_threshold();
    let c = 12.0 / n.sqrt();
    let mut cuts = vec![(thr - 1.0) / gamma_a, (thr / (1.0 + c) - 1.0) / gamma_a];
    if c < 1.0 {
        cuts.push((thr / (1.0 - c) - 1.0) / gamma_a);
    }

    let det_curve = *det;
    let detect_and_secret = numeric::integrate_with_breakpoints(
        move |g| det_curve.detection_prob_given_gain(g) * secret_given_g(g) * density(g),
        0.0,
        g_max,
        &cuts,
        abs_tol,
    )?;
    let g_r = (pow - 1.0) / gamma_a;
    let miss_and_eve_link = if g_r >= g_max {
        0.0
    } else {
        numeric::integrate_with_breakpoints(
            move |g| (1.0 - det_curve.detection_prob_given_gain(g)) * density(g),
            g_r.max(0.0),
            g_max,
            &cuts,
            abs_tol,
        )?
    };
    let miss_total = numeric::integrate_with_breakpoints(
        move |g| (1.0 - det_curve.detection_prob_given_gain(g)) * density(g),
        0.0,
        g_max,
        &cuts,
        abs_tol,
    )?;
    Ok(SensingJoints {
        detect_and_secret,
        miss_and_eve_link,
        miss_total,
    })
}

/// Secure throughput with sensing, grouped exactly as the slot engine
/// adjudicates slots, with the detector outcome integrated jointly with the
/// attacker-link gain (the outcome and the attacker-link events share that
/// gain and are far from independent slot by slot).
pub fn secure_throughput_sensing_exact(
    alpha_a: f64,
    alpha_e: f64,
    probs: &StateProbs,
    ch: &ChannelProbs,
    joints: &SensingJoints,
    starved: StarvedSecrecy,
) -> f64 {
    let listening = probs.p_mid + (1.0 - alpha_e) * probs.p_high;
    let (miss_secure, starved_event) = match starved {
        StarvedSecrecy::AsWritten => (joints.miss_and_eve_link, ch.eve_link),
        StarvedSecrecy::LinkBased => (joints.miss_total, 1.0),
    };
    let term_detect = listening * joints.detect_and_secret;
    let term_miss = listening * ch.connection * miss_secure;
    let term_starved = probs.p_low * ch.connection * starved_event;
    let term_jam = alpha_e * ch.jammed * probs.p_high;
    alpha_a * (term_detect + term_miss + term_starved + term_jam)
}

/// Smallest access probability that keeps the queue stable under the
/// service-rate lower bound `alpha_a (1 - alpha_e) p1`, inflated by the
/// multiplicative `margin` and capped at one.
pub fn stable_access_prob(
    lambda_a: f64,
    alpha_e_assumed: f64,
    p1: f64,
    margin: f64,
) -> Result<f64, InfeasibleError> {
    if lambda_a == 0.0 {
        return Ok(0.0);
    }
    let bound = (1.0 - alpha_e_assumed) * p1;
    if lambda_a >= bound || lambda_a.is_nan() || bound.is_nan() {
        return Err(InfeasibleError { lambda_a, bound });
    }
    Ok((margin * lambda_a / bound).min(1.0))
}
