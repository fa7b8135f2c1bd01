//! Self-check suite: brute-force Monte Carlo oracles for every closed form,
//! detector calibration, and an energy-conservation fuzz over random
//! configurations. Wired to `jamsec validate`; the oracles are also what the
//! unit tests freeze their expected values from.

use crate::params::{AttackerPolicy, SystemConfig};
use crate::rng::SlotRng;
use crate::sensing::{DetectorModel, DetectorSpec};
use crate::sim::{self, SimOptions};
use crate::{analytics, channel, numeric, params, sensing};
use std::fmt::Write as _;

/// Brute-force estimators, independent of the closed forms they gate: they
/// draw gains and evaluate the defining events directly.
pub mod oracles {
    use super::*;

    fn binomial(hits: u64, n: u64) -> (f64, f64) {
        let p = hits as f64 / n as f64;
        (p, (p * (1.0 - p) / n as f64).sqrt().max(1e-9))
    }

    /// Pr{log2(1 + gamma_a g) >= r} over g ~ Exp(sigma2_ab).
    pub fn mc_connection_prob(r: f64, gamma_a: f64, sigma2_ab: f64, n: u64, seed: u64) -> (f64, f64) {
        let mut rng = SlotRng::from_seed_stream(seed, 0);
        let hits = (0..n)
            .filter(|_| {
                let g = rng.exponential(sigma2_ab);
                (1.0 + gamma_a * g).log2() >= r
            })
            .count() as u64;
        binomial(hits, n)
    }

    /// Pr{[log2(1+gamma_a a) - log2(1+rho gamma_a e)]+ >= r} over paired
    /// independent exponentials.
    pub fn mc_secrecy_prob_nojam(
        r: f64,
        gamma_a: f64,
        rho: f64,
        sigma2_ab: f64,
        sigma2_ae: f64,
        n: u64,
        seed: u64,
    ) -> (f64, f64) {
        let mut rng = SlotRng::from_seed_stream(seed, 0);
        let hits = (0..n)
            .filter(|_| {
                let a = rng.exponential(sigma2_ab);
                let e = rng.exponential(sigma2_ae);
                let sec = ((1.0 + gamma_a * a).log2() - (1.0 + rho * gamma_a * e).log2()).max(0.0);
                sec >= r
            })
            .count() as u64;
        binomial(hits, n)
    }

    /// Pr{log2(1 + gamma_a a / (1 + gamma_e c)) >= r}.
    pub fn mc_jammed_connection_prob(
        r: f64,
        gamma_a: f64,
        gamma_e: f64,
        sigma2_ab: f64,
        sigma2_eb: f64,
        n: u64,
        seed: u64,
    ) -> (f64, f64) {
        let mut rng = SlotRng::from_seed_stream(seed, 0);
        let hits = (0..n)
            .filter(|_| {
                let a = rng.exponential(sigma2_ab);
                let c = rng.exponential(sigma2_eb);
                (1.0 + gamma_a * a / (1.0 + gamma_e * c)).log2() >= r
            })
            .count() as u64;
        binomial(hits, n)
    }

    /// Pr{log2(1 + gamma_a e) >= r} over e ~ Exp(sigma2_ae).
    pub fn mc_eve_link_prob(r: f64, gamma_a: f64, sigma2_ae: f64, n: u64, seed: u64) -> (f64, f64) {
        let mut rng = SlotRng::from_seed_stream(seed, 0);
        let hits = (0..n)
            .filter(|_| {
                let e = rng.exponential(sigma2_ae);
                (1.0 + gamma_a * e).log2() >= r
            })
            .count() as u64;
        binomial(hits, n)
    }

    /// Empirical missed-detection rate of the simulated detector with the
    /// per-trial gain drawn from the attacker-link fading.
    pub fn mc_missed_detection(
        spec: &DetectorSpec,
        model: DetectorModel,
        trials: u64,
        seed: u64,
    ) -> (f64, f64) {
        let mut rng = SlotRng::from_seed_stream(seed, 0);
        let misses = (0..trials)
            .filter(|_| {
                let g = rng.exponential(spec.sigma2_ae);
                sensing::simulate_detection(&mut rng, true, g, spec, model).missed
            })
            .count() as u64;
        binomial(misses, trials)
    }

    /// Empirical false-alarm rate of the simulated detector.
    pub fn mc_false_alarm(
        spec: &DetectorSpec,
        model: DetectorModel,
        trials: u64,
        seed: u64,
    ) -> (f64, f64) {
        let mut rng = SlotRng::from_seed_stream(seed, 0);
        let alarms = (0..trials)
            .filter(|_| sensing::simulate_detection(&mut rng, false, 0.0, spec, model).false_alarm)
            .count() as u64;
        binomial(alarms, trials)
    }
}

/// One check of the suite.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub got: f64,
    pub want: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.got - self.want).abs() <= self.tol
    }
}

/// Outcome of [`run_suite`].
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: impl Into<String>, got: f64, want: f64, tol: f64) {
        self.checks.push(Check {
            name: name.into(),
            got,
            want,
            tol,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }

    /// Per-check lines with deltas, one per check, plus a summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "[{}] {}: got {:.6e}, want {:.6e}, |delta| {:.2e} (tol {:.2e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.got,
                c.want,
                (c.got - c.want).abs(),
                c.tol
            );
        }
        let _ = writeln!(
            out,
            "{}/{} checks passed",
            self.checks.len() - self.failures(),
            self.checks.len()
        );
        out
    }
}

/// Run the full validation suite. Deterministic in `seed`.
pub fn run_suite(seed: u64) -> ValidationReport {
    let mut report = ValidationReport::default();
    closed_form_checks(&mut report, seed);
    detector_checks(&mut report, seed);
    q_function_checks(&mut report);
    conservation_fuzz(&mut report, seed);
    determinism_check(&mut report, seed);
    report
}

fn closed_form_checks(report: &mut ValidationReport, seed: u64) {
    let n = 1_000_000;
    let rs = [0.5, 1.0, 2.0];
    let gammas = [1.0, 10.0];
    let rhos = [0.0, 0.5, 1.0];
    let mut k = 0u64;
    for &r in &rs {
        for &g in &gammas {
            k += 1;
            let (mc, se) = oracles::mc_connection_prob(r, g, 1.0, n, seed.wrapping_add(k));
            report.push(
                format!("connection_prob(r={r}, gamma={g})"),
                channel::connection_prob(r, g, 1.0),
                mc,
                3.0 * se,
            );
            k += 1;
            let (mc, se) = oracles::mc_eve_link_prob(r, g, 1.0, n, seed.wrapping_add(k));
            report.push(
                format!("eve_link_prob(r={r}, gamma={g})"),
                channel::eve_link_prob(r, g, 1.0),
                mc,
                3.0 * se,
            );
            k += 1;
            let (mc, se) =
                oracles::mc_jammed_connection_prob(r, g, g, 1.0, 1.0, n, seed.wrapping_add(k));
            report.push(
                format!("jammed_connection_prob(r={r}, gamma={g})"),
                channel::jammed_connection_prob(r, g, g, 1.0, 1.0),
                mc,
                3.0 * se,
            );
            for &rho in &rhos {
                k += 1;
                let (mc, se) =
                    oracles::mc_secrecy_prob_nojam(r, g, rho, 1.0, 1.0, n, seed.wrapping_add(k));
                report.push(
                    format!("secrecy_prob_nojam(r={r}, gamma={g}, rho={rho})"),
                    channel::secrecy_prob_nojam(r, g, rho, 1.0, 1.0),
                    mc,
                    3.0 * se,
                );
            }
        }
    }
}

fn detector_checks(report: &mut ValidationReport, seed: u64) {
    // Analytic missed-detection probability against the simulated detector.
    for (i, (n_samples, p_fa, gt)) in [(10u32, 0.1, 1.0), (100u32, 0.1, 10.0), (100u32, 0.05, 1.0)]
        .into_iter()
        .enumerate()
    {
        let spec = DetectorSpec {
            n_samples,
            p_fa,
            gamma_a: gt,
            sigma2_ae: 1.0,
        };
        let analytic = match sensing::missed_detection_prob(&spec) {
            Ok(v) => v,
            Err(e) => {
                report.push(format!("pmd quadrature failed: {e}"), 1.0, 0.0, 0.0);
                continue;
            }
        };
        let (mc, _) = oracles::mc_missed_detection(
            &spec,
            DetectorModel::GaussianApprox,
            1_000_000,
            seed.wrapping_add(7000 + i as u64),
        );
        report.push(
            format!("missed_detection_prob(n={n_samples}, p_fa={p_fa}, snr={gt})"),
            analytic,
            mc,
            0.01,
        );
    }
    // False-alarm calibration at the target, both statistic models.
    for (i, n_samples) in [1u32, 10, 100].into_iter().enumerate() {
        let spec = DetectorSpec {
            n_samples,
            p_fa: 0.1,
            gamma_a: 1.0,
            sigma2_ae: 1.0,
        };
        let trials = 400_000;
        let (fa, se) = oracles::mc_false_alarm(
            &spec,
            DetectorModel::GaussianApprox,
            trials,
            seed.wrapping_add(7100 + i as u64),
        );
        report.push(
            format!("false_alarm calibration gaussian (n={n_samples})"),
            fa,
            0.1,
            3.0 * se,
        );
    }
    for (i, n_samples) in [1u32, 10].into_iter().enumerate() {
        let spec = DetectorSpec {
            n_samples,
            p_fa: 0.1,
            gamma_a: 1.0,
            sigma2_ae: 1.0,
        };
        let trials = 200_000;
        let (fa, se) = oracles::mc_false_alarm(
            &spec,
            DetectorModel::ChiSquareExact,
            trials,
            seed.wrapping_add(7200 + i as u64),
        );
        report.push(
            format!("false_alarm calibration chi-square (n={n_samples})"),
            fa,
            0.1,
            3.0 * se,
        );
    }
}

fn q_function_checks(report: &mut ValidationReport) {
    let mut worst = 0.0f64;
    let mut p = 1e-8;
    while p < 1.0 {
        if let Ok(z) = numeric::q_inverse(p) {
            worst = worst.max(((numeric::q_function(z) - p) / p).abs());
        }
        p *= 2.3;
    }
    report.push("q_function/q_inverse round trip (max rel err)", worst, 0.0, 1e-10);
}

fn conservation_fuzz(report: &mut ValidationReport, seed: u64) {
    // Random configurations and policies; every slot must satisfy the exact
    // battery recursion, affordability, nonnegativity, and queue balance.
    let n_policies = 10_000u64;
    let slots = 1_000u64;
    let mut gen = SlotRng::from_seed_stream(seed.wrapping_add(9000), 0);
    let mut violations = 0u64;
    let mut runs_failed = 0u64;
    for i in 0..n_policies {
        let mut cfg = SystemConfig::default();
        cfg.lambda_a = gen.uniform();
        cfg.alpha_a = gen.uniform();
        cfg.e_const = if gen.bernoulli(0.3) {
            1e-6 * gen.uniform()
        } else {
            0.0
        };
        // Spread the decode/jam costs so all battery bands get visited.
        cfg.p_d = 10f64.powf(-4.0 + 5.0 * gen.uniform());
        cfg.p_j = cfg.p_d * 10f64.powf(2.0 * gen.uniform());
        let sensing_enabled = gen.bernoulli(0.5);
        let policy = AttackerPolicy {
            alpha_e: gen.uniform(),
            rho: gen.uniform(),
            sensing_enabled,
            tau: cfg.t_slot * (0.05 + 0.95 * gen.uniform()),
            p_fa: 0.01 + 0.48 * gen.uniform(),
        };
        let opts = SimOptions::default();
        let mut local = 0u64;
        let outcome = sim::run_with_observer(&cfg, &policy, seed ^ i, slots, &opts, |rec| {
            let expected = rec.battery_before - rec.e_out + rec.e_h + rec.e_const;
            if expected.to_bits() != rec.battery_after.to_bits()
                || rec.e_out > rec.battery_before
                || rec.battery_after < 0.0
            {
                local += 1;
            }
        });
        match outcome {
            Ok(r) => {
                if opts.initial_queue + r.arrivals_total - r.departures_total != r.queue_final {
                    local += 1;
                }
            }
            Err(_) => runs_failed += 1,
        }
        violations += local;
    }
    report.push(
        format!("energy/queue conservation fuzz ({n_policies} policies x {slots} slots): violations"),
        violations as f64,
        0.0,
        0.0,
    );
    report.push("conservation fuzz: failed runs", runs_failed as f64, 0.0, 0.0);
}

fn determinism_check(report: &mut ValidationReport, seed: u64) {
    let cfg = SystemConfig::default();
    let policy = AttackerPolicy {
        alpha_e: 0.5,
        rho: 0.5,
        ..Default::default()
    };
    let opts = SimOptions::default();
    let a = sim::run(&cfg, &policy, seed, 20_000, &opts);
    let b = sim::run(&cfg, &policy, seed, 20_000, &opts);
    let identical = match (a, b) {
        (Ok(a), Ok(b)) => {
            serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap()
        }
        _ => false,
    };
    report.push(
        "repeat run with a fixed seed is byte-identical",
        if identical { 1.0 } else { 0.0 },
        1.0,
        0.0,
    );
}

/// Consistency probe shared with the acceptance suite: run a simulation and
/// evaluate the exact semi-analytic counterpart at the measured state
/// probabilities. Returns `(mu_sec_hat, analytic, 3 * batch SE, service_hat,
/// service_analytic, 3 * batch SE)`.
pub fn consistency_probe(
    cfg: &SystemConfig,
    policy: &AttackerPolicy,
    seed: u64,
    n_slots: u64,
    opts: &SimOptions,
) -> Result<ConsistencyProbe, sim::SimError> {
    let report = sim::run(cfg, policy, seed, n_slots, opts)?;
    let derived = params::derive(cfg)?;
    let ch = analytics::ChannelProbs::from_params(cfg, &derived, policy.rho);
    let analytic_sec = if policy.sensing_enabled {
        let det = DetectorSpec::from_policy(policy, cfg, &derived, opts.sample_count_rule)?;
        let joints = analytics::sensing_joints(&det, policy.rho, cfg.sigma2_ab, derived.r_target, 1e-8)?;
        analytics::secure_throughput_sensing_exact(
            cfg.alpha_a,
            policy.alpha_e,
            &report.state_probs,
            &ch,
            &joints,
            opts.starved_secrecy,
        )
    } else {
        analytics::secure_throughput_nosensing_exact(
            cfg.alpha_a,
            policy.alpha_e,
            &report.state_probs,
            &ch,
            opts.starved_secrecy,
        )
    };
    let literal_sec = if policy.sensing_enabled {
        let det = DetectorSpec::from_policy(policy, cfg, &derived, opts.sample_count_rule)?;
        let p_md = sensing::missed_detection_prob(&det)?;
        analytics::secure_throughput_sensing(
            cfg.alpha_a,
            policy.alpha_e,
            &report.state_probs,
            &ch,
            p_md,
        )
    } else {
        analytics::secure_throughput_nosensing(cfg.alpha_a, policy.alpha_e, &report.state_probs, &ch)
    };
    // Service rate, conditional on a nonempty queue, from the conditional
    // battery masses.
    let (c_low, c_mid, c_high) = report.state_probs.conditional();
    let analytic_service =
        analytics::service_rate(cfg.alpha_a, policy.alpha_e, c_high, c_low + c_mid, ch.connection);
    Ok(ConsistencyProbe {
        report: Box::new(report),
        analytic_sec,
        literal_sec,
        analytic_service,
    })
}

/// Output of [`consistency_probe`].
#[derive(Debug, Clone)]
pub struct ConsistencyProbe {
    pub report: Box<sim::SimReport>,
    /// Exact grouping evaluated at the measured state probabilities.
    pub analytic_sec: f64,
    /// Literal published grouping at the same state probabilities.
    pub literal_sec: f64,
    /// Conditional service rate from the conditional battery masses.
    pub analytic_service: f64,
}
