//! The attacker's offline strategy search: exhaustive grid evaluation of the
//! secure throughput over the split fraction and the jam probability (and
//! optionally the sensing window), minimized with a deterministic tie-break.
//!
//! Every cell is evaluated on the same random stream (common random numbers),
//! so cells differ only through the policy parameters and the surface is
//! directly comparable cell to cell. Cells run in parallel; results are
//! merged by index, so the outcome is independent of the thread schedule.

use crate::analytics::{
    secure_throughput_nosensing_exact, secure_throughput_sensing_exact, sensing_joints,
    ChannelProbs,
};
use crate::params::{self, AttackerPolicy, ConfigError, SystemConfig};
use crate::sensing::DetectorSpec;
use crate::sim::{self, SimError, SimOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("grid needs at least 2 points per axis, got {0}")]
    TooFewPoints(usize),
    #[error("every grid cell failed; first error: {0}")]
    AllCellsFailed(String),
}

/// Objective evaluated per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// The run's empirical secure throughput.
    #[default]
    Simulation,
    /// The exact semi-analytic secure throughput evaluated at the run's
    /// measured state probabilities (smoother surface, same fixed point).
    SemiAnalytic,
}

/// Grid-search specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Points per axis (the axes span `[0, 1]` inclusive).
    pub m_points: usize,
    /// Add the sensing window as a third axis over `(0, t_slot]`.
    pub optimize_tau: bool,
    pub objective: Objective,
    /// Simulated slots per cell.
    pub slots_per_cell: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            m_points: 11,
            optimize_tau: false,
            objective: Objective::Simulation,
            slots_per_cell: 100_000,
        }
    }
}

/// One evaluated cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub rho: f64,
    pub alpha_e: f64,
    pub tau: Option<f64>,
    pub mu_sec: f64,
    /// Batch-means confidence half-width of the cell value (zero for the
    /// semi-analytic objective).
    pub ci: f64,
    /// Seed the cell ran on (identical across cells by construction).
    pub seed: u64,
}

/// Complete surface plus the argmin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub base_seed: u64,
    pub best: GridCell,
    /// All successful cells in lexicographic `(rho, alpha_e, tau)` order.
    pub cells: Vec<GridCell>,
    /// Cells whose evaluation failed: `(flat index, error)`. Never silently
    /// dropped.
    pub failed: Vec<(usize, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct GridPoint {
    rho: f64,
    alpha_e: f64,
    tau: Option<f64>,
}

fn axis(m: usize) -> Vec<f64> {
    (0..m).map(|i| i as f64 / (m - 1) as f64).collect()
}

fn grid_points(spec: &GridSpec, t_slot: f64) -> Vec<GridPoint> {
    let rhos = axis(spec.m_points);
    let alphas = axis(spec.m_points);
    let taus: Vec<Option<f64>> = if spec.optimize_tau {
        // The window axis excludes zero: (0, t_slot] in m steps.
        (0..spec.m_points)
            .map(|i| Some(t_slot * (i + 1) as f64 / spec.m_points as f64))
            .collect()
    } else {
        vec![None]
    };
    let mut points = Vec::with_capacity(rhos.len() * alphas.len() * taus.len());
    for &rho in &rhos {
        for &alpha_e in &alphas {
            for &tau in &taus {
                points.push(GridPoint { rho, alpha_e, tau });
            }
        }
    }
    points
}

fn evaluate_cells<F>(points: &[GridPoint], seed: u64, eval: F) -> (Vec<GridCell>, Vec<(usize, String)>)
where
    F: Fn(&GridPoint) -> Result<(f64, f64), String> + Sync,
{
    let results: Vec<Result<(f64, f64), String>> =
        points.par_iter().map(&eval).collect();
    let mut cells = Vec::with_capacity(points.len());
    let mut failed = Vec::new();
    for (i, (point, res)) in points.iter().zip(results).enumerate() {
        match res {
            Ok((mu_sec, ci)) => cells.push(GridCell {
                rho: point.rho,
                alpha_e: point.alpha_e,
                tau: point.tau,
                mu_sec,
                ci,
                seed,
            }),
            Err(e) => failed.push((i, e)),
        }
    }
    (cells, failed)
}

/// Argmin with the deterministic tie-break: cells arrive in lexicographic
/// `(rho, alpha_e, tau)` order and strict `<` keeps the first of any tie.
fn select_best(cells: &[GridCell]) -> Option<GridCell> {
    let mut best: Option<GridCell> = None;
    for cell in cells {
        match &best {
            None => best = Some(*cell),
            Some(b) if cell.mu_sec < b.mu_sec => best = Some(*cell),
            _ => {}
        }
    }
    best
}

fn simulate_cell(
    cfg: &SystemConfig,
    base_policy: &AttackerPolicy,
    point: &GridPoint,
    spec: &GridSpec,
    opts: &SimOptions,
    seed: u64,
) -> Result<(f64, f64), SimError> {
    let mut policy = *base_policy;
    policy.rho = point.rho;
    policy.alpha_e = point.alpha_e;
    if let Some(tau) = point.tau {
        policy.tau = tau;
    }
    let report = sim::run(cfg, &policy, seed, spec.slots_per_cell, opts)?;
    match spec.objective {
        Objective::Simulation => Ok((report.mu_sec_hat, report.mu_sec_ci)),
        Objective::SemiAnalytic => {
            let derived = params::derive(cfg)?;
            let ch = ChannelProbs::from_params(cfg, &derived, policy.rho);
            let value = if policy.sensing_enabled {
                let det =
                    DetectorSpec::from_policy(&policy, cfg, &derived, opts.sample_count_rule)?;
                let joints = sensing_joints(
                    &det,
                    policy.rho,
                    cfg.sigma2_ab,
                    derived.r_target,
                    1e-8,
                )?;
                secure_throughput_sensing_exact(
                    cfg.alpha_a,
                    policy.alpha_e,
                    &report.state_probs,
                    &ch,
                    &joints,
                    opts.starved_secrecy,
                )
            } else {
                secure_throughput_nosensing_exact(
                    cfg.alpha_a,
                    policy.alpha_e,
                    &report.state_probs,
                    &ch,
                    opts.starved_secrecy,
                )
            };
            Ok((value, 0.0))
        }
    }
}

/// Exhaustive grid search for the policy minimizing the secure throughput.
pub fn grid_search(
    cfg: &SystemConfig,
    base_policy: &AttackerPolicy,
    spec: &GridSpec,
    opts: &SimOptions,
    base_seed: u64,
) -> Result<GridResult, GridError> {
    if spec.m_points < 2 {
        return Err(GridError::TooFewPoints(spec.m_points));
    }
    params::derive(cfg)?;
    let points = grid_points(spec, cfg.t_slot);
    let (cells, failed) = evaluate_cells(&points, base_seed, |point| {
        simulate_cell(cfg, base_policy, point, spec, opts, base_seed).map_err(|e| e.to_string())
    });
    match select_best(&cells) {
        Some(best) => Ok(GridResult {
            base_seed,
            best,
            cells,
            failed,
        }),
        None => Err(GridError::AllCellsFailed(
            failed
                .first()
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| "empty grid".to_string()),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: usize, tau: bool) -> GridSpec {
        GridSpec {
            m_points: m,
            optimize_tau: tau,
            objective: Objective::Simulation,
            slots_per_cell: 10_000,
        }
    }

    #[test]
    fn grid_is_exhaustive() {
        assert_eq!(grid_points(&spec(5, false), 1e-3).len(), 25);
        assert_eq!(grid_points(&spec(4, true), 1e-3).len(), 64);
        let pts = grid_points(&spec(3, false), 1e-3);
        assert_eq!(pts[0].rho, 0.0);
        assert_eq!(pts[0].alpha_e, 0.0);
        assert_eq!(pts.last().unwrap().rho, 1.0);
        assert_eq!(pts.last().unwrap().alpha_e, 1.0);
        // The window axis excludes zero and includes the full slot.
        let pts = grid_points(&spec(4, true), 2e-3);
        assert!(pts.iter().all(|p| p.tau.unwrap() > 0.0));
        assert_eq!(pts.last().unwrap().tau.unwrap(), 2e-3);
    }

    #[test]
    fn constant_surface_breaks_ties_toward_the_origin() {
        let points = grid_points(&spec(6, false), 1e-3);
        let (cells, failed) = evaluate_cells(&points, 9, |_| Ok((0.5, 0.0)));
        assert!(failed.is_empty());
        let best = select_best(&cells).unwrap();
        assert_eq!((best.rho, best.alpha_e), (0.0, 0.0));
    }

    #[test]
    fn separable_synthetic_objective_finds_the_origin() {
        let points = grid_points(&spec(7, false), 1e-3);
        let (cells, _) = evaluate_cells(&points, 9, |p| Ok((p.rho + p.alpha_e, 0.0)));
        let best = select_best(&cells).unwrap();
        assert_eq!((best.rho, best.alpha_e, best.mu_sec), (0.0, 0.0, 0.0));
    }

    #[test]
    fn failed_cells_are_recorded_not_skipped() {
        let points = grid_points(&spec(3, false), 1e-3);
        let (cells, failed) = evaluate_cells(&points, 9, |p| {
            if p.rho == 0.5 && p.alpha_e == 0.5 {
                Err("boom".to_string())
            } else {
                Ok((p.rho, 0.0))
            }
        });
        assert_eq!(cells.len(), 8);
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].0, 4); // flat index of the middle cell
        assert_eq!(failed[0].1, "boom");
    }

    #[test]
    fn search_is_reproducible_and_dominates_doing_nothing() {
        let cfg = SystemConfig::default();
        let policy = AttackerPolicy::default();
        let s = spec(4, false);
        let opts = SimOptions::default();
        let a = grid_search(&cfg, &policy, &s, &opts, 31).unwrap();
        let b = grid_search(&cfg, &policy, &s, &opts, 31).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.cells.len(), 16);
        assert!(a.failed.is_empty());
        // Doing nothing is on the grid, so the optimum cannot be worse.
        let origin = a
            .cells
            .iter()
            .find(|c| c.rho == 0.0 && c.alpha_e == 0.0)
            .unwrap();
        assert!(a.best.mu_sec <= origin.mu_sec);
    }

    #[test]
    fn common_random_numbers_share_the_realization() {
        // With rho pinned by both cells and no jamming, identical policies in
        // different cells must produce bit-identical values.
        let cfg = SystemConfig::default();
        let policy = AttackerPolicy::default();
        let s = spec(2, false);
        let opts = SimOptions::default();
        let r = grid_search(&cfg, &policy, &s, &opts, 77).unwrap();
        // All cells carry the same seed.
        assert!(r.cells.iter().all(|c| c.seed == 77));
    }

    #[test]
    fn semi_analytic_objective_runs() {
        let cfg = SystemConfig::default();
        let policy = AttackerPolicy::default();
        let mut s = spec(3, false);
        s.objective = Objective::SemiAnalytic;
        let opts = SimOptions::default();
        let r = grid_search(&cfg, &policy, &s, &opts, 5).unwrap();
        assert_eq!(r.cells.len(), 9);
        assert!(r.cells.iter().all(|c| c.ci == 0.0));
        assert!(r.cells.iter().all(|c| (0.0..=1.0).contains(&c.mu_sec)));
    }

    #[test]
    fn rejects_degenerate_grids() {
        let cfg = SystemConfig::default();
        let policy = AttackerPolicy::default();
        let opts = SimOptions::default();
        assert!(matches!(
            grid_search(&cfg, &policy, &spec(1, false), &opts, 1),
            Err(GridError::TooFewPoints(1))
        ));
    }
}
