//! Monte Carlo experiment orchestration.
//!
//! A run evaluates one or more configurations (sweep points) over the same
//! sequence of random layouts. Layout `i` is fully determined by the master
//! seed and `i`, so every sweep point and every algorithm sees the same
//! deployments, shadowing and fading (common random numbers). Points that
//! share geometry and channel parameters also share the per-layout
//! clustering work.

mod config;
#[cfg(test)]
mod end_to_end;
mod output;

pub use config::{ExperimentConfig, Sweep, SweepParameter};
pub use output::{emit_results, parse_results, render_results, OutputFormat, CSV_HEADER};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{ee_upper_bound, optimal_lambda, BoundForm};
use crate::error::Result;
use crate::networking::NetworkingContext;
use crate::power::energy_efficiency;
use crate::rng::{derive_seed, Purpose};
use crate::scenario::{
    large_scale_matrix, sample_deployment, sample_small_scale, ComplexMatrix, GainMatrix,
};
use crate::transmission::ergodic_rates_over_draws;

/// Metrics of one configuration on one layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutOutcome {
    pub layout: usize,
    pub ee: f64,
    pub sum_rate: f64,
    pub min_rate: f64,
    pub rate_variance: f64,
    /// `sum_rate / K`.
    pub mean_user_rate: f64,
    pub total_power: f64,
    pub active_aps: usize,
}

/// One aggregated row of an experiment table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment_id: String,
    pub algorithm: String,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub lambda: f64,
    pub sigma_sh_db: f64,
    pub n_layouts: usize,
    pub n_fading_draws: usize,
    pub master_seed: u64,
    pub mean_ee: f64,
    pub ci95_ee: f64,
    pub mean_sum_rate: f64,
    pub mean_min_rate: f64,
    pub mean_rate_variance: f64,
    pub bound_ee_exact: Option<f64>,
    pub bound_ee_approx: Option<f64>,
    pub lambda_star: Option<f64>,
}

/// A row together with the per-layout samples it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRun {
    pub config: ExperimentConfig,
    pub result: ExperimentResult,
    pub layouts: Vec<LayoutOutcome>,
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; 0 for fewer than two samples.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    (xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn std_error(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    std_dev(xs) / (xs.len() as f64).sqrt()
}

/// Half-width of the normal-approximation 95% confidence interval of the mean.
pub fn ci95(xs: &[f64]) -> f64 {
    1.96 * std_error(xs)
}

/// Inputs that determine the random channel of a layout.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ChannelKey {
    k: usize,
    l: usize,
    d: f64,
    alpha: f64,
    sigma: f64,
    min_distance: f64,
    draws: usize,
}

impl ChannelKey {
    fn of(cfg: &ExperimentConfig) -> Self {
        Self {
            k: cfg.k,
            l: cfg.l,
            d: cfg.d,
            alpha: cfg.channel.alpha,
            sigma: cfg.channel.sigma_sh_db,
            min_distance: cfg.channel.min_distance_m,
            draws: cfg.n_fading_draws,
        }
    }
}

fn layout_channel(
    cfg: &ExperimentConfig,
    layout: usize,
) -> Result<(GainMatrix, Vec<ComplexMatrix>)> {
    let i = layout as u64;
    let dep = sample_deployment(
        cfg.k,
        cfg.l,
        cfg.d,
        derive_seed(cfg.master_seed, i, Purpose::Deployment),
    )?;
    let ls = large_scale_matrix(
        &dep,
        &cfg.channel,
        derive_seed(cfg.master_seed, i, Purpose::Shadowing),
    )?;
    let draws = sample_small_scale(
        cfg.k,
        cfg.l,
        cfg.n_fading_draws,
        derive_seed(cfg.master_seed, i, Purpose::Fading),
    )?;
    Ok((ls, draws))
}

/// Evaluates every point on layout `layout`.
///
/// All points must share `master_seed`; points with equal geometry and
/// channel parameters reuse one channel realization and one clustering cache.
pub fn evaluate_layout(points: &[ExperimentConfig], layout: usize) -> Result<Vec<LayoutOutcome>> {
    let mut out: Vec<Option<LayoutOutcome>> = vec![None; points.len()];
    let mut done = vec![false; points.len()];
    for first in 0..points.len() {
        if done[first] {
            continue;
        }
        let key = ChannelKey::of(&points[first]);
        let (ls, draws) = layout_channel(&points[first], layout)?;
        let ctx = NetworkingContext::new(&ls);
        let cluster_seed = derive_seed(
            points[first].master_seed,
            layout as u64,
            Purpose::Clustering,
        );
        for idx in first..points.len() {
            if done[idx] || ChannelKey::of(&points[idx]) != key {
                continue;
            }
            done[idx] = true;
            let cfg = &points[idx];
            let partition = ctx.partition(cfg.algorithm, cfg.m, cfg.lambda, cluster_seed)?;
            let rates = ergodic_rates_over_draws(
                &partition,
                &ls,
                &draws,
                cfg.power.p_tx,
                cfg.channel.noise_power_w(),
            )?;
            let report = energy_efficiency(&rates, &partition, &cfg.power, cfg.l);
            out[idx] = Some(LayoutOutcome {
                layout,
                ee: report.ee,
                sum_rate: rates.sum_rate,
                min_rate: report.min_rate,
                rate_variance: report.rate_variance_across_subnetworks,
                mean_user_rate: rates.sum_rate / cfg.k as f64,
                total_power: report.total_power,
                active_aps: partition.active_ap_count,
            });
        }
    }
    Ok(out
        .into_iter()
        .map(|o| o.expect("every point is evaluated"))
        .collect())
}

/// Builds a row from per-layout samples, which must be in layout order for
/// bit-identical results.
pub fn aggregate(cfg: &ExperimentConfig, layouts: &[LayoutOutcome]) -> ExperimentResult {
    let col = |f: fn(&LayoutOutcome) -> f64| layouts.iter().map(f).collect::<Vec<f64>>();
    let ee = col(|o| o.ee);
    let bounds = if cfg.lambda > 1.0 {
        let b = cfg.bound_inputs();
        (
            ee_upper_bound(&b, BoundForm::Exact).ok(),
            ee_upper_bound(&b, BoundForm::Approximate).ok(),
        )
    } else {
        (None, None)
    };
    ExperimentResult {
        experiment_id: cfg.experiment_id.clone(),
        algorithm: cfg.algorithm.name().to_string(),
        l: cfg.l,
        k: cfg.k,
        m: cfg.m,
        lambda: cfg.lambda,
        sigma_sh_db: cfg.channel.sigma_sh_db,
        n_layouts: layouts.len(),
        n_fading_draws: cfg.n_fading_draws,
        master_seed: cfg.master_seed,
        mean_ee: mean(&ee),
        ci95_ee: ci95(&ee),
        mean_sum_rate: mean(&col(|o| o.sum_rate)),
        mean_min_rate: mean(&col(|o| o.min_rate)),
        mean_rate_variance: mean(&col(|o| o.rate_variance)),
        bound_ee_exact: bounds.0,
        bound_ee_approx: bounds.1,
        lambda_star: optimal_lambda(cfg.l, cfg.m).ok(),
    }
}

/// Runs all points over layouts `0..n_layouts`, in parallel over layouts.
pub fn run_points(points: &[ExperimentConfig]) -> Result<Vec<PointRun>> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    for p in points {
        p.validate()?;
        if p.master_seed != first.master_seed || p.n_layouts != first.n_layouts {
            return Err(crate::error::Error::config(
                "sweep points must share the seed and layout count",
            ));
        }
    }
    let per_layout: Vec<Vec<LayoutOutcome>> = (0..first.n_layouts)
        .into_par_iter()
        .map(|i| evaluate_layout(points, i))
        .collect::<Result<_>>()?;
    Ok(points
        .iter()
        .enumerate()
        .map(|(j, cfg)| {
            let layouts: Vec<LayoutOutcome> = per_layout.iter().map(|row| row[j]).collect();
            PointRun {
                config: cfg.clone(),
                result: aggregate(cfg, &layouts),
                layouts,
            }
        })
        .collect())
}

/// Single configuration, ignoring any sweep section.
pub fn run_point(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let cfg = ExperimentConfig {
        sweep: None,
        ..cfg.clone()
    };
    Ok(run_points(std::slice::from_ref(&cfg))?.remove(0).result)
}

/// One row per sweep value (or a single row without a sweep). Every row uses
/// the same layout seeds.
pub fn run_sweep_detailed(cfg: &ExperimentConfig) -> Result<Vec<PointRun>> {
    let mut points = cfg.expand()?;
    if points.len() > 1 {
        for (i, p) in points.iter_mut().enumerate() {
            p.experiment_id = format!("{}-{i:03}", cfg.experiment_id);
        }
    }
    run_points(&points)
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ExperimentResult>> {
    Ok(run_sweep_detailed(cfg)?
        .into_iter()
        .map(|r| r.result)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::networking::Algorithm;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            k: 12,
            l: 30,
            m: 3,
            lambda: 1.5,
            n_layouts: 6,
            n_fading_draws: 2,
            master_seed: 5,
            ..Default::default()
        }
    }

    #[test]
    fn stats_helpers() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((std_dev(&xs) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((ci95(&xs) - 1.96 * (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(ci95(&[3.0]), 0.0);
    }

    #[test]
    fn deterministic_single_layout() {
        let cfg = ExperimentConfig {
            n_layouts: 1,
            ..small()
        };
        assert_eq!(run_point(&cfg).unwrap(), run_point(&cfg).unwrap());
    }

    #[test]
    fn single_subnetwork_has_no_variance() {
        let cfg = ExperimentConfig {
            m: 1,
            lambda: 2.5,
            ..small()
        };
        let r = run_point(&cfg).unwrap();
        assert_eq!(r.mean_rate_variance, 0.0);
        assert!(r.mean_ee > 0.0);
    }

    #[test]
    fn infeasible_lambda_fails_before_compute() {
        let cfg = ExperimentConfig {
            lambda: 3.0,
            ..small()
        };
        assert!(matches!(run_point(&cfg), Err(Error::Config(_))));
        let sweep = ExperimentConfig {
            sweep: Some(Sweep::new(SweepParameter::Lambda, &[1.5, 9.0])),
            ..small()
        };
        assert!(matches!(run_sweep(&sweep), Err(Error::Config(_))));
    }

    #[test]
    fn layout_results_do_not_depend_on_grouping() {
        // evaluating a point alone or next to others gives identical samples
        let a = small();
        let b = ExperimentConfig {
            algorithm: Algorithm::ApCentric,
            ..small()
        };
        let c = ExperimentConfig { l: 40, ..small() };
        let joint = evaluate_layout(&[a.clone(), b.clone(), c.clone()], 3).unwrap();
        assert_eq!(joint[0], evaluate_layout(&[a], 3).unwrap()[0]);
        assert_eq!(joint[1], evaluate_layout(&[b], 3).unwrap()[0]);
        assert_eq!(joint[2], evaluate_layout(&[c], 3).unwrap()[0]);
    }

    #[test]
    fn resuming_from_layout_seeds_reproduces_aggregate() {
        let cfg = small();
        let full = run_point(&cfg).unwrap();
        let mut samples: Vec<LayoutOutcome> = (0..3)
            .map(|i| evaluate_layout(std::slice::from_ref(&cfg), i).unwrap()[0])
            .collect();
        samples.extend(
            (3..cfg.n_layouts).map(|i| evaluate_layout(std::slice::from_ref(&cfg), i).unwrap()[0]),
        );
        assert_eq!(aggregate(&cfg, &samples), full);
    }

    #[test]
    fn sweep_rows_share_seeds() {
        let cfg = ExperimentConfig {
            sweep: Some(Sweep::new(SweepParameter::Lambda, &[1.2, 1.6, 2.0])),
            ..small()
        };
        let rows = run_sweep_detailed(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.result.master_seed, 5);
            assert_eq!(r.result.n_layouts, 6);
            assert!(r.result.bound_ee_exact.is_some() && r.result.lambda_star.is_some());
        }
        assert_eq!(rows[2].result.experiment_id, "exp-002");
        // the same layouts feed every row: the partition at lambda differs but the
        // active-AP count follows the quota on each layout
        for r in &rows {
            for o in &r.layouts {
                assert!(o.active_aps as f64 <= r.config.lambda * 12.0 + 1e-9);
            }
        }
    }

    #[test]
    fn algorithm_sweep_gives_one_row_each() {
        let names = [
            "ucr_apsel",
            "uc_apsel",
            "ap_centric",
            "user_centric_kmeans",
            "graph_partition",
        ];
        let cfg = ExperimentConfig {
            sweep: Some(Sweep::new(SweepParameter::Algorithm, &names)),
            ..small()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(
            rows.iter()
                .map(|r| r.algorithm.as_str())
                .collect::<Vec<_>>(),
            names
        );
        assert!(rows.iter().all(|r| r.master_seed == 5));
        assert!(rows
            .iter()
            .all(|r| r.mean_ee.is_finite() && r.mean_ee > 0.0));
    }

    #[test]
    fn unknown_sweep_parameter() {
        assert!(matches!(
            "alpha".parse::<SweepParameter>(),
            Err(Error::Config(_))
        ));
    }
}
