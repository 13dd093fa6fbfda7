//! End-to-end runs through the public harness API.

use super::{emit_results, parse_results, OutputFormat, CSV_HEADER};
use super::{run_point, run_sweep, run_sweep_detailed, ExperimentConfig, Sweep, SweepParameter};
use crate::error::Error;
use crate::networking::Algorithm;

fn small(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        k: 20,
        l: 60,
        m: 2,
        lambda: 1.5,
        n_layouts: 10,
        n_fading_draws: 2,
        master_seed: seed,
        ..Default::default()
    }
}

#[test]
fn ci_shrinks_with_more_layouts() {
    let mut ratios = Vec::new();
    for seed in 0..6 {
        let a = run_point(&ExperimentConfig {
            n_layouts: 100,
            ..small(seed)
        })
        .unwrap();
        let b = run_point(&ExperimentConfig {
            n_layouts: 200,
            ..small(seed)
        })
        .unwrap();
        ratios.push(b.ci95_ee / a.ci95_ee);
    }
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let target = std::f64::consts::FRAC_1_SQRT_2;
    assert!((mean_ratio / target - 1.0).abs() < 0.2, "{ratios:?}");
}

#[test]
fn common_random_numbers_across_algorithms() {
    // UC-ApSel with a single subnetwork is the same partition as UCR-ApSel, so
    // identical layouts must give identical rows apart from the name.
    let base = ExperimentConfig { m: 1, ..small(3) };
    let cfg = ExperimentConfig {
        sweep: Some(Sweep::new(
            SweepParameter::Algorithm,
            &["ucr_apsel", "uc_apsel"],
        )),
        ..base
    };
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows[0].mean_ee, rows[1].mean_ee);
    assert_eq!(rows[0].mean_min_rate, rows[1].mean_min_rate);
}

#[test]
fn sweeping_k_keeps_user_positions_nested() {
    let cfg = ExperimentConfig {
        algorithm: Algorithm::ApCentric,
        sweep: Some(Sweep::new(SweepParameter::K, &[10, 20])),
        ..small(4)
    };
    let runs = run_sweep_detailed(&cfg).unwrap();
    assert_eq!(runs.len(), 2);
    assert_eq!(runs[0].result.k, 10);
    assert_eq!(runs[1].result.k, 20);
    // all APs stay on for the baseline
    assert!(runs
        .iter()
        .all(|r| r.layouts.iter().all(|o| o.active_aps == 60)));
}

#[test]
fn shadowing_sweep_changes_results() {
    let cfg = ExperimentConfig {
        sweep: Some(Sweep::new(SweepParameter::SigmaShDb, &[0.0, 8.0])),
        ..small(9)
    };
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows[1].sigma_sh_db, 8.0);
    assert_ne!(rows[0].mean_ee, rows[1].mean_ee);
}

#[test]
fn lambda_sweep_emit_and_reload() {
    let values: Vec<String> = (0..10)
        .map(|i| format!("{:.1}", 1.1 + 0.1 * i as f64))
        .collect();
    let cfg = ExperimentConfig {
        l: 60,
        sweep: Some(Sweep {
            parameter: SweepParameter::Lambda,
            values,
        }),
        ..small(1)
    };
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.master_seed == 1 && r.n_layouts == 10));
    let dir = tempfile::tempdir().unwrap();
    for format in [OutputFormat::Csv, OutputFormat::Json] {
        let path = dir.path().join(format!("rows.{format}"));
        emit_results(&rows, format, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        if format == OutputFormat::Csv {
            assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
            assert_eq!(text.lines().count(), 11);
        }
        let back = parse_results(&text, format).unwrap();
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.experiment_id, b.experiment_id);
            assert!((a.mean_ee - b.mean_ee).abs() <= 5e-9 * a.mean_ee.abs());
            assert!((a.mean_sum_rate - b.mean_sum_rate).abs() <= 5e-9 * a.mean_sum_rate.abs());
            assert_eq!(a.lambda_star.is_some(), b.lambda_star.is_some());
        }
    }
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.cfg");
    std::fs::write(
        &path,
        "geometry.K = 20\ngeometry.L = 60\nnetworking.M = 2\nmontecarlo.n_layouts = 3\nmontecarlo.n_fading_draws = 1\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&path).unwrap();
    let r = run_point(&cfg).unwrap();
    assert_eq!((r.k, r.l, r.m, r.n_layouts), (20, 60, 2, 3));
    assert!(r.bound_ee_exact.is_some() && r.lambda_star.is_some());
    assert!(matches!(
        ExperimentConfig::load(dir.path().join("missing.cfg")),
        Err(Error::Config(_))
    ));
}
