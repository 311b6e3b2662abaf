use ndarray::Array2;
use proptest::prelude::*;

use bregnmf::divergence::{BetaParam, Divergence, Family, GeneratorFamily};
use bregnmf::io::{self, CsvOptions};
use bregnmf::matrix::{FactorPair, NonNegMatrix};
use bregnmf::nmf::{
    mu_update_h, mu_update_w, objective, sbcd_sweep, seeded_rng, solve, uniform_matrix, Algorithm,
    SbcdState, SolverConfig,
};
use bregnmf::{Error, DEFAULT_EPS_FLOOR};

fn std_beta(b: f64) -> BetaParam {
    BetaParam::standard(b).unwrap()
}

fn random(rows: usize, cols: usize, seed: u64) -> NonNegMatrix {
    NonNegMatrix::new(uniform_matrix(rows, cols, &mut seeded_rng(seed))).unwrap()
}

fn all_at_least(m: &NonNegMatrix, floor: f64) -> bool {
    m.as_array().iter().all(|&v| v.is_finite() && v >= floor)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Factors stay finite and above the floor across the whole β grid,
    // including data with tiny entries.
    #[test]
    fn mu_updates_keep_factors_in_domain(
        seed in 0u64..1000,
        b in prop::sample::select(vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0]),
        family in prop::sample::select(vec![Family::A, Family::B]),
        tiny in any::<bool>(),
    ) {
        let mut v = uniform_matrix(6, 5, &mut seeded_rng(seed));
        if tiny {
            v.mapv_inplace(|x| x * 1e-6);
        }
        let v = NonNegMatrix::new(v).unwrap();
        let g = GeneratorFamily::new(family, std_beta(b));
        let mut w = random(6, 2, seed + 1);
        let mut h = random(2, 5, seed + 2);
        for _ in 0..10 {
            h = mu_update_h(&v, &w, &h, &g).unwrap();
            w = mu_update_w(&v, &w, &h, &g).unwrap();
            prop_assert!(all_at_least(&w, DEFAULT_EPS_FLOOR));
            prop_assert!(all_at_least(&h, DEFAULT_EPS_FLOOR));
        }
    }

    // With the quadratic generator every SBCD sweep is an exact block
    // minimization, so the objective cannot go up.
    #[test]
    fn sbcd_is_monotone_for_quadratic_generators(
        seed in 0u64..1000,
        family in prop::sample::select(vec![Family::A, Family::B]),
        rank in 1usize..4,
    ) {
        let v = random(7, 6, seed);
        let d = Divergence::Bregman(GeneratorFamily::new(family, std_beta(2.0)));
        let mut factors = FactorPair::new(random(7, rank, seed + 7), random(rank, 6, seed + 8)).unwrap();
        let mut state = SbcdState::new(&v, &factors, &d, DEFAULT_EPS_FLOOR).unwrap();
        let mut prev = objective(&v, &factors, &d).unwrap();
        for _ in 0..15 {
            sbcd_sweep(&v, &mut factors, &d, &mut state, DEFAULT_EPS_FLOOR).unwrap();
            let cur = objective(&v, &factors, &d).unwrap();
            prop_assert!(cur <= prev * (1.0 + 1e-12), "{} -> {}", prev, cur);
            prev = cur;
        }
    }

    #[test]
    fn csv_export_round_trips(seed in 0u64..1000, rows in 1usize..8, cols in 1usize..8) {
        let m = random(rows, cols, seed);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        io::write_matrix_csv(&m, &path, b';').unwrap();
        let opts = CsvOptions { delimiter: b';', ..CsvOptions::default() };
        let back = io::load_csv(&path, &opts).unwrap();
        prop_assert_eq!(back.matrix, m);
        prop_assert_eq!(back.provenance.floor_count, 0);
    }
}

#[test]
fn solver_trajectory_is_well_formed() {
    let (data, _) = io::gen_synthetic(9, 7, 2, 3, Some(0.05)).unwrap();
    for algorithm in [Algorithm::MuBeta, Algorithm::MuBregman, Algorithm::Sbcd] {
        let d = match algorithm {
            Algorithm::MuBregman => {
                Divergence::Bregman(GeneratorFamily::new(Family::B, std_beta(1.0)))
            }
            _ => Divergence::Beta(std_beta(1.0)),
        };
        let config = SolverConfig::new(2, d)
            .with_algorithm(algorithm)
            .with_max_iters(300);
        let report = solve(&data.matrix, &config).unwrap();
        let iters: Vec<_> = report.trajectory.iter().map(|p| p.0).collect();
        assert_eq!(iters, (0..=report.iterations_run).collect::<Vec<_>>());
        assert!(report.final_objective() < report.initial_objective());
        assert_eq!(report.factors.product_shape(), (9, 7));
        assert!(all_at_least(report.factors.w(), DEFAULT_EPS_FLOOR));
        assert!(all_at_least(report.factors.h(), DEFAULT_EPS_FLOOR));
    }
}

#[test]
fn solver_stops_on_relative_tolerance() {
    let (data, _) = io::gen_synthetic(9, 7, 2, 4, Some(0.2)).unwrap();
    let config = SolverConfig::new(2, Divergence::Beta(std_beta(2.0))).with_rel_tol(1e-3);
    let report = solve(&data.matrix, &config).unwrap();
    assert!(report.converged);
    assert!(report.iterations_run < config.max_iters);
    let n = report.trajectory.len();
    let (prev, last) = (report.trajectory[n - 2].1, report.trajectory[n - 1].1);
    assert!((prev - last).abs() / prev < 1e-3);
}

#[test]
fn solver_rejects_rank_above_dimensions() {
    let v = random(3, 5, 0);
    let err = solve(&v, &SolverConfig::new(4, Divergence::Beta(std_beta(1.0)))).unwrap_err();
    assert!(matches!(err, Error::InvalidRank { rank: 4, max: 3 }));
}

#[test]
fn normalized_columns_preserve_product() {
    let (data, _) = io::gen_synthetic(6, 6, 2, 8, None).unwrap();
    let base = SolverConfig::new(2, Divergence::Beta(std_beta(2.0))).with_max_iters(50);
    let plain = solve(&data.matrix, &base).unwrap();
    let normalized = solve(
        &data.matrix,
        &SolverConfig {
            normalize_columns: true,
            ..base
        },
    )
    .unwrap();
    let diff: Array2<f64> = plain.factors.product() - normalized.factors.product();
    assert!(diff.iter().all(|d| d.abs() < 1e-12));
    for col in normalized.factors.w().as_array().columns() {
        assert!((col.iter().fold(0.0_f64, |m, &v| m.max(v)) - 1.0).abs() < 1e-12);
    }
}
