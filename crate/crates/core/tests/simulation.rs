//! Monte Carlo against exact laws. Tolerances are a few standard errors at
//! the stated trial counts.

use num_traits::ToPrimitive;
use pareto_records::gof::{fit, geometric_pooled, pooled_exact};
use pareto_records::montecarlo::{simulate, simulate_b, simulate_r, SimConfig};
use pareto_records::oracle::oracle_pmf_b;

const MILLION: u64 = 1_000_000;

#[test]
fn b1_is_a_fair_coin() {
    let out = simulate_b(&SimConfig::new(1, MILLION, 2024)).unwrap();
    assert!((out.b.frequency(0) - 0.5).abs() <= 0.002);
    assert_eq!(out.b.count(0) + out.b.count(1), MILLION);
}

#[test]
fn k0_frequency_within_five_sigma() {
    for (i, n) in [1usize, 2, 5, 17, 64, 300].into_iter().enumerate() {
        let out = simulate_b(&SimConfig::new(n, 200_000, 1000 + i as u64)).unwrap();
        let sigma = (0.25f64 / 200_000.0).sqrt();
        assert!((out.b.frequency(0) - 0.5).abs() <= 5.0 * sigma, "n={n}");
    }
}

#[test]
fn n4_matches_enumeration() {
    let out = simulate_b(&SimConfig::new(4, MILLION, 7)).unwrap();
    let exact = oracle_pmf_b(4).unwrap();
    for k in 0..=4 {
        let p = exact.get(k).to_f64().unwrap();
        assert!((out.b.frequency(k) - p).abs() <= 0.003, "k={k}");
    }
}

#[test]
fn n8_chi_square_against_enumeration() {
    let out = simulate_b(&SimConfig::new(8, MILLION, 8)).unwrap();
    let reference = pooled_exact(&oracle_pmf_b(8).unwrap(), out.b.kmax());
    let f = fit(&out.b, &reference);
    assert!(
        f.chi_square.p_value > 0.001 && f.chi_square.p_value < 0.999,
        "{:?}",
        f.chi_square
    );
}

#[test]
fn record_count_means() {
    let r = simulate_r(&SimConfig::new(3, MILLION, 3)).unwrap();
    assert!((r.mean() - 25.0 / 12.0).abs() <= 0.005);

    let h1001: f64 = (1..=1001).map(|j| 1.0 / j as f64).sum();
    assert!((h1001 - 7.486).abs() < 5e-4);
    let r = simulate_r(&SimConfig::new(1000, 100_000, 1000)).unwrap();
    assert!((r.mean() - h1001).abs() <= 0.05, "mean {}", r.mean());
    assert!(r.mean_std_error() < 0.01);
}

#[test]
fn large_horizon_is_close_to_geometric() {
    let out = simulate_b(&SimConfig::new(2000, MILLION, 2000)).unwrap();
    let f = fit(&out.b, &geometric_pooled(out.b.kmax()));
    assert!(f.total_variation < 0.002, "tv {}", f.total_variation);
}

#[test]
fn checkpoints_at_ten_thousand() {
    let out = simulate(&SimConfig::new(10_000, MILLION, 10_000).with_checkpoints(true)).unwrap();
    let times: Vec<usize> = out.checkpoints.iter().map(|(t, _)| *t).collect();
    assert_eq!(times, vec![2500, 5000, 10_000]);
    for (_, h) in &out.checkpoints {
        assert!((h.frequency(2) - 0.125).abs() < 0.005);
    }
}
