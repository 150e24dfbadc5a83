//! The enumeration oracle against the closed forms and against itself.

use num_traits::{One, Zero};
use pareto_records::exact::{
    joint_tail_prob, joint_tail_prob_fast, prob_b0, prob_b1, prob_b1_lastrecord, telescoping_sum,
    ExactRational,
};
use pareto_records::oracle::{oracle_joint, oracle_pmf_b, oracle_pmf_r, PermOracle};
use pareto_records::record::run_trajectory;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn harmonic(m: u64) -> ExactRational {
    (1..=m).fold(ExactRational::zero(), |a, j| a + ExactRational::new(1.into(), j.into()))
}

#[test]
fn k0_mass_is_half() {
    for n in 1..=8 {
        assert_eq!(oracle_pmf_b(n).unwrap().get(0), prob_b0(n as u64).unwrap());
    }
}

#[test]
fn tails_match_both_sum_routes() {
    for n in 2..=8usize {
        let joint = oracle_joint(n).unwrap();
        assert_eq!(joint.total(), ExactRational::one());
        for k in 1..=4.min(n - 1) {
            let (n64, k64) = (n as u64, k as u64);
            let reference = joint_tail_prob(n64, k64).unwrap();
            assert_eq!(reference, joint_tail_prob_fast(n64, k64).unwrap());
            assert_eq!(reference, joint.tail_mass(k), "n={n} k={k}");
        }
    }
}

#[test]
fn single_break_assembly() {
    for n in 2..=8usize {
        let joint = oracle_joint(n).unwrap();
        assert_eq!(joint.get(1, 1), prob_b1_lastrecord(n as u64).unwrap());
        let assembled =
            prob_b1_lastrecord(n as u64).unwrap() + telescoping_sum(n as u64 - 1).unwrap();
        assert_eq!(assembled, oracle_pmf_b(n).unwrap().get(1));
        assert_eq!(assembled, prob_b1(n as u64).unwrap());
    }
}

#[test]
fn record_count_mean_is_harmonic() {
    for n in 0..=8usize {
        assert_eq!(oracle_pmf_r(n).unwrap().mean(), harmonic(n as u64 + 1), "n={n}");
    }
}

#[test]
fn r_support() {
    for n in 0..=8usize {
        let pmf = oracle_pmf_r(n).unwrap();
        assert!(pmf.support().all(|r| (1..=n + 1).contains(&r)));
    }
}

#[test]
fn lifted_cap_reaches_ten() {
    let oracle = PermOracle::with_cap(10).unwrap();
    let pmf = oracle.pmf_b(10).unwrap();
    assert_eq!(pmf.total(), ExactRational::one());
    assert_eq!(pmf.get(0), ExactRational::new(1.into(), 2.into()));
    assert_eq!(pmf.get(1), prob_b1(10).unwrap());
}

/// Ranks and sampled reals give the same law of `B_n` once each real sample
/// is reduced to its ordering.
#[test]
fn sampled_reals_reproduce_rank_enumeration() {
    let n = 4usize;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut hits = std::collections::HashMap::new();
    for _ in 0..20_000 {
        let values: Vec<f64> = (0..=n).map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64).collect();
        let stats = run_trajectory(&values).unwrap();
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let mut ranks = vec![0u8; n + 1];
        for (r, &i) in order.iter().enumerate() {
            ranks[i] = r as u8;
        }
        let by_rank = run_trajectory(&ranks).unwrap();
        assert_eq!(stats.b_path, by_rank.b_path);
        hits.insert(ranks, by_rank.b_path[n - 1]);
    }
    // Every distinct ordering seen maps to one B_n; their tallies agree with
    // the enumeration weights when all 120 orderings are covered.
    assert_eq!(hits.len(), 120);
    let pmf = oracle_pmf_b(n).unwrap();
    let mut by_orderings = vec![0u64; n + 1];
    hits.values().for_each(|&b| by_orderings[b] += 1);
    for (k, &c) in by_orderings.iter().enumerate() {
        assert_eq!(ExactRational::new(c.into(), 120.into()), pmf.get(k));
    }
}
