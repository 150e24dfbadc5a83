use pareto_records::record::{records_by_scan, run_trajectory, RecordStack};
use proptest::collection::hash_set;
use proptest::prelude::*;

/// Distinct finite values in random order.
fn distinct_values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    hash_set(any::<u32>(), 1..=max_len)
        .prop_map(|s| s.into_iter().map(|v| v as f64 / u32::MAX as f64).collect::<Vec<_>>())
        .prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn stack_invariants_hold_after_every_step(values in distinct_values(200)) {
        let mut stack = RecordStack::new();
        for &v in &values {
            let before = stack.len();
            let broken = stack.push(v).unwrap();
            prop_assert_eq!(stack.len(), before + 1 - broken);
            prop_assert!(stack.check_invariants().is_ok());
        }
    }

    #[test]
    fn scan_matches_stack(values in distinct_values(200)) {
        let stats = run_trajectory(&values).unwrap();
        prop_assert_eq!(records_by_scan(&values).unwrap(), stats.final_records);
    }

    #[test]
    fn count_identities(values in distinct_values(200)) {
        let s = run_trajectory(&values).unwrap();
        prop_assert_eq!(s.r_path[0], 1);
        for t in 1..=s.n {
            prop_assert_eq!(s.r_path[t] + s.b_path[t - 1], s.r_path[t - 1] + 1);
        }
        prop_assert_eq!(s.total_broken(), s.n + 1 - s.final_count());
        // Each entry is pushed once and popped at most once.
        prop_assert!(s.total_broken() <= s.n);
    }

    #[test]
    fn rank_and_monotone_map_invariance(values in distinct_values(120)) {
        let s = run_trajectory(&values).unwrap();
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let mut ranks = vec![0u32; values.len()];
        for (rank, &i) in order.iter().enumerate() {
            ranks[i] = rank as u32;
        }
        let by_rank = run_trajectory(&ranks).unwrap();
        let mapped: Vec<f64> = values.iter().map(|v| (3.0 * v).exp() - 7.0).collect();
        let by_map = run_trajectory(&mapped).unwrap();
        prop_assert_eq!(&s.b_path, &by_rank.b_path);
        prop_assert_eq!(&s.r_path, &by_rank.r_path);
        prop_assert_eq!(&s.b_path, &by_map.b_path);
        prop_assert_eq!(&s.r_path, &by_map.r_path);
        prop_assert!(s.final_records.indices().eq(by_rank.final_records.indices()));
    }

    #[test]
    fn ties_are_always_reported(mut values in distinct_values(50), dup in any::<prop::sample::Index>()) {
        let v = values[dup.index(values.len())];
        values.push(v);
        prop_assert!(run_trajectory(&values).is_err());
        prop_assert!(records_by_scan(&values).is_err());
    }
}
