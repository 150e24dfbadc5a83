//! Distances between an empirical histogram and a reference law.
//!
//! All vectors use the layout of [`EmpiricalPmf::frequencies`]: bins
//! `0..=kmax` followed by one bucket pooling everything above `kmax`.

use num_traits::ToPrimitive;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::exact::{geometric_limit, Pmf};
use crate::montecarlo::EmpiricalPmf;

/// Bins whose expected count falls below this are merged toward the head.
pub const MIN_EXPECTED: f64 = 5.0;

/// Geometric(1/2) on `{0, 1, ...}`, truncated at `kmax` with pooled tail.
pub fn geometric_pooled(kmax: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..=kmax)
        .map(|k| geometric_limit(k as u32).to_f64().unwrap())
        .collect();
    // Tail mass above kmax equals the mass at kmax.
    p.push(p[kmax]);
    p
}

/// An exact law in the pooled layout.
pub fn pooled_exact(pmf: &Pmf, kmax: usize) -> Vec<f64> {
    let mut p = vec![0.0; kmax + 2];
    for (&k, m) in &pmf.mass {
        p[k.min(kmax + 1)] += m.to_f64().unwrap();
    }
    p
}

/// `sum |p - q| / 2`; shorter inputs are padded with zeros.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Bins left after merging sparse ones.
    pub bins: usize,
}

/// Pearson chi-square of `counts` against `probs`. Sparse bins
/// (expected count below [`MIN_EXPECTED`]) are merged from the tail inward;
/// an observation in a zero-probability bin gives an infinite statistic.
pub fn chi_square(counts: &[u64], probs: &[f64]) -> ChiSquare {
    let trials: u64 = counts.iter().sum();
    let len = counts.len().max(probs.len());
    let mut obs: Vec<f64> = (0..len).map(|i| counts.get(i).copied().unwrap_or(0) as f64).collect();
    let mut exp: Vec<f64> = (0..len)
        .map(|i| probs.get(i).copied().unwrap_or(0.0) * trials as f64)
        .collect();
    if obs.iter().zip(&exp).any(|(o, e)| *o > 0.0 && *e <= 0.0) {
        return ChiSquare {
            statistic: f64::INFINITY,
            dof: len.saturating_sub(1),
            p_value: 0.0,
            bins: len,
        };
    }
    while exp.len() > 1 && *exp.last().unwrap() < MIN_EXPECTED {
        let (o, e) = (obs.pop().unwrap(), exp.pop().unwrap());
        *obs.last_mut().unwrap() += o;
        *exp.last_mut().unwrap() += e;
    }
    let mut statistic = 0.0;
    let mut bins = 0usize;
    for (o, e) in obs.iter().zip(&exp) {
        if *e > 0.0 {
            statistic += (o - e) * (o - e) / e;
            bins += 1;
        }
    }
    let dof = bins.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).unwrap().sf(statistic)
    };
    ChiSquare {
        statistic,
        dof,
        p_value,
        bins,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub total_variation: f64,
    pub chi_square: ChiSquare,
}

pub fn fit(empirical: &EmpiricalPmf, reference: &[f64]) -> Fit {
    Fit {
        total_variation: total_variation(&empirical.frequencies(), reference),
        chi_square: chi_square(&empirical.binned_counts(), reference),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactRational;

    #[test]
    fn pooled_geometric_sums_to_one() {
        for kmax in 0..20 {
            let s: f64 = geometric_pooled(kmax).iter().sum();
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn tv_of_two_point_law_against_geometric() {
        // {1/2, 1/2} vs {1/2, 1/4, 1/8, ...}: |1/2 - 1/4| + 1/4 tail, halved.
        let mut pmf = Pmf::new(1);
        pmf.mass.insert(0, ExactRational::new(1.into(), 2.into()));
        pmf.mass.insert(1, ExactRational::new(1.into(), 2.into()));
        for kmax in 1..15 {
            let tv = total_variation(&pooled_exact(&pmf, kmax), &geometric_pooled(kmax));
            assert!((tv - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn chi_square_perfect_fit() {
        let c = chi_square(&[500, 250, 250], &[0.5, 0.25, 0.25]);
        assert_eq!(c.statistic, 0.0);
        assert_eq!(c.dof, 2);
        assert!((c.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_known_value() {
        // (60-50)^2/50 + (40-50)^2/50 = 4 with one degree of freedom.
        let c = chi_square(&[60, 40], &[0.5, 0.5]);
        assert!((c.statistic - 4.0).abs() < 1e-12);
        assert!((c.p_value - 0.0455002638963584).abs() < 1e-9);
    }

    #[test]
    fn sparse_tail_is_merged() {
        let c = chi_square(&[50, 47, 2, 1], &[0.5, 0.47, 0.02, 0.01]);
        assert_eq!(c.bins, 2);
    }

    #[test]
    fn impossible_observation() {
        let c = chi_square(&[10, 10, 0], &[1.0, 0.0, 0.0]);
        assert!(c.statistic.is_infinite());
        assert_eq!(c.p_value, 0.0);
    }
}
