//! Ground-truth laws by running the record stack over every ordering of
//! `n + 1` ranks. The law of `(B_n, R_{n-1}, R_n)` depends only on the
//! relative order of `X_0, ..., X_n`, so each permutation has weight
//! `1/(n+1)!`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{ExactRational, Pmf};
use crate::record::RecordStack;

/// Default enumeration limit (9! permutations).
pub const DEFAULT_CAP: usize = 8;
/// Absolute enumeration limit (11! permutations).
pub const HARD_CAP: usize = 10;

/// Exact joint law of `(B_n, R_{n-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    pub n: usize,
    /// Keyed by `(b, r_prev)`.
    pub mass: BTreeMap<(usize, usize), ExactRational>,
}

impl JointPmf {
    pub fn get(&self, b: usize, r_prev: usize) -> ExactRational {
        self.mass
            .get(&(b, r_prev))
            .cloned()
            .unwrap_or_else(ExactRational::zero)
    }

    pub fn total(&self) -> ExactRational {
        self.mass.values().fold(ExactRational::zero(), |a, p| a + p)
    }

    /// Law of `B_n`.
    pub fn marginal_b(&self) -> Pmf {
        let mut pmf = Pmf::new(self.n);
        for (&(b, _), p) in &self.mass {
            *pmf.mass.entry(b).or_insert_with(ExactRational::zero) += p;
        }
        pmf
    }

    /// `P[B_n = k, R_{n-1} >= k + 1]`.
    pub fn tail_mass(&self, k: usize) -> ExactRational {
        self.mass
            .range((k, k + 1)..=(k, usize::MAX))
            .fold(ExactRational::zero(), |a, (_, p)| a + p)
    }
}

/// Integer tallies from one enumeration pass.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    /// `joint[b][r_prev]`.
    joint: Vec<Vec<u64>>,
    /// `r_now[r]` for `R_n`.
    r_now: Vec<u64>,
    /// Among permutations with `B_n = 1, R_{n-1} >= 2`: counts by `I_1`.
    single_break_by_i1: Vec<u64>,
    permutations: u64,
}

impl Tally {
    fn new(n: usize) -> Self {
        Self {
            joint: vec![vec![0; n + 2]; n + 2],
            r_now: vec![0; n + 2],
            single_break_by_i1: vec![0; n + 1],
            permutations: 0,
        }
    }

    fn merge(mut self, other: &Tally) -> Self {
        for (row, orow) in self.joint.iter_mut().zip(&other.joint) {
            row.iter_mut().zip(orow).for_each(|(a, b)| *a += b);
        }
        self.r_now.iter_mut().zip(&other.r_now).for_each(|(a, b)| *a += b);
        self.single_break_by_i1
            .iter_mut()
            .zip(&other.single_break_by_i1)
            .for_each(|(a, b)| *a += b);
        self.permutations += other.permutations;
        self
    }

    fn observe(&mut self, perm: &[u8], stack: &mut RecordStack<u8>) {
        let n = perm.len() - 1;
        stack.clear();
        for &v in &perm[..n] {
            stack.push(v).expect("ranks are distinct");
        }
        let r_prev = stack.len();
        let i1 = (r_prev >= 2).then(|| stack.entries()[r_prev - 2].index);
        let b = stack.push(perm[n]).expect("ranks are distinct");
        self.joint[b][r_prev] += 1;
        self.r_now[stack.len()] += 1;
        if b == 1 {
            if let Some(i) = i1 {
                self.single_break_by_i1[i] += 1;
            }
        }
        self.permutations += 1;
    }
}

/// Rearrange `a` into the next permutation in lexicographic order; `false`
/// once `a` is the last one.
fn next_permutation(a: &mut [u8]) -> bool {
    let Some(i) = a.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = a.iter().rposition(|&x| x > a[i]).expect("pivot has a successor");
    a.swap(i, j);
    a[i + 1..].reverse();
    true
}

/// All orderings of `0..=n` whose first element is `first`.
fn tally_partition(n: usize, first: u8) -> Tally {
    let mut tally = Tally::new(n);
    let mut stack = RecordStack::with_capacity(n + 1);
    let mut perm: Vec<u8> = std::iter::once(first)
        .chain((0..=n as u8).filter(|&v| v != first))
        .collect();
    loop {
        tally.observe(&perm, &mut stack);
        if !next_permutation(&mut perm[1..]) {
            return tally;
        }
    }
}

fn tally_all(n: usize) -> Tally {
    let firsts: Vec<u8> = (0..=n as u8).collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<Tally> = {
        use rayon::prelude::*;
        firsts.par_iter().map(|&f| tally_partition(n, f)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Tally> = firsts.iter().map(|&f| tally_partition(n, f)).collect();
    parts
        .iter()
        .fold(Tally::new(n), |acc, part| acc.merge(part))
}

fn factorial(n: usize) -> BigInt {
    (1..=n as u64).fold(BigInt::from(1u8), |acc, v| acc * v)
}

/// Exhaustive enumerator with a configurable size cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermOracle {
    cap: usize,
}

impl Default for PermOracle {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP }
    }
}

impl PermOracle {
    pub fn new() -> Self {
        Self::default()
    }

    /// Raise or lower the cap; at most [`HARD_CAP`].
    pub fn with_cap(cap: usize) -> Result<Self> {
        if cap > HARD_CAP {
            return Err(Error::Capacity {
                what: "enumeration cap",
                requested: cap as u128,
                limit: HARD_CAP as u128,
            });
        }
        Ok(Self { cap })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn tally(&self, n: usize, min_n: usize) -> Result<Tally> {
        if n < min_n {
            return Err(Error::domain(format!("oracle needs n >= {min_n}")));
        }
        if n > self.cap {
            return Err(Error::Capacity {
                what: "oracle horizon n",
                requested: n as u128,
                limit: self.cap as u128,
            });
        }
        if n == 0 {
            let mut t = Tally::new(0);
            t.r_now[1] = 1;
            t.permutations = 1;
            return Ok(t);
        }
        Ok(tally_all(n))
    }

    /// Exact law of `B_n`.
    pub fn pmf_b(&self, n: usize) -> Result<Pmf> {
        Ok(self.joint(n)?.marginal_b())
    }

    /// Exact joint law of `(B_n, R_{n-1})`.
    pub fn joint(&self, n: usize) -> Result<JointPmf> {
        let tally = self.tally(n, 1)?;
        let total = factorial(n + 1);
        let mut mass = BTreeMap::new();
        for (b, row) in tally.joint.iter().enumerate() {
            for (r, &c) in row.iter().enumerate() {
                if c > 0 {
                    mass.insert((b, r), ExactRational::new(c.into(), total.clone()));
                }
            }
        }
        Ok(JointPmf { n, mass })
    }

    /// Exact law of `R_n`, `n >= 0`.
    pub fn pmf_r(&self, n: usize) -> Result<Pmf> {
        let tally = self.tally(n, 0)?;
        let total = factorial(n + 1);
        let mut pmf = Pmf::new(n);
        for (r, &c) in tally.r_now.iter().enumerate() {
            if c > 0 {
                pmf.mass.insert(r, ExactRational::new(c.into(), total.clone()));
            }
        }
        Ok(pmf)
    }

    /// `P[B_n = 1, R_{n-1} >= 2, I_1 = i]` for every `i` with nonzero mass.
    pub fn single_break_by_last_unbroken(&self, n: usize) -> Result<BTreeMap<usize, ExactRational>> {
        let tally = self.tally(n, 1)?;
        let total = factorial(n + 1);
        Ok(tally
            .single_break_by_i1
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, ExactRational::new(c.into(), total.clone())))
            .collect())
    }
}

pub fn oracle_pmf_b(n: usize) -> Result<Pmf> {
    PermOracle::new().pmf_b(n)
}

pub fn oracle_joint(n: usize) -> Result<JointPmf> {
    PermOracle::new().joint(n)
}

pub fn oracle_pmf_r(n: usize) -> Result<Pmf> {
    PermOracle::new().pmf_r(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{joint_tail_prob, prob_b1_lastrecord, single_break_term};
    use num_traits::One;

    fn q(p: i64, d: i64) -> ExactRational {
        ExactRational::new(p.into(), d.into())
    }

    fn dense(p: &Pmf) -> Vec<ExactRational> {
        p.dense()
    }

    #[test]
    fn lexicographic_generator_visits_every_permutation() {
        let mut a = [0u8, 1, 2, 3];
        let mut seen = vec![a];
        while next_permutation(&mut a) {
            assert!(seen.last().unwrap() < &a);
            seen.push(a);
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn small_b_laws() {
        assert_eq!(dense(&oracle_pmf_b(1).unwrap()), vec![q(1, 2), q(1, 2)]);
        assert_eq!(
            dense(&oracle_pmf_b(2).unwrap()),
            vec![q(1, 2), q(1, 3), q(1, 6)]
        );
        assert_eq!(
            dense(&oracle_pmf_b(3).unwrap()),
            vec![q(1, 2), q(7, 24), q(1, 6), q(1, 24)]
        );
    }

    #[test]
    fn laws_sum_to_one() {
        for n in 1..=DEFAULT_CAP {
            assert_eq!(oracle_pmf_b(n).unwrap().total(), ExactRational::one());
            assert_eq!(oracle_pmf_r(n).unwrap().total(), ExactRational::one());
            assert_eq!(oracle_pmf_b(n).unwrap().get(0), q(1, 2));
        }
    }

    #[test]
    fn joint_examples() {
        let j = oracle_joint(2).unwrap();
        assert_eq!(j.get(1, 1), q(1, 6));
        assert_eq!(j.get(1, 1), prob_b1_lastrecord(2).unwrap());
        assert_eq!(j.get(1, 2), q(1, 6));
        assert_eq!(j.tail_mass(2), ExactRational::zero());
        assert_eq!(oracle_joint(3).unwrap().tail_mass(2), q(1, 24));
    }

    #[test]
    fn joint_support() {
        for n in 1..=6 {
            let j = oracle_joint(n).unwrap();
            for &(b, r) in j.mass.keys() {
                assert!((1..=n).contains(&r) && b <= r, "n={n} b={b} r={r}");
            }
            assert_eq!(j.marginal_b(), oracle_pmf_b(n).unwrap());
        }
    }

    #[test]
    fn r_laws() {
        assert_eq!(dense(&oracle_pmf_r(0).unwrap()), vec![q(0, 1), q(1, 1)]);
        assert_eq!(
            dense(&oracle_pmf_r(2).unwrap()),
            vec![q(0, 1), q(1, 3), q(1, 2), q(1, 6)]
        );
        assert_eq!(oracle_pmf_r(3).unwrap().mean(), q(25, 12));
    }

    #[test]
    fn tails_agree_with_closed_forms() {
        for n in 2..=7usize {
            let j = oracle_joint(n).unwrap();
            for k in 1..n {
                assert_eq!(j.tail_mass(k), joint_tail_prob(n as u64, k as u64).unwrap());
            }
        }
    }

    #[test]
    fn index_resolved_single_breaks() {
        for n in 2..=7usize {
            let by_i = PermOracle::new().single_break_by_last_unbroken(n).unwrap();
            for i in 0..=n - 2 {
                let mass = by_i.get(&i).cloned().unwrap_or_else(ExactRational::zero);
                assert_eq!(mass, single_break_term(n as u64, i as u64).unwrap());
            }
        }
    }

    #[test]
    fn caps() {
        assert!(matches!(oracle_pmf_b(9), Err(Error::Capacity { .. })));
        assert!(matches!(oracle_pmf_b(0), Err(Error::Domain(_))));
        assert!(PermOracle::with_cap(11).is_err());
        let o = PermOracle::with_cap(9).unwrap();
        assert_eq!(o.pmf_b(9).unwrap().get(0), q(1, 2));
    }
}
