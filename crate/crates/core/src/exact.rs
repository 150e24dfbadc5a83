//! Exact finite-n probabilities for the number of broken records.
//!
//! Notation: `i0 = n - 1` is the index of the newest record at time `n - 1`,
//! and `i0 > i_1 > ... > i_k >= 0` are the indices of the next `k` records
//! going back in time. Exactly `k` records break at time `n` while at least
//! `k + 1` records exist iff the newest value lands between the values at
//! `i_{k-1}` and `i_k`; for one such index tuple that has probability
//!
//! ```text
//! prod_{p=1}^{k-1} 1/(i0 - i_p) * 1/(m (m+1) (m+2)),   m = i0 - i_k.
//! ```

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Reduced arbitrary-precision fraction with positive denominator.
pub type ExactRational = BigRational;

/// Largest number of index tuples the literal nested sum will visit.
pub const REFERENCE_TERM_LIMIT: u128 = 1_000_000;

fn int(v: u64) -> BigInt {
    BigInt::from(v)
}

fn recip(v: u64) -> ExactRational {
    ExactRational::new(BigInt::one(), int(v))
}

/// `1 / (m (m+1) (m+2))`.
fn recip_cubic(m: u64) -> ExactRational {
    ExactRational::new(BigInt::one(), int(m) * int(m + 1) * int(m + 2))
}

/// Probability mass function over break or record counts.
///
/// `P = ExactRational` is the exact mode, `P = f64` the float mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<P = ExactRational> {
    pub n: usize,
    pub mass: BTreeMap<usize, P>,
}

impl<P> Pmf<P> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            mass: BTreeMap::new(),
        }
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.mass.keys().copied()
    }
}

impl Pmf<ExactRational> {
    pub fn get(&self, k: usize) -> ExactRational {
        self.mass.get(&k).cloned().unwrap_or_else(ExactRational::zero)
    }

    pub fn total(&self) -> ExactRational {
        self.mass.values().fold(ExactRational::zero(), |acc, p| acc + p)
    }

    pub fn mean(&self) -> ExactRational {
        self.mass
            .iter()
            .fold(ExactRational::zero(), |acc, (&k, p)| acc + p * int(k as u64))
    }

    /// Masses as a dense vector over `0..=max support`.
    pub fn dense(&self) -> Vec<ExactRational> {
        let len = self.mass.keys().next_back().map_or(0, |&k| k + 1);
        (0..len).map(|k| self.get(k)).collect()
    }

    pub fn to_f64(&self) -> Pmf<f64> {
        Pmf {
            n: self.n,
            mass: self
                .mass
                .iter()
                .map(|(&k, p)| (k, p.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }
}

impl Pmf<f64> {
    pub fn get(&self, k: usize) -> f64 {
        self.mass.get(&k).copied().unwrap_or(0.0)
    }
}

/// Admissible index tuple `(i_1, ..., i_j)` with `i0 > i_1 > ... > i_j >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexTuple {
    i0: u64,
    indices: Vec<u64>,
}

impl IndexTuple {
    pub fn new(i0: u64, indices: Vec<u64>) -> Result<Self> {
        let mut prev = i0;
        for &i in &indices {
            if i >= prev {
                return Err(Error::domain(format!(
                    "index tuple must strictly decrease below i0 = {i0}: {indices:?}"
                )));
            }
            prev = i;
        }
        Ok(Self { i0, indices })
    }

    pub fn i0(&self) -> u64 {
        self.i0
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// `sum_{i=1}^{m} 1/(i (i+1) (i+2))` via `1/4 - 1/(2 (m+1) (m+2))`.
pub fn telescoping_sum(m: u64) -> Result<ExactRational> {
    if m < 1 {
        return Err(Error::domain("telescoping sum needs m >= 1"));
    }
    Ok(telescoping_closed(m))
}

/// Closed form, also valid at `m = 0` (empty sum).
fn telescoping_closed(m: u64) -> ExactRational {
    ExactRational::new(BigInt::one(), int(4))
        - ExactRational::new(BigInt::one(), int(2) * int(m + 1) * int(m + 2))
}

/// `P[B_n = 0] = P[X_n < X_{n-1}] = 1/2`.
pub fn prob_b0(n: u64) -> Result<ExactRational> {
    if n < 1 {
        return Err(Error::domain("B_n is defined for n >= 1"));
    }
    Ok(ExactRational::new(BigInt::one(), int(2)))
}

/// `P[B_n = 1, R_{n-1} = 1] = 1/(n (n+1))`: `X_{n-1}` is the second largest
/// and `X_n` the largest of the `n + 1` values.
pub fn prob_b1_lastrecord(n: u64) -> Result<ExactRational> {
    if n < 1 {
        return Err(Error::domain("B_n is defined for n >= 1"));
    }
    Ok(ExactRational::new(BigInt::one(), int(n) * int(n + 1)))
}

/// `P[B_n = 1, R_{n-1} >= 2, I_1 = i] = 1/((n-i-1)(n-i)(n-i+1))`.
pub fn single_break_term(n: u64, i: u64) -> Result<ExactRational> {
    if n < 2 || i > n - 2 {
        return Err(Error::domain(format!(
            "last unbroken index {i} outside 0..={}",
            n as i64 - 2
        )));
    }
    Ok(recip_cubic(n - i - 1))
}

/// Full `P[B_n = 1] = 1/(n(n+1)) + sum_{j=1}^{n-1} 1/(j(j+1)(j+2))`, which
/// simplifies to `1/4 + 1/(2 n (n+1))`.
pub fn prob_b1(n: u64) -> Result<ExactRational> {
    Ok(prob_b1_lastrecord(n)? + telescoping_closed(n - 1))
}

/// Probability that the records at `i0, i_1, ..., i_k` are exactly the ones
/// involved: `i0..i_{k-1}` break and `i_k` survives.
pub fn p_term(idx: &IndexTuple) -> Result<ExactRational> {
    let (last, inner) = idx
        .indices
        .split_last()
        .ok_or_else(|| Error::domain("index tuple must have k >= 1 entries"))?;
    let product = inner
        .iter()
        .fold(ExactRational::one(), |acc, &i| acc * recip(idx.i0 - i));
    Ok(product * recip_cubic(idx.i0 - last))
}

fn check_tail_args(n: u64, k: u64) -> Result<bool> {
    if n < 1 {
        return Err(Error::domain("B_n is defined for n >= 1"));
    }
    if k < 1 {
        return Err(Error::domain("tail probability needs k >= 1"));
    }
    Ok(k < n)
}

/// `C(n, k)` saturating at `u128::MAX`.
fn binomial_saturating(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = match acc.checked_mul((n - j) as u128) {
            Some(v) => v / (j as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `P[B_n = k, R_{n-1} >= k+1]` as the literal sum of [`p_term`] over every
/// admissible index tuple. Refuses more than [`REFERENCE_TERM_LIMIT`] tuples.
pub fn joint_tail_prob(n: u64, k: u64) -> Result<ExactRational> {
    joint_tail_prob_limited(n, k, REFERENCE_TERM_LIMIT)
}

pub fn joint_tail_prob_limited(n: u64, k: u64, limit: u128) -> Result<ExactRational> {
    if !check_tail_args(n, k)? {
        return Ok(ExactRational::zero());
    }
    let i0 = n - 1;
    let terms = binomial_saturating(i0, k);
    if terms > limit {
        return Err(Error::Capacity {
            what: "index tuples in the reference sum",
            requested: terms,
            limit,
        });
    }
    let k = k as usize;
    // Iterate i_1 > i_2 > ... > i_k >= 0 as an odometer, innermost last.
    // Start from the smallest tuple (k-1, ..., 1, 0).
    let mut idx: Vec<u64> = (0..k as u64).rev().collect();
    let mut sum = ExactRational::zero();
    loop {
        sum += p_term(&IndexTuple {
            i0,
            indices: idx.clone(),
        })?;
        // Advance: bump the deepest position that still has room.
        let mut p = k;
        loop {
            if p == 0 {
                return Ok(sum);
            }
            p -= 1;
            let ceiling = if p == 0 { i0 } else { idx[p - 1] };
            if idx[p] + 1 < ceiling {
                idx[p] += 1;
                for q in p + 1..k {
                    idx[q] = (k - 1 - q) as u64;
                }
                break;
            }
        }
    }
}

/// Same value as [`joint_tail_prob`] by a suffix-sum recursion over the
/// index positions, `O(n k)` exact additions.
pub fn joint_tail_prob_fast(n: u64, k: u64) -> Result<ExactRational> {
    if !check_tail_args(n, k)? {
        return Ok(ExactRational::zero());
    }
    Ok(tail_recursion(
        n - 1,
        k as usize,
        ExactRational::zero(),
        recip,
        recip_cubic,
    ))
}

/// Float evaluation of the tail probability with compensated summation, for
/// horizons where exact denominators become unwieldy.
pub fn joint_tail_prob_f64(n: u64, k: u64) -> Result<f64> {
    if !check_tail_args(n, k)? {
        return Ok(0.0);
    }
    Ok(tail_recursion(
        n - 1,
        k as usize,
        Neumaier::default(),
        |v| Neumaier::from(1.0 / v as f64),
        |m| {
            let m = m as f64;
            Neumaier::from(1.0 / (m * (m + 1.0) * (m + 2.0)))
        },
    )
    .value())
}

/// Shared recursion. `weight[i]` accumulates, for `i_p = i`, the sum over
/// admissible prefixes `i_1 > ... > i_p = i` of `prod 1/(i0 - i_q)`.
fn tail_recursion<T, R, C>(i0: u64, k: usize, zero: T, recip: R, cubic: C) -> T
where
    T: Clone + for<'a> std::ops::AddAssign<&'a T> + std::ops::Mul<T, Output = T>,
    R: Fn(u64) -> T,
    C: Fn(u64) -> T,
{
    let len = i0 as usize;
    // suffix[i] = sum_{j >= i} weight[j]; for the first position every index
    // below i0 is reachable with an empty prefix, so suffix is "1".
    let mut suffix: Option<Vec<T>> = None;
    for _ in 1..k {
        let mut weight = Vec::with_capacity(len);
        for i in 0..len {
            let w = recip(i0 - i as u64);
            weight.push(match &suffix {
                None => w,
                Some(s) => w * s[i + 1].clone(),
            });
        }
        suffix = Some(suffix_sums(weight, zero.clone()));
    }
    let mut total = zero;
    for i in 0..len {
        let c = cubic(i0 - i as u64);
        let term = match &suffix {
            None => c,
            Some(s) => c * s[i + 1].clone(),
        };
        total += &term;
    }
    total
}

/// `out[i] = sum_{j >= i} v[j]`, with `out[v.len()] = 0`.
fn suffix_sums<T>(v: Vec<T>, zero: T) -> Vec<T>
where
    T: Clone + for<'a> std::ops::AddAssign<&'a T>,
{
    let mut out = vec![zero; v.len() + 1];
    for i in (0..v.len()).rev() {
        let mut acc = out[i + 1].clone();
        acc += &v[i];
        out[i] = acc;
    }
    out
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
}

impl From<f64> for Neumaier {
    fn from(x: f64) -> Self {
        Self { sum: x, comp: 0.0 }
    }
}

impl std::ops::AddAssign<&Neumaier> for Neumaier {
    fn add_assign(&mut self, rhs: &Neumaier) {
        self.add(rhs.sum);
        self.add(rhs.comp);
    }
}

impl std::ops::Mul for Neumaier {
    type Output = Neumaier;
    fn mul(self, rhs: Neumaier) -> Neumaier {
        Neumaier::from(self.value() * rhs.value())
    }
}

impl std::iter::Sum<f64> for Neumaier {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::default();
        iter.for_each(|x| acc.add(x));
        acc
    }
}

/// `2^{-(k+1)}`, the limiting mass at `k`.
pub fn geometric_limit(k: u32) -> ExactRational {
    ExactRational::new(BigInt::one(), BigInt::one() << (k + 1))
}

/// Upper bound `(1 + ln(n-1))^{k-1} / (2 n (n+1))` on the nonnegative term
/// dropped at one reduction stage of the tail sum.
pub fn remainder_bound(n: u64, k: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("remainder bound needs n >= 2"));
    }
    if k < 2 {
        return Err(Error::domain("remainder bound needs k >= 2"));
    }
    let n = n as f64;
    Ok((1.0 + (n - 1.0).ln()).powi(k as i32 - 1) / (2.0 * n * (n + 1.0)))
}
