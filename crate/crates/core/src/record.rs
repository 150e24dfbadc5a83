//! Streaming maintenance of the current-record set.
//!
//! At time `n` the current records are the pairs `(i, x_i)`, `i <= n`, that no
//! later observation dominates, i.e. the classical upper records of the
//! reversed sequence `x_n, ..., x_0`. Kept oldest first, their values are
//! strictly decreasing, so a new observation removes a suffix of the stack:
//! exactly the entries whose value is below it. The size of that suffix is the
//! number of records broken at this step.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecordEntry<V> {
    pub index: usize,
    pub value: V,
}

/// Current records, oldest first.
///
/// Indices strictly increase and values strictly decrease along `entries`;
/// the last entry is always the newest observation.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordStack<V> {
    entries: Vec<RecordEntry<V>>,
    observed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult<V> {
    pub broken: usize,
    pub stack: RecordStack<V>,
}

impl<V> Default for RecordStack<V> {
    fn default() -> Self {
        Self {
            entries: Vec::new(),
            observed: 0,
        }
    }
}

impl<V: PartialOrd + Copy> RecordStack<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            entries: Vec::with_capacity(capacity),
            observed: 0,
        }
    }

    /// Number of current records.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Index of the latest observation, `None` before the first one.
    pub fn time(&self) -> Option<usize> {
        self.observed.checked_sub(1)
    }

    /// Number of observations pushed so far.
    pub fn observed(&self) -> usize {
        self.observed
    }

    pub fn entries(&self) -> &[RecordEntry<V>] {
        &self.entries
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.index)
    }

    pub fn values(&self) -> impl Iterator<Item = V> + '_ {
        self.entries.iter().map(|e| e.value)
    }

    /// Forget every observation, keeping the allocation.
    pub fn clear(&mut self) {
        self.entries.clear();
        self.observed = 0;
    }

    /// Observe the next value and return how many records it broke.
    ///
    /// On error the stack is left untouched.
    pub fn push(&mut self, value: V) -> Result<usize> {
        let index = self.observed;
        let mut keep = self.entries.len();
        while keep > 0 {
            let top = &self.entries[keep - 1];
            match top.value.partial_cmp(&value) {
                Some(Ordering::Less) => keep -= 1,
                Some(Ordering::Greater) => break,
                Some(Ordering::Equal) => {
                    return Err(Error::Tie {
                        first: top.index,
                        second: index,
                    })
                }
                None => {
                    let bad = if value.partial_cmp(&value).is_none() {
                        index
                    } else {
                        top.index
                    };
                    return Err(Error::Incomparable { index: bad });
                }
            }
        }
        if keep == 0 && value.partial_cmp(&value).is_none() {
            return Err(Error::Incomparable { index });
        }
        let broken = self.entries.len() - keep;
        self.entries.truncate(keep);
        self.entries.push(RecordEntry { index, value });
        self.observed += 1;
        Ok(broken)
    }

    /// Rebuild a stack from its entries, checking the ordering invariants.
    pub fn from_entries(entries: Vec<RecordEntry<V>>, observed: usize) -> Result<Self> {
        let stack = Self { entries, observed };
        stack.check_invariants()?;
        Ok(stack)
    }

    /// Verify strictly increasing indices, strictly decreasing values, and
    /// that the newest observation is the last entry.
    pub fn check_invariants(&self) -> Result<()> {
        for pair in self.entries.windows(2) {
            if pair[0].index >= pair[1].index {
                return Err(Error::domain(format!(
                    "record indices not increasing at {} -> {}",
                    pair[0].index, pair[1].index
                )));
            }
            if pair[0].value.partial_cmp(&pair[1].value) != Some(Ordering::Greater) {
                return Err(Error::domain(format!(
                    "record values not decreasing at indices {} -> {}",
                    pair[0].index, pair[1].index
                )));
            }
        }
        match (self.entries.last(), self.time()) {
            (None, None) => Ok(()),
            (Some(last), Some(t)) if last.index == t => Ok(()),
            _ => Err(Error::domain("newest observation is not the last record")),
        }
    }
}

/// Functional form of [`RecordStack::push`].
pub fn step<V: PartialOrd + Copy>(mut stack: RecordStack<V>, value: V) -> Result<StepResult<V>> {
    let broken = stack.push(value)?;
    Ok(StepResult { broken, stack })
}

/// Per-run summary of a full trajectory `x_0, ..., x_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats<V> {
    /// Final time (number of observations minus one).
    pub n: usize,
    /// `R_t` for `t = 0..=n`.
    pub r_path: Vec<usize>,
    /// `B_t` for `t = 1..=n`.
    pub b_path: Vec<usize>,
    pub final_records: RecordStack<V>,
}

impl<V> TrajectoryStats<V> {
    pub fn total_broken(&self) -> usize {
        self.b_path.iter().sum()
    }

    pub fn final_count(&self) -> usize {
        *self.r_path.last().expect("trajectory has at least one point")
    }

    /// `B_t` at time `t >= 1`.
    pub fn broken_at(&self, t: usize) -> Option<usize> {
        t.checked_sub(1).and_then(|i| self.b_path.get(i).copied())
    }
}

/// Reject inputs containing a tie or an unorderable value.
pub fn check_distinct<V: PartialOrd + Copy>(values: &[V]) -> Result<()> {
    if let Some(index) = values.iter().position(|v| v.partial_cmp(v).is_none()) {
        return Err(Error::Incomparable { index });
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    for w in order.windows(2) {
        if values[w[0]].partial_cmp(&values[w[1]]) == Some(Ordering::Equal) {
            let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::Tie { first, second });
        }
    }
    Ok(())
}

/// Run the record stack over a whole realization.
pub fn run_trajectory<V: PartialOrd + Copy>(values: &[V]) -> Result<TrajectoryStats<V>> {
    if values.is_empty() {
        return Err(Error::domain("trajectory needs at least one observation"));
    }
    check_distinct(values)?;
    let mut stack = RecordStack::with_capacity(values.len());
    let mut r_path = Vec::with_capacity(values.len());
    let mut b_path = Vec::with_capacity(values.len() - 1);
    for (t, &v) in values.iter().enumerate() {
        let broken = stack.push(v)?;
        if t > 0 {
            b_path.push(broken);
        }
        r_path.push(stack.len());
    }
    Ok(TrajectoryStats {
        n: values.len() - 1,
        r_path,
        b_path,
        final_records: stack,
    })
}

/// Current records by the quadratic definition: `(i, x_i)` survives iff no
/// `j > i` has `x_j >= x_i`.
pub fn records_by_scan<V: PartialOrd + Copy>(values: &[V]) -> Result<RecordStack<V>> {
    check_distinct(values)?;
    let entries = values
        .iter()
        .enumerate()
        .filter(|&(i, x)| !values.iter().enumerate().any(|(j, y)| j > i && y >= x))
        .map(|(index, &value)| RecordEntry { index, value })
        .collect();
    RecordStack::from_entries(entries, values.len())
}
