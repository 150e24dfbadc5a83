//! Seeded simulation of `B_n` and `R_n`.
//!
//! Every trial owns an independent ChaCha8 stream: the 256-bit key is
//! expanded from the master seed by `ChaCha8Rng::seed_from_u64` (PCG32
//! expansion) and the 64-bit stream id is the trial index. Observations are
//! raw `u64` outputs, i.e. uniforms on a grid of `2^64` levels; only their
//! order matters. Trials are grouped into fixed-size chunks and counts are
//! merged by integer addition, so results do not depend on the worker count.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::{run_trajectory, RecordStack, TrajectoryStats};

pub const GENERATOR_ID: &str =
    "rand_chacha::ChaCha8Rng; key = seed_from_u64(seed); stream = trial index; variate = next_u64";
pub const DEFAULT_KMAX: usize = 12;
/// Trials per scheduling unit.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Time horizon; each trial observes `x_0..=x_n`.
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Break counts above `kmax` share one overflow bucket.
    pub kmax: usize,
    /// Worker threads; 0 means one per available core.
    pub workers: usize,
    /// Also histogram `B_t` at `t` in `{n/4, n/2, n}`.
    pub checkpoints: bool,
}

impl SimConfig {
    pub fn new(n: usize, trials: u64, seed: u64) -> Self {
        Self {
            n,
            trials,
            seed,
            kmax: DEFAULT_KMAX,
            workers: 1,
            checkpoints: false,
        }
    }

    pub fn with_kmax(mut self, kmax: usize) -> Self {
        self.kmax = kmax;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_checkpoints(mut self, on: bool) -> Self {
        self.checkpoints = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("simulation needs at least one trial"));
        }
        Ok(())
    }

    /// Distinct checkpoint times `t >= 1`, ascending.
    pub fn checkpoint_times(&self) -> Vec<usize> {
        if !self.checkpoints {
            return Vec::new();
        }
        let mut t: Vec<usize> = [self.n / 4, self.n / 2, self.n]
            .into_iter()
            .filter(|&t| t >= 1)
            .collect();
        t.dedup();
        t
    }
}

/// Histogram of a count statistic over trials, with the last bucket pooling
/// everything above `kmax`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalPmf {
    pub counts: Vec<u64>,
    pub overflow: u64,
    pub trials: u64,
    /// Exact sum and sum of squares of the unpooled values.
    pub sum: u128,
    pub sum_sq: u128,
}

impl EmpiricalPmf {
    pub fn new(kmax: usize) -> Self {
        Self {
            counts: vec![0; kmax + 1],
            overflow: 0,
            trials: 0,
            sum: 0,
            sum_sq: 0,
        }
    }

    pub fn kmax(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn record(&mut self, value: usize) {
        match self.counts.get_mut(value) {
            Some(c) => *c += 1,
            None => self.overflow += 1,
        }
        self.trials += 1;
        self.sum += value as u128;
        self.sum_sq += (value as u128) * (value as u128);
    }

    pub fn merge(&mut self, other: &EmpiricalPmf) {
        self.counts
            .iter_mut()
            .zip(&other.counts)
            .for_each(|(a, b)| *a += b);
        self.overflow += other.overflow;
        self.trials += other.trials;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn count(&self, k: usize) -> u64 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.count(k) as f64 / self.trials as f64
    }

    pub fn overflow_frequency(&self) -> f64 {
        self.overflow as f64 / self.trials as f64
    }

    /// Binomial standard error of `frequency(k)`.
    pub fn std_error(&self, k: usize) -> f64 {
        let p = self.frequency(k);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Frequencies for `0..=kmax` followed by the overflow bucket.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut f: Vec<f64> = (0..self.counts.len()).map(|k| self.frequency(k)).collect();
        f.push(self.overflow_frequency());
        f
    }

    /// Counts for `0..=kmax` followed by the overflow bucket.
    pub fn binned_counts(&self) -> Vec<u64> {
        let mut c = self.counts.clone();
        c.push(self.overflow);
        c
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.trials as f64
    }

    pub fn mean_std_error(&self) -> f64 {
        let t = self.trials as f64;
        let mean = self.mean();
        let var = (self.sum_sq as f64 / t - mean * mean).max(0.0) * t / (t - 1.0).max(1.0);
        (var / t).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutput {
    pub config: SimConfig,
    pub generator: String,
    /// Law of `B_n` (all zeros when `n = 0`).
    pub b: EmpiricalPmf,
    /// Law of `R_n`; buckets run to `max(kmax, n + 1)` so nothing pools.
    pub r: EmpiricalPmf,
    /// `(t, law of B_t)` for each checkpoint time.
    pub checkpoints: Vec<(usize, EmpiricalPmf)>,
    /// Trials restarted because two variates collided.
    pub tie_redraws: u64,
}

fn stream_key(seed: u64) -> <ChaCha8Rng as SeedableRng>::Seed {
    ChaCha8Rng::seed_from_u64(seed).get_seed()
}

/// Generator for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(stream_key(seed));
    rng.set_stream(trial);
    rng
}

struct ChunkResult {
    b: EmpiricalPmf,
    r: EmpiricalPmf,
    checkpoints: Vec<EmpiricalPmf>,
    tie_redraws: u64,
}

fn run_chunk(config: &SimConfig, r_kmax: usize, times: &[usize], trials: std::ops::Range<u64>) -> ChunkResult {
    let key = stream_key(config.seed);
    let mut out = ChunkResult {
        b: EmpiricalPmf::new(config.kmax),
        r: EmpiricalPmf::new(r_kmax),
        checkpoints: vec![EmpiricalPmf::new(config.kmax); times.len()],
        tie_redraws: 0,
    };
    let mut stack: RecordStack<u64> = RecordStack::with_capacity(config.n + 1);
    let mut at_checkpoint = vec![0usize; times.len()];
    for trial in trials {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(trial);
        let b = 'redraw: loop {
            stack.clear();
            let mut next_cp = 0;
            let mut last = 0;
            for t in 0..=config.n {
                match stack.push(rng.next_u64()) {
                    Ok(b) => last = b,
                    Err(_) => {
                        out.tie_redraws += 1;
                        continue 'redraw;
                    }
                }
                if next_cp < times.len() && times[next_cp] == t {
                    at_checkpoint[next_cp] = last;
                    next_cp += 1;
                }
            }
            break last;
        };
        if config.n >= 1 {
            out.b.record(b);
        }
        out.r.record(stack.len());
        for (h, &v) in out.checkpoints.iter_mut().zip(&at_checkpoint) {
            h.record(v);
        }
    }
    out
}

fn simulate_with(config: &SimConfig, fail_chunk: Option<u64>) -> Result<SimOutput> {
    config.validate()?;
    let times = config.checkpoint_times();
    let r_kmax = config.kmax.max(config.n + 1);
    let chunks = config.trials.div_ceil(CHUNK);
    let work = |c: u64| {
        let range = c * CHUNK..((c + 1) * CHUNK).min(config.trials);
        let len = range.end - range.start;
        let res = catch_unwind(AssertUnwindSafe(|| {
            if fail_chunk == Some(c) {
                panic!("injected worker failure");
            }
            run_chunk(config, r_kmax, &times, range)
        }));
        (len, res.ok())
    };

    #[cfg(feature = "parallel")]
    let parts: Vec<(u64, Option<ChunkResult>)> = {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::domain(format!("cannot start workers: {e}")))?;
        pool.install(|| (0..chunks).into_par_iter().map(work).collect())
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<(u64, Option<ChunkResult>)> = (0..chunks).map(work).collect();

    let mut b = EmpiricalPmf::new(config.kmax);
    let mut r = EmpiricalPmf::new(r_kmax);
    let mut cps = vec![EmpiricalPmf::new(config.kmax); times.len()];
    let mut tie_redraws = 0;
    let mut completed = 0;
    let mut failed = false;
    for (len, part) in &parts {
        match part {
            Some(p) => {
                completed += len;
                b.merge(&p.b);
                r.merge(&p.r);
                cps.iter_mut().zip(&p.checkpoints).for_each(|(a, c)| a.merge(c));
                tie_redraws += p.tie_redraws;
            }
            None => failed = true,
        }
    }
    if failed {
        return Err(Error::PartialResult {
            completed,
            trials: config.trials,
        });
    }
    Ok(SimOutput {
        config: config.clone(),
        generator: GENERATOR_ID.to_string(),
        b,
        r,
        checkpoints: times.into_iter().zip(cps).collect(),
        tie_redraws,
    })
}

/// Run every trial and collect the laws of `B_n` and `R_n` together.
pub fn simulate(config: &SimConfig) -> Result<SimOutput> {
    simulate_with(config, None)
}

/// Empirical law of `B_n`, `n >= 1`.
pub fn simulate_b(config: &SimConfig) -> Result<SimOutput> {
    if config.n < 1 {
        return Err(Error::domain("B_n is defined for n >= 1"));
    }
    simulate(config)
}

/// Empirical law of `R_n`. The histogram keeps every value up to `n + 1`
/// (or `kmax` if larger), so nothing is pooled.
pub fn simulate_r(config: &SimConfig) -> Result<EmpiricalPmf> {
    Ok(simulate(config)?.r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub trajectories: u64,
    pub passes: u64,
    pub failures: u64,
}

/// Check the count identities of one trajectory: `R_0 = 1`,
/// `R_t = R_{t-1} + 1 - B_t`, and `sum B_t = n + 1 - R_n`. On failure
/// returns the offending step and a description.
pub fn audit_trajectory<V: PartialOrd + Copy>(stats: &TrajectoryStats<V>) -> std::result::Result<(), (usize, String)> {
    if stats.r_path.len() != stats.n + 1 || stats.b_path.len() != stats.n {
        return Err((0, "path lengths disagree with n".into()));
    }
    if stats.r_path[0] != 1 {
        return Err((0, format!("R_0 = {}", stats.r_path[0])));
    }
    for t in 1..=stats.n {
        let (prev, now, b) = (stats.r_path[t - 1], stats.r_path[t], stats.b_path[t - 1]);
        if prev + 1 != now + b {
            return Err((t, format!("R_{t} = {now}, R_{} = {prev}, B_{t} = {b}", t - 1)));
        }
    }
    if stats.total_broken() + stats.final_count() != stats.n + 1 {
        return Err((
            stats.n,
            format!(
                "sum B = {} but n + 1 - R_n = {}",
                stats.total_broken(),
                stats.n as i64 + 1 - stats.final_count() as i64
            ),
        ));
    }
    if stats.final_records.len() != stats.final_count() {
        return Err((stats.n, "record stack size differs from R_n".into()));
    }
    stats
        .final_records
        .check_invariants()
        .map_err(|e| (stats.n, e.to_string()))
}

/// Run `trials` full trajectories and audit each one.
pub fn simulate_trajectory_audit(config: &SimConfig) -> Result<AuditReport> {
    config.validate()?;
    let mut report = AuditReport {
        trajectories: 0,
        passes: 0,
        failures: 0,
    };
    let mut values = vec![0u64; config.n + 1];
    for trial in 0..config.trials {
        let mut rng = trial_rng(config.seed, trial);
        let stats = loop {
            values.iter_mut().for_each(|v| *v = rng.next_u64());
            match run_trajectory(&values) {
                Ok(s) => break s,
                Err(Error::Tie { .. }) => continue,
                Err(e) => return Err(e),
            }
        };
        report.trajectories += 1;
        if let Err((step, detail)) = audit_trajectory(&stats) {
            return Err(Error::InvariantViolation {
                seed: config.seed,
                trial,
                step,
                detail,
            });
        }
        report.passes += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::RecordEntry;

    #[test]
    fn zero_trials_rejected() {
        assert!(simulate(&SimConfig::new(5, 0, 1)).is_err());
        assert!(simulate_b(&SimConfig::new(0, 10, 1)).is_err());
    }

    #[test]
    fn r_at_time_zero_is_one() {
        let r = simulate_r(&SimConfig::new(0, 1000, 3)).unwrap();
        assert_eq!(r.count(1), 1000);
        assert_eq!(r.mean(), 1.0);
    }

    #[test]
    fn counts_balance() {
        let out = simulate(&SimConfig::new(40, 10_000, 9).with_kmax(2)).unwrap();
        assert_eq!(out.b.counts.iter().sum::<u64>() + out.b.overflow, 10_000);
        assert!(out.b.overflow > 0);
        assert_eq!(out.r.trials, 10_000);
        assert_eq!(out.r.overflow, 0);
        assert!(out.b.frequencies().iter().all(|f| (0.0..=1.0).contains(f)));
    }

    #[test]
    fn worker_count_does_not_change_counts() {
        let base = SimConfig::new(30, 20_000, 77).with_checkpoints(true);
        let a = simulate(&base.clone().with_workers(1)).unwrap();
        let b = simulate(&base.clone().with_workers(3)).unwrap();
        let c = simulate(&base.clone().with_workers(0)).unwrap();
        for other in [&b, &c] {
            assert_eq!(a.b, other.b);
            assert_eq!(a.r, other.r);
            assert_eq!(a.checkpoints, other.checkpoints);
        }
        assert_eq!(a.checkpoints.len(), 3);
        assert_eq!(a.checkpoints[2].1, a.b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = simulate(&SimConfig::new(30, 5_000, 1)).unwrap();
        let b = simulate(&SimConfig::new(30, 5_000, 2)).unwrap();
        assert_ne!(a.b, b.b);
    }

    #[test]
    fn streams_are_per_trial() {
        // Trial t's variates do not depend on how many trials run before it.
        let mut a = trial_rng(5, 1234);
        let mut b = trial_rng(5, 1234);
        let mut c = trial_rng(5, 1235);
        let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_eq!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn injected_failure_reports_progress() {
        let cfg = SimConfig::new(5, 3 * CHUNK, 1);
        match simulate_with(&cfg, Some(1)) {
            Err(Error::PartialResult { completed, trials }) => {
                assert_eq!(completed, 2 * CHUNK);
                assert_eq!(trials, 3 * CHUNK);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn checkpoint_times() {
        let c = SimConfig::new(100, 1, 0).with_checkpoints(true);
        assert_eq!(c.checkpoint_times(), vec![25, 50, 100]);
        let c = SimConfig::new(2, 1, 0).with_checkpoints(true);
        assert_eq!(c.checkpoint_times(), vec![1, 2]);
        assert!(SimConfig::new(100, 1, 0).checkpoint_times().is_empty());
    }

    #[test]
    fn audit_passes_and_injections() {
        let rep = simulate_trajectory_audit(&SimConfig::new(100, 1000, 11)).unwrap();
        assert_eq!((rep.passes, rep.failures), (1000, 0));

        let down: Vec<u32> = (0..=50).rev().collect();
        let s = run_trajectory(&down).unwrap();
        assert!(audit_trajectory(&s).is_ok());
        assert_eq!((s.total_broken(), s.final_count()), (0, 51));

        let up: Vec<u32> = (0..=50).collect();
        let s = run_trajectory(&up).unwrap();
        assert!(audit_trajectory(&s).is_ok());
        assert_eq!((s.total_broken(), s.final_count()), (50, 1));
    }

    #[test]
    fn audit_catches_corruption() {
        let mut s = run_trajectory(&[3, 1, 2, 0]).unwrap();
        s.b_path[1] += 1;
        assert_eq!(audit_trajectory(&s).unwrap_err().0, 2);

        let mut s = run_trajectory(&[3, 1, 2, 0]).unwrap();
        s.r_path[0] = 2;
        assert_eq!(audit_trajectory(&s).unwrap_err().0, 0);

        let mut s = run_trajectory(&[3, 1, 2, 0]).unwrap();
        s.final_records = RecordStack::from_entries(vec![RecordEntry { index: 3, value: 0 }], 4).unwrap();
        assert!(audit_trajectory(&s).is_err());
    }

    #[test]
    fn std_errors() {
        let mut e = EmpiricalPmf::new(1);
        for v in [0, 0, 1, 1] {
            e.record(v);
        }
        assert_eq!(e.frequency(0), 0.5);
        assert!((e.std_error(0) - 0.25).abs() < 1e-15);
        assert_eq!(e.mean(), 0.5);
        // Sample variance 1/3, so standard error sqrt(1/12).
        assert!((e.mean_std_error() - (1.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }
}
