//! One function per subcommand, each returning a [`Report`].

use std::time::Instant;

use num_traits::{Signed, ToPrimitive};
use pareto_records::exact::{
    geometric_limit, joint_tail_prob_f64, joint_tail_prob_fast, prob_b0, prob_b1, remainder_bound,
};
use pareto_records::gof::{fit, geometric_pooled, pooled_exact, Fit};
use pareto_records::montecarlo::{self, EmpiricalPmf, SimConfig, SimOutput, GENERATOR_ID};
use pareto_records::oracle::PermOracle;
use pareto_records::{ExactRational, Pmf};

use crate::error::CliError;
use crate::report::{Body, Cell, Meta, Report, Table};

/// Largest horizon for which tails are reported as exact rationals.
pub const EXACT_TAIL_MAX_N: u64 = 2000;

/// One `(n, k)` line of an exact or convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: u64,
    pub k: usize,
    /// Closed-form `P[B_n = k]` (available for `k <= 1`).
    pub exact_full: Option<ExactRational>,
    /// `P[B_n = k, R_{n-1} >= k + 1]`.
    pub exact_tail: Option<ExactRational>,
    pub tail_float: Option<f64>,
    pub oracle_exact: Option<ExactRational>,
    pub empirical: Option<f64>,
    pub empirical_se: Option<f64>,
    /// `2^{-(k+1)}`.
    pub limit: f64,
    pub abs_dev: f64,
    pub abs_dev_exact: Option<ExactRational>,
    pub estimate_source: &'static str,
    pub remainder_bound: Option<f64>,
}

pub const ROW_COLUMNS: [&str; 13] = [
    "n",
    "k",
    "exact_full",
    "exact_tail",
    "tail_float",
    "oracle_exact",
    "empirical",
    "empirical_se",
    "limit",
    "abs_dev",
    "abs_dev_exact",
    "estimate_source",
    "remainder_bound",
];

impl ReportRow {
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Int(self.n as i64),
            Cell::Int(self.k as i64),
            self.exact_full.as_ref().into(),
            self.exact_tail.as_ref().into(),
            self.tail_float.into(),
            self.oracle_exact.as_ref().into(),
            self.empirical.into(),
            self.empirical_se.into(),
            Cell::Float(self.limit),
            Cell::Float(self.abs_dev),
            self.abs_dev_exact.as_ref().into(),
            Cell::Text(self.estimate_source.to_string()),
            self.remainder_bound.into(),
        ]
    }
}

fn rows_table(rows: &[ReportRow]) -> Table {
    let mut t = Table::new(ROW_COLUMNS.to_vec());
    rows.iter().for_each(|r| t.push(r.cells()));
    t
}

/// Assemble every quantity available at horizon `n` for `k = 0..=kmax`.
pub fn build_rows(
    n: u64,
    kmax: usize,
    oracle: Option<&Pmf>,
    empirical: Option<&EmpiricalPmf>,
) -> Result<Vec<ReportRow>, CliError> {
    if n < 1 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let limit_exact = geometric_limit(k as u32);
        let exact_full = match k {
            0 => Some(prob_b0(n)?),
            1 => Some(prob_b1(n)?),
            _ => None,
        };
        let (exact_tail, tail_float) = if k == 0 {
            (None, None)
        } else {
            let exact = if n <= EXACT_TAIL_MAX_N {
                Some(joint_tail_prob_fast(n, k as u64)?)
            } else {
                None
            };
            (exact, Some(joint_tail_prob_f64(n, k as u64)?))
        };
        let oracle_exact = oracle.map(|p| p.get(k));
        let emp = empirical.map(|e| (e.frequency(k), e.std_error(k)));

        let exact_best = oracle_exact
            .as_ref()
            .map(|v| (v, "oracle"))
            .or(exact_full.as_ref().map(|v| (v, "closed_form")));
        let (abs_dev, abs_dev_exact, source) = match (exact_best, emp, &exact_tail, tail_float) {
            (Some((v, src)), _, _, _) => {
                let d = (v - &limit_exact).abs();
                (d.to_f64().unwrap(), Some(d), src)
            }
            (None, Some((f, _)), _, _) => ((f - limit_exact.to_f64().unwrap()).abs(), None, "empirical"),
            (None, None, Some(t), _) => {
                let d = (t - &limit_exact).abs();
                (d.to_f64().unwrap(), Some(d), "tail")
            }
            (None, None, None, Some(t)) => ((t - limit_exact.to_f64().unwrap()).abs(), None, "tail"),
            (None, None, None, None) => unreachable!("k = 0 always has a closed form"),
        };
        let bound = if k >= 2 && n >= 2 {
            Some(remainder_bound(n, k as u32)?)
        } else {
            None
        };
        rows.push(ReportRow {
            n,
            k,
            exact_full,
            exact_tail,
            tail_float,
            oracle_exact,
            empirical: emp.map(|e| e.0),
            empirical_se: emp.map(|e| e.1),
            limit: limit_exact.to_f64().unwrap(),
            abs_dev,
            abs_dev_exact,
            estimate_source: source,
            remainder_bound: bound,
        });
    }
    Ok(rows)
}

fn oracle_if_within(cap: &PermOracle, n: u64) -> Result<Option<Pmf>, CliError> {
    if n as usize <= cap.cap() {
        Ok(Some(cap.pmf_b(n as usize)?))
    } else {
        Ok(None)
    }
}

fn oracle_with_cap(cap: usize) -> Result<PermOracle, CliError> {
    Ok(PermOracle::with_cap(cap)?)
}

/// Exact quantities at one horizon.
pub fn cmd_exact(n: u64, kmax: usize, cap: usize) -> Result<Report, CliError> {
    let oracle = oracle_if_within(&oracle_with_cap(cap)?, n)?;
    let rows = build_rows(n, kmax, oracle.as_ref(), None)?;
    Ok(Report {
        meta: Meta::new("exact")
            .param("n", n)
            .param("kmax", kmax)
            .param("oracle_cap", cap),
        body: Body::Rows,
        table: rows_table(&rows),
    })
}

/// Full enumeration laws of `B_n`, `R_n`, and `(B_n, R_{n-1})`.
pub fn cmd_oracle(n: usize, cap: usize) -> Result<Report, CliError> {
    let oracle = oracle_with_cap(cap)?;
    let pmf_b = oracle.pmf_b(n)?;
    let pmf_r = oracle.pmf_r(n)?;
    let joint = oracle.joint(n)?;
    let mut t = Table::new(vec!["law", "k", "r_prev", "mass", "mass_float"]);
    let mut push = |law: &str, k: usize, r_prev: Option<usize>, m: &ExactRational| {
        t.push(vec![
            Cell::Text(law.into()),
            Cell::Int(k as i64),
            r_prev.map_or(Cell::Null, |r| Cell::Int(r as i64)),
            Cell::rational(m),
            Cell::Float(m.to_f64().unwrap()),
        ])
    };
    for (&k, m) in &pmf_b.mass {
        push("B", k, None, m);
    }
    for (&r, m) in &pmf_r.mass {
        push("R", r, None, m);
    }
    for (&(b, r), m) in &joint.mass {
        push("joint", b, Some(r), m);
    }
    Ok(Report {
        meta: Meta::new("oracle")
            .param("n", n)
            .param("cap", cap)
            .param("permutations", (1..=n as u64 + 1).product::<u64>()),
        body: Body::Pmf,
        table: t,
    })
}

fn sim_meta(command: &'static str, config: &SimConfig, out: &SimOutput, secs: f64) -> Meta {
    let mut meta = Meta::new(command)
        .param("n", config.n)
        .param("trials", config.trials)
        .param("kmax", config.kmax)
        .param("workers", config.workers)
        .param("checkpoints", config.checkpoints)
        .param("tie_redraws", out.tie_redraws)
        .param("r_mean", out.r.mean())
        .param("r_mean_se", out.r.mean_std_error());
    meta.seed = Some(config.seed);
    meta.generator = Some(GENERATOR_ID.to_string());
    meta.wall_time_s = Some(secs);
    meta
}

/// Columns of the simulate table.
pub const SIM_COLUMNS: [&str; 8] = [
    "t",
    "k",
    "bucket",
    "count",
    "frequency",
    "std_error",
    "limit",
    "abs_dev",
];

fn push_histogram(t: &mut Table, time: usize, h: &EmpiricalPmf) {
    let limits = geometric_pooled(h.kmax());
    let freqs = h.frequencies();
    for (k, count) in h.binned_counts().into_iter().enumerate() {
        let overflow = k > h.kmax();
        let se = if overflow {
            let p = freqs[k];
            (p * (1.0 - p) / h.trials as f64).sqrt()
        } else {
            h.std_error(k)
        };
        t.push(vec![
            Cell::Int(time as i64),
            Cell::Int(k as i64),
            Cell::Text(if overflow { "overflow" } else { "k" }.into()),
            Cell::Int(count as i64),
            Cell::Float(freqs[k]),
            Cell::Float(se),
            Cell::Float(limits[k]),
            Cell::Float((freqs[k] - limits[k]).abs()),
        ]);
    }
}

/// Simulate `B_n`; returns the report and a human-readable summary.
pub fn cmd_simulate(config: &SimConfig) -> Result<(Report, String), CliError> {
    let start = Instant::now();
    let out = montecarlo::simulate_b(config)?;
    let secs = start.elapsed().as_secs_f64();
    let mut t = Table::new(SIM_COLUMNS.to_vec());
    push_histogram(&mut t, config.n, &out.b);
    for (time, h) in &out.checkpoints {
        if *time != config.n {
            push_histogram(&mut t, *time, h);
        }
    }
    let mut summary = format!(
        "n = {}, trials = {}, seed = {}, {:.2}s\n   k   frequency      limit    |dev|   |dev|/se(limit)\n",
        config.n, config.trials, config.seed, secs
    );
    let limits = geometric_pooled(out.b.kmax());
    for (k, f) in out.b.frequencies().into_iter().enumerate() {
        // Standard error under the limit law.
        let se = (limits[k] * (1.0 - limits[k]) / config.trials as f64).sqrt();
        let dev = (f - limits[k]).abs();
        let label = if k <= out.b.kmax() {
            k.to_string()
        } else {
            format!(">{}", out.b.kmax())
        };
        summary.push_str(&format!(
            "{label:>4}   {f:.6}   {:.6}   {dev:.6}   {:.2}\n",
            limits[k],
            dev / se
        ));
    }
    summary.push_str(&format!(
        "R_n mean {:.4} (se {:.4})\n",
        out.r.mean(),
        out.r.mean_std_error()
    ));
    Ok((
        Report {
            meta: sim_meta("simulate", config, &out, secs),
            body: Body::Pmf,
            table: t,
        },
        summary,
    ))
}

/// Exact, oracle, and empirical estimates for several horizons.
pub fn cmd_converge(
    n_list: &[u64],
    kmax: usize,
    trials: u64,
    seed: u64,
    workers: usize,
    cap: usize,
) -> Result<Report, CliError> {
    if n_list.is_empty() {
        return Err(CliError::Usage("n list is empty".into()));
    }
    let oracle = oracle_with_cap(cap)?;
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut tie_redraws = 0;
    for &n in n_list {
        let exact = oracle_if_within(&oracle, n)?;
        let sim = if trials > 0 {
            let cfg = SimConfig::new(n as usize, trials, seed)
                .with_kmax(kmax)
                .with_workers(workers);
            let out = montecarlo::simulate_b(&cfg)?;
            tie_redraws += out.tie_redraws;
            Some(out.b)
        } else {
            None
        };
        rows.extend(build_rows(n, kmax, exact.as_ref(), sim.as_ref())?);
    }
    let mut meta = Meta::new("converge")
        .param("n_list", n_list)
        .param("kmax", kmax)
        .param("trials", trials)
        .param("workers", workers)
        .param("oracle_cap", cap)
        .param("tie_redraws", tie_redraws);
    if trials > 0 {
        meta.seed = Some(seed);
        meta.generator = Some(GENERATOR_ID.to_string());
    }
    meta.wall_time_s = Some(start.elapsed().as_secs_f64());
    Ok(Report {
        meta,
        body: Body::Rows,
        table: rows_table(&rows),
    })
}

/// Fits of the empirical law of `B_n` against the pooled geometric limit
/// and, when enumerable, the exact law.
pub fn cmd_gof(config: &SimConfig, cap: usize) -> Result<Report, CliError> {
    let oracle = oracle_with_cap(cap)?;
    let start = Instant::now();
    let out = montecarlo::simulate_b(config)?;
    let secs = start.elapsed().as_secs_f64();
    let mut fits: Vec<(&str, Fit)> = vec![("geometric", fit(&out.b, &geometric_pooled(config.kmax)))];
    if let Some(exact) = oracle_if_within(&oracle, config.n as u64)? {
        fits.push(("oracle", fit(&out.b, &pooled_exact(&exact, config.kmax))));
    }
    let mut t = Table::new(vec![
        "reference",
        "n",
        "trials",
        "kmax",
        "total_variation",
        "chi_square",
        "dof",
        "p_value",
        "bins",
    ]);
    for (name, f) in fits {
        t.push(vec![
            Cell::Text(name.into()),
            Cell::Int(config.n as i64),
            Cell::Int(config.trials as i64),
            Cell::Int(config.kmax as i64),
            Cell::Float(f.total_variation),
            Cell::Float(f.chi_square.statistic),
            Cell::Int(f.chi_square.dof as i64),
            Cell::Float(f.chi_square.p_value),
            Cell::Int(f.chi_square.bins as i64),
        ]);
    }
    Ok(Report {
        meta: sim_meta("gof", config, &out, secs).param("oracle_cap", cap),
        body: Body::Rows,
        table: t,
    })
}

/// Invariant sweep over seeded trajectories.
pub fn cmd_audit(config: &SimConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let rep = montecarlo::simulate_trajectory_audit(config)?;
    let mut t = Table::new(vec!["n", "trajectories", "passes", "failures"]);
    t.push(vec![
        Cell::Int(config.n as i64),
        Cell::Int(rep.trajectories as i64),
        Cell::Int(rep.passes as i64),
        Cell::Int(rep.failures as i64),
    ]);
    let mut meta = Meta::new("audit").param("n", config.n).param("trials", config.trials);
    meta.seed = Some(config.seed);
    meta.generator = Some(GENERATOR_ID.to_string());
    meta.wall_time_s = Some(start.elapsed().as_secs_f64());
    Ok(Report {
        meta,
        body: Body::Rows,
        table: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> ExactRational {
        ExactRational::new(p.into(), d.into())
    }

    #[test]
    fn rows_prefer_oracle_then_closed_form() {
        let oracle = PermOracle::new().pmf_b(3).unwrap();
        let rows = build_rows(3, 3, Some(&oracle), None).unwrap();
        assert_eq!(rows[1].exact_full, Some(q(7, 24)));
        assert_eq!(rows[1].oracle_exact, Some(q(7, 24)));
        assert_eq!(rows[1].estimate_source, "oracle");
        assert_eq!(rows[3].oracle_exact, Some(q(1, 24)));
        assert_eq!(rows[2].exact_tail, Some(q(1, 24)));

        let rows = build_rows(300, 2, None, None).unwrap();
        assert_eq!(rows[0].estimate_source, "closed_form");
        assert_eq!(rows[0].abs_dev, 0.0);
        assert_eq!(rows[2].estimate_source, "tail");
        assert!(rows[2].remainder_bound.is_some());
    }

    #[test]
    fn large_n_uses_float_tail() {
        let rows = build_rows(EXACT_TAIL_MAX_N + 1, 3, None, None).unwrap();
        assert!(rows[3].exact_tail.is_none());
        assert!(rows[3].tail_float.unwrap() > 0.0);
    }

    #[test]
    fn n_zero_is_usage_error() {
        assert!(matches!(build_rows(0, 2, None, None), Err(CliError::Usage(_))));
    }
}
