//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string; errors come back as `{"error": "..."}`.

use num_traits::ToPrimitive;
use pareto_records::exact::{
    geometric_limit, joint_tail_prob_f64, joint_tail_prob_fast, prob_b0, prob_b1,
    remainder_bound,
};
use pareto_records::montecarlo::{simulate_b, trial_rng};
use pareto_records::oracle::oracle_pmf_b;
use pareto_records::rational::format_rational;
use pareto_records::{ExactRational, RecordStack, SimConfig};
use rand_chacha::ChaCha8Rng;
use rand_core::RngCore;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest `n` for which the page shows the enumerated law.
pub const DEMO_ORACLE_MAX: usize = 8;
/// Exact tails above this `n` are shown in floating point only.
pub const DEMO_EXACT_TAIL_MAX: u64 = 300;
pub const DEMO_TRIALS_MAX: u64 = 2_000_000;

fn render(v: Result<Value, String>) -> String {
    v.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn rational(r: &ExactRational) -> Value {
    json!({ "exact": format_rational(r), "value": r.to_f64() })
}

/// Uniform on (0, 1) with 53 random bits.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// Per-`k` table: limit, closed forms, tail `P[B_n=k, R_{n-1} >= k+1]` (k >= 1),
/// remainder bound, and the enumerated law when `n` is small.
#[wasm_bindgen]
pub fn exact_break_pmf(n: u32, kmax: u32) -> String {
    render(exact_table(n as u64, kmax))
}

fn exact_table(n: u64, kmax: u32) -> Result<Value, String> {
    if n < 1 {
        return Err("n must be at least 1".into());
    }
    let oracle = if n as usize <= DEMO_ORACLE_MAX {
        Some(oracle_pmf_b(n as usize).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for k in 0..=kmax {
        let closed = match k {
            0 => Some(prob_b0(n)),
            1 => Some(prob_b1(n)),
            _ => None,
        }
        .transpose()
        .map_err(|e| e.to_string())?;
        let tail = if k == 0 {
            Value::Null
        } else if k as u64 >= n {
            json!(0.0)
        } else if n <= DEMO_EXACT_TAIL_MAX {
            rational(&joint_tail_prob_fast(n, k as u64).map_err(|e| e.to_string())?)
        } else {
            json!(joint_tail_prob_f64(n, k as u64).map_err(|e| e.to_string())?)
        };
        rows.push(json!({
            "k": k,
            "limit": rational(&geometric_limit(k)),
            "closed_form": closed.as_ref().map(rational),
            "tail": tail,
            "remainder_bound": remainder_bound(n, k).ok(),
            "oracle": oracle.as_ref().map(|p| rational(&p.get(k as usize))),
        }));
    }
    Ok(json!({ "n": n, "rows": rows }))
}

/// Monte Carlo law of `B_n` against the geometric limit.
#[wasm_bindgen]
pub fn simulate_break_pmf(n: u32, trials: u32, seed: u32, kmax: u32) -> String {
    render(simulated(n as usize, trials as u64, seed as u64, kmax as usize))
}

fn simulated(n: usize, trials: u64, seed: u64, kmax: usize) -> Result<Value, String> {
    if trials > DEMO_TRIALS_MAX {
        return Err(format!("at most {DEMO_TRIALS_MAX} trials in the browser"));
    }
    let cfg = SimConfig::new(n, trials, seed).with_kmax(kmax);
    let out = simulate_b(&cfg).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = (0..=kmax)
        .map(|k| {
            json!({
                "k": k,
                "frequency": out.b.frequency(k),
                "std_error": out.b.std_error(k),
                "limit": 0.5f64.powi(k as i32 + 1),
            })
        })
        .collect();
    Ok(json!({
        "n": n,
        "trials": trials,
        "seed": seed,
        "rows": rows,
        "overflow": out.b.overflow_frequency(),
        "mean": out.b.mean(),
        "tie_redraws": out.tie_redraws,
    }))
}

/// A live sequence of uniform draws fed through the record stack one at a time.
#[wasm_bindgen]
pub struct RecordStream {
    rng: ChaCha8Rng,
    stack: RecordStack<f64>,
    history: Vec<f64>,
}

#[wasm_bindgen]
impl RecordStream {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32) -> RecordStream {
        RecordStream {
            rng: trial_rng(seed as u64, 0),
            stack: RecordStack::new(),
            history: Vec::new(),
        }
    }

    /// Draw the next value, push it, and return the new state.
    pub fn step(&mut self) -> String {
        let value = unit(&mut self.rng);
        render(self.push(value))
    }

    /// Push a caller-chosen value, e.g. from a click on the plot.
    pub fn push_value(&mut self, value: f64) -> String {
        render(self.push(value))
    }

    pub fn state(&self) -> String {
        self.snapshot(None).to_string()
    }
}

impl RecordStream {
    fn push(&mut self, value: f64) -> Result<Value, String> {
        let broken = self.stack.push(value).map_err(|e| e.to_string())?;
        self.history.push(value);
        Ok(self.snapshot(Some(broken)))
    }

    fn snapshot(&self, broken: Option<usize>) -> Value {
        let records: Vec<Value> = self
            .stack
            .entries()
            .iter()
            .map(|e| json!({ "index": e.index, "value": e.value }))
            .collect();
        json!({
            "t": self.stack.time(),
            "broken": broken,
            "values": self.history,
            "records": records,
        })
    }
}
