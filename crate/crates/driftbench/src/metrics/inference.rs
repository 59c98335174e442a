//! Problem-level paired inference: percentile bootstrap intervals,
//! sign-permutation tests, and Benjamini–Hochberg correction.
//!
//! The paired unit is the problem: each problem's accuracy under a method
//! is the unweighted mean of its turn correctness, and a delta is the
//! difference of those means between two methods on the same problem.
//! Resampling is deterministic given (data, replicates, seed); every
//! replicate draws from its own derived substream, so results do not
//! depend on evaluation order.

use crate::harness::{Method, TraceRow};
use crate::seeded;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const DEFAULT_BOOTSTRAP_REPLICATES: u32 = 10_000;
pub const DEFAULT_PERMUTATION_ROUNDS: u32 = 10_000;

/// Largest n for which the sign-permutation null (2^n flips) is enumerated
/// exactly rather than sampled.
pub const EXACT_ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum InferenceError {
    #[error("need at least two paired problems, found {0}")]
    TooFewProblems(usize),
    #[error("{0}")]
    InvalidInput(String),
}

/// One problem's accuracy under two methods and their difference
/// (fractions in [0, 1]; `delta = b - a`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedDelta {
    pub problem_id: String,
    pub acc_a: f64,
    pub acc_b: f64,
    pub delta: f64,
}

/// Paired per-problem deltas plus the count of problems that appeared on
/// only one side and were therefore excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct Pairing {
    pub deltas: Vec<PairedDelta>,
    pub excluded: usize,
}

fn problem_accuracy(rows: &[TraceRow]) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for row in rows {
        let entry = counts.entry(row.problem_id.clone()).or_insert((0, 0));
        entry.0 += usize::from(row.answer_correct);
        entry.1 += 1;
    }
    counts.into_iter().map(|(id, (c, n))| (id, c as f64 / n as f64)).collect()
}

/// Pair problems between two row sets (typically one method each).
pub fn paired_deltas(side_a: &[TraceRow], side_b: &[TraceRow]) -> Pairing {
    let a = problem_accuracy(side_a);
    let b = problem_accuracy(side_b);
    let mut deltas = Vec::new();
    let mut excluded = 0;
    for (id, &acc_a) in &a {
        match b.get(id) {
            Some(&acc_b) => deltas.push(PairedDelta {
                problem_id: id.clone(),
                acc_a,
                acc_b,
                delta: acc_b - acc_a,
            }),
            None => excluded += 1,
        }
    }
    excluded += b.keys().filter(|id| !a.contains_key(*id)).count();
    Pairing { deltas, excluded }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Linear-interpolation quantile of an ascending-sorted slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// 95% percentile bootstrap interval for the mean of `deltas`.
pub fn bootstrap_ci(deltas: &[f64], replicates: u32, seed: u64) -> Result<(f64, f64), InferenceError> {
    let n = deltas.len();
    if n < 2 {
        return Err(InferenceError::TooFewProblems(n));
    }
    if replicates == 0 {
        return Err(InferenceError::InvalidInput("zero bootstrap replicates".into()));
    }
    let mut means = Vec::with_capacity(replicates as usize);
    for i in 0..replicates {
        let mut rng =
            seeded::stream_rng("metrics.bootstrap", &[&seed.to_le_bytes(), &i.to_le_bytes()]);
        let sum: f64 = (0..n).map(|_| deltas[rng.gen_range(0..n)]).sum();
        means.push(sum / n as f64);
    }
    means.sort_by(|a, b| a.partial_cmp(b).expect("bootstrap means are finite"));
    Ok((quantile_sorted(&means, 0.025), quantile_sorted(&means, 0.975)))
}

/// Two-sided Monte-Carlo sign-permutation p-value for mean(deltas) = 0,
/// smoothed as (1 + hits) / (1 + rounds) so zero is never reported.
pub fn sign_permutation_test(deltas: &[f64], rounds: u32, seed: u64) -> Result<f64, InferenceError> {
    let n = deltas.len();
    if n < 2 {
        return Err(InferenceError::TooFewProblems(n));
    }
    if rounds == 0 {
        return Err(InferenceError::InvalidInput("zero permutation rounds".into()));
    }
    let observed = mean(deltas).abs();
    let mut hits = 0u64;
    for i in 0..rounds {
        let mut rng =
            seeded::stream_rng("metrics.permutation", &[&seed.to_le_bytes(), &i.to_le_bytes()]);
        let flipped: f64 =
            deltas.iter().map(|&d| if rng.gen_bool(0.5) { -d } else { d }).sum::<f64>()
                / n as f64;
        if flipped.abs() >= observed - 1e-12 {
            hits += 1;
        }
    }
    Ok((1 + hits) as f64 / (1 + rounds as u64) as f64)
}

/// Exact two-sided sign-permutation p-value by enumerating all 2^n sign
/// vectors. Only feasible for small n; errors above
/// [`EXACT_ENUMERATION_LIMIT`].
pub fn sign_permutation_exact(deltas: &[f64]) -> Result<f64, InferenceError> {
    let n = deltas.len();
    if n < 2 {
        return Err(InferenceError::TooFewProblems(n));
    }
    if n > EXACT_ENUMERATION_LIMIT {
        return Err(InferenceError::InvalidInput(format!(
            "exact enumeration supports n <= {EXACT_ENUMERATION_LIMIT}, found {n}"
        )));
    }
    let observed = mean(deltas).abs();
    let mut hits = 0u64;
    for mask in 0u64..(1u64 << n) {
        let sum: f64 = deltas
            .iter()
            .enumerate()
            .map(|(i, &d)| if mask >> i & 1 == 1 { -d } else { d })
            .sum();
        if (sum / n as f64).abs() >= observed - 1e-12 {
            hits += 1;
        }
    }
    Ok(hits as f64 / (1u64 << n) as f64)
}

/// Benjamini–Hochberg step-up q-values with monotonicity enforcement.
pub fn bh_correct(ps: &[f64]) -> Result<Vec<f64>, InferenceError> {
    if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(InferenceError::InvalidInput("p-values must lie in [0, 1]".into()));
    }
    let m = ps.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| ps[a].partial_cmp(&ps[b]).expect("p-values are finite"));
    let mut qs = vec![0.0; m];
    let mut running = 1.0f64;
    for rank in (0..m).rev() {
        let idx = order[rank];
        let raw = ps[idx] * m as f64 / (rank + 1) as f64;
        running = running.min(raw);
        qs[idx] = running;
    }
    Ok(qs)
}

/// A paired comparison's headline numbers, in percentage points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceResult {
    pub delta_pp: f64,
    pub ci_lo_pp: f64,
    pub ci_hi_pp: f64,
    pub p: f64,
    pub q: f64,
}

/// One method-vs-baseline comparison for one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodComparison {
    pub agent: String,
    pub method: Method,
    pub baseline: Method,
    pub n_problems: usize,
    pub excluded: usize,
    #[serde(flatten)]
    pub result: InferenceResult,
}

/// Compare every non-baseline method against `baseline`, per agent, with
/// BH correction across all comparisons produced.
pub fn compare_methods(
    rows: &[TraceRow],
    baseline: Method,
    replicates: u32,
    rounds: u32,
    seed: u64,
) -> Result<Vec<MethodComparison>, InferenceError> {
    let mut by_group: BTreeMap<(String, Method), Vec<TraceRow>> = BTreeMap::new();
    for row in rows {
        by_group.entry((row.agent.clone(), row.method)).or_default().push(row.clone());
    }
    let agents: Vec<String> = {
        let mut names: Vec<String> = by_group.keys().map(|(a, _)| a.clone()).collect();
        names.dedup();
        names
    };

    let mut comparisons = Vec::new();
    for agent in agents {
        let Some(base_rows) = by_group.get(&(agent.clone(), baseline)) else {
            continue;
        };
        for method in Method::ALL {
            if method == baseline {
                continue;
            }
            let Some(method_rows) = by_group.get(&(agent.clone(), method)) else {
                continue;
            };
            let pairing = paired_deltas(base_rows, method_rows);
            let deltas: Vec<f64> = pairing.deltas.iter().map(|d| 100.0 * d.delta).collect();
            let comparison_seed = seeded::stream_hash(
                "metrics.compare",
                &[&seed.to_le_bytes(), agent.as_bytes(), method.as_str().as_bytes()],
            );
            let (lo, hi) = bootstrap_ci(&deltas, replicates, comparison_seed)?;
            let p = sign_permutation_test(&deltas, rounds, comparison_seed)?;
            comparisons.push(MethodComparison {
                agent: agent.clone(),
                method,
                baseline,
                n_problems: deltas.len(),
                excluded: pairing.excluded,
                result: InferenceResult { delta_pp: mean(&deltas), ci_lo_pp: lo, ci_hi_pp: hi, p, q: p },
            });
        }
    }
    let ps: Vec<f64> = comparisons.iter().map(|c| c.result.p).collect();
    for (comparison, q) in comparisons.iter_mut().zip(bh_correct(&ps)?) {
        comparison.result.q = q;
    }
    Ok(comparisons)
}
