//! Aggregate analyses over trace rows.
//!
//! Everything here is a pure fold over [`TraceRow`]s: accuracy tables,
//! depth retention, relative lift, residual-error channel decomposition,
//! trigger statistics, truncation robustness, and cross-run overlap of
//! residual errors. Inferential statistics (bootstrap intervals,
//! permutation tests, multiple-comparison correction) live in
//! [`inference`]; deterministic CSV/Markdown/JSON emission in [`report`];
//! published reference figures in [`reference`].

pub mod inference;
pub mod reference;
pub mod report;

use crate::domain::DomainKind;
use crate::harness::{Method, TraceRow};
use crate::verifier::{Channel, Trigger};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

fn pct(numer: usize, denom: usize) -> f64 {
    100.0 * numer as f64 / denom as f64
}

/// One cell of an accuracy table. `domain`/`turn` are present only when
/// the table was grouped by them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCell {
    pub agent: String,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub turn: Option<u32>,
    pub n: usize,
    pub accuracy_pct: f64,
}

type CellKey = (String, Method, Option<DomainKind>, Option<u32>);

/// Mean turn-level accuracy per group. Always groups by (agent, method);
/// `by_domain` and `by_turn` refine further. Empty groups cannot occur:
/// a group exists only because at least one row landed in it.
pub fn turn_accuracy(rows: &[TraceRow], by_domain: bool, by_turn: bool) -> Vec<AccuracyCell> {
    let mut groups: BTreeMap<CellKey, (usize, usize)> = BTreeMap::new();
    for row in rows {
        let key = (
            row.agent.clone(),
            row.method,
            by_domain.then_some(row.domain),
            by_turn.then_some(row.turn),
        );
        let entry = groups.entry(key).or_insert((0, 0));
        entry.0 += usize::from(row.answer_correct);
        entry.1 += 1;
    }
    groups
        .into_iter()
        .map(|((agent, method, domain, turn), (correct, n))| AccuracyCell {
            agent,
            method,
            domain,
            turn,
            n,
            accuracy_pct: pct(correct, n),
        })
        .collect()
}

/// Depth retention: turn-10 accuracy over turn-1 accuracy, per
/// (agent, method). Groups lacking turn-1 or turn-10 rows (or with zero
/// turn-1 accuracy) report `retain_pct: None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetentionRow {
    pub agent: String,
    pub method: Method,
    pub turn1_pct: Option<f64>,
    pub turn10_pct: Option<f64>,
    pub retain_pct: Option<f64>,
}

pub fn retention(rows: &[TraceRow]) -> Vec<RetentionRow> {
    let by_turn = turn_accuracy(rows, false, true);
    let mut groups: BTreeMap<(String, Method), (Option<f64>, Option<f64>)> = BTreeMap::new();
    for cell in by_turn {
        let entry = groups.entry((cell.agent, cell.method)).or_insert((None, None));
        match cell.turn {
            Some(1) => entry.0 = Some(cell.accuracy_pct),
            Some(10) => entry.1 = Some(cell.accuracy_pct),
            _ => {}
        }
    }
    groups
        .into_iter()
        .map(|((agent, method), (turn1, turn10))| {
            let retain = match (turn1, turn10) {
                (Some(t1), Some(t10)) if t1 > 0.0 => Some(100.0 * t10 / t1),
                _ => None,
            };
            RetentionRow { agent, method, turn1_pct: turn1, turn10_pct: turn10, retain_pct: retain }
        })
        .collect()
}

/// Relative lift of the repair method over the best non-repair baseline,
/// as a percentage: (mus − best) / best × 100.
pub fn relative_lift(direct: f64, cot: f64, ledger: f64, mus: f64) -> f64 {
    let best = direct.max(cot).max(ledger);
    100.0 * (mus - best) / best
}

/// Per-agent accuracy under each method plus the relative lift. Lift is
/// reported only when all four methods are present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftRow {
    pub agent: String,
    pub direct_pct: Option<f64>,
    pub cot_pct: Option<f64>,
    pub ledger_pct: Option<f64>,
    pub mus_pct: Option<f64>,
    pub lift_pct: Option<f64>,
}

pub fn lift_table(rows: &[TraceRow]) -> Vec<LiftRow> {
    let mut agents: BTreeMap<String, [Option<f64>; 4]> = BTreeMap::new();
    for cell in turn_accuracy(rows, false, false) {
        let slot = match cell.method {
            Method::Direct => 0,
            Method::Cot => 1,
            Method::LedgerOnly => 2,
            Method::MusRepair => 3,
        };
        agents.entry(cell.agent).or_default()[slot] = Some(cell.accuracy_pct);
    }
    agents
        .into_iter()
        .map(|(agent, accs)| {
            let lift = match accs {
                [Some(d), Some(c), Some(l), Some(m)] => Some(relative_lift(d, c, l, m)),
                _ => None,
            };
            LiftRow {
                agent,
                direct_pct: accs[0],
                cot_pct: accs[1],
                ledger_pct: accs[2],
                mus_pct: accs[3],
                lift_pct: lift,
            }
        })
        .collect()
}

/// Residual errors split by failure channel for one (agent, method).
/// Shares are `None` when the group has no residuals at all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub agent: String,
    pub method: Method,
    pub residuals: usize,
    pub drift: usize,
    pub contradiction: usize,
    pub other: usize,
    pub drift_pct: Option<f64>,
    pub contradiction_pct: Option<f64>,
    pub other_pct: Option<f64>,
}

/// Decompose incorrect final answers by channel: drift (satisfiable
/// ledger, answer violates it), contradiction (unsatisfiable ledger),
/// other (parse and completeness residue).
pub fn decompose_residuals(rows: &[TraceRow]) -> Vec<DecompositionRow> {
    let mut groups: BTreeMap<(String, Method), [usize; 3]> = BTreeMap::new();
    for row in rows {
        let counts = groups.entry((row.agent.clone(), row.method)).or_default();
        if row.answer_correct {
            continue;
        }
        match row.channel {
            Channel::Drift => counts[0] += 1,
            Channel::Contradiction => counts[1] += 1,
            Channel::Other | Channel::Consistent => counts[2] += 1,
        }
    }
    groups
        .into_iter()
        .map(|((agent, method), [drift, contradiction, other])| {
            let residuals = drift + contradiction + other;
            let share = |count: usize| (residuals > 0).then(|| pct(count, residuals));
            DecompositionRow {
                agent,
                method,
                residuals,
                drift,
                contradiction,
                other,
                drift_pct: share(drift),
                contradiction_pct: share(contradiction),
                other_pct: share(other),
            }
        })
        .collect()
}

/// Trigger statistics for one (agent, method, trigger).
///
/// `events` counts every firing across all answer attempts of every turn.
/// `repaired_rows` counts turns where the trigger fired on a non-final
/// attempt — i.e. a retry followed — and the post-repair columns report
/// how those turns ended up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerRow {
    pub agent: String,
    pub method: Method,
    pub trigger: Trigger,
    pub events: usize,
    pub repaired_rows: usize,
    pub post_repair_accuracy_pct: Option<f64>,
    pub post_repair_sat_pct: Option<f64>,
}

pub fn trigger_table(rows: &[TraceRow]) -> Vec<TriggerRow> {
    #[derive(Default)]
    struct Tally {
        events: usize,
        repaired: usize,
        repaired_correct: usize,
        repaired_sat: usize,
    }
    let mut groups: BTreeMap<(String, Method), BTreeMap<Trigger, Tally>> = BTreeMap::new();
    for row in rows {
        let tallies = groups.entry((row.agent.clone(), row.method)).or_insert_with(|| {
            Trigger::ALL.iter().map(|&t| (t, Tally::default())).collect()
        });
        let last = row.attempt_records.len().saturating_sub(1);
        for (i, record) in row.attempt_records.iter().enumerate() {
            for &trigger in &record.triggers {
                let tally = tallies.get_mut(&trigger).expect("all triggers pre-seeded");
                tally.events += 1;
                if i < last {
                    tally.repaired += 1;
                    tally.repaired_correct += usize::from(row.answer_correct);
                    tally.repaired_sat += usize::from(row.z3_sat);
                }
            }
        }
    }
    let mut out = Vec::new();
    for ((agent, method), tallies) in groups {
        for (trigger, tally) in tallies {
            let rate = |count: usize| (tally.repaired > 0).then(|| pct(count, tally.repaired));
            out.push(TriggerRow {
                agent: agent.clone(),
                method,
                trigger,
                events: tally.events,
                repaired_rows: tally.repaired,
                post_repair_accuracy_pct: rate(tally.repaired_correct),
                post_repair_sat_pct: rate(tally.repaired_sat),
            });
        }
    }
    out
}

/// Overlap of residual-error rows between two runs, keyed by
/// (method, problem, turn). Ratios are `None` when a denominator is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapStats {
    pub n_a: usize,
    pub n_b: usize,
    pub overlap: usize,
    pub union: usize,
    pub jaccard: Option<f64>,
    pub share_a: Option<f64>,
    pub share_b: Option<f64>,
}

pub fn residual_overlap(a: &[TraceRow], b: &[TraceRow]) -> OverlapStats {
    fn error_keys(rows: &[TraceRow]) -> std::collections::BTreeSet<(Method, &str, u32)> {
        rows.iter()
            .filter(|r| !r.answer_correct)
            .map(|r| (r.method, r.problem_id.as_str(), r.turn))
            .collect()
    }
    let ea = error_keys(a);
    let eb = error_keys(b);
    let overlap = ea.intersection(&eb).count();
    let union = ea.union(&eb).count();
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    OverlapStats {
        n_a: ea.len(),
        n_b: eb.len(),
        overlap,
        union,
        jaccard: ratio(overlap, union),
        share_a: ratio(overlap, ea.len()),
        share_b: ratio(overlap, eb.len()),
    }
}

/// Accuracy over all rows versus non-truncated rows, per (agent, method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationRow {
    pub agent: String,
    pub method: Method,
    pub n: usize,
    pub truncated_n: usize,
    pub truncated_pct: f64,
    pub accuracy_all_pct: f64,
    pub accuracy_nontruncated_pct: Option<f64>,
}

pub fn truncation_split(rows: &[TraceRow]) -> Vec<TruncationRow> {
    let mut groups: BTreeMap<(String, Method), (usize, usize, usize, usize)> = BTreeMap::new();
    for row in rows {
        let entry = groups.entry((row.agent.clone(), row.method)).or_insert((0, 0, 0, 0));
        entry.0 += 1;
        entry.1 += usize::from(row.answer_correct);
        if row.truncated {
            entry.2 += 1;
        } else {
            entry.3 += usize::from(row.answer_correct);
        }
    }
    groups
        .into_iter()
        .map(|((agent, method), (n, correct, truncated, clean_correct))| {
            let clean_n = n - truncated;
            TruncationRow {
                agent,
                method,
                n,
                truncated_n: truncated,
                truncated_pct: pct(truncated, n),
                accuracy_all_pct: pct(correct, n),
                accuracy_nontruncated_pct: (clean_n > 0).then(|| pct(clean_correct, clean_n)),
            }
        })
        .collect()
}
