//! Published reference results for the four evaluated chat models.
//!
//! These figures are frozen as shipped; they regression-test the metric
//! implementations (`analyze --selftest`) and document what a full-scale
//! run produced. Accuracies are turn-level percentages over the 816-problem
//! test split, methods ordered direct / cot / ledger_only / mus_repair.

use super::{decompose_residuals, relative_lift};
use crate::domain::DomainKind;
use crate::harness::{AttemptRecord, Method, TraceRow};
use crate::metrics::inference::bh_correct;
use crate::verifier::{Channel, Trigger};

pub const MODELS: [&str; 4] = ["Qwen3-8B", "Qwen3-32B", "gpt-oss-20b", "gpt-oss-120b"];

/// Turn-level accuracy (%) per method.
pub const ACCURACY: [(&str, [f64; 4]); 4] = [
    ("Qwen3-8B", [28.19, 27.91, 25.23, 30.01]),
    ("Qwen3-32B", [28.93, 31.44, 31.44, 38.22]),
    ("gpt-oss-20b", [51.80, 50.35, 53.70, 68.71]),
    ("gpt-oss-120b", [52.12, 53.95, 50.02, 62.68]),
];

/// Depth retention (%) per method: turn-10 accuracy over turn-1 accuracy.
pub const RETENTION: [(&str, [f64; 4]); 4] = [
    ("Qwen3-8B", [5.1, 6.7, 5.7, 8.8]),
    ("Qwen3-32B", [6.5, 2.5, 23.6, 15.7]),
    ("gpt-oss-20b", [23.1, 19.4, 29.1, 48.3]),
    ("gpt-oss-120b", [30.2, 24.2, 36.4, 42.9]),
];

/// Quoted relative lift (%) of repair over the best non-repair baseline.
/// Only three of the four models have a quoted figure.
pub const QUOTED_LIFTS: [(&str, f64); 3] =
    [("Qwen3-8B", 6.4), ("gpt-oss-20b", 27.9), ("gpt-oss-120b", 16.2)];

/// Residual-error counts under repair: [drift, contradiction, other].
pub const RESIDUAL_COUNTS: [(&str, [u64; 3]); 4] = [
    ("Qwen3-8B", [3970, 0, 0]),
    ("Qwen3-32B", [3438, 66, 0]),
    ("gpt-oss-20b", [1774, 1, 0]),
    ("gpt-oss-120b", [2115, 2, 0]),
];

/// Residual-error channel shares (%): [drift, contradiction, other].
pub const RESIDUAL_SHARES: [(&str, [f64; 3]); 4] = [
    ("Qwen3-8B", [100.0, 0.0, 0.0]),
    ("Qwen3-32B", [98.1, 1.9, 0.0]),
    ("gpt-oss-20b", [99.9, 0.1, 0.0]),
    ("gpt-oss-120b", [99.9, 0.1, 0.0]),
];

/// Trigger event counts across repair retries, ordered
/// [conflict, incomplete, parse, extraction, unsat].
pub const TRIGGER_EVENTS: [(&str, [u64; 5]); 4] = [
    ("Qwen3-8B", [12089, 218, 0, 0, 1]),
    ("Qwen3-32B", [10489, 528, 2, 2, 212]),
    ("gpt-oss-20b", [5300, 1036, 664, 559, 2]),
    ("gpt-oss-120b", [6255, 31, 810, 36, 4]),
];

pub const TRIGGER_EVENT_ORDER: [Trigger; 5] = [
    Trigger::AnswerLedgerConflict,
    Trigger::IncompleteAssignment,
    Trigger::AnswerParseFailure,
    Trigger::ConstraintExtractionFailure,
    Trigger::UnsatLedger,
];

/// Pairwise overlap of residual repair errors:
/// (model a, model b, overlap, jaccard, share of a, share of b).
pub const OVERLAP: [(&str, &str, u64, f64, f64, f64); 6] = [
    ("Qwen3-8B", "Qwen3-32B", 3143, 0.726, 0.792, 0.897),
    ("Qwen3-8B", "gpt-oss-20b", 1687, 0.416, 0.425, 0.950),
    ("Qwen3-8B", "gpt-oss-120b", 1945, 0.470, 0.490, 0.919),
    ("Qwen3-32B", "gpt-oss-20b", 1638, 0.450, 0.467, 0.923),
    ("Qwen3-32B", "gpt-oss-120b", 1892, 0.507, 0.540, 0.894),
    ("gpt-oss-20b", "gpt-oss-120b", 1412, 0.569, 0.795, 0.667),
];

/// Truncation robustness per method:
/// (model, [per method: truncated %, accuracy all %, accuracy non-truncated %]).
pub const TRUNCATION: [(&str, [[f64; 3]; 4]); 4] = [
    ("Qwen3-8B", [[0.00, 28.2, 28.2], [0.00, 27.9, 27.9], [0.00, 25.2, 25.2], [0.00, 30.0, 30.0]]),
    ("Qwen3-32B", [[0.00, 28.9, 28.9], [0.02, 31.4, 31.4], [0.00, 31.4, 31.4], [0.00, 38.2, 38.2]]),
    (
        "gpt-oss-20b",
        [[1.75, 51.8, 52.7], [1.53, 50.4, 51.1], [1.06, 53.7, 54.3], [0.83, 68.7, 69.3]],
    ),
    (
        "gpt-oss-120b",
        [[0.37, 52.1, 52.3], [0.23, 53.9, 54.1], [0.14, 50.0, 50.1], [0.11, 62.7, 62.7]],
    ),
];

/// Post-repair outcomes by trigger:
/// (model, trigger, rows, repair accuracy %, repair sat %).
pub const POST_REPAIR: [(&str, Trigger, u64, f64, f64); 15] = [
    ("Qwen3-8B", Trigger::AnswerLedgerConflict, 4131, 4.0, 100.0),
    ("Qwen3-8B", Trigger::IncompleteAssignment, 139, 65.5, 100.0),
    ("Qwen3-8B", Trigger::UnsatLedger, 1, 0.0, 100.0),
    ("Qwen3-32B", Trigger::AnswerLedgerConflict, 3643, 5.5, 99.6),
    ("Qwen3-32B", Trigger::IncompleteAssignment, 275, 69.8, 100.0),
    ("Qwen3-32B", Trigger::UnsatLedger, 87, 6.9, 17.2),
    ("Qwen3-32B", Trigger::ConstraintExtractionFailure, 2, 0.0, 100.0),
    ("gpt-oss-20b", Trigger::AnswerLedgerConflict, 2402, 33.3, 100.0),
    ("gpt-oss-20b", Trigger::IncompleteAssignment, 735, 33.3, 99.9),
    ("gpt-oss-20b", Trigger::AnswerParseFailure, 449, 23.4, 100.0),
    ("gpt-oss-20b", Trigger::ConstraintExtractionFailure, 429, 22.6, 100.0),
    ("gpt-oss-120b", Trigger::AnswerLedgerConflict, 2471, 21.2, 99.9),
    ("gpt-oss-120b", Trigger::AnswerParseFailure, 416, 18.5, 99.8),
    ("gpt-oss-120b", Trigger::ConstraintExtractionFailure, 32, 12.5, 96.9),
    ("gpt-oss-120b", Trigger::IncompleteAssignment, 30, 26.7, 100.0),
];

/// Accuracy four-tuple for one model, methods in canonical order.
pub fn accuracy_of(model: &str) -> Option<[f64; 4]> {
    ACCURACY.iter().find(|(m, _)| *m == model).map(|(_, a)| *a)
}

/// Synthetic residual rows matching a model's published channel counts:
/// one incorrect row per residual, channels assigned per the counts. Runs
/// through the same decomposition code path as real traces.
pub fn synthetic_residual_rows(model: &str) -> Option<Vec<TraceRow>> {
    let (_, [drift, unsat, other]) =
        *RESIDUAL_COUNTS.iter().find(|(m, _)| *m == model)?;
    let mut rows = Vec::with_capacity((drift + unsat + other) as usize);
    let channels = [
        (drift, Channel::Drift, true),
        (unsat, Channel::Contradiction, false),
        (other, Channel::Other, true),
    ];
    for (count, channel, sat) in channels {
        for _ in 0..count {
            let i = rows.len();
            rows.push(TraceRow {
                problem_id: format!("residual_{i:05}"),
                domain: DomainKind::LogicGrid,
                method: Method::MusRepair,
                agent: model.to_string(),
                turn: 1,
                attempts: 1,
                z3_sat: sat,
                triggers: vec![],
                channel,
                answer_correct: false,
                truncated: false,
                parsed: true,
                complete: true,
                parse_failure: None,
                satisfies_ledger: false,
                extraction_failed: false,
                attempt_records: vec![AttemptRecord {
                    triggers: vec![],
                    z3_sat: sat,
                    correct: false,
                    parsed: true,
                    complete: true,
                }],
            });
        }
    }
    Some(rows)
}

/// One consistency check between the shipped figures and this crate's
/// metric implementations.
#[derive(Debug, Clone)]
pub struct SelfCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: String) -> SelfCheck {
    SelfCheck { name: name.into(), pass, detail }
}

/// Recompute everything derivable from the frozen figures and compare.
pub fn selftest() -> Vec<SelfCheck> {
    let mut checks = Vec::new();

    for (model, quoted) in QUOTED_LIFTS {
        let [d, c, l, m] = accuracy_of(model).expect("quoted models are listed");
        let computed = relative_lift(d, c, l, m);
        checks.push(check(
            format!("relative lift {model}"),
            (computed - quoted).abs() <= 0.1,
            format!("computed {computed:.2}%, quoted {quoted}% (tolerance 0.1 pp)"),
        ));
    }

    for (model, shares) in RESIDUAL_SHARES {
        let rows = synthetic_residual_rows(model).expect("model is listed");
        let table = decompose_residuals(&rows);
        let row = &table[0];
        let computed = [
            row.drift_pct.unwrap_or(0.0),
            row.contradiction_pct.unwrap_or(0.0),
            row.other_pct.unwrap_or(0.0),
        ];
        let pass = computed.iter().zip(shares).all(|(c, s)| (c - s).abs() <= 0.05);
        checks.push(check(
            format!("residual decomposition {model}"),
            pass,
            format!("computed {computed:.1?}, published {shares:.1?} (tolerance 0.05 pp)"),
        ));
    }

    for (a, b, overlap, jaccard, share_a, share_b) in OVERLAP {
        let total = |model: &str| -> u64 {
            RESIDUAL_COUNTS
                .iter()
                .find(|(m, _)| *m == model)
                .map(|(_, counts)| counts.iter().sum())
                .expect("overlap models are listed")
        };
        let (n_a, n_b) = (total(a), total(b));
        let j = overlap as f64 / (n_a + n_b - overlap) as f64;
        let sa = overlap as f64 / n_a as f64;
        let sb = overlap as f64 / n_b as f64;
        let pass = (j - jaccard).abs() <= 5e-4 && (sa - share_a).abs() <= 5e-4
            && (sb - share_b).abs() <= 5e-4;
        checks.push(check(
            format!("overlap arithmetic {a} x {b}"),
            pass,
            format!("jaccard {j:.3}/{jaccard}, shares {sa:.3}/{share_a} and {sb:.3}/{share_b}"),
        ));
    }

    let qs = bh_correct(&[0.01, 0.02, 0.04]).expect("valid p-values");
    let expected = [0.03, 0.03, 0.04];
    let pass = qs.iter().zip(expected).all(|(q, e)| (q - e).abs() < 1e-12);
    checks.push(check(
        "benjamini-hochberg worked example",
        pass,
        format!("q {qs:?}, expected {expected:?}"),
    ));

    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::residual_overlap;

    #[test]
    fn every_selftest_check_passes() {
        for c in selftest() {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn synthetic_rows_match_the_frozen_counts() {
        for (model, counts) in RESIDUAL_COUNTS {
            let rows = synthetic_residual_rows(model).unwrap();
            assert_eq!(rows.len() as u64, counts.iter().sum::<u64>());
            let table = decompose_residuals(&rows);
            assert_eq!(table.len(), 1);
            assert_eq!(table[0].drift as u64, counts[0]);
            assert_eq!(table[0].contradiction as u64, counts[1]);
            assert_eq!(table[0].other as u64, counts[2]);
        }
        assert!(synthetic_residual_rows("nonexistent").is_none());
    }

    #[test]
    fn overlap_stats_agree_with_the_same_arithmetic() {
        // The residual_overlap implementation and the frozen-table
        // arithmetic must define jaccard and shares identically.
        let a = synthetic_residual_rows("gpt-oss-20b").unwrap();
        let mut b = a.clone();
        b.truncate(1000);
        let stats = residual_overlap(&a, &b);
        assert_eq!(stats.overlap, 1000);
        assert_eq!(stats.share_b, Some(1.0));
        assert!((stats.jaccard.unwrap() - 1000.0 / a.len() as f64).abs() < 1e-12);
    }

    #[test]
    fn quoted_lift_for_the_second_model_is_between_its_neighbors() {
        // The run with no quoted lift still has a computable one; make sure
        // the formula produces something sane for it.
        let [d, c, l, m] = accuracy_of("Qwen3-32B").unwrap();
        let lift = relative_lift(d, c, l, m);
        assert!((lift - 21.56).abs() < 0.05, "{lift}");
    }
}
