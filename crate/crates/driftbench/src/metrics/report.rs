//! Deterministic report emission: every analysis table as CSV, a single
//! Markdown digest, and a machine-readable JSON bundle echoing the
//! configuration that produced it. Byte-identical output for identical
//! inputs — tables are sorted, floats formatted with fixed precision, and
//! no timestamps or environment details are recorded.

use super::inference::{compare_methods, InferenceError, MethodComparison};
use super::{
    decompose_residuals, lift_table, residual_overlap, retention, trigger_table, truncation_split,
    turn_accuracy, AccuracyCell, DecompositionRow, LiftRow, OverlapStats, RetentionRow,
    TriggerRow, TruncationRow,
};
use crate::harness::{Method, TraceFile, TraceRow};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("report io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("no trace files supplied")]
    NoTraces,
    #[error("duplicate trace label {0:?}")]
    DuplicateLabel(String),
    #[error("traces {a:?} and {b:?} were produced from different corpora")]
    CorpusMismatch { a: String, b: String },
}

/// Provenance echo for one input trace file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMeta {
    pub label: String,
    pub agent: String,
    pub corpus_sha256: String,
    pub config_sha256: String,
    pub rows: usize,
}

/// Residual-error overlap between two labeled runs under one method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapRow {
    pub label_a: String,
    pub label_b: String,
    pub method: Method,
    #[serde(flatten)]
    pub stats: OverlapStats,
}

/// Everything the analysis produces, ready for serialization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub baseline: Method,
    pub bootstrap_replicates: u32,
    pub permutation_rounds: u32,
    pub seed: u64,
    pub corpus_sha256: String,
    pub traces: Vec<TraceMeta>,
    pub accuracy: Vec<AccuracyCell>,
    pub accuracy_by_domain: Vec<AccuracyCell>,
    pub accuracy_by_turn: Vec<AccuracyCell>,
    pub retention: Vec<RetentionRow>,
    pub lift: Vec<LiftRow>,
    pub decomposition: Vec<DecompositionRow>,
    pub triggers: Vec<TriggerRow>,
    pub inference: Vec<MethodComparison>,
    pub truncation: Vec<TruncationRow>,
    pub overlap: Vec<OverlapRow>,
}

/// Run every analysis over the labeled trace files. Rows are re-tagged
/// with their file's label so runs of the same agent stay distinguishable.
pub fn build_report(
    traces: &[(String, TraceFile)],
    baseline: Method,
    replicates: u32,
    rounds: u32,
    seed: u64,
) -> Result<Report, ReportError> {
    let Some(((first_label, first), rest)) = traces.split_first() else {
        return Err(ReportError::NoTraces);
    };
    for (label, trace) in rest {
        if trace.header.corpus_sha256 != first.header.corpus_sha256 {
            return Err(ReportError::CorpusMismatch {
                a: first_label.clone(),
                b: label.clone(),
            });
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for (label, _) in traces {
        if !seen.insert(label) {
            return Err(ReportError::DuplicateLabel(label.clone()));
        }
    }

    let mut labeled: Vec<(String, Vec<TraceRow>)> = Vec::new();
    for (label, trace) in traces {
        let mut rows = trace.rows.clone();
        for row in &mut rows {
            row.agent = label.clone();
        }
        labeled.push((label.clone(), rows));
    }
    let combined: Vec<TraceRow> = labeled.iter().flat_map(|(_, rows)| rows.clone()).collect();

    let mut overlap = Vec::new();
    for i in 0..labeled.len() {
        for j in i + 1..labeled.len() {
            for method in Method::ALL {
                let side = |rows: &[TraceRow]| -> Vec<TraceRow> {
                    rows.iter().filter(|r| r.method == method).cloned().collect()
                };
                let a = side(&labeled[i].1);
                let b = side(&labeled[j].1);
                if a.is_empty() || b.is_empty() {
                    continue;
                }
                overlap.push(OverlapRow {
                    label_a: labeled[i].0.clone(),
                    label_b: labeled[j].0.clone(),
                    method,
                    stats: residual_overlap(&a, &b),
                });
            }
        }
    }

    Ok(Report {
        baseline,
        bootstrap_replicates: replicates,
        permutation_rounds: rounds,
        seed,
        corpus_sha256: first.header.corpus_sha256.clone(),
        traces: traces
            .iter()
            .map(|(label, t)| TraceMeta {
                label: label.clone(),
                agent: t.header.agent.clone(),
                corpus_sha256: t.header.corpus_sha256.clone(),
                config_sha256: t.header.config_sha256.clone(),
                rows: t.rows.len(),
            })
            .collect(),
        accuracy: turn_accuracy(&combined, false, false),
        accuracy_by_domain: turn_accuracy(&combined, true, false),
        accuracy_by_turn: turn_accuracy(&combined, false, true),
        retention: retention(&combined),
        lift: lift_table(&combined),
        decomposition: decompose_residuals(&combined),
        triggers: trigger_table(&combined),
        inference: compare_methods(&combined, baseline, replicates, rounds, seed)?,
        truncation: truncation_split(&combined),
        overlap,
    })
}

fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn csv_file(path: &Path, header: &str, rows: Vec<Vec<String>>) -> std::io::Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let escaped: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
        out.push_str(&escaped.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)
}

fn opt(v: Option<f64>, precision: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.precision$}"))
}

fn accuracy_rows(cells: &[AccuracyCell]) -> Vec<Vec<String>> {
    cells
        .iter()
        .map(|c| {
            vec![
                c.agent.clone(),
                c.method.as_str().to_string(),
                c.domain.map_or_else(|| "-".into(), |d| d.as_str().to_string()),
                c.turn.map_or_else(|| "-".into(), |t| t.to_string()),
                c.n.to_string(),
                format!("{:.2}", c.accuracy_pct),
            ]
        })
        .collect()
}

/// Write every table plus the Markdown digest and JSON bundle into `dir`,
/// returning the paths written.
pub fn write_report(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let emit = |name: &str, header: &str, rows: Vec<Vec<String>>| -> std::io::Result<PathBuf> {
        let path = dir.join(name);
        csv_file(&path, header, rows)?;
        Ok(path)
    };

    const ACC_HEADER: &str = "agent,method,domain,turn,n,accuracy_pct";
    written.push(emit("accuracy.csv", ACC_HEADER, accuracy_rows(&report.accuracy))?);
    written.push(emit(
        "accuracy_by_domain.csv",
        ACC_HEADER,
        accuracy_rows(&report.accuracy_by_domain),
    )?);
    written.push(emit("accuracy_by_turn.csv", ACC_HEADER, accuracy_rows(&report.accuracy_by_turn))?);

    written.push(emit(
        "retention.csv",
        "agent,method,turn1_pct,turn10_pct,retain_pct",
        report
            .retention
            .iter()
            .map(|r| {
                vec![
                    r.agent.clone(),
                    r.method.as_str().to_string(),
                    opt(r.turn1_pct, 2),
                    opt(r.turn10_pct, 2),
                    opt(r.retain_pct, 1),
                ]
            })
            .collect(),
    )?);

    written.push(emit(
        "lift.csv",
        "agent,direct_pct,cot_pct,ledger_only_pct,mus_repair_pct,lift_pct",
        report
            .lift
            .iter()
            .map(|r| {
                vec![
                    r.agent.clone(),
                    opt(r.direct_pct, 2),
                    opt(r.cot_pct, 2),
                    opt(r.ledger_pct, 2),
                    opt(r.mus_pct, 2),
                    opt(r.lift_pct, 1),
                ]
            })
            .collect(),
    )?);

    written.push(emit(
        "decomposition.csv",
        "agent,method,residuals,drift,contradiction,other,drift_pct,contradiction_pct,other_pct",
        report
            .decomposition
            .iter()
            .map(|r| {
                vec![
                    r.agent.clone(),
                    r.method.as_str().to_string(),
                    r.residuals.to_string(),
                    r.drift.to_string(),
                    r.contradiction.to_string(),
                    r.other.to_string(),
                    opt(r.drift_pct, 1),
                    opt(r.contradiction_pct, 1),
                    opt(r.other_pct, 1),
                ]
            })
            .collect(),
    )?);

    written.push(emit(
        "triggers.csv",
        "agent,method,trigger,events,repaired_rows,post_repair_accuracy_pct,post_repair_sat_pct",
        report
            .triggers
            .iter()
            .map(|r| {
                vec![
                    r.agent.clone(),
                    r.method.as_str().to_string(),
                    r.trigger.as_str().to_string(),
                    r.events.to_string(),
                    r.repaired_rows.to_string(),
                    opt(r.post_repair_accuracy_pct, 1),
                    opt(r.post_repair_sat_pct, 1),
                ]
            })
            .collect(),
    )?);

    written.push(emit(
        "inference.csv",
        "agent,method,baseline,n_problems,excluded,delta_pp,ci_lo_pp,ci_hi_pp,p,q",
        report
            .inference
            .iter()
            .map(|c| {
                vec![
                    c.agent.clone(),
                    c.method.as_str().to_string(),
                    c.baseline.as_str().to_string(),
                    c.n_problems.to_string(),
                    c.excluded.to_string(),
                    format!("{:.2}", c.result.delta_pp),
                    format!("{:.2}", c.result.ci_lo_pp),
                    format!("{:.2}", c.result.ci_hi_pp),
                    format!("{:.4}", c.result.p),
                    format!("{:.4}", c.result.q),
                ]
            })
            .collect(),
    )?);

    written.push(emit(
        "truncation.csv",
        "agent,method,n,truncated_n,truncated_pct,accuracy_all_pct,accuracy_nontruncated_pct",
        report
            .truncation
            .iter()
            .map(|r| {
                vec![
                    r.agent.clone(),
                    r.method.as_str().to_string(),
                    r.n.to_string(),
                    r.truncated_n.to_string(),
                    format!("{:.2}", r.truncated_pct),
                    format!("{:.2}", r.accuracy_all_pct),
                    opt(r.accuracy_nontruncated_pct, 2),
                ]
            })
            .collect(),
    )?);

    written.push(emit(
        "overlap.csv",
        "label_a,label_b,method,n_a,n_b,overlap,union,jaccard,share_a,share_b",
        report
            .overlap
            .iter()
            .map(|r| {
                vec![
                    r.label_a.clone(),
                    r.label_b.clone(),
                    r.method.as_str().to_string(),
                    r.stats.n_a.to_string(),
                    r.stats.n_b.to_string(),
                    r.stats.overlap.to_string(),
                    r.stats.union.to_string(),
                    opt(r.stats.jaccard, 3),
                    opt(r.stats.share_a, 3),
                    opt(r.stats.share_b, 3),
                ]
            })
            .collect(),
    )?);

    let md_path = dir.join("report.md");
    std::fs::write(&md_path, markdown(report))?;
    written.push(md_path);

    let json_path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    std::fs::write(&json_path, json)?;
    written.push(json_path);

    Ok(written)
}

fn md_table(out: &mut String, headers: &[&str], rows: &[Vec<String>]) {
    out.push_str("| ");
    out.push_str(&headers.join(" | "));
    out.push_str(" |\n|");
    for _ in headers {
        out.push_str(" --- |");
    }
    out.push('\n');
    for row in rows {
        out.push_str("| ");
        out.push_str(&row.join(" | "));
        out.push_str(" |\n");
    }
    out.push('\n');
}

fn markdown(report: &Report) -> String {
    let mut out = String::new();
    out.push_str("# Run analysis\n\n");
    out.push_str(&format!(
        "Baseline: `{}`. Bootstrap replicates: {}. Permutation rounds: {}. Seed: {}.\n\nCorpus `{}`.\n\n",
        report.baseline.as_str(),
        report.bootstrap_replicates,
        report.permutation_rounds,
        report.seed,
        report.corpus_sha256,
    ));

    out.push_str("## Inputs\n\n");
    md_table(
        &mut out,
        &["label", "agent", "rows", "config"],
        &report
            .traces
            .iter()
            .map(|t| {
                vec![
                    t.label.clone(),
                    t.agent.clone(),
                    t.rows.to_string(),
                    t.config_sha256[..12].to_string(),
                ]
            })
            .collect::<Vec<_>>(),
    );

    out.push_str("## Accuracy\n\n");
    md_table(
        &mut out,
        &["agent", "method", "n", "accuracy %"],
        &report
            .accuracy
            .iter()
            .map(|c| {
                vec![
                    c.agent.clone(),
                    c.method.as_str().to_string(),
                    c.n.to_string(),
                    format!("{:.2}", c.accuracy_pct),
                ]
            })
            .collect::<Vec<_>>(),
    );

    out.push_str("## Retention (turn 10 / turn 1)\n\n");
    md_table(
        &mut out,
        &["agent", "method", "turn 1 %", "turn 10 %", "retain %"],
        &report
            .retention
            .iter()
            .map(|r| {
                vec![
                    r.agent.clone(),
                    r.method.as_str().to_string(),
                    opt(r.turn1_pct, 2),
                    opt(r.turn10_pct, 2),
                    opt(r.retain_pct, 1),
                ]
            })
            .collect::<Vec<_>>(),
    );

    out.push_str("## Relative lift\n\n");
    md_table(
        &mut out,
        &["agent", "direct", "cot", "ledger_only", "mus_repair", "lift %"],
        &report
            .lift
            .iter()
            .map(|r| {
                vec![
                    r.agent.clone(),
                    opt(r.direct_pct, 2),
                    opt(r.cot_pct, 2),
                    opt(r.ledger_pct, 2),
                    opt(r.mus_pct, 2),
                    opt(r.lift_pct, 1),
                ]
            })
            .collect::<Vec<_>>(),
    );

    out.push_str("## Residual decomposition\n\n");
    md_table(
        &mut out,
        &["agent", "method", "residuals", "drift", "contradiction", "other", "drift %", "contradiction %", "other %"],
        &report
            .decomposition
            .iter()
            .map(|r| {
                vec![
                    r.agent.clone(),
                    r.method.as_str().to_string(),
                    r.residuals.to_string(),
                    r.drift.to_string(),
                    r.contradiction.to_string(),
                    r.other.to_string(),
                    opt(r.drift_pct, 1),
                    opt(r.contradiction_pct, 1),
                    opt(r.other_pct, 1),
                ]
            })
            .collect::<Vec<_>>(),
    );

    out.push_str("## Triggers\n\n");
    md_table(
        &mut out,
        &["agent", "method", "trigger", "events", "repaired rows", "post-repair acc %", "post-repair sat %"],
        &report
            .triggers
            .iter()
            .map(|r| {
                vec![
                    r.agent.clone(),
                    r.method.as_str().to_string(),
                    r.trigger.as_str().to_string(),
                    r.events.to_string(),
                    r.repaired_rows.to_string(),
                    opt(r.post_repair_accuracy_pct, 1),
                    opt(r.post_repair_sat_pct, 1),
                ]
            })
            .collect::<Vec<_>>(),
    );

    out.push_str("## Paired comparisons vs baseline\n\n");
    md_table(
        &mut out,
        &["agent", "method", "n", "Δ pp", "95% CI", "p", "q"],
        &report
            .inference
            .iter()
            .map(|c| {
                vec![
                    c.agent.clone(),
                    c.method.as_str().to_string(),
                    c.n_problems.to_string(),
                    format!("{:+.2}", c.result.delta_pp),
                    format!("[{:+.2}, {:+.2}]", c.result.ci_lo_pp, c.result.ci_hi_pp),
                    format!("{:.4}", c.result.p),
                    format!("{:.4}", c.result.q),
                ]
            })
            .collect::<Vec<_>>(),
    );

    out.push_str("## Truncation robustness\n\n");
    md_table(
        &mut out,
        &["agent", "method", "truncated %", "acc all %", "acc non-trunc %"],
        &report
            .truncation
            .iter()
            .map(|r| {
                vec![
                    r.agent.clone(),
                    r.method.as_str().to_string(),
                    format!("{:.2}", r.truncated_pct),
                    format!("{:.2}", r.accuracy_all_pct),
                    opt(r.accuracy_nontruncated_pct, 2),
                ]
            })
            .collect::<Vec<_>>(),
    );

    if !report.overlap.is_empty() {
        out.push_str("## Residual overlap\n\n");
        md_table(
            &mut out,
            &["a", "b", "method", "overlap", "jaccard", "share a", "share b"],
            &report
                .overlap
                .iter()
                .map(|r| {
                    vec![
                        r.label_a.clone(),
                        r.label_b.clone(),
                        r.method.as_str().to_string(),
                        r.stats.overlap.to_string(),
                        opt(r.stats.jaccard, 3),
                        opt(r.stats.share_a, 3),
                        opt(r.stats.share_b, 3),
                    ]
                })
                .collect::<Vec<_>>(),
        );
    }

    out
}
