//! Trace rows and the JSONL trace file format.
//!
//! One row per (problem, method, turn) with the verifier's full verdict.
//! The first line of a trace file is a header carrying fingerprints of the
//! corpus and run configuration, so analyses can refuse to mix runs that
//! are not comparable.

use super::{Method, RunConfig, TurnOutcome};
use crate::domain::DomainKind;
use crate::generator::{Corpus, Problem};
use crate::verifier::{Channel, ParseFailure, Trigger};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const TRACE_FORMAT: &str = "driftbench-trace";
pub const TRACE_VERSION: u64 = 1;

/// Verdict summary for a single answer attempt within a turn.
///
/// Rows keep one record per attempt so trigger events can be counted
/// across retries, not just in the final state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub triggers: Vec<Trigger>,
    pub z3_sat: bool,
    pub correct: bool,
    pub parsed: bool,
    pub complete: bool,
}

/// Verdict of one turn of one problem under one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub problem_id: String,
    pub domain: DomainKind,
    pub method: Method,
    pub agent: String,
    pub turn: u32,
    /// Answer attempts used (1 plus repairs).
    pub attempts: u32,
    /// The agent's ledger was satisfiable after this turn's merge.
    pub z3_sat: bool,
    pub triggers: Vec<Trigger>,
    pub channel: Channel,
    pub answer_correct: bool,
    pub truncated: bool,
    pub parsed: bool,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parse_failure: Option<ParseFailure>,
    #[serde(default)]
    pub satisfies_ledger: bool,
    #[serde(default)]
    pub extraction_failed: bool,
    /// One record per answer attempt; the last mirrors the row itself.
    #[serde(default)]
    pub attempt_records: Vec<AttemptRecord>,
}

impl TraceRow {
    pub(super) fn new(
        problem: &Problem,
        method: Method,
        agent: &str,
        turn: u32,
        outcome: &TurnOutcome,
    ) -> TraceRow {
        let v = &outcome.verdict;
        TraceRow {
            problem_id: problem.id.clone(),
            domain: problem.domain,
            method,
            agent: agent.to_string(),
            turn,
            attempts: outcome.attempts,
            z3_sat: v.ledger_sat,
            triggers: v.triggers.clone(),
            channel: v.channel,
            answer_correct: v.correct,
            truncated: outcome.truncated,
            parsed: v.parsed,
            complete: v.complete,
            parse_failure: v.parse_failure,
            satisfies_ledger: v.satisfies_ledger,
            extraction_failed: outcome.extraction_failed,
            attempt_records: outcome.attempt_records.clone(),
        }
    }
}

/// First line of a trace file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: String,
    pub version: u64,
    pub agent: String,
    pub seed: u64,
    /// Fingerprint of the corpus the run used.
    pub corpus_sha256: String,
    /// Fingerprint of the run configuration (excluding worker count).
    pub config_sha256: String,
}

impl TraceHeader {
    pub fn new(agent: &str, corpus: &Corpus, config: &RunConfig) -> TraceHeader {
        TraceHeader {
            format: TRACE_FORMAT.to_string(),
            version: TRACE_VERSION,
            agent: agent.to_string(),
            seed: config.seed,
            corpus_sha256: corpus.digest(),
            config_sha256: config.digest(),
        }
    }
}

/// A full run: header plus sorted rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub header: TraceHeader,
    pub rows: Vec<TraceRow>,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("trace io: {0}")]
    Io(#[from] std::io::Error),
    #[error("trace line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("trace header mismatch: {0}")]
    Header(String),
    #[error("trace file is empty")]
    Empty,
}

pub fn write_trace(trace: &TraceFile, path: &Path) -> Result<(), TraceError> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    let header = serde_json::to_string(&trace.header)
        .map_err(|source| TraceError::Json { line: 1, source })?;
    writeln!(w, "{header}")?;
    for (i, row) in trace.rows.iter().enumerate() {
        let line = serde_json::to_string(row)
            .map_err(|source| TraceError::Json { line: i + 2, source })?;
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<TraceFile, TraceError> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut header: Option<TraceHeader> = None;
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if header.is_none() {
            let h: TraceHeader = serde_json::from_str(&line)
                .map_err(|source| TraceError::Json { line: i + 1, source })?;
            if h.format != TRACE_FORMAT || h.version != TRACE_VERSION {
                return Err(TraceError::Header(format!(
                    "expected {TRACE_FORMAT} v{TRACE_VERSION}, found {} v{}",
                    h.format, h.version
                )));
            }
            header = Some(h);
            continue;
        }
        rows.push(
            serde_json::from_str(&line)
                .map_err(|source| TraceError::Json { line: i + 1, source })?,
        );
    }
    Ok(TraceFile { header: header.ok_or(TraceError::Empty)?, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::MockAgent;
    use crate::generator::{GeneratorConfig, Split};
    use crate::harness::run_corpus;

    #[test]
    fn trace_files_round_trip() {
        let corpus = Corpus::generate(&GeneratorConfig::desk(2, 5)).unwrap();
        let agent = MockAgent::oracle(1);
        let config = RunConfig {
            methods: vec![Method::Direct, Method::MusRepair],
            split: Split::Test,
            ..RunConfig::default()
        };
        let trace = run_corpus(&agent, &corpus, &config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.jsonl");
        write_trace(&trace, &path).unwrap();
        let back = read_trace(&path).unwrap();
        assert_eq!(back, trace);
        let first = std::fs::read_to_string(&path).unwrap();
        assert!(first.starts_with("{\"format\":\"driftbench-trace\",\"version\":1,"));
    }

    #[test]
    fn row_field_names_are_stable() {
        let corpus = Corpus::generate(&GeneratorConfig::desk(2, 5)).unwrap();
        let agent = MockAgent::oracle(1);
        let config = RunConfig {
            methods: vec![Method::LedgerOnly],
            split: Split::Test,
            ..RunConfig::default()
        };
        let trace = run_corpus(&agent, &corpus, &config).unwrap();
        let value = serde_json::to_value(&trace.rows[0]).unwrap();
        let object = value.as_object().unwrap();
        for field in [
            "problem_id", "domain", "method", "agent", "turn", "attempts", "z3_sat",
            "triggers", "channel", "answer_correct", "truncated", "parsed", "complete",
        ] {
            assert!(object.contains_key(field), "missing {field}");
        }
    }

    #[test]
    fn mismatched_format_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "{\"format\":\"something-else\",\"version\":1,\"agent\":\"x\",\"seed\":0,\"corpus_sha256\":\"\",\"config_sha256\":\"\"}\n").unwrap();
        assert!(matches!(read_trace(&path), Err(TraceError::Header(_))));
    }
}
