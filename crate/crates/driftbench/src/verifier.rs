//! Turn-level verdicts.
//!
//! After every assistant answer the harness asks four questions, in order:
//! did the answer parse, is it a complete assignment, is the model's own
//! constraint ledger still satisfiable, and does the answer satisfy both
//! that ledger and the true constraint prefix? The answers become a set of
//! failure triggers and a single attributed failure channel:
//!
//! * `contradiction` — the model's ledger is unsatisfiable. It asserted
//!   something incompatible with what it already recorded.
//! * `drift` — the ledger is satisfiable and the answer is faithful to it,
//!   yet wrong: the ledger itself has silently diverged from the
//!   conversation.
//! * `other` — mechanical failures: unparseable answers, incomplete
//!   assignments, answers that contradict the model's own (satisfiable)
//!   ledger, or failed constraint extraction.
//!
//! Channels are mutually exclusive with priority contradiction > drift >
//! other; correct turns are `consistent`.

use crate::domain::{Assignment, Constraint, ConstraintKind, DomainError, DomainSchema, EventTime};
use crate::ledger::Ledger;
use crate::solver::{check_sat, extract_mus, satisfies, violated_constraints, SolverError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Why an answer failed to parse into an assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseFailure {
    /// Not valid JSON at all.
    NotJson,
    /// Valid JSON with the wrong structure for this domain.
    WrongShape,
    /// Mentions an entity or category the schema does not define.
    UnknownEntity,
    /// A value outside the schema's ranges (seat numbers, slots, grid values).
    OutOfRangeValue,
}

impl ParseFailure {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParseFailure::NotJson => "not_json",
            ParseFailure::WrongShape => "wrong_shape",
            ParseFailure::UnknownEntity => "unknown_entity",
            ParseFailure::OutOfRangeValue => "out_of_range_value",
        }
    }
}

/// Observable failure signals on a turn. A turn can raise several.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    AnswerLedgerConflict,
    UnsatLedger,
    IncompleteAssignment,
    AnswerParseFailure,
    ConstraintExtractionFailure,
}

impl Trigger {
    pub const ALL: [Trigger; 5] = [
        Trigger::AnswerLedgerConflict,
        Trigger::UnsatLedger,
        Trigger::IncompleteAssignment,
        Trigger::AnswerParseFailure,
        Trigger::ConstraintExtractionFailure,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Trigger::AnswerLedgerConflict => "answer_ledger_conflict",
            Trigger::UnsatLedger => "unsat_ledger",
            Trigger::IncompleteAssignment => "incomplete_assignment",
            Trigger::AnswerParseFailure => "answer_parse_failure",
            Trigger::ConstraintExtractionFailure => "constraint_extraction_failure",
        }
    }
}

/// Failure attribution for one turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Contradiction,
    Drift,
    Other,
    Consistent,
}

impl Channel {
    pub const ALL: [Channel; 4] =
        [Channel::Contradiction, Channel::Drift, Channel::Other, Channel::Consistent];

    pub fn as_str(&self) -> &'static str {
        match self {
            Channel::Contradiction => "contradiction",
            Channel::Drift => "drift",
            Channel::Other => "other",
            Channel::Consistent => "consistent",
        }
    }
}

/// Everything decided about one turn.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnVerdict {
    pub parsed: bool,
    pub parse_failure: Option<ParseFailure>,
    pub assignment: Option<Assignment>,
    /// Parsed into a complete, well-formed assignment.
    pub complete: bool,
    /// The model's own ledger is satisfiable.
    pub ledger_sat: bool,
    /// Answer satisfies the model's own ledger (requires complete + sat ledger).
    pub satisfies_ledger: bool,
    /// Answer satisfies the true constraint prefix: the turn's accuracy bit.
    pub correct: bool,
    pub triggers: Vec<Trigger>,
    pub channel: Channel,
}

/// If the entire trimmed text is a single fenced code block, return its
/// body; otherwise return the trimmed text unchanged. Fences elsewhere in
/// the text (prose with an embedded block) are left alone.
fn unwrap_fence(text: &str) -> &str {
    let t = text.trim();
    let Some(rest) = t.strip_prefix("```") else { return t };
    let Some(inner) = rest.strip_suffix("```") else { return t };
    // Drop a language tag line ("json", "", ...) but not content.
    let body = match inner.split_once('\n') {
        Some((first, tail)) if first.trim().chars().all(|c| c.is_ascii_alphanumeric()) => tail,
        _ => inner,
    };
    if body.contains("```") {
        return t;
    }
    body.trim()
}

/// Parse an answer into an assignment for `schema`.
///
/// Partial assignments parse fine (completeness is judged separately), but
/// unknown entities and out-of-range values are parse failures: such an
/// answer is not a candidate solution of this problem at all.
pub fn parse_answer(text: &str, schema: &DomainSchema) -> Result<Assignment, ParseFailure> {
    let body = unwrap_fence(text);
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|_| ParseFailure::NotJson)?;
    let assignment = match schema {
        DomainSchema::LogicGrid(_) => {
            let map: BTreeMap<String, BTreeMap<String, String>> =
                serde_json::from_value(value).map_err(|_| ParseFailure::WrongShape)?;
            Assignment::LogicGrid(map)
        }
        DomainSchema::Scheduling(_) => {
            let map: BTreeMap<String, EventTime> =
                serde_json::from_value(value).map_err(|_| ParseFailure::WrongShape)?;
            Assignment::Scheduling(map)
        }
        DomainSchema::Seating(_) => {
            let map: BTreeMap<String, u32> =
                serde_json::from_value(value).map_err(|_| ParseFailure::WrongShape)?;
            Assignment::Seating(map)
        }
    };
    let report = assignment.schema_validate(schema).map_err(|_| ParseFailure::WrongShape)?;
    if !report.unknown.is_empty() {
        return Err(ParseFailure::UnknownEntity);
    }
    if !report.out_of_range.is_empty() {
        return Err(ParseFailure::OutOfRangeValue);
    }
    Ok(assignment)
}

/// Inputs for judging one turn.
pub struct TurnInputs<'a> {
    pub schema: &'a DomainSchema,
    /// The model's own ledger after this turn's merge, L_t.
    pub ledger: &'a Ledger,
    /// The true constraint prefix through this turn.
    pub gold: &'a [Constraint],
    pub answer_text: &'a str,
    /// Whether this turn's constraint extraction produced nothing usable.
    pub extraction_failed: bool,
}

/// Judge one turn. See the module docs for the trigger and channel rules.
pub fn verify_turn(inputs: &TurnInputs) -> Result<TurnVerdict, DomainError> {
    let TurnInputs { schema, ledger, gold, answer_text, extraction_failed } = inputs;

    let (assignment, parse_failure) = match parse_answer(answer_text, schema) {
        Ok(a) => (Some(a), None),
        Err(reason) => (None, Some(reason)),
    };
    let parsed = assignment.is_some();
    let complete = match &assignment {
        Some(a) => a.is_complete(schema)?,
        None => false,
    };
    let ledger_sat = check_sat(schema, ledger.as_slice())?.sat;

    let satisfies_ledger = match &assignment {
        Some(a) if complete && ledger_sat => satisfies(a, ledger.as_slice(), schema)?,
        _ => false,
    };
    let correct = match &assignment {
        Some(a) if complete => satisfies(a, gold, schema)?,
        _ => false,
    };

    let mut triggers = Vec::new();
    if !ledger_sat {
        triggers.push(Trigger::UnsatLedger);
    }
    if !parsed {
        triggers.push(Trigger::AnswerParseFailure);
    }
    if parsed && !complete {
        triggers.push(Trigger::IncompleteAssignment);
    }
    if complete && ledger_sat && !satisfies_ledger {
        triggers.push(Trigger::AnswerLedgerConflict);
    }
    if *extraction_failed {
        triggers.push(Trigger::ConstraintExtractionFailure);
    }
    triggers.sort();
    triggers.dedup();

    let channel = if correct {
        Channel::Consistent
    } else if !ledger_sat {
        Channel::Contradiction
    } else if satisfies_ledger {
        // Faithful to a satisfiable ledger, yet wrong: the ledger drifted.
        Channel::Drift
    } else {
        Channel::Other
    };

    Ok(TurnVerdict {
        parsed,
        parse_failure,
        assignment,
        complete,
        ledger_sat,
        satisfies_ledger,
        correct,
        triggers,
        channel,
    })
}

/// Parse a constraint-extraction reply: a JSON array of
/// `{"type": "...", "args": [...]}` objects. Returns `None` when anything
/// in the reply is unusable — malformed JSON, an unknown template, bad
/// arguments, or a constraint invalid for the schema. Extra object fields
/// (a model echoing `"turn"`, say) are tolerated.
pub fn parse_extraction(text: &str, schema: &DomainSchema) -> Option<Vec<ConstraintKind>> {
    let body = unwrap_fence(text);
    let value: serde_json::Value = serde_json::from_str(body).ok()?;
    let items = value.as_array()?;
    let mut kinds = Vec::with_capacity(items.len());
    for item in items {
        let obj = item.as_object()?;
        let template = obj.get("type")?.as_str()?;
        let args = obj.get("args")?.as_array()?;
        let kind = ConstraintKind::from_raw(template, args)?;
        kind.validate(schema).ok()?;
        kinds.push(kind);
    }
    Some(kinds)
}

/// Verification feedback handed back to the model when a turn needs repair.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RepairPacket {
    pub triggers: Vec<Trigger>,
    /// Minimal unsatisfiable subset of the ledger, as canonical keys.
    pub mus: Vec<String>,
    /// Satisfiable-ledger entries the answer violates, as canonical keys.
    pub violated: Vec<String>,
    pub parse_failure: Option<ParseFailure>,
    /// Completeness defects of the parsed answer, human-readable.
    pub defects: Option<String>,
}

/// Build the repair feedback for a verdict, or `None` when nothing fired.
/// The minimal conflict set is computed only when the ledger is
/// unsatisfiable; violated entries only when the answer conflicts with a
/// satisfiable ledger.
pub fn build_repair_packet(
    schema: &DomainSchema,
    ledger: &Ledger,
    verdict: &TurnVerdict,
) -> Result<Option<RepairPacket>, SolverError> {
    if verdict.triggers.is_empty() {
        return Ok(None);
    }
    let mut packet = RepairPacket {
        triggers: verdict.triggers.clone(),
        parse_failure: verdict.parse_failure,
        ..RepairPacket::default()
    };
    if !verdict.ledger_sat {
        packet.mus = extract_mus(schema, ledger.as_slice())?
            .iter()
            .map(|c| c.canonical_key().0)
            .collect();
    }
    if verdict.triggers.contains(&Trigger::AnswerLedgerConflict) {
        if let Some(a) = &verdict.assignment {
            packet.violated = violated_constraints(a, ledger.as_slice(), schema)?
                .iter()
                .map(|c| c.canonical_key().0)
                .collect();
        }
    }
    if verdict.triggers.contains(&Trigger::IncompleteAssignment) {
        if let Some(a) = &verdict.assignment {
            packet.defects = Some(a.schema_validate(schema)?.describe());
        }
    }
    Ok(Some(packet))
}
