//! Prompt rendering.
//!
//! All call text an agent ever sees is produced here, from fixed template
//! files plus deterministic formatting of the problem state — identical
//! input, identical prompt, byte for byte.

use crate::domain::{DomainSchema, TableShape};
use crate::harness::Method;
use crate::verifier::RepairPacket;
use std::fmt::Write;

pub const TRUNCATION_RETRY: &str = include_str!("../../templates/retry_truncation.txt");
pub const EXTRACT_SYSTEM: &str = include_str!("../../templates/extract.txt");

const ANSWER_DIRECT: &str = include_str!("../../templates/answer_direct.txt");
const ANSWER_COT: &str = include_str!("../../templates/answer_cot.txt");
const ANSWER_LEDGER: &str = include_str!("../../templates/answer_ledger.txt");

pub fn answer_system(method: Method) -> &'static str {
    match method {
        Method::Direct => ANSWER_DIRECT,
        Method::Cot => ANSWER_COT,
        Method::LedgerOnly | Method::MusRepair => ANSWER_LEDGER,
    }
}

/// The shared "Domain:/Entities:" block describing the puzzle's rules.
fn domain_block(schema: &DomainSchema) -> String {
    let mut out = String::new();
    match schema {
        DomainSchema::LogicGrid(s) => {
            writeln!(
                out,
                "Domain: logic_grid (each person gets exactly one value per category; \
                 within a category no two people share a value)"
            )
            .unwrap();
            writeln!(out, "Entities: {}", s.entities.join(", ")).unwrap();
            let cats: Vec<String> = s
                .categories
                .iter()
                .map(|c| format!("{}: {}", c.name, c.values.join(", ")))
                .collect();
            write!(out, "Categories: {}", cats.join("; ")).unwrap();
        }
        DomainSchema::Scheduling(s) => {
            writeln!(
                out,
                "Domain: scheduling (each event starts at a slot and runs for its duration; \
                 an event starting at slot s with duration d occupies slots s through s+d-1 \
                 and must end by slot {})",
                s.slot_max
            )
            .unwrap();
            writeln!(out, "Entities: {}", s.events.join(", ")).unwrap();
            write!(
                out,
                "Slots: {} through {}; durations: 1 through {}",
                s.slot_min, s.slot_max, s.max_duration
            )
            .unwrap();
        }
        DomainSchema::Seating(s) => {
            let n = s.seat_count();
            match s.table {
                TableShape::Round => writeln!(
                    out,
                    "Domain: seating (round table, seats 1 through {n} clockwise; \
                     seat {n} is next to seat 1)"
                )
                .unwrap(),
                TableShape::Rectangular => writeln!(
                    out,
                    "Domain: seating (rectangular table, two rows of {half}; \
                     seats 1 through {half} along one side, seats {next} through {n} \
                     directly opposite them)",
                    half = n / 2,
                    next = n / 2 + 1
                )
                .unwrap(),
            }
            write!(out, "Entities: {}", s.people.join(", ")).unwrap();
        }
    }
    out
}

fn answer_format(schema: &DomainSchema) -> String {
    match schema {
        DomainSchema::LogicGrid(s) => {
            let person = &s.entities[0];
            let cells: Vec<String> = s
                .categories
                .iter()
                .map(|c| format!("\"{}\": \"{}\"", c.name, c.values[0]))
                .collect();
            format!(
                "Answer format: one JSON object covering every person and category, like \
                 {{\"{person}\": {{{}}}, ...}}",
                cells.join(", ")
            )
        }
        DomainSchema::Scheduling(s) => format!(
            "Answer format: one JSON object covering every event, like \
             {{\"{}\": {{\"start\": 1, \"duration\": 1}}, ...}}",
            s.events[0]
        ),
        DomainSchema::Seating(s) => format!(
            "Answer format: one JSON object mapping every person to a seat number, like \
             {{\"{}\": 1, ...}}",
            s.people[0]
        ),
    }
}

/// The constraint templates an extraction may use, in this domain.
fn constraint_menu(schema: &DomainSchema) -> &'static str {
    match schema {
        DomainSchema::LogicGrid(_) => {
            "eq_value(person, category, value); neq_value(person, category, value); \
             lt_attr(a, b, category) where a's value comes earlier than b's in the \
             category's listed order"
        }
        DomainSchema::Scheduling(_) => {
            "at_slot(event, slot); not_at_slot(event, slot); same_slot(a, b) meaning equal \
             start slots; not_simultaneous(a, b) meaning different start slots; \
             duration_eq(event, duration); start_between(event, lo, hi) inclusive"
        }
        DomainSchema::Seating(_) => {
            "at_position(person, seat); not_at_position(person, seat); adjacent(a, b); \
             not_adjacent(a, b); min_separation(a, b, min) in seats of table distance; \
             opposite(a, b); left_of(a, b) meaning b sits immediately to a's left"
        }
    }
}

fn repair_block(packet: &RepairPacket) -> String {
    let mut out = String::from("Repair signal:\nREPAIR REQUIRED\n");
    let triggers: Vec<&str> = packet.triggers.iter().map(|t| t.as_str()).collect();
    writeln!(out, "Verification failed: {}.", triggers.join(", ")).unwrap();
    if !packet.mus.is_empty() {
        out.push_str("Minimal conflicting constraint set:\n");
        for key in &packet.mus {
            writeln!(out, "- {key}").unwrap();
        }
    }
    if !packet.violated.is_empty() {
        out.push_str("Your answer violates:\n");
        for key in &packet.violated {
            writeln!(out, "- {key}").unwrap();
        }
    }
    if let Some(reason) = packet.parse_failure {
        writeln!(out, "Answer parse failure: {}.", reason.as_str()).unwrap();
    }
    if let Some(defects) = &packet.defects {
        writeln!(out, "Assignment defects: {defects}.").unwrap();
    }
    out.push_str("Re-state this turn's constraints correctly and answer again.");
    out
}

/// Inputs for one answer call's user message.
pub struct AnswerPrompt<'a> {
    pub method: Method,
    pub schema: &'a DomainSchema,
    /// Every user utterance through the current turn, oldest first.
    pub utterances: &'a [String],
    /// Serialized ledger before this turn's merge (ledger methods only).
    pub ledger_text: &'a str,
    pub repair: Option<&'a RepairPacket>,
}

pub fn answer_user(p: &AnswerPrompt) -> String {
    let mut out = domain_block(p.schema);
    out.push('\n');
    match p.method {
        Method::Direct | Method::Cot => {
            out.push_str("Conversation so far:\n");
            for (i, u) in p.utterances.iter().enumerate() {
                writeln!(out, "{}. {u}", i + 1).unwrap();
            }
        }
        Method::LedgerOnly | Method::MusRepair => {
            out.push_str("Current ledger:\n");
            if p.ledger_text.is_empty() {
                out.push_str("(empty)\n");
            } else {
                out.push_str(p.ledger_text);
                out.push('\n');
            }
            out.push_str("New constraints from user:\n");
            if let Some(last) = p.utterances.last() {
                writeln!(out, "{last}").unwrap();
            }
        }
    }
    if let Some(packet) = p.repair {
        out.push('\n');
        out.push_str(&repair_block(packet));
        out.push('\n');
    }
    out.push('\n');
    out.push_str(&answer_format(p.schema));
    out
}

pub fn extract_user(
    schema: &DomainSchema,
    utterance: &str,
    repair: Option<&RepairPacket>,
) -> String {
    let mut out = domain_block(schema);
    out.push('\n');
    out.push_str("Message:\n");
    out.push_str(utterance);
    out.push('\n');
    if let Some(packet) = repair {
        out.push('\n');
        out.push_str(&repair_block(packet));
        out.push('\n');
    }
    writeln!(out, "\nConstraint templates: {}", constraint_menu(schema)).unwrap();
    out.push_str(
        "Reply with a JSON array of {\"type\", \"args\"} objects covering every requirement \
         in the message.",
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{SeatingSchema, SchedulingSchema};
    use crate::verifier::Trigger;

    fn seating() -> DomainSchema {
        DomainSchema::Seating(SeatingSchema {
            people: ["Ana", "Bo", "Cy", "Dee", "Eli", "Fay"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            table: TableShape::Round,
        })
    }

    #[test]
    fn direct_prompt_carries_whole_conversation() {
        let utterances = vec!["Seat Ana at seat 1.".to_string(), "Bo is next to Ana.".to_string()];
        let text = answer_user(&AnswerPrompt {
            method: Method::Direct,
            schema: &seating(),
            utterances: &utterances,
            ledger_text: "",
            repair: None,
        });
        assert!(text.contains("1. Seat Ana at seat 1."));
        assert!(text.contains("2. Bo is next to Ana."));
        assert!(!text.contains("Current ledger"));
        assert!(text.contains("Answer format"));
    }

    #[test]
    fn ledger_prompt_carries_ledger_and_latest_message_only() {
        let utterances = vec!["Seat Ana at seat 1.".to_string(), "Bo is next to Ana.".to_string()];
        let text = answer_user(&AnswerPrompt {
            method: Method::LedgerOnly,
            schema: &seating(),
            utterances: &utterances,
            ledger_text: "[turn 1] at_position(ana,1)",
            repair: None,
        });
        assert!(text.contains("Current ledger:\n[turn 1] at_position(ana,1)"));
        assert!(text.contains("New constraints from user:\nBo is next to Ana."));
        assert!(!text.contains("1. Seat Ana at seat 1."));
    }

    #[test]
    fn repair_block_lists_the_conflict_set() {
        let packet = RepairPacket {
            triggers: vec![Trigger::UnsatLedger],
            mus: vec!["at_position(ana,1)".into(), "at_position(ana,2)".into()],
            ..RepairPacket::default()
        };
        let utterances = vec!["Ana sits at seat 2.".to_string()];
        let text = answer_user(&AnswerPrompt {
            method: Method::MusRepair,
            schema: &seating(),
            utterances: &utterances,
            ledger_text: "[turn 1] at_position(ana,1)",
            repair: Some(&packet),
        });
        assert!(text.contains("REPAIR REQUIRED"));
        assert!(text.contains("Verification failed: unsat_ledger."));
        assert!(text.contains("- at_position(ana,1)\n- at_position(ana,2)"));
    }

    #[test]
    fn extraction_prompt_lists_domain_templates() {
        let schema = DomainSchema::Scheduling(SchedulingSchema {
            events: vec!["Sync".into(), "QA".into()],
            slot_min: 1,
            slot_max: 10,
            max_duration: 3,
        });
        let text = extract_user(&schema, "Sync starts at slot 3.", None);
        assert!(text.contains("Message:\nSync starts at slot 3."));
        assert!(text.contains("start_between(event, lo, hi)"));
        assert!(!text.contains("at_position"));
    }

    #[test]
    fn truncation_retry_is_a_single_instruction_line() {
        assert!(TRUNCATION_RETRY.starts_with("Previous answer was clipped"));
    }
}
