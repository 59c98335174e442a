//! The running constraint ledger: an ordered, deduplicated, append-only
//! record of every constraint extracted so far, each stamped with the turn
//! that introduced it.

use crate::domain::{CanonicalKey, Constraint, DomainError, DomainSchema};
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LedgerError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("merge at turn {turn} behind newest ledger turn {newest}")]
    TurnOrder { turn: u32, newest: u32 },
}

/// Ordered constraint store. Merging never removes or reorders entries, so
/// anything recorded at turn `t` is still present at every later turn.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ledger {
    constraints: Vec<Constraint>,
    keys: Vec<CanonicalKey>,
    seen: BTreeSet<CanonicalKey>,
}

impl Ledger {
    pub fn new() -> Self {
        Ledger::default()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// All entries in insertion order, for solver queries.
    pub fn as_slice(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn contains_key(&self, key: &CanonicalKey) -> bool {
        self.seen.contains(key)
    }

    /// Entries paired with their canonical keys, in insertion order.
    pub fn entries(&self) -> impl Iterator<Item = (&Constraint, &CanonicalKey)> {
        self.constraints.iter().zip(self.keys.iter())
    }

    pub fn newest_turn(&self) -> u32 {
        self.constraints.iter().map(|c| c.source_turn).max().unwrap_or(0)
    }

    /// Append the constraints of turn `turn` that are not already present
    /// (by canonical key), stamping each with `turn`. The merge is atomic:
    /// a schema-invalid constraint or an out-of-order turn leaves the ledger
    /// untouched.
    pub fn merge(
        &self,
        new: &[Constraint],
        turn: u32,
        schema: &DomainSchema,
    ) -> Result<Ledger, LedgerError> {
        let newest = self.newest_turn();
        if turn < newest {
            return Err(LedgerError::TurnOrder { turn, newest });
        }
        for c in new {
            c.kind.validate(schema)?;
        }
        let mut next = self.clone();
        for c in new {
            let key = c.canonical_key();
            if next.seen.insert(key.clone()) {
                next.constraints.push(Constraint::new(c.kind.clone(), turn));
                next.keys.push(key);
            }
        }
        Ok(next)
    }

    /// Render the ledger as prompt text, one `[turn t] key` line per entry,
    /// oldest first. When a token budget is given and the full text exceeds
    /// it, the oldest lines are elided and replaced by a marker line; the
    /// newest entries always survive.
    pub fn serialize_text(&self, budget_tokens: Option<u32>) -> String {
        let lines: Vec<String> = self
            .entries()
            .map(|(c, key)| format!("[turn {}] {}", c.source_turn, key))
            .collect();
        let full = lines.join("\n");
        let Some(budget) = budget_tokens else {
            return full;
        };
        if token_estimate(&full) <= budget {
            return full;
        }
        for elided in 1..=lines.len() {
            let mut kept = vec![format!("[... {elided} earlier constraints elided]")];
            kept.extend_from_slice(&lines[elided..]);
            let text = kept.join("\n");
            if token_estimate(&text) <= budget {
                return text;
            }
        }
        format!("[... {} earlier constraints elided]", lines.len())
    }
}

/// Crude prompt-size estimate: one token per four characters, rounded up.
pub fn token_estimate(text: &str) -> u32 {
    (text.chars().count() as u32).div_ceil(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{ConstraintKind, SeatingSchema, TableShape};

    fn schema() -> DomainSchema {
        DomainSchema::Seating(SeatingSchema {
            people: ["Ana", "Bo", "Cy", "Dee", "Eli", "Fay"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            table: TableShape::Round,
        })
    }

    fn at(person: &str, seat: u32) -> Constraint {
        Constraint::new(ConstraintKind::AtPosition { person: person.into(), seat }, 0)
    }

    #[test]
    fn merge_deduplicates_by_canonical_key() {
        let schema = schema();
        let l1 = Ledger::new().merge(&[at("Ana", 1), at("Bo", 2)], 1, &schema).unwrap();
        assert_eq!(l1.len(), 2);
        // Same constraint again, plus a symmetric duplicate spelled backwards.
        let adj = Constraint::new(
            ConstraintKind::Adjacent { a: "Cy".into(), b: "Bo".into() },
            0,
        );
        let adj_flipped = Constraint::new(
            ConstraintKind::Adjacent { a: "Bo".into(), b: "Cy".into() },
            0,
        );
        let l2 = l1.merge(&[at("Ana", 1), adj, adj_flipped], 2, &schema).unwrap();
        assert_eq!(l2.len(), 3);
        assert_eq!(l2.as_slice()[2].source_turn, 2);
        // Earlier entries keep their original turn stamp.
        assert_eq!(l2.as_slice()[0].source_turn, 1);
    }

    #[test]
    fn merge_is_monotone() {
        let schema = schema();
        let l1 = Ledger::new().merge(&[at("Ana", 1)], 1, &schema).unwrap();
        let l2 = l1.merge(&[at("Bo", 2)], 2, &schema).unwrap();
        for (c, _) in l1.entries() {
            assert!(l2.contains_key(&c.canonical_key()));
        }
    }

    #[test]
    fn merge_rejects_out_of_order_turns() {
        let schema = schema();
        let l = Ledger::new().merge(&[at("Ana", 1)], 3, &schema).unwrap();
        assert!(matches!(
            l.merge(&[at("Bo", 2)], 2, &schema),
            Err(LedgerError::TurnOrder { .. })
        ));
        // Same turn twice is fine (repair re-merges within a turn).
        assert!(l.merge(&[at("Bo", 2)], 3, &schema).is_ok());
    }

    #[test]
    fn merge_is_atomic_on_invalid_input() {
        let schema = schema();
        let l = Ledger::new().merge(&[at("Ana", 1)], 1, &schema).unwrap();
        let bad = Constraint::new(
            ConstraintKind::AtPosition { person: "Zed".into(), seat: 1 },
            0,
        );
        let res = l.merge(&[at("Bo", 2), bad], 2, &schema);
        assert!(res.is_err());
        assert_eq!(l.len(), 1, "failed merge must not change the ledger");
    }

    #[test]
    fn text_format_is_one_stamped_line_per_entry() {
        let schema = schema();
        let l = Ledger::new()
            .merge(&[at("Ana", 3)], 1, &schema)
            .unwrap()
            .merge(
                &[Constraint::new(
                    ConstraintKind::NotAdjacent { a: "Fay".into(), b: "Cy".into() },
                    0,
                )],
                2,
                &schema,
            )
            .unwrap();
        assert_eq!(
            l.serialize_text(None),
            "[turn 1] at_position(ana,3)\n[turn 2] not_adjacent(cy,fay)"
        );
    }

    #[test]
    fn budget_elides_oldest_entries_first() {
        let schema = schema();
        let mut l = Ledger::new();
        for (i, p) in ["Ana", "Bo", "Cy", "Dee", "Eli", "Fay"].iter().enumerate() {
            l = l.merge(&[at(p, i as u32 + 1)], i as u32 + 1, &schema).unwrap();
        }
        let full = l.serialize_text(None);
        let full_tokens = token_estimate(&full);
        let budget = full_tokens - 5;
        let text = l.serialize_text(Some(budget));
        assert!(token_estimate(&text) <= budget);
        let first = text.lines().next().unwrap();
        assert!(
            first.starts_with("[... ") && first.ends_with(" earlier constraints elided]"),
            "got {first}"
        );
        // Newest entry always survives.
        assert!(text.lines().last().unwrap().contains("at_position(fay,6)"));
        // Untruncated when the budget is generous.
        assert_eq!(l.serialize_text(Some(full_tokens)), full);
    }

    #[test]
    fn token_estimate_rounds_up() {
        assert_eq!(token_estimate(""), 0);
        assert_eq!(token_estimate("abcd"), 1);
        assert_eq!(token_estimate("abcde"), 2);
    }
}
