//! Problem domains: schemas, constraints, assignments, and constraint evaluation.
//!
//! Three finite-domain families are supported:
//!
//! * `logic_grid` — four entities, three categories of four values each; every
//!   category is a bijection between entities and values.
//! * `scheduling` — five to seven events placed on start slots `1..=10` with
//!   durations `1..=3`; an event must fit inside the slot range.
//! * `seating` — six to eight people on a round or rectangular table, one seat
//!   per person.
//!
//! Everything downstream (solver, generator, verifier) works in terms of the
//! types defined here.

mod assignment;
mod constraint;
mod eval;

pub use assignment::{Assignment, EventTime, ValidationReport};
pub use constraint::{CanonicalKey, Constraint, ConstraintKind};
pub use eval::evaluate;
pub(crate) use eval::eval_complete;

use serde::{Deserialize, Serialize};
use std::fmt;

/// Errors produced by schema/constraint/assignment validation and evaluation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("unknown entity `{0}` for this schema")]
    UnknownEntity(String),
    #[error("unknown category `{0}` for this schema")]
    UnknownCategory(String),
    #[error("unknown value `{value}` in category `{category}`")]
    UnknownValue { category: String, value: String },
    #[error("constraint `{constraint}` is not valid here: {reason}")]
    InvalidConstraint { constraint: String, reason: String },
    #[error("assignment is incomplete: {0}")]
    IncompleteAssignment(String),
    #[error("assignment domain does not match schema domain")]
    DomainMismatch,
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
}

/// The three problem families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    LogicGrid,
    Scheduling,
    Seating,
}

impl DomainKind {
    pub const ALL: [DomainKind; 3] = [
        DomainKind::LogicGrid,
        DomainKind::Scheduling,
        DomainKind::Seating,
    ];

    /// Stable lowercase name, used in problem ids and serialized files.
    pub fn as_str(&self) -> &'static str {
        match self {
            DomainKind::LogicGrid => "logic_grid",
            DomainKind::Scheduling => "scheduling",
            DomainKind::Seating => "seating",
        }
    }

    /// Number of constraint templates in this domain's vocabulary.
    pub fn vocabulary_size(&self) -> usize {
        match self {
            DomainKind::LogicGrid => 4,
            DomainKind::Scheduling => 6,
            DomainKind::Seating => 7,
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One value category of a logic grid (e.g. `pet`: Cat, Dog, Bird, Fish).
/// The declaration order of `values` defines the order used by `lt_attr`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub values: Vec<String>,
}

/// Logic grid: `entities.len() == 4`, three categories of four values each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicGridSchema {
    pub entities: Vec<String>,
    pub categories: Vec<Category>,
}

/// Scheduling: events start on integer slots `slot_min..=slot_max` and run
/// for `1..=max_duration` slots; `start + duration - 1` must stay in range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulingSchema {
    pub events: Vec<String>,
    pub slot_min: u32,
    pub slot_max: u32,
    pub max_duration: u32,
}

/// Table geometry for seating problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableShape {
    /// Seats `1..=n` in a ring; distance wraps around.
    Round,
    /// Two facing rows of `n/2` seats; requires an even seat count.
    /// Seat `s` occupies row `(s-1) / (n/2)`, column `(s-1) % (n/2)`.
    Rectangular,
}

/// Seating: one seat per person, seats numbered `1..=people.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeatingSchema {
    pub people: Vec<String>,
    pub table: TableShape,
}

impl SeatingSchema {
    pub fn seat_count(&self) -> u32 {
        self.people.len() as u32
    }

    /// Seat distance. Round tables wrap (`min(|a-b|, n-|a-b|)`); rectangular
    /// tables use Manhattan distance on the two-row layout.
    pub fn distance(&self, a: u32, b: u32) -> u32 {
        let n = self.seat_count();
        match self.table {
            TableShape::Round => {
                let d = a.abs_diff(b);
                d.min(n - d)
            }
            TableShape::Rectangular => {
                let half = n / 2;
                let (ra, ca) = ((a - 1) / half, (a - 1) % half);
                let (rb, cb) = ((b - 1) / half, (b - 1) % half);
                ra.abs_diff(rb) + ca.abs_diff(cb)
            }
        }
    }

    /// Whether two seats count as adjacent. On rectangular tables adjacency
    /// is within-row only; sitting across the table is not adjacent.
    pub fn adjacent(&self, a: u32, b: u32) -> bool {
        match self.table {
            TableShape::Round => self.distance(a, b) == 1,
            TableShape::Rectangular => {
                let half = self.seat_count() / 2;
                (a - 1) / half == (b - 1) / half && self.distance(a, b) == 1
            }
        }
    }

    /// Whether seat `b` is directly opposite seat `a`.
    pub fn opposite(&self, a: u32, b: u32) -> bool {
        let n = self.seat_count();
        match self.table {
            TableShape::Round => n.is_multiple_of(2) && a.abs_diff(b) == n / 2,
            TableShape::Rectangular => {
                let half = n / 2;
                (a - 1) % half == (b - 1) % half && (a - 1) / half != (b - 1) / half
            }
        }
    }

    /// Whether seat `b` is immediately to the left of occupant of seat `a`
    /// (clockwise successor on round tables; next column in-row otherwise).
    pub fn left_of(&self, a: u32, b: u32) -> bool {
        let n = self.seat_count();
        match self.table {
            TableShape::Round => b == a % n + 1,
            TableShape::Rectangular => {
                let half = n / 2;
                (a - 1) / half == (b - 1) / half && b == a + 1
            }
        }
    }

    /// Largest seat distance realizable on this table.
    pub fn max_distance(&self) -> u32 {
        let n = self.seat_count();
        match self.table {
            TableShape::Round => n / 2,
            TableShape::Rectangular => n / 2, // (n/2 - 1) columns + 1 row
        }
    }
}

/// A concrete problem instance's domain description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSchema {
    LogicGrid(LogicGridSchema),
    Scheduling(SchedulingSchema),
    Seating(SeatingSchema),
}

impl DomainSchema {
    pub fn kind(&self) -> DomainKind {
        match self {
            DomainSchema::LogicGrid(_) => DomainKind::LogicGrid,
            DomainSchema::Scheduling(_) => DomainKind::Scheduling,
            DomainSchema::Seating(_) => DomainKind::Seating,
        }
    }

    /// Entity names in declaration order (people or events).
    pub fn entities(&self) -> &[String] {
        match self {
            DomainSchema::LogicGrid(s) => &s.entities,
            DomainSchema::Scheduling(s) => &s.events,
            DomainSchema::Seating(s) => &s.people,
        }
    }

    pub fn has_entity(&self, name: &str) -> bool {
        self.entities().iter().any(|e| e == name)
    }

    /// Structural sanity check: entity counts, category shapes, duplicate
    /// names, rectangular tables with odd seat counts, slot ranges.
    pub fn validate(&self) -> Result<(), DomainError> {
        let entities = self.entities();
        let mut seen = std::collections::BTreeSet::new();
        for e in entities {
            if !seen.insert(e.as_str()) {
                return Err(DomainError::InvalidSchema(format!(
                    "duplicate entity `{e}`"
                )));
            }
        }
        match self {
            DomainSchema::LogicGrid(s) => {
                if s.entities.len() != 4 {
                    return Err(DomainError::InvalidSchema(
                        "logic grid needs exactly 4 entities".into(),
                    ));
                }
                if s.categories.len() != 3 {
                    return Err(DomainError::InvalidSchema(
                        "logic grid needs exactly 3 categories".into(),
                    ));
                }
                for c in &s.categories {
                    if c.values.len() != s.entities.len() {
                        return Err(DomainError::InvalidSchema(format!(
                            "category `{}` must have one value per entity",
                            c.name
                        )));
                    }
                }
            }
            DomainSchema::Scheduling(s) => {
                if s.slot_min < 1 || s.slot_min > s.slot_max {
                    return Err(DomainError::InvalidSchema("bad slot range".into()));
                }
                if s.max_duration < 1 || s.max_duration > s.slot_max - s.slot_min + 1 {
                    return Err(DomainError::InvalidSchema("bad duration bound".into()));
                }
            }
            DomainSchema::Seating(s) => {
                if s.people.len() < 2 {
                    return Err(DomainError::InvalidSchema(
                        "seating needs at least 2 people".into(),
                    ));
                }
                if s.table == TableShape::Rectangular && s.people.len() % 2 != 0 {
                    return Err(DomainError::InvalidSchema(
                        "rectangular tables need an even seat count".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round(n: usize) -> SeatingSchema {
        SeatingSchema {
            people: (0..n).map(|i| format!("P{i}")).collect(),
            table: TableShape::Round,
        }
    }

    fn rect(n: usize) -> SeatingSchema {
        SeatingSchema {
            people: (0..n).map(|i| format!("P{i}")).collect(),
            table: TableShape::Rectangular,
        }
    }

    #[test]
    fn round_distance_wraps() {
        let s = round(7);
        assert_eq!(s.distance(1, 7), 1);
        assert_eq!(s.distance(6, 7), 1);
        assert_eq!(s.distance(2, 6), 3);
        assert_eq!(s.distance(1, 4), 3);
        assert!(s.adjacent(7, 1));
        assert!(!s.adjacent(2, 6));
    }

    #[test]
    fn round_opposite_needs_even_count() {
        let odd = round(7);
        for a in 1..=7 {
            for b in 1..=7 {
                assert!(!odd.opposite(a, b));
            }
        }
        let even = round(8);
        assert!(even.opposite(1, 5));
        assert!(even.opposite(4, 8));
        assert!(!even.opposite(1, 4));
    }

    #[test]
    fn round_left_of_wraps() {
        let s = round(6);
        assert!(s.left_of(6, 1));
        assert!(s.left_of(2, 3));
        assert!(!s.left_of(3, 2));
    }

    #[test]
    fn rectangular_layout() {
        // Seats 1..=4 in row 0, seats 5..=8 in row 1.
        let s = rect(8);
        assert_eq!(s.distance(1, 2), 1);
        assert_eq!(s.distance(1, 5), 1);
        assert_eq!(s.distance(1, 8), 4);
        assert!(s.adjacent(1, 2));
        assert!(!s.adjacent(1, 5), "across the table is not adjacent");
        assert!(!s.adjacent(4, 5), "row boundary does not wrap");
        assert!(s.opposite(2, 6));
        assert!(!s.opposite(1, 6));
        assert!(s.left_of(5, 6));
        assert!(!s.left_of(4, 5));
        assert_eq!(s.max_distance(), 4);
    }

    #[test]
    fn schema_validation_catches_bad_shapes() {
        assert!(rect(7)
            .people
            .len()
            .checked_rem(2)
            .map(|r| r == 1)
            .unwrap());
        let schema = DomainSchema::Seating(rect(7));
        assert!(schema.validate().is_err());
        let ok = DomainSchema::Seating(round(7));
        assert!(ok.validate().is_ok());
    }
}
