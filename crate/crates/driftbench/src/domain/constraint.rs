//! The constraint vocabulary and its canonical key form.

use super::{DomainError, DomainKind, DomainSchema};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// One constraint template instantiated with arguments.
///
/// Logic grid templates relate entities to category values; scheduling
/// templates talk about start slots and durations; seating templates talk
/// about seat positions and the table geometry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    // logic grid
    /// Entity's value in `category` is exactly `value`.
    EqValue { entity: String, category: String, value: String },
    /// Entity's value in `category` is anything but `value`.
    NeqValue { entity: String, category: String, value: String },
    /// The two entities differ in `category`. Symmetric.
    NeqAttr { a: String, b: String, category: String },
    /// `a`'s value precedes `b`'s value in the category's declaration order.
    LtAttr { a: String, b: String, category: String },

    // scheduling
    /// Event starts exactly at `slot`.
    AtSlot { event: String, slot: u32 },
    /// Event does not start at `slot`.
    NotAtSlot { event: String, slot: u32 },
    /// Both events share a start slot. Symmetric.
    SameSlot { a: String, b: String },
    /// The events start on different slots. Symmetric.
    NotSimultaneous { a: String, b: String },
    /// Event runs for exactly `duration` slots.
    DurationEq { event: String, duration: u32 },
    /// Event's start slot lies in `lo..=hi`.
    StartBetween { event: String, lo: u32, hi: u32 },

    // seating
    /// Person sits at seat `seat`.
    AtPosition { person: String, seat: u32 },
    /// Person does not sit at seat `seat`.
    NotAtPosition { person: String, seat: u32 },
    /// The two people sit in adjacent seats. Symmetric.
    Adjacent { a: String, b: String },
    /// The two people do not sit in adjacent seats. Symmetric.
    NotAdjacent { a: String, b: String },
    /// Seat distance between the two people is at least `min`. Symmetric.
    MinSeparation { a: String, b: String, min: u32 },
    /// The two people sit directly opposite each other. Symmetric.
    Opposite { a: String, b: String },
    /// `a` sits immediately to the left of `b` (ordered).
    LeftOf { a: String, b: String },
}

/// A constraint plus the turn that introduced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub source_turn: u32,
}

impl Constraint {
    pub fn new(kind: ConstraintKind, source_turn: u32) -> Self {
        Constraint { kind, source_turn }
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        self.kind.canonical_key()
    }
}

/// Deduplication key: `template(arg1,arg2,...)`, all lowercase, with the
/// entity pair of symmetric templates sorted lexicographically. Purely
/// syntactic — no semantic rewriting.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalKey(pub String);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn key(template: &str, args: &[String]) -> CanonicalKey {
    CanonicalKey(format!("{template}({})", args.join(",")))
}

fn lower(s: &str) -> String {
    s.to_lowercase()
}

/// Lowercase and sort a symmetric entity pair.
fn pair(a: &str, b: &str) -> (String, String) {
    let (a, b) = (lower(a), lower(b));
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ConstraintKind {
    /// Template name as it appears in canonical keys and serialized files.
    pub fn template(&self) -> &'static str {
        use ConstraintKind::*;
        match self {
            EqValue { .. } => "eq_value",
            NeqValue { .. } => "neq_value",
            NeqAttr { .. } => "neq_attr",
            LtAttr { .. } => "lt_attr",
            AtSlot { .. } => "at_slot",
            NotAtSlot { .. } => "not_at_slot",
            SameSlot { .. } => "same_slot",
            NotSimultaneous { .. } => "not_simultaneous",
            DurationEq { .. } => "duration_eq",
            StartBetween { .. } => "start_between",
            AtPosition { .. } => "at_position",
            NotAtPosition { .. } => "not_at_position",
            Adjacent { .. } => "adjacent",
            NotAdjacent { .. } => "not_adjacent",
            MinSeparation { .. } => "min_separation",
            Opposite { .. } => "opposite",
            LeftOf { .. } => "left_of",
        }
    }

    pub fn domain(&self) -> DomainKind {
        use ConstraintKind::*;
        match self {
            EqValue { .. } | NeqValue { .. } | NeqAttr { .. } | LtAttr { .. } => {
                DomainKind::LogicGrid
            }
            AtSlot { .. } | NotAtSlot { .. } | SameSlot { .. } | NotSimultaneous { .. }
            | DurationEq { .. } | StartBetween { .. } => DomainKind::Scheduling,
            AtPosition { .. } | NotAtPosition { .. } | Adjacent { .. } | NotAdjacent { .. }
            | MinSeparation { .. } | Opposite { .. } | LeftOf { .. } => DomainKind::Seating,
        }
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        use ConstraintKind::*;
        match self {
            EqValue { entity, category, value } => {
                key("eq_value", &[lower(entity), lower(category), lower(value)])
            }
            NeqValue { entity, category, value } => {
                key("neq_value", &[lower(entity), lower(category), lower(value)])
            }
            NeqAttr { a, b, category } => {
                let (x, y) = pair(a, b);
                key("neq_attr", &[x, y, lower(category)])
            }
            LtAttr { a, b, category } => {
                key("lt_attr", &[lower(a), lower(b), lower(category)])
            }
            AtSlot { event, slot } => key("at_slot", &[lower(event), slot.to_string()]),
            NotAtSlot { event, slot } => key("not_at_slot", &[lower(event), slot.to_string()]),
            SameSlot { a, b } => {
                let (x, y) = pair(a, b);
                key("same_slot", &[x, y])
            }
            NotSimultaneous { a, b } => {
                let (x, y) = pair(a, b);
                key("not_simultaneous", &[x, y])
            }
            DurationEq { event, duration } => {
                key("duration_eq", &[lower(event), duration.to_string()])
            }
            StartBetween { event, lo, hi } => {
                key("start_between", &[lower(event), lo.to_string(), hi.to_string()])
            }
            AtPosition { person, seat } => key("at_position", &[lower(person), seat.to_string()]),
            NotAtPosition { person, seat } => {
                key("not_at_position", &[lower(person), seat.to_string()])
            }
            Adjacent { a, b } => {
                let (x, y) = pair(a, b);
                key("adjacent", &[x, y])
            }
            NotAdjacent { a, b } => {
                let (x, y) = pair(a, b);
                key("not_adjacent", &[x, y])
            }
            MinSeparation { a, b, min } => {
                let (x, y) = pair(a, b);
                key("min_separation", &[x, y, min.to_string()])
            }
            Opposite { a, b } => {
                let (x, y) = pair(a, b);
                key("opposite", &[x, y])
            }
            LeftOf { a, b } => key("left_of", &[lower(a), lower(b)]),
        }
    }

    /// Entities this constraint mentions, in argument order.
    pub fn entities(&self) -> Vec<&str> {
        use ConstraintKind::*;
        match self {
            EqValue { entity, .. } | NeqValue { entity, .. } => vec![entity],
            NeqAttr { a, b, .. } | LtAttr { a, b, .. } => vec![a, b],
            AtSlot { event, .. } | NotAtSlot { event, .. } | DurationEq { event, .. }
            | StartBetween { event, .. } => vec![event],
            SameSlot { a, b } | NotSimultaneous { a, b } => vec![a, b],
            AtPosition { person, .. } | NotAtPosition { person, .. } => vec![person],
            Adjacent { a, b } | NotAdjacent { a, b } | MinSeparation { a, b, .. }
            | Opposite { a, b } | LeftOf { a, b } => vec![a, b],
        }
    }

    /// Check the constraint against a schema: entity/category/value names
    /// must exist, numeric arguments must be in range, binary templates need
    /// two distinct entities, `opposite` needs an even seat count.
    pub fn validate(&self, schema: &DomainSchema) -> Result<(), DomainError> {
        use ConstraintKind::*;
        if self.domain() != schema.kind() {
            return Err(DomainError::DomainMismatch);
        }
        let err = |reason: &str| DomainError::InvalidConstraint {
            constraint: self.canonical_key().0.clone(),
            reason: reason.to_string(),
        };
        for e in self.entities() {
            if !schema.has_entity(e) {
                return Err(DomainError::UnknownEntity(e.to_string()));
            }
        }
        let ents = self.entities();
        if ents.len() == 2 && ents[0] == ents[1] {
            return Err(err("needs two distinct entities"));
        }
        match (self, schema) {
            (EqValue { category, value, .. }, DomainSchema::LogicGrid(s))
            | (NeqValue { category, value, .. }, DomainSchema::LogicGrid(s)) => {
                let cat = s
                    .categories
                    .iter()
                    .find(|c| &c.name == category)
                    .ok_or_else(|| DomainError::UnknownCategory(category.clone()))?;
                if !cat.values.iter().any(|v| v == value) {
                    return Err(DomainError::UnknownValue {
                        category: category.clone(),
                        value: value.clone(),
                    });
                }
            }
            (NeqAttr { category, .. }, DomainSchema::LogicGrid(s))
            | (LtAttr { category, .. }, DomainSchema::LogicGrid(s)) => {
                if !s.categories.iter().any(|c| &c.name == category) {
                    return Err(DomainError::UnknownCategory(category.clone()));
                }
            }
            (AtSlot { slot, .. }, DomainSchema::Scheduling(s))
            | (NotAtSlot { slot, .. }, DomainSchema::Scheduling(s)) => {
                if *slot < s.slot_min || *slot > s.slot_max {
                    return Err(err("slot out of range"));
                }
            }
            (DurationEq { duration, .. }, DomainSchema::Scheduling(s)) => {
                if *duration < 1 || *duration > s.max_duration {
                    return Err(err("duration out of range"));
                }
            }
            (StartBetween { lo, hi, .. }, DomainSchema::Scheduling(s)) => {
                if lo > hi || *lo < s.slot_min || *hi > s.slot_max {
                    return Err(err("bad slot window"));
                }
            }
            (SameSlot { .. }, DomainSchema::Scheduling(_))
            | (NotSimultaneous { .. }, DomainSchema::Scheduling(_)) => {}
            (AtPosition { seat, .. }, DomainSchema::Seating(s))
            | (NotAtPosition { seat, .. }, DomainSchema::Seating(s)) => {
                if *seat < 1 || *seat > s.seat_count() {
                    return Err(err("seat out of range"));
                }
            }
            (MinSeparation { min, .. }, DomainSchema::Seating(s)) => {
                if *min > s.max_distance() {
                    return Err(err("separation exceeds table diameter"));
                }
            }
            (Opposite { .. }, DomainSchema::Seating(s)) => {
                if s.seat_count() % 2 != 0 {
                    return Err(err("opposite needs an even seat count"));
                }
            }
            (Adjacent { .. }, DomainSchema::Seating(_))
            | (NotAdjacent { .. }, DomainSchema::Seating(_))
            | (LeftOf { .. }, DomainSchema::Seating(_)) => {}
            _ => unreachable!("domain agreement checked above"),
        }
        Ok(())
    }

    /// A single constraint that directly contradicts this one (the pair is
    /// unsatisfiable together), when the vocabulary can express one.
    ///
    /// `neq_attr` has no single-constraint negation, and a `start_between`
    /// window covering the whole slot range leaves nothing outside it.
    pub fn negation(&self, schema: &DomainSchema) -> Option<ConstraintKind> {
        use ConstraintKind::*;
        match (self, schema) {
            (EqValue { entity, category, value }, _) => Some(NeqValue {
                entity: entity.clone(),
                category: category.clone(),
                value: value.clone(),
            }),
            (NeqValue { entity, category, value }, _) => Some(EqValue {
                entity: entity.clone(),
                category: category.clone(),
                value: value.clone(),
            }),
            (NeqAttr { .. }, _) => None,
            (LtAttr { a, b, category }, _) => Some(LtAttr {
                a: b.clone(),
                b: a.clone(),
                category: category.clone(),
            }),
            (AtSlot { event, slot }, _) => Some(NotAtSlot {
                event: event.clone(),
                slot: *slot,
            }),
            (NotAtSlot { event, slot }, _) => Some(AtSlot {
                event: event.clone(),
                slot: *slot,
            }),
            (SameSlot { a, b }, _) => Some(NotSimultaneous { a: a.clone(), b: b.clone() }),
            (NotSimultaneous { a, b }, _) => Some(SameSlot { a: a.clone(), b: b.clone() }),
            (DurationEq { event, duration }, _) => Some(DurationEq {
                event: event.clone(),
                duration: if *duration == 1 { 2 } else { 1 },
            }),
            (StartBetween { event, lo, hi }, DomainSchema::Scheduling(s)) => {
                if *lo > s.slot_min {
                    Some(AtSlot { event: event.clone(), slot: lo - 1 })
                } else if *hi < s.slot_max {
                    Some(AtSlot { event: event.clone(), slot: hi + 1 })
                } else {
                    None
                }
            }
            (StartBetween { .. }, _) => None,
            (AtPosition { person, seat }, _) => Some(NotAtPosition {
                person: person.clone(),
                seat: *seat,
            }),
            (NotAtPosition { person, seat }, _) => Some(AtPosition {
                person: person.clone(),
                seat: *seat,
            }),
            (Adjacent { a, b }, _) => Some(NotAdjacent { a: a.clone(), b: b.clone() }),
            (NotAdjacent { a, b }, _) => Some(Adjacent { a: a.clone(), b: b.clone() }),
            (MinSeparation { a, b, min }, _) if *min >= 2 => {
                Some(Adjacent { a: a.clone(), b: b.clone() })
            }
            (MinSeparation { .. }, _) => None,
            (Opposite { a, b }, _) => Some(Adjacent { a: a.clone(), b: b.clone() }),
            (LeftOf { a, b }, _) => Some(LeftOf { a: b.clone(), b: a.clone() }),
        }
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_key())
    }
}

// Serialized form: `{"type": "...", "args": [...], "turn": n}` with entity
// names kept in their original casing.
#[derive(Serialize, Deserialize)]
struct RawConstraint {
    #[serde(rename = "type")]
    template: String,
    args: Vec<serde_json::Value>,
    turn: u32,
}

fn s(v: &str) -> serde_json::Value {
    serde_json::Value::String(v.to_string())
}

fn n(v: u32) -> serde_json::Value {
    serde_json::Value::Number(v.into())
}

impl ConstraintKind {
    pub(crate) fn args(&self) -> Vec<serde_json::Value> {
        use ConstraintKind::*;
        match self {
            EqValue { entity, category, value } | NeqValue { entity, category, value } => {
                vec![s(entity), s(category), s(value)]
            }
            NeqAttr { a, b, category } | LtAttr { a, b, category } => {
                vec![s(a), s(b), s(category)]
            }
            AtSlot { event, slot } | NotAtSlot { event, slot } => vec![s(event), n(*slot)],
            SameSlot { a, b } | NotSimultaneous { a, b } => vec![s(a), s(b)],
            DurationEq { event, duration } => vec![s(event), n(*duration)],
            StartBetween { event, lo, hi } => vec![s(event), n(*lo), n(*hi)],
            AtPosition { person, seat } | NotAtPosition { person, seat } => {
                vec![s(person), n(*seat)]
            }
            Adjacent { a, b } | NotAdjacent { a, b } | Opposite { a, b } | LeftOf { a, b } => {
                vec![s(a), s(b)]
            }
            MinSeparation { a, b, min } => vec![s(a), s(b), n(*min)],
        }
    }

    pub(crate) fn from_raw(template: &str, args: &[serde_json::Value]) -> Option<ConstraintKind> {
        use ConstraintKind::*;
        let st = |i: usize| args.get(i).and_then(|v| v.as_str()).map(String::from);
        let int = |i: usize| {
            args.get(i)
                .and_then(|v| v.as_u64())
                .and_then(|v| u32::try_from(v).ok())
        };
        let kind = match template {
            "eq_value" => EqValue { entity: st(0)?, category: st(1)?, value: st(2)? },
            "neq_value" => NeqValue { entity: st(0)?, category: st(1)?, value: st(2)? },
            "neq_attr" => NeqAttr { a: st(0)?, b: st(1)?, category: st(2)? },
            "lt_attr" => LtAttr { a: st(0)?, b: st(1)?, category: st(2)? },
            "at_slot" => AtSlot { event: st(0)?, slot: int(1)? },
            "not_at_slot" => NotAtSlot { event: st(0)?, slot: int(1)? },
            "same_slot" => SameSlot { a: st(0)?, b: st(1)? },
            "not_simultaneous" => NotSimultaneous { a: st(0)?, b: st(1)? },
            "duration_eq" => DurationEq { event: st(0)?, duration: int(1)? },
            "start_between" => StartBetween { event: st(0)?, lo: int(1)?, hi: int(2)? },
            "at_position" => AtPosition { person: st(0)?, seat: int(1)? },
            "not_at_position" => NotAtPosition { person: st(0)?, seat: int(1)? },
            "adjacent" => Adjacent { a: st(0)?, b: st(1)? },
            "not_adjacent" => NotAdjacent { a: st(0)?, b: st(1)? },
            "min_separation" => MinSeparation { a: st(0)?, b: st(1)?, min: int(2)? },
            "opposite" => Opposite { a: st(0)?, b: st(1)? },
            "left_of" => LeftOf { a: st(0)?, b: st(1)? },
            _ => return None,
        };
        // Reject extra arguments.
        if kind.args().len() != args.len() {
            return None;
        }
        Some(kind)
    }
}

impl Serialize for Constraint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawConstraint {
            template: self.kind.template().to_string(),
            args: self.kind.args(),
            turn: self.source_turn,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Constraint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawConstraint::deserialize(deserializer)?;
        let kind = ConstraintKind::from_raw(&raw.template, &raw.args).ok_or_else(|| {
            D::Error::custom(format!("bad constraint `{}` / args", raw.template))
        })?;
        Ok(Constraint::new(kind, raw.turn))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Category, LogicGridSchema, SeatingSchema, TableShape};

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
    fn symmetric_templates_sort_their_entity_pair() {
        let a = ConstraintKind::NotAdjacent { a: "Frank".into(), b: "Charlie".into() };
        let b = ConstraintKind::NotAdjacent { a: "Charlie".into(), b: "Frank".into() };
        assert_eq!(a.canonical_key(), b.canonical_key());
        assert_eq!(a.canonical_key().0, "not_adjacent(charlie,frank)");
    }

    #[test]
    fn ordered_templates_keep_argument_order() {
        let a = ConstraintKind::LeftOf { a: "Bo".into(), b: "Ana".into() };
        let b = ConstraintKind::LeftOf { a: "Ana".into(), b: "Bo".into() };
        assert_ne!(a.canonical_key(), b.canonical_key());
        assert_eq!(a.canonical_key().0, "left_of(bo,ana)");
    }

    #[test]
    fn keys_lowercase_all_arguments() {
        let k = ConstraintKind::EqValue {
            entity: "Drew".into(),
            category: "Profession".into(),
            value: "Chef".into(),
        };
        assert_eq!(k.canonical_key().0, "eq_value(drew,profession,chef)");
        let m = ConstraintKind::MinSeparation { a: "Tina".into(), b: "Frank".into(), min: 2 };
        assert_eq!(m.canonical_key().0, "min_separation(frank,tina,2)");
    }

    #[test]
    fn validate_rejects_out_of_schema_arguments() {
        let schema = seating();
        let unknown = ConstraintKind::AtPosition { person: "Zed".into(), seat: 1 };
        assert!(matches!(
            unknown.validate(&schema),
            Err(DomainError::UnknownEntity(_))
        ));
        let bad_seat = ConstraintKind::AtPosition { person: "Ana".into(), seat: 7 };
        assert!(bad_seat.validate(&schema).is_err());
        let self_pair = ConstraintKind::Adjacent { a: "Ana".into(), b: "Ana".into() };
        assert!(self_pair.validate(&schema).is_err());
        let wide = ConstraintKind::MinSeparation { a: "Ana".into(), b: "Bo".into(), min: 4 };
        assert!(wide.validate(&schema).is_err(), "max distance on 6 round is 3");
        let ok = ConstraintKind::Opposite { a: "Ana".into(), b: "Bo".into() };
        assert!(ok.validate(&schema).is_ok());
    }

    #[test]
    fn validate_rejects_cross_domain_constraints() {
        let schema = seating();
        let sched = ConstraintKind::AtSlot { event: "Ana".into(), slot: 1 };
        assert_eq!(sched.validate(&schema), Err(DomainError::DomainMismatch));
    }

    #[test]
    fn validate_checks_category_vocabulary() {
        let schema = DomainSchema::LogicGrid(LogicGridSchema {
            entities: ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect(),
            categories: vec![
                Category {
                    name: "color".into(),
                    values: ["Red", "Blue", "Green", "Yellow"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                },
                Category {
                    name: "pet".into(),
                    values: ["Cat", "Dog", "Bird", "Fish"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                },
                Category {
                    name: "drink".into(),
                    values: ["Tea", "Coffee", "Juice", "Milk"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                },
            ],
        });
        let ok = ConstraintKind::EqValue {
            entity: "A".into(),
            category: "pet".into(),
            value: "Dog".into(),
        };
        assert!(ok.validate(&schema).is_ok());
        let bad_value = ConstraintKind::EqValue {
            entity: "A".into(),
            category: "pet".into(),
            value: "Red".into(),
        };
        assert!(matches!(
            bad_value.validate(&schema),
            Err(DomainError::UnknownValue { .. })
        ));
        let bad_cat = ConstraintKind::LtAttr {
            a: "A".into(),
            b: "B".into(),
            category: "sport".into(),
        };
        assert!(matches!(
            bad_cat.validate(&schema),
            Err(DomainError::UnknownCategory(_))
        ));
    }

    #[test]
    fn json_round_trip_keeps_casing_and_turn() {
        let c = Constraint::new(
            ConstraintKind::MinSeparation { a: "Tina".into(), b: "Frank".into(), min: 2 },
            3,
        );
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(
            json,
            r#"{"type":"min_separation","args":["Tina","Frank",2],"turn":3}"#
        );
        let back: Constraint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn deserialization_rejects_junk() {
        assert!(serde_json::from_str::<Constraint>(
            r#"{"type":"sits_on","args":["A","B"],"turn":1}"#
        )
        .is_err());
        assert!(serde_json::from_str::<Constraint>(
            r#"{"type":"adjacent","args":["A"],"turn":1}"#
        )
        .is_err());
        assert!(serde_json::from_str::<Constraint>(
            r#"{"type":"adjacent","args":["A","B","C"],"turn":1}"#
        )
        .is_err());
        assert!(serde_json::from_str::<Constraint>(
            r#"{"type":"at_slot","args":["A","late"],"turn":1}"#
        )
        .is_err());
    }

    #[test]
    fn negation_pairs_are_mutually_exclusive_shapes() {
        let schema = seating();
        let c = ConstraintKind::Opposite { a: "Ana".into(), b: "Bo".into() };
        assert_eq!(
            c.negation(&schema),
            Some(ConstraintKind::Adjacent { a: "Ana".into(), b: "Bo".into() })
        );
        let na = ConstraintKind::NeqAttr { a: "x".into(), b: "y".into(), category: "c".into() };
        assert_eq!(na.negation(&schema), None);
    }
}
