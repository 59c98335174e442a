//! Candidate solutions and their completeness check.

use super::{DomainError, DomainSchema};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Start slot and duration of one scheduled event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventTime {
    pub start: u32,
    pub duration: u32,
}

/// A (possibly partial) solution, keyed by entity name.
///
/// Nothing here is guaranteed yet: entities may be missing, category values
/// duplicated, seats reused. [`Assignment::schema_validate`] reports those
/// defects; an assignment is *complete* when the report is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Assignment {
    /// entity -> category -> value
    LogicGrid(BTreeMap<String, BTreeMap<String, String>>),
    /// event -> (start, duration)
    Scheduling(BTreeMap<String, EventTime>),
    /// person -> seat
    Seating(BTreeMap<String, u32>),
}

/// Defects found when checking an assignment against its schema.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Entities (or `entity.category` cells) with no value.
    pub missing: Vec<String>,
    /// Values used twice where a bijection is required (seats, grid values).
    pub duplicates: Vec<String>,
    /// Values outside the schema's ranges or vocabularies.
    pub out_of_range: Vec<String>,
    /// Names that do not exist in the schema at all.
    pub unknown: Vec<String>,
}

impl ValidationReport {
    /// True when the assignment is complete and well-formed.
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty()
            && self.duplicates.is_empty()
            && self.out_of_range.is_empty()
            && self.unknown.is_empty()
    }

    /// One-line human summary of the defects, for repair feedback.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if !self.missing.is_empty() {
            parts.push(format!("missing: {}", self.missing.join(", ")));
        }
        if !self.duplicates.is_empty() {
            parts.push(format!("duplicated: {}", self.duplicates.join(", ")));
        }
        if !self.out_of_range.is_empty() {
            parts.push(format!("out of range: {}", self.out_of_range.join(", ")));
        }
        if !self.unknown.is_empty() {
            parts.push(format!("unknown: {}", self.unknown.join(", ")));
        }
        parts.join("; ")
    }
}

impl Assignment {
    /// Compare the assignment against the schema and report every defect.
    pub fn schema_validate(&self, schema: &DomainSchema) -> Result<ValidationReport, DomainError> {
        let mut report = ValidationReport::default();
        match (self, schema) {
            (Assignment::LogicGrid(map), DomainSchema::LogicGrid(s)) => {
                for entity in map.keys() {
                    if !s.entities.contains(entity) {
                        report.unknown.push(entity.clone());
                    }
                }
                for entity in &s.entities {
                    let Some(cells) = map.get(entity) else {
                        report.missing.push(entity.clone());
                        continue;
                    };
                    for cat in cells.keys() {
                        if !s.categories.iter().any(|c| &c.name == cat) {
                            report.unknown.push(format!("{entity}.{cat}"));
                        }
                    }
                    for cat in &s.categories {
                        match cells.get(&cat.name) {
                            None => report.missing.push(format!("{entity}.{}", cat.name)),
                            Some(v) if !cat.values.contains(v) => {
                                report.out_of_range.push(format!("{entity}.{}={v}", cat.name))
                            }
                            Some(_) => {}
                        }
                    }
                }
                // Each category must be a bijection over the present values.
                for cat in &s.categories {
                    let mut seen: BTreeMap<&str, u32> = BTreeMap::new();
                    for entity in &s.entities {
                        if let Some(v) = map.get(entity).and_then(|c| c.get(&cat.name)) {
                            if cat.values.contains(v) {
                                *seen.entry(v.as_str()).or_default() += 1;
                            }
                        }
                    }
                    for (v, count) in seen {
                        if count > 1 {
                            report.duplicates.push(format!("{}={v}", cat.name));
                        }
                    }
                }
            }
            (Assignment::Scheduling(map), DomainSchema::Scheduling(s)) => {
                for event in map.keys() {
                    if !s.events.contains(event) {
                        report.unknown.push(event.clone());
                    }
                }
                for event in &s.events {
                    match map.get(event) {
                        None => report.missing.push(event.clone()),
                        Some(t) => {
                            let fits = t.start >= s.slot_min
                                && t.duration >= 1
                                && t.duration <= s.max_duration
                                && t.start + t.duration - 1 <= s.slot_max;
                            if !fits {
                                report
                                    .out_of_range
                                    .push(format!("{event}@{}+{}", t.start, t.duration));
                            }
                        }
                    }
                }
            }
            (Assignment::Seating(map), DomainSchema::Seating(s)) => {
                for person in map.keys() {
                    if !s.people.contains(person) {
                        report.unknown.push(person.clone());
                    }
                }
                let mut seats: BTreeMap<u32, u32> = BTreeMap::new();
                for person in &s.people {
                    match map.get(person) {
                        None => report.missing.push(person.clone()),
                        Some(&seat) => {
                            if seat < 1 || seat > s.seat_count() {
                                report.out_of_range.push(format!("{person}@{seat}"));
                            } else {
                                *seats.entry(seat).or_default() += 1;
                            }
                        }
                    }
                }
                for (seat, count) in seats {
                    if count > 1 {
                        report.duplicates.push(format!("seat {seat}"));
                    }
                }
            }
            _ => return Err(DomainError::DomainMismatch),
        }
        Ok(report)
    }

    /// Complete and well-formed under the schema.
    pub fn is_complete(&self, schema: &DomainSchema) -> Result<bool, DomainError> {
        Ok(self.schema_validate(schema)?.is_empty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{SeatingSchema, SchedulingSchema, TableShape};

    fn seating() -> DomainSchema {
        DomainSchema::Seating(SeatingSchema {
            people: ["Ana", "Bo", "Cy", "Dee", "Eli", "Fay"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            table: TableShape::Round,
        })
    }

    fn seats(pairs: &[(&str, u32)]) -> Assignment {
        Assignment::Seating(pairs.iter().map(|(p, s)| (p.to_string(), *s)).collect())
    }

    #[test]
    fn complete_seating_passes() {
        let a = seats(&[("Ana", 1), ("Bo", 2), ("Cy", 3), ("Dee", 4), ("Eli", 5), ("Fay", 6)]);
        assert!(a.is_complete(&seating()).unwrap());
    }

    #[test]
    fn duplicate_seat_is_reported() {
        let a = seats(&[("Ana", 1), ("Bo", 1), ("Cy", 3), ("Dee", 4), ("Eli", 5), ("Fay", 6)]);
        let report = a.schema_validate(&seating()).unwrap();
        assert_eq!(report.duplicates, vec!["seat 1"]);
        assert!(!report.is_empty());
    }

    #[test]
    fn missing_and_out_of_range_are_reported() {
        let a = seats(&[("Ana", 9), ("Bo", 2), ("Cy", 3), ("Dee", 4), ("Eli", 5)]);
        let report = a.schema_validate(&seating()).unwrap();
        assert_eq!(report.missing, vec!["Fay"]);
        assert_eq!(report.out_of_range, vec!["Ana@9"]);
    }

    #[test]
    fn scheduling_event_must_fit_slot_range() {
        let schema = DomainSchema::Scheduling(SchedulingSchema {
            events: vec!["A".into(), "B".into()],
            slot_min: 1,
            slot_max: 10,
            max_duration: 3,
        });
        let mut map = BTreeMap::new();
        map.insert("A".to_string(), EventTime { start: 9, duration: 3 });
        map.insert("B".to_string(), EventTime { start: 10, duration: 1 });
        let report = Assignment::Scheduling(map).schema_validate(&schema).unwrap();
        assert_eq!(report.out_of_range, vec!["A@9+3"], "9+3-1 = 11 > 10");
    }

    #[test]
    fn mismatched_domain_errors() {
        let a = seats(&[("Ana", 1)]);
        let schema = DomainSchema::Scheduling(SchedulingSchema {
            events: vec!["A".into()],
            slot_min: 1,
            slot_max: 10,
            max_duration: 3,
        });
        assert_eq!(a.schema_validate(&schema), Err(DomainError::DomainMismatch));
    }
}
