//! Truth evaluation of a single constraint under a complete assignment.

use super::{Assignment, ConstraintKind, DomainError, DomainSchema};

/// Evaluate `kind` under `assignment`.
///
/// Preconditions: the constraint must be valid for `schema` and the
/// assignment complete; violations surface as errors rather than `false`,
/// so callers can't mistake "couldn't evaluate" for "unsatisfied".
pub fn evaluate(
    kind: &ConstraintKind,
    assignment: &Assignment,
    schema: &DomainSchema,
) -> Result<bool, DomainError> {
    kind.validate(schema)?;
    let report = assignment.schema_validate(schema)?;
    if !report.is_empty() {
        return Err(DomainError::IncompleteAssignment(report.describe()));
    }
    eval_complete(kind, assignment, schema)
}

/// Evaluation core. Assumes the completeness check already ran; reaching a
/// missing entity here is still an error, never a silent `false`.
pub(crate) fn eval_complete(
    kind: &ConstraintKind,
    assignment: &Assignment,
    schema: &DomainSchema,
) -> Result<bool, DomainError> {
    use ConstraintKind::*;
    match (assignment, schema) {
        (Assignment::LogicGrid(map), DomainSchema::LogicGrid(s)) => {
            let cell = |entity: &str, category: &str| -> Result<&str, DomainError> {
                map.get(entity)
                    .and_then(|c| c.get(category))
                    .map(String::as_str)
                    .ok_or_else(|| {
                        DomainError::IncompleteAssignment(format!("{entity}.{category}"))
                    })
            };
            let rank = |category: &str, value: &str| -> Result<usize, DomainError> {
                let cat = s
                    .categories
                    .iter()
                    .find(|c| c.name == category)
                    .ok_or_else(|| DomainError::UnknownCategory(category.to_string()))?;
                cat.values.iter().position(|v| v == value).ok_or_else(|| {
                    DomainError::UnknownValue {
                        category: category.to_string(),
                        value: value.to_string(),
                    }
                })
            };
            match kind {
                EqValue { entity, category, value } => Ok(cell(entity, category)? == value),
                NeqValue { entity, category, value } => Ok(cell(entity, category)? != value),
                NeqAttr { a, b, category } => Ok(cell(a, category)? != cell(b, category)?),
                LtAttr { a, b, category } => {
                    let va = rank(category, cell(a, category)?)?;
                    let vb = rank(category, cell(b, category)?)?;
                    Ok(va < vb)
                }
                _ => Err(DomainError::DomainMismatch),
            }
        }
        (Assignment::Scheduling(map), DomainSchema::Scheduling(_)) => {
            let time = |event: &str| {
                map.get(event)
                    .copied()
                    .ok_or_else(|| DomainError::IncompleteAssignment(event.to_string()))
            };
            match kind {
                AtSlot { event, slot } => Ok(time(event)?.start == *slot),
                NotAtSlot { event, slot } => Ok(time(event)?.start != *slot),
                SameSlot { a, b } => Ok(time(a)?.start == time(b)?.start),
                NotSimultaneous { a, b } => Ok(time(a)?.start != time(b)?.start),
                DurationEq { event, duration } => Ok(time(event)?.duration == *duration),
                StartBetween { event, lo, hi } => {
                    let start = time(event)?.start;
                    Ok(*lo <= start && start <= *hi)
                }
                _ => Err(DomainError::DomainMismatch),
            }
        }
        (Assignment::Seating(map), DomainSchema::Seating(s)) => {
            let seat = |person: &str| {
                map.get(person)
                    .copied()
                    .ok_or_else(|| DomainError::IncompleteAssignment(person.to_string()))
            };
            match kind {
                AtPosition { person, seat: k } => Ok(seat(person)? == *k),
                NotAtPosition { person, seat: k } => Ok(seat(person)? != *k),
                Adjacent { a, b } => Ok(s.adjacent(seat(a)?, seat(b)?)),
                NotAdjacent { a, b } => Ok(!s.adjacent(seat(a)?, seat(b)?)),
                MinSeparation { a, b, min } => Ok(s.distance(seat(a)?, seat(b)?) >= *min),
                Opposite { a, b } => Ok(s.opposite(seat(a)?, seat(b)?)),
                LeftOf { a, b } => Ok(s.left_of(seat(a)?, seat(b)?)),
                _ => Err(DomainError::DomainMismatch),
            }
        }
        _ => Err(DomainError::DomainMismatch),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{
        Category, EventTime, LogicGridSchema, SeatingSchema, SchedulingSchema, TableShape,
    };
    use std::collections::BTreeMap;

    fn seating7() -> DomainSchema {
        DomainSchema::Seating(SeatingSchema {
            people: ["Diana", "Ruby", "Tina", "Noah", "Charlie", "Frank", "Karen"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            table: TableShape::Round,
        })
    }

    fn seated(pairs: &[(&str, u32)]) -> Assignment {
        Assignment::Seating(pairs.iter().map(|(p, s)| (p.to_string(), *s)).collect())
    }

    #[test]
    fn adjacency_on_a_seven_seat_ring() {
        let schema = seating7();
        let a = seated(&[
            ("Diana", 1),
            ("Tina", 2),
            ("Karen", 3),
            ("Noah", 4),
            ("Ruby", 5),
            ("Charlie", 6),
            ("Frank", 7),
        ]);
        let not_adj = ConstraintKind::NotAdjacent { a: "Charlie".into(), b: "Frank".into() };
        assert_eq!(evaluate(&not_adj, &a, &schema), Ok(false), "seats 6 and 7 touch");
        let at = ConstraintKind::AtPosition { person: "Karen".into(), seat: 3 };
        assert_eq!(evaluate(&at, &a, &schema), Ok(true));
        let wrap = ConstraintKind::Adjacent { a: "Frank".into(), b: "Diana".into() };
        assert_eq!(evaluate(&wrap, &a, &schema), Ok(true), "seat 7 wraps to seat 1");
        let sep = ConstraintKind::MinSeparation { a: "Tina".into(), b: "Charlie".into(), min: 3 };
        assert_eq!(evaluate(&sep, &a, &schema), Ok(true), "min(4, 3) = 3");
    }

    #[test]
    fn lt_attr_uses_declaration_order() {
        let schema = DomainSchema::LogicGrid(LogicGridSchema {
            entities: ["Blake", "Drew", "Avery", "Finley"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            categories: vec![
                Category {
                    name: "pet".into(),
                    values: ["Cat", "Dog", "Bird", "Fish"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                },
                Category {
                    name: "color".into(),
                    values: ["Red", "Blue", "Green", "Yellow"]
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
        let mut grid: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for (who, pet, color, drink) in [
            ("Blake", "Cat", "Red", "Tea"),
            ("Drew", "Dog", "Blue", "Coffee"),
            ("Avery", "Fish", "Green", "Juice"),
            ("Finley", "Bird", "Yellow", "Milk"),
        ] {
            let mut cells = BTreeMap::new();
            cells.insert("pet".to_string(), pet.to_string());
            cells.insert("color".to_string(), color.to_string());
            cells.insert("drink".to_string(), drink.to_string());
            grid.insert(who.to_string(), cells);
        }
        let a = Assignment::LogicGrid(grid);
        // Finley has Bird (rank 2), Drew has Dog (rank 1): Bird < Dog is false.
        let lt = ConstraintKind::LtAttr {
            a: "Finley".into(),
            b: "Drew".into(),
            category: "pet".into(),
        };
        assert_eq!(evaluate(&lt, &a, &schema), Ok(false));
        let lt_rev = ConstraintKind::LtAttr {
            a: "Drew".into(),
            b: "Finley".into(),
            category: "pet".into(),
        };
        assert_eq!(evaluate(&lt_rev, &a, &schema), Ok(true));
    }

    #[test]
    fn incomplete_assignment_is_an_error_not_false() {
        let schema = seating7();
        let partial = seated(&[("Karen", 3)]);
        let at = ConstraintKind::AtPosition { person: "Karen".into(), seat: 3 };
        assert!(matches!(
            evaluate(&at, &partial, &schema),
            Err(DomainError::IncompleteAssignment(_))
        ));
    }

    #[test]
    fn start_between_is_inclusive() {
        let schema = DomainSchema::Scheduling(SchedulingSchema {
            events: vec!["QA".into(), "Sync".into()],
            slot_min: 1,
            slot_max: 10,
            max_duration: 3,
        });
        let mut map = BTreeMap::new();
        map.insert("QA".to_string(), EventTime { start: 2, duration: 3 });
        map.insert("Sync".to_string(), EventTime { start: 2, duration: 1 });
        let a = Assignment::Scheduling(map);
        for (lo, hi, expect) in [(1, 2, true), (2, 2, true), (3, 9, false)] {
            let c = ConstraintKind::StartBetween { event: "QA".into(), lo, hi };
            assert_eq!(evaluate(&c, &a, &schema), Ok(expect), "window {lo}..={hi}");
        }
        // Same start slot counts as simultaneous even with different durations.
        let ns = ConstraintKind::NotSimultaneous { a: "QA".into(), b: "Sync".into() };
        assert_eq!(evaluate(&ns, &a, &schema), Ok(false));
        let ss = ConstraintKind::SameSlot { a: "QA".into(), b: "Sync".into() };
        assert_eq!(evaluate(&ss, &a, &schema), Ok(true));
    }
}
