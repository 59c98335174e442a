//! Satisfiability checking, witness search, and unsatisfiable-core extraction.
//!
//! Two independent routes decide satisfiability:
//!
//! * [`check_sat`] — backtracking search with forward checking over compact
//!   bitmask domains. This is the production path.
//! * [`brute_force_sat`] — exhaustive enumeration that scores candidates with
//!   [`evaluate`]'s semantics only. Slow, obviously correct, used to
//!   cross-validate `check_sat` in tests.
//!
//! Both are deterministic: for a fixed schema and constraint order they visit
//! candidates in a fixed order and return the same first witness every time.

use crate::domain::{
    eval_complete, Assignment, Constraint, ConstraintKind, DomainError, DomainSchema, EventTime,
};
use std::collections::BTreeMap;

/// Outcome of a satisfiability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub sat: bool,
    /// A complete satisfying assignment when `sat` holds.
    pub witness: Option<Assignment>,
}

impl SatResult {
    fn unsat() -> Self {
        SatResult { sat: false, witness: None }
    }

    fn sat(witness: Assignment) -> Self {
        SatResult { sat: true, witness: Some(witness) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("constraint set is satisfiable; there is no unsatisfiable core")]
    NotUnsat,
}

// ---------------------------------------------------------------------------
// CSP compilation: finite variables with bitmask domains.

/// Binary relation between two variables; `test(vi, vj)` is oriented by the
/// stored `(i, j)` pair.
struct Binary<'a> {
    i: usize,
    j: usize,
    test: Box<dyn Fn(u16, u16) -> bool + 'a>,
}

struct Csp<'a> {
    /// Initial candidate mask per variable, unary constraints applied.
    domains: Vec<u32>,
    binaries: Vec<Binary<'a>>,
    /// Groups of variables that must take pairwise distinct values.
    alldiff: Vec<Vec<usize>>,
}

impl<'a> Csp<'a> {
    /// Depth-first search with forward checking. Variables are assigned in
    /// index order, values in ascending order, so the first solution found
    /// is unique for a given compilation.
    fn solve(&self) -> Option<Vec<u16>> {
        if self.domains.contains(&0) {
            return None;
        }
        let mut domains = self.domains.clone();
        let mut out = vec![0u16; domains.len()];
        if self.dfs(0, &mut domains, &mut out) {
            Some(out)
        } else {
            None
        }
    }

    fn dfs(&self, depth: usize, domains: &mut [u32], out: &mut [u16]) -> bool {
        if depth == domains.len() {
            return true;
        }
        let mut candidates = domains[depth];
        while candidates != 0 {
            let v = candidates.trailing_zeros() as u16;
            candidates &= candidates - 1;
            let saved: Vec<u32> = domains[depth + 1..].to_vec();
            if self.propagate(depth, v, domains) {
                out[depth] = v;
                if self.dfs(depth + 1, domains, out) {
                    return true;
                }
            }
            domains[depth + 1..].copy_from_slice(&saved);
        }
        false
    }

    /// Assign `v` to variable `depth` and prune every later variable's
    /// domain. Returns false when some future domain empties.
    fn propagate(&self, depth: usize, v: u16, domains: &mut [u32]) -> bool {
        for group in &self.alldiff {
            if group.contains(&depth) {
                for &u in group {
                    if u > depth {
                        domains[u] &= !(1u32 << v);
                        if domains[u] == 0 {
                            return false;
                        }
                    }
                }
            }
        }
        for b in &self.binaries {
            let (future, keep): (usize, Box<dyn Fn(u16) -> bool>) = if b.i == depth && b.j > depth
            {
                (b.j, Box::new(|w| (b.test)(v, w)))
            } else if b.j == depth && b.i > depth {
                (b.i, Box::new(|w| (b.test)(w, v)))
            } else {
                continue;
            };
            let mut mask = domains[future];
            let mut next = 0u32;
            while mask != 0 {
                let w = mask.trailing_zeros() as u16;
                mask &= mask - 1;
                if keep(w) {
                    next |= 1u32 << w;
                }
            }
            domains[future] = next;
            if next == 0 {
                return false;
            }
        }
        true
    }
}

fn entity_index(entities: &[String], name: &str) -> usize {
    entities.iter().position(|e| e == name).expect("validated")
}

/// Compile and solve. All constraints must already be schema-valid.
fn solve_compiled(schema: &DomainSchema, constraints: &[Constraint]) -> Option<Assignment> {
    match schema {
        DomainSchema::LogicGrid(s) => {
            let ncat = s.categories.len();
            let var = |entity: &str, cat: usize| entity_index(&s.entities, entity) * ncat + cat;
            let cat_idx = |name: &str| s.categories.iter().position(|c| c.name == name).unwrap();
            let rank = |ci: usize, value: &str| {
                s.categories[ci].values.iter().position(|v| v == value).unwrap() as u16
            };
            let full = (1u32 << s.entities.len()) - 1;
            let mut csp = Csp {
                domains: vec![full; s.entities.len() * ncat],
                binaries: Vec::new(),
                alldiff: (0..ncat)
                    .map(|c| (0..s.entities.len()).map(|e| e * ncat + c).collect())
                    .collect(),
            };
            for c in constraints {
                match &c.kind {
                    ConstraintKind::EqValue { entity, category, value } => {
                        let ci = cat_idx(category);
                        csp.domains[var(entity, ci)] &= 1u32 << rank(ci, value);
                    }
                    ConstraintKind::NeqValue { entity, category, value } => {
                        let ci = cat_idx(category);
                        csp.domains[var(entity, ci)] &= !(1u32 << rank(ci, value));
                    }
                    ConstraintKind::NeqAttr { a, b, category } => {
                        let ci = cat_idx(category);
                        csp.binaries.push(Binary {
                            i: var(a, ci),
                            j: var(b, ci),
                            test: Box::new(|x, y| x != y),
                        });
                    }
                    ConstraintKind::LtAttr { a, b, category } => {
                        let ci = cat_idx(category);
                        csp.binaries.push(Binary {
                            i: var(a, ci),
                            j: var(b, ci),
                            test: Box::new(|x, y| x < y),
                        });
                    }
                    _ => unreachable!("validated against schema"),
                }
            }
            let values = csp.solve()?;
            let mut grid = BTreeMap::new();
            for (ei, entity) in s.entities.iter().enumerate() {
                let mut cells = BTreeMap::new();
                for (ci, cat) in s.categories.iter().enumerate() {
                    let v = values[ei * ncat + ci] as usize;
                    cells.insert(cat.name.clone(), cat.values[v].clone());
                }
                grid.insert(entity.clone(), cells);
            }
            Some(Assignment::LogicGrid(grid))
        }
        DomainSchema::Scheduling(s) => {
            // Value encoding: (start - slot_min) * max_duration + (duration - 1),
            // ascending = start-major, so the first witness prefers early slots.
            let nd = s.max_duration;
            let decode_start = |v: u16| v as u32 / nd + s.slot_min;
            let decode_dur = |v: u16| v as u32 % nd + 1;
            let mut base = 0u32;
            for start in s.slot_min..=s.slot_max {
                for dur in 1..=nd {
                    if start + dur - 1 <= s.slot_max {
                        base |= 1u32 << ((start - s.slot_min) * nd + (dur - 1));
                    }
                }
            }
            let var = |event: &str| entity_index(&s.events, event);
            let mut csp = Csp {
                domains: vec![base; s.events.len()],
                binaries: Vec::new(),
                alldiff: Vec::new(),
            };
            let keep = |mask: &mut u32, f: &dyn Fn(u32, u32) -> bool| {
                let mut m = *mask;
                let mut next = 0u32;
                while m != 0 {
                    let v = m.trailing_zeros() as u16;
                    m &= m - 1;
                    if f(decode_start(v), decode_dur(v)) {
                        next |= 1u32 << v;
                    }
                }
                *mask = next;
            };
            for c in constraints {
                match &c.kind {
                    ConstraintKind::AtSlot { event, slot } => {
                        keep(&mut csp.domains[var(event)], &|st, _| st == *slot)
                    }
                    ConstraintKind::NotAtSlot { event, slot } => {
                        keep(&mut csp.domains[var(event)], &|st, _| st != *slot)
                    }
                    ConstraintKind::DurationEq { event, duration } => {
                        keep(&mut csp.domains[var(event)], &|_, d| d == *duration)
                    }
                    ConstraintKind::StartBetween { event, lo, hi } => {
                        keep(&mut csp.domains[var(event)], &|st, _| *lo <= st && st <= *hi)
                    }
                    ConstraintKind::SameSlot { a, b } => csp.binaries.push(Binary {
                        i: var(a),
                        j: var(b),
                        test: Box::new(move |x, y| decode_start(x) == decode_start(y)),
                    }),
                    ConstraintKind::NotSimultaneous { a, b } => csp.binaries.push(Binary {
                        i: var(a),
                        j: var(b),
                        test: Box::new(move |x, y| decode_start(x) != decode_start(y)),
                    }),
                    _ => unreachable!("validated against schema"),
                }
            }
            let values = csp.solve()?;
            let mut map = BTreeMap::new();
            for (ei, event) in s.events.iter().enumerate() {
                map.insert(
                    event.clone(),
                    EventTime {
                        start: decode_start(values[ei]),
                        duration: decode_dur(values[ei]),
                    },
                );
            }
            Some(Assignment::Scheduling(map))
        }
        DomainSchema::Seating(s) => {
            let n = s.seat_count();
            let var = |person: &str| entity_index(&s.people, person);
            let seat = |v: u16| v as u32 + 1;
            let mut csp = Csp {
                domains: vec![(1u32 << n) - 1; s.people.len()],
                binaries: Vec::new(),
                alldiff: vec![(0..s.people.len()).collect()],
            };
            for c in constraints {
                match &c.kind {
                    ConstraintKind::AtPosition { person, seat: k } => {
                        csp.domains[var(person)] &= 1u32 << (k - 1)
                    }
                    ConstraintKind::NotAtPosition { person, seat: k } => {
                        csp.domains[var(person)] &= !(1u32 << (k - 1))
                    }
                    ConstraintKind::Adjacent { a, b } => csp.binaries.push(Binary {
                        i: var(a),
                        j: var(b),
                        test: Box::new(move |x, y| s.adjacent(seat(x), seat(y))),
                    }),
                    ConstraintKind::NotAdjacent { a, b } => csp.binaries.push(Binary {
                        i: var(a),
                        j: var(b),
                        test: Box::new(move |x, y| !s.adjacent(seat(x), seat(y))),
                    }),
                    ConstraintKind::MinSeparation { a, b, min } => {
                        let min = *min;
                        csp.binaries.push(Binary {
                            i: var(a),
                            j: var(b),
                            test: Box::new(move |x, y| s.distance(seat(x), seat(y)) >= min),
                        })
                    }
                    ConstraintKind::Opposite { a, b } => csp.binaries.push(Binary {
                        i: var(a),
                        j: var(b),
                        test: Box::new(move |x, y| s.opposite(seat(x), seat(y))),
                    }),
                    ConstraintKind::LeftOf { a, b } => csp.binaries.push(Binary {
                        i: var(a),
                        j: var(b),
                        test: Box::new(move |x, y| s.left_of(seat(x), seat(y))),
                    }),
                    _ => unreachable!("validated against schema"),
                }
            }
            let values = csp.solve()?;
            let map = s
                .people
                .iter()
                .enumerate()
                .map(|(pi, p)| (p.clone(), seat(values[pi])))
                .collect();
            Some(Assignment::Seating(map))
        }
    }
}

fn validate_all(schema: &DomainSchema, constraints: &[Constraint]) -> Result<(), DomainError> {
    constraints.iter().try_for_each(|c| c.kind.validate(schema))
}

/// Decide satisfiability and return the first witness found by a fixed-order
/// backtracking search with forward checking.
pub fn check_sat(
    schema: &DomainSchema,
    constraints: &[Constraint],
) -> Result<SatResult, DomainError> {
    validate_all(schema, constraints)?;
    Ok(match solve_compiled(schema, constraints) {
        Some(witness) => SatResult::sat(witness),
        None => SatResult::unsat(),
    })
}

// ---------------------------------------------------------------------------
// Exhaustive oracle.

/// Visit permutations of `0..n` in lexicographic order until `f` says stop.
fn for_each_permutation(n: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    fn rec(perm: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if perm.len() == n {
            return f(perm);
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                perm.push(v);
                if rec(perm, used, n, f) {
                    return true;
                }
                perm.pop();
                used[v] = false;
            }
        }
        false
    }
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], n, f);
}

fn all_hold(
    constraints: &[Constraint],
    a: &Assignment,
    schema: &DomainSchema,
) -> Result<bool, DomainError> {
    for c in constraints {
        if !eval_complete(&c.kind, a, schema)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustively enumerate complete assignments and test each with the same
/// evaluation semantics the verifier uses. Independent of [`check_sat`]'s
/// search and propagation; intended for cross-validation.
pub fn brute_force_sat(
    schema: &DomainSchema,
    constraints: &[Constraint],
) -> Result<SatResult, DomainError> {
    validate_all(schema, constraints)?;
    match schema {
        DomainSchema::LogicGrid(s) => {
            let n = s.entities.len();
            let mut found: Option<Assignment> = None;
            let mut err: Option<DomainError> = None;
            // One permutation per category: perms[c][entity] = value rank.
            let mut stack: Vec<Vec<usize>> = Vec::new();
            fn rec(
                s: &crate::domain::LogicGridSchema,
                schema: &DomainSchema,
                constraints: &[Constraint],
                stack: &mut Vec<Vec<usize>>,
                n: usize,
                found: &mut Option<Assignment>,
                err: &mut Option<DomainError>,
            ) -> bool {
                if stack.len() == s.categories.len() {
                    let mut grid = BTreeMap::new();
                    for (ei, entity) in s.entities.iter().enumerate() {
                        let mut cells = BTreeMap::new();
                        for (ci, cat) in s.categories.iter().enumerate() {
                            cells.insert(cat.name.clone(), cat.values[stack[ci][ei]].clone());
                        }
                        grid.insert(entity.clone(), cells);
                    }
                    let a = Assignment::LogicGrid(grid);
                    match all_hold(constraints, &a, schema) {
                        Ok(true) => {
                            *found = Some(a);
                            return true;
                        }
                        Ok(false) => return false,
                        Err(e) => {
                            *err = Some(e);
                            return true;
                        }
                    }
                }
                let mut stop = false;
                for_each_permutation(n, &mut |perm| {
                    stack.push(perm.to_vec());
                    stop = rec(s, schema, constraints, stack, n, found, err);
                    stack.pop();
                    stop
                });
                stop
            }
            rec(s, schema, constraints, &mut stack, n, &mut found, &mut err);
            if let Some(e) = err {
                return Err(e);
            }
            Ok(match found {
                Some(w) => SatResult::sat(w),
                None => SatResult::unsat(),
            })
        }
        DomainSchema::Scheduling(s) => brute_force_scheduling(s, schema, constraints),
        DomainSchema::Seating(s) => {
            let n = s.people.len();
            let mut found: Option<Assignment> = None;
            let mut err: Option<DomainError> = None;
            for_each_permutation(n, &mut |perm| {
                let map: BTreeMap<String, u32> = s
                    .people
                    .iter()
                    .enumerate()
                    .map(|(pi, p)| (p.clone(), perm[pi] as u32 + 1))
                    .collect();
                let a = Assignment::Seating(map);
                match all_hold(constraints, &a, schema) {
                    Ok(true) => {
                        found = Some(a);
                        true
                    }
                    Ok(false) => false,
                    Err(e) => {
                        err = Some(e);
                        true
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            Ok(match found {
                Some(w) => SatResult::sat(w),
                None => SatResult::unsat(),
            })
        }
    }
}

/// Scheduling enumeration. Durations first: any event without a duration
/// constraint can run for one slot without loss (duration only shows up in
/// `duration_eq` and the fits-in-range rule), so each event's duration is
/// pinned up front and only start slots are enumerated. Events no constraint
/// mentions keep the earliest start. Partial start vectors are checked as
/// soon as every event a constraint mentions has a start.
fn brute_force_scheduling(
    s: &crate::domain::SchedulingSchema,
    schema: &DomainSchema,
    constraints: &[Constraint],
) -> Result<SatResult, DomainError> {
    let mut pinned: Vec<Option<u32>> = vec![None; s.events.len()];
    for c in constraints {
        if let ConstraintKind::DurationEq { event, duration } = &c.kind {
            let idx = entity_index(&s.events, event);
            match pinned[idx] {
                Some(d) if d != *duration => {
                    return Ok(SatResult::unsat()); // two different required durations
                }
                _ => pinned[idx] = Some(*duration),
            }
        }
    }
    let durations: Vec<u32> = pinned.iter().map(|d| d.unwrap_or(1)).collect();
    let mentioned: Vec<usize> = {
        let mut m: Vec<usize> = Vec::new();
        for c in constraints {
            for e in c.kind.entities() {
                let idx = entity_index(&s.events, e);
                if !m.contains(&idx) {
                    m.push(idx);
                }
            }
        }
        m.sort_unstable();
        m
    };
    // Constraint i becomes checkable once `mentioned[..=d]` covers its events.
    let checkpoint: Vec<usize> = constraints
        .iter()
        .map(|c| {
            c.kind
                .entities()
                .iter()
                .map(|e| {
                    let idx = entity_index(&s.events, e);
                    mentioned.iter().position(|&m| m == idx).unwrap()
                })
                .max()
                .unwrap_or(0)
        })
        .collect();

    struct Ctx<'a> {
        s: &'a crate::domain::SchedulingSchema,
        schema: &'a DomainSchema,
        constraints: &'a [Constraint],
        checkpoint: &'a [usize],
        mentioned: &'a [usize],
        durations: &'a [u32],
        map: BTreeMap<String, EventTime>,
        err: Option<DomainError>,
    }

    fn rec(ctx: &mut Ctx, depth: usize) -> Result<bool, ()> {
        if depth == ctx.mentioned.len() {
            return Ok(true);
        }
        let idx = ctx.mentioned[depth];
        let dur = ctx.durations[idx];
        if ctx.s.slot_max + 1 < ctx.s.slot_min + dur {
            return Ok(false);
        }
        for start in ctx.s.slot_min..=(ctx.s.slot_max + 1 - dur) {
            ctx.map
                .insert(ctx.s.events[idx].clone(), EventTime { start, duration: dur });
            let a = Assignment::Scheduling(std::mem::take(&mut ctx.map));
            let mut ok = true;
            for (ci, c) in ctx.constraints.iter().enumerate() {
                if ctx.checkpoint[ci] == depth {
                    match eval_complete(&c.kind, &a, ctx.schema) {
                        Ok(true) => {}
                        Ok(false) => {
                            ok = false;
                            break;
                        }
                        Err(e) => {
                            ctx.err = Some(e);
                            return Err(());
                        }
                    }
                }
            }
            ctx.map = match a {
                Assignment::Scheduling(m) => m,
                _ => unreachable!(),
            };
            if ok && rec(ctx, depth + 1)? {
                return Ok(true);
            }
        }
        ctx.map.remove(&ctx.s.events[idx]);
        Ok(false)
    }

    let mut ctx = Ctx {
        s,
        schema,
        constraints,
        checkpoint: &checkpoint,
        mentioned: &mentioned,
        durations: &durations,
        map: BTreeMap::new(),
        err: None,
    };
    let solved = match rec(&mut ctx, 0) {
        Ok(v) => v,
        Err(()) => return Err(ctx.err.unwrap()),
    };
    if !solved {
        return Ok(SatResult::unsat());
    }
    // Fill events no constraint mentions with the earliest slot.
    let mut map = ctx.map;
    for (idx, event) in s.events.iter().enumerate() {
        map.entry(event.clone()).or_insert(EventTime {
            start: s.slot_min,
            duration: durations[idx],
        });
    }
    Ok(SatResult::sat(Assignment::Scheduling(map)))
}

// ---------------------------------------------------------------------------
// Assignment injection and derived queries.

/// Pin a complete assignment as constraints: `eq_value` per grid cell,
/// `at_slot` + `duration_eq` per event, `at_position` per person.
pub fn assignment_to_constraints(
    a: &Assignment,
    schema: &DomainSchema,
) -> Result<Vec<Constraint>, DomainError> {
    let report = a.schema_validate(schema)?;
    if !report.is_empty() {
        return Err(DomainError::IncompleteAssignment(report.describe()));
    }
    let mut out = Vec::new();
    match (a, schema) {
        (Assignment::LogicGrid(map), DomainSchema::LogicGrid(s)) => {
            for entity in &s.entities {
                for cat in &s.categories {
                    out.push(Constraint::new(
                        ConstraintKind::EqValue {
                            entity: entity.clone(),
                            category: cat.name.clone(),
                            value: map[entity][&cat.name].clone(),
                        },
                        0,
                    ));
                }
            }
        }
        (Assignment::Scheduling(map), DomainSchema::Scheduling(s)) => {
            for event in &s.events {
                let t = map[event];
                out.push(Constraint::new(
                    ConstraintKind::AtSlot { event: event.clone(), slot: t.start },
                    0,
                ));
                out.push(Constraint::new(
                    ConstraintKind::DurationEq { event: event.clone(), duration: t.duration },
                    0,
                ));
            }
        }
        (Assignment::Seating(map), DomainSchema::Seating(s)) => {
            for person in &s.people {
                out.push(Constraint::new(
                    ConstraintKind::AtPosition { person: person.clone(), seat: map[person] },
                    0,
                ));
            }
        }
        _ => return Err(DomainError::DomainMismatch),
    }
    Ok(out)
}

/// Does the complete assignment satisfy every constraint in `set`?
/// Decided by satisfiability of `set` plus the assignment pinned as
/// constraints, which coincides with conjunctive evaluation.
pub fn satisfies(
    a: &Assignment,
    set: &[Constraint],
    schema: &DomainSchema,
) -> Result<bool, DomainError> {
    let mut combined = set.to_vec();
    combined.extend(assignment_to_constraints(a, schema)?);
    Ok(check_sat(schema, &combined)?.sat)
}

/// The constraints in `set` that the assignment breaks, in `set` order.
pub fn violated_constraints(
    a: &Assignment,
    set: &[Constraint],
    schema: &DomainSchema,
) -> Result<Vec<Constraint>, DomainError> {
    let report = a.schema_validate(schema)?;
    if !report.is_empty() {
        return Err(DomainError::IncompleteAssignment(report.describe()));
    }
    let mut out = Vec::new();
    for c in set {
        c.kind.validate(schema)?;
        if !eval_complete(&c.kind, a, schema)? {
            out.push(c.clone());
        }
    }
    Ok(out)
}

/// Minimal unsatisfiable subset by deletion: walk the set in order, drop any
/// element whose removal keeps the remainder unsatisfiable. The result is
/// unsatisfiable and every proper subset of it is satisfiable. Errors with
/// [`SolverError::NotUnsat`] when the input is satisfiable.
pub fn extract_mus(
    schema: &DomainSchema,
    constraints: &[Constraint],
) -> Result<Vec<Constraint>, SolverError> {
    if check_sat(schema, constraints)?.sat {
        return Err(SolverError::NotUnsat);
    }
    let mut kept: Vec<Constraint> = constraints.to_vec();
    let mut i = 0;
    while i < kept.len() {
        let mut trial = kept.clone();
        trial.remove(i);
        if !check_sat(schema, &trial)?.sat {
            kept = trial;
        } else {
            i += 1;
        }
    }
    Ok(kept)
}
