//! A simulated agent with dial-a-failure behavior.
//!
//! Per (seed, problem, turn) the agent draws one of five modes — contradict,
//! drift, parse failure, incomplete answer, clean — with configured
//! probabilities, then fabricates extraction and answer replies that land in
//! exactly that failure channel. Because the draw depends only on the seed
//! and coordinates, runs are reproducible and the measured channel shares
//! can be compared against closed-form expectations.
//!
//! The constructions lean on the gold constraints:
//!
//! * **contradict** poisons the extraction with the negation of a constraint
//!   already recorded (or just recorded), making the ledger provably
//!   unsatisfiable.
//! * **drift** skips extraction entirely — the reply is conversational
//!   filler that parses to nothing — so the ledger silently falls behind
//!   the conversation. The answer is a witness for the stale ledger plus a
//!   variant forcing some never-recorded constraint to fail: consistent
//!   with everything the agent kept, wrong on something the conversation
//!   said. Because nothing bogus ever merges, the ledger stays a subset of
//!   the gold constraints and can never curdle into a contradiction later.
//!   (When the stale ledger already entails every dropped constraint, no
//!   faithful miss exists; the lag is benign and the answer comes out
//!   correct.)
//! * **parse** answers in prose; **incomplete** drops one entity from an
//!   otherwise correct answer. Both keep the ledger faithful.
//!
//! Repair attempts draw a competence coin: competent attempts re-extract
//! cleanly and answer from the gold constraints; incompetent ones repeat
//! the original faulty behavior verbatim.

use super::{Agent, AgentError, CallContext, CallKind, CallReply, CallRequest};
use crate::domain::{Assignment, Constraint, ConstraintKind, DomainSchema};
use crate::seeded;
use crate::solver::check_sat;
use rand::Rng;

/// Per-turn failure rates. Faulty-mode probabilities must sum to at most 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MockPolicy {
    pub p_contradiction: f64,
    pub p_drift: f64,
    pub p_parse: f64,
    pub p_incomplete: f64,
    /// Probability that a repair attempt actually fixes the turn.
    pub repair_competence: f64,
}

impl MockPolicy {
    /// Never fails; repairs (vacuously) always succeed.
    pub fn perfect() -> Self {
        MockPolicy {
            p_contradiction: 0.0,
            p_drift: 0.0,
            p_parse: 0.0,
            p_incomplete: 0.0,
            repair_competence: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let ps = [
            self.p_contradiction,
            self.p_drift,
            self.p_parse,
            self.p_incomplete,
            self.repair_competence,
        ];
        if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err("probabilities must lie in [0, 1]".into());
        }
        let fault = self.p_contradiction + self.p_drift + self.p_parse + self.p_incomplete;
        if fault > 1.0 {
            return Err(format!("failure probabilities sum to {fault}, above 1"));
        }
        Ok(())
    }

    /// Expected residual-error channel shares when no repair succeeds.
    ///
    /// Without working repair the fault mode drawn at each turn is final, so
    /// the channel mix follows in closed form. A contradiction permanently
    /// poisons the ledger; on a poisoned ledger every later faulty turn lands
    /// in the contradiction channel, while a clean-mode turn still answers
    /// correctly. With `q = p_contradiction` and `s = (1 - q)^(t-1)` the
    /// survival probability at turn `t`:
    ///
    ///   contradiction_t = q + (p_drift + p_parse + p_incomplete)(1 - s)
    ///   drift_t         = p_drift * s
    ///   other_t         = (p_parse + p_incomplete) * s
    ///
    /// Summing over every turn of every problem and normalizing by the total
    /// expected residuals gives the shares. `turn_counts` holds one turn
    /// count per problem.
    pub fn implied_residual_shares(&self, turn_counts: &[u32]) -> (f64, f64, f64) {
        let q = self.p_contradiction;
        let faulty_rest = self.p_drift + self.p_parse + self.p_incomplete;
        let (mut contra, mut drift, mut other) = (0.0, 0.0, 0.0);
        for &turns in turn_counts {
            for t in 1..=turns {
                let survival = (1.0 - q).powi(t as i32 - 1);
                contra += q + faulty_rest * (1.0 - survival);
                drift += self.p_drift * survival;
                other += (self.p_parse + self.p_incomplete) * survival;
            }
        }
        let total = contra + drift + other;
        if total == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        (drift / total, contra / total, other / total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Clean,
    Contradict,
    Drift,
    Parse,
    Incomplete,
}

pub struct MockAgent {
    name: String,
    policy: MockPolicy,
    seed: u64,
}

impl MockAgent {
    pub fn new(name: impl Into<String>, policy: MockPolicy, seed: u64) -> Self {
        let agent = MockAgent { name: name.into(), policy, seed };
        agent.policy.validate().expect("mock policy");
        agent
    }

    /// An agent that always answers correctly and extracts faithfully.
    pub fn oracle(seed: u64) -> Self {
        MockAgent::new("oracle", MockPolicy::perfect(), seed)
    }

    pub fn policy(&self) -> &MockPolicy {
        &self.policy
    }

    /// The turn's drawn failure mode: a single uniform against the
    /// cumulative rates, in the fixed order contradict, drift, parse,
    /// incomplete, clean.
    fn turn_mode(&self, problem_id: &str, turn: u32) -> Mode {
        let h = seeded::stream_hash(
            "mock.mode",
            &[&self.seed.to_le_bytes(), problem_id.as_bytes(), &turn.to_le_bytes()],
        );
        let u = (h >> 11) as f64 / (1u64 << 53) as f64;
        let p = &self.policy;
        let mut edge = p.p_contradiction;
        if u < edge {
            return Mode::Contradict;
        }
        edge += p.p_drift;
        if u < edge {
            return Mode::Drift;
        }
        edge += p.p_parse;
        if u < edge {
            return Mode::Parse;
        }
        edge += p.p_incomplete;
        if u < edge {
            return Mode::Incomplete;
        }
        Mode::Clean
    }

    fn competent_repair(&self, problem_id: &str, turn: u32, attempt: u32) -> bool {
        let mut rng = seeded::stream_rng(
            "mock.repair",
            &[
                &self.seed.to_le_bytes(),
                problem_id.as_bytes(),
                &turn.to_le_bytes(),
                &attempt.to_le_bytes(),
            ],
        );
        rng.gen_bool(self.policy.repair_competence)
    }

    /// Mode in effect for this call. Repair attempts that come up competent
    /// behave cleanly; incompetent ones replay the turn's original fault.
    fn effective_mode(&self, ctx: &CallContext) -> Mode {
        let drawn = self.turn_mode(&ctx.problem.id, ctx.turn);
        if ctx.attempt == 0 {
            return drawn;
        }
        if self.competent_repair(&ctx.problem.id, ctx.turn, ctx.attempt) {
            Mode::Clean
        } else {
            drawn
        }
    }

    /// Seeded index used to pick poison/perturbation targets. Keyed by turn
    /// only, so every attempt of a turn agrees on the target.
    fn target_rng(&self, problem_id: &str, turn: u32) -> rand_chacha::ChaCha8Rng {
        seeded::stream_rng(
            "mock.target",
            &[&self.seed.to_le_bytes(), problem_id.as_bytes(), &turn.to_le_bytes()],
        )
    }

    /// The constraint this turn's contradiction negates: a gold-backed entry
    /// of the current ledger, or one of this turn's own constraints.
    fn poison_target(&self, ctx: &CallContext) -> ConstraintKind {
        let mut candidates: Vec<&ConstraintKind> = Vec::new();
        let gold_keys: std::collections::BTreeSet<_> =
            ctx.gold_prefix.iter().map(|c| c.canonical_key()).collect();
        for c in ctx.ledger_before.as_slice() {
            if gold_keys.contains(&c.canonical_key()) {
                candidates.push(&c.kind);
            }
        }
        candidates.extend(ctx.gold_new.iter().map(|c| &c.kind));
        let mut rng = self.target_rng(&ctx.problem.id, ctx.turn);
        candidates[rng.gen_range(0..candidates.len())].clone()
    }

    /// Answer for a drift turn: a complete assignment consistent with the
    /// stale ledger yet in conflict with some constraint the ledger never
    /// recorded — this turn's batch first, then anything older the ledger
    /// lost. The target rotates per turn; attempts of the same turn agree.
    /// When the stale ledger entails every dropped constraint no faithful
    /// miss exists, so the stale witness itself comes back (correct — the
    /// lag was benign). On a poisoned ledger the answer breaks a recorded
    /// constraint outright so it still misses.
    fn drift_answer(&self, ctx: &CallContext) -> Assignment {
        let ledger = ctx.ledger_before.as_slice();
        let stale = check_sat(ctx.schema, ledger).ok().and_then(|r| r.witness);
        if let Some(stale) = stale {
            let ledger_keys: std::collections::BTreeSet<_> =
                ledger.iter().map(|c| c.canonical_key()).collect();
            let batch_keys: std::collections::BTreeSet<_> =
                ctx.gold_new.iter().map(|c| c.canonical_key()).collect();
            let mut missed: Vec<&ConstraintKind> =
                ctx.gold_new.iter().map(|c| &c.kind).collect();
            missed.extend(
                ctx.gold_prefix
                    .iter()
                    .filter(|c| {
                        let key = c.canonical_key();
                        !ledger_keys.contains(&key) && !batch_keys.contains(&key)
                    })
                    .map(|c| &c.kind),
            );
            let mut rng = self.target_rng(&ctx.problem.id, ctx.turn);
            let start = rng.gen_range(0..missed.len());
            for offset in 0..missed.len() {
                let target = missed[(start + offset) % missed.len()];
                for variant in forcing_variants(target, ctx.schema) {
                    let mut world: Vec<Constraint> = ledger.to_vec();
                    world.push(Constraint::new(variant, ctx.turn));
                    if let Some(w) = check_sat(ctx.schema, &world).ok().and_then(|r| r.witness)
                    {
                        return w;
                    }
                }
            }
            return stale;
        }
        let target = self.poison_target(ctx);
        violate_assignment(&self.gold_witness(ctx), &target, ctx.schema)
    }

    fn clean_batch(ctx: &CallContext) -> Vec<ConstraintKind> {
        ctx.gold_new.iter().map(|c| c.kind.clone()).collect()
    }

    fn extraction_text(&self, ctx: &CallContext, mode: Mode) -> String {
        let batch = match mode {
            Mode::Clean | Mode::Parse | Mode::Incomplete => Self::clean_batch(ctx),
            Mode::Contradict => {
                let target = self.poison_target(ctx);
                let negation = target
                    .negation(ctx.schema)
                    .expect("corpus constraints always have a negation");
                let mut batch = Self::clean_batch(ctx);
                batch.push(negation);
                batch
            }
            // A drifting agent acknowledges the turn without recording
            // anything machine-readable, so the ledger keeps its stale
            // contents.
            Mode::Drift => {
                return "Understood — I'll keep that in mind along with the earlier \
                        requirements."
                    .to_string()
            }
        };
        render_extraction(&batch)
    }

    fn gold_witness(&self, ctx: &CallContext) -> Assignment {
        check_sat(ctx.schema, ctx.gold_prefix)
            .expect("gold constraints are schema-valid")
            .witness
            .expect("gold prefixes are satisfiable by construction")
    }

    fn answer_text(&self, ctx: &CallContext, mode: Mode) -> String {
        match mode {
            Mode::Clean => to_json(&self.gold_witness(ctx)),
            Mode::Parse => {
                "Let me think about where everyone should go; the first requirement \
                 seems the most binding."
                    .to_string()
            }
            Mode::Incomplete => {
                let witness = self.gold_witness(ctx);
                let entities = ctx.schema.entities();
                let mut rng = self.target_rng(&ctx.problem.id, ctx.turn);
                let dropped = &entities[rng.gen_range(0..entities.len())];
                to_json(&drop_entity(&witness, dropped))
            }
            Mode::Contradict => {
                let target = self.poison_target(ctx);
                let witness = self.gold_witness(ctx);
                to_json(&violate_assignment(&witness, &target, ctx.schema))
            }
            Mode::Drift => to_json(&self.drift_answer(ctx)),
        }
    }
}

impl Agent for MockAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn call(&self, request: &CallRequest) -> Result<CallReply, AgentError> {
        let ctx = &request.context;
        let mode = self.effective_mode(ctx);
        let text = match request.kind {
            CallKind::Extract => self.extraction_text(ctx, mode),
            CallKind::Answer => self.answer_text(ctx, mode),
        };
        Ok(CallReply::full(text))
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("assignments serialize")
}

fn render_extraction(batch: &[ConstraintKind]) -> String {
    let items: Vec<serde_json::Value> = batch
        .iter()
        .map(|k| serde_json::json!({"type": k.template(), "args": k.args()}))
        .collect();
    serde_json::to_string(&serde_json::Value::Array(items)).expect("extraction serializes")
}

/// Remove one entity's value(s) from an otherwise complete assignment.
fn drop_entity(a: &Assignment, entity: &str) -> Assignment {
    let mut out = a.clone();
    match &mut out {
        Assignment::LogicGrid(map) => {
            map.remove(entity);
        }
        Assignment::Scheduling(map) => {
            map.remove(entity);
        }
        Assignment::Seating(map) => {
            map.remove(entity);
        }
    }
    out
}

/// Variants of `kind` that force it to fail: any assignment satisfying the
/// variant violates the original. Ordered deterministically; every corpus
/// constraint has at least one.
fn forcing_variants(kind: &ConstraintKind, schema: &DomainSchema) -> Vec<ConstraintKind> {
    use ConstraintKind::*;
    let mut variants = Vec::new();
    if let Some(neg) = kind.negation(schema) {
        variants.push(neg);
    }
    match (kind, schema) {
        (EqValue { entity, category, value }, DomainSchema::LogicGrid(s)) => {
            if let Some(cat) = s.categories.iter().find(|c| &c.name == category) {
                for v in &cat.values {
                    if v != value {
                        variants.push(EqValue {
                            entity: entity.clone(),
                            category: category.clone(),
                            value: v.clone(),
                        });
                    }
                }
            }
        }
        (AtSlot { event, slot }, DomainSchema::Scheduling(s)) => {
            for v in s.slot_min..=s.slot_max {
                if v != *slot {
                    variants.push(AtSlot { event: event.clone(), slot: v });
                }
            }
        }
        (AtPosition { person, seat }, DomainSchema::Seating(s)) => {
            for v in 1..=s.seat_count() {
                if v != *seat {
                    variants.push(AtPosition { person: person.clone(), seat: v });
                }
            }
        }
        (DurationEq { event, duration }, DomainSchema::Scheduling(s)) => {
            for d in 1..=s.max_duration {
                if d != *duration {
                    variants.push(DurationEq { event: event.clone(), duration: d });
                }
            }
        }
        (Adjacent { a, b }, DomainSchema::Seating(s)) if s.max_distance() >= 2 => {
            variants.push(MinSeparation { a: a.clone(), b: b.clone(), min: 2 });
        }
        _ => {}
    }
    variants
}

/// Turn a complete assignment into one that violates `kind`, keeping it
/// complete and well-formed. The input must currently satisfy `kind`.
fn violate_assignment(a: &Assignment, kind: &ConstraintKind, schema: &DomainSchema) -> Assignment {
    use ConstraintKind::*;
    let mut out = a.clone();
    match (&mut out, kind, schema) {
        (Assignment::LogicGrid(map), _, DomainSchema::LogicGrid(s)) => {
            // All grid violations are value swaps within a category, which
            // preserve the bijection.
            let swap = |map: &mut std::collections::BTreeMap<
                String,
                std::collections::BTreeMap<String, String>,
            >,
                        e1: &str,
                        e2: &str,
                        category: &str| {
                let v1 = map[e1][category].clone();
                let v2 = map[e2][category].clone();
                map.get_mut(e1).unwrap().insert(category.into(), v2);
                map.get_mut(e2).unwrap().insert(category.into(), v1);
            };
            match kind {
                EqValue { entity, category, .. } => {
                    let other = s
                        .entities
                        .iter()
                        .find(|e| *e != entity)
                        .expect("grids have several entities");
                    swap(map, entity, other, category);
                }
                NeqValue { entity, category, value } => {
                    let holder = s
                        .entities
                        .iter()
                        .find(|e| &map[*e][category] == value)
                        .expect("bijection: someone holds the value")
                        .clone();
                    swap(map, entity, &holder, category);
                }
                NeqAttr { a, b, category } | LtAttr { a, b, category } => {
                    swap(map, a, b, category);
                }
                _ => unreachable!("not a grid constraint: {kind}"),
            }
        }
        (Assignment::Scheduling(map), _, DomainSchema::Scheduling(s)) => match kind {
            AtSlot { event, slot } => {
                let t = map.get_mut(event).unwrap();
                t.start = if *slot == s.slot_min { s.slot_min + 1 } else { s.slot_min };
                t.duration = t.duration.min(s.slot_max - t.start + 1);
            }
            NotAtSlot { event, slot } => {
                let t = map.get_mut(event).unwrap();
                t.start = *slot;
                t.duration = t.duration.min(s.slot_max - *slot + 1);
            }
            SameSlot { a, b } => {
                let other = map[b].start;
                let t = map.get_mut(a).unwrap();
                t.start = if other == s.slot_min { s.slot_min + 1 } else { s.slot_min };
                t.duration = t.duration.min(s.slot_max - t.start + 1);
            }
            NotSimultaneous { a, b } => {
                let other = map[b].start;
                let t = map.get_mut(a).unwrap();
                t.start = other;
                t.duration = t.duration.min(s.slot_max - other + 1);
            }
            DurationEq { event, duration } => {
                let t = map.get_mut(event).unwrap();
                t.duration = duration % s.max_duration + 1;
                t.start = t.start.min(s.slot_max - t.duration + 1);
            }
            StartBetween { event, lo, hi } => {
                let t = map.get_mut(event).unwrap();
                t.start = if *lo > s.slot_min { lo - 1 } else { hi + 1 };
                t.duration = t.duration.min(s.slot_max - t.start + 1);
            }
            _ => unreachable!("not a scheduling constraint: {kind}"),
        },
        (Assignment::Seating(map), _, DomainSchema::Seating(s)) => {
            let seat_of = |map: &std::collections::BTreeMap<String, u32>, p: &str| map[p];
            let swap_to_seat = |map: &mut std::collections::BTreeMap<String, u32>,
                                person: &str,
                                seat: u32| {
                let from = map[person];
                if let Some(occupant) =
                    map.iter().find(|(_, &v)| v == seat).map(|(k, _)| k.clone())
                {
                    map.insert(occupant, from);
                }
                map.insert(person.to_string(), seat);
            };
            match kind {
                AtPosition { person, seat } => {
                    let target = if *seat == 1 { 2 } else { 1 };
                    swap_to_seat(map, person, target);
                }
                NotAtPosition { person, seat } => {
                    swap_to_seat(map, person, *seat);
                }
                Adjacent { a, b } => {
                    let anchor = seat_of(map, b);
                    let target = (1..=s.seat_count())
                        .find(|&candidate| s.distance(candidate, anchor) >= 2)
                        .expect("tables of six or more have distant seats");
                    swap_to_seat(map, a, target);
                }
                NotAdjacent { a, b } | MinSeparation { a, b, .. } => {
                    let anchor = seat_of(map, b);
                    let target = (1..=s.seat_count())
                        .find(|&candidate| s.adjacent(candidate, anchor))
                        .expect("every seat has a neighbor");
                    swap_to_seat(map, a, target);
                }
                Opposite { a, b } => {
                    let avoid = [seat_of(map, a), seat_of(map, b)];
                    let target = (1..=s.seat_count())
                        .find(|candidate| !avoid.contains(candidate))
                        .expect("tables of six or more have spare seats");
                    swap_to_seat(map, a, target);
                }
                LeftOf { a, b } => {
                    let (sa, sb) = (seat_of(map, a), seat_of(map, b));
                    swap_to_seat(map, a, sb);
                    map.insert(b.clone(), sa);
                }
                _ => unreachable!("not a seating constraint: {kind}"),
            }
        }
        _ => unreachable!("assignment/schema domain mismatch"),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::evaluate;
    use crate::generator::{Corpus, GeneratorConfig};
    use crate::harness::Method;
    use crate::ledger::Ledger;

    fn contexts_of(problem: &crate::generator::Problem) -> Vec<(u32, Ledger)> {
        // Build the clean ledger the turn would start from.
        let mut ledgers = Vec::new();
        let mut ledger = Ledger::new();
        for t in 1..=problem.turn_count() {
            ledgers.push((t, ledger.clone()));
            ledger = ledger
                .merge(&problem.turns[t as usize - 1].gold_new, t, &problem.schema)
                .unwrap();
        }
        ledgers
    }

    /// Force `mode` and render both calls for a turn.
    fn run_mode(
        agent: &MockAgent,
        problem: &crate::generator::Problem,
        turn: u32,
        ledger_before: &Ledger,
        mode: Mode,
    ) -> (String, String) {
        let gold_prefix = problem.gold_prefix(turn);
        let ctx = CallContext {
            problem,
            domain: problem.domain,
            schema: &problem.schema,
            method: Method::LedgerOnly,
            turn,
            attempt: 0,
            gold_new: &problem.turns[turn as usize - 1].gold_new,
            gold_prefix: &gold_prefix,
            ledger_before,
            repair: None,
        };
        (agent.extraction_text(&ctx, mode), agent.answer_text(&ctx, mode))
    }

    fn corpus() -> Corpus {
        Corpus::generate(&GeneratorConfig::desk(23, 4)).unwrap()
    }

    #[test]
    fn violate_assignment_breaks_exactly_that_constraint() {
        let corpus = corpus();
        for p in &corpus.problems {
            let full = p.gold_prefix(p.turn_count());
            let witness = check_sat(&p.schema, &full).unwrap().witness.unwrap();
            for c in &full {
                let broken = violate_assignment(&witness, &c.kind, &p.schema);
                assert!(broken.is_complete(&p.schema).unwrap(), "{}: {}", p.id, c.kind);
                assert!(
                    !evaluate(&c.kind, &broken, &p.schema).unwrap(),
                    "{}: {} should be violated",
                    p.id,
                    c.kind
                );
            }
        }
    }

    #[test]
    fn forcing_variants_force_failure() {
        // Any complete assignment satisfying a variant must violate the
        // original; verify by conjoining variant + original and asking the
        // solver for a witness.
        let corpus = corpus();
        for p in &corpus.problems {
            for c in &p.gold_prefix(p.turn_count()) {
                let variants = forcing_variants(&c.kind, &p.schema);
                assert!(!variants.is_empty(), "{}: {}", p.id, c.kind);
                for v in variants {
                    let pair =
                        vec![Constraint::new(c.kind.clone(), 1), Constraint::new(v.clone(), 1)];
                    assert!(
                        !check_sat(&p.schema, &pair).unwrap().sat,
                        "{}: {} vs {v} should be incompatible",
                        p.id,
                        c.kind
                    );
                }
            }
        }
    }

    #[test]
    fn clean_mode_extracts_gold_and_answers_correctly() {
        let corpus = corpus();
        let agent = MockAgent::oracle(5);
        for p in &corpus.problems {
            for (t, ledger) in contexts_of(p) {
                let (extraction, answer) = run_mode(&agent, p, t, &ledger, Mode::Clean);
                let kinds =
                    crate::verifier::parse_extraction(&extraction, &p.schema).unwrap();
                let gold: Vec<ConstraintKind> =
                    p.turns[t as usize - 1].gold_new.iter().map(|c| c.kind.clone()).collect();
                assert_eq!(kinds, gold);
                let a = crate::verifier::parse_answer(&answer, &p.schema).unwrap();
                assert!(crate::solver::satisfies(&a, &p.gold_prefix(t), &p.schema).unwrap());
            }
        }
    }

    #[test]
    fn contradict_mode_always_poisons_and_misses() {
        let corpus = corpus();
        let agent = MockAgent::oracle(5);
        for p in &corpus.problems {
            for (t, ledger) in contexts_of(p) {
                let (extraction, answer) = run_mode(&agent, p, t, &ledger, Mode::Contradict);
                let kinds =
                    crate::verifier::parse_extraction(&extraction, &p.schema).unwrap();
                let merged = ledger
                    .merge(
                        &kinds.iter().map(|k| Constraint::new(k.clone(), t)).collect::<Vec<_>>(),
                        t,
                        &p.schema,
                    )
                    .unwrap();
                assert!(!check_sat(&p.schema, merged.as_slice()).unwrap().sat, "{} t{t}", p.id);
                let a = crate::verifier::parse_answer(&answer, &p.schema).unwrap();
                assert!(
                    !crate::solver::satisfies(&a, &p.gold_prefix(t), &p.schema).unwrap(),
                    "{} t{t}: contradiction answers must be wrong",
                    p.id
                );
            }
        }
    }

    #[test]
    fn drift_mode_lags_the_ledger_and_misses() {
        let corpus = corpus();
        let agent = MockAgent::oracle(5);
        let (mut missed, mut total) = (0u32, 0u32);
        for p in &corpus.problems {
            for (t, ledger) in contexts_of(p) {
                total += 1;
                let (extraction, answer) = run_mode(&agent, p, t, &ledger, Mode::Drift);
                assert!(
                    crate::verifier::parse_extraction(&extraction, &p.schema).is_none(),
                    "{} t{t}: drift extractions must not parse",
                    p.id
                );
                // Nothing merged, so the stale ledger still admits this and
                // every future turn's gold constraints: lagging can never
                // curdle into a contradiction.
                let mut horizon = ledger.as_slice().to_vec();
                for turn in &p.turns[t as usize - 1..] {
                    horizon.extend(turn.gold_new.iter().cloned());
                }
                assert!(
                    check_sat(&p.schema, &horizon).unwrap().sat,
                    "{} t{t}: stale ledger plus the rest of the gold must stay satisfiable",
                    p.id
                );
                let a = crate::verifier::parse_answer(&answer, &p.schema).unwrap();
                assert!(a.is_complete(&p.schema).unwrap(), "{} t{t}", p.id);
                assert!(
                    crate::solver::satisfies(&a, ledger.as_slice(), &p.schema).unwrap(),
                    "{} t{t}: drift answers stay true to the stale ledger",
                    p.id
                );
                if !crate::solver::satisfies(&a, &p.gold_prefix(t), &p.schema).unwrap() {
                    missed += 1;
                } else {
                    // Answering correctly is only legitimate when no
                    // faithful miss exists: every variant of every dropped
                    // constraint must clash with the stale ledger.
                    for c in &p.turns[t as usize - 1].gold_new {
                        for v in forcing_variants(&c.kind, &p.schema) {
                            let mut world = ledger.as_slice().to_vec();
                            world.push(Constraint::new(v.clone(), t));
                            assert!(
                                !check_sat(&p.schema, &world).unwrap().sat,
                                "{} t{t}: a faithful miss via {v} existed but the answer \
                                 came out correct",
                                p.id
                            );
                        }
                    }
                }
            }
        }
        assert!(
            missed * 4 >= total * 3,
            "faithful misses should dominate: {missed}/{total}"
        );
    }

    #[test]
    fn drift_targets_older_misses_on_a_lagging_ledger() {
        // A ledger that lost the opening batch: drift answers may break the
        // old turn's constraints, not just this turn's, and still never
        // break the ledger the agent actually kept.
        let corpus = corpus();
        let agent = MockAgent::oracle(5);
        let mut wrong = 0u32;
        for p in &corpus.problems {
            let t = p.turn_count();
            let mut ledger = Ledger::new();
            for turn in 2..t {
                ledger = ledger
                    .merge(&p.turns[turn as usize - 1].gold_new, turn, &p.schema)
                    .unwrap();
            }
            let (_, answer) = run_mode(&agent, p, t, &ledger, Mode::Drift);
            let a = crate::verifier::parse_answer(&answer, &p.schema).unwrap();
            assert!(
                crate::solver::satisfies(&a, ledger.as_slice(), &p.schema).unwrap(),
                "{}: answer must satisfy the lagging ledger",
                p.id
            );
            if !crate::solver::satisfies(&a, &p.gold_prefix(t), &p.schema).unwrap() {
                wrong += 1;
            } else {
                // Benign only if every dropped constraint — the opening
                // batch and this turn's — is already entailed.
                let dropped =
                    p.turns[0].gold_new.iter().chain(&p.turns[t as usize - 1].gold_new);
                for c in dropped {
                    for v in forcing_variants(&c.kind, &p.schema) {
                        let mut world = ledger.as_slice().to_vec();
                        world.push(Constraint::new(v.clone(), t));
                        assert!(
                            !check_sat(&p.schema, &world).unwrap().sat,
                            "{}: a faithful miss via {v} existed but the answer came out \
                             correct",
                            p.id
                        );
                    }
                }
            }
        }
        assert!(wrong > 0, "some lagging ledger should yield a faithful miss");
    }

    #[test]
    fn parse_and_incomplete_modes_fail_as_labeled() {
        let corpus = corpus();
        let agent = MockAgent::oracle(5);
        let p = &corpus.problems[0];
        let (t, ledger) = contexts_of(p).pop().unwrap();
        let (_, prose) = run_mode(&agent, p, t, &ledger, Mode::Parse);
        assert!(crate::verifier::parse_answer(&prose, &p.schema).is_err());
        let (_, partial) = run_mode(&agent, p, t, &ledger, Mode::Incomplete);
        let a = crate::verifier::parse_answer(&partial, &p.schema).unwrap();
        assert!(!a.is_complete(&p.schema).unwrap());
    }

    #[test]
    fn mode_draw_matches_configured_rates() {
        let policy = MockPolicy {
            p_contradiction: 0.1,
            p_drift: 0.2,
            p_parse: 0.05,
            p_incomplete: 0.05,
            repair_competence: 1.0,
        };
        let agent = MockAgent::new("mock", policy, 99);
        let mut counts = std::collections::BTreeMap::new();
        let n = 40_000u32;
        for i in 0..n {
            let mode = agent.turn_mode(&format!("p{}", i / 8), i % 8 + 1);
            *counts.entry(format!("{mode:?}")).or_insert(0u32) += 1;
        }
        let frac = |m: &str| counts.get(m).copied().unwrap_or(0) as f64 / n as f64;
        assert!((frac("Contradict") - 0.1).abs() < 0.01);
        assert!((frac("Drift") - 0.2).abs() < 0.01);
        assert!((frac("Parse") - 0.05).abs() < 0.005);
        assert!((frac("Incomplete") - 0.05).abs() < 0.005);
        assert!((frac("Clean") - 0.6).abs() < 0.01);
    }

    #[test]
    fn draws_are_deterministic_and_attempt_stable() {
        let policy = MockPolicy {
            p_contradiction: 0.3,
            p_drift: 0.3,
            p_parse: 0.1,
            p_incomplete: 0.1,
            repair_competence: 0.5,
        };
        let a = MockAgent::new("a", policy, 7);
        let b = MockAgent::new("b", policy, 7);
        for t in 1..=10 {
            assert_eq!(a.turn_mode("seating_001", t), b.turn_mode("seating_001", t));
            for attempt in 1..=2 {
                assert_eq!(
                    a.competent_repair("seating_001", t, attempt),
                    b.competent_repair("seating_001", t, attempt)
                );
            }
        }
        assert_ne!(
            (1..=40).map(|t| a.turn_mode("x", t)).collect::<Vec<_>>(),
            (1..=40).map(|t| MockAgent::new("c", policy, 8).turn_mode("x", t)).collect::<Vec<_>>(),
        );
    }
}
