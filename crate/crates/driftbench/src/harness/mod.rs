//! The evaluation loop.
//!
//! For each problem and prompting method, the harness replays the
//! conversation turn by turn. Every turn the agent first extracts the new
//! constraints (merged into its running ledger), then answers; the verifier
//! grades the answer against both the agent's ledger and the true
//! constraint prefix. Under the repair method, turns whose verification
//! raises triggers get a bounded number of retry attempts carrying solver
//! feedback — including a minimal conflicting subset when the ledger has
//! become unsatisfiable.
//!
//! Output is a flat, deterministic table of per-turn rows. Nothing
//! wall-clock-dependent is recorded, so identical inputs produce identical
//! bytes.

mod trace;

pub use trace::{read_trace, write_trace, AttemptRecord, TraceFile, TraceHeader, TraceRow};

use crate::agents::{prompts, Agent, CallContext, CallKind, CallRequest};
use crate::domain::{Constraint, DomainError};
use crate::generator::{Corpus, Problem, Split};
use crate::ledger::Ledger;
use crate::solver::SolverError;
use crate::verifier::{
    build_repair_packet, parse_extraction, verify_turn, RepairPacket, TurnInputs, TurnVerdict,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Prompting regime under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Whole conversation in the prompt, answer directly.
    Direct,
    /// Whole conversation, with an instruction to reason before answering.
    Cot,
    /// Constraint ledger plus the newest message in the prompt.
    LedgerOnly,
    /// Ledger prompting plus verification-guided repair attempts.
    MusRepair,
}

impl Method {
    pub const ALL: [Method; 4] =
        [Method::Direct, Method::Cot, Method::LedgerOnly, Method::MusRepair];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Cot => "cot",
            Method::LedgerOnly => "ledger_only",
            Method::MusRepair => "mus_repair",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Method::Direct),
            "cot" => Ok(Method::Cot),
            "ledger_only" => Ok(Method::LedgerOnly),
            "mus_repair" => Ok(Method::MusRepair),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("run config invalid: {0}")]
    Config(String),
}

/// Run settings. `workers` only changes wall time, never output bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub methods: Vec<Method>,
    pub split: Split,
    /// Repair attempts after the first try (the repair method only).
    pub repair_attempts: u32,
    /// Re-asks per call when the backend reports a clipped reply.
    pub truncation_retries: u32,
    /// Ledger prompt budget in estimated tokens.
    pub ledger_budget_tokens: u32,
    /// Worker threads; 0 picks the library default.
    #[serde(default)]
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            methods: Method::ALL.to_vec(),
            split: Split::Test,
            repair_attempts: 2,
            truncation_retries: 2,
            ledger_budget_tokens: 3000,
            workers: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.methods.is_empty() {
            return Err(HarnessError::Config("no methods selected".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for m in &self.methods {
            if !seen.insert(*m) {
                return Err(HarnessError::Config(format!("method {m} listed twice")));
            }
        }
        Ok(())
    }

    /// Digest over everything that shapes output bytes. Worker count is
    /// deliberately excluded.
    pub fn digest(&self) -> String {
        let essence = serde_json::json!({
            "seed": self.seed,
            "methods": self.methods,
            "split": self.split,
            "repair_attempts": self.repair_attempts,
            "truncation_retries": self.truncation_retries,
            "ledger_budget_tokens": self.ledger_budget_tokens,
        });
        crate::seeded::hex_digest(essence.to_string().as_bytes())
    }
}

/// One call's outcome after truncation retries.
struct CallOutcome {
    text: String,
    truncated: bool,
    errored: bool,
}

fn call_agent(
    agent: &dyn Agent,
    kind: CallKind,
    system: &str,
    user: &str,
    context: CallContext,
    truncation_retries: u32,
) -> CallOutcome {
    let mut user_current = user.to_string();
    for round in 0..=truncation_retries {
        let request =
            CallRequest { kind, system, user: &user_current, context };
        match agent.call(&request) {
            Ok(reply) => {
                if reply.truncated && round < truncation_retries {
                    user_current = format!("{user}\n\n{}", prompts::TRUNCATION_RETRY.trim_end());
                    continue;
                }
                return CallOutcome { text: reply.text, truncated: reply.truncated, errored: false };
            }
            Err(_) => {
                // Backend exhausted its own retries; grade it as a failed turn.
                return CallOutcome { text: String::new(), truncated: false, errored: true };
            }
        }
    }
    unreachable!("loop always returns")
}

struct TurnOutcome {
    verdict: TurnVerdict,
    ledger_after: Ledger,
    attempts: u32,
    truncated: bool,
    extraction_failed: bool,
    attempt_records: Vec<AttemptRecord>,
}

/// Run one turn, including the repair loop when the method allows it.
#[allow(clippy::too_many_arguments)]
fn process_turn(
    agent: &dyn Agent,
    problem: &Problem,
    method: Method,
    config: &RunConfig,
    ledger_before: &Ledger,
    utterances: &[String],
    turn: u32,
    gold_prefix: &[Constraint],
) -> Result<TurnOutcome, HarnessError> {
    let schema = &problem.schema;
    let gold_new = &problem.turns[turn as usize - 1].gold_new;
    let utterance = utterances.last().expect("turn has an utterance");
    let mut repair: Option<RepairPacket> = None;
    let mut attempt: u32 = 0;
    let mut attempt_records: Vec<AttemptRecord> = Vec::new();

    loop {
        let context = CallContext {
            problem,
            domain: problem.domain,
            schema,
            method,
            turn,
            attempt,
            gold_new,
            gold_prefix,
            ledger_before,
            repair: repair.as_ref(),
        };

        // 1. Extract this turn's constraints and merge them.
        let extract_user = prompts::extract_user(schema, utterance, repair.as_ref());
        let extraction = call_agent(
            agent,
            CallKind::Extract,
            prompts::EXTRACT_SYSTEM,
            &extract_user,
            context,
            config.truncation_retries,
        );
        let kinds = if extraction.errored {
            None
        } else {
            parse_extraction(&extraction.text, schema)
        };
        let (ledger, extraction_failed) = match kinds {
            Some(kinds) => {
                let stamped: Vec<Constraint> =
                    kinds.into_iter().map(|k| Constraint::new(k, turn)).collect();
                match ledger_before.merge(&stamped, turn, schema) {
                    Ok(merged) => (merged, false),
                    Err(_) => (ledger_before.clone(), true),
                }
            }
            None => (ledger_before.clone(), true),
        };

        // 2. Answer against the merged ledger.
        let ledger_text = ledger.serialize_text(Some(config.ledger_budget_tokens));
        let answer_user = prompts::answer_user(&prompts::AnswerPrompt {
            method,
            schema,
            utterances,
            ledger_text: &ledger_text,
            repair: repair.as_ref(),
        });
        let answer = call_agent(
            agent,
            CallKind::Answer,
            prompts::answer_system(method),
            &answer_user,
            context,
            config.truncation_retries,
        );

        // 3. Grade.
        let verdict = verify_turn(&TurnInputs {
            schema,
            ledger: &ledger,
            gold: gold_prefix,
            answer_text: &answer.text,
            extraction_failed,
        })?;

        attempt_records.push(AttemptRecord {
            triggers: verdict.triggers.clone(),
            z3_sat: verdict.ledger_sat,
            correct: verdict.correct,
            parsed: verdict.parsed,
            complete: verdict.complete,
        });

        let truncated = extraction.truncated || answer.truncated;
        let done = method != Method::MusRepair
            || verdict.triggers.is_empty()
            || attempt >= config.repair_attempts;
        if done {
            return Ok(TurnOutcome {
                verdict,
                ledger_after: ledger,
                attempts: attempt + 1,
                truncated,
                extraction_failed,
                attempt_records,
            });
        }
        repair = build_repair_packet(schema, &ledger, &verdict)?;
        debug_assert!(repair.is_some(), "triggers imply a repair packet");
        attempt += 1;
    }
}

/// Replay one problem under one method, producing a row per turn.
pub fn run_problem(
    agent: &dyn Agent,
    problem: &Problem,
    method: Method,
    config: &RunConfig,
) -> Result<Vec<TraceRow>, HarnessError> {
    let mut rows = Vec::with_capacity(problem.turns.len());
    let mut ledger = Ledger::new();
    let mut utterances: Vec<String> = Vec::new();
    for (i, turn) in problem.turns.iter().enumerate() {
        let t = i as u32 + 1;
        utterances.push(turn.utterance.clone());
        let gold_prefix = problem.gold_prefix(t);
        let outcome = process_turn(
            agent,
            problem,
            method,
            config,
            &ledger,
            &utterances,
            t,
            &gold_prefix,
        )?;
        rows.push(TraceRow::new(problem, method, agent.name(), t, &outcome));
        ledger = outcome.ledger_after;
    }
    Ok(rows)
}

/// Run the configured split of a corpus under every configured method.
/// Rows come back sorted by (agent, method, problem, turn) and identical
/// across worker counts.
pub fn run_corpus(
    agent: &dyn Agent,
    corpus: &Corpus,
    config: &RunConfig,
) -> Result<TraceFile, HarnessError> {
    config.validate()?;
    let problems: Vec<&Problem> = corpus.iter_split(config.split).collect();
    let jobs: Vec<(&Problem, Method)> = problems
        .iter()
        .flat_map(|&p| config.methods.iter().map(move |&m| (p, m)))
        .collect();

    let run_all = || -> Result<Vec<Vec<TraceRow>>, HarnessError> {
        jobs.par_iter().map(|&(p, m)| run_problem(agent, p, m, config)).collect()
    };
    let nested = if config.workers == 0 {
        run_all()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))?
            .install(run_all)?
    };

    let mut rows: Vec<TraceRow> = nested.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        (&a.agent, a.method, &a.problem_id, a.turn)
            .cmp(&(&b.agent, b.method, &b.problem_id, b.turn))
    });
    Ok(TraceFile { header: TraceHeader::new(agent.name(), corpus, config), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{MockAgent, MockPolicy};
    use crate::generator::GeneratorConfig;
    use crate::verifier::{Channel, Trigger};

    fn corpus() -> Corpus {
        Corpus::generate(&GeneratorConfig::desk(41, 5)).unwrap()
    }

    fn config(methods: Vec<Method>) -> RunConfig {
        RunConfig { methods, split: Split::Test, ..RunConfig::default() }
    }

    #[test]
    fn oracle_agent_is_flawless_everywhere() {
        let corpus = corpus();
        let agent = MockAgent::oracle(3);
        let trace = run_corpus(&agent, &corpus, &config(Method::ALL.to_vec())).unwrap();
        let expected: u32 = corpus.iter_split(Split::Test).map(|p| p.turn_count()).sum();
        assert_eq!(trace.rows.len(), (expected * 4) as usize);
        for row in &trace.rows {
            assert!(row.answer_correct, "{} {} t{}", row.problem_id, row.method, row.turn);
            assert!(row.parsed && row.complete && row.z3_sat);
            assert!(row.triggers.is_empty());
            assert_eq!(row.channel, Channel::Consistent);
            assert_eq!(row.attempts, 1);
            assert!(!row.truncated);
        }
    }

    #[test]
    fn rows_are_sorted_and_worker_count_invariant() {
        let corpus = corpus();
        let agent = MockAgent::new(
            "flaky",
            MockPolicy {
                p_contradiction: 0.15,
                p_drift: 0.2,
                p_parse: 0.05,
                p_incomplete: 0.05,
                repair_competence: 0.6,
            },
            11,
        );
        let mut one = config(vec![Method::LedgerOnly, Method::MusRepair]);
        one.workers = 1;
        let mut many = one.clone();
        many.workers = 4;
        let a = run_corpus(&agent, &corpus, &one).unwrap();
        let b = run_corpus(&agent, &corpus, &many).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.header, b.header);
        let mut sorted = a.rows.clone();
        sorted.sort_by(|x, y| {
            (&x.agent, x.method, &x.problem_id, x.turn)
                .cmp(&(&y.agent, y.method, &y.problem_id, y.turn))
        });
        assert_eq!(a.rows, sorted);
    }

    #[test]
    fn contradictions_poison_later_turns_without_repair() {
        // With contradiction-only faults and no repair, the ledger never
        // recovers once poisoned: every later turn stays unsatisfiable, and
        // every later *miss* lands in the contradiction channel. A later
        // turn that still answers correctly stays consistent.
        let corpus = corpus();
        let agent = MockAgent::new(
            "contra",
            MockPolicy {
                p_contradiction: 0.35,
                p_drift: 0.0,
                p_parse: 0.0,
                p_incomplete: 0.0,
                repair_competence: 0.0,
            },
            17,
        );
        let trace = run_corpus(&agent, &corpus, &config(vec![Method::LedgerOnly])).unwrap();
        let mut poisoned: std::collections::BTreeSet<String> = Default::default();
        let mut saw_poison = false;
        let mut saw_residual = false;
        for row in &trace.rows {
            if poisoned.contains(&row.problem_id) {
                assert!(!row.z3_sat, "{} t{}", row.problem_id, row.turn);
                if row.answer_correct {
                    assert_eq!(row.channel, Channel::Consistent);
                } else {
                    assert_eq!(row.channel, Channel::Contradiction);
                    saw_residual = true;
                }
            }
            if !row.z3_sat {
                saw_poison = true;
                poisoned.insert(row.problem_id.clone());
            }
        }
        assert!(saw_poison, "rates high enough that some problem contradicts");
        assert!(saw_residual, "some post-poisoning turn should also miss");
    }

    #[test]
    fn competent_repair_clears_every_trigger() {
        let corpus = corpus();
        let agent = MockAgent::new(
            "repairable",
            MockPolicy {
                p_contradiction: 0.3,
                p_drift: 0.0,
                p_parse: 0.15,
                p_incomplete: 0.15,
                repair_competence: 1.0,
            },
            19,
        );
        let trace = run_corpus(&agent, &corpus, &config(vec![Method::MusRepair])).unwrap();
        let mut repaired = 0;
        for row in &trace.rows {
            assert!(row.triggers.is_empty(), "{} t{}", row.problem_id, row.turn);
            assert!(row.answer_correct);
            assert!(row.attempts <= 2);
            if row.attempts > 1 {
                repaired += 1;
            }
        }
        assert!(repaired > 0, "faults happened and were repaired");
    }

    #[test]
    fn zero_competence_repair_exhausts_its_attempts() {
        let corpus = corpus();
        let agent = MockAgent::new(
            "stubborn",
            MockPolicy {
                p_contradiction: 0.4,
                p_drift: 0.0,
                p_parse: 0.0,
                p_incomplete: 0.0,
                repair_competence: 0.0,
            },
            23,
        );
        let cfg = config(vec![Method::MusRepair]);
        let trace = run_corpus(&agent, &corpus, &cfg).unwrap();
        let mut exhausted = 0;
        for row in &trace.rows {
            if !row.triggers.is_empty() && row.triggers.contains(&Trigger::UnsatLedger) {
                assert_eq!(row.attempts, cfg.repair_attempts + 1);
                exhausted += 1;
            }
        }
        assert!(exhausted > 0);
    }

    #[test]
    fn config_digest_ignores_workers_but_not_seed() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.workers = 8;
        assert_eq!(a.digest(), b.digest());
        let mut c = a.clone();
        c.seed = 1;
        assert_ne!(a.digest(), c.digest());
    }
}
