//! Seeded corpus construction.
//!
//! Every problem is built from its own named random substream, so corpora
//! are reproducible byte for byte regardless of worker count or generation
//! order. A turn's candidate constraints are accepted only if the whole
//! prefix stays satisfiable, which keeps every conversation solvable at
//! every turn — the property the verifier leans on when it treats an
//! unsatisfiable ledger as the model's own contradiction.

mod text;

pub use text::{parse_utterance, render_sentence, render_utterance};

use crate::domain::{
    CanonicalKey, Category, Constraint, ConstraintKind, DomainKind, DomainSchema, DomainError,
    LogicGridSchema, SeatingSchema, SchedulingSchema, TableShape,
};
use crate::seeded;
use crate::solver::check_sat;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const CORPUS_FORMAT: &str = "driftbench-corpus";
pub const CORPUS_VERSION: u64 = 1;

/// Master seed whose paper-scale test split totals exactly 5,672 turns.
/// Baked in so the default corpus reproduces the published bookkeeping.
pub const PAPER_SCALE_SEED: u64 = 107;

#[derive(Debug, thiserror::Error)]
pub enum GeneratorError {
    #[error("generation config invalid: {0}")]
    Config(String),
    #[error("could not complete problem `{id}` within the retry budget")]
    Exhausted { id: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("corpus io: {0}")]
    Io(#[from] std::io::Error),
    #[error("corpus line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("corpus header mismatch: {0}")]
    Header(String),
}

/// Knobs for corpus generation. The defaults mirror the benchmark protocol:
/// 4–10 turns, at most three new constraints a turn, and a 50-attempt
/// satisfiability gate per turn with 20 rebuilds per problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub master_seed: u64,
    pub problems_per_domain: u32,
    /// How many problems per domain land in the dev split.
    pub dev_per_domain: u32,
    pub turns_min: u32,
    pub turns_max: u32,
    pub max_new_per_turn: u32,
    pub turn_resample_budget: u32,
    pub problem_retry_budget: u32,
}

impl GeneratorConfig {
    /// Small corpus for local work: one fifth of problems go to dev.
    pub fn desk(master_seed: u64, problems_per_domain: u32) -> Self {
        GeneratorConfig {
            master_seed,
            problems_per_domain,
            dev_per_domain: problems_per_domain / 5,
            turns_min: 4,
            turns_max: 10,
            max_new_per_turn: 3,
            turn_resample_budget: 50,
            problem_retry_budget: 20,
        }
    }

    /// The full benchmark corpus: 340 problems per domain, 272/68 split.
    pub fn paper_scale() -> Self {
        GeneratorConfig {
            master_seed: PAPER_SCALE_SEED,
            ..GeneratorConfig::desk(0, 340)
        }
        .with_dev(68)
    }

    fn with_dev(mut self, dev: u32) -> Self {
        self.dev_per_domain = dev;
        self
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.problems_per_domain == 0 {
            return Err(GeneratorError::Config("problems_per_domain must be > 0".into()));
        }
        if self.dev_per_domain > self.problems_per_domain {
            return Err(GeneratorError::Config("dev split larger than corpus".into()));
        }
        if self.turns_min < 1 || self.turns_min > self.turns_max {
            return Err(GeneratorError::Config("bad turn range".into()));
        }
        if self.max_new_per_turn < 1 {
            return Err(GeneratorError::Config("need at least one constraint per turn".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Test,
    Dev,
}

/// One user turn: the rendered request and the constraints it introduced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemTurn {
    pub utterance: String,
    pub gold_new: Vec<Constraint>,
}

/// A full conversation plan. Constraints never repeat across turns (by
/// canonical key) and every prefix of `turns` is satisfiable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub id: String,
    pub domain: DomainKind,
    pub schema: DomainSchema,
    pub split: Split,
    pub turns: Vec<ProblemTurn>,
}

impl Problem {
    pub fn turn_count(&self) -> u32 {
        self.turns.len() as u32
    }

    /// All gold constraints introduced up to and including turn `t` (1-based).
    pub fn gold_prefix(&self, t: u32) -> Vec<Constraint> {
        self.turns
            .iter()
            .take(t as usize)
            .flat_map(|turn| turn.gold_new.iter().cloned())
            .collect()
    }

    /// Number of distinct constraints active after the last turn.
    pub fn final_constraint_count(&self) -> usize {
        self.turns.iter().map(|t| t.gold_new.len()).sum()
    }
}

// ---------------------------------------------------------------------------
// Name pools.

const PEOPLE: [&str; 20] = [
    "Alice", "Bob", "Carol", "Diana", "Noah", "Ruby", "Tina", "Charlie", "Frank", "Karen",
    "Blake", "Drew", "Avery", "Finley", "Morgan", "Quinn", "Jordan", "Riley", "Sasha", "Elena",
];

const EVENTS: [&str; 14] = [
    "Sync", "Testing", "Meeting", "QA", "Planning", "Design", "Review", "Standup", "Demo",
    "Retro", "Workshop", "Training", "Onboarding", "Triage",
];

const CATEGORY_POOLS: [(&str, [&str; 4]); 5] = [
    ("color", ["Red", "Blue", "Green", "Yellow"]),
    ("pet", ["Cat", "Dog", "Bird", "Fish"]),
    ("profession", ["Doctor", "Artist", "Teacher", "Chef"]),
    ("drink", ["Tea", "Coffee", "Juice", "Milk"]),
    ("sport", ["Tennis", "Chess", "Golf", "Rowing"]),
];

/// Partial Fisher–Yates: the first `k` elements of a seeded shuffle.
fn sample_distinct(rng: &mut ChaCha8Rng, pool: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pool).collect();
    for i in 0..k {
        let j = rng.gen_range(i..pool);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

fn sample_schema(domain: DomainKind, rng: &mut ChaCha8Rng) -> DomainSchema {
    match domain {
        DomainKind::LogicGrid => {
            let people = sample_distinct(rng, PEOPLE.len(), 4)
                .into_iter()
                .map(|i| PEOPLE[i].to_string())
                .collect();
            let categories = sample_distinct(rng, CATEGORY_POOLS.len(), 3)
                .into_iter()
                .map(|i| Category {
                    name: CATEGORY_POOLS[i].0.to_string(),
                    values: CATEGORY_POOLS[i].1.iter().map(|v| v.to_string()).collect(),
                })
                .collect();
            DomainSchema::LogicGrid(LogicGridSchema { entities: people, categories })
        }
        DomainKind::Scheduling => {
            let n = rng.gen_range(5..=7);
            let events = sample_distinct(rng, EVENTS.len(), n)
                .into_iter()
                .map(|i| EVENTS[i].to_string())
                .collect();
            DomainSchema::Scheduling(SchedulingSchema {
                events,
                slot_min: 1,
                slot_max: 10,
                max_duration: 3,
            })
        }
        DomainKind::Seating => {
            let n = rng.gen_range(6..=8usize);
            let people: Vec<String> = sample_distinct(rng, PEOPLE.len(), n)
                .into_iter()
                .map(|i| PEOPLE[i].to_string())
                .collect();
            let table = if n % 2 == 1 || rng.gen_bool(0.5) {
                TableShape::Round
            } else {
                TableShape::Rectangular
            };
            DomainSchema::Seating(SeatingSchema { people, table })
        }
    }
}

// ---------------------------------------------------------------------------
// Constraint sampling.

/// Constraints that hold (or fail) on every complete assignment add no
/// information; the sampler refuses to emit them. `neq_attr` is implied by
/// the grid bijection, a one-seat separation by seat uniqueness, and a
/// full-range start window by the slot bounds.
pub fn is_degenerate(kind: &ConstraintKind, schema: &DomainSchema) -> bool {
    match (kind, schema) {
        (ConstraintKind::NeqAttr { .. }, _) => true,
        (ConstraintKind::MinSeparation { min, .. }, _) => *min <= 1,
        (ConstraintKind::StartBetween { lo, hi, .. }, DomainSchema::Scheduling(s)) => {
            *lo <= s.slot_min && *hi >= s.slot_max
        }
        _ => false,
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &'a [String]) -> &'a str {
    &items[rng.gen_range(0..items.len())]
}

fn pick_pair<'a>(rng: &mut ChaCha8Rng, items: &'a [String]) -> (&'a str, &'a str) {
    let i = rng.gen_range(0..items.len());
    let mut j = rng.gen_range(0..items.len() - 1);
    if j >= i {
        j += 1;
    }
    (&items[i], &items[j])
}

fn sample_kind(schema: &DomainSchema, rng: &mut ChaCha8Rng) -> ConstraintKind {
    match schema {
        DomainSchema::LogicGrid(s) => {
            let cat = &s.categories[rng.gen_range(0..s.categories.len())];
            match rng.gen_range(0..3) {
                0 => ConstraintKind::EqValue {
                    entity: pick(rng, &s.entities).to_string(),
                    category: cat.name.clone(),
                    value: pick(rng, &cat.values).to_string(),
                },
                1 => ConstraintKind::NeqValue {
                    entity: pick(rng, &s.entities).to_string(),
                    category: cat.name.clone(),
                    value: pick(rng, &cat.values).to_string(),
                },
                _ => {
                    let (a, b) = pick_pair(rng, &s.entities);
                    ConstraintKind::LtAttr {
                        a: a.to_string(),
                        b: b.to_string(),
                        category: cat.name.clone(),
                    }
                }
            }
        }
        DomainSchema::Scheduling(s) => match rng.gen_range(0..6) {
            0 => ConstraintKind::AtSlot {
                event: pick(rng, &s.events).to_string(),
                slot: rng.gen_range(s.slot_min..=s.slot_max),
            },
            1 => ConstraintKind::NotAtSlot {
                event: pick(rng, &s.events).to_string(),
                slot: rng.gen_range(s.slot_min..=s.slot_max),
            },
            2 => {
                let (a, b) = pick_pair(rng, &s.events);
                ConstraintKind::SameSlot { a: a.to_string(), b: b.to_string() }
            }
            3 => {
                let (a, b) = pick_pair(rng, &s.events);
                ConstraintKind::NotSimultaneous { a: a.to_string(), b: b.to_string() }
            }
            4 => ConstraintKind::DurationEq {
                event: pick(rng, &s.events).to_string(),
                duration: rng.gen_range(1..=s.max_duration),
            },
            _ => {
                let width = rng.gen_range(2..=4);
                let lo = rng.gen_range(s.slot_min..=s.slot_max - width + 1);
                ConstraintKind::StartBetween {
                    event: pick(rng, &s.events).to_string(),
                    lo,
                    hi: lo + width - 1,
                }
            }
        },
        DomainSchema::Seating(s) => loop {
            let kind = match rng.gen_range(0..7) {
                0 => ConstraintKind::AtPosition {
                    person: pick(rng, &s.people).to_string(),
                    seat: rng.gen_range(1..=s.seat_count()),
                },
                1 => ConstraintKind::NotAtPosition {
                    person: pick(rng, &s.people).to_string(),
                    seat: rng.gen_range(1..=s.seat_count()),
                },
                2 => {
                    let (a, b) = pick_pair(rng, &s.people);
                    ConstraintKind::Adjacent { a: a.to_string(), b: b.to_string() }
                }
                3 => {
                    let (a, b) = pick_pair(rng, &s.people);
                    ConstraintKind::NotAdjacent { a: a.to_string(), b: b.to_string() }
                }
                4 => {
                    let (a, b) = pick_pair(rng, &s.people);
                    ConstraintKind::MinSeparation {
                        a: a.to_string(),
                        b: b.to_string(),
                        min: rng.gen_range(2..=s.max_distance().max(2)),
                    }
                }
                5 => {
                    if s.seat_count() % 2 != 0 {
                        continue; // no opposite seat exists; redraw the template
                    }
                    let (a, b) = pick_pair(rng, &s.people);
                    ConstraintKind::Opposite { a: a.to_string(), b: b.to_string() }
                }
                _ => {
                    let (a, b) = pick_pair(rng, &s.people);
                    ConstraintKind::LeftOf { a: a.to_string(), b: b.to_string() }
                }
            };
            break kind;
        },
    }
}

/// Sample up to `want` fresh candidates (new canonical keys, nothing
/// degenerate). A slot that cannot find a fresh constraint within its
/// argument budget is dropped rather than blocking the turn.
fn sample_batch(
    schema: &DomainSchema,
    rng: &mut ChaCha8Rng,
    used: &BTreeSet<CanonicalKey>,
    want: u32,
) -> Vec<ConstraintKind> {
    const ARG_TRIES: u32 = 30;
    let mut batch: Vec<ConstraintKind> = Vec::new();
    let mut batch_keys: BTreeSet<CanonicalKey> = BTreeSet::new();
    for _ in 0..want {
        for _ in 0..ARG_TRIES {
            let kind = sample_kind(schema, rng);
            if is_degenerate(&kind, schema) {
                continue;
            }
            let key = kind.canonical_key();
            if used.contains(&key) || batch_keys.contains(&key) {
                continue;
            }
            batch_keys.insert(key);
            batch.push(kind);
            break;
        }
    }
    batch
}

/// Candidate-count weights for 1, 2, or 3 new constraints per turn.
const BATCH_WEIGHTS: [u32; 3] = [1, 1, 1];

fn sample_batch_size(rng: &mut ChaCha8Rng) -> u32 {
    let total: u32 = BATCH_WEIGHTS.iter().sum();
    let mut r = rng.gen_range(0..total);
    for (i, w) in BATCH_WEIGHTS.iter().enumerate() {
        if r < *w {
            return i as u32 + 1;
        }
        r -= w;
    }
    unreachable!()
}

// ---------------------------------------------------------------------------
// Problem and corpus construction.

fn problem_id(domain: DomainKind, index: u32) -> String {
    format!("{}_{:03}", domain.as_str(), index)
}

fn try_build(
    config: &GeneratorConfig,
    domain: DomainKind,
    index: u32,
    rng: &mut ChaCha8Rng,
) -> Option<Problem> {
    let schema = sample_schema(domain, rng);
    let total_turns = rng.gen_range(config.turns_min..=config.turns_max);
    let mut prefix: Vec<Constraint> = Vec::new();
    let mut used: BTreeSet<CanonicalKey> = BTreeSet::new();
    let mut turns: Vec<ProblemTurn> = Vec::new();

    for t in 1..=total_turns {
        let mut accepted: Option<Vec<ConstraintKind>> = None;
        for _ in 0..config.turn_resample_budget {
            let n = sample_batch_size(rng);
            let batch = sample_batch(&schema, rng, &used, n);
            if batch.is_empty() {
                continue;
            }
            let mut candidate = prefix.clone();
            candidate.extend(batch.iter().map(|k| Constraint::new(k.clone(), t)));
            let sat = check_sat(&schema, &candidate)
                .expect("sampled constraints are schema-valid")
                .sat;
            if sat {
                accepted = Some(batch);
                break;
            }
        }
        let batch = accepted?;
        let stamped: Vec<Constraint> =
            batch.iter().map(|k| Constraint::new(k.clone(), t)).collect();
        used.extend(stamped.iter().map(|c| c.canonical_key()));
        prefix.extend(stamped.iter().cloned());
        turns.push(ProblemTurn { utterance: render_utterance(&batch), gold_new: stamped });
    }

    Some(Problem {
        id: problem_id(domain, index),
        domain,
        schema,
        split: Split::Test, // assigned for real once the whole domain exists
        turns,
    })
}

fn generate_problem(
    config: &GeneratorConfig,
    domain: DomainKind,
    index: u32,
) -> Result<Problem, GeneratorError> {
    let mut rng = seeded::stream_rng(
        "corpus.problem",
        &[
            &config.master_seed.to_le_bytes(),
            domain.as_str().as_bytes(),
            &index.to_le_bytes(),
        ],
    );
    for _ in 0..=config.problem_retry_budget {
        if let Some(p) = try_build(config, domain, index, &mut rng) {
            return Ok(p);
        }
    }
    Err(GeneratorError::Exhausted { id: problem_id(domain, index) })
}

/// A generated corpus: `problems_per_domain` problems for each domain, in
/// (domain, index) order, split assignments included.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub problems: Vec<Problem>,
}

impl Corpus {
    /// Generate the full corpus. Problems are independent and built in
    /// parallel; output is identical for a given config regardless of
    /// worker count.
    pub fn generate(config: &GeneratorConfig) -> Result<Corpus, GeneratorError> {
        config.validate()?;
        let jobs: Vec<(DomainKind, u32)> = DomainKind::ALL
            .iter()
            .flat_map(|&d| (0..config.problems_per_domain).map(move |i| (d, i)))
            .collect();
        let mut problems: Vec<Problem> = jobs
            .par_iter()
            .map(|&(d, i)| generate_problem(config, d, i))
            .collect::<Result<_, _>>()?;

        // Dev split: per domain, the lowest-ranked ids by a seeded hash.
        for domain in DomainKind::ALL {
            let mut ranked: Vec<(u64, String)> = problems
                .iter()
                .filter(|p| p.domain == domain)
                .map(|p| {
                    let h = seeded::stream_hash(
                        "corpus.split",
                        &[&config.master_seed.to_le_bytes(), p.id.as_bytes()],
                    );
                    (h, p.id.clone())
                })
                .collect();
            ranked.sort();
            let dev: BTreeSet<String> = ranked
                .into_iter()
                .take(config.dev_per_domain as usize)
                .map(|(_, id)| id)
                .collect();
            for p in problems.iter_mut().filter(|p| p.domain == domain) {
                p.split = if dev.contains(&p.id) { Split::Dev } else { Split::Test };
            }
        }
        Ok(Corpus { problems })
    }

    pub fn iter_split(&self, split: Split) -> impl Iterator<Item = &Problem> {
        self.problems.iter().filter(move |p| p.split == split)
    }

    /// Hex digest over the serialized problems; trace files carry it so an
    /// analysis can refuse to compare runs from different corpora.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for p in &self.problems {
            hasher.update(serde_json::to_string(p).expect("corpus serializes").as_bytes());
            hasher.update(b"\n");
        }
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<(), GeneratorError> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        writeln!(w, "{{\"format\":\"{CORPUS_FORMAT}\",\"version\":{CORPUS_VERSION}}}")?;
        for p in &self.problems {
            let line = serde_json::to_string(p).map_err(|source| GeneratorError::Json {
                line: 0,
                source,
            })?;
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_jsonl(path: &Path) -> Result<Corpus, GeneratorError> {
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut problems = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if i == 0 {
                let header: serde_json::Value = serde_json::from_str(&line)
                    .map_err(|source| GeneratorError::Json { line: 1, source })?;
                if header["format"] != CORPUS_FORMAT || header["version"] != CORPUS_VERSION {
                    return Err(GeneratorError::Header(line));
                }
                continue;
            }
            problems.push(serde_json::from_str(&line).map_err(|source| GeneratorError::Json {
                line: i + 1,
                source,
            })?);
        }
        Ok(Corpus { problems })
    }

    pub fn stats(&self) -> CorpusStats {
        let mut domains = Vec::new();
        for domain in DomainKind::ALL {
            let ps: Vec<&Problem> = self.problems.iter().filter(|p| p.domain == domain).collect();
            if ps.is_empty() {
                continue;
            }
            let n = ps.len() as f64;
            let turns: Vec<u32> = ps.iter().map(|p| p.turn_count()).collect();
            let entities: Vec<usize> = ps.iter().map(|p| p.schema.entities().len()).collect();
            domains.push(DomainStats {
                domain,
                problems: ps.len() as u32,
                test: ps.iter().filter(|p| p.split == Split::Test).count() as u32,
                dev: ps.iter().filter(|p| p.split == Split::Dev).count() as u32,
                mean_turns: turns.iter().map(|&t| t as f64).sum::<f64>() / n,
                min_turns: turns.iter().copied().min().unwrap_or(0),
                max_turns: turns.iter().copied().max().unwrap_or(0),
                mean_entities: entities.iter().map(|&e| e as f64).sum::<f64>() / n,
                vocabulary: domain.vocabulary_size(),
                mean_final_constraints: ps
                    .iter()
                    .map(|p| p.final_constraint_count() as f64)
                    .sum::<f64>()
                    / n,
                test_turn_total: ps
                    .iter()
                    .filter(|p| p.split == Split::Test)
                    .map(|p| p.turn_count())
                    .sum(),
            });
        }
        CorpusStats { domains }
    }
}

/// Per-domain corpus summary.
#[derive(Debug, Clone, Serialize)]
pub struct DomainStats {
    pub domain: DomainKind,
    pub problems: u32,
    pub test: u32,
    pub dev: u32,
    pub mean_turns: f64,
    pub min_turns: u32,
    pub max_turns: u32,
    pub mean_entities: f64,
    pub vocabulary: usize,
    pub mean_final_constraints: f64,
    pub test_turn_total: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusStats {
    pub domains: Vec<DomainStats>,
}

impl CorpusStats {
    pub fn total_test_turns(&self) -> u32 {
        self.domains.iter().map(|d| d.test_turn_total).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GeneratorConfig {
        GeneratorConfig::desk(7, 6)
    }

    #[test]
    fn generation_is_deterministic() {
        let a = Corpus::generate(&small()).unwrap();
        let b = Corpus::generate(&small()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.digest(), b.digest());
    }

    #[test]
    fn different_seeds_differ() {
        let a = Corpus::generate(&small()).unwrap();
        let b = Corpus::generate(&GeneratorConfig::desk(8, 6)).unwrap();
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn every_prefix_is_satisfiable() {
        let corpus = Corpus::generate(&small()).unwrap();
        assert_eq!(corpus.problems.len(), 18);
        for p in &corpus.problems {
            assert!(p.turn_count() >= 4 && p.turn_count() <= 10);
            for t in 1..=p.turn_count() {
                let prefix = p.gold_prefix(t);
                assert!(
                    check_sat(&p.schema, &prefix).unwrap().sat,
                    "{} prefix at turn {t} must be satisfiable",
                    p.id
                );
            }
        }
    }

    #[test]
    fn constraints_never_repeat_within_a_problem() {
        let corpus = Corpus::generate(&small()).unwrap();
        for p in &corpus.problems {
            let keys: Vec<_> = p
                .gold_prefix(p.turn_count())
                .iter()
                .map(|c| c.canonical_key())
                .collect();
            let set: BTreeSet<_> = keys.iter().cloned().collect();
            assert_eq!(keys.len(), set.len(), "{} repeats a constraint", p.id);
        }
    }

    #[test]
    fn utterances_parse_back_to_gold() {
        let corpus = Corpus::generate(&small()).unwrap();
        for p in &corpus.problems {
            for turn in &p.turns {
                let parsed = parse_utterance(&turn.utterance);
                let gold: Vec<ConstraintKind> =
                    turn.gold_new.iter().map(|c| c.kind.clone()).collect();
                assert_eq!(parsed, gold, "{}: {}", p.id, turn.utterance);
            }
        }
    }

    #[test]
    fn source_turns_match_position() {
        let corpus = Corpus::generate(&small()).unwrap();
        for p in &corpus.problems {
            for (i, turn) in p.turns.iter().enumerate() {
                for c in &turn.gold_new {
                    assert_eq!(c.source_turn, i as u32 + 1);
                }
            }
        }
    }

    #[test]
    fn split_counts_are_exact_and_seed_stable() {
        let config = GeneratorConfig::desk(11, 10);
        let corpus = Corpus::generate(&config).unwrap();
        for domain in DomainKind::ALL {
            let dev = corpus
                .problems
                .iter()
                .filter(|p| p.domain == domain && p.split == Split::Dev)
                .count();
            assert_eq!(dev, 2, "{domain}");
        }
        let again = Corpus::generate(&config).unwrap();
        for (a, b) in corpus.problems.iter().zip(again.problems.iter()) {
            assert_eq!(a.split, b.split);
        }
    }

    #[test]
    fn jsonl_round_trips() {
        let corpus = Corpus::generate(&small()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        corpus.write_jsonl(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "{\"format\":\"driftbench-corpus\",\"version\":1}"
        );
        let back = Corpus::read_jsonl(&path).unwrap();
        assert_eq!(back, corpus);
    }

    #[test]
    fn degenerate_forms_match_exhaustive_truth() {
        // A constraint is uninformative iff it holds on every complete
        // assignment; check the syntactic filter against enumeration.
        let seating = DomainSchema::Seating(SeatingSchema {
            people: (0..6).map(|i| format!("P{i}")).collect(),
            table: TableShape::Round,
        });
        let cases = [
            (ConstraintKind::MinSeparation { a: "P0".into(), b: "P1".into(), min: 1 }, true),
            (ConstraintKind::MinSeparation { a: "P0".into(), b: "P1".into(), min: 2 }, false),
            (ConstraintKind::Adjacent { a: "P0".into(), b: "P1".into() }, false),
        ];
        for (kind, expect) in cases {
            assert_eq!(is_degenerate(&kind, &seating), expect, "{kind}");
            // Exhaustive cross-check: a constraint is degenerate iff its
            // negated satisfying set is empty, i.e. no assignment violates it.
            let violated_somewhere = count_violations(&kind, &seating) > 0;
            assert_eq!(!violated_somewhere, expect, "{kind}");
        }
        let grid_schema = sample_schema(DomainKind::LogicGrid, &mut seeded_rng());
        let neq = ConstraintKind::NeqAttr {
            a: grid_schema.entities()[0].clone(),
            b: grid_schema.entities()[1].clone(),
            category: match &grid_schema {
                DomainSchema::LogicGrid(s) => s.categories[0].name.clone(),
                _ => unreachable!(),
            },
        };
        assert!(is_degenerate(&neq, &grid_schema));
        assert_eq!(count_violations(&neq, &grid_schema), 0);
    }

    fn seeded_rng() -> ChaCha8Rng {
        seeded::stream_rng("test", &[b"degenerate"])
    }

    /// Count complete assignments violating `kind` by brute force: satisfy
    /// nothing, enumerate everything, evaluate directly.
    fn count_violations(kind: &ConstraintKind, schema: &DomainSchema) -> usize {
        // Enumerate via the brute-force oracle's path: ask for SAT of the
        // *negation* is not expressible for all templates, so enumerate all
        // witnesses by repeatedly excluding... simpler: walk all assignments
        // through the public solver by checking satisfiability of the kind
        // itself plus each candidate pinned: here we just enumerate directly.
        let mut count = 0;
        enumerate_assignments(schema, &mut |a| {
            if !crate::domain::evaluate(kind, a, schema).unwrap() {
                count += 1;
            }
        });
        count
    }

    fn enumerate_assignments(schema: &DomainSchema, f: &mut dyn FnMut(&crate::domain::Assignment)) {
        match schema {
            DomainSchema::Seating(s) => {
                let n = s.people.len();
                permute(n, &mut |perm| {
                    let map = s
                        .people
                        .iter()
                        .enumerate()
                        .map(|(i, p)| (p.clone(), perm[i] as u32 + 1))
                        .collect();
                    f(&crate::domain::Assignment::Seating(map));
                });
            }
            DomainSchema::LogicGrid(s) => {
                let n = s.entities.len();
                let mut perms: Vec<Vec<usize>> = Vec::new();
                permute(n, &mut |p| perms.push(p.to_vec()));
                for c0 in &perms {
                    for c1 in &perms {
                        for c2 in &perms {
                            let picks = [c0, c1, c2];
                            let mut grid = std::collections::BTreeMap::new();
                            for (ei, e) in s.entities.iter().enumerate() {
                                let mut cells = std::collections::BTreeMap::new();
                                for (ci, cat) in s.categories.iter().enumerate() {
                                    cells.insert(
                                        cat.name.clone(),
                                        cat.values[picks[ci][ei]].clone(),
                                    );
                                }
                                grid.insert(e.clone(), cells);
                            }
                            f(&crate::domain::Assignment::LogicGrid(grid));
                        }
                    }
                }
            }
            DomainSchema::Scheduling(_) => unimplemented!("not needed by these tests"),
        }
    }

    fn permute(n: usize, f: &mut dyn FnMut(&[usize])) {
        fn rec(perm: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, f: &mut dyn FnMut(&[usize])) {
            if perm.len() == n {
                f(perm);
                return;
            }
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    perm.push(v);
                    rec(perm, used, n, f);
                    perm.pop();
                    used[v] = false;
                }
            }
        }
        rec(&mut Vec::new(), &mut vec![false; n], n, f);
    }

    #[test]
    fn sampler_respects_schema_and_freshness() {
        let mut rng = seeded::stream_rng("test", &[b"sampler"]);
        for domain in DomainKind::ALL {
            let schema = sample_schema(domain, &mut rng);
            let used = BTreeSet::new();
            for _ in 0..50 {
                let batch = sample_batch(&schema, &mut rng, &used, 3);
                for kind in &batch {
                    assert!(kind.validate(&schema).is_ok(), "{kind}");
                    assert!(!is_degenerate(kind, &schema), "{kind}");
                }
            }
        }
    }
}
