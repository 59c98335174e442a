//! `driftbench run` — evaluate an agent over a corpus and write a trace.

use crate::config::{resolve, resolve_opt, resolve_required, FileConfig};
use crate::{runtime, usage, CmdResult, Failure};
use clap::Args;
use driftbench::agents::{
    Agent, AgentError, CallReply, CallRequest, HttpAgent, HttpConfig, MockAgent, MockPolicy,
};
use driftbench::generator::{Corpus, Split};
use driftbench::harness::{run_corpus, write_trace, Method, RunConfig};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Args)]
pub struct RunArgs {
    /// key=value defaults; explicit flags win.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Corpus JSONL produced by `generate`.
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    /// Split to evaluate: test or dev.
    #[arg(long)]
    split: Option<String>,
    /// Comma-separated subset of direct,cot,ledger_only,mus_repair.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Backend: mock or http.
    #[arg(long)]
    agent: Option<String>,
    /// key=value failure rates for the mock backend.
    #[arg(long, value_name = "FILE")]
    mock_policy: Option<PathBuf>,
    /// Chat-completions API root, e.g. http://localhost:8000/v1.
    #[arg(long)]
    endpoint: Option<String>,
    /// Model name sent to the endpoint; also labels the trace.
    #[arg(long)]
    model: Option<String>,
    /// Repair attempts after the first try.
    #[arg(long)]
    k: Option<u32>,
    /// Worker threads; 0 picks the library default.
    #[arg(long)]
    workers: Option<usize>,
    /// Seed for the run's deterministic streams; also seeds the mock backend.
    #[arg(long)]
    seed: Option<u64>,
    /// Trace destination (JSONL).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// Counts transport-level agent failures so the exit code can reflect them;
/// the harness itself degrades failed calls into error rows and keeps going.
struct CountingAgent<'a> {
    inner: &'a dyn Agent,
    errors: AtomicU64,
}

impl Agent for CountingAgent<'_> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn call(&self, request: &CallRequest) -> Result<CallReply, AgentError> {
        self.inner.call(request).inspect_err(|_| {
            self.errors.fetch_add(1, Ordering::Relaxed);
        })
    }
}

const POLICY_KEYS: &[&str] =
    &["p_contradiction", "p_drift", "p_parse", "p_incomplete", "repair_competence"];

fn load_policy(path: &Path) -> Result<MockPolicy, Failure> {
    let file = FileConfig::load_with(path, POLICY_KEYS)?;
    let mut policy = MockPolicy::perfect();
    policy.p_contradiction = file.get("p_contradiction")?.unwrap_or(policy.p_contradiction);
    policy.p_drift = file.get("p_drift")?.unwrap_or(policy.p_drift);
    policy.p_parse = file.get("p_parse")?.unwrap_or(policy.p_parse);
    policy.p_incomplete = file.get("p_incomplete")?.unwrap_or(policy.p_incomplete);
    policy.repair_competence = file.get("repair_competence")?.unwrap_or(policy.repair_competence);
    policy.validate().map_err(usage)?;
    Ok(policy)
}

fn parse_split(name: &str) -> Result<Split, Failure> {
    match name {
        "test" => Ok(Split::Test),
        "dev" => Ok(Split::Dev),
        other => Err(usage(format!("unknown split `{other}` (use test or dev)"))),
    }
}

pub fn run(args: RunArgs) -> CmdResult {
    let file = FileConfig::load(args.config.as_deref())?;
    let corpus_path: PathBuf = resolve_required(args.corpus, &file, "corpus")?;
    let out: PathBuf = resolve_required(args.out, &file, "out")?;
    let split = parse_split(&resolve(args.split, &file, "split", "test".into())?)?;
    let methods: Vec<Method> = match resolve_opt(args.methods.map(|m| m.join(",")), &file, "methods")? {
        None => Method::ALL.to_vec(),
        Some(joined) => joined
            .split(',')
            .map(|m| m.trim().parse().map_err(usage))
            .collect::<Result<_, _>>()?,
    };
    let seed = resolve(args.seed, &file, "seed", 0)?;
    let config = RunConfig {
        seed,
        methods,
        split,
        repair_attempts: resolve(args.k, &file, "k", 2)?,
        workers: resolve(args.workers, &file, "workers", 0)?,
        ..RunConfig::default()
    };

    let corpus = Corpus::read_jsonl(&corpus_path).map_err(runtime)?;

    let backend = resolve(args.agent, &file, "agent", "mock".into())?;
    let mock;
    let http;
    let inner: &dyn Agent = match backend.as_str() {
        "mock" => {
            let policy = match resolve_opt(args.mock_policy, &file, "mock_policy")? {
                Some(path) => load_policy(&path)?,
                None => MockPolicy::perfect(),
            };
            mock = MockAgent::new("mock", policy, seed);
            &mock
        }
        "http" => {
            let endpoint: String = resolve_required(args.endpoint, &file, "endpoint")?;
            let model: String = resolve_required(args.model, &file, "model")?;
            http = HttpAgent::new(model.clone(), HttpConfig::new(endpoint, model))
                .map_err(runtime)?;
            &http
        }
        other => return Err(usage(format!("unknown agent `{other}` (use mock or http)"))),
    };
    let agent = CountingAgent { inner, errors: AtomicU64::new(0) };

    let trace = run_corpus(&agent, &corpus, &config).map_err(runtime)?;
    write_trace(&trace, &out).map_err(runtime)?;

    for method in &config.methods {
        let rows = trace.rows.iter().filter(|r| r.method == *method);
        let (correct, total) = rows.fold((0u64, 0u64), |(c, t), r| {
            (c + u64::from(r.answer_correct), t + 1)
        });
        if total > 0 {
            println!(
                "{method}: {:.1}% of {total} turns correct",
                100.0 * correct as f64 / total as f64
            );
        }
    }
    println!("wrote {} ({} rows)", out.display(), trace.rows.len());

    let failed_calls = agent.errors.load(Ordering::Relaxed);
    if failed_calls > 0 {
        return Err(Failure::Run(format!(
            "{failed_calls} agent calls failed; their turns are recorded as error rows"
        )));
    }
    Ok(())
}
