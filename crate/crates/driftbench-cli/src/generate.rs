//! `driftbench generate` — build a corpus and write it as JSONL.

use crate::config::{resolve_opt, resolve_required, FileConfig};
use crate::{runtime, usage, CmdResult};
use clap::Args;
use driftbench::domain::DomainKind;
use driftbench::generator::{Corpus, GeneratorConfig};
use std::collections::BTreeSet;
use std::path::PathBuf;

#[derive(Args)]
pub struct GenerateArgs {
    /// key=value defaults; explicit flags win.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed for the whole corpus.
    #[arg(long, conflicts_with = "paper_scale")]
    seed: Option<u64>,
    /// Problems generated for each domain.
    #[arg(long, value_name = "N", conflicts_with = "paper_scale")]
    count_per_domain: Option<u32>,
    /// Keep only these domains (comma-separated: logic_grid,scheduling,seating).
    #[arg(long, value_delimiter = ',')]
    domains: Option<Vec<String>>,
    /// Full benchmark shape: 340 problems per domain under the frozen seed.
    #[arg(long)]
    paper_scale: bool,
    /// Corpus destination (JSONL).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn parse_domain(name: &str) -> Result<DomainKind, crate::Failure> {
    DomainKind::ALL
        .into_iter()
        .find(|d| d.as_str() == name)
        .ok_or_else(|| usage(format!("unknown domain `{name}`")))
}

pub fn run(args: GenerateArgs) -> CmdResult {
    let file = FileConfig::load(args.config.as_deref())?;
    let paper_scale = args.paper_scale || file.get::<bool>("paper_scale")?.unwrap_or(false);
    let seed = resolve_opt(args.seed, &file, "seed")?;
    let count = resolve_opt(args.count_per_domain, &file, "count_per_domain")?;
    let out: PathBuf = resolve_required(args.out, &file, "out")?;

    let config = if paper_scale {
        if seed.is_some() || count.is_some() {
            return Err(usage("--paper-scale fixes the seed and per-domain count"));
        }
        GeneratorConfig::paper_scale()
    } else {
        GeneratorConfig::desk(seed.unwrap_or(0), count.unwrap_or(10))
    };

    let mut corpus = Corpus::generate(&config).map_err(runtime)?;

    let domains = args
        .domains
        .or_else(|| {
            file.get_raw("domains")
                .map(|v| v.split(',').map(str::to_string).collect())
        })
        .map(|names| {
            names
                .iter()
                .map(|n| parse_domain(n.trim()))
                .collect::<Result<BTreeSet<_>, _>>()
        })
        .transpose()?;
    if let Some(keep) = domains {
        corpus.problems.retain(|p| keep.contains(&p.domain));
        if corpus.problems.is_empty() {
            return Err(usage("domain filter left the corpus empty"));
        }
    }

    corpus.write_jsonl(&out).map_err(runtime)?;

    let stats = corpus.stats();
    for d in &stats.domains {
        println!(
            "{}: {} problems ({} test / {} dev), mean turns {:.2}, mean final constraints {:.2}",
            d.domain.as_str(),
            d.problems,
            d.test,
            d.dev,
            d.mean_turns,
            d.mean_final_constraints,
        );
    }
    println!(
        "total: {} problems, {} test turns, digest {}",
        corpus.problems.len(),
        stats.total_test_turns(),
        &corpus.digest()[..12],
    );
    println!("wrote {}", out.display());
    Ok(())
}
