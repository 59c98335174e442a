//! `driftbench analyze` — turn trace files into report tables, or check the
//! built-in reference numbers with `--selftest`.

use crate::config::{resolve, FileConfig};
use crate::{runtime, usage, CmdResult, Failure};
use clap::Args;
use driftbench::harness::{read_trace, Method, TraceFile};
use driftbench::metrics::inference::{DEFAULT_BOOTSTRAP_REPLICATES, DEFAULT_PERMUTATION_ROUNDS};
use driftbench::metrics::reference;
use driftbench::metrics::report::{build_report, write_report};
use std::path::{Path, PathBuf};

#[derive(Args)]
pub struct AnalyzeArgs {
    /// key=value defaults; explicit flags win.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Trace file to include, as label=path (label defaults to the file
    /// stem). Repeat for side-by-side comparisons.
    #[arg(long = "traces", value_name = "LABEL=PATH")]
    traces: Vec<String>,
    /// Method treated as the comparison baseline.
    #[arg(long)]
    baseline_method: Option<String>,
    /// Directory for the report tables.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Bootstrap replicates for confidence intervals.
    #[arg(long)]
    replicates: Option<u32>,
    /// Permutation rounds for p-values.
    #[arg(long)]
    rounds: Option<u32>,
    /// Seed for the resampling streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Verify the built-in reference tables against the metrics code.
    #[arg(long)]
    selftest: bool,
}

fn selftest() -> CmdResult {
    let checks = reference::selftest();
    let mut failed = 0;
    for check in &checks {
        let mark = if check.pass { "ok  " } else { "FAIL" };
        println!("{mark} {} — {}", check.name, check.detail);
        failed += u32::from(!check.pass);
    }
    if failed > 0 {
        return Err(Failure::Run(format!("{failed} of {} self-checks failed", checks.len())));
    }
    println!("all {} self-checks passed", checks.len());
    Ok(())
}

fn labeled_trace(spec: &str) -> Result<(String, TraceFile), Failure> {
    let (label, path) = match spec.split_once('=') {
        Some((label, path)) => (label.to_string(), Path::new(path).to_path_buf()),
        None => {
            let path = Path::new(spec);
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| usage(format!("cannot derive a label from `{spec}`")))?;
            (stem.to_string(), path.to_path_buf())
        }
    };
    let trace = read_trace(&path)
        .map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    Ok((label, trace))
}

pub fn run(args: AnalyzeArgs) -> CmdResult {
    if args.selftest {
        return selftest();
    }
    let file = FileConfig::load(args.config.as_deref())?;
    if args.traces.is_empty() {
        return Err(usage("at least one --traces label=path is required"));
    }
    let out_dir: PathBuf = match args.out_dir {
        Some(dir) => dir,
        None => file
            .get_raw("out_dir")
            .map(PathBuf::from)
            .ok_or_else(|| usage("--out-dir is required"))?,
    };
    let baseline: Method = resolve(args.baseline_method, &file, "baseline_method", "direct".into())?
        .parse()
        .map_err(usage)?;
    let replicates = resolve(args.replicates, &file, "replicates", DEFAULT_BOOTSTRAP_REPLICATES)?;
    let rounds = resolve(args.rounds, &file, "rounds", DEFAULT_PERMUTATION_ROUNDS)?;
    let seed = resolve(args.seed, &file, "seed", 0)?;

    let traces: Vec<(String, TraceFile)> =
        args.traces.iter().map(|s| labeled_trace(s)).collect::<Result<_, _>>()?;

    let report =
        build_report(&traces, baseline, replicates, rounds, seed).map_err(runtime)?;
    let written = write_report(&report, &out_dir).map_err(runtime)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
