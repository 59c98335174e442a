//! `driftbench fixtures` — replay the golden transcripts and compare every
//! computed turn verdict against its scripted mark.

use crate::{runtime, CmdResult, Failure};
use driftbench::fixtures::{replay_all, transcripts};

fn mark(correct: bool) -> char {
    if correct {
        '✓'
    } else {
        '✗'
    }
}

pub fn run() -> CmdResult {
    let reports = replay_all().map_err(runtime)?;
    let mut mismatches: Vec<String> = Vec::new();

    for (transcript, report) in transcripts().iter().zip(&reports) {
        println!("{}", report.id);
        for turn in &report.turns {
            let mut line = format!(
                "  turn {}: baseline {} repair {}",
                turn.turn,
                mark(turn.direct.correct),
                mark(turn.mus.correct)
            );
            if !turn.matches() {
                line.push_str(&format!(
                    "  (expected baseline {} repair {})",
                    mark(turn.direct_expected),
                    mark(turn.mus_expected)
                ));
                if turn.direct.correct != turn.direct_expected {
                    mismatches.push(format!("{} turn {} baseline", report.id, turn.turn));
                }
                if turn.mus.correct != turn.mus_expected {
                    mismatches.push(format!("{} turn {} repair", report.id, turn.turn));
                }
            }
            println!("{line}");
        }
        let (bc, bt) = report.score(false);
        let (rc, rt) = report.score(true);
        let (ebc, _) = transcript.expected_score(false);
        let (erc, _) = transcript.expected_score(true);
        println!("  baseline {bc}/{bt} (expected {ebc}), repair {rc}/{rt} (expected {erc})");
    }

    if !mismatches.is_empty() {
        for cell in &mismatches {
            eprintln!("mismatch: {cell}");
        }
        return Err(Failure::Run(format!(
            "{} fixture cells differ from their scripted marks",
            mismatches.len()
        )));
    }
    println!("all fixture marks reproduced");
    Ok(())
}
