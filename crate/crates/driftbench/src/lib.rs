//! Multi-turn constraint benchmark with solver-instrumented verification.
//!
//! A conversation presents constraints one turn at a time; the system under
//! test answers each turn with a complete assignment and the harness checks
//! the answer — and the model's own accumulated constraint ledger — with an
//! exact finite-domain solver. Failures split into *drift* (the ledger is
//! satisfiable but the answer violates it), *contradiction* (the ledger
//! itself became unsatisfiable), and *other* (malformed or partial answers).
//! A repair-enabled method feeds minimal unsatisfiable cores back into the
//! model instead of a bare "wrong, try again".
//!
//! Crate layout:
//!
//! * [`domain`] — schemas, constraint vocabulary, assignments, evaluation
//! * [`solver`] — satisfiability, witnesses, minimal unsatisfiable subsets
//! * [`ledger`] — the per-conversation constraint store
//! * [`generator`] — seeded corpus construction and utterance templates
//! * [`verifier`] — answer parsing and per-turn verdicts
//! * [`agents`] — the model interface: scripted simulator and HTTP client
//! * [`harness`] — the turn loop, repair loop, and trace files
//! * [`metrics`] — aggregate tables and uncertainty estimates
//! * [`fixtures`] — pinned reference conversations for regression replay

pub mod agents;
pub mod domain;
pub mod fixtures;
pub mod generator;
pub mod harness;
pub mod ledger;
pub mod metrics;
pub(crate) mod seeded;
pub mod solver;
pub mod verifier;
