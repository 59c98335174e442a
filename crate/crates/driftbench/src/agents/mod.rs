//! Agents under evaluation.
//!
//! An agent is anything that can answer two kinds of calls: extract the
//! constraints from a user message, and produce an assignment for the
//! puzzle so far. The harness renders full prompts for every call; real
//! model backends consume those, while the simulated agent consumes the
//! structured [`CallContext`] instead and fabricates failures at
//! configured rates.

mod http;
mod mock;
pub mod prompts;

pub use http::{HttpAgent, HttpConfig};
pub use mock::{MockAgent, MockPolicy};

use crate::domain::{Constraint, DomainKind, DomainSchema};
use crate::generator::Problem;
use crate::harness::Method;
use crate::ledger::Ledger;
use crate::verifier::RepairPacket;

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("api status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("transport: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("malformed completion: {0}")]
    Malformed(String),
}

/// Which of the two per-turn calls this is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallKind {
    /// Turn the user message into structured constraints.
    Extract,
    /// Produce an assignment for the conversation so far.
    Answer,
}

/// Structured view of the call, for agents that do not read prompts.
/// Everything a simulated policy needs to decide its reply
/// deterministically.
#[derive(Clone, Copy)]
pub struct CallContext<'a> {
    pub problem: &'a Problem,
    pub domain: DomainKind,
    pub schema: &'a DomainSchema,
    pub method: Method,
    /// 1-based turn within the conversation.
    pub turn: u32,
    /// 0 on the first try; 1.. for repair attempts.
    pub attempt: u32,
    /// True constraints introduced this turn.
    pub gold_new: &'a [Constraint],
    /// True constraints through this turn.
    pub gold_prefix: &'a [Constraint],
    /// The agent's own ledger before this turn's merge.
    pub ledger_before: &'a Ledger,
    /// Verification feedback, present on repair attempts.
    pub repair: Option<&'a RepairPacket>,
}

/// One fully rendered model call.
pub struct CallRequest<'a> {
    pub kind: CallKind,
    pub system: &'a str,
    pub user: &'a str,
    pub context: CallContext<'a>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallReply {
    pub text: String,
    /// The backend reported the reply was cut off by its token limit.
    pub truncated: bool,
}

impl CallReply {
    pub fn full(text: String) -> Self {
        CallReply { text, truncated: false }
    }
}

/// A system under evaluation. Implementations must be thread-safe: the
/// harness fans problems out across workers.
pub trait Agent: Send + Sync {
    fn name(&self) -> &str;
    fn call(&self, request: &CallRequest) -> Result<CallReply, AgentError>;
}
