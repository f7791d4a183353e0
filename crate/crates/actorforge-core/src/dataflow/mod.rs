//! Atomic-firing dataflow execution of actor networks.
//!
//! Instances communicate only through FIFO buffers. A firing runs in three
//! phases — consume, compute on a private state copy, commit-then-produce —
//! so no observer ever sees intermediate state, and a failed firing leaves
//! buffers and state untouched.

pub mod classify;
pub mod engine;
pub mod flows;
pub mod network;
pub mod simulate;
pub mod token;

pub use classify::{classify_actor, ActorClass, RateSignature, RateVector};
pub use flows::{counterparty_flows, victim_loss};
pub use engine::{
    can_fire, fire, run_until_quiescent, step_network, EvalError, FiringRecord, SchedulerPolicy,
    Termination,
};
pub use network::{link_network, ActorInstance, Buffer, Network, StateValue};
pub use simulate::{simulate_rates, ScriptToken};
pub use token::TokenValue;
