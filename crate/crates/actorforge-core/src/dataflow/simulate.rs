//! Brute-force rate observation: run one actor in isolation and record the
//! per-firing consumption/production vectors. This is the independent
//! oracle the classifier is checked against.

use alloc::collections::VecDeque;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::frontend::resolver::ResolvedActor;
use crate::value::{Address, Uint};

use super::classify::RateVector;
use super::engine::{step_network, FiringRecord, SchedulerPolicy};
use super::network::{initial_state, ActorInstance, Buffer, Network};
use super::token::TokenValue;

/// One scripted input token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptToken {
    pub port: String,
    pub token: TokenValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimulateError {
    UnknownPort(String),
    TypeMismatch { port: String, token: String },
    /// A firing aborted; carries the reported incident text.
    Firing(String),
}

impl core::fmt::Display for SimulateError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SimulateError::UnknownPort(p) => write!(f, "script names unknown input port `{p}`"),
            SimulateError::TypeMismatch { port, token } => {
                write!(f, "token {token} does not match the type of port `{port}`")
            }
            SimulateError::Firing(msg) => write!(f, "{msg}"),
        }
    }
}

/// Build the isolation harness: one instance, script-fed input buffers and
/// open collector buffers on every output.
fn isolation_network(
    actor: &ResolvedActor,
    script: &[ScriptToken],
    initial_balance: Uint,
) -> Result<Network, SimulateError> {
    use crate::frontend::ast::TokenType;

    let mut buffers: Vec<Buffer> = Vec::new();
    let mut in_buffers = alloc::vec![alloc::vec![None; actor.decl.inputs.len()]];
    let mut out_buffers = alloc::vec![alloc::vec![None; actor.decl.outputs.len()]];
    for (i, port) in actor.decl.inputs.iter().enumerate() {
        in_buffers[0][i] = Some(buffers.len());
        buffers.push(Buffer {
            id: alloc::format!("in:{}", port.name),
            token_type: port.token_type,
            from: None,
            to: Some((0, i)),
            contents: VecDeque::new(),
            capacity: None,
        });
    }
    for (i, port) in actor.decl.outputs.iter().enumerate() {
        out_buffers[0][i] = Some(buffers.len());
        buffers.push(Buffer {
            id: alloc::format!("out:{}", port.name),
            token_type: port.token_type,
            from: Some((0, i)),
            to: None,
            contents: VecDeque::new(),
            capacity: None,
        });
    }

    for entry in script {
        let Some(idx) = actor.decl.inputs.iter().position(|p| p.name == entry.port) else {
            return Err(SimulateError::UnknownPort(entry.port.clone()));
        };
        let want = actor.decl.inputs[idx].token_type;
        let ok = matches!(
            (&entry.token, want),
            (TokenValue::Uint(_), TokenType::Uint)
                | (TokenValue::Address(_), TokenType::Address)
                | (TokenValue::Bool(_), TokenType::Bool)
                | (TokenValue::Request { .. }, TokenType::Request)
                | (TokenValue::Transfer { .. }, TokenType::Transfer)
        );
        if !ok {
            return Err(SimulateError::TypeMismatch {
                port: entry.port.clone(),
                token: alloc::format!("{}", entry.token),
            });
        }
        let b = in_buffers[0][idx].expect("input buffer just created");
        buffers[b].contents.push_back(entry.token.clone());
    }

    let instance = ActorInstance {
        name: actor.decl.name.clone(),
        address: Address::contract(1),
        actor_index: 0,
        state: initial_state(actor),
        fsm_state: actor.decl.schedule.as_ref().map(|f| f.initial_state().to_string()),
        native_balance: initial_balance,
    };
    Ok(Network {
        actors: alloc::vec![actor.clone()],
        instances: alloc::vec![instance],
        buffers,
        in_buffers,
        out_buffers,
        victims: Vec::new(),
        cursor: 0,
        incidents: Vec::new(),
        steps_taken: 0,
    })
}

/// Translate a firing record into a per-port rate vector.
pub fn observed_vector(network: &Network, record: &FiringRecord) -> RateVector {
    let actor = network.actor_of(0);
    let mut consumed = alloc::vec![0u32; actor.decl.inputs.len()];
    let mut produced = alloc::vec![0u32; actor.decl.outputs.len()];
    for bt in &record.consumed {
        let buffer = network.buffers.iter().find(|b| b.id == bt.buffer).expect("known buffer");
        if let Some((_, port)) = buffer.to {
            consumed[port] += 1;
        }
    }
    for bt in &record.produced {
        let buffer = network.buffers.iter().find(|b| b.id == bt.buffer).expect("known buffer");
        if let Some((_, port)) = buffer.from {
            produced[port] += 1;
        }
    }
    RateVector { consumed, produced }
}

/// Fire the actor up to `n_firings` times against the scripted inputs and
/// report the observed (action, rate-vector) sequence. Stops early at
/// quiescence; firing errors propagate.
pub fn simulate_rates(
    actor: &ResolvedActor,
    script: &[ScriptToken],
    n_firings: usize,
    initial_balance: Uint,
) -> Result<Vec<(String, RateVector)>, SimulateError> {
    let mut network = isolation_network(actor, script, initial_balance)?;
    let mut observed = Vec::new();
    for _ in 0..n_firings {
        let before = network.incidents.len();
        match step_network(&mut network, SchedulerPolicy::RoundRobin) {
            Some(record) => {
                let vector = observed_vector(&network, &record);
                observed.push((record.action, vector));
            }
            None => {
                if network.incidents.len() > before {
                    return Err(SimulateError::Firing(network.incidents[before].clone()));
                }
                break;
            }
        }
    }
    Ok(observed)
}
