//! Firing rules and the deterministic scheduler.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use crate::frontend::ast::{ActionDecl, BinOp, EmitPayload, Expr, Stmt};
use crate::frontend::resolver::{ConsumeKind, ResolvedActor};
use crate::value::{Address, ArithError, Uint};

use super::network::{ActorInstance, Network, StateValue};
use super::token::TokenValue;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    Arith(ArithError),
    /// Produced tokens carry more wei than the instance holds.
    InsufficientNative { needed: Uint, available: Uint },
    /// Internal inconsistency; should not occur on resolved actors.
    Internal(String),
}

impl From<ArithError> for EvalError {
    fn from(e: ArithError) -> Self {
        EvalError::Arith(e)
    }
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::Arith(e) => write!(f, "{e}"),
            EvalError::InsufficientNative { needed, available } => write!(
                f,
                "insufficient native balance: emitting {needed} wei with only {available} wei"
            ),
            EvalError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

/// Scheduling discipline for `step_network`. Round-robin walks instances in
/// declaration order from a rotating cursor; within an instance, textual
/// action order breaks ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchedulerPolicy {
    #[default]
    RoundRobin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BufferToken {
    pub buffer: String,
    pub token: TokenValue,
}

/// One atomic action execution. `state_before`/`state_after` are FNV-1a
/// digests of the instance state around the firing; produced tokens reach
/// their buffers only after the state commit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiringRecord {
    pub step: u64,
    pub actor: String,
    pub action: String,
    pub consumed: Vec<BufferToken>,
    pub produced: Vec<BufferToken>,
    #[serde(rename = "state_before")]
    pub state_before_hash: String,
    #[serde(rename = "state_after")]
    pub state_after_hash: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Quiescent,
    StepLimitExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum RtValue {
    Uint(Uint),
    Address(Address),
    Bool(bool),
}

impl RtValue {
    fn type_name(&self) -> &'static str {
        match self {
            RtValue::Uint(_) => "uint",
            RtValue::Address(_) => "address",
            RtValue::Bool(_) => "bool",
        }
    }
}

struct Bindings(BTreeMap<String, RtValue>);

fn eval_expr(
    expr: &Expr,
    state: &BTreeMap<String, StateValue>,
    bindings: &Bindings,
) -> Result<RtValue, EvalError> {
    match expr {
        Expr::Uint(v, _) => Ok(RtValue::Uint(v.clone())),
        Expr::Addr(a, _) => Ok(RtValue::Address(*a)),
        Expr::Bool(b, _) => Ok(RtValue::Bool(*b)),
        Expr::Ident(name, _) => {
            if let Some(v) = bindings.0.get(name) {
                return Ok(v.clone());
            }
            match state.get(name) {
                Some(StateValue::Uint(v)) => Ok(RtValue::Uint(v.clone())),
                Some(StateValue::Address(a)) => Ok(RtValue::Address(*a)),
                Some(StateValue::Bool(b)) => Ok(RtValue::Bool(*b)),
                Some(StateValue::Map(_)) => {
                    Err(EvalError::Internal(alloc::format!("map `{name}` used as a value")))
                }
                None => Err(EvalError::Internal(alloc::format!("unbound `{name}`"))),
            }
        }
        Expr::Index { map, key, .. } => {
            let key = match eval_expr(key, state, bindings)? {
                RtValue::Address(a) => a,
                other => {
                    return Err(EvalError::Internal(alloc::format!(
                        "map key must be an address, found {}",
                        other.type_name()
                    )))
                }
            };
            match state.get(map) {
                // Missing keys read as zero.
                Some(StateValue::Map(m)) => {
                    Ok(RtValue::Uint(m.get(&key).cloned().unwrap_or_else(Uint::zero)))
                }
                _ => Err(EvalError::Internal(alloc::format!("`{map}` is not a map"))),
            }
        }
        Expr::Binary { op, lhs, rhs, .. } => {
            let l = eval_expr(lhs, state, bindings)?;
            let r = eval_expr(rhs, state, bindings)?;
            eval_binary(*op, l, r)
        }
        Expr::Not { expr, .. } => match eval_expr(expr, state, bindings)? {
            RtValue::Bool(b) => Ok(RtValue::Bool(!b)),
            other => Err(EvalError::Internal(alloc::format!(
                "`!` needs a bool, found {}",
                other.type_name()
            ))),
        },
    }
}

fn eval_binary(op: BinOp, l: RtValue, r: RtValue) -> Result<RtValue, EvalError> {
    use BinOp::*;
    match (op, l, r) {
        (Add, RtValue::Uint(a), RtValue::Uint(b)) => Ok(RtValue::Uint(a.checked_add(&b)?)),
        (Sub, RtValue::Uint(a), RtValue::Uint(b)) => Ok(RtValue::Uint(a.checked_sub(&b)?)),
        (Mul, RtValue::Uint(a), RtValue::Uint(b)) => Ok(RtValue::Uint(a.checked_mul(&b)?)),
        (Div, RtValue::Uint(a), RtValue::Uint(b)) => Ok(RtValue::Uint(a.checked_div(&b)?)),
        (Lt, RtValue::Uint(a), RtValue::Uint(b)) => Ok(RtValue::Bool(a < b)),
        (Le, RtValue::Uint(a), RtValue::Uint(b)) => Ok(RtValue::Bool(a <= b)),
        (Gt, RtValue::Uint(a), RtValue::Uint(b)) => Ok(RtValue::Bool(a > b)),
        (Ge, RtValue::Uint(a), RtValue::Uint(b)) => Ok(RtValue::Bool(a >= b)),
        (Eq, a, b) => Ok(RtValue::Bool(a == b)),
        (Ne, a, b) => Ok(RtValue::Bool(a != b)),
        (And, RtValue::Bool(a), RtValue::Bool(b)) => Ok(RtValue::Bool(a && b)),
        (Or, RtValue::Bool(a), RtValue::Bool(b)) => Ok(RtValue::Bool(a || b)),
        (op, l, r) => Err(EvalError::Internal(alloc::format!(
            "operator `{}` on {} and {}",
            op.as_str(),
            l.type_name(),
            r.type_name()
        ))),
    }
}

/// FSM gate: when a schedule exists, the action must be permitted in the
/// current state.
fn fsm_permits(actor: &ResolvedActor, instance: &ActorInstance, action: &ActionDecl) -> bool {
    match (&actor.decl.schedule, &instance.fsm_state) {
        (Some(fsm), Some(current)) => {
            fsm.transitions.iter().any(|t| t.from == *current && t.action == action.name)
        }
        (None, _) => true,
        (Some(_), None) => false,
    }
}

/// Peek the tokens an action would consume and build its pattern bindings.
/// Returns None when some buffer lacks tokens or a request token's method
/// does not match the action name.
fn peek_bindings(
    network: &Network,
    instance_idx: usize,
    action_idx: usize,
) -> Option<(Bindings, Vec<(usize, Vec<TokenValue>)>)> {
    let instance = &network.instances[instance_idx];
    let actor = &network.actors[instance.actor_index];
    let action = &actor.decl.actions[action_idx];
    let info = &actor.actions[action_idx];

    let mut bindings = Bindings(BTreeMap::new());
    let mut taken: Vec<(usize, Vec<TokenValue>)> = Vec::new();
    for consume in &info.consumes {
        let buffer_idx = network.in_buffers[instance_idx][consume.port_index]?;
        let buffer = &network.buffers[buffer_idx];
        match &consume.kind {
            ConsumeKind::Request => {
                let head = buffer.contents.front()?;
                let TokenValue::Request { method, sender, value } = head else {
                    return None;
                };
                if *method != action.name {
                    return None;
                }
                bindings.0.insert("sender".to_string(), RtValue::Address(*sender));
                bindings.0.insert("value".to_string(), RtValue::Uint(value.clone()));
                taken.push((buffer_idx, alloc::vec![head.clone()]));
            }
            ConsumeKind::Transfer { to, amount } => {
                let head = buffer.contents.front()?;
                let TokenValue::Transfer { to: dest, amount: amt } = head else {
                    return None;
                };
                bindings.0.insert(to.clone(), RtValue::Address(*dest));
                bindings.0.insert(amount.clone(), RtValue::Uint(amt.clone()));
                taken.push((buffer_idx, alloc::vec![head.clone()]));
            }
            ConsumeKind::Plain { patterns, .. } => {
                if buffer.contents.len() < patterns.len() {
                    return None;
                }
                let mut tokens = Vec::new();
                for (i, pattern) in patterns.iter().enumerate() {
                    let token = buffer.contents[i].clone();
                    let value = match &token {
                        TokenValue::Uint(v) => RtValue::Uint(v.clone()),
                        TokenValue::Address(a) => RtValue::Address(*a),
                        TokenValue::Bool(b) => RtValue::Bool(*b),
                        _ => return None,
                    };
                    bindings.0.insert(pattern.clone(), value);
                    tokens.push(token);
                }
                taken.push((buffer_idx, tokens));
            }
        }
    }
    Some((bindings, taken))
}

/// True iff the action has enough input tokens (with a matching request
/// method), free space for everything it would produce, an FSM permit, and
/// all guards evaluate to true against peeked tokens and current state.
/// Peeking never mutates buffers. A guard that raises an arithmetic error
/// is reported by the caller and treated as not-fireable.
pub fn can_fire(
    network: &Network,
    instance_idx: usize,
    action_idx: usize,
) -> Result<bool, EvalError> {
    let instance = &network.instances[instance_idx];
    let actor = &network.actors[instance.actor_index];
    let action = &actor.decl.actions[action_idx];
    let info = &actor.actions[action_idx];

    if !fsm_permits(actor, instance, action) {
        return Ok(false);
    }
    // Production must fit: a full bounded buffer blocks the writer, and an
    // unconnected output can never accept tokens.
    for (port_idx, count) in info.production.iter().enumerate() {
        if *count == 0 {
            continue;
        }
        match network.out_buffers[instance_idx][port_idx] {
            Some(b) => {
                if network.buffers[b].remaining_capacity() < *count as usize {
                    return Ok(false);
                }
            }
            None => return Ok(false),
        }
    }
    let Some((bindings, _)) = peek_bindings(network, instance_idx, action_idx) else {
        return Ok(false);
    };
    for guard in &action.guards {
        match eval_expr(guard, &instance.state, &bindings)? {
            RtValue::Bool(true) => {}
            RtValue::Bool(false) => return Ok(false),
            other => {
                return Err(EvalError::Internal(alloc::format!(
                    "guard evaluated to {}, expected bool",
                    other.type_name()
                )))
            }
        }
    }
    Ok(true)
}

/// Execute one firing atomically. Phases: (1) dequeue consumed tokens,
/// crediting any wei they carry; (2) run the body against a private copy of
/// the instance state, buffering emissions; (3) commit the state, debit the
/// emitted wei, then append produced tokens to their buffers in body order.
/// Any evaluation error aborts with no state change and no consumption.
pub fn fire(
    network: &mut Network,
    instance_idx: usize,
    action_idx: usize,
    step: u64,
) -> Result<FiringRecord, EvalError> {
    let instance = &network.instances[instance_idx];
    let actor = &network.actors[instance.actor_index];
    let action = &actor.decl.actions[action_idx];
    let state_before_hash = instance.state_hash(actor);

    let (mut bindings, taken) = peek_bindings(network, instance_idx, action_idx)
        .ok_or_else(|| EvalError::Internal("fire called while not fireable".to_string()))?;

    // Phase 1 on working copies: credit consumed value.
    let mut working_state = instance.state.clone();
    let mut working_native = instance.native_balance.clone();
    for (_, tokens) in &taken {
        for token in tokens {
            working_native = working_native.checked_add(&token.native_value())?;
        }
    }

    // Phase 2: body against the private copy; emissions are buffered.
    let self_address = instance.address;
    let mut pending: Vec<(usize, TokenValue)> = Vec::new();
    for stmt in &action.body {
        match stmt {
            Stmt::Let { name, value, .. } => {
                let v = eval_expr(value, &working_state, &bindings)?;
                bindings.0.insert(name.clone(), v);
            }
            Stmt::Assign { name, value, .. } => {
                let v = eval_expr(value, &working_state, &bindings)?;
                let slot = match v {
                    RtValue::Uint(u) => StateValue::Uint(u),
                    RtValue::Address(a) => StateValue::Address(a),
                    RtValue::Bool(b) => StateValue::Bool(b),
                };
                working_state.insert(name.clone(), slot);
            }
            Stmt::MapAssign { map, key, value, .. } => {
                let key = match eval_expr(key, &working_state, &bindings)? {
                    RtValue::Address(a) => a,
                    other => {
                        return Err(EvalError::Internal(alloc::format!(
                            "map key must be an address, found {}",
                            other.type_name()
                        )))
                    }
                };
                let val = match eval_expr(value, &working_state, &bindings)? {
                    RtValue::Uint(v) => v,
                    other => {
                        return Err(EvalError::Internal(alloc::format!(
                            "map value must be a uint, found {}",
                            other.type_name()
                        )))
                    }
                };
                match working_state.get_mut(map) {
                    Some(StateValue::Map(m)) => {
                        m.insert(key, val);
                    }
                    _ => {
                        return Err(EvalError::Internal(alloc::format!("`{map}` is not a map")))
                    }
                }
            }
            Stmt::Emit { port, payload, .. } => {
                let actor = &network.actors[network.instances[instance_idx].actor_index];
                let port_idx = actor
                    .decl
                    .outputs
                    .iter()
                    .position(|p| p.name == *port)
                    .ok_or_else(|| EvalError::Internal(alloc::format!("no output `{port}`")))?;
                let buffer_idx = network.out_buffers[instance_idx][port_idx].ok_or_else(|| {
                    EvalError::Internal(alloc::format!("output `{port}` is not connected"))
                })?;
                match payload {
                    EmitPayload::Request { method, value } => {
                        let value = match value {
                            Some(expr) => match eval_expr(expr, &working_state, &bindings)? {
                                RtValue::Uint(v) => v,
                                other => {
                                    return Err(EvalError::Internal(alloc::format!(
                                        "request value must be a uint, found {}",
                                        other.type_name()
                                    )))
                                }
                            },
                            None => Uint::zero(),
                        };
                        pending.push((
                            buffer_idx,
                            TokenValue::Request {
                                method: method.clone(),
                                sender: self_address,
                                value,
                            },
                        ));
                    }
                    EmitPayload::Values(exprs) => {
                        let buffer_ty = network.buffers[buffer_idx].token_type;
                        if buffer_ty == crate::frontend::ast::TokenType::Transfer {
                            let to = match eval_expr(&exprs[0], &working_state, &bindings)? {
                                RtValue::Address(a) => a,
                                other => {
                                    return Err(EvalError::Internal(alloc::format!(
                                        "transfer destination must be an address, found {}",
                                        other.type_name()
                                    )))
                                }
                            };
                            let amount = match eval_expr(&exprs[1], &working_state, &bindings)? {
                                RtValue::Uint(v) => v,
                                other => {
                                    return Err(EvalError::Internal(alloc::format!(
                                        "transfer amount must be a uint, found {}",
                                        other.type_name()
                                    )))
                                }
                            };
                            pending.push((buffer_idx, TokenValue::Transfer { to, amount }));
                        } else {
                            for expr in exprs {
                                let token = match eval_expr(expr, &working_state, &bindings)? {
                                    RtValue::Uint(v) => TokenValue::Uint(v),
                                    RtValue::Address(a) => TokenValue::Address(a),
                                    RtValue::Bool(b) => TokenValue::Bool(b),
                                };
                                pending.push((buffer_idx, token));
                            }
                        }
                    }
                }
            }
        }
    }

    // Phase 3 precheck: emitted wei must be covered by custody.
    let mut outgoing = Uint::zero();
    for (_, token) in &pending {
        outgoing = outgoing.checked_add(&token.native_value())?;
    }
    if outgoing > working_native {
        return Err(EvalError::InsufficientNative {
            needed: outgoing,
            available: working_native,
        });
    }
    working_native = working_native.checked_sub(&outgoing)?;

    // Commit: dequeue for real, publish state, then produce in body order.
    let mut consumed = Vec::new();
    for (buffer_idx, tokens) in &taken {
        let buffer = &mut network.buffers[*buffer_idx];
        for expected in tokens {
            let actual = buffer
                .contents
                .pop_front()
                .ok_or_else(|| EvalError::Internal("buffer drained during firing".to_string()))?;
            debug_assert_eq!(&actual, expected);
            consumed.push(BufferToken { buffer: buffer.id.clone(), token: actual });
        }
    }
    let next_fsm = {
        let actor = &network.actors[network.instances[instance_idx].actor_index];
        match (&actor.decl.schedule, &network.instances[instance_idx].fsm_state) {
            (Some(fsm), Some(current)) => fsm
                .transitions
                .iter()
                .find(|t| t.from == *current && t.action == action.name)
                .map(|t| t.to.clone()),
            _ => None,
        }
    };
    let instance = &mut network.instances[instance_idx];
    instance.state = working_state;
    instance.native_balance = working_native;
    if next_fsm.is_some() {
        instance.fsm_state = next_fsm;
    }

    let mut produced = Vec::new();
    for (buffer_idx, token) in pending {
        let buffer = &mut network.buffers[buffer_idx];
        buffer.contents.push_back(token.clone());
        produced.push(BufferToken { buffer: buffer.id.clone(), token });
    }

    let instance = &network.instances[instance_idx];
    let actor = &network.actors[instance.actor_index];
    let state_after_hash = instance.state_hash(actor);
    Ok(FiringRecord {
        step,
        actor: instance.name.clone(),
        action: action.name.clone(),
        consumed,
        produced,
        state_before_hash,
        state_after_hash,
    })
}

/// Fire at most one eligible (instance, action) pair under the policy.
/// Returns None iff nothing is fireable (quiescence). Guard evaluation
/// errors and aborted firings are appended to `network.incidents` and the
/// pair is skipped for this step.
pub fn step_network(network: &mut Network, policy: SchedulerPolicy) -> Option<FiringRecord> {
    let SchedulerPolicy::RoundRobin = policy;
    let n = network.instances.len();
    for offset in 0..n {
        let idx = (network.cursor + offset) % n;
        let action_count = network.actor_of(idx).decl.actions.len();
        for action_idx in 0..action_count {
            match can_fire(network, idx, action_idx) {
                Ok(true) => {}
                Ok(false) => continue,
                Err(e) => {
                    let name = &network.instances[idx].name;
                    network
                        .incidents
                        .push(alloc::format!("{name}: guard evaluation failed: {e}"));
                    continue;
                }
            }
            let step = network.steps_taken;
            match fire(network, idx, action_idx, step) {
                Ok(record) => {
                    network.steps_taken += 1;
                    network.cursor = (idx + 1) % n;
                    return Some(record);
                }
                Err(e) => {
                    let name = &network.instances[idx].name;
                    network.incidents.push(alloc::format!("{name}: firing aborted: {e}"));
                    continue;
                }
            }
        }
    }
    None
}

/// Run until no action can fire or `max_steps` firings have happened,
/// whichever comes first. Hitting the limit with work remaining is reported
/// as a distinguished terminator, not an error.
pub fn run_until_quiescent(
    network: &mut Network,
    policy: SchedulerPolicy,
    max_steps: u64,
) -> (Vec<FiringRecord>, Termination) {
    let mut trace = Vec::new();
    for _ in 0..max_steps {
        match step_network(network, policy) {
            Some(record) => trace.push(record),
            None => return (trace, Termination::Quiescent),
        }
    }
    let anything_left = (0..network.instances.len()).any(|i| {
        (0..network.actor_of(i).decl.actions.len())
            .any(|a| matches!(can_fire(network, i, a), Ok(true)))
    });
    if anything_left {
        (trace, Termination::StepLimitExceeded)
    } else {
        (trace, Termination::Quiescent)
    }
}
