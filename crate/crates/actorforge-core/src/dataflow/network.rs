//! Linked networks: actor instances, FIFO buffers and their wiring.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::diag::{DiagCode, Diagnostic, DiagResult};
use crate::frontend::ast::{NetworkDecl, TokenType};
use crate::frontend::resolver::{const_eval_uint, ResolvedActor};
use crate::value::{Address, Fnv1a64, Uint};

use super::token::TokenValue;

/// Runtime value of one state variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateValue {
    Uint(Uint),
    Address(Address),
    Bool(bool),
    Map(BTreeMap<Address, Uint>),
}

/// An ordered FIFO channel from one output port to one input port. The
/// endpoints are `None` only in the single-actor isolation harness used by
/// `simulate_rates`, where scripts inject tokens and collectors drain them.
#[derive(Debug, Clone)]
pub struct Buffer {
    pub id: String,
    pub token_type: TokenType,
    pub from: Option<(usize, usize)>,
    pub to: Option<(usize, usize)>,
    pub contents: VecDeque<TokenValue>,
    pub capacity: Option<usize>,
}

impl Buffer {
    pub fn remaining_capacity(&self) -> usize {
        match self.capacity {
            Some(cap) => cap.saturating_sub(self.contents.len()),
            None => usize::MAX,
        }
    }
}

/// One actor instance: private state, an optional FSM label, and custody of
/// native value. State is inaccessible to neighbours; only tokens cross the
/// boundary.
#[derive(Debug, Clone)]
pub struct ActorInstance {
    pub name: String,
    pub address: Address,
    pub actor_index: usize,
    pub state: BTreeMap<String, StateValue>,
    pub fsm_state: Option<String>,
    pub native_balance: Uint,
}

impl ActorInstance {
    /// 64-bit FNV-1a over the canonical serialization of this instance's
    /// observable state: declared variables in declaration order, the FSM
    /// label, and the native balance.
    pub fn state_hash(&self, actor: &ResolvedActor) -> String {
        let mut h = Fnv1a64::new();
        for var in &actor.decl.state_vars {
            h.update(var.name.as_bytes());
            h.update(&[0xff]);
            match self.state.get(&var.name) {
                Some(StateValue::Uint(v)) => {
                    h.update(&[0]);
                    h.update(&v.to_bytes_be());
                }
                Some(StateValue::Address(a)) => {
                    h.update(&[1]);
                    h.update(&a.0);
                }
                Some(StateValue::Bool(b)) => {
                    h.update(&[2, u8::from(*b)]);
                }
                Some(StateValue::Map(m)) => {
                    h.update(&[3]);
                    for (k, v) in m {
                        h.update(&k.0);
                        h.update(&v.to_bytes_be());
                        h.update(&[0xfe]);
                    }
                }
                None => h.update(&[0xee]),
            }
        }
        h.update(&[0xfd]);
        if let Some(label) = &self.fsm_state {
            h.update(label.as_bytes());
        }
        h.update(&[0xfc]);
        h.update(&self.native_balance.to_bytes_be());
        alloc::format!("{}", h.finish_hex())
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    pub actors: Vec<ResolvedActor>,
    pub instances: Vec<ActorInstance>,
    pub buffers: Vec<Buffer>,
    /// Per instance, per input-port index: the buffer feeding it.
    pub in_buffers: Vec<Vec<Option<usize>>>,
    /// Per instance, per output-port index: the buffer it feeds.
    pub out_buffers: Vec<Vec<Option<usize>>>,
    /// Indices of instances declared as victims.
    pub victims: Vec<usize>,
    /// Round-robin scheduler position.
    pub cursor: usize,
    /// Guard/firing evaluation errors, reported rather than raised.
    pub incidents: Vec<String>,
    pub steps_taken: u64,
}

impl Network {
    pub fn instance_named(&self, name: &str) -> Option<usize> {
        self.instances.iter().position(|i| i.name == name)
    }

    pub fn actor_of(&self, instance: usize) -> &ResolvedActor {
        &self.actors[self.instances[instance].actor_index]
    }

    /// Sum of native balances plus wei carried by in-flight tokens;
    /// constant across firings.
    pub fn total_value(&self) -> Uint {
        let mut total = Uint::zero();
        for inst in &self.instances {
            total = total.checked_add(&inst.native_balance).expect("value fits 256 bits");
        }
        for buf in &self.buffers {
            for tok in &buf.contents {
                total = total.checked_add(&tok.native_value()).expect("value fits 256 bits");
            }
        }
        total
    }
}

/// Default runtime value for a declared state variable.
pub fn initial_state(actor: &ResolvedActor) -> BTreeMap<String, StateValue> {
    use crate::frontend::ast::VarType;
    let mut state = BTreeMap::new();
    for var in &actor.decl.state_vars {
        let value = match var.var_type {
            VarType::Uint => {
                let v = var
                    .initializer
                    .as_ref()
                    .and_then(const_eval_uint)
                    .unwrap_or_else(Uint::zero);
                StateValue::Uint(v)
            }
            VarType::Address => {
                let a = match &var.initializer {
                    Some(crate::frontend::ast::Expr::Addr(a, _)) => *a,
                    _ => Address::ZERO,
                };
                StateValue::Address(a)
            }
            VarType::Bool => {
                let b = matches!(
                    &var.initializer,
                    Some(crate::frontend::ast::Expr::Bool(true, _))
                );
                StateValue::Bool(b)
            }
            VarType::Map => StateValue::Map(BTreeMap::new()),
        };
        state.insert(var.name.clone(), value);
    }
    state
}

/// Link a parsed network against its resolved actors. Connections must be
/// point-to-point: one output port to one input port, matching token types,
/// no fan-in and no fan-out.
pub fn link_network(
    decl: &NetworkDecl,
    actors: &BTreeMap<String, ResolvedActor>,
    buffer_capacity: Option<usize>,
) -> DiagResult<Network> {
    let mut diags = Vec::new();
    let mut actor_list: Vec<ResolvedActor> = Vec::new();
    let mut actor_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut instances: Vec<ActorInstance> = Vec::new();
    let mut instance_index: BTreeMap<String, usize> = BTreeMap::new();

    for (n, inst) in decl.instances.iter().enumerate() {
        let Some(actor) = actors.get(&inst.actor) else {
            diags.push(Diagnostic::error(
                DiagCode::Name,
                inst.span.clone(),
                alloc::format!("unknown actor `{}` (missing import?)", inst.actor),
            ));
            continue;
        };
        let idx = *actor_index.entry(inst.actor.clone()).or_insert_with(|| {
            actor_list.push(actor.clone());
            actor_list.len() - 1
        });
        if instance_index.contains_key(&inst.name) {
            diags.push(Diagnostic::error(
                DiagCode::Name,
                inst.span.clone(),
                alloc::format!("duplicate instance name `{}`", inst.name),
            ));
            continue;
        }
        let balance = match &inst.balance {
            Some(expr) => match const_eval_uint(expr) {
                Some(v) => v,
                None => {
                    diags.push(Diagnostic::error(
                        DiagCode::Type,
                        inst.span.clone(),
                        "instance balance must be a constant uint expression".to_string(),
                    ));
                    Uint::zero()
                }
            },
            None => Uint::zero(),
        };
        instance_index.insert(inst.name.clone(), instances.len());
        instances.push(ActorInstance {
            name: inst.name.clone(),
            address: Address::contract((n + 1) as u64),
            actor_index: idx,
            state: initial_state(actor),
            fsm_state: actor.decl.schedule.as_ref().map(|f| f.initial_state().to_string()),
            native_balance: balance,
        });
    }

    let mut buffers: Vec<Buffer> = Vec::new();
    let mut in_buffers: Vec<Vec<Option<usize>>> = instances
        .iter()
        .map(|i| alloc::vec![None; actor_list[i.actor_index].decl.inputs.len()])
        .collect();
    let mut out_buffers: Vec<Vec<Option<usize>>> = instances
        .iter()
        .map(|i| alloc::vec![None; actor_list[i.actor_index].decl.outputs.len()])
        .collect();

    for conn in &decl.connections {
        let from = instance_index.get(&conn.from_instance).copied();
        let to = instance_index.get(&conn.to_instance).copied();
        let (Some(from), Some(to)) = (from, to) else {
            diags.push(Diagnostic::error(
                DiagCode::Connect,
                conn.span.clone(),
                "connection references an unknown instance".to_string(),
            ));
            continue;
        };
        let from_actor = &actor_list[instances[from].actor_index];
        let to_actor = &actor_list[instances[to].actor_index];
        let Some(out_idx) = from_actor.decl.outputs.iter().position(|p| p.name == conn.from_port)
        else {
            diags.push(Diagnostic::error(
                DiagCode::Connect,
                conn.span.clone(),
                alloc::format!(
                    "`{}` has no output port `{}` (dangling connection)",
                    conn.from_instance,
                    conn.from_port
                ),
            ));
            continue;
        };
        let Some(in_idx) = to_actor.decl.inputs.iter().position(|p| p.name == conn.to_port)
        else {
            diags.push(Diagnostic::error(
                DiagCode::Connect,
                conn.span.clone(),
                alloc::format!(
                    "`{}` has no input port `{}` (dangling connection)",
                    conn.to_instance,
                    conn.to_port
                ),
            ));
            continue;
        };
        let out_ty = from_actor.decl.outputs[out_idx].token_type;
        let in_ty = to_actor.decl.inputs[in_idx].token_type;
        if out_ty != in_ty {
            diags.push(Diagnostic::error(
                DiagCode::Connect,
                conn.span.clone(),
                alloc::format!(
                    "token type mismatch: `{}` carries {}, `{}` expects {}",
                    conn.from_port,
                    out_ty.as_str(),
                    conn.to_port,
                    in_ty.as_str()
                ),
            ));
            continue;
        }
        if out_buffers[from][out_idx].is_some() {
            diags.push(Diagnostic::error(
                DiagCode::Connect,
                conn.span.clone(),
                alloc::format!(
                    "output `{}.{}` is already connected (no fan-out)",
                    conn.from_instance,
                    conn.from_port
                ),
            ));
            continue;
        }
        if in_buffers[to][in_idx].is_some() {
            diags.push(Diagnostic::error(
                DiagCode::Connect,
                conn.span.clone(),
                alloc::format!(
                    "input `{}.{}` is already connected (no fan-in)",
                    conn.to_instance,
                    conn.to_port
                ),
            ));
            continue;
        }
        let id = alloc::format!("b{}", buffers.len());
        out_buffers[from][out_idx] = Some(buffers.len());
        in_buffers[to][in_idx] = Some(buffers.len());
        buffers.push(Buffer {
            id,
            token_type: out_ty,
            from: Some((from, out_idx)),
            to: Some((to, in_idx)),
            contents: VecDeque::new(),
            capacity: buffer_capacity,
        });
    }

    let mut victims = Vec::new();
    for (name, span) in &decl.victims {
        match instance_index.get(name) {
            Some(idx) => victims.push(*idx),
            None => diags.push(Diagnostic::error(
                DiagCode::Name,
                span.clone(),
                alloc::format!("unknown victim instance `{name}`"),
            )),
        }
    }

    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(Network {
        actors: actor_list,
        instances,
        buffers,
        in_buffers,
        out_buffers,
        victims,
        cursor: 0,
        incidents: Vec::new(),
        steps_taken: 0,
    })
}
