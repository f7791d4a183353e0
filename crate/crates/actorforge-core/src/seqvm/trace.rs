//! Trace events emitted by the VM and the drain metric computed from them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::value::{Address, Uint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RevertReason {
    Require,
    InsufficientBalance,
    Overflow,
    DivisionByZero,
    OutOfDepth,
    NotPayable,
    NoSuchFunction,
    NoFallback,
    NotAContract,
    ArgumentMismatch,
    NoReturnValue,
    StatementBudget,
    TypeError,
    /// A nested call reverted; the origin frame already reported its reason.
    SubcallReverted,
}

impl core::fmt::Display for RevertReason {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let text = match self {
            RevertReason::Require => "require failed",
            RevertReason::InsufficientBalance => "insufficient balance",
            RevertReason::Overflow => "arithmetic overflow",
            RevertReason::DivisionByZero => "division by zero",
            RevertReason::OutOfDepth => "call depth exceeded",
            RevertReason::NotPayable => "function is not payable",
            RevertReason::NoSuchFunction => "no such function",
            RevertReason::NoFallback => "recipient has no fallback",
            RevertReason::NotAContract => "callee is not a contract",
            RevertReason::ArgumentMismatch => "argument count mismatch",
            RevertReason::NoReturnValue => "call produced no value",
            RevertReason::StatementBudget => "statement budget exhausted",
            RevertReason::TypeError => "runtime type error",
            RevertReason::SubcallReverted => "nested call reverted",
        };
        write!(f, "{text}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallOutcome {
    Success,
    Reverted(RevertReason),
}

/// JSON Lines trace event. Field order is fixed by the struct layout for
/// golden-file diffing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    CallEnter {
        caller: Address,
        callee: Address,
        function: String,
        value: Uint,
        depth: u32,
    },
    CallExit {
        callee: Address,
        function: String,
        depth: u32,
        outcome: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        reason: Option<RevertReason>,
    },
    Transfer {
        from: Address,
        to: Address,
        amount: Uint,
    },
    StorageWrite {
        address: Address,
        var: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        key: Option<Address>,
        old: String,
        new: String,
    },
    Revert {
        reason: RevertReason,
    },
}

impl TraceEvent {
    pub fn call_exit(callee: Address, function: String, depth: u32, outcome: CallOutcome) -> Self {
        match outcome {
            CallOutcome::Success => TraceEvent::CallExit {
                callee,
                function,
                depth,
                outcome: "success",
                reason: None,
            },
            CallOutcome::Reverted(reason) => TraceEvent::CallExit {
                callee,
                function,
                depth,
                outcome: "reverted",
                reason: Some(reason),
            },
        }
    }
}

/// Transfers that survived every enclosing frame, i.e. were not rolled back
/// by a revert. Walks the bracketed CallEnter/CallExit structure.
pub fn effective_transfers(trace: &[TraceEvent]) -> Vec<(Address, Address, Uint)> {
    let mut committed: Vec<(Address, Address, Uint)> = Vec::new();
    let mut stack: Vec<Vec<(Address, Address, Uint)>> = Vec::new();
    for event in trace {
        match event {
            TraceEvent::CallEnter { .. } => stack.push(Vec::new()),
            TraceEvent::Transfer { from, to, amount } => {
                let entry = (*from, *to, amount.clone());
                match stack.last_mut() {
                    Some(level) => level.push(entry),
                    None => committed.push(entry),
                }
            }
            TraceEvent::CallExit { outcome, .. } => {
                let level = stack.pop().unwrap_or_default();
                if *outcome == "success" {
                    match stack.last_mut() {
                        Some(parent) => parent.extend(level),
                        None => committed.extend(level),
                    }
                }
            }
            _ => {}
        }
    }
    // Unclosed frames (none in well-formed traces) are treated as committed.
    for level in stack {
        committed.extend(level);
    }
    committed
}

/// Net value extracted from the victim set: for every outside counterparty,
/// what it received from victims beyond what it paid in, summed. The
/// attacker's own deposit is thereby netted out while honest depositors'
/// losses are not mistaken for attacker contributions.
pub fn victim_loss(trace: &[TraceEvent], victims: &BTreeSet<Address>) -> Uint {
    let mut inflow: BTreeMap<Address, Uint> = BTreeMap::new();
    let mut outflow: BTreeMap<Address, Uint> = BTreeMap::new();
    for (from, to, amount) in effective_transfers(trace) {
        if victims.contains(&from) && !victims.contains(&to) {
            let slot = outflow.entry(to).or_insert_with(Uint::zero);
            *slot = slot.checked_add(&amount).expect("flow fits 256 bits");
        }
        if victims.contains(&to) && !victims.contains(&from) {
            let slot = inflow.entry(from).or_insert_with(Uint::zero);
            *slot = slot.checked_add(&amount).expect("flow fits 256 bits");
        }
    }
    let mut loss = Uint::zero();
    for (party, received) in outflow {
        let contributed = inflow.get(&party).cloned().unwrap_or_else(Uint::zero);
        if received > contributed {
            let gain = received.checked_sub(&contributed).expect("received >= contributed");
            loss = loss.checked_add(&gain).expect("loss fits 256 bits");
        }
    }
    loss
}
