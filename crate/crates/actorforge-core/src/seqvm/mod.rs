//! Sequential call semantics for a Solidity-like contract subset.
//!
//! This is the execution model under test: run-to-completion message calls
//! where a value transfer synchronously hands control to the recipient's
//! fallback before the sender's next statement — the interleaving that makes
//! the DAO drain possible.

pub mod ast;
pub mod parser;
pub mod resolve;
pub mod trace;
pub mod vm;

pub use ast::{CExpr, CFunction, CStmt, CVarType, ContractDef};
pub use parser::{parse_contract_source, parse_contracts};
pub use resolve::resolve_contract;
pub use trace::{effective_transfers, victim_loss, CallOutcome, RevertReason, TraceEvent};
pub use vm::{
    call, deploy, run_scenario, AccountInit, AccountKind, CallParams, CallResult, Deployment,
    FunctionSel, Scenario, ScenarioError, ScenarioOutcome, ScenarioValue, StepCall, Value,
    VmConfig, World,
};
