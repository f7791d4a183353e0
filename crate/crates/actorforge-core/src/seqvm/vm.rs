//! The sequential call VM: world state, deployment, message calls and
//! scenario execution.
//!
//! Call semantics: a frame executes statement by statement; `send` moves
//! value and synchronously runs the recipient's fallback at depth+1 before
//! the next statement. A revert rolls back the failing frame and all of its
//! sub-frames. Failures of statement-position calls and of send-triggered
//! fallbacks are recorded in the trace and the caller continues (the
//! historical unchecked-call pattern); a call whose *result* is needed
//! propagates failure, since there is no value to produce.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::frontend::ast::BinOp;
use crate::value::{Address, ArithError, Uint};

use super::ast::{CExpr, CFunction, CStmt, CVarType, ContractDef};
use super::trace::{CallOutcome, RevertReason, TraceEvent};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Uint(Uint),
    Address(Address),
    Bool(bool),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Uint(_) => "uint",
            Value::Address(_) => "address",
            Value::Bool(_) => "bool",
        }
    }

    pub fn render(&self) -> String {
        match self {
            Value::Uint(v) => v.to_decimal(),
            Value::Address(a) => a.to_hex(),
            Value::Bool(b) => alloc::format!("{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StorageValue {
    Uint(Uint),
    Address(Address),
    Bool(bool),
    Map(BTreeMap<Address, Uint>),
}

impl StorageValue {
    fn default_for(ty: CVarType) -> StorageValue {
        match ty {
            CVarType::Uint => StorageValue::Uint(Uint::zero()),
            CVarType::Address => StorageValue::Address(Address::ZERO),
            CVarType::Bool => StorageValue::Bool(false),
            CVarType::Map => StorageValue::Map(BTreeMap::new()),
        }
    }

    fn render(&self) -> String {
        match self {
            StorageValue::Uint(v) => v.to_decimal(),
            StorageValue::Address(a) => a.to_hex(),
            StorageValue::Bool(b) => alloc::format!("{b}"),
            StorageValue::Map(m) => alloc::format!("map({} keys)", m.len()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum AccountKind {
    Wallet,
    Contract { def: Arc<ContractDef>, storage: BTreeMap<String, StorageValue> },
}

#[derive(Debug, Clone)]
pub struct Account {
    pub balance: Uint,
    pub kind: AccountKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VmConfig {
    pub max_call_depth: u32,
    /// Per-scenario cap on executed statements; the dialect has no loops,
    /// so this is a backstop rather than a gas model.
    pub statement_budget: u64,
}

impl Default for VmConfig {
    fn default() -> Self {
        VmConfig { max_call_depth: 1024, statement_budget: 1_000_000 }
    }
}

#[derive(Debug, Clone)]
pub struct World {
    pub accounts: BTreeMap<Address, Account>,
    pub config: VmConfig,
    next_contract: u64,
    next_wallet: u64,
    statements_executed: u64,
}

impl World {
    pub fn new(config: VmConfig) -> Self {
        World {
            accounts: BTreeMap::new(),
            config,
            next_contract: 1,
            next_wallet: 1,
            statements_executed: 0,
        }
    }

    pub fn balance_of(&self, addr: Address) -> Uint {
        self.accounts.get(&addr).map(|a| a.balance.clone()).unwrap_or_else(Uint::zero)
    }

    pub fn storage_map_get(&self, addr: Address, var: &str, key: Address) -> Uint {
        match self.accounts.get(&addr).map(|a| &a.kind) {
            Some(AccountKind::Contract { storage, .. }) => match storage.get(var) {
                Some(StorageValue::Map(m)) => m.get(&key).cloned().unwrap_or_else(Uint::zero),
                _ => Uint::zero(),
            },
            _ => Uint::zero(),
        }
    }

    pub fn new_wallet(&mut self, balance: Uint) -> Address {
        let addr = Address::wallet(self.next_wallet);
        self.next_wallet += 1;
        self.accounts.insert(addr, Account { balance, kind: AccountKind::Wallet });
        addr
    }

    /// Sum of every account balance; conserved by calls and transfers.
    pub fn total_value(&self) -> Uint {
        let mut total = Uint::zero();
        for account in self.accounts.values() {
            total = total.checked_add(&account.balance).expect("total fits 256 bits");
        }
        total
    }

    fn snapshot(&self) -> (BTreeMap<Address, Account>, u64, u64) {
        (self.accounts.clone(), self.next_contract, self.next_wallet)
    }

    fn restore(&mut self, snapshot: (BTreeMap<Address, Account>, u64, u64)) {
        self.accounts = snapshot.0;
        self.next_contract = snapshot.1;
        self.next_wallet = snapshot.2;
    }

    fn ensure_account(&mut self, addr: Address) -> &mut Account {
        self.accounts
            .entry(addr)
            .or_insert_with(|| Account { balance: Uint::zero(), kind: AccountKind::Wallet })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionSel {
    Named,
    Fallback,
    Constructor,
}

#[derive(Debug, Clone)]
pub struct CallParams {
    pub caller: Address,
    pub callee: Address,
    pub selector: FunctionSel,
    /// Function name for `FunctionSel::Named`.
    pub function: String,
    pub value: Uint,
    pub args: Vec<Value>,
}

impl CallParams {
    fn display_name(&self) -> String {
        match self.selector {
            FunctionSel::Named => self.function.clone(),
            FunctionSel::Fallback => "fallback".to_string(),
            FunctionSel::Constructor => "constructor".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CallResult {
    Success(Option<Value>),
    Reverted(RevertReason),
}

struct Abort {
    reason: RevertReason,
    /// Whether the origin frame already emitted the Revert event.
    reported: bool,
}

impl Abort {
    fn here(reason: RevertReason) -> Self {
        Abort { reason, reported: false }
    }
}

impl From<ArithError> for Abort {
    fn from(e: ArithError) -> Self {
        match e {
            ArithError::Overflow => Abort::here(RevertReason::Overflow),
            ArithError::DivisionByZero => Abort::here(RevertReason::DivisionByZero),
        }
    }
}

enum Flow {
    Next,
    Return(Option<Value>),
}

struct Frame<'a> {
    world: &'a mut World,
    trace: &'a mut Vec<TraceEvent>,
    self_addr: Address,
    caller: Address,
    msg_value: Uint,
    depth: u32,
    locals: BTreeMap<String, Value>,
}

/// Execute a message call. Emits a well-bracketed CallEnter/CallExit pair;
/// on revert, all storage and balance changes of this frame and its
/// sub-frames are rolled back, the origin failure is recorded as a Revert
/// event, and the result reports the reason.
pub fn call(
    world: &mut World,
    trace: &mut Vec<TraceEvent>,
    params: CallParams,
    depth: u32,
) -> CallResult {
    let name = params.display_name();
    trace.push(TraceEvent::CallEnter {
        caller: params.caller,
        callee: params.callee,
        function: name.clone(),
        value: params.value.clone(),
        depth,
    });
    if depth > world.config.max_call_depth {
        trace.push(TraceEvent::Revert { reason: RevertReason::OutOfDepth });
        trace.push(TraceEvent::call_exit(
            params.callee,
            name,
            depth,
            CallOutcome::Reverted(RevertReason::OutOfDepth),
        ));
        return CallResult::Reverted(RevertReason::OutOfDepth);
    }
    let snapshot = world.snapshot();
    match execute_call(world, trace, &params, depth) {
        Ok(ret) => {
            trace.push(TraceEvent::call_exit(params.callee, name, depth, CallOutcome::Success));
            CallResult::Success(ret)
        }
        Err(abort) => {
            world.restore(snapshot);
            if !abort.reported {
                trace.push(TraceEvent::Revert { reason: abort.reason });
            }
            trace.push(TraceEvent::call_exit(
                params.callee,
                name,
                depth,
                CallOutcome::Reverted(abort.reason),
            ));
            CallResult::Reverted(abort.reason)
        }
    }
}

fn execute_call(
    world: &mut World,
    trace: &mut Vec<TraceEvent>,
    params: &CallParams,
    depth: u32,
) -> Result<Option<Value>, Abort> {
    // Move the attached value first; the callee sees it as msg.value and in
    // its own balance.
    if !params.value.is_zero() {
        let caller_balance = world.balance_of(params.caller);
        if caller_balance < params.value {
            return Err(Abort::here(RevertReason::InsufficientBalance));
        }
        let caller = world.ensure_account(params.caller);
        caller.balance = caller.balance.checked_sub(&params.value)?;
        let callee = world.ensure_account(params.callee);
        callee.balance = callee.balance.checked_add(&params.value)?;
        trace.push(TraceEvent::Transfer {
            from: params.caller,
            to: params.callee,
            amount: params.value.clone(),
        });
    }

    let def = match &world.ensure_account(params.callee).kind {
        AccountKind::Wallet => {
            return match params.selector {
                // A wallet accepts plain value with no code to run.
                FunctionSel::Fallback => Ok(None),
                _ => Err(Abort::here(RevertReason::NotAContract)),
            };
        }
        AccountKind::Contract { def, .. } => def.clone(),
    };

    let function: &CFunction = match params.selector {
        FunctionSel::Named => {
            def.function(&params.function).ok_or(Abort::here(RevertReason::NoSuchFunction))?
        }
        FunctionSel::Fallback => {
            def.fallback.as_ref().ok_or(Abort::here(RevertReason::NoFallback))?
        }
        FunctionSel::Constructor => match def.constructor.as_ref() {
            Some(ctor) => ctor,
            None => {
                return if params.args.is_empty() {
                    Ok(None)
                } else {
                    Err(Abort::here(RevertReason::ArgumentMismatch))
                };
            }
        },
    };
    if !params.value.is_zero() && !function.payable {
        return Err(Abort::here(RevertReason::NotPayable));
    }
    if function.params.len() != params.args.len() {
        return Err(Abort::here(RevertReason::ArgumentMismatch));
    }

    let mut frame = Frame {
        world,
        trace,
        self_addr: params.callee,
        caller: params.caller,
        msg_value: params.value.clone(),
        depth,
        locals: BTreeMap::new(),
    };
    for ((name, ty), value) in function.params.iter().zip(params.args.iter()) {
        frame.check_type(*ty, value)?;
        frame.locals.insert(name.clone(), value.clone());
    }
    match frame.exec_body(&function.body)? {
        Flow::Return(value) => Ok(value),
        Flow::Next => Ok(None),
    }
}

impl Frame<'_> {
    fn check_type(&self, ty: CVarType, value: &Value) -> Result<(), Abort> {
        let ok = matches!(
            (ty, value),
            (CVarType::Uint, Value::Uint(_))
                | (CVarType::Address, Value::Address(_))
                | (CVarType::Bool, Value::Bool(_))
        );
        if ok {
            Ok(())
        } else {
            Err(Abort::here(RevertReason::TypeError))
        }
    }

    fn tick(&mut self) -> Result<(), Abort> {
        self.world.statements_executed += 1;
        if self.world.statements_executed > self.world.config.statement_budget {
            return Err(Abort::here(RevertReason::StatementBudget));
        }
        Ok(())
    }

    fn storage(&mut self) -> &mut BTreeMap<String, StorageValue> {
        match &mut self.world.accounts.get_mut(&self.self_addr).expect("frame account").kind {
            AccountKind::Contract { storage, .. } => storage,
            AccountKind::Wallet => unreachable!("executing code on a wallet"),
        }
    }

    fn exec_body(&mut self, body: &[CStmt]) -> Result<Flow, Abort> {
        for stmt in body {
            match self.exec_stmt(stmt)? {
                Flow::Next => {}
                ret => return Ok(ret),
            }
        }
        Ok(Flow::Next)
    }

    fn exec_stmt(&mut self, stmt: &CStmt) -> Result<Flow, Abort> {
        self.tick()?;
        match stmt {
            CStmt::Local { ty, name, init, .. } => {
                let value = self.eval(init)?;
                self.check_type(*ty, &value)?;
                self.locals.insert(name.clone(), value);
                Ok(Flow::Next)
            }
            CStmt::Assign { name, value, .. } => {
                let value = self.eval(value)?;
                let new_render = value.render();
                let slot = match value {
                    Value::Uint(v) => StorageValue::Uint(v),
                    Value::Address(a) => StorageValue::Address(a),
                    Value::Bool(b) => StorageValue::Bool(b),
                };
                let self_addr = self.self_addr;
                let storage = self.storage();
                let old = match storage.get(name) {
                    Some(previous) => {
                        if core::mem::discriminant(previous) != core::mem::discriminant(&slot) {
                            return Err(Abort::here(RevertReason::TypeError));
                        }
                        previous.render()
                    }
                    None => return Err(Abort::here(RevertReason::TypeError)),
                };
                storage.insert(name.clone(), slot);
                self.trace.push(TraceEvent::StorageWrite {
                    address: self_addr,
                    var: name.clone(),
                    key: None,
                    old,
                    new: new_render,
                });
                Ok(Flow::Next)
            }
            CStmt::MapAssign { map, key, value, .. } => {
                let key = match self.eval(key)? {
                    Value::Address(a) => a,
                    _ => return Err(Abort::here(RevertReason::TypeError)),
                };
                let value = match self.eval(value)? {
                    Value::Uint(v) => v,
                    _ => return Err(Abort::here(RevertReason::TypeError)),
                };
                let self_addr = self.self_addr;
                let storage = self.storage();
                let old = match storage.get_mut(map) {
                    Some(StorageValue::Map(m)) => {
                        let old = m.get(&key).cloned().unwrap_or_else(Uint::zero);
                        m.insert(key, value.clone());
                        old
                    }
                    _ => return Err(Abort::here(RevertReason::TypeError)),
                };
                self.trace.push(TraceEvent::StorageWrite {
                    address: self_addr,
                    var: map.clone(),
                    key: Some(key),
                    old: old.to_decimal(),
                    new: value.to_decimal(),
                });
                Ok(Flow::Next)
            }
            CStmt::Require { cond, .. } => match self.eval(cond)? {
                Value::Bool(true) => Ok(Flow::Next),
                Value::Bool(false) => Err(Abort::here(RevertReason::Require)),
                _ => Err(Abort::here(RevertReason::TypeError)),
            },
            CStmt::If { cond, then_branch, else_branch, .. } => {
                let branch = match self.eval(cond)? {
                    Value::Bool(true) => then_branch,
                    Value::Bool(false) => else_branch,
                    _ => return Err(Abort::here(RevertReason::TypeError)),
                };
                // Branch locals are scoped to the branch.
                let saved = self.locals.clone();
                let flow = self.exec_body(branch)?;
                self.locals = saved;
                Ok(flow)
            }
            CStmt::Return { value, .. } => {
                let value = value.as_ref().map(|v| self.eval(v)).transpose()?;
                Ok(Flow::Return(value))
            }
            CStmt::Send { to, amount, .. } => {
                let to = match self.eval(to)? {
                    Value::Address(a) => a,
                    _ => return Err(Abort::here(RevertReason::TypeError)),
                };
                let amount = match self.eval(amount)? {
                    Value::Uint(v) => v,
                    _ => return Err(Abort::here(RevertReason::TypeError)),
                };
                if self.world.balance_of(self.self_addr) < amount {
                    return Err(Abort::here(RevertReason::InsufficientBalance));
                }
                // Unchecked transfer: the recipient's fallback runs now, at
                // depth+1, and its failure rolls back only the transfer.
                let params = CallParams {
                    caller: self.self_addr,
                    callee: to,
                    selector: FunctionSel::Fallback,
                    function: String::new(),
                    value: amount,
                    args: Vec::new(),
                };
                let _ = call(self.world, self.trace, params, self.depth + 1);
                Ok(Flow::Next)
            }
            CStmt::CallStmt { call: expr, .. } => {
                // Fire-and-forget: the sub-call's revert is traced and
                // rolled back inside; this frame continues.
                let _ = self.eval_call(expr, true)?;
                Ok(Flow::Next)
            }
        }
    }

    fn eval(&mut self, expr: &CExpr) -> Result<Value, Abort> {
        match expr {
            CExpr::Uint(v, _) => Ok(Value::Uint(v.clone())),
            CExpr::Addr(a, _) => Ok(Value::Address(*a)),
            CExpr::Bool(b, _) => Ok(Value::Bool(*b)),
            CExpr::MsgSender(_) => Ok(Value::Address(self.caller)),
            CExpr::MsgValue(_) => Ok(Value::Uint(self.msg_value.clone())),
            CExpr::SelfAddr(_) => Ok(Value::Address(self.self_addr)),
            CExpr::Ident(name, _) => {
                if let Some(v) = self.locals.get(name) {
                    return Ok(v.clone());
                }
                let account = self.world.accounts.get(&self.self_addr).expect("frame account");
                match &account.kind {
                    AccountKind::Contract { storage, .. } => match storage.get(name) {
                        Some(StorageValue::Uint(v)) => Ok(Value::Uint(v.clone())),
                        Some(StorageValue::Address(a)) => Ok(Value::Address(*a)),
                        Some(StorageValue::Bool(b)) => Ok(Value::Bool(*b)),
                        Some(StorageValue::Map(_)) | None => {
                            Err(Abort::here(RevertReason::TypeError))
                        }
                    },
                    AccountKind::Wallet => Err(Abort::here(RevertReason::TypeError)),
                }
            }
            CExpr::Index { map, key, .. } => {
                let key = match self.eval(key)? {
                    Value::Address(a) => a,
                    _ => return Err(Abort::here(RevertReason::TypeError)),
                };
                // Missing keys read as zero, matching mapping semantics.
                Ok(Value::Uint(self.world.storage_map_get(self.self_addr, map, key)))
            }
            CExpr::Binary { op, lhs, rhs, .. } => {
                let l = self.eval(lhs)?;
                let r = self.eval(rhs)?;
                eval_binary(*op, l, r)
            }
            CExpr::Not { expr, .. } => match self.eval(expr)? {
                Value::Bool(b) => Ok(Value::Bool(!b)),
                _ => Err(Abort::here(RevertReason::TypeError)),
            },
            CExpr::BalanceOf { target, .. } => {
                let addr = match self.eval(target)? {
                    Value::Address(a) => a,
                    _ => return Err(Abort::here(RevertReason::TypeError)),
                };
                Ok(Value::Uint(self.world.balance_of(addr)))
            }
            CExpr::ExtCall { .. } => {
                // Expression position: a value is required, so a reverted
                // sub-call propagates.
                match self.eval_call(expr, false)? {
                    Some(v) => Ok(v),
                    None => Err(Abort::here(RevertReason::NoReturnValue)),
                }
            }
        }
    }

    /// Perform an external call. In statement position (`discard_result`)
    /// a reverted sub-call is swallowed; in expression position it
    /// propagates as SubcallReverted, already reported at its origin.
    fn eval_call(&mut self, expr: &CExpr, discard_result: bool) -> Result<Option<Value>, Abort> {
        let CExpr::ExtCall { target, function, value, args, .. } = expr else {
            unreachable!("eval_call on a non-call expression");
        };
        let target = match self.eval(target)? {
            Value::Address(a) => a,
            _ => return Err(Abort::here(RevertReason::TypeError)),
        };
        let value = match value {
            Some(v) => match self.eval(v)? {
                Value::Uint(u) => u,
                _ => return Err(Abort::here(RevertReason::TypeError)),
            },
            None => Uint::zero(),
        };
        let mut arg_values = Vec::new();
        for arg in args {
            arg_values.push(self.eval(arg)?);
        }
        let params = CallParams {
            caller: self.self_addr,
            callee: target,
            selector: FunctionSel::Named,
            function: function.clone(),
            value,
            args: arg_values,
        };
        match call(self.world, self.trace, params, self.depth + 1) {
            CallResult::Success(ret) => Ok(ret),
            CallResult::Reverted(_) if discard_result => Ok(None),
            CallResult::Reverted(_) => {
                Err(Abort { reason: RevertReason::SubcallReverted, reported: true })
            }
        }
    }
}

fn eval_binary(op: BinOp, l: Value, r: Value) -> Result<Value, Abort> {
    use BinOp::*;
    match (op, l, r) {
        (Add, Value::Uint(a), Value::Uint(b)) => Ok(Value::Uint(a.checked_add(&b)?)),
        (Sub, Value::Uint(a), Value::Uint(b)) => Ok(Value::Uint(a.checked_sub(&b)?)),
        (Mul, Value::Uint(a), Value::Uint(b)) => Ok(Value::Uint(a.checked_mul(&b)?)),
        (Div, Value::Uint(a), Value::Uint(b)) => Ok(Value::Uint(a.checked_div(&b)?)),
        (Lt, Value::Uint(a), Value::Uint(b)) => Ok(Value::Bool(a < b)),
        (Le, Value::Uint(a), Value::Uint(b)) => Ok(Value::Bool(a <= b)),
        (Gt, Value::Uint(a), Value::Uint(b)) => Ok(Value::Bool(a > b)),
        (Ge, Value::Uint(a), Value::Uint(b)) => Ok(Value::Bool(a >= b)),
        (Eq, a, b) if a.type_name() == b.type_name() => Ok(Value::Bool(a == b)),
        (Ne, a, b) if a.type_name() == b.type_name() => Ok(Value::Bool(a != b)),
        (And, Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(a && b)),
        (Or, Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(a || b)),
        _ => Err(Abort::here(RevertReason::TypeError)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeployError {
    InsufficientEndowment,
    ConstructorReverted(RevertReason),
}

impl core::fmt::Display for DeployError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DeployError::InsufficientEndowment => write!(f, "endowment exceeds deployer balance"),
            DeployError::ConstructorReverted(r) => write!(f, "constructor reverted: {r}"),
        }
    }
}

/// Deploy a contract at the next counter address. Storage starts at type
/// defaults, the endowment moves without touching any fallback, and the
/// constructor (when present) runs with the deployer as msg.sender.
pub fn deploy(
    world: &mut World,
    trace: &mut Vec<TraceEvent>,
    def: Arc<ContractDef>,
    deployer: Address,
    args: Vec<Value>,
    endowment: Uint,
) -> Result<Address, DeployError> {
    let snapshot = world.snapshot();
    if world.balance_of(deployer) < endowment {
        return Err(DeployError::InsufficientEndowment);
    }
    let addr = Address::contract(world.next_contract);
    world.next_contract += 1;
    let storage = def
        .state_vars
        .iter()
        .map(|v| (v.name.clone(), StorageValue::default_for(v.ty)))
        .collect();
    world
        .accounts
        .insert(addr, Account { balance: Uint::zero(), kind: AccountKind::Contract { def: def.clone(), storage } });
    if !endowment.is_zero() {
        let payer = world.ensure_account(deployer);
        payer.balance = payer.balance.checked_sub(&endowment).expect("balance checked above");
        let target = world.ensure_account(addr);
        target.balance = target.balance.checked_add(&endowment).expect("fits 256 bits");
        trace.push(TraceEvent::Transfer { from: deployer, to: addr, amount: endowment });
    }
    if def.constructor.is_some() || !args.is_empty() {
        let params = CallParams {
            caller: deployer,
            callee: addr,
            selector: FunctionSel::Constructor,
            function: String::new(),
            value: Uint::zero(),
            args,
        };
        if let CallResult::Reverted(reason) = call(world, trace, params, 0) {
            world.restore(snapshot);
            return Err(DeployError::ConstructorReverted(reason));
        }
    }
    Ok(addr)
}

/// A scenario argument: a literal or a reference to a declared alias.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioValue {
    Uint(Uint),
    Bool(bool),
    Addr(Address),
    Ref(String),
}

#[derive(Debug, Clone)]
pub struct AccountInit {
    pub name: String,
    pub balance: Uint,
}

#[derive(Debug, Clone)]
pub struct Deployment {
    pub name: String,
    pub def: Arc<ContractDef>,
    pub deployer: String,
    pub args: Vec<ScenarioValue>,
    pub endowment: Uint,
}

#[derive(Debug, Clone)]
pub struct StepCall {
    pub caller: String,
    pub callee: String,
    pub function: String,
    pub args: Vec<ScenarioValue>,
    pub value: Uint,
}

#[derive(Debug, Clone, Default)]
pub struct Scenario {
    pub accounts: Vec<AccountInit>,
    pub deployments: Vec<Deployment>,
    pub steps: Vec<StepCall>,
    pub victims: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    DuplicateAlias(String),
    UnknownAlias(String),
    Deploy { name: String, error: String },
}

impl core::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ScenarioError::DuplicateAlias(a) => write!(f, "duplicate alias `{a}`"),
            ScenarioError::UnknownAlias(a) => write!(f, "unknown alias `{a}`"),
            ScenarioError::Deploy { name, error } => {
                write!(f, "deploying `{name}` failed: {error}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub world: World,
    pub trace: Vec<TraceEvent>,
    pub aliases: BTreeMap<String, Address>,
}

impl ScenarioOutcome {
    pub fn address_of(&self, alias: &str) -> Option<Address> {
        self.aliases.get(alias).copied()
    }
}

/// Execute a scenario: declare wallets, deploy contracts, then run the
/// steps in order. Individual step reverts are recorded in the trace and do
/// not abort the scenario; deployment failures do.
pub fn run_scenario(scenario: &Scenario, config: VmConfig) -> Result<ScenarioOutcome, ScenarioError> {
    let mut world = World::new(config);
    let mut trace = Vec::new();
    let mut aliases: BTreeMap<String, Address> = BTreeMap::new();

    for account in &scenario.accounts {
        if aliases.contains_key(&account.name) {
            return Err(ScenarioError::DuplicateAlias(account.name.clone()));
        }
        let addr = world.new_wallet(account.balance.clone());
        aliases.insert(account.name.clone(), addr);
    }

    for deployment in &scenario.deployments {
        if aliases.contains_key(&deployment.name) {
            return Err(ScenarioError::DuplicateAlias(deployment.name.clone()));
        }
        let deployer = *aliases
            .get(&deployment.deployer)
            .ok_or_else(|| ScenarioError::UnknownAlias(deployment.deployer.clone()))?;
        let args = resolve_args(&deployment.args, &aliases)?;
        let addr =
            deploy(&mut world, &mut trace, deployment.def.clone(), deployer, args, deployment.endowment.clone())
                .map_err(|e| ScenarioError::Deploy {
                    name: deployment.name.clone(),
                    error: alloc::format!("{e}"),
                })?;
        aliases.insert(deployment.name.clone(), addr);
    }

    for step in &scenario.steps {
        let caller = *aliases
            .get(&step.caller)
            .ok_or_else(|| ScenarioError::UnknownAlias(step.caller.clone()))?;
        let callee = *aliases
            .get(&step.callee)
            .ok_or_else(|| ScenarioError::UnknownAlias(step.callee.clone()))?;
        let args = resolve_args(&step.args, &aliases)?;
        let params = CallParams {
            caller,
            callee,
            selector: FunctionSel::Named,
            function: step.function.clone(),
            value: step.value.clone(),
            args,
        };
        let _ = call(&mut world, &mut trace, params, 0);
    }

    Ok(ScenarioOutcome { world, trace, aliases })
}

fn resolve_args(
    args: &[ScenarioValue],
    aliases: &BTreeMap<String, Address>,
) -> Result<Vec<Value>, ScenarioError> {
    args.iter()
        .map(|a| match a {
            ScenarioValue::Uint(v) => Ok(Value::Uint(v.clone())),
            ScenarioValue::Bool(b) => Ok(Value::Bool(*b)),
            ScenarioValue::Addr(a) => Ok(Value::Address(*a)),
            ScenarioValue::Ref(name) => aliases
                .get(name)
                .map(|a| Value::Address(*a))
                .ok_or_else(|| ScenarioError::UnknownAlias(name.clone())),
        })
        .collect()
}
