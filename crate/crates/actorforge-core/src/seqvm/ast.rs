//! AST of the contract dialect executed by the sequential VM. This is also
//! the target language of the code generator and the input of the analyzer.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::frontend::ast::BinOp;
use crate::span::SourceSpan;
use crate::value::{Address, Uint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CVarType {
    Uint,
    Address,
    Bool,
    /// `mapping(address => uint)`
    Map,
}

impl CVarType {
    pub fn as_str(&self) -> &'static str {
        match self {
            CVarType::Uint => "uint",
            CVarType::Address => "address",
            CVarType::Bool => "bool",
            CVarType::Map => "mapping(address => uint)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CExpr {
    Uint(Uint, SourceSpan),
    Addr(Address, SourceSpan),
    Bool(bool, SourceSpan),
    Ident(String, SourceSpan),
    Index { map: String, key: Box<CExpr>, span: SourceSpan },
    Binary { op: BinOp, lhs: Box<CExpr>, rhs: Box<CExpr>, span: SourceSpan },
    Not { expr: Box<CExpr>, span: SourceSpan },
    MsgSender(SourceSpan),
    MsgValue(SourceSpan),
    /// `address(this)`
    SelfAddr(SourceSpan),
    /// `<address expr>.balance` — a VM primitive, not a contract call.
    BalanceOf { target: Box<CExpr>, span: SourceSpan },
    /// `<address expr>.name{value: e}(args)` — synchronous external call.
    ExtCall {
        target: Box<CExpr>,
        function: String,
        value: Option<Box<CExpr>>,
        args: Vec<CExpr>,
        span: SourceSpan,
    },
}

impl CExpr {
    pub fn span(&self) -> &SourceSpan {
        match self {
            CExpr::Uint(_, s)
            | CExpr::Addr(_, s)
            | CExpr::Bool(_, s)
            | CExpr::Ident(_, s)
            | CExpr::MsgSender(s)
            | CExpr::MsgValue(s)
            | CExpr::SelfAddr(s) => s,
            CExpr::Index { span, .. }
            | CExpr::Binary { span, .. }
            | CExpr::Not { span, .. }
            | CExpr::BalanceOf { span, .. }
            | CExpr::ExtCall { span, .. } => span,
        }
    }

    /// True when evaluating this expression can hand control to another
    /// contract.
    pub fn contains_call(&self) -> bool {
        match self {
            CExpr::ExtCall { .. } => true,
            CExpr::Index { key, .. } => key.contains_call(),
            CExpr::Binary { lhs, rhs, .. } => lhs.contains_call() || rhs.contains_call(),
            CExpr::Not { expr, .. } => expr.contains_call(),
            CExpr::BalanceOf { target, .. } => target.contains_call(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CStmt {
    Local { ty: CVarType, name: String, init: CExpr, span: SourceSpan },
    Assign { name: String, value: CExpr, span: SourceSpan },
    MapAssign { map: String, key: CExpr, value: CExpr, span: SourceSpan },
    Require { cond: CExpr, span: SourceSpan },
    If { cond: CExpr, then_branch: Vec<CStmt>, else_branch: Vec<CStmt>, span: SourceSpan },
    Return { value: Option<CExpr>, span: SourceSpan },
    /// `send(to, amount);` — move value and trigger the recipient fallback.
    Send { to: CExpr, amount: CExpr, span: SourceSpan },
    /// A bare external call used as a statement.
    CallStmt { call: CExpr, span: SourceSpan },
}

impl CStmt {
    pub fn span(&self) -> &SourceSpan {
        match self {
            CStmt::Local { span, .. }
            | CStmt::Assign { span, .. }
            | CStmt::MapAssign { span, .. }
            | CStmt::Require { span, .. }
            | CStmt::If { span, .. }
            | CStmt::Return { span, .. }
            | CStmt::Send { span, .. }
            | CStmt::CallStmt { span, .. } => span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CStateVar {
    pub name: String,
    pub ty: CVarType,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFunction {
    pub name: String,
    pub params: Vec<(String, CVarType)>,
    pub payable: bool,
    pub returns: Option<CVarType>,
    pub body: Vec<CStmt>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractDef {
    pub name: String,
    pub state_vars: Vec<CStateVar>,
    pub constructor: Option<CFunction>,
    pub fallback: Option<CFunction>,
    pub functions: Vec<CFunction>,
    pub span: SourceSpan,
}

impl ContractDef {
    pub fn function(&self, name: &str) -> Option<&CFunction> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn state_var(&self, name: &str) -> Option<&CStateVar> {
        self.state_vars.iter().find(|v| v.name == name)
    }
}
