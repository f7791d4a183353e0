//! AST of the actor DSL and of network files. Every node carries exactly one
//! span; structural equality for round-trip tests goes through
//! [`ActorDecl::normalized`], which blanks the spans out.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::span::SourceSpan;
use crate::value::{Address, Uint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Input,
    Output,
}

/// Token types a port can carry. `Request` tokens model incoming calls and
/// bind the implicit `sender`/`value` pattern variables; `Transfer` tokens
/// move native value between instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenType {
    Uint,
    Address,
    Bool,
    Request,
    Transfer,
}

impl TokenType {
    pub fn as_str(&self) -> &'static str {
        match self {
            TokenType::Uint => "uint",
            TokenType::Address => "address",
            TokenType::Bool => "bool",
            TokenType::Request => "request",
            TokenType::Transfer => "transfer",
        }
    }
}

/// State variable types: the closed set used by the bundled contracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarType {
    Uint,
    Address,
    Bool,
    /// `map(address -> uint)`
    Map,
}

impl VarType {
    pub fn as_str(&self) -> &'static str {
        match self {
            VarType::Uint => "uint",
            VarType::Address => "address",
            VarType::Bool => "bool",
            VarType::Map => "map(address -> uint)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn as_str(&self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

/// Side-effect-free expressions; only statements mutate state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Uint(Uint, SourceSpan),
    Addr(Address, SourceSpan),
    Bool(bool, SourceSpan),
    Ident(String, SourceSpan),
    /// `map[key]`; maps are named state variables, not first-class values.
    Index { map: String, key: Box<Expr>, span: SourceSpan },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr>, span: SourceSpan },
    Not { expr: Box<Expr>, span: SourceSpan },
}

impl Expr {
    pub fn span(&self) -> &SourceSpan {
        match self {
            Expr::Uint(_, s) | Expr::Addr(_, s) | Expr::Bool(_, s) | Expr::Ident(_, s) => s,
            Expr::Index { span, .. } | Expr::Binary { span, .. } | Expr::Not { span, .. } => span,
        }
    }

    fn blank_spans(&mut self) {
        let blank = SourceSpan::synthetic();
        match self {
            Expr::Uint(_, s) | Expr::Addr(_, s) | Expr::Bool(_, s) | Expr::Ident(_, s) => {
                *s = blank;
            }
            Expr::Index { key, span, .. } => {
                *span = blank;
                key.blank_spans();
            }
            Expr::Binary { lhs, rhs, span, .. } => {
                *span = blank;
                lhs.blank_spans();
                rhs.blank_spans();
            }
            Expr::Not { expr, span } => {
                *span = blank;
                expr.blank_spans();
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortDecl {
    pub name: String,
    pub direction: Direction,
    pub token_type: TokenType,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVarDecl {
    pub name: String,
    pub var_type: VarType,
    pub initializer: Option<Expr>,
    pub span: SourceSpan,
}

/// One `on <port>(patterns)` clause of an action header. Request ports bind
/// the implicit `sender` and `value` variables and take no explicit
/// patterns; the consumed token count is the number of patterns (one for
/// request and transfer ports).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsumeClause {
    pub port: String,
    pub patterns: Vec<String>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmitPayload {
    /// `emit port.method(value?)` — a request token on a request-typed port.
    Request { method: String, value: Option<Expr> },
    /// `emit port(e, ...)` — a `(to, amount)` pair on a transfer port, or
    /// one token per expression on a plain-typed port.
    Values(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Let { name: String, value: Expr, span: SourceSpan },
    Assign { name: String, value: Expr, span: SourceSpan },
    MapAssign { map: String, key: Expr, value: Expr, span: SourceSpan },
    Emit { port: String, payload: EmitPayload, span: SourceSpan },
}

impl Stmt {
    pub fn span(&self) -> &SourceSpan {
        match self {
            Stmt::Let { span, .. }
            | Stmt::Assign { span, .. }
            | Stmt::MapAssign { span, .. }
            | Stmt::Emit { span, .. } => span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: String,
    pub consumes: Vec<ConsumeClause>,
    pub guards: Vec<Expr>,
    pub body: Vec<Stmt>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsmTransition {
    pub from: String,
    pub action: String,
    pub to: String,
    pub span: SourceSpan,
}

/// Labeled-transition action schedule. The initial state is the `from` label
/// of the first transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsmDecl {
    pub transitions: Vec<FsmTransition>,
    pub span: SourceSpan,
}

impl FsmDecl {
    pub fn initial_state(&self) -> &str {
        &self.transitions[0].from
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActorDecl {
    pub name: String,
    pub inputs: Vec<PortDecl>,
    pub outputs: Vec<PortDecl>,
    pub state_vars: Vec<StateVarDecl>,
    pub actions: Vec<ActionDecl>,
    pub schedule: Option<FsmDecl>,
    pub span: SourceSpan,
}

impl ActorDecl {
    pub fn port(&self, name: &str) -> Option<&PortDecl> {
        self.inputs.iter().chain(self.outputs.iter()).find(|p| p.name == name)
    }

    pub fn state_var(&self, name: &str) -> Option<&StateVarDecl> {
        self.state_vars.iter().find(|v| v.name == name)
    }

    /// Copy with all spans blanked, for structural (span-insensitive)
    /// equality in round-trip tests.
    pub fn normalized(&self) -> ActorDecl {
        let mut copy = self.clone();
        let blank = SourceSpan::synthetic();
        copy.span = blank.clone();
        for p in copy.inputs.iter_mut().chain(copy.outputs.iter_mut()) {
            p.span = blank.clone();
        }
        for v in copy.state_vars.iter_mut() {
            v.span = blank.clone();
            if let Some(init) = v.initializer.as_mut() {
                init.blank_spans();
            }
        }
        for a in copy.actions.iter_mut() {
            a.span = blank.clone();
            for c in a.consumes.iter_mut() {
                c.span = blank.clone();
            }
            for g in a.guards.iter_mut() {
                g.blank_spans();
            }
            for s in a.body.iter_mut() {
                blank_stmt(s);
            }
        }
        if let Some(fsm) = copy.schedule.as_mut() {
            fsm.span = blank.clone();
            for t in fsm.transitions.iter_mut() {
                t.span = blank.clone();
            }
        }
        copy
    }
}

fn blank_stmt(stmt: &mut Stmt) {
    let blank = SourceSpan::synthetic();
    match stmt {
        Stmt::Let { value, span, .. } | Stmt::Assign { value, span, .. } => {
            *span = blank;
            value.blank_spans();
        }
        Stmt::MapAssign { key, value, span, .. } => {
            *span = blank;
            key.blank_spans();
            value.blank_spans();
        }
        Stmt::Emit { payload, span, .. } => {
            *span = blank;
            match payload {
                EmitPayload::Request { value, .. } => {
                    if let Some(v) = value {
                        v.blank_spans();
                    }
                }
                EmitPayload::Values(exprs) => {
                    for e in exprs {
                        e.blank_spans();
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDecl {
    pub name: String,
    pub actor: String,
    /// Initial native balance in wei; defaults to zero.
    pub balance: Option<Expr>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectDecl {
    pub from_instance: String,
    pub from_port: String,
    pub to_instance: String,
    pub to_port: String,
    pub span: SourceSpan,
}

/// A parsed network file: imports are resolved by the caller (this crate
/// does no IO), then linked against actor declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkDecl {
    pub name: String,
    pub imports: Vec<(String, SourceSpan)>,
    pub instances: Vec<InstanceDecl>,
    pub connections: Vec<ConnectDecl>,
    pub victims: Vec<(String, SourceSpan)>,
    pub span: SourceSpan,
}
