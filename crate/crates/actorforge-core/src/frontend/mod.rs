//! Frontend for the actor DSL and network files: tokenize, parse,
//! name-resolve and unparse.

pub mod ast;
pub mod parser;
pub mod resolver;
pub mod unparse;

pub use ast::{
    ActionDecl, ActorDecl, ConnectDecl, ConsumeClause, Direction, EmitPayload, Expr, FsmDecl,
    FsmTransition, InstanceDecl, NetworkDecl, PortDecl, StateVarDecl, Stmt, TokenType, VarType,
};
pub use parser::{parse_actor, parse_actor_source, parse_network, parse_network_source};
pub use resolver::{resolve, ActionInfo, ConsumeKind, ResolvedActor};
pub use unparse::{unparse_actor, unparse_network};
