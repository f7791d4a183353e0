//! Name resolution and type checking for parsed actors.
//!
//! After `resolve` succeeds every identifier is bound to a declaration, every
//! expression has a type from the closed set, and the per-action consumption
//! and production rates are known (they are syntactic: bodies have no
//! control flow, so the emit count per port is fixed).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::diag::{DiagCode, Diagnostic, DiagResult};
use crate::span::SourceSpan;
use crate::value::Uint;

use super::ast::*;

/// Scalar expression types. Maps are not first-class; they appear only as
/// the base of an index or map-assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Type {
    Uint,
    Address,
    Bool,
}

impl Type {
    fn name(&self) -> &'static str {
        match self {
            Type::Uint => "uint",
            Type::Address => "address",
            Type::Bool => "bool",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsumeKind {
    /// Explicit patterns on a scalar-typed port; one token per pattern.
    Plain { patterns: Vec<String>, ty: Type },
    /// Request port: one token, implicit `sender`/`value` bindings, and the
    /// token's method tag must equal the action name to fire.
    Request,
    /// Transfer port: one token destructured as `(to, amount)`.
    Transfer { to: String, amount: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedConsume {
    pub port_index: usize,
    pub kind: ConsumeKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionInfo {
    pub consumes: Vec<ResolvedConsume>,
    /// Tokens consumed per input port, indexed like `decl.inputs`.
    pub consumption: Vec<u32>,
    /// Tokens produced per output port, indexed like `decl.outputs`.
    pub production: Vec<u32>,
    /// True when some guard reads a pattern variable or a state variable,
    /// i.e. eligibility depends on data rather than structure.
    pub data_dependent_guards: bool,
}

/// A validated actor: the declaration plus the binding tables the runtime
/// and the classifier need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedActor {
    pub decl: ActorDecl,
    pub actions: Vec<ActionInfo>,
}

struct Resolver<'a> {
    decl: &'a ActorDecl,
    diags: Vec<Diagnostic>,
}

impl<'a> Resolver<'a> {
    fn err(&mut self, code: DiagCode, span: &SourceSpan, message: String) {
        self.diags.push(Diagnostic::error(code, span.clone(), message));
    }

    fn check_unique_names(&mut self) {
        let mut seen: BTreeMap<&str, &'static str> = BTreeMap::new();
        let mut claim = |this: &mut Self, name: &'a str, what: &'static str, span: &SourceSpan| {
            if let Some(prev) = seen.insert(name, what) {
                this.err(
                    DiagCode::Name,
                    span,
                    alloc::format!("`{name}` is already declared as a {prev}"),
                );
            }
        };
        for p in self.decl.inputs.iter().chain(self.decl.outputs.iter()) {
            claim(self, &p.name, "port", &p.span);
        }
        for v in &self.decl.state_vars {
            claim(self, &v.name, "state variable", &v.span);
        }
        let mut actions: BTreeMap<&str, ()> = BTreeMap::new();
        for a in &self.decl.actions {
            if actions.insert(&a.name, ()).is_some() {
                self.err(
                    DiagCode::Name,
                    &a.span,
                    alloc::format!("duplicate action name `{}`", a.name),
                );
            }
        }
    }

    fn check_initializers(&mut self) {
        for v in &self.decl.state_vars {
            let Some(init) = &v.initializer else { continue };
            if v.var_type == VarType::Map {
                self.err(
                    DiagCode::Type,
                    init.span(),
                    "map state variables start empty and cannot take an initializer".to_string(),
                );
                continue;
            }
            match const_type(init) {
                None => self.err(
                    DiagCode::Type,
                    init.span(),
                    "initializer must be a compile-time constant expression".to_string(),
                ),
                Some(ty) => {
                    let want = scalar_of(v.var_type);
                    if Some(ty) != want {
                        self.err(
                            DiagCode::Type,
                            init.span(),
                            alloc::format!(
                                "initializer of `{}` has type {} but the variable is {}",
                                v.name,
                                ty.name(),
                                v.var_type.as_str()
                            ),
                        );
                    }
                }
            }
        }
    }

    fn lookup_port(&self, name: &str) -> Option<(&PortDecl, Direction, usize)> {
        if let Some(i) = self.decl.inputs.iter().position(|p| p.name == name) {
            return Some((&self.decl.inputs[i], Direction::Input, i));
        }
        if let Some(i) = self.decl.outputs.iter().position(|p| p.name == name) {
            return Some((&self.decl.outputs[i], Direction::Output, i));
        }
        None
    }

    fn resolve_consumes(
        &mut self,
        action: &ActionDecl,
        bindings: &mut BTreeMap<String, Type>,
    ) -> Vec<ResolvedConsume> {
        let mut resolved = Vec::new();
        let mut used_ports: BTreeMap<String, ()> = BTreeMap::new();
        for clause in &action.consumes {
            let Some((port, direction, index)) = self.lookup_port(&clause.port) else {
                self.err(
                    DiagCode::Name,
                    &clause.span,
                    alloc::format!("unknown port `{}`", clause.port),
                );
                continue;
            };
            if direction == Direction::Output {
                self.err(
                    DiagCode::Direction,
                    &clause.span,
                    alloc::format!("cannot consume from output port `{}`", clause.port),
                );
                continue;
            }
            if used_ports.insert(clause.port.clone(), ()).is_some() {
                self.err(
                    DiagCode::Name,
                    &clause.span,
                    alloc::format!("port `{}` consumed twice by one action", clause.port),
                );
                continue;
            }
            let mut bind = |this: &mut Self, name: &str, ty: Type| {
                if this.decl.state_var(name).is_some() || this.lookup_port(name).is_some() {
                    this.err(
                        DiagCode::Name,
                        &clause.span,
                        alloc::format!("pattern variable `{name}` shadows a declaration"),
                    );
                }
                if bindings.insert(name.to_string(), ty).is_some() {
                    this.err(
                        DiagCode::Name,
                        &clause.span,
                        alloc::format!("duplicate pattern variable `{name}`"),
                    );
                }
            };
            let kind = match port.token_type {
                TokenType::Request => {
                    if !clause.patterns.is_empty() {
                        self.err(
                            DiagCode::Type,
                            &clause.span,
                            alloc::format!(
                                "request port `{}` binds the implicit variables `sender` and `value`; explicit patterns are not allowed",
                                clause.port
                            ),
                        );
                        continue;
                    }
                    bind(self, "sender", Type::Address);
                    bind(self, "value", Type::Uint);
                    ConsumeKind::Request
                }
                TokenType::Transfer => {
                    if clause.patterns.len() != 2 {
                        self.err(
                            DiagCode::Type,
                            &clause.span,
                            alloc::format!(
                                "transfer port `{}` destructures as (to, amount); expected exactly 2 pattern variables",
                                clause.port
                            ),
                        );
                        continue;
                    }
                    bind(self, &clause.patterns[0], Type::Address);
                    bind(self, &clause.patterns[1], Type::Uint);
                    ConsumeKind::Transfer {
                        to: clause.patterns[0].clone(),
                        amount: clause.patterns[1].clone(),
                    }
                }
                scalar => {
                    if clause.patterns.is_empty() {
                        self.err(
                            DiagCode::Type,
                            &clause.span,
                            alloc::format!(
                                "port `{}` needs at least one pattern variable",
                                clause.port
                            ),
                        );
                        continue;
                    }
                    let ty = match scalar {
                        TokenType::Uint => Type::Uint,
                        TokenType::Address => Type::Address,
                        TokenType::Bool => Type::Bool,
                        _ => unreachable!(),
                    };
                    for pattern in &clause.patterns {
                        bind(self, pattern, ty);
                    }
                    ConsumeKind::Plain { patterns: clause.patterns.clone(), ty }
                }
            };
            resolved.push(ResolvedConsume { port_index: index, kind });
        }
        resolved
    }

    fn type_expr(
        &mut self,
        expr: &Expr,
        patterns: &BTreeMap<String, Type>,
        locals: Option<&BTreeMap<String, Type>>,
    ) -> Option<Type> {
        match expr {
            Expr::Uint(..) => Some(Type::Uint),
            Expr::Addr(..) => Some(Type::Address),
            Expr::Bool(..) => Some(Type::Bool),
            Expr::Ident(name, span) => {
                if let Some(ty) = patterns.get(name) {
                    return Some(*ty);
                }
                if let Some(ty) = locals.and_then(|l| l.get(name)) {
                    return Some(*ty);
                }
                if let Some(v) = self.decl.state_var(name) {
                    return match scalar_of(v.var_type) {
                        Some(ty) => Some(ty),
                        None => {
                            self.err(
                                DiagCode::Type,
                                span,
                                alloc::format!(
                                    "map `{name}` is not a value; index it as `{name}[key]`"
                                ),
                            );
                            None
                        }
                    };
                }
                if let Some((_, direction, _)) = self.lookup_port(name) {
                    let what = match direction {
                        Direction::Input => "read input port",
                        Direction::Output => "read output port",
                    };
                    self.err(
                        DiagCode::Direction,
                        span,
                        alloc::format!(
                            "cannot {what} `{name}` in an expression; tokens are bound by the action's `on` clause"
                        ),
                    );
                    return None;
                }
                self.err(DiagCode::Name, span, alloc::format!("unbound identifier `{name}`"));
                None
            }
            Expr::Index { map, key, span } => {
                let key_ty = self.type_expr(key, patterns, locals);
                match self.decl.state_var(map) {
                    Some(v) if v.var_type == VarType::Map => {}
                    Some(_) => {
                        self.err(
                            DiagCode::Type,
                            span,
                            alloc::format!("`{map}` is not a map and cannot be indexed"),
                        );
                        return None;
                    }
                    None => {
                        self.err(DiagCode::Name, span, alloc::format!("unbound map `{map}`"));
                        return None;
                    }
                }
                if let Some(ty) = key_ty {
                    if ty != Type::Address {
                        self.err(
                            DiagCode::Type,
                            key.span(),
                            alloc::format!("map key must be an address, found {}", ty.name()),
                        );
                    }
                }
                Some(Type::Uint)
            }
            Expr::Binary { op, lhs, rhs, span } => {
                let lt = self.type_expr(lhs, patterns, locals)?;
                let rt = self.type_expr(rhs, patterns, locals)?;
                use BinOp::*;
                match op {
                    Add | Sub | Mul | Div => {
                        if lt == Type::Uint && rt == Type::Uint {
                            Some(Type::Uint)
                        } else {
                            self.err(
                                DiagCode::Type,
                                span,
                                alloc::format!(
                                    "operator `{}` needs uint operands, found {} and {}",
                                    op.as_str(),
                                    lt.name(),
                                    rt.name()
                                ),
                            );
                            None
                        }
                    }
                    Lt | Le | Gt | Ge => {
                        if lt == Type::Uint && rt == Type::Uint {
                            Some(Type::Bool)
                        } else {
                            self.err(
                                DiagCode::Type,
                                span,
                                alloc::format!(
                                    "operator `{}` needs uint operands, found {} and {}",
                                    op.as_str(),
                                    lt.name(),
                                    rt.name()
                                ),
                            );
                            None
                        }
                    }
                    Eq | Ne => {
                        if lt == rt {
                            Some(Type::Bool)
                        } else {
                            self.err(
                                DiagCode::Type,
                                span,
                                alloc::format!(
                                    "cannot compare {} with {}",
                                    lt.name(),
                                    rt.name()
                                ),
                            );
                            None
                        }
                    }
                    And | Or => {
                        if lt == Type::Bool && rt == Type::Bool {
                            Some(Type::Bool)
                        } else {
                            self.err(
                                DiagCode::Type,
                                span,
                                alloc::format!(
                                    "operator `{}` needs bool operands, found {} and {}",
                                    op.as_str(),
                                    lt.name(),
                                    rt.name()
                                ),
                            );
                            None
                        }
                    }
                }
            }
            Expr::Not { expr: inner, span } => {
                let ty = self.type_expr(inner, patterns, locals)?;
                if ty != Type::Bool {
                    self.err(
                        DiagCode::Type,
                        span,
                        alloc::format!("operator `!` needs a bool operand, found {}", ty.name()),
                    );
                    return None;
                }
                Some(Type::Bool)
            }
        }
    }

    fn resolve_action(&mut self, action: &ActionDecl) -> ActionInfo {
        let mut patterns: BTreeMap<String, Type> = BTreeMap::new();
        let consumes = self.resolve_consumes(action, &mut patterns);

        // Guards see only pattern variables and state.
        let mut data_dependent_guards = false;
        for guard in &action.guards {
            if let Some(ty) = self.type_expr(guard, &patterns, None) {
                if ty != Type::Bool {
                    self.err(
                        DiagCode::Type,
                        guard.span(),
                        alloc::format!("guard must be bool, found {}", ty.name()),
                    );
                }
            }
            if expr_reads_data(guard, &patterns, self.decl) {
                data_dependent_guards = true;
            }
        }

        let mut locals: BTreeMap<String, Type> = BTreeMap::new();
        let mut production = alloc::vec![0u32; self.decl.outputs.len()];
        for stmt in &action.body {
            match stmt {
                Stmt::Let { name, value, span } => {
                    let ty = self.type_expr(value, &patterns, Some(&locals));
                    if patterns.contains_key(name)
                        || locals.contains_key(name)
                        || self.decl.state_var(name).is_some()
                        || self.lookup_port(name).is_some()
                    {
                        self.err(
                            DiagCode::Name,
                            span,
                            alloc::format!("`{name}` is already bound"),
                        );
                    } else if let Some(ty) = ty {
                        locals.insert(name.clone(), ty);
                    }
                }
                Stmt::Assign { name, value, span } => {
                    let value_ty = self.type_expr(value, &patterns, Some(&locals));
                    if let Some((_, direction, _)) = self.lookup_port(name) {
                        let what = match direction {
                            Direction::Input => "write to input port",
                            Direction::Output => "assign to output port",
                        };
                        self.err(
                            DiagCode::Direction,
                            span,
                            alloc::format!("cannot {what} `{name}`; use `emit` for output"),
                        );
                        continue;
                    }
                    match self.decl.state_var(name) {
                        Some(v) => match scalar_of(v.var_type) {
                            Some(want) => {
                                if let Some(got) = value_ty {
                                    if got != want {
                                        self.err(
                                            DiagCode::Type,
                                            span,
                                            alloc::format!(
                                                "cannot assign {} to `{name}` of type {}",
                                                got.name(),
                                                want.name()
                                            ),
                                        );
                                    }
                                }
                            }
                            None => self.err(
                                DiagCode::Type,
                                span,
                                alloc::format!(
                                    "assign map elements as `{name}[key] = ...`"
                                ),
                            ),
                        },
                        None if locals.contains_key(name) || patterns.contains_key(name) => {
                            self.err(
                                DiagCode::Type,
                                span,
                                alloc::format!(
                                    "`{name}` is not a state variable; locals and patterns are immutable"
                                ),
                            );
                        }
                        None => self.err(
                            DiagCode::Name,
                            span,
                            alloc::format!("unbound identifier `{name}`"),
                        ),
                    }
                }
                Stmt::MapAssign { map, key, value, span } => {
                    match self.decl.state_var(map) {
                        Some(v) if v.var_type == VarType::Map => {}
                        Some(_) => self.err(
                            DiagCode::Type,
                            span,
                            alloc::format!("`{map}` is not a map"),
                        ),
                        None => self.err(
                            DiagCode::Name,
                            span,
                            alloc::format!("unbound map `{map}`"),
                        ),
                    }
                    if let Some(ty) = self.type_expr(key, &patterns, Some(&locals)) {
                        if ty != Type::Address {
                            self.err(
                                DiagCode::Type,
                                key.span(),
                                alloc::format!(
                                    "map key must be an address, found {}",
                                    ty.name()
                                ),
                            );
                        }
                    }
                    if let Some(ty) = self.type_expr(value, &patterns, Some(&locals)) {
                        if ty != Type::Uint {
                            self.err(
                                DiagCode::Type,
                                value.span(),
                                alloc::format!(
                                    "map value must be a uint, found {}",
                                    ty.name()
                                ),
                            );
                        }
                    }
                }
                Stmt::Emit { port, payload, span } => {
                    let Some((port_decl, direction, index)) = self.lookup_port(port) else {
                        self.err(
                            DiagCode::Name,
                            span,
                            alloc::format!("unknown port `{port}`"),
                        );
                        continue;
                    };
                    if direction == Direction::Input {
                        self.err(
                            DiagCode::Direction,
                            span,
                            alloc::format!("cannot emit to input port `{port}`"),
                        );
                        continue;
                    }
                    let token_type = port_decl.token_type;
                    let produced = self.check_emit(token_type, port, payload, span, &patterns, &locals);
                    production[index] += produced;
                }
            }
        }

        let mut consumption = alloc::vec![0u32; self.decl.inputs.len()];
        for c in &consumes {
            consumption[c.port_index] += match &c.kind {
                ConsumeKind::Plain { patterns, .. } => patterns.len() as u32,
                ConsumeKind::Request | ConsumeKind::Transfer { .. } => 1,
            };
        }

        ActionInfo { consumes, consumption, production, data_dependent_guards }
    }

    fn check_emit(
        &mut self,
        token_type: TokenType,
        port: &str,
        payload: &EmitPayload,
        span: &SourceSpan,
        patterns: &BTreeMap<String, Type>,
        locals: &BTreeMap<String, Type>,
    ) -> u32 {
        match (token_type, payload) {
            (TokenType::Request, EmitPayload::Request { value, .. }) => {
                if let Some(v) = value {
                    if let Some(ty) = self.type_expr(v, patterns, Some(locals)) {
                        if ty != Type::Uint {
                            self.err(
                                DiagCode::Type,
                                v.span(),
                                alloc::format!(
                                    "request value must be a uint, found {}",
                                    ty.name()
                                ),
                            );
                        }
                    }
                }
                1
            }
            (TokenType::Request, EmitPayload::Values(_)) => {
                self.err(
                    DiagCode::Type,
                    span,
                    alloc::format!("request port `{port}` emits as `emit {port}.method(value)`"),
                );
                0
            }
            (TokenType::Transfer, EmitPayload::Values(exprs)) => {
                if exprs.len() != 2 {
                    self.err(
                        DiagCode::Type,
                        span,
                        alloc::format!(
                            "transfer port `{port}` emits a (to, amount) pair; found {} expressions",
                            exprs.len()
                        ),
                    );
                    return 0;
                }
                for (expr, want) in exprs.iter().zip([Type::Address, Type::Uint]) {
                    if let Some(got) = self.type_expr(expr, patterns, Some(locals)) {
                        if got != want {
                            self.err(
                                DiagCode::Type,
                                expr.span(),
                                alloc::format!(
                                    "expected {}, found {}",
                                    want.name(),
                                    got.name()
                                ),
                            );
                        }
                    }
                }
                1
            }
            (scalar, EmitPayload::Values(exprs)) => {
                if exprs.is_empty() {
                    self.err(
                        DiagCode::Type,
                        span,
                        alloc::format!("emit on `{port}` needs at least one expression"),
                    );
                    return 0;
                }
                let want = match scalar {
                    TokenType::Uint => Type::Uint,
                    TokenType::Address => Type::Address,
                    TokenType::Bool => Type::Bool,
                    _ => unreachable!(),
                };
                for expr in exprs {
                    if let Some(got) = self.type_expr(expr, patterns, Some(locals)) {
                        if got != want {
                            self.err(
                                DiagCode::Type,
                                expr.span(),
                                alloc::format!(
                                    "port `{port}` carries {} tokens, found {}",
                                    want.name(),
                                    got.name()
                                ),
                            );
                        }
                    }
                }
                exprs.len() as u32
            }
            (_, EmitPayload::Request { .. }) => {
                self.err(
                    DiagCode::Type,
                    span,
                    alloc::format!("`emit {port}.method(...)` is only valid on request ports"),
                );
                0
            }
        }
    }

    fn check_schedule(&mut self) {
        let Some(fsm) = &self.decl.schedule else { return };
        for t in &fsm.transitions {
            if !self.decl.actions.iter().any(|a| a.name == t.action) {
                self.err(
                    DiagCode::Name,
                    &t.span,
                    alloc::format!("schedule references unknown action `{}`", t.action),
                );
            }
        }
    }
}

fn scalar_of(ty: VarType) -> Option<Type> {
    match ty {
        VarType::Uint => Some(Type::Uint),
        VarType::Address => Some(Type::Address),
        VarType::Bool => Some(Type::Bool),
        VarType::Map => None,
    }
}

/// Type of a literal-only expression, or None if it reads anything.
fn const_type(expr: &Expr) -> Option<Type> {
    match expr {
        Expr::Uint(..) => Some(Type::Uint),
        Expr::Addr(..) => Some(Type::Address),
        Expr::Bool(..) => Some(Type::Bool),
        Expr::Binary { op, lhs, rhs, .. } => {
            let lt = const_type(lhs)?;
            let rt = const_type(rhs)?;
            use BinOp::*;
            match op {
                Add | Sub | Mul | Div if lt == Type::Uint && rt == Type::Uint => Some(Type::Uint),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Evaluate a literal-only uint expression; used for state initializers and
/// instance balances.
pub fn const_eval_uint(expr: &Expr) -> Option<Uint> {
    match expr {
        Expr::Uint(v, _) => Some(v.clone()),
        Expr::Binary { op, lhs, rhs, .. } => {
            let l = const_eval_uint(lhs)?;
            let r = const_eval_uint(rhs)?;
            match op {
                BinOp::Add => l.checked_add(&r).ok(),
                BinOp::Sub => l.checked_sub(&r).ok(),
                BinOp::Mul => l.checked_mul(&r).ok(),
                BinOp::Div => l.checked_div(&r).ok(),
                _ => None,
            }
        }
        _ => None,
    }
}

fn expr_reads_data(
    expr: &Expr,
    patterns: &BTreeMap<String, Type>,
    decl: &ActorDecl,
) -> bool {
    match expr {
        Expr::Uint(..) | Expr::Addr(..) | Expr::Bool(..) => false,
        Expr::Ident(name, _) => patterns.contains_key(name) || decl.state_var(name).is_some(),
        Expr::Index { .. } => true,
        Expr::Binary { lhs, rhs, .. } => {
            expr_reads_data(lhs, patterns, decl) || expr_reads_data(rhs, patterns, decl)
        }
        Expr::Not { expr, .. } => expr_reads_data(expr, patterns, decl),
    }
}

/// Resolve and validate a parsed actor. All findings are collected; the
/// result is `Err` when any error-severity diagnostic was produced.
pub fn resolve(decl: &ActorDecl) -> DiagResult<ResolvedActor> {
    let mut resolver = Resolver { decl, diags: Vec::new() };
    resolver.check_unique_names();
    resolver.check_initializers();
    resolver.check_schedule();
    let actions: Vec<ActionInfo> =
        decl.actions.iter().map(|a| resolver.resolve_action(a)).collect();
    if resolver.diags.is_empty() {
        Ok(ResolvedActor { decl: decl.clone(), actions })
    } else {
        Err(resolver.diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::DiagCode;
    use crate::frontend::parser::parse_actor_source;

    fn resolve_src(src: &str) -> DiagResult<ResolvedActor> {
        resolve(&parse_actor_source(src, "test.actor").unwrap())
    }

    #[test]
    fn guard_comparison_types_as_bool() {
        // A non-bool guard is rejected, a comparison guard is accepted:
        // together these pin "comparison yields boolean".
        let ok = resolve_src(
            "actor A\n  in req: request\n  state balances: map(address -> uint)\n  action f on req guard balances[sender] >= value do end\nend",
        );
        assert!(ok.is_ok());
        let bad = resolve_src(
            "actor A\n  in req: request\n  state balances: map(address -> uint)\n  action f on req guard balances[sender] do end\nend",
        );
        let diags = bad.unwrap_err();
        assert!(diags.iter().any(|d| d.code == DiagCode::Type && d.message.contains("guard")));
    }

    #[test]
    fn unbound_guard_identifier_is_name_error() {
        let diags = resolve_src(
            "actor A\n  in p: uint\n  action f on p(x) guard nosuch > 0 do end\nend",
        )
        .unwrap_err();
        assert!(diags.iter().any(|d| d.code == DiagCode::Name));
    }

    #[test]
    fn reading_port_in_body_is_direction_error() {
        let diags = resolve_src(
            "actor A\n  in p: uint\n  state x: uint\n  action f guard true do x = p; end\nend",
        )
        .unwrap_err();
        assert!(diags.iter().any(|d| d.code == DiagCode::Direction));
    }

    #[test]
    fn emit_to_input_port_is_direction_error() {
        let diags = resolve_src(
            "actor A\n  in p: uint\n  action f do emit p(1); end\nend",
        )
        .unwrap_err();
        assert!(diags.iter().any(|d| d.code == DiagCode::Direction));
    }

    #[test]
    fn consume_from_output_port_is_direction_error() {
        let diags = resolve_src(
            "actor A\n  out p: uint\n  action f on p(x) do end\nend",
        )
        .unwrap_err();
        assert!(diags.iter().any(|d| d.code == DiagCode::Direction));
    }

    #[test]
    fn rates_are_syntactic() {
        let resolved = resolve_src(
            "actor A\n  in src: uint\n  out dst: uint\n  action f on src(a, b) do emit dst(a + b); emit dst(a); end\nend",
        )
        .unwrap();
        assert_eq!(resolved.actions[0].consumption, alloc::vec![2]);
        assert_eq!(resolved.actions[0].production, alloc::vec![2]);
    }

    #[test]
    fn request_port_binds_sender_and_value() {
        let resolved = resolve_src(
            "actor A\n  in req: request\n  state total: uint = 0\n  action f on req guard value > 0 do total = total + value; end\nend",
        )
        .unwrap();
        assert!(resolved.actions[0].data_dependent_guards);
    }

    #[test]
    fn duplicate_names_rejected() {
        let diags =
            resolve_src("actor A\n  in p: uint\n  state p: uint\nend").unwrap_err();
        assert!(diags.iter().any(|d| d.code == DiagCode::Name));
    }

    #[test]
    fn schedule_must_name_real_actions() {
        let diags = resolve_src(
            "actor A\n  in p: uint\n  action f on p(x) do end\n  schedule s0: nosuch -> s0;\n  end\nend",
        )
        .unwrap_err();
        assert!(diags.iter().any(|d| d.code == DiagCode::Name));
    }
}
