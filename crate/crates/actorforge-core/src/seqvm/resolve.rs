//! Name checking for parsed contracts. The VM is dynamically typed at
//! runtime; resolution guarantees that every identifier is declared and
//! that assignment targets are storage variables.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::diag::{DiagCode, Diagnostic, DiagResult};

use super::ast::*;

struct Checker<'a> {
    def: &'a ContractDef,
    diags: Vec<Diagnostic>,
}

impl<'a> Checker<'a> {
    fn err(&mut self, code: DiagCode, span: &crate::span::SourceSpan, message: String) {
        self.diags.push(Diagnostic::error(code, span.clone(), message));
    }

    fn check_expr(&mut self, expr: &CExpr, scope: &BTreeMap<String, ()>) {
        match expr {
            CExpr::Uint(..)
            | CExpr::Addr(..)
            | CExpr::Bool(..)
            | CExpr::MsgSender(_)
            | CExpr::MsgValue(_)
            | CExpr::SelfAddr(_) => {}
            CExpr::Ident(name, span) => {
                if !scope.contains_key(name) && self.def.state_var(name).is_none() {
                    self.err(
                        DiagCode::Name,
                        span,
                        alloc::format!("unbound identifier `{name}`"),
                    );
                }
            }
            CExpr::Index { map, key, span } => {
                match self.def.state_var(map) {
                    Some(v) if v.ty == CVarType::Map => {}
                    Some(_) => {
                        self.err(DiagCode::Type, span, alloc::format!("`{map}` is not a mapping"))
                    }
                    None => {
                        self.err(DiagCode::Name, span, alloc::format!("unbound mapping `{map}`"))
                    }
                }
                self.check_expr(key, scope);
            }
            CExpr::Binary { lhs, rhs, .. } => {
                self.check_expr(lhs, scope);
                self.check_expr(rhs, scope);
            }
            CExpr::Not { expr, .. } => self.check_expr(expr, scope),
            CExpr::BalanceOf { target, .. } => self.check_expr(target, scope),
            CExpr::ExtCall { target, value, args, .. } => {
                self.check_expr(target, scope);
                if let Some(v) = value {
                    self.check_expr(v, scope);
                }
                for a in args {
                    self.check_expr(a, scope);
                }
            }
        }
    }

    fn check_body(&mut self, body: &[CStmt], scope: &mut BTreeMap<String, ()>) {
        for stmt in body {
            match stmt {
                CStmt::Local { name, init, span, .. } => {
                    self.check_expr(init, scope);
                    if scope.contains_key(name) || self.def.state_var(name).is_some() {
                        self.err(
                            DiagCode::Name,
                            span,
                            alloc::format!("`{name}` is already bound"),
                        );
                    } else {
                        scope.insert(name.clone(), ());
                    }
                }
                CStmt::Assign { name, value, span } => {
                    self.check_expr(value, scope);
                    match self.def.state_var(name) {
                        Some(v) if v.ty == CVarType::Map => self.err(
                            DiagCode::Type,
                            span,
                            alloc::format!("assign mapping elements as `{name}[key] = ...`"),
                        ),
                        Some(_) => {}
                        None if scope.contains_key(name) => self.err(
                            DiagCode::Type,
                            span,
                            alloc::format!("locals are single-assignment; `{name}` is a local"),
                        ),
                        None => self.err(
                            DiagCode::Name,
                            span,
                            alloc::format!("unbound identifier `{name}`"),
                        ),
                    }
                }
                CStmt::MapAssign { map, key, value, span } => {
                    match self.def.state_var(map) {
                        Some(v) if v.ty == CVarType::Map => {}
                        Some(_) => self.err(
                            DiagCode::Type,
                            span,
                            alloc::format!("`{map}` is not a mapping"),
                        ),
                        None => self.err(
                            DiagCode::Name,
                            span,
                            alloc::format!("unbound mapping `{map}`"),
                        ),
                    }
                    self.check_expr(key, scope);
                    self.check_expr(value, scope);
                }
                CStmt::Require { cond, .. } => self.check_expr(cond, scope),
                CStmt::If { cond, then_branch, else_branch, .. } => {
                    self.check_expr(cond, scope);
                    // Branch locals stay branch-local.
                    self.check_body(then_branch, &mut scope.clone());
                    self.check_body(else_branch, &mut scope.clone());
                }
                CStmt::Return { value, .. } => {
                    if let Some(v) = value {
                        self.check_expr(v, scope);
                    }
                }
                CStmt::Send { to, amount, .. } => {
                    self.check_expr(to, scope);
                    self.check_expr(amount, scope);
                }
                CStmt::CallStmt { call, .. } => self.check_expr(call, scope),
            }
        }
    }

    fn check_function(&mut self, f: &CFunction) {
        let mut scope: BTreeMap<String, ()> = BTreeMap::new();
        for (name, _) in &f.params {
            if scope.insert(name.clone(), ()).is_some() {
                self.err(
                    DiagCode::Name,
                    &f.span,
                    alloc::format!("duplicate parameter `{name}`"),
                );
            }
        }
        self.check_body(&f.body, &mut scope);
    }
}

/// Validate a parsed contract: unique names, bound identifiers, storage-only
/// assignment targets.
pub fn resolve_contract(def: &ContractDef) -> DiagResult<()> {
    let mut checker = Checker { def, diags: Vec::new() };
    let mut names: BTreeMap<&str, ()> = BTreeMap::new();
    for v in &def.state_vars {
        if names.insert(&v.name, ()).is_some() {
            checker.diags.push(Diagnostic::error(
                DiagCode::Name,
                v.span.clone(),
                alloc::format!("duplicate state variable `{}`", v.name),
            ));
        }
    }
    let mut fnames: BTreeMap<&str, ()> = BTreeMap::new();
    for f in &def.functions {
        if fnames.insert(&f.name, ()).is_some() {
            checker.diags.push(Diagnostic::error(
                DiagCode::Name,
                f.span.clone(),
                alloc::format!("duplicate function `{}`", f.name),
            ));
        }
    }
    for f in def
        .functions
        .iter()
        .chain(def.constructor.iter())
        .chain(def.fallback.iter())
    {
        checker.check_function(f);
    }
    if checker.diags.is_empty() {
        Ok(())
    } else {
        Err(checker.diags)
    }
}
