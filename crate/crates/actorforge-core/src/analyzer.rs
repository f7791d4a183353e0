//! Static reentrancy analysis on contract ASTs.
//!
//! The base rule flags every storage write that appears after an ether
//! transfer or external call in straight-line body order; conditionals are
//! analyzed per branch and merged as a may-analysis. The mutex-aware pass
//! recognizes the lock bracket structurally — a boolean storage variable
//! required false and set true at entry, cleared at exit, in every public
//! state-mutating function — and downgrades findings in bracketed
//! functions, since re-entry then reverts before reaching any state.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::codegen;
use crate::diag::Severity;
use crate::frontend::resolver::ResolvedActor;
use crate::seqvm::ast::{CExpr, CFunction, CStmt, CVarType, ContractDef};
use crate::span::SourceSpan;

pub const RULE_EFFECTS: &str = "effects-after-interaction";
pub const RULE_GEN_FUNCTIONS: &str = "gen-function-per-action";
pub const RULE_GEN_GUARDS: &str = "gen-guard-require";
pub const RULE_GEN_SEND_ORDER: &str = "gen-send-order";
pub const RULE_GEN_LOCK: &str = "gen-lock-bracket";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    TruePositiveCandidate,
    SuppressedByMutex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub rule_id: &'static str,
    pub function: String,
    pub span: SourceSpan,
    pub severity: Severity,
    pub classification: Classification,
    pub message: String,
}

impl Finding {
    /// Render as `file:line:col: RULE_ID severity: message`.
    pub fn render(&self) -> String {
        alloc::format!(
            "{}: {} {}: {}",
            self.span,
            self.rule_id,
            match self.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
                Severity::Info => "info",
            },
            self.message
        )
    }
}

fn storage_names(def: &ContractDef) -> BTreeSet<&str> {
    def.state_vars.iter().map(|v| v.name.as_str()).collect()
}

fn is_interaction(stmt: &CStmt) -> bool {
    match stmt {
        CStmt::Send { .. } | CStmt::CallStmt { .. } => true,
        CStmt::Local { init, .. } => init.contains_call(),
        CStmt::Assign { value, .. } => value.contains_call(),
        CStmt::MapAssign { key, value, .. } => key.contains_call() || value.contains_call(),
        CStmt::Require { cond, .. } => cond.contains_call(),
        CStmt::Return { value, .. } => value.as_ref().map(CExpr::contains_call).unwrap_or(false),
        CStmt::If { .. } => false, // the condition is handled at the walk
    }
}

fn scan_body(
    body: &[CStmt],
    mut after_interaction: bool,
    storage: &BTreeSet<&str>,
    function: &str,
    findings: &mut Vec<Finding>,
) -> bool {
    for stmt in body {
        // A storage write in a statement following any interaction point.
        let written = match stmt {
            CStmt::Assign { name, .. } if storage.contains(name.as_str()) => Some(name),
            CStmt::MapAssign { map, .. } if storage.contains(map.as_str()) => Some(map),
            _ => None,
        };
        if let Some(var) = written {
            if after_interaction {
                findings.push(Finding {
                    rule_id: RULE_EFFECTS,
                    function: function.to_string(),
                    span: stmt.span().clone(),
                    severity: Severity::Error,
                    classification: Classification::TruePositiveCandidate,
                    message: alloc::format!(
                        "state update to `{var}` after an external interaction in `{function}`"
                    ),
                });
            }
        }
        match stmt {
            CStmt::If { cond, then_branch, else_branch, .. } => {
                let entry = after_interaction || cond.contains_call();
                let after_then = scan_body(then_branch, entry, storage, function, findings);
                let after_else = scan_body(else_branch, entry, storage, function, findings);
                after_interaction = after_then || after_else;
            }
            _ => {
                if is_interaction(stmt) {
                    after_interaction = true;
                }
            }
        }
    }
    after_interaction
}

/// The coding best-practice rule: report every storage write after an ether
/// transfer or external call, per function, in (function, statement) order.
/// Constructors are exempt (they run once, before the contract is callable);
/// the fallback is public and is analyzed.
pub fn check_effects_after_interaction(def: &ContractDef) -> Vec<Finding> {
    let storage = storage_names(def);
    let mut findings = Vec::new();
    for function in def.functions.iter().chain(def.fallback.iter()) {
        scan_body(&function.body, false, &storage, &function.name, &mut findings);
    }
    findings
}

// ---- mutex recognition ----

fn is_require_not(stmt: &CStmt, var: &str) -> bool {
    matches!(stmt, CStmt::Require { cond: CExpr::Not { expr, .. }, .. }
        if matches!(expr.as_ref(), CExpr::Ident(name, _) if name == var))
}

fn is_assign_bool(stmt: &CStmt, var: &str, value: bool) -> bool {
    matches!(stmt, CStmt::Assign { name, value: CExpr::Bool(b, _), .. }
        if name == var && *b == value)
}

/// Storage writes in a body (recursively), excluding writes to `except`.
fn writes_storage_other_than(body: &[CStmt], storage: &BTreeSet<&str>, except: &str) -> bool {
    body.iter().any(|stmt| match stmt {
        CStmt::Assign { name, .. } => name != except && storage.contains(name.as_str()),
        CStmt::MapAssign { map, .. } => map != except && storage.contains(map.as_str()),
        CStmt::If { then_branch, else_branch, .. } => {
            writes_storage_other_than(then_branch, storage, except)
                || writes_storage_other_than(else_branch, storage, except)
        }
        _ => false,
    })
}

/// The bracket: `require(!lock); lock = true;` first, `lock = false;` last,
/// with no interaction before the acquire (guaranteed by position).
fn has_lock_bracket(function: &CFunction, var: &str) -> bool {
    let body = &function.body;
    body.len() >= 3
        && is_require_not(&body[0], var)
        && is_assign_bool(&body[1], var, true)
        && is_assign_bool(&body[body.len() - 1], var, false)
}

/// Structurally identify mutex variables: boolean storage variables whose
/// bracket appears in every public state-mutating function (fallback
/// included). Names play no role.
pub fn lock_candidates(def: &ContractDef) -> Vec<String> {
    let storage = storage_names(def);
    let mut candidates = Vec::new();
    for var in &def.state_vars {
        if var.ty != CVarType::Bool {
            continue;
        }
        let mut any_mutating = false;
        let mut all_bracketed = true;
        for function in def.functions.iter().chain(def.fallback.iter()) {
            let mutating = writes_storage_other_than(&function.body, &storage, &var.name);
            if !mutating {
                continue;
            }
            any_mutating = true;
            if !has_lock_bracket(function, &var.name) {
                all_bracketed = false;
                break;
            }
        }
        if any_mutating && all_bracketed {
            candidates.push(var.name.clone());
        }
    }
    candidates
}

/// The refined rule: run the base analysis, then downgrade findings inside
/// lock-bracketed functions to informational, because the bracket makes any
/// re-entrant call revert before it can observe intermediate state.
pub fn check_with_mutex_awareness(def: &ContractDef) -> Vec<Finding> {
    let mut findings = check_effects_after_interaction(def);
    let locks = lock_candidates(def);
    let Some(lock) = locks.first() else { return findings };
    for finding in findings.iter_mut() {
        let bracketed = def
            .functions
            .iter()
            .chain(def.fallback.iter())
            .find(|f| f.name == finding.function)
            .map(|f| has_lock_bracket(f, lock))
            .unwrap_or(false);
        if bracketed {
            finding.severity = Severity::Info;
            finding.classification = Classification::SuppressedByMutex;
            finding.message =
                alloc::format!("{} (suppressed: mutex `{lock}` brackets the function)", finding.message);
        }
    }
    findings
}

// ---- structural verification of generated contracts ----

fn storage_write_target<'s>(stmt: &'s CStmt, storage: &BTreeSet<&str>) -> Option<&'s str> {
    match stmt {
        CStmt::Assign { name, .. } if storage.contains(name.as_str()) => Some(name),
        CStmt::MapAssign { map, .. } if storage.contains(map.as_str()) => Some(map),
        _ => None,
    }
}

/// Check that `def` has the shape `generate_contract` promises for `actor`:
/// (a) one public function per action; (b) every guard appears as a require
/// before any non-lock storage write; (c) sends come after the last
/// non-lock storage write, or the lock bracket holds; (d) the lock is
/// acquired first and released last.
pub fn verify_generated(actor: &ResolvedActor, def: &ContractDef) -> Result<(), Vec<Finding>> {
    let mut findings = Vec::new();
    let storage = storage_names(def);
    let locks = lock_candidates(def);
    let lock = locks.first().cloned();

    // (a) function set == action set, in order, nothing extra.
    let action_names: Vec<&str> = actor.decl.actions.iter().map(|a| a.name.as_str()).collect();
    let function_names: Vec<&str> = def.functions.iter().map(|f| f.name.as_str()).collect();
    if action_names != function_names || def.fallback.is_some() {
        findings.push(Finding {
            rule_id: RULE_GEN_FUNCTIONS,
            function: def.name.clone(),
            span: def.span.clone(),
            severity: Severity::Error,
            classification: Classification::TruePositiveCandidate,
            message: alloc::format!(
                "expected exactly one public function per action {action_names:?}, found {function_names:?}"
            ),
        });
    }

    for (idx, action) in actor.decl.actions.iter().enumerate() {
        let Some(function) = def.function(&action.name) else { continue };

        // (d) lock acquire first, release last.
        let bracketed = match &lock {
            Some(lock) => has_lock_bracket(function, lock),
            None => false,
        };
        if !bracketed {
            findings.push(Finding {
                rule_id: RULE_GEN_LOCK,
                function: function.name.clone(),
                span: function.span.clone(),
                severity: Severity::Error,
                classification: Classification::TruePositiveCandidate,
                message: alloc::format!(
                    "`{}` is not bracketed by a lock acquire/release pair",
                    function.name
                ),
            });
        }

        let first_write = function.body.iter().position(|s| {
            storage_write_target(s, &storage)
                .map(|var| Some(var) != lock.as_deref())
                .unwrap_or(false)
        });
        let last_write = function.body.iter().rposition(|s| {
            storage_write_target(s, &storage)
                .map(|var| Some(var) != lock.as_deref())
                .unwrap_or(false)
        });

        // (b) every guard appears as a require before any non-lock write.
        for guard in &action.guards {
            let Some(translated) = codegen::translate_guard(actor, idx, guard) else { continue };
            let wanted = codegen::render_expr(&translated);
            let found = function.body.iter().position(|s| match s {
                CStmt::Require { cond, .. } => codegen::render_expr(cond) == wanted,
                _ => false,
            });
            let ok = match (found, first_write) {
                (Some(require_at), Some(write_at)) => require_at < write_at,
                (Some(_), None) => true,
                (None, _) => false,
            };
            if !ok {
                findings.push(Finding {
                    rule_id: RULE_GEN_GUARDS,
                    function: function.name.clone(),
                    span: function.span.clone(),
                    severity: Severity::Error,
                    classification: Classification::TruePositiveCandidate,
                    message: alloc::format!(
                        "guard `{wanted}` of action `{}` is not required before the first state write",
                        action.name
                    ),
                });
            }
        }

        // (c) sends after the last non-lock write, unless bracketed.
        if !bracketed {
            let first_send =
                function.body.iter().position(|s| matches!(s, CStmt::Send { .. }));
            if let (Some(send_at), Some(write_at)) = (first_send, last_write) {
                if send_at < write_at {
                    findings.push(Finding {
                        rule_id: RULE_GEN_SEND_ORDER,
                        function: function.name.clone(),
                        span: function.span.clone(),
                        severity: Severity::Error,
                        classification: Classification::TruePositiveCandidate,
                        message: alloc::format!(
                            "`{}` sends before its last state update and carries no lock",
                            function.name
                        ),
                    });
                }
            }
        }
    }

    if findings.is_empty() {
        Ok(())
    } else {
        Err(findings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqvm::parser::parse_contract_source;

    const DAO_VULNERABLE: &str =
        include_str!("../../../fixtures/contracts/dao_vulnerable.sol.txt");
    const DAO_FIXED: &str = include_str!("../../../fixtures/contracts/dao_fixed.sol.txt");

    #[test]
    fn vulnerable_withdraw_gets_exactly_one_error() {
        let def = parse_contract_source(DAO_VULNERABLE, "v").unwrap();
        let findings = check_effects_after_interaction(&def);
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].function, "withdraw");
        assert_eq!(findings[0].severity, Severity::Error);
    }

    #[test]
    fn reordered_fix_is_clean() {
        let def = parse_contract_source(DAO_FIXED, "f").unwrap();
        assert!(check_effects_after_interaction(&def).is_empty());
    }

    #[test]
    fn branch_writes_after_interaction_are_reported() {
        let def = parse_contract_source(
            "contract C {
                uint total;
                function f(address to) payable {
                    send(to, msg.value);
                    if (msg.value > 0) { total = total + 1; }
                }
            }",
            "c",
        )
        .unwrap();
        let findings = check_effects_after_interaction(&def);
        assert_eq!(findings.len(), 1);
    }

    #[test]
    fn call_in_condition_counts_as_interaction() {
        let def = parse_contract_source(
            "contract C {
                uint total;
                address target;
                function f() {
                    if (target.probe() > 0) { total = 1; }
                }
            }",
            "c",
        )
        .unwrap();
        let findings = check_effects_after_interaction(&def);
        assert_eq!(findings.len(), 1);
    }

    #[test]
    fn partially_locked_contract_keeps_its_errors() {
        // Only one of two mutating functions carries the bracket, so the
        // candidate is rejected and nothing is suppressed.
        let def = parse_contract_source(
            "contract C {
                bool lock;
                uint total;
                function locked(address to) payable {
                    require(!lock);
                    lock = true;
                    send(to, msg.value);
                    total = total + 1;
                    lock = false;
                }
                function unlocked(address to) payable {
                    send(to, msg.value);
                    total = total + 1;
                }
            }",
            "c",
        )
        .unwrap();
        assert!(lock_candidates(&def).is_empty());
        let findings = check_with_mutex_awareness(&def);
        let errors =
            findings.iter().filter(|f| f.severity == Severity::Error).count();
        // Two genuine write-after-send findings plus the lock release in
        // the bracketed function, none of them suppressed.
        assert_eq!(errors, 3);
    }

    #[test]
    fn mutex_awareness_never_adds_errors() {
        for src in [DAO_VULNERABLE, DAO_FIXED] {
            let def = parse_contract_source(src, "c").unwrap();
            let naive =
                check_effects_after_interaction(&def).iter().filter(|f| f.severity == Severity::Error).count();
            let aware =
                check_with_mutex_awareness(&def).iter().filter(|f| f.severity == Severity::Error).count();
            assert!(aware <= naive);
        }
    }

    #[test]
    fn findings_come_in_function_then_statement_order() {
        let def = parse_contract_source(
            "contract C {
                uint a;
                uint b;
                function f(address to) payable {
                    send(to, msg.value);
                    a = 1;
                    b = 2;
                }
            }",
            "c",
        )
        .unwrap();
        let findings = check_effects_after_interaction(&def);
        assert_eq!(findings.len(), 2);
        assert!(findings[0].span.line < findings[1].span.line);
    }
}
