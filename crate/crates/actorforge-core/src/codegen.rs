//! Translation of resolved actors into reentrancy-safe contract source.
//!
//! Planning canonicalizes each action into requires → pre-state captures →
//! state updates → external sends, bracketed by a mutex acquire/release.
//! Independent statements are ordered by a data-dependence topological sort
//! with a text-based tie-break, so any legal permutation of the source maps
//! to byte-identical output. An emission whose value reads a location
//! written both before and after it has no faithful canonical order and is
//! refused.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::frontend::ast::{self as fe, BinOp, EmitPayload, TokenType};
use crate::frontend::resolver::{ConsumeKind, ResolvedActor};
use crate::seqvm::ast::{CExpr, CStmt, CVarType, ContractDef};
use crate::seqvm::vm::Scenario;
use crate::span::SourceSpan;
use crate::value::Uint;

/// Name of the generated mutex variable and prefix of generated locals.
pub const LOCK_VAR: &str = "__locked";
pub const PRE_STATE_PREFIX: &str = "__pre_";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanError {
    pub span: SourceSpan,
    pub message: String,
}

impl core::fmt::Display for PlanError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: plan error: {}", self.span, self.message)
    }
}

/// Canonicalized shape of one action: everything the renderer needs, with
/// source statements partitioned into requires, updates and emissions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitPlan {
    pub action: String,
    pub requires: Vec<CExpr>,
    /// `(name, type, expr)` pre-state captures, evaluated before updates.
    pub captures: Vec<(String, CVarType, CExpr)>,
    pub updates: Vec<CStmt>,
    pub emissions: Vec<CStmt>,
    pub lock_var: String,
}

// ---- expression translation ----

struct ActionCtx<'a> {
    actor: &'a ResolvedActor,
    /// Pattern variables bound by request consumption.
    request_bound: bool,
    locals: BTreeMap<String, CVarType>,
}

fn translate_expr(expr: &fe::Expr, ctx: &ActionCtx) -> Result<CExpr, PlanError> {
    let span = SourceSpan::synthetic();
    Ok(match expr {
        fe::Expr::Uint(v, _) => CExpr::Uint(v.clone(), span),
        fe::Expr::Addr(a, _) => CExpr::Addr(*a, span),
        fe::Expr::Bool(b, _) => CExpr::Bool(*b, span),
        fe::Expr::Ident(name, s) => {
            if ctx.request_bound && name == "sender" {
                CExpr::MsgSender(span)
            } else if ctx.request_bound && name == "value" {
                CExpr::MsgValue(span)
            } else if ctx.locals.contains_key(name)
                || ctx.actor.decl.state_var(name).is_some()
            {
                CExpr::Ident(name.clone(), span)
            } else {
                return Err(PlanError {
                    span: s.clone(),
                    message: alloc::format!(
                        "`{name}` has no sequential counterpart (only request-bound \
                         sender/value, state variables and locals translate)"
                    ),
                });
            }
        }
        fe::Expr::Index { map, key, .. } => CExpr::Index {
            map: map.clone(),
            key: Box::new(translate_expr(key, ctx)?),
            span,
        },
        fe::Expr::Binary { op, lhs, rhs, .. } => CExpr::Binary {
            op: *op,
            lhs: Box::new(translate_expr(lhs, ctx)?),
            rhs: Box::new(translate_expr(rhs, ctx)?),
            span,
        },
        fe::Expr::Not { expr, .. } => {
            CExpr::Not { expr: Box::new(translate_expr(expr, ctx)?), span }
        }
    })
}

/// Translate an action guard for comparison against generated requires.
/// Used by the structural verifier as well as the generator.
pub fn translate_guard(actor: &ResolvedActor, action_idx: usize, guard: &fe::Expr) -> Option<CExpr> {
    let info = &actor.actions[action_idx];
    let request_bound =
        info.consumes.iter().any(|c| matches!(c.kind, ConsumeKind::Request));
    let ctx = ActionCtx { actor, request_bound, locals: BTreeMap::new() };
    translate_expr(guard, &ctx).ok()
}

fn scalar_of(ty: fe::VarType) -> CVarType {
    match ty {
        fe::VarType::Uint => CVarType::Uint,
        fe::VarType::Address => CVarType::Address,
        fe::VarType::Bool => CVarType::Bool,
        fe::VarType::Map => CVarType::Map,
    }
}

fn infer_type(expr: &CExpr, ctx: &ActionCtx) -> CVarType {
    match expr {
        CExpr::Uint(..) | CExpr::MsgValue(_) | CExpr::Index { .. } | CExpr::BalanceOf { .. } => {
            CVarType::Uint
        }
        CExpr::Addr(..) | CExpr::MsgSender(_) | CExpr::SelfAddr(_) => CVarType::Address,
        CExpr::Bool(..) | CExpr::Not { .. } => CVarType::Bool,
        CExpr::Ident(name, _) => ctx
            .locals
            .get(name)
            .copied()
            .or_else(|| ctx.actor.decl.state_var(name).map(|v| scalar_of(v.var_type)))
            .unwrap_or(CVarType::Uint),
        CExpr::Binary { op, .. } => match op {
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => CVarType::Uint,
            _ => CVarType::Bool,
        },
        CExpr::ExtCall { .. } => CVarType::Uint,
    }
}

// ---- location analysis ----

/// A readable/writable location at whole-variable granularity; map writes
/// conservatively alias every key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Loc {
    State(String),
    Local(String),
}

fn expr_reads(expr: &CExpr, ctx: &ActionCtx, out: &mut BTreeSet<Loc>) {
    match expr {
        CExpr::Ident(name, _) => {
            if ctx.locals.contains_key(name) {
                out.insert(Loc::Local(name.clone()));
            } else {
                out.insert(Loc::State(name.clone()));
            }
        }
        CExpr::Index { map, key, .. } => {
            out.insert(Loc::State(map.clone()));
            expr_reads(key, ctx, out);
        }
        CExpr::Binary { lhs, rhs, .. } => {
            expr_reads(lhs, ctx, out);
            expr_reads(rhs, ctx, out);
        }
        CExpr::Not { expr, .. } => expr_reads(expr, ctx, out),
        CExpr::BalanceOf { target, .. } => expr_reads(target, ctx, out),
        CExpr::ExtCall { target, value, args, .. } => {
            expr_reads(target, ctx, out);
            if let Some(v) = value {
                expr_reads(v, ctx, out);
            }
            for a in args {
                expr_reads(a, ctx, out);
            }
        }
        _ => {}
    }
}

fn stmt_reads(stmt: &CStmt, ctx: &ActionCtx) -> BTreeSet<Loc> {
    let mut out = BTreeSet::new();
    match stmt {
        CStmt::Local { init, .. } => expr_reads(init, ctx, &mut out),
        CStmt::Assign { value, .. } => expr_reads(value, ctx, &mut out),
        CStmt::MapAssign { key, value, .. } => {
            expr_reads(key, ctx, &mut out);
            expr_reads(value, ctx, &mut out);
        }
        _ => {}
    }
    out
}

fn stmt_writes(stmt: &CStmt, ctx: &ActionCtx) -> BTreeSet<Loc> {
    let mut out = BTreeSet::new();
    match stmt {
        CStmt::Local { name, .. } => {
            out.insert(Loc::Local(name.clone()));
        }
        CStmt::Assign { name, .. } => {
            if ctx.locals.contains_key(name) {
                out.insert(Loc::Local(name.clone()));
            } else {
                out.insert(Loc::State(name.clone()));
            }
        }
        CStmt::MapAssign { map, .. } => {
            out.insert(Loc::State(map.clone()));
        }
        _ => {}
    }
    out
}

// ---- planning ----

enum Item {
    Update(CStmt),
    Emission { send: CStmt, reads: BTreeSet<Loc>, position: usize },
}

/// Partition an action body into the canonical require/capture/update/send
/// shape. Raises `PlanError` on genuinely ambiguous emissions and on
/// constructs outside the generatable subset.
pub fn plan_action(actor: &ResolvedActor, action_idx: usize) -> Result<EmitPlan, PlanError> {
    let action = &actor.decl.actions[action_idx];
    let info = &actor.actions[action_idx];

    for reserved in actor
        .decl
        .state_vars
        .iter()
        .map(|v| v.name.as_str())
        .chain(action.body.iter().filter_map(|s| match s {
            fe::Stmt::Let { name, .. } => Some(name.as_str()),
            _ => None,
        }))
    {
        if reserved == LOCK_VAR || reserved.starts_with(PRE_STATE_PREFIX) {
            return Err(PlanError {
                span: action.span.clone(),
                message: alloc::format!("identifier `{reserved}` is reserved for generated code"),
            });
        }
    }

    let mut request_bound = false;
    for consume in &info.consumes {
        match consume.kind {
            ConsumeKind::Request => request_bound = true,
            _ => {
                return Err(PlanError {
                    span: action.span.clone(),
                    message: "only request-port consumption maps to a public function"
                        .to_string(),
                })
            }
        }
    }

    let mut ctx = ActionCtx { actor, request_bound, locals: BTreeMap::new() };

    let mut requires = Vec::new();
    for guard in &action.guards {
        requires.push(translate_expr(guard, &ctx)?);
    }

    // First pass: translate statements, keeping source positions.
    let mut items = Vec::new();
    for (position, stmt) in action.body.iter().enumerate() {
        match stmt {
            fe::Stmt::Let { name, value, .. } => {
                let init = translate_expr(value, &ctx)?;
                let ty = infer_type(&init, &ctx);
                ctx.locals.insert(name.clone(), ty);
                items.push(Item::Update(CStmt::Local {
                    ty,
                    name: name.clone(),
                    init,
                    span: SourceSpan::synthetic(),
                }));
            }
            fe::Stmt::Assign { name, value, .. } => {
                items.push(Item::Update(CStmt::Assign {
                    name: name.clone(),
                    value: translate_expr(value, &ctx)?,
                    span: SourceSpan::synthetic(),
                }));
            }
            fe::Stmt::MapAssign { map, key, value, .. } => {
                items.push(Item::Update(CStmt::MapAssign {
                    map: map.clone(),
                    key: translate_expr(key, &ctx)?,
                    value: translate_expr(value, &ctx)?,
                    span: SourceSpan::synthetic(),
                }));
            }
            fe::Stmt::Emit { port, payload, span } => {
                let port_decl = actor.decl.port(port).expect("resolved port");
                if port_decl.token_type != TokenType::Transfer {
                    return Err(PlanError {
                        span: span.clone(),
                        message: alloc::format!(
                            "emission on `{port}` has no sequential counterpart; only \
                             transfer-port emissions become sends"
                        ),
                    });
                }
                let EmitPayload::Values(exprs) = payload else {
                    return Err(PlanError {
                        span: span.clone(),
                        message: "transfer emissions carry a (to, amount) pair".to_string(),
                    });
                };
                let to = translate_expr(&exprs[0], &ctx)?;
                let amount = translate_expr(&exprs[1], &ctx)?;
                let mut reads = BTreeSet::new();
                expr_reads(&to, &ctx, &mut reads);
                expr_reads(&amount, &ctx, &mut reads);
                items.push(Item::Emission {
                    send: CStmt::Send { to, amount, span: SourceSpan::synthetic() },
                    reads,
                    position,
                });
            }
        }
    }

    // Map every location to the source positions writing it.
    let mut write_positions: BTreeMap<Loc, Vec<usize>> = BTreeMap::new();
    for (pos, item) in items.iter().enumerate() {
        if let Item::Update(u) = item {
            for loc in stmt_writes(u, &ctx) {
                write_positions.entry(loc).or_default().push(pos);
            }
        }
    }

    // Second pass: decide capture vs direct read per emission.
    let mut captures: Vec<(String, CVarType, CExpr)> = Vec::new();
    let mut capture_index: BTreeMap<String, String> = BTreeMap::new();
    let mut updates = Vec::new();
    let mut emissions = Vec::new();
    for item in items {
        match item {
            Item::Update(u) => updates.push(u),
            Item::Emission { send, reads, position } => {
                let mut capture_locs = BTreeSet::new();
                for loc in reads.iter().filter(|l| matches!(l, Loc::State(_))) {
                    let writes = write_positions.get(loc).cloned().unwrap_or_default();
                    let before = writes.iter().any(|w| *w < position);
                    let after = writes.iter().any(|w| *w > position);
                    match (before, after) {
                        (true, true) => {
                            let Loc::State(name) = loc else { unreachable!() };
                            return Err(PlanError {
                                span: action.span.clone(),
                                message: alloc::format!(
                                    "emission in `{}` reads `{name}`, which is written both \
                                     before and after it; no canonical order preserves the \
                                     emitted value",
                                    action.name
                                ),
                            });
                        }
                        (false, true) => {
                            capture_locs.insert(loc.clone());
                        }
                        _ => {}
                    }
                }
                let CStmt::Send { to, amount, span } = send else { unreachable!() };
                let to =
                    capture_subexprs(to, &capture_locs, &mut captures, &mut capture_index, &ctx);
                let amount =
                    capture_subexprs(amount, &capture_locs, &mut captures, &mut capture_index, &ctx);
                emissions.push(CStmt::Send { to, amount, span });
            }
        }
    }

    // Canonical update order: data-dependence topological sort, ties broken
    // by rendered text so the order is independent of the source order.
    let updates = canonical_sort(updates, &ctx);

    let mut plan = EmitPlan {
        action: action.name.clone(),
        requires,
        captures,
        updates,
        emissions,
        lock_var: LOCK_VAR.to_string(),
    };
    rename_locals(&mut plan);
    Ok(plan)
}

/// Replace maximal state-read subexpressions over captured locations with
/// capture locals, creating each capture once.
fn capture_subexprs(
    expr: CExpr,
    capture_locs: &BTreeSet<Loc>,
    captures: &mut Vec<(String, CVarType, CExpr)>,
    capture_index: &mut BTreeMap<String, String>,
    ctx: &ActionCtx,
) -> CExpr {
    let is_captured_read = |e: &CExpr| -> bool {
        match e {
            CExpr::Ident(name, _) => {
                !ctx.locals.contains_key(name)
                    && capture_locs.contains(&Loc::State(name.clone()))
            }
            CExpr::Index { map, .. } => capture_locs.contains(&Loc::State(map.clone())),
            _ => false,
        }
    };
    if is_captured_read(&expr) {
        let key = render_expr(&expr);
        let name = capture_index.entry(key).or_insert_with(|| {
            let name = alloc::format!("{}{}", PRE_STATE_PREFIX, captures.len());
            let ty = infer_type(&expr, ctx);
            captures.push((name.clone(), ty, expr.clone()));
            name
        });
        return CExpr::Ident(name.clone(), SourceSpan::synthetic());
    }
    match expr {
        CExpr::Binary { op, lhs, rhs, span } => CExpr::Binary {
            op,
            lhs: Box::new(capture_subexprs(*lhs, capture_locs, captures, capture_index, ctx)),
            rhs: Box::new(capture_subexprs(*rhs, capture_locs, captures, capture_index, ctx)),
            span,
        },
        CExpr::Not { expr, span } => CExpr::Not {
            expr: Box::new(capture_subexprs(*expr, capture_locs, captures, capture_index, ctx)),
            span,
        },
        CExpr::Index { map, key, span } => CExpr::Index {
            map,
            key: Box::new(capture_subexprs(*key, capture_locs, captures, capture_index, ctx)),
            span,
        },
        other => other,
    }
}

/// Kahn's algorithm over RAW/WAR/WAW edges; among ready statements the
/// smallest rendered text goes first.
fn canonical_sort(updates: Vec<CStmt>, ctx: &ActionCtx) -> Vec<CStmt> {
    let n = updates.len();
    let reads: Vec<BTreeSet<Loc>> = updates.iter().map(|u| stmt_reads(u, ctx)).collect();
    let writes: Vec<BTreeSet<Loc>> = updates.iter().map(|u| stmt_writes(u, ctx)).collect();
    let mut successors: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    let mut indegree = alloc::vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let conflict = !writes[i].is_disjoint(&reads[j])
                || !reads[i].is_disjoint(&writes[j])
                || !writes[i].is_disjoint(&writes[j]);
            if conflict {
                successors[i].push(j);
                indegree[j] += 1;
            }
        }
    }
    let rendered: Vec<String> = updates.iter().map(render_stmt_flat).collect();
    let mut ready: Vec<usize> = (0..n).filter(|i| indegree[*i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while !ready.is_empty() {
        ready.sort_by(|a, b| rendered[*a].cmp(&rendered[*b]).then(a.cmp(b)));
        let next = ready.remove(0);
        order.push(next);
        for &succ in &successors[next] {
            indegree[succ] -= 1;
            if indegree[succ] == 0 {
                ready.push(succ);
            }
        }
    }
    let mut slots: Vec<Option<CStmt>> = updates.into_iter().map(Some).collect();
    order.into_iter().map(|i| slots[i].take().expect("each index once")).collect()
}

/// Locals get deterministic `__pre_<n>` names in order of appearance, so
/// plans from different source spellings render identically.
fn rename_locals(plan: &mut EmitPlan) {
    let mut mapping: BTreeMap<String, String> = BTreeMap::new();
    let mut counter = plan.captures.len();
    for stmt in &mut plan.updates {
        if let CStmt::Local { name, .. } = stmt {
            let fresh = alloc::format!("{PRE_STATE_PREFIX}{counter}");
            counter += 1;
            mapping.insert(name.clone(), fresh.clone());
            *name = fresh;
        }
    }
    if mapping.is_empty() {
        return;
    }
    for stmt in plan.updates.iter_mut().chain(plan.emissions.iter_mut()) {
        match stmt {
            CStmt::Local { init, .. } => rename_expr(init, &mapping),
            CStmt::Assign { value, .. } => rename_expr(value, &mapping),
            CStmt::MapAssign { key, value, .. } => {
                rename_expr(key, &mapping);
                rename_expr(value, &mapping);
            }
            CStmt::Send { to, amount, .. } => {
                rename_expr(to, &mapping);
                rename_expr(amount, &mapping);
            }
            _ => {}
        }
    }
}

fn rename_expr(expr: &mut CExpr, mapping: &BTreeMap<String, String>) {
    match expr {
        CExpr::Ident(name, _) => {
            if let Some(fresh) = mapping.get(name) {
                *name = fresh.clone();
            }
        }
        CExpr::Index { key, .. } => rename_expr(key, mapping),
        CExpr::Binary { lhs, rhs, .. } => {
            rename_expr(lhs, mapping);
            rename_expr(rhs, mapping);
        }
        CExpr::Not { expr, .. } => rename_expr(expr, mapping),
        CExpr::BalanceOf { target, .. } => rename_expr(target, mapping),
        CExpr::ExtCall { target, value, args, .. } => {
            rename_expr(target, mapping);
            if let Some(v) = value {
                rename_expr(v, mapping);
            }
            for a in args {
                rename_expr(a, mapping);
            }
        }
        _ => {}
    }
}

// ---- rendering ----

fn precedence(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
        BinOp::Add | BinOp::Sub => 4,
        BinOp::Mul | BinOp::Div => 5,
    }
}

fn render_uint(v: &Uint) -> String {
    let ether = Uint::ether(1);
    if !v.is_zero() {
        if let Ok(whole) = v.checked_div(&ether) {
            if whole.checked_mul(&ether).map(|w| w == *v).unwrap_or(false) {
                return alloc::format!("{} ether", whole.to_decimal());
            }
        }
    }
    v.to_decimal()
}

/// Render a contract expression to canonical text (minimal parentheses).
pub fn render_expr(expr: &CExpr) -> String {
    render_expr_prec(expr, 0)
}

fn render_expr_prec(expr: &CExpr, min: u8) -> String {
    match expr {
        CExpr::Uint(v, _) => render_uint(v),
        CExpr::Addr(a, _) => a.to_hex(),
        CExpr::Bool(b, _) => alloc::format!("{b}"),
        CExpr::Ident(name, _) => name.clone(),
        CExpr::MsgSender(_) => "msg.sender".to_string(),
        CExpr::MsgValue(_) => "msg.value".to_string(),
        CExpr::SelfAddr(_) => "address(this)".to_string(),
        CExpr::Index { map, key, .. } => alloc::format!("{map}[{}]", render_expr(key)),
        CExpr::BalanceOf { target, .. } => {
            alloc::format!("{}.balance", render_expr_prec(target, 7))
        }
        CExpr::Binary { op, lhs, rhs, .. } => {
            let p = precedence(*op);
            let text = alloc::format!(
                "{} {} {}",
                render_expr_prec(lhs, p),
                op.as_str(),
                render_expr_prec(rhs, p + 1)
            );
            if p < min {
                alloc::format!("({text})")
            } else {
                text
            }
        }
        CExpr::Not { expr, .. } => alloc::format!("!{}", render_expr_prec(expr, 6)),
        CExpr::ExtCall { target, function, value, args, .. } => {
            let value = match value {
                Some(v) => alloc::format!("{{value: {}}}", render_expr(v)),
                None => String::new(),
            };
            let args: Vec<String> = args.iter().map(render_expr).collect();
            alloc::format!(
                "{}.{function}{value}({})",
                render_expr_prec(target, 7),
                args.join(", ")
            )
        }
    }
}

fn render_stmt_flat(stmt: &CStmt) -> String {
    match stmt {
        CStmt::Local { ty, name, init, .. } => {
            alloc::format!("{} {name} = {};", ty.as_str(), render_expr(init))
        }
        CStmt::Assign { name, value, .. } => alloc::format!("{name} = {};", render_expr(value)),
        CStmt::MapAssign { map, key, value, .. } => {
            alloc::format!("{map}[{}] = {};", render_expr(key), render_expr(value))
        }
        CStmt::Require { cond, .. } => alloc::format!("require({});", render_expr(cond)),
        CStmt::Send { to, amount, .. } => {
            alloc::format!("send({}, {});", render_expr(to), render_expr(amount))
        }
        CStmt::Return { value: Some(v), .. } => alloc::format!("return {};", render_expr(v)),
        CStmt::Return { value: None, .. } => "return;".to_string(),
        CStmt::CallStmt { call, .. } => alloc::format!("{};", render_expr(call)),
        CStmt::If { .. } => "if { ... }".to_string(),
    }
}

/// Generate the reentrancy-safe contract for a resolved actor. Output is
/// deterministic: identical input yields identical bytes.
pub fn generate_contract(actor: &ResolvedActor) -> Result<String, PlanError> {
    let mut plans = Vec::new();
    for idx in 0..actor.decl.actions.len() {
        plans.push(plan_action(actor, idx)?);
    }

    let mut out = String::new();
    out.push_str(&alloc::format!(
        "// generated by actorforge {} -- do not edit\n\n",
        crate::VERSION
    ));
    out.push_str(&alloc::format!("contract {} {{\n", actor.decl.name));
    out.push_str(&alloc::format!("    bool {LOCK_VAR};\n"));
    for var in &actor.decl.state_vars {
        let ty = match var.var_type {
            fe::VarType::Map => "mapping(address => uint)".to_string(),
            other => scalar_of(other).as_str().to_string(),
        };
        out.push_str(&alloc::format!("    {ty} {};\n", var.name));
    }
    for plan in &plans {
        out.push('\n');
        out.push_str(&alloc::format!("    function {}() payable {{\n", plan.action));
        let mut push_line = |text: String| out.push_str(&alloc::format!("        {text}\n"));
        push_line(alloc::format!("require(!{});", plan.lock_var));
        push_line(alloc::format!("{} = true;", plan.lock_var));
        for require in &plan.requires {
            push_line(alloc::format!("require({});", render_expr(require)));
        }
        for (name, ty, expr) in &plan.captures {
            push_line(alloc::format!("{} {name} = {};", ty.as_str(), render_expr(expr)));
        }
        for update in &plan.updates {
            push_line(render_stmt_flat(update));
        }
        for emission in &plan.emissions {
            push_line(render_stmt_flat(emission));
        }
        push_line(alloc::format!("{} = false;", plan.lock_var));
        out.push_str("    }\n");
    }
    out.push_str("}\n");
    Ok(out)
}

// ---- round trip ----

/// Outcome of generating, re-parsing, verifying and attacking a generated
/// contract. Failures land in the report rather than erroring out.
#[derive(Debug, Clone)]
pub struct RoundtripReport {
    pub source: String,
    pub parse_ok: bool,
    pub verify_findings: Vec<crate::analyzer::Finding>,
    /// `(scenario name, victim loss)` per adversarial replay. A scenario
    /// that failed to run at all reports `None`.
    pub adversarial: Vec<(String, Option<Uint>)>,
}

impl RoundtripReport {
    pub fn pass(&self) -> bool {
        self.parse_ok
            && self.verify_findings.is_empty()
            && self
                .adversarial
                .iter()
                .all(|(_, loss)| matches!(loss, Some(l) if l.is_zero()))
    }
}

/// Generate, parse with the sequential-VM contract parser, structurally
/// verify, and replay adversarial scenarios built around the parsed output.
pub fn roundtrip_check<F>(
    actor: &ResolvedActor,
    build_scenarios: F,
) -> Result<RoundtripReport, PlanError>
where
    F: FnOnce(Arc<ContractDef>) -> Vec<(String, Scenario)>,
{
    let source = generate_contract(actor)?;
    let Ok(def) = crate::seqvm::parse_contract_source(&source, "<generated>") else {
        return Ok(RoundtripReport {
            source,
            parse_ok: false,
            verify_findings: Vec::new(),
            adversarial: Vec::new(),
        });
    };
    let verify_findings = match crate::analyzer::verify_generated(actor, &def) {
        Ok(()) => Vec::new(),
        Err(findings) => findings,
    };
    let def = Arc::new(def);
    let mut adversarial = Vec::new();
    for (name, scenario) in build_scenarios(def.clone()) {
        match crate::seqvm::run_scenario(&scenario, crate::seqvm::vm::VmConfig::default()) {
            Ok(outcome) => {
                let victims: BTreeSet<_> =
                    scenario.victims.iter().filter_map(|v| outcome.address_of(v)).collect();
                let loss = crate::seqvm::victim_loss(&outcome.trace, &victims);
                adversarial.push((name, Some(loss)));
            }
            Err(_) => adversarial.push((name, None)),
        }
    }
    Ok(RoundtripReport { source, parse_ok: true, verify_findings, adversarial })
}
