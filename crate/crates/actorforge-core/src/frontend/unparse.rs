//! Render ASTs back to DSL text. `parse(unparse(parse(x)))` is structurally
//! equal to `parse(x)`; byte-level identity is not a goal.

use alloc::string::String;
use alloc::vec::Vec;

use crate::value::Uint;

use super::ast::*;

fn precedence(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
        BinOp::Add | BinOp::Sub => 4,
        BinOp::Mul | BinOp::Div => 5,
    }
}

pub(crate) fn render_uint_literal(v: &Uint) -> String {
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

pub(crate) fn render_expr(expr: &Expr) -> String {
    render_prec(expr, 0)
}

fn render_prec(expr: &Expr, min: u8) -> String {
    match expr {
        Expr::Uint(v, _) => render_uint_literal(v),
        Expr::Addr(a, _) => a.to_hex(),
        Expr::Bool(b, _) => alloc::format!("{b}"),
        Expr::Ident(name, _) => name.clone(),
        Expr::Index { map, key, .. } => alloc::format!("{map}[{}]", render_expr(key)),
        Expr::Binary { op, lhs, rhs, .. } => {
            let p = precedence(*op);
            let text = alloc::format!(
                "{} {} {}",
                render_prec(lhs, p),
                op.as_str(),
                render_prec(rhs, p + 1)
            );
            if p < min {
                alloc::format!("({text})")
            } else {
                text
            }
        }
        Expr::Not { expr, .. } => alloc::format!("!{}", render_prec(expr, 6)),
    }
}

fn render_stmt(stmt: &Stmt, out: &mut String, indent: &str) {
    match stmt {
        Stmt::Let { name, value, .. } => {
            out.push_str(&alloc::format!("{indent}let {name} = {};\n", render_expr(value)));
        }
        Stmt::Assign { name, value, .. } => {
            out.push_str(&alloc::format!("{indent}{name} = {};\n", render_expr(value)));
        }
        Stmt::MapAssign { map, key, value, .. } => {
            out.push_str(&alloc::format!(
                "{indent}{map}[{}] = {};\n",
                render_expr(key),
                render_expr(value)
            ));
        }
        Stmt::Emit { port, payload, .. } => match payload {
            EmitPayload::Request { method, value } => {
                let arg = value.as_ref().map(render_expr).unwrap_or_default();
                out.push_str(&alloc::format!("{indent}emit {port}.{method}({arg});\n"));
            }
            EmitPayload::Values(exprs) => {
                let args: Vec<String> = exprs.iter().map(render_expr).collect();
                out.push_str(&alloc::format!("{indent}emit {port}({});\n", args.join(", ")));
            }
        },
    }
}

pub fn unparse_actor(decl: &ActorDecl) -> String {
    let mut out = String::new();
    out.push_str(&alloc::format!("actor {}\n", decl.name));
    for p in &decl.inputs {
        out.push_str(&alloc::format!("  in {}: {}\n", p.name, p.token_type.as_str()));
    }
    for p in &decl.outputs {
        out.push_str(&alloc::format!("  out {}: {}\n", p.name, p.token_type.as_str()));
    }
    for v in &decl.state_vars {
        match &v.initializer {
            Some(init) => out.push_str(&alloc::format!(
                "  state {}: {} = {}\n",
                v.name,
                v.var_type.as_str(),
                render_expr(init)
            )),
            None => {
                out.push_str(&alloc::format!("  state {}: {}\n", v.name, v.var_type.as_str()))
            }
        }
    }
    for action in &decl.actions {
        out.push('\n');
        out.push_str(&alloc::format!("  action {}", action.name));
        if !action.consumes.is_empty() {
            let clauses: Vec<String> = action
                .consumes
                .iter()
                .map(|c| {
                    if c.patterns.is_empty() {
                        c.port.clone()
                    } else {
                        alloc::format!("{}({})", c.port, c.patterns.join(", "))
                    }
                })
                .collect();
            out.push_str(&alloc::format!(" on {}", clauses.join(", ")));
        }
        out.push('\n');
        if !action.guards.is_empty() {
            let guards: Vec<String> = action.guards.iter().map(render_expr).collect();
            out.push_str(&alloc::format!("    guard {}\n", guards.join(", ")));
        }
        out.push_str("  do\n");
        for stmt in &action.body {
            render_stmt(stmt, &mut out, "    ");
        }
        out.push_str("  end\n");
    }
    if let Some(fsm) = &decl.schedule {
        out.push('\n');
        out.push_str("  schedule\n");
        for t in &fsm.transitions {
            out.push_str(&alloc::format!("    {}: {} -> {};\n", t.from, t.action, t.to));
        }
        out.push_str("  end\n");
    }
    out.push_str("end\n");
    out
}

pub fn unparse_network(decl: &NetworkDecl) -> String {
    let mut out = String::new();
    out.push_str(&alloc::format!("network {}\n", decl.name));
    for (path, _) in &decl.imports {
        out.push_str(&alloc::format!("  import \"{path}\"\n"));
    }
    for inst in &decl.instances {
        match &inst.balance {
            Some(b) => out.push_str(&alloc::format!(
                "  instance {}: {} balance {}\n",
                inst.name,
                inst.actor,
                render_expr(b)
            )),
            None => out.push_str(&alloc::format!("  instance {}: {}\n", inst.name, inst.actor)),
        }
    }
    for c in &decl.connections {
        out.push_str(&alloc::format!(
            "  connect {}.{} -> {}.{}\n",
            c.from_instance,
            c.from_port,
            c.to_instance,
            c.to_port
        ));
    }
    for (v, _) in &decl.victims {
        out.push_str(&alloc::format!("  victim {v}\n"));
    }
    out.push_str("end\n");
    out
}
