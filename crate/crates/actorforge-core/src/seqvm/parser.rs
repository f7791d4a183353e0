//! Recursive-descent parser for the contract dialect.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::diag::{DiagCode, Diagnostic};
use crate::frontend::ast::BinOp;
use crate::lexer::{tokenize, Punct, Token, TokenKind, CONTRACT_KEYWORDS};
use crate::span::SourceSpan;
use crate::value::Uint;

use super::ast::*;

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, offset: usize) -> &Token {
        &self.tokens[(self.pos + offset).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Keyword(k) if k == kw)
    }

    fn at_punct(&self, p: Punct) -> bool {
        matches!(&self.peek().kind, TokenKind::Punct(q) if *q == p)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_here(&self, expected: &str) -> Diagnostic {
        let tok = self.peek();
        Diagnostic::error(
            DiagCode::Parse,
            tok.span.clone(),
            alloc::format!("expected {}, found {}", expected, tok.kind.describe()),
        )
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<Token> {
        if self.at_keyword(kw) {
            Ok(self.bump())
        } else {
            Err(self.error_here(&alloc::format!("`{kw}`")))
        }
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<Token> {
        if self.at_punct(p) {
            Ok(self.bump())
        } else {
            Err(self.error_here(&alloc::format!("`{}`", p.as_str())))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                let span = self.bump().span;
                Ok((name, span))
            }
            _ => Err(self.error_here(what)),
        }
    }

    // ---- expressions ----

    fn parse_expr(&mut self) -> PResult<CExpr> {
        self.parse_or()
    }

    fn parse_or(&mut self) -> PResult<CExpr> {
        let mut lhs = self.parse_and()?;
        while self.at_punct(Punct::OrOr) {
            let span = self.bump().span;
            let rhs = self.parse_and()?;
            lhs = CExpr::Binary { op: BinOp::Or, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> PResult<CExpr> {
        let mut lhs = self.parse_cmp()?;
        while self.at_punct(Punct::AndAnd) {
            let span = self.bump().span;
            let rhs = self.parse_cmp()?;
            lhs = CExpr::Binary { op: BinOp::And, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn parse_cmp(&mut self) -> PResult<CExpr> {
        let lhs = self.parse_add()?;
        let op = match &self.peek().kind {
            TokenKind::Punct(Punct::EqEq) => Some(BinOp::Eq),
            TokenKind::Punct(Punct::NotEq) => Some(BinOp::Ne),
            TokenKind::Punct(Punct::Lt) => Some(BinOp::Lt),
            TokenKind::Punct(Punct::Le) => Some(BinOp::Le),
            TokenKind::Punct(Punct::Gt) => Some(BinOp::Gt),
            TokenKind::Punct(Punct::Ge) => Some(BinOp::Ge),
            _ => None,
        };
        if let Some(op) = op {
            let span = self.bump().span;
            let rhs = self.parse_add()?;
            Ok(CExpr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span })
        } else {
            Ok(lhs)
        }
    }

    fn parse_add(&mut self) -> PResult<CExpr> {
        let mut lhs = self.parse_mul()?;
        loop {
            let op = match &self.peek().kind {
                TokenKind::Punct(Punct::Plus) => BinOp::Add,
                TokenKind::Punct(Punct::Minus) => BinOp::Sub,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.parse_mul()?;
            lhs = CExpr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn parse_mul(&mut self) -> PResult<CExpr> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match &self.peek().kind {
                TokenKind::Punct(Punct::Star) => BinOp::Mul,
                TokenKind::Punct(Punct::Slash) => BinOp::Div,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.parse_unary()?;
            lhs = CExpr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<CExpr> {
        if self.at_punct(Punct::Bang) {
            let span = self.bump().span;
            let expr = self.parse_unary()?;
            return Ok(CExpr::Not { expr: Box::new(expr), span });
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> PResult<CExpr> {
        let mut expr = self.parse_primary()?;
        while self.at_punct(Punct::Dot) {
            let span = self.bump().span;
            if self.eat_keyword("balance") {
                expr = CExpr::BalanceOf { target: Box::new(expr), span };
                continue;
            }
            let (function, _) = self.expect_ident("a function name or `balance`")?;
            // Optional `{value: e}` before the argument list.
            let value = if self.eat_punct(Punct::LBrace) {
                self.expect_keyword("value")?;
                self.expect_punct(Punct::Colon)?;
                let v = self.parse_expr()?;
                self.expect_punct(Punct::RBrace)?;
                Some(Box::new(v))
            } else {
                None
            };
            self.expect_punct(Punct::LParen)?;
            let mut args = Vec::new();
            if !self.at_punct(Punct::RParen) {
                loop {
                    args.push(self.parse_expr()?);
                    if !self.eat_punct(Punct::Comma) {
                        break;
                    }
                }
            }
            self.expect_punct(Punct::RParen)?;
            expr = CExpr::ExtCall { target: Box::new(expr), function, value, args, span };
        }
        Ok(expr)
    }

    fn parse_primary(&mut self) -> PResult<CExpr> {
        match self.peek().kind.clone() {
            TokenKind::Uint(v) => {
                let span = self.bump().span;
                if self.at_keyword("ether") {
                    let suffix = self.bump();
                    let scaled = v.checked_mul(&Uint::ether(1)).map_err(|_| {
                        Diagnostic::error(
                            DiagCode::Parse,
                            suffix.span.clone(),
                            "ether literal does not fit in 256 bits".to_string(),
                        )
                    })?;
                    Ok(CExpr::Uint(scaled, span))
                } else {
                    Ok(CExpr::Uint(v, span))
                }
            }
            TokenKind::Addr(a) => {
                let span = self.bump().span;
                Ok(CExpr::Addr(a, span))
            }
            TokenKind::Keyword(k) if k == "true" || k == "false" => {
                let span = self.bump().span;
                Ok(CExpr::Bool(k == "true", span))
            }
            TokenKind::Keyword(k) if k == "msg" => {
                let span = self.bump().span;
                self.expect_punct(Punct::Dot)?;
                if self.eat_keyword("sender") {
                    Ok(CExpr::MsgSender(span))
                } else if self.eat_keyword("value") {
                    Ok(CExpr::MsgValue(span))
                } else {
                    Err(self.error_here("`sender` or `value`"))
                }
            }
            TokenKind::Keyword(k) if k == "address" => {
                let span = self.bump().span;
                self.expect_punct(Punct::LParen)?;
                self.expect_keyword("this")?;
                self.expect_punct(Punct::RParen)?;
                Ok(CExpr::SelfAddr(span))
            }
            TokenKind::Ident(name) => {
                let span = self.bump().span;
                if self.at_punct(Punct::LBracket) {
                    self.bump();
                    let key = self.parse_expr()?;
                    self.expect_punct(Punct::RBracket)?;
                    Ok(CExpr::Index { map: name, key: Box::new(key), span })
                } else {
                    Ok(CExpr::Ident(name, span))
                }
            }
            TokenKind::Punct(Punct::LParen) => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect_punct(Punct::RParen)?;
                Ok(inner)
            }
            _ => Err(self.error_here("an expression")),
        }
    }

    // ---- statements ----

    fn parse_scalar_type(&mut self) -> PResult<CVarType> {
        if self.eat_keyword("uint") {
            Ok(CVarType::Uint)
        } else if self.eat_keyword("address") {
            Ok(CVarType::Address)
        } else if self.eat_keyword("bool") {
            Ok(CVarType::Bool)
        } else {
            Err(self.error_here("a type (`uint`, `address`, `bool`)"))
        }
    }

    fn parse_block(&mut self) -> PResult<Vec<CStmt>> {
        self.expect_punct(Punct::LBrace)?;
        let mut body = Vec::new();
        while !self.at_punct(Punct::RBrace) {
            if matches!(self.peek().kind, TokenKind::Eof) {
                return Err(self.error_here("`}`"));
            }
            body.push(self.parse_stmt()?);
        }
        self.expect_punct(Punct::RBrace)?;
        Ok(body)
    }

    fn parse_stmt(&mut self) -> PResult<CStmt> {
        // Local declaration: `uint x = e;`
        if self.at_keyword("uint") || self.at_keyword("bool")
            || (self.at_keyword("address")
                && matches!(self.peek_at(1).kind, TokenKind::Ident(_)))
        {
            let span = self.peek().span.clone();
            let ty = self.parse_scalar_type()?;
            let (name, _) = self.expect_ident("a local name")?;
            self.expect_punct(Punct::Assign)?;
            let init = self.parse_expr()?;
            self.expect_punct(Punct::Semi)?;
            return Ok(CStmt::Local { ty, name, init, span });
        }
        if self.at_keyword("require") {
            let span = self.bump().span;
            self.expect_punct(Punct::LParen)?;
            let cond = self.parse_expr()?;
            self.expect_punct(Punct::RParen)?;
            self.expect_punct(Punct::Semi)?;
            return Ok(CStmt::Require { cond, span });
        }
        if self.at_keyword("if") {
            let span = self.bump().span;
            self.expect_punct(Punct::LParen)?;
            let cond = self.parse_expr()?;
            self.expect_punct(Punct::RParen)?;
            let then_branch = self.parse_block()?;
            let else_branch =
                if self.eat_keyword("else") { self.parse_block()? } else { Vec::new() };
            return Ok(CStmt::If { cond, then_branch, else_branch, span });
        }
        if self.at_keyword("return") {
            let span = self.bump().span;
            let value =
                if self.at_punct(Punct::Semi) { None } else { Some(self.parse_expr()?) };
            self.expect_punct(Punct::Semi)?;
            return Ok(CStmt::Return { value, span });
        }
        if self.at_keyword("send") {
            let span = self.bump().span;
            self.expect_punct(Punct::LParen)?;
            let to = self.parse_expr()?;
            self.expect_punct(Punct::Comma)?;
            let amount = self.parse_expr()?;
            self.expect_punct(Punct::RParen)?;
            self.expect_punct(Punct::Semi)?;
            return Ok(CStmt::Send { to, amount, span });
        }
        // Assignment or call statement, both starting at an identifier (or
        // `address(this)`-rooted call expressions).
        if let TokenKind::Ident(name) = self.peek().kind.clone() {
            let span = self.peek().span.clone();
            if matches!(self.peek_at(1).kind, TokenKind::Punct(Punct::Assign)) {
                self.bump();
                self.bump();
                let value = self.parse_expr()?;
                self.expect_punct(Punct::Semi)?;
                return Ok(CStmt::Assign { name, value, span });
            }
            if matches!(self.peek_at(1).kind, TokenKind::Punct(Punct::LBracket)) {
                // Look ahead past the bracketed key for `=`.
                let mut depth = 0usize;
                let mut offset = 1;
                loop {
                    match &self.peek_at(offset).kind {
                        TokenKind::Punct(Punct::LBracket) => depth += 1,
                        TokenKind::Punct(Punct::RBracket) => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        TokenKind::Eof => return Err(self.error_here("`]`")),
                        _ => {}
                    }
                    offset += 1;
                }
                if matches!(self.peek_at(offset + 1).kind, TokenKind::Punct(Punct::Assign)) {
                    self.bump(); // name
                    self.bump(); // [
                    let key = self.parse_expr()?;
                    self.expect_punct(Punct::RBracket)?;
                    self.expect_punct(Punct::Assign)?;
                    let value = self.parse_expr()?;
                    self.expect_punct(Punct::Semi)?;
                    return Ok(CStmt::MapAssign { map: name, key, value, span });
                }
            }
        }
        let span = self.peek().span.clone();
        let expr = self.parse_expr()?;
        self.expect_punct(Punct::Semi)?;
        if matches!(expr, CExpr::ExtCall { .. }) {
            Ok(CStmt::CallStmt { call: expr, span })
        } else {
            Err(Diagnostic::error(
                DiagCode::Parse,
                span,
                "only external calls can stand alone as statements".to_string(),
            ))
        }
    }

    // ---- contract members ----

    fn parse_params(&mut self) -> PResult<Vec<(String, CVarType)>> {
        self.expect_punct(Punct::LParen)?;
        let mut params = Vec::new();
        if !self.at_punct(Punct::RParen) {
            loop {
                let ty = self.parse_scalar_type()?;
                let (name, _) = self.expect_ident("a parameter name")?;
                params.push((name, ty));
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        self.expect_punct(Punct::RParen)?;
        Ok(params)
    }

    fn parse_contract(&mut self) -> PResult<ContractDef> {
        let start = self.expect_keyword("contract")?;
        let (name, _) = self.expect_ident("a contract name")?;
        self.expect_punct(Punct::LBrace)?;
        let mut def = ContractDef {
            name,
            state_vars: Vec::new(),
            constructor: None,
            fallback: None,
            functions: Vec::new(),
            span: start.span,
        };
        while !self.at_punct(Punct::RBrace) {
            if matches!(self.peek().kind, TokenKind::Eof) {
                return Err(self.error_here("`}`"));
            }
            if self.at_keyword("mapping") {
                let span = self.bump().span;
                self.expect_punct(Punct::LParen)?;
                self.expect_keyword("address")?;
                self.expect_punct(Punct::FatArrow)?;
                self.expect_keyword("uint")?;
                self.expect_punct(Punct::RParen)?;
                let (vname, _) = self.expect_ident("a state variable name")?;
                self.expect_punct(Punct::Semi)?;
                def.state_vars.push(CStateVar { name: vname, ty: CVarType::Map, span });
                continue;
            }
            if self.at_keyword("uint") || self.at_keyword("bool") || self.at_keyword("address") {
                let span = self.peek().span.clone();
                let ty = self.parse_scalar_type()?;
                let (vname, _) = self.expect_ident("a state variable name")?;
                self.expect_punct(Punct::Semi)?;
                def.state_vars.push(CStateVar { name: vname, ty, span });
                continue;
            }
            if self.at_keyword("constructor") {
                let span = self.bump().span;
                let params = self.parse_params()?;
                let body = self.parse_block()?;
                if def.constructor.is_some() {
                    return Err(Diagnostic::error(
                        DiagCode::Parse,
                        span,
                        "duplicate constructor".to_string(),
                    ));
                }
                def.constructor = Some(CFunction {
                    name: "constructor".to_string(),
                    params,
                    payable: true,
                    returns: None,
                    body,
                    span,
                });
                continue;
            }
            if self.at_keyword("fallback") {
                let span = self.bump().span;
                self.expect_punct(Punct::LParen)?;
                self.expect_punct(Punct::RParen)?;
                let payable = self.eat_keyword("payable");
                let body = self.parse_block()?;
                if def.fallback.is_some() {
                    return Err(Diagnostic::error(
                        DiagCode::Parse,
                        span,
                        "duplicate fallback".to_string(),
                    ));
                }
                def.fallback = Some(CFunction {
                    name: "fallback".to_string(),
                    params: Vec::new(),
                    payable,
                    returns: None,
                    body,
                    span,
                });
                continue;
            }
            if self.at_keyword("function") {
                let span = self.bump().span;
                let (fname, _) = self.expect_ident("a function name")?;
                let params = self.parse_params()?;
                let payable = self.eat_keyword("payable");
                let returns = if self.eat_keyword("returns") {
                    self.expect_punct(Punct::LParen)?;
                    let ty = self.parse_scalar_type()?;
                    self.expect_punct(Punct::RParen)?;
                    Some(ty)
                } else {
                    None
                };
                let body = self.parse_block()?;
                def.functions.push(CFunction { name: fname, params, payable, returns, body, span });
                continue;
            }
            return Err(self.error_here(
                "a contract member (state variable, `constructor`, `fallback`, `function`)",
            ));
        }
        self.expect_punct(Punct::RBrace)?;
        Ok(def)
    }
}

/// Parse a source file containing one or more contracts.
pub fn parse_contracts(source: &str, file: &str) -> Result<Vec<ContractDef>, Diagnostic> {
    let tokens = tokenize(source, file, CONTRACT_KEYWORDS)?;
    let mut parser = Parser { tokens, pos: 0 };
    let mut contracts = Vec::new();
    while !matches!(parser.peek().kind, TokenKind::Eof) {
        contracts.push(parser.parse_contract()?);
    }
    Ok(contracts)
}

/// Parse a file expected to hold exactly one contract.
pub fn parse_contract_source(source: &str, file: &str) -> Result<ContractDef, Diagnostic> {
    let mut contracts = parse_contracts(source, file)?;
    match contracts.len() {
        1 => Ok(contracts.remove(0)),
        n => Err(Diagnostic::error(
            DiagCode::Parse,
            SourceSpan::new(alloc::sync::Arc::from(file), 1, 1, 0),
            alloc::format!("expected exactly one contract in this file, found {n}"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vulnerable_dao_shape() {
        let src = include_str!("../../../../fixtures/contracts/dao_vulnerable.sol.txt");
        let def = parse_contract_source(src, "dao_vulnerable.sol.txt").unwrap();
        assert_eq!(def.name, "Dao");
        assert_eq!(def.state_vars.len(), 1);
        assert_eq!(def.functions.len(), 3);
        assert!(def.fallback.is_none());
        let withdraw = def.function("withdraw").unwrap();
        assert!(matches!(withdraw.body[0], CStmt::Require { .. }));
        assert!(matches!(withdraw.body[1], CStmt::Send { .. }));
        assert!(matches!(withdraw.body[2], CStmt::MapAssign { .. }));
    }

    #[test]
    fn attacker_shape() {
        let src = include_str!("../../../../fixtures/contracts/attacker.sol.txt");
        let def = parse_contract_source(src, "attacker.sol.txt").unwrap();
        assert!(def.constructor.is_some());
        let fallback = def.fallback.as_ref().unwrap();
        assert!(fallback.payable);
        match &fallback.body[0] {
            CStmt::If { cond, then_branch, .. } => {
                assert!(matches!(cond, CExpr::Binary { .. }));
                assert!(matches!(then_branch[0], CStmt::CallStmt { .. }));
            }
            other => panic!("unexpected stmt {other:?}"),
        }
        let attack = def.function("attack").unwrap();
        match &attack.body[0] {
            CStmt::CallStmt { call: CExpr::ExtCall { function, value, .. }, .. } => {
                assert_eq!(function, "deposit");
                assert!(value.is_some());
            }
            other => panic!("unexpected stmt {other:?}"),
        }
    }

    #[test]
    fn ether_literal_scales() {
        let src = "contract C { function f() { require(msg.value >= 1 ether); } }";
        let def = parse_contract_source(src, "c.sol.txt").unwrap();
        match &def.functions[0].body[0] {
            CStmt::Require { cond: CExpr::Binary { rhs, .. }, .. } => match rhs.as_ref() {
                CExpr::Uint(v, _) => assert_eq!(v.to_decimal(), "1000000000000000000"),
                other => panic!("unexpected rhs {other:?}"),
            },
            other => panic!("unexpected stmt {other:?}"),
        }
    }

    #[test]
    fn bare_non_call_expression_statement_is_rejected() {
        let src = "contract C { function f() { msg.value; } }";
        assert!(parse_contract_source(src, "c.sol.txt").is_err());
    }
}
