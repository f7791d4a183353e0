//! Recursive-descent parser for `.actor` and `.network` files.
//!
//! The grammar is LL(1): sections are keyword-introduced (`actor`, `in`,
//! `out`, `state`, `action`, `guard`, `do`, `emit`, `end`, `schedule`),
//! comments are `//` to end of line, identifiers are
//! `[A-Za-z_][A-Za-z0-9_]*`. An `ether` suffix on an integer literal
//! multiplies by 10^18 at parse time, so paper-style amounts stay exact.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::diag::{DiagCode, Diagnostic};
use crate::lexer::{tokenize, Punct, Token, TokenKind, ACTOR_KEYWORDS};
use crate::span::SourceSpan;
use crate::value::Uint;

use super::ast::*;

pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    pub fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, pos: 0 }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
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

    fn parse_expr(&mut self) -> PResult<Expr> {
        self.parse_or()
    }

    fn parse_or(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_and()?;
        while self.at_punct(Punct::OrOr) {
            let span = self.bump().span;
            let rhs = self.parse_and()?;
            lhs = Expr::Binary { op: BinOp::Or, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_cmp()?;
        while self.at_punct(Punct::AndAnd) {
            let span = self.bump().span;
            let rhs = self.parse_cmp()?;
            lhs = Expr::Binary { op: BinOp::And, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn parse_cmp(&mut self) -> PResult<Expr> {
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
            Ok(Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span })
        } else {
            Ok(lhs)
        }
    }

    fn parse_add(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_mul()?;
        loop {
            let op = match &self.peek().kind {
                TokenKind::Punct(Punct::Plus) => BinOp::Add,
                TokenKind::Punct(Punct::Minus) => BinOp::Sub,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.parse_mul()?;
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn parse_mul(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match &self.peek().kind {
                TokenKind::Punct(Punct::Star) => BinOp::Mul,
                TokenKind::Punct(Punct::Slash) => BinOp::Div,
                _ => break,
            };
            let span = self.bump().span;
            let rhs = self.parse_unary()?;
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs), span };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        if self.at_punct(Punct::Bang) {
            let span = self.bump().span;
            let expr = self.parse_unary()?;
            return Ok(Expr::Not { expr: Box::new(expr), span });
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
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
                    Ok(Expr::Uint(scaled, span))
                } else {
                    Ok(Expr::Uint(v, span))
                }
            }
            TokenKind::Addr(a) => {
                let span = self.bump().span;
                Ok(Expr::Addr(a, span))
            }
            TokenKind::Keyword(k) if k == "true" || k == "false" => {
                let span = self.bump().span;
                Ok(Expr::Bool(k == "true", span))
            }
            TokenKind::Ident(name) => {
                let span = self.bump().span;
                if self.eat_punct(Punct::LBracket) {
                    let key = self.parse_expr()?;
                    self.expect_punct(Punct::RBracket)?;
                    Ok(Expr::Index { map: name, key: Box::new(key), span })
                } else {
                    Ok(Expr::Ident(name, span))
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

    // ---- actor files ----

    fn parse_token_type(&mut self) -> PResult<TokenType> {
        for (kw, ty) in [
            ("uint", TokenType::Uint),
            ("address", TokenType::Address),
            ("bool", TokenType::Bool),
            ("request", TokenType::Request),
            ("transfer", TokenType::Transfer),
        ] {
            if self.eat_keyword(kw) {
                return Ok(ty);
            }
        }
        Err(self.error_here("a token type (`uint`, `address`, `bool`, `request` or `transfer`)"))
    }

    fn parse_var_type(&mut self) -> PResult<VarType> {
        if self.eat_keyword("uint") {
            return Ok(VarType::Uint);
        }
        if self.eat_keyword("address") {
            return Ok(VarType::Address);
        }
        if self.eat_keyword("bool") {
            return Ok(VarType::Bool);
        }
        if self.eat_keyword("map") {
            self.expect_punct(Punct::LParen)?;
            self.expect_keyword("address")?;
            self.expect_punct(Punct::Arrow)?;
            self.expect_keyword("uint")?;
            self.expect_punct(Punct::RParen)?;
            return Ok(VarType::Map);
        }
        Err(self.error_here("a variable type (`uint`, `address`, `bool` or `map(address -> uint)`)"))
    }

    fn parse_consume_clause(&mut self) -> PResult<ConsumeClause> {
        let (port, span) = self.expect_ident("a port name")?;
        let mut patterns = Vec::new();
        if self.eat_punct(Punct::LParen) {
            loop {
                let (name, _) = self.expect_ident("a pattern variable")?;
                patterns.push(name);
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
            self.expect_punct(Punct::RParen)?;
        }
        Ok(ConsumeClause { port, patterns, span })
    }

    fn parse_stmt(&mut self) -> PResult<Stmt> {
        if self.at_keyword("let") {
            let span = self.bump().span;
            let (name, _) = self.expect_ident("a local name")?;
            self.expect_punct(Punct::Assign)?;
            let value = self.parse_expr()?;
            self.expect_punct(Punct::Semi)?;
            return Ok(Stmt::Let { name, value, span });
        }
        if self.at_keyword("emit") {
            let span = self.bump().span;
            let (port, _) = self.expect_ident("an output port name")?;
            let payload = if self.eat_punct(Punct::Dot) {
                let (method, _) = self.expect_ident("a method name")?;
                self.expect_punct(Punct::LParen)?;
                let value =
                    if self.at_punct(Punct::RParen) { None } else { Some(self.parse_expr()?) };
                self.expect_punct(Punct::RParen)?;
                EmitPayload::Request { method, value }
            } else {
                self.expect_punct(Punct::LParen)?;
                let mut exprs = Vec::new();
                if !self.at_punct(Punct::RParen) {
                    loop {
                        exprs.push(self.parse_expr()?);
                        if !self.eat_punct(Punct::Comma) {
                            break;
                        }
                    }
                }
                self.expect_punct(Punct::RParen)?;
                EmitPayload::Values(exprs)
            };
            self.expect_punct(Punct::Semi)?;
            return Ok(Stmt::Emit { port, payload, span });
        }
        let (name, span) = self.expect_ident("a statement")?;
        if self.eat_punct(Punct::LBracket) {
            let key = self.parse_expr()?;
            self.expect_punct(Punct::RBracket)?;
            self.expect_punct(Punct::Assign)?;
            let value = self.parse_expr()?;
            self.expect_punct(Punct::Semi)?;
            return Ok(Stmt::MapAssign { map: name, key, value, span });
        }
        self.expect_punct(Punct::Assign)?;
        let value = self.parse_expr()?;
        self.expect_punct(Punct::Semi)?;
        Ok(Stmt::Assign { name, value, span })
    }

    fn parse_action(&mut self, span: SourceSpan) -> PResult<ActionDecl> {
        let (name, _) = self.expect_ident("an action name")?;
        let mut consumes = Vec::new();
        if self.eat_keyword("on") {
            loop {
                consumes.push(self.parse_consume_clause()?);
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        let mut guards = Vec::new();
        if self.eat_keyword("guard") {
            loop {
                guards.push(self.parse_expr()?);
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        self.expect_keyword("do")?;
        let mut body = Vec::new();
        while !self.at_keyword("end") {
            if matches!(self.peek().kind, TokenKind::Eof) {
                return Err(self.error_here("`end`"));
            }
            body.push(self.parse_stmt()?);
        }
        self.expect_keyword("end")?;
        Ok(ActionDecl { name, consumes, guards, body, span })
    }

    fn parse_schedule(&mut self, span: SourceSpan) -> PResult<FsmDecl> {
        let mut transitions = Vec::new();
        while !self.at_keyword("end") {
            if matches!(self.peek().kind, TokenKind::Eof) {
                return Err(self.error_here("`end`"));
            }
            let (from, tspan) = self.expect_ident("a schedule state")?;
            self.expect_punct(Punct::Colon)?;
            let (action, _) = self.expect_ident("an action name")?;
            self.expect_punct(Punct::Arrow)?;
            let (to, _) = self.expect_ident("a schedule state")?;
            self.expect_punct(Punct::Semi)?;
            transitions.push(FsmTransition { from, action, to, span: tspan });
        }
        self.expect_keyword("end")?;
        if transitions.is_empty() {
            return Err(Diagnostic::error(
                DiagCode::Parse,
                span,
                "schedule must declare at least one transition".to_string(),
            ));
        }
        Ok(FsmDecl { transitions, span })
    }

    pub fn parse_actor_decl(&mut self) -> PResult<ActorDecl> {
        let start = self.expect_keyword("actor")?;
        let (name, _) = self.expect_ident("an actor name")?;
        let mut decl = ActorDecl {
            name,
            inputs: Vec::new(),
            outputs: Vec::new(),
            state_vars: Vec::new(),
            actions: Vec::new(),
            schedule: None,
            span: start.span,
        };
        loop {
            if self.eat_keyword("end") {
                break;
            }
            if self.at_keyword("in") || self.at_keyword("out") {
                let dir_tok = self.bump();
                let direction = if matches!(&dir_tok.kind, TokenKind::Keyword(k) if k == "in") {
                    Direction::Input
                } else {
                    Direction::Output
                };
                let (pname, pspan) = self.expect_ident("a port name")?;
                self.expect_punct(Punct::Colon)?;
                let token_type = self.parse_token_type()?;
                let port = PortDecl { name: pname, direction, token_type, span: pspan };
                match direction {
                    Direction::Input => decl.inputs.push(port),
                    Direction::Output => decl.outputs.push(port),
                }
                continue;
            }
            if self.at_keyword("state") {
                self.bump();
                let (vname, vspan) = self.expect_ident("a state variable name")?;
                self.expect_punct(Punct::Colon)?;
                let var_type = self.parse_var_type()?;
                let initializer =
                    if self.eat_punct(Punct::Assign) { Some(self.parse_expr()?) } else { None };
                decl.state_vars.push(StateVarDecl {
                    name: vname,
                    var_type,
                    initializer,
                    span: vspan,
                });
                continue;
            }
            if self.at_keyword("action") {
                let span = self.bump().span;
                decl.actions.push(self.parse_action(span)?);
                continue;
            }
            if self.at_keyword("schedule") {
                let span = self.bump().span;
                if decl.schedule.is_some() {
                    return Err(Diagnostic::error(
                        DiagCode::Parse,
                        span,
                        "duplicate schedule section".to_string(),
                    ));
                }
                decl.schedule = Some(self.parse_schedule(span)?);
                continue;
            }
            return Err(self.error_here(
                "a section (`in`, `out`, `state`, `action`, `schedule`) or `end`",
            ));
        }
        Ok(decl)
    }

    // ---- network files ----

    pub fn parse_network_decl(&mut self) -> PResult<NetworkDecl> {
        let start = self.expect_keyword("network")?;
        let (name, _) = self.expect_ident("a network name")?;
        let mut decl = NetworkDecl {
            name,
            imports: Vec::new(),
            instances: Vec::new(),
            connections: Vec::new(),
            victims: Vec::new(),
            span: start.span,
        };
        loop {
            if self.eat_keyword("end") {
                break;
            }
            if self.at_keyword("import") {
                self.bump();
                match self.peek().kind.clone() {
                    TokenKind::Str(path) => {
                        let span = self.bump().span;
                        decl.imports.push((path, span));
                    }
                    _ => return Err(self.error_here("a quoted file path")),
                }
                continue;
            }
            if self.at_keyword("instance") {
                self.bump();
                let (iname, ispan) = self.expect_ident("an instance name")?;
                self.expect_punct(Punct::Colon)?;
                let (actor, _) = self.expect_ident("an actor name")?;
                let balance =
                    if self.eat_keyword("balance") { Some(self.parse_expr()?) } else { None };
                decl.instances.push(InstanceDecl { name: iname, actor, balance, span: ispan });
                continue;
            }
            if self.at_keyword("connect") {
                self.bump();
                let (from_instance, cspan) = self.expect_ident("an instance name")?;
                self.expect_punct(Punct::Dot)?;
                let (from_port, _) = self.expect_ident("a port name")?;
                self.expect_punct(Punct::Arrow)?;
                let (to_instance, _) = self.expect_ident("an instance name")?;
                self.expect_punct(Punct::Dot)?;
                let (to_port, _) = self.expect_ident("a port name")?;
                decl.connections.push(ConnectDecl {
                    from_instance,
                    from_port,
                    to_instance,
                    to_port,
                    span: cspan,
                });
                continue;
            }
            if self.at_keyword("victim") {
                self.bump();
                let (vname, vspan) = self.expect_ident("an instance name")?;
                decl.victims.push((vname, vspan));
                continue;
            }
            return Err(self.error_here(
                "an item (`import`, `instance`, `connect`, `victim`) or `end`",
            ));
        }
        Ok(decl)
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if matches!(self.peek().kind, TokenKind::Eof) {
            Ok(())
        } else {
            Err(self.error_here("end of input"))
        }
    }
}

/// Parse an actor declaration from a token stream.
pub fn parse_actor(tokens: Vec<Token>) -> Result<ActorDecl, Diagnostic> {
    let mut parser = Parser::new(tokens);
    let decl = parser.parse_actor_decl()?;
    parser.expect_eof()?;
    Ok(decl)
}

/// Tokenize and parse an `.actor` file.
pub fn parse_actor_source(source: &str, file: &str) -> Result<ActorDecl, Diagnostic> {
    let tokens = tokenize(source, file, ACTOR_KEYWORDS)?;
    parse_actor(tokens)
}

/// Parse a network declaration from a token stream.
pub fn parse_network(tokens: Vec<Token>) -> Result<NetworkDecl, Diagnostic> {
    let mut parser = Parser::new(tokens);
    let decl = parser.parse_network_decl()?;
    parser.expect_eof()?;
    Ok(decl)
}

/// Tokenize and parse a `.network` file.
pub fn parse_network_source(source: &str, file: &str) -> Result<NetworkDecl, Diagnostic> {
    let tokens = tokenize(source, file, ACTOR_KEYWORDS)?;
    parse_network(tokens)
}
