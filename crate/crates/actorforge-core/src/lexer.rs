//! Lexer shared by the actor DSL, network files and the contract dialect.
//!
//! The character alphabet, literal forms and punctuation are common to all
//! three surfaces; only the keyword set differs, so `tokenize` takes it as a
//! parameter. Every token carries a span, columns are 1-based character
//! counts, and both LF and CRLF line endings are accepted.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::diag::{DiagCode, Diagnostic};
use crate::span::SourceSpan;
use crate::value::{Address, Uint};

/// Keywords of the actor DSL and network files.
pub const ACTOR_KEYWORDS: &[&str] = &[
    "actor", "in", "out", "state", "action", "guard", "do", "emit", "end", "schedule", "on",
    "let", "uint", "address", "bool", "map", "request", "transfer", "ether", "true", "false",
    "network", "import", "instance", "connect", "victim", "balance",
];

/// Keywords of the Solidity-like contract dialect.
pub const CONTRACT_KEYWORDS: &[&str] = &[
    "contract", "mapping", "uint", "address", "bool", "constructor", "fallback", "function",
    "payable", "returns", "require", "if", "else", "return", "send", "msg", "sender", "value",
    "this", "balance", "true", "false", "ether",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Punct {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Colon,
    Comma,
    Dot,
    Arrow,    // ->
    FatArrow, // =>
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    AndAnd,
    OrOr,
    Bang,
}

impl Punct {
    pub fn as_str(&self) -> &'static str {
        match self {
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::LBracket => "[",
            Punct::RBracket => "]",
            Punct::Semi => ";",
            Punct::Colon => ":",
            Punct::Comma => ",",
            Punct::Dot => ".",
            Punct::Arrow => "->",
            Punct::FatArrow => "=>",
            Punct::Assign => "=",
            Punct::EqEq => "==",
            Punct::NotEq => "!=",
            Punct::Lt => "<",
            Punct::Le => "<=",
            Punct::Gt => ">",
            Punct::Ge => ">=",
            Punct::Plus => "+",
            Punct::Minus => "-",
            Punct::Star => "*",
            Punct::Slash => "/",
            Punct::AndAnd => "&&",
            Punct::OrOr => "||",
            Punct::Bang => "!",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(String),
    Ident(String),
    Uint(Uint),
    Addr(Address),
    Str(String),
    Punct(Punct),
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Keyword(k) => alloc::format!("keyword `{k}`"),
            TokenKind::Ident(name) => alloc::format!("identifier `{name}`"),
            TokenKind::Uint(_) => "integer literal".to_string(),
            TokenKind::Addr(_) => "address literal".to_string(),
            TokenKind::Str(_) => "string literal".to_string(),
            TokenKind::Punct(p) => alloc::format!("`{}`", p.as_str()),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

struct Scanner<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    file: Arc<str>,
    line: u32,
    column: u32,
}

impl<'a> Scanner<'a> {
    fn new(source: &'a str, file: Arc<str>) -> Self {
        Scanner { chars: source.chars().peekable(), file, line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn error(&self, span: SourceSpan, message: String) -> Diagnostic {
        Diagnostic::error(DiagCode::Lex, span, message)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenize UTF-8 source text. Every character is covered by exactly one
/// token or skipped as whitespace/comment; the trailing token is `Eof`.
pub fn tokenize(source: &str, file: &str, keywords: &[&str]) -> Result<Vec<Token>, Diagnostic> {
    let file: Arc<str> = Arc::from(file);
    let mut scanner = Scanner::new(source, file);
    let mut tokens = Vec::new();

    loop {
        let Some(c) = scanner.peek() else { break };

        if c == ' ' || c == '\t' || c == '\r' || c == '\n' {
            scanner.bump();
            continue;
        }

        // Line comment.
        if c == '/' {
            let mut ahead = scanner.chars.clone();
            ahead.next();
            if ahead.peek() == Some(&'/') {
                while let Some(c) = scanner.peek() {
                    if c == '\n' {
                        break;
                    }
                    scanner.bump();
                }
                continue;
            }
        }

        let start_line = scanner.line;
        let start_col = scanner.column;
        let mk_span = |scanner: &Scanner, len: u32| {
            SourceSpan::new(scanner.file.clone(), start_line, start_col, len)
        };

        if is_ident_start(c) {
            let mut text = String::new();
            while let Some(c) = scanner.peek() {
                if is_ident_continue(c) {
                    text.push(c);
                    scanner.bump();
                } else {
                    break;
                }
            }
            let span = mk_span(&scanner, text.len() as u32);
            let kind = if keywords.contains(&text.as_str()) {
                TokenKind::Keyword(text)
            } else {
                TokenKind::Ident(text)
            };
            tokens.push(Token { kind, span });
            continue;
        }

        if c.is_ascii_digit() {
            let mut text = String::new();
            while let Some(c) = scanner.peek() {
                if c.is_ascii_digit() || c == '_' || is_ident_start(c) {
                    text.push(c);
                    scanner.bump();
                } else {
                    break;
                }
            }
            let span = mk_span(&scanner, text.len() as u32);
            // 0x-prefixed literals are addresses: exactly 40 hex digits.
            if text.starts_with("0x") || text.starts_with("0X") {
                match Address::from_hex(&text) {
                    Some(addr) => {
                        tokens.push(Token { kind: TokenKind::Addr(addr), span });
                        continue;
                    }
                    None => {
                        return Err(scanner.error(
                            span,
                            alloc::format!(
                                "malformed address literal `{text}` (expected 0x followed by 40 hex digits)"
                            ),
                        ));
                    }
                }
            }
            match Uint::from_decimal(&text) {
                Some(v) => tokens.push(Token { kind: TokenKind::Uint(v), span }),
                None => {
                    return Err(scanner
                        .error(span, alloc::format!("malformed integer literal `{text}`")));
                }
            }
            continue;
        }

        if c == '"' {
            scanner.bump();
            let mut text = String::new();
            loop {
                match scanner.peek() {
                    Some('"') => {
                        scanner.bump();
                        break;
                    }
                    Some('\n') | None => {
                        let span = mk_span(&scanner, text.len() as u32 + 1);
                        return Err(scanner.error(span, "unterminated string literal".to_string()));
                    }
                    Some(c) => {
                        text.push(c);
                        scanner.bump();
                    }
                }
            }
            let span = mk_span(&scanner, text.len() as u32 + 2);
            tokens.push(Token { kind: TokenKind::Str(text), span });
            continue;
        }

        // Punctuation; two-character forms are matched first.
        scanner.bump();
        let next = scanner.peek();
        let two = |scanner: &mut Scanner, p: Punct| {
            scanner.bump();
            Some((p, 2))
        };
        let punct = match (c, next) {
            ('-', Some('>')) => two(&mut scanner, Punct::Arrow),
            ('=', Some('>')) => two(&mut scanner, Punct::FatArrow),
            ('=', Some('=')) => two(&mut scanner, Punct::EqEq),
            ('!', Some('=')) => two(&mut scanner, Punct::NotEq),
            ('<', Some('=')) => two(&mut scanner, Punct::Le),
            ('>', Some('=')) => two(&mut scanner, Punct::Ge),
            ('&', Some('&')) => two(&mut scanner, Punct::AndAnd),
            ('|', Some('|')) => two(&mut scanner, Punct::OrOr),
            ('(', _) => Some((Punct::LParen, 1)),
            (')', _) => Some((Punct::RParen, 1)),
            ('{', _) => Some((Punct::LBrace, 1)),
            ('}', _) => Some((Punct::RBrace, 1)),
            ('[', _) => Some((Punct::LBracket, 1)),
            (']', _) => Some((Punct::RBracket, 1)),
            (';', _) => Some((Punct::Semi, 1)),
            (':', _) => Some((Punct::Colon, 1)),
            (',', _) => Some((Punct::Comma, 1)),
            ('.', _) => Some((Punct::Dot, 1)),
            ('=', _) => Some((Punct::Assign, 1)),
            ('<', _) => Some((Punct::Lt, 1)),
            ('>', _) => Some((Punct::Gt, 1)),
            ('+', _) => Some((Punct::Plus, 1)),
            ('-', _) => Some((Punct::Minus, 1)),
            ('*', _) => Some((Punct::Star, 1)),
            ('/', _) => Some((Punct::Slash, 1)),
            ('!', _) => Some((Punct::Bang, 1)),
            _ => None,
        };
        match punct {
            Some((p, len)) => {
                let span =
                    SourceSpan::new(scanner.file.clone(), start_line, start_col, len as u32);
                tokens.push(Token { kind: TokenKind::Punct(p), span });
            }
            None => {
                let span = SourceSpan::new(scanner.file.clone(), start_line, start_col, 1);
                return Err(scanner.error(span, alloc::format!("unknown character `{c}`")));
            }
        }
    }

    tokens.push(Token {
        kind: TokenKind::Eof,
        span: SourceSpan::new(scanner.file.clone(), scanner.line, scanner.column, 0),
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keywords_and_idents() {
        let tokens = tokenize("actor Dao", "t.actor", ACTOR_KEYWORDS).unwrap();
        assert_eq!(tokens[0].kind, TokenKind::Keyword("actor".into()));
        assert_eq!(tokens[1].kind, TokenKind::Ident("Dao".into()));
        assert_eq!(tokens[2].kind, TokenKind::Eof);
    }

    #[test]
    fn empty_input_is_just_eof() {
        let tokens = tokenize("", "t.actor", ACTOR_KEYWORDS).unwrap();
        assert_eq!(tokens.len(), 1);
        assert_eq!(tokens[0].kind, TokenKind::Eof);
    }

    #[test]
    fn unknown_character_has_exact_column() {
        let err = tokenize("1_000 @", "t.actor", ACTOR_KEYWORDS).unwrap_err();
        assert_eq!(err.span.line, 1);
        assert_eq!(err.span.column, 7);
        assert!(err.message.contains("unknown character"));
    }

    #[test]
    fn underscored_numbers_and_addresses() {
        let tokens = tokenize(
            "1_000 0x0000000000000000000000000000000000000001",
            "t",
            ACTOR_KEYWORDS,
        )
        .unwrap();
        assert_eq!(tokens[0].kind, TokenKind::Uint(Uint::from_u64(1000)));
        assert_eq!(tokens[1].kind, TokenKind::Addr(Address::contract(1)));
    }

    #[test]
    fn short_hex_is_rejected() {
        let err = tokenize("0x12", "t", ACTOR_KEYWORDS).unwrap_err();
        assert!(err.message.contains("malformed address"));
    }

    #[test]
    fn unterminated_string() {
        let err = tokenize("import \"dao", "t.network", ACTOR_KEYWORDS).unwrap_err();
        assert!(err.message.contains("unterminated"));
    }

    #[test]
    fn comments_and_crlf() {
        let tokens = tokenize("// hello\r\nactor X end", "t", ACTOR_KEYWORDS).unwrap();
        assert_eq!(tokens[0].kind, TokenKind::Keyword("actor".into()));
        assert_eq!(tokens[0].span.line, 2);
    }

    #[test]
    fn two_char_puncts() {
        let tokens = tokenize("-> => == != <= >= && ||", "t", ACTOR_KEYWORDS).unwrap();
        let kinds: Vec<_> = tokens
            .iter()
            .filter_map(|t| match &t.kind {
                TokenKind::Punct(p) => Some(*p),
                _ => None,
            })
            .collect();
        assert_eq!(
            kinds,
            alloc::vec![
                Punct::Arrow,
                Punct::FatArrow,
                Punct::EqEq,
                Punct::NotEq,
                Punct::Le,
                Punct::Ge,
                Punct::AndAnd,
                Punct::OrOr
            ]
        );
    }
}
