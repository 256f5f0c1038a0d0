use num_bigint::BigUint;

use super::diagnostic::{Diagnostic, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Int(BigUint),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Colon,
    Equals,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Int(v) => format!("integer {v}"),
            TokenKind::Ident(s) => format!("'{s}'"),
            TokenKind::Plus => "'+'".into(),
            TokenKind::Minus => "'-'".into(),
            TokenKind::Star => "'*'".into(),
            TokenKind::Caret => "'^'".into(),
            TokenKind::Colon => "':'".into(),
            TokenKind::Equals => "'='".into(),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
            TokenKind::Comma => "','".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Splits the source into tokens, dropping whitespace and `#` comments. The
/// final token is always `Eof`, placed just after the last real token.
pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut tokens = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '#' {
            while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                chars.next();
            }
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = start;
            while let Some(&(i, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = i + 1;
                chars.next();
            }
            let value = src[start..end].parse::<BigUint>().expect("digits");
            tokens.push(Token {
                kind: TokenKind::Int(value),
                span: Span::new(start, end),
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = start;
            while let Some(&(i, d)) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                end = i + 1;
                chars.next();
            }
            tokens.push(Token {
                kind: TokenKind::Ident(src[start..end].to_string()),
                span: Span::new(start, end),
            });
            continue;
        }
        let kind = match c {
            '+' => TokenKind::Plus,
            '-' => TokenKind::Minus,
            '*' => TokenKind::Star,
            '^' => TokenKind::Caret,
            ':' => TokenKind::Colon,
            '=' => TokenKind::Equals,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            ',' => TokenKind::Comma,
            _ => {
                let span = Span::new(start, start + c.len_utf8());
                return Err(Diagnostic::error(src, span, format!("unexpected character '{c}'")));
            }
        };
        chars.next();
        tokens.push(Token {
            kind,
            span: Span::new(start, start + 1),
        });
    }
    let end = tokens.last().map_or(0, |t| t.span.end);
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: Span::new(end, end),
    });
    Ok(tokens)
}
