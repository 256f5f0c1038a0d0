use lincong::{GfPoly, PrimeField};
use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::diagnostic::{Diagnostic, Span};
use super::lexer::{lex, Token, TokenKind};
use super::{Congruence, Mode, Restriction, Spanned, SystemDocument, Term, Value};

/// Largest exponent accepted after `^`.
const MAX_EXPONENT: u32 = 4096;

type PResult<T> = Result<T, Diagnostic>;

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    mode: Mode,
}

fn is_variable(name: &str) -> bool {
    name.len() > 1 && name.starts_with('x') && name[1..].bytes().all(|b| b.is_ascii_digit())
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Token {
        &self.tokens[(self.pos + offset).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, span: Span, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic::error(self.src, span, message))
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        let t = self.peek();
        self.error(t.span, format!("expected {expected}, found {}", t.kind.describe()))
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> PResult<Span> {
        if self.peek().kind == kind {
            Ok(self.bump().span)
        } else {
            self.unexpected(expected)
        }
    }

    fn at_ident(&self, name: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s == name)
    }

    fn next_is_variable(&self, offset: usize) -> bool {
        matches!(&self.peek_at(offset).kind, TokenKind::Ident(s) if is_variable(s))
    }

    // header := "field" "GF" "(" integer ")"
    fn header(&mut self) -> PResult<()> {
        let start = self.bump().span;
        match &self.peek().kind {
            TokenKind::Ident(s) if s == "GF" => {
                self.bump();
            }
            _ => return self.unexpected("'GF' after 'field'"),
        }
        self.expect(TokenKind::LParen, "'(' after 'GF'")?;
        let tok = self.bump();
        let TokenKind::Int(p) = tok.kind else {
            return self.error(tok.span, format!("expected the field size, found {}", tok.kind.describe()));
        };
        let field = match p.to_u64().map(PrimeField::new) {
            Some(Ok(f)) => f,
            Some(Err(lincong::Error::NotPrime(_))) => {
                return self.error(tok.span, format!("field size {p} is not prime"));
            }
            _ => return self.error(tok.span, format!("field size {p} is too large")),
        };
        let end = self.expect(TokenKind::RParen, "')' to close the field size")?;
        if matches!(self.mode, Mode::Polynomial(_)) {
            return self.error(start.to(end), "duplicate field header");
        }
        self.mode = Mode::Polynomial(field);
        Ok(())
    }

    fn constant(&self, v: BigInt) -> Value {
        match self.mode {
            Mode::Integer => Value::Int(v),
            Mode::Polynomial(f) => Value::Poly(GfPoly::constant(f, f.reduce_big(&v))),
        }
    }

    fn add(&self, a: Value, b: Value, negate: bool) -> Value {
        match (a, b) {
            (Value::Int(a), Value::Int(b)) => Value::Int(if negate { a - b } else { a + b }),
            (Value::Poly(a), Value::Poly(b)) => Value::Poly(if negate { &a - &b } else { &a + &b }),
            _ => unreachable!("mixed modes"),
        }
    }

    fn mul(&self, a: Value, b: Value) -> Value {
        match (a, b) {
            (Value::Int(a), Value::Int(b)) => Value::Int(a * b),
            (Value::Poly(a), Value::Poly(b)) => Value::Poly(&a * &b),
            _ => unreachable!("mixed modes"),
        }
    }

    fn neg(&self, a: Value) -> Value {
        match a {
            Value::Int(a) => Value::Int(-a),
            Value::Poly(a) => Value::Poly(-&a),
        }
    }

    // expr := ("+"|"-")? product (("+"|"-") product)*
    fn expr(&mut self) -> PResult<Spanned<Value>> {
        let start = self.peek().span;
        let negate = match self.peek().kind {
            TokenKind::Minus => {
                self.bump();
                true
            }
            TokenKind::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let first = self.product()?;
        let mut span = start.to(first.span);
        let mut value = if negate { self.neg(first.value) } else { first.value };
        loop {
            let minus = match self.peek().kind {
                TokenKind::Plus => false,
                TokenKind::Minus => true,
                _ => break,
            };
            self.bump();
            let rhs = self.product()?;
            span = span.to(rhs.span);
            value = self.add(value, rhs.value, minus);
        }
        Ok(Spanned::new(value, span))
    }

    // product := power ("*" power)*, stopping before "*" variable
    fn product(&mut self) -> PResult<Spanned<Value>> {
        let first = self.power()?;
        let mut span = first.span;
        let mut value = first.value;
        while self.peek().kind == TokenKind::Star && !self.next_is_variable(1) {
            self.bump();
            let rhs = self.power()?;
            span = span.to(rhs.span);
            value = self.mul(value, rhs.value);
        }
        Ok(Spanned::new(value, span))
    }

    // power := atom ("^" integer)?
    fn power(&mut self) -> PResult<Spanned<Value>> {
        let base = self.atom()?;
        if self.peek().kind != TokenKind::Caret {
            return Ok(base);
        }
        self.bump();
        let tok = self.bump();
        let TokenKind::Int(e) = &tok.kind else {
            return self.error(tok.span, format!("expected an exponent, found {}", tok.kind.describe()));
        };
        let e = match e.to_u32() {
            Some(e) if e <= MAX_EXPONENT => e,
            _ => return self.error(tok.span, format!("exponent {e} is larger than {MAX_EXPONENT}")),
        };
        let value = match base.value {
            Value::Int(b) => Value::Int(Pow::pow(b, e)),
            Value::Poly(b) => Value::Poly(b.pow(e)),
        };
        Ok(Spanned::new(value, base.span.to(tok.span)))
    }

    // atom := integer | "t" | "(" expr ")"
    fn atom(&mut self) -> PResult<Spanned<Value>> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Int(v) => {
                self.bump();
                Ok(Spanned::new(self.constant(BigInt::from(v.clone())), tok.span))
            }
            TokenKind::Ident(s) if s == "t" => match self.mode {
                Mode::Polynomial(f) => {
                    self.bump();
                    Ok(Spanned::new(Value::Poly(GfPoly::t(f)), tok.span))
                }
                Mode::Integer => self.error(tok.span, "'t' needs a 'field GF(p)' header"),
            },
            TokenKind::Ident(s) if is_variable(s) => {
                self.error(tok.span, format!("variable {s} is not allowed in a constant expression"))
            }
            TokenKind::Ident(s) if s != "mod" && s != "gcd" => {
                self.error(tok.span, format!("unknown name '{s}'"))
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.expr()?;
                let end = self.expect(TokenKind::RParen, "')'")?;
                Ok(Spanned::new(inner.value, tok.span.to(end)))
            }
            _ => {
                let what = match self.mode {
                    Mode::Integer => "an integer or '('",
                    Mode::Polynomial(_) => "an integer, 't' or '('",
                };
                self.unexpected(what)
            }
        }
    }

    fn variable(&mut self) -> PResult<Spanned<String>> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Ident(s) if is_variable(s) => {
                self.bump();
                Ok(Spanned::new(s.clone(), tok.span))
            }
            TokenKind::Ident(s) if s != "t" => {
                self.error(tok.span, format!("'{s}' is not a variable name (expected x1, x2, ...)"))
            }
            _ => self.unexpected("a variable"),
        }
    }

    // term := (product "*")? variable
    fn term(&mut self, negate: bool) -> PResult<Term> {
        let start = self.peek().span;
        let coefficient = if self.next_is_variable(0) {
            Spanned::new(self.constant(BigInt::one()), start)
        } else {
            let c = self.product()?;
            self.expect(TokenKind::Star, "'*' between coefficient and variable")?;
            c
        };
        let variable = self.variable()?;
        let coefficient = if negate {
            Spanned::new(self.neg(coefficient.value), coefficient.span)
        } else {
            coefficient
        };
        Ok(Term { coefficient, variable })
    }

    // linear := ("+"|"-")? term (("+"|"-") term)*
    fn linear(&mut self) -> PResult<Vec<Term>> {
        let mut negate = match self.peek().kind {
            TokenKind::Minus => {
                self.bump();
                true
            }
            TokenKind::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let mut terms: Vec<Term> = Vec::new();
        loop {
            let term = self.term(negate)?;
            if terms.iter().any(|t| t.variable.value == term.variable.value) {
                return self.error(
                    term.variable.span,
                    format!("variable {} appears twice in one congruence", term.variable.value),
                );
            }
            terms.push(term);
            negate = match self.peek().kind {
                TokenKind::Plus => false,
                TokenKind::Minus => true,
                _ => return Ok(terms),
            };
            self.bump();
        }
    }

    fn check_modulus(&self, m: &Spanned<Value>) -> PResult<()> {
        match &m.value {
            Value::Int(v) if *v < BigInt::from(2) => self.error(m.span, format!("modulus must be at least 2, got {v}")),
            Value::Poly(p) if p.degree().unwrap_or(0) == 0 => {
                self.error(m.span, format!("modulus must be a non-constant polynomial, got {p}"))
            }
            _ => Ok(()),
        }
    }

    // congruence := "mod" expr ":" linear "=" expr
    fn congruence(&mut self) -> PResult<Spanned<Congruence>> {
        let start = self.bump().span;
        let modulus = self.expr()?;
        self.check_modulus(&modulus)?;
        self.expect(TokenKind::Colon, "':' after the modulus")?;
        let terms = self.linear()?;
        self.expect(TokenKind::Equals, "'=' after the linear form")?;
        let rhs = self.expr()?;
        let span = start.to(rhs.span);
        Ok(Spanned::new(Congruence { modulus, terms, rhs }, span))
    }

    // restriction := "gcd" "(" variable "," expr ")" "=" expr
    fn restriction(&mut self) -> PResult<Spanned<Restriction>> {
        let start = self.bump().span;
        self.expect(TokenKind::LParen, "'(' after 'gcd'")?;
        let variable = self.variable()?;
        self.expect(TokenKind::Comma, "',' after the variable")?;
        let modulus = self.expr()?;
        self.expect(TokenKind::RParen, "')'")?;
        self.expect(TokenKind::Equals, "'=' after gcd(...)")?;
        let value = self.expr()?;
        let span = start.to(value.span);
        Ok(Spanned::new(Restriction { variable, modulus, value }, span))
    }

    fn document(&mut self) -> PResult<SystemDocument> {
        if self.at_ident("field") {
            self.header()?;
        }
        let mut congruences = Vec::new();
        let mut restrictions = Vec::new();
        loop {
            match &self.peek().kind {
                TokenKind::Eof => break,
                TokenKind::Ident(s) if s == "mod" => congruences.push(self.congruence()?),
                TokenKind::Ident(s) if s == "gcd" => restrictions.push(self.restriction()?),
                TokenKind::Ident(s) if s == "field" => {
                    return self.error(self.peek().span, "the field header must come before any statement")
                }
                _ => return self.unexpected("'mod' or 'gcd'"),
            }
        }
        if congruences.is_empty() {
            return self.error(self.peek().span, "expected at least one congruence ('mod ...')");
        }
        let doc = SystemDocument {
            mode: self.mode,
            congruences,
            restrictions,
        };
        self.check_restrictions(&doc)?;
        Ok(doc)
    }

    fn check_restrictions(&self, doc: &SystemDocument) -> PResult<()> {
        let vars = doc.variables();
        for (k, r) in doc.restrictions.iter().enumerate() {
            let r = &r.value;
            if !vars.contains(&r.variable.value) {
                return self.error(
                    r.variable.span,
                    format!("unknown variable {}: it appears in no congruence", r.variable.value),
                );
            }
            let Some(declared) = doc
                .congruences
                .iter()
                .map(|c| &c.value.modulus.value)
                .find(|m| m.same_modulus(&r.modulus.value))
            else {
                return self.error(
                    r.modulus.span,
                    format!("{} is not one of the declared moduli", r.modulus.value),
                );
            };
            let earlier = doc.restrictions[..k].iter().any(|o| {
                o.value.variable.value == r.variable.value && o.value.modulus.value.same_modulus(&r.modulus.value)
            });
            if earlier {
                return self.error(
                    r.variable.span.to(r.modulus.span),
                    format!("duplicate restriction on gcd({}, {})", r.variable.value, r.modulus.value),
                );
            }
            self.check_restriction_value(&r.value, declared)?;
        }
        Ok(())
    }

    fn check_restriction_value(&self, value: &Spanned<Value>, modulus: &Value) -> PResult<()> {
        match (&value.value, modulus) {
            (Value::Int(t), Value::Int(m)) => {
                if !t.is_positive() {
                    return self.error(value.span, format!("a gcd must be positive, got {t}"));
                }
                if !(m % t).is_zero() {
                    return self.error(value.span, format!("{t} does not divide the modulus {m}"));
                }
            }
            (Value::Poly(t), Value::Poly(m)) => {
                if t.is_zero() {
                    return self.error(value.span, "a gcd must be a nonzero polynomial");
                }
                if !t.divides(m) {
                    return self.error(value.span, format!("{t} does not divide the modulus {m}"));
                }
            }
            _ => unreachable!("mixed modes"),
        }
        Ok(())
    }
}

/// Parses a system document. Reports the first error only.
pub fn parse_system(text: &str) -> Result<SystemDocument, Diagnostic> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        src: text,
        tokens,
        pos: 0,
        mode: Mode::Integer,
    };
    parser.document()
}
