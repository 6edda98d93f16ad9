//! Recursive-descent parser for the prescribed-function grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)*
//! exponent:= '-'? integer | '(' '-'? integer ')'
//! primary := number | 'y' | 'pi' | func '(' expr ')' | '(' expr ')'
//! ```

use thiserror::Error;

use super::expr::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => {
                *offset
            }
        }
    }

    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(usize, Token)>, ParseError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            let (at, tok) = lx.next_token()?;
            let done = tok == Token::End;
            out.push((at, tok));
            if done {
                return Ok(out);
            }
        }
    }

    fn next_token(&mut self) -> Result<(usize, Token), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((start, Token::End));
        };
        let single = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            return Ok((start, tok));
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .src
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
            {
                self.pos += 1;
            }
            let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            return Ok((start, Token::Ident(name)));
        }
        Err(ParseError::syntax(
            start,
            format!("unexpected character `{}`", c as char),
        ))
    }

    fn number(&mut self, start: usize) -> Result<(usize, Token), ParseError> {
        let digits = |lx: &mut Lexer<'_>| {
            let from = lx.pos;
            while lx.src.get(lx.pos).is_some_and(u8::is_ascii_digit) {
                lx.pos += 1;
            }
            lx.pos - from
        };
        let mut count = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(ParseError::syntax(start, "malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(ParseError::syntax(mark, "malformed exponent"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice");
        text.parse::<f64>()
            .map(|v| (start, Token::Number(v)))
            .map_err(|_| ParseError::syntax(start, "malformed number"))
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    idx: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.idx].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.idx].0
    }

    fn bump(&mut self) -> (usize, Token) {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::syntax(
                self.offset(),
                format!("expected {what}"),
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Token::Plus => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Token::Minus => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Token::Star => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Token::Slash => {
                    self.bump();
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Token::Minus {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while *self.peek() == Token::Caret {
            self.bump();
            let n = self.exponent()?;
            base = Expr::pow(base, n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parenthesized = *self.peek() == Token::LParen;
        if parenthesized {
            self.bump();
        }
        let negative = *self.peek() == Token::Minus;
        if negative {
            self.bump();
        }
        let at = self.offset();
        let n = match self.bump().1 {
            Token::Number(v) if v.fract() == 0.0 && v.abs() <= f64::from(i32::MAX) => v as i32,
            Token::Number(_) => {
                return Err(ParseError::syntax(at, "exponent must be an integer"));
            }
            _ => return Err(ParseError::syntax(at, "expected integer exponent")),
        };
        if parenthesized {
            self.expect(Token::RParen, "`)`")?;
        }
        Ok(if negative { -n } else { n })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (at, tok) = self.bump();
        match tok {
            Token::Number(v) => Ok(Expr::Const(v)),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => match name.as_str() {
                "y" => Ok(Expr::Var),
                "pi" => Ok(Expr::Pi),
                other => match Func::from_name(other) {
                    Some(func) => {
                        self.expect(Token::LParen, "`(` after function name")?;
                        let arg = self.expr()?;
                        self.expect(Token::RParen, "`)`")?;
                        Ok(Expr::call(func, arg))
                    }
                    None => Err(ParseError::UnknownIdentifier {
                        offset: at,
                        name: name.clone(),
                    }),
                },
            },
            Token::End => Err(ParseError::syntax(at, "unexpected end of expression")),
            other => Err(ParseError::syntax(
                at,
                format!("unexpected token {other:?}"),
            )),
        }
    }
}

/// Parses a prescribed-function expression in the variable `y`.
pub fn parse_phi(src: &str) -> Result<Expr, ParseError> {
    if let Some(pos) = src.bytes().position(|b| !b.is_ascii()) {
        return Err(ParseError::syntax(pos, "non-ASCII input"));
    }
    if src.trim().is_empty() {
        return Err(ParseError::syntax(0, "empty expression"));
    }
    let tokens = Lexer::tokenize(src)?;
    let mut parser = Parser { tokens, idx: 0 };
    let e = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(ParseError::syntax(parser.offset(), "trailing input"));
    }
    Ok(e)
}
