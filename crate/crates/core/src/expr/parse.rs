use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use super::{BinOp, Expr, Func};
use crate::Rational;

/// Names treated as circuit variables when no explicit list is given.
pub const DEFAULT_VARIABLES: [&str; 4] = ["i", "v", "sigma", "phi"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("non-integer exponent at offset {offset}")]
    NonIntegerExponent { offset: usize },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
}

impl ParseError {
    /// Byte offset into the source text.
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::NonIntegerExponent { offset }
            | ParseError::UnknownFunction { offset, .. } => *offset,
        }
    }
}

/// Parse with [`DEFAULT_VARIABLES`] as the variable names; every other
/// identifier becomes a parameter.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    parse_expr_with(text, &DEFAULT_VARIABLES)
}

pub fn parse_expr_with(text: &str, variables: &[&str]) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, variables, end: text.len() };
    if p.tokens.is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(syntax(t.offset, &format!("unexpected {}", t.kind.describe()))),
    }
}

fn syntax(offset: usize, message: &str) -> ParseError {
    ParseError::Syntax { offset, message: message.to_string() }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Number { value: Rational, integral: bool },
    Ident(String),
    Op(char),
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Number { .. } => "number".into(),
            Kind::Ident(s) => format!("identifier `{s}`"),
            Kind::Op(c) => format!("`{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Kind,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            let (value, integral, next) = scan_number(text, i)?;
            out.push(Token { kind: Kind::Number { value, integral }, offset: start });
            i = next;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { kind: Kind::Ident(text[start..i].to_string()), offset: start });
        } else if b"+-*/^()".contains(&c) {
            out.push(Token { kind: Kind::Op(c as char), offset: i });
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(syntax(i, &format!("unexpected character `{ch}`")));
        }
    }
    Ok(out)
}

/// Decimal literal with optional fraction and exponent, converted exactly.
fn scan_number(text: &str, start: usize) -> Result<(Rational, bool, usize), ParseError> {
    let bytes = text.as_bytes();
    let mut i = start;
    let mut digits = String::new();
    let mut frac_len: i64 = 0;
    let mut integral = true;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        digits.push(bytes[i] as char);
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        integral = false;
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            digits.push(bytes[i] as char);
            frac_len += 1;
            i += 1;
        }
    }
    let mut exp: i64 = 0;
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        let mut sign = 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            if bytes[j] == b'-' {
                sign = -1;
            }
            j += 1;
        }
        let exp_start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j == exp_start {
            return Err(syntax(j, "malformed exponent in number"));
        }
        exp = sign
            * text[exp_start..j]
                .parse::<i64>()
                .map_err(|_| syntax(exp_start, "exponent out of range"))?;
        integral = false;
        i = j;
    }
    let mantissa: BigInt = digits.parse().map_err(|_| syntax(start, "malformed number"))?;
    let shift = exp - frac_len;
    let ten = BigInt::from(10);
    let value = if shift >= 0 {
        Rational::from_integer(mantissa * num_traits::pow(ten, shift as usize))
    } else {
        Rational::new(mantissa, num_traits::pow(ten, (-shift) as usize))
    };
    // 2e3 is integral in value even though written with an exponent
    let integral = integral || value.denom().is_one();
    Ok((value, integral, i))
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    variables: &'a [&'a str],
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: Kind::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn expect_op(&mut self, op: char) -> Result<(), ParseError> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(self.offset(), &format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while self.peek_op() == Some('^') {
            self.pos += 1;
            let k = self.exponent()?;
            base = Expr::Pow(Box::new(base), k);
        }
        Ok(base)
    }

    /// `^` accepts a signed integer literal, optionally parenthesized.
    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parenthesized = self.peek_op() == Some('(');
        if parenthesized {
            self.pos += 1;
        }
        let mut sign = 1i64;
        match self.peek_op() {
            Some('-') => {
                sign = -1;
                self.pos += 1;
            }
            Some('+') => self.pos += 1,
            _ => {}
        }
        let offset = self.offset();
        let k = match self.peek() {
            Some(Token { kind: Kind::Number { value, integral: true }, .. }) => value
                .to_integer()
                .to_i64()
                .and_then(|k| i32::try_from(sign * k).ok())
                .ok_or_else(|| syntax(offset, "exponent out of range"))?,
            Some(Token { kind: Kind::Number { .. }, .. })
            | Some(Token { kind: Kind::Ident(_), .. })
            | Some(Token { kind: Kind::Op('('), .. }) => {
                return Err(ParseError::NonIntegerExponent { offset })
            }
            _ => return Err(syntax(offset, "expected integer exponent")),
        };
        self.pos += 1;
        if parenthesized {
            self.expect_op(')')?;
        }
        Ok(k)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(syntax(offset, "unexpected end of input"));
        };
        self.pos += 1;
        match tok.kind {
            Kind::Number { value, .. } => Ok(Expr::Num(value)),
            Kind::Ident(name) => {
                if self.peek_op() == Some('(') {
                    let func = Func::from_name(&name)
                        .ok_or(ParseError::UnknownFunction { name, offset: tok.offset })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_op(')')?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else if self.variables.contains(&name.as_str()) {
                    Ok(Expr::Var(name))
                } else {
                    Ok(Expr::Param(name))
                }
            }
            Kind::Op('(') => {
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Kind::Op(c) => Err(syntax(tok.offset, &format!("unexpected `{c}`"))),
        }
    }
}
