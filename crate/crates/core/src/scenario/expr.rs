//! Operator expressions: `+ - * /`, parentheses, `sqrt(...)`, builtins and
//! names of earlier operators.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::text::{real_prefix, Diagnostic, Position, Spanned};
use crate::qcore::{LinearOperator, StateVector};

const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Position,
}

fn tokenize(expr: &Spanned) -> Result<Vec<Token>, Diagnostic> {
    let text = expr.text.as_str();
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut column = expr.pos.column;
    while i < bytes.len() {
        let pos = Position::new(expr.pos.line, column);
        let c = text[i..].chars().next().expect("in bounds");
        let len = if c.is_whitespace() {
            c.len_utf8()
        } else if c.is_ascii_digit() || c == '.' {
            let n = real_prefix(&bytes[i..], false);
            let literal = &text[i..i + n.max(1)];
            let value = literal.parse::<f64>().ok().filter(|v| v.is_finite() && n > 0);
            match value {
                Some(v) => tokens.push(Token { tok: Tok::Num(v), pos }),
                None => return Err(Diagnostic::error(pos, format!("malformed number `{literal}`"))),
            }
            n
        } else if c.is_ascii_alphabetic() || c == '_' {
            let n = text[i..].find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_')).unwrap_or(text.len() - i);
            tokens.push(Token { tok: Tok::Ident(text[i..i + n].to_string()), pos });
            n
        } else if "+-*/()".contains(c) {
            tokens.push(Token { tok: Tok::Op(c), pos });
            1
        } else {
            return Err(Diagnostic::error(pos, format!("unexpected character `{c}` in expression")));
        };
        column += text[i..i + len].chars().count();
        i += len;
    }
    Ok(tokens)
}

#[derive(Debug, Clone)]
enum Value {
    Scalar(f64),
    Operator(LinearOperator),
}

/// Names an expression may refer to.
pub(crate) struct Env<'a> {
    pub states: &'a BTreeMap<String, Vec<Complex64>>,
    pub operators: &'a BTreeMap<String, LinearOperator>,
}

struct Parser<'a> {
    tokens: Vec<Token>,
    next: usize,
    end: Position,
    env: &'a Env<'a>,
    depth: usize,
}

/// Evaluates an operator expression.
pub(crate) fn evaluate(expr: &Spanned, env: &Env<'_>) -> Result<LinearOperator, Diagnostic> {
    let tokens = tokenize(expr)?;
    let end = Position::new(expr.pos.line, expr.pos.column + expr.text.chars().count());
    let mut parser = Parser { tokens, next: 0, end, env, depth: 0 };
    let value = parser.sum()?;
    if let Some(extra) = parser.peek() {
        return Err(Diagnostic::error(extra.pos, "unexpected token after expression"));
    }
    match value {
        Value::Operator(op) => Ok(op),
        Value::Scalar(_) => Err(expr.error("expression evaluates to a scalar, not an operator")),
    }
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.next)
    }

    fn here(&self) -> Position {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Op(c), .. }) if *c == op) {
            self.next += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), Diagnostic> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(Diagnostic::error(self.here(), format!("expected `{op}`")))
        }
    }

    fn descend(&mut self) -> Result<(), Diagnostic> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Diagnostic::error(self.here(), "expression nests too deeply"));
        }
        Ok(())
    }

    fn sum(&mut self) -> Result<Value, Diagnostic> {
        self.descend()?;
        let mut acc = self.product()?;
        loop {
            let pos = self.here();
            let sign = if self.eat('+') {
                1.0
            } else if self.eat('-') {
                -1.0
            } else {
                break;
            };
            let rhs = self.product()?;
            acc = combine_sum(acc, rhs, sign, pos)?;
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn product(&mut self) -> Result<Value, Diagnostic> {
        let mut acc = self.unary()?;
        loop {
            let pos = self.here();
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = multiply(acc, rhs, pos)?;
            } else if self.eat('/') {
                let rhs = self.unary()?;
                acc = divide(acc, rhs, pos)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Value, Diagnostic> {
        let pos = self.here();
        if self.eat('-') {
            self.descend()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return multiply(Value::Scalar(-1.0), inner, pos);
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Value, Diagnostic> {
        let Some(token) = self.peek().cloned() else {
            return Err(Diagnostic::error(self.end, "expression ends unexpectedly"));
        };
        self.next += 1;
        match token.tok {
            Tok::Num(v) => Ok(Value::Scalar(v)),
            Tok::Op('(') => {
                let value = self.sum()?;
                self.expect(')')?;
                Ok(value)
            }
            Tok::Op(c) => Err(Diagnostic::error(token.pos, format!("unexpected `{c}`"))),
            Tok::Ident(name) => self.identifier(&name, token.pos),
        }
    }

    fn identifier(&mut self, name: &str, pos: Position) -> Result<Value, Diagnostic> {
        match name {
            "pauli_x" => Ok(Value::Operator(LinearOperator::pauli_x())),
            "pauli_y" => Ok(Value::Operator(LinearOperator::pauli_y())),
            "pauli_z" => Ok(Value::Operator(LinearOperator::pauli_z())),
            "sqrt" => {
                self.expect('(')?;
                let arg_pos = self.here();
                let value = self.sum()?;
                self.expect(')')?;
                match value {
                    Value::Scalar(x) if x >= 0.0 => Ok(Value::Scalar(x.sqrt())),
                    Value::Scalar(x) => Err(Diagnostic::error(arg_pos, format!("sqrt of negative number {x}"))),
                    Value::Operator(_) => Err(Diagnostic::error(arg_pos, "sqrt takes a scalar")),
                }
            }
            "identity" => {
                self.expect('(')?;
                let arg = self.peek().cloned();
                let n = match arg {
                    Some(Token { tok: Tok::Num(v), .. }) if v.fract() == 0.0 && (1.0..=16.0).contains(&v) => v as usize,
                    _ => return Err(Diagnostic::error(self.here(), "identity takes an integer dimension from 1 to 16")),
                };
                self.next += 1;
                self.expect(')')?;
                Ok(Value::Operator(LinearOperator::identity(n)))
            }
            "projector" => {
                self.expect('(')?;
                let arg = self.peek().cloned();
                let Some(Token { tok: Tok::Ident(state), pos: state_pos }) = arg else {
                    return Err(Diagnostic::error(self.here(), "projector takes a state name"));
                };
                let Some(amps) = self.env.states.get(&state) else {
                    return Err(Diagnostic::error(state_pos, format!("unknown state `{state}`")));
                };
                let v = StateVector::new(amps.clone())
                    .and_then(StateVector::into_normalized)
                    .map_err(|e| Diagnostic::error(state_pos, format!("cannot project onto `{state}`: {e}")))?;
                self.next += 1;
                self.expect(')')?;
                Ok(Value::Operator(LinearOperator::projector(&v)))
            }
            other => match self.env.operators.get(other) {
                Some(op) => Ok(Value::Operator(op.clone())),
                None => Err(Diagnostic::error(pos, format!("unknown name `{other}`"))),
            },
        }
    }
}

fn arithmetic(result: crate::Result<LinearOperator>, pos: Position) -> Result<Value, Diagnostic> {
    result.map(Value::Operator).map_err(|e| Diagnostic::error(pos, e.to_string()))
}

fn combine_sum(lhs: Value, rhs: Value, sign: f64, pos: Position) -> Result<Value, Diagnostic> {
    match (lhs, rhs) {
        (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a + sign * b)),
        (Value::Operator(a), Value::Operator(b)) => {
            arithmetic(if sign > 0.0 { a.add(&b) } else { a.sub(&b) }, pos)
        }
        _ => Err(Diagnostic::error(pos, "cannot add a scalar and an operator")),
    }
}

fn multiply(lhs: Value, rhs: Value, pos: Position) -> Result<Value, Diagnostic> {
    match (lhs, rhs) {
        (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a * b)),
        (Value::Scalar(a), Value::Operator(b)) | (Value::Operator(b), Value::Scalar(a)) => arithmetic(b.scale(a), pos),
        (Value::Operator(a), Value::Operator(b)) => arithmetic(a.matmul(&b), pos),
    }
}

fn divide(lhs: Value, rhs: Value, pos: Position) -> Result<Value, Diagnostic> {
    let divisor = match rhs {
        Value::Scalar(0.0) => return Err(Diagnostic::error(pos, "division by zero")),
        Value::Scalar(d) => d,
        Value::Operator(_) => return Err(Diagnostic::error(pos, "can only divide by a scalar")),
    };
    match lhs {
        Value::Scalar(a) => Ok(Value::Scalar(a / divisor)),
        Value::Operator(a) => arithmetic(a.scale(1.0 / divisor), pos),
    }
}
