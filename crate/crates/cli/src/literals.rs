//! Parsers for tower and element literals given on the command line.
//!
//! Towers come either as shorthand names (Q, Q(sqrt2,sqrt3), Q(i),
//! Q(zeta5)) or as the raw JSON object format. Elements come either as
//! the nested-array JSON format or as a small expression grammar over
//! named generators, integers, and + - * /.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use trcert_core::{
    cyclotomic_cm_field, sqrt_in_tower, AlgNum, CyclotomicField, Rat, Tower,
};

/// A parsed tower together with the generator names usable in element
/// expressions.
pub struct TowerContext {
    pub tower: Arc<Tower>,
    pub names: BTreeMap<String, AlgNum>,
    /// Set when the tower was requested as a cyclotomic field.
    pub cyclotomic: Option<CyclotomicField>,
}

#[derive(Debug)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

/// Registers `name` for the k-th square-root generator when its radicand
/// is a plain integer.
fn name_integer_radicands(ctx: &mut TowerContext) {
    for k in 0..ctx.tower.num_steps() {
        let radicand = ctx.tower.step_radicand(k);
        let Some(r) = radicand.rational_value() else { continue };
        if !r.is_integer() {
            continue;
        }
        let generator = AlgNum::sqrt_gen(&ctx.tower, k);
        let name = if r == Rat::from_integer((-1).into()) {
            "i".to_string()
        } else {
            format!("sqrt{r}")
        };
        ctx.names.entry(name).or_insert(generator);
    }
}

/// Parses a tower literal: "Q", "Q(...)" shorthand, or raw JSON.
pub fn parse_tower(text: &str) -> Result<TowerContext, ParseError> {
    let trimmed = text.trim().replace('\u{221a}', "sqrt"); // accept the radical sign
    if trimmed.starts_with('{') {
        let mut value: serde_json::Value = serde_json::from_str(&trimmed)
            .map_err(|e| ParseError(format!("tower JSON does not parse: {e}")))?;
        if let Some(obj) = value.as_object_mut() {
            // A bare base polynomial denotes a tower with no radical steps.
            obj.entry("steps").or_insert_with(|| serde_json::Value::Array(Vec::new()));
        }
        let tower = Tower::from_json(&value)
            .map_err(|e| ParseError(format!("tower JSON is not a valid tower: {e}")))?;
        let mut ctx = TowerContext { tower, names: BTreeMap::new(), cyclotomic: None };
        name_integer_radicands(&mut ctx);
        return Ok(ctx);
    }
    if trimmed == "Q" {
        return Ok(TowerContext {
            tower: Tower::rational(),
            names: BTreeMap::new(),
            cyclotomic: None,
        });
    }
    let Some(args) = trimmed.strip_prefix("Q(").and_then(|s| s.strip_suffix(')')) else {
        return err(format!(
            "unrecognized tower {text:?}: expected Q, Q(...), or a JSON object"
        ));
    };
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    // A cyclotomic field stands alone: Q(i) or Q(zetaN).
    if parts.len() == 1 {
        let p = parts[0];
        let order = if p == "i" {
            Some(4)
        } else {
            p.strip_prefix("zeta").map(|rest| rest.parse::<u64>()).transpose().map_err(
                |e| ParseError(format!("bad root-of-unity order in {p:?}: {e}")),
            )?
        };
        if let Some(n) = order {
            let field = cyclotomic_cm_field(n)
                .map_err(|e| ParseError(format!("cannot build Q(zeta_{n}): {e}")))?;
            let mut names = BTreeMap::new();
            names.insert(format!("zeta{n}"), field.zeta().clone());
            let mut ctx =
                TowerContext { tower: field.tower().clone(), names, cyclotomic: Some(field) };
            name_integer_radicands(&mut ctx);
            return Ok(ctx);
        }
    }
    // Otherwise each part adjoins the square root of an integer.
    let mut tower = Tower::rational();
    for p in &parts {
        let Some(r) = p.strip_prefix("sqrt").and_then(|s| s.parse::<i64>().ok()) else {
            return err(format!("unrecognized generator {p:?}: expected sqrtN, i, or zetaN"));
        };
        tower = Tower::adjoin_sqrt(&AlgNum::from_int(&tower, r))
            .map_err(|e| ParseError(format!("cannot adjoin sqrt {r}: {e}")))?;
    }
    let mut ctx = TowerContext { tower, names: BTreeMap::new(), cyclotomic: None };
    name_integer_radicands(&mut ctx);
    Ok(ctx)
}

/// Parses "a/b" or "a" into an exact rational.
pub fn parse_rat(text: &str) -> Result<Rat, ParseError> {
    let s = text.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: i64 = num.trim().parse().map_err(|e| ParseError(format!("bad numerator {num:?}: {e}")))?;
    let d: i64 = den.trim().parse().map_err(|e| ParseError(format!("bad denominator {den:?}: {e}")))?;
    if d == 0 {
        return err("denominator is zero");
    }
    Ok(Rat::new(n.into(), d.into()))
}

/// Parses an element literal against a tower: nested-array JSON when it
/// looks like JSON, the expression grammar otherwise.
pub fn parse_element(ctx: &TowerContext, text: &str) -> Result<AlgNum, ParseError> {
    let trimmed = text.trim().replace('\u{221a}', "sqrt");
    if trimmed.starts_with('[') || trimmed.starts_with('"') {
        let value: serde_json::Value = serde_json::from_str(&trimmed)
            .map_err(|e| ParseError(format!("element JSON does not parse: {e}")))?;
        return AlgNum::from_json(&ctx.tower, &value)
            .map_err(|e| ParseError(format!("element JSON does not fit the tower: {e}")));
    }
    let tokens = tokenize(&trimmed)?;
    let mut p = Parser { ctx, tokens, pos: 0 };
    let value = p.expression()?;
    if p.pos != p.tokens.len() {
        return err(format!("trailing input after expression: {:?}", &p.tokens[p.pos..]));
    }
    Ok(value)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '+' => {
                chars.next();
                out.push(Token::Plus);
            }
            '-' => {
                chars.next();
                out.push(Token::Minus);
            }
            '*' => {
                chars.next();
                out.push(Token::Star);
            }
            '/' => {
                chars.next();
                out.push(Token::Slash);
            }
            '(' => {
                chars.next();
                out.push(Token::Open);
            }
            ')' => {
                chars.next();
                out.push(Token::Close);
            }
            '0'..='9' => {
                let mut n = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        n.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let v = n.parse().map_err(|e| ParseError(format!("bad integer {n:?}: {e}")))?;
                out.push(Token::Int(v));
            }
            'a'..='z' | 'A'..='Z' => {
                let mut w = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        w.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token::Ident(w));
            }
            other => return err(format!("unexpected character {other:?} in element expression")),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a TowerContext,
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn expression(&mut self) -> Result<AlgNum, ParseError> {
        let mut acc = self.term()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Token::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<AlgNum, ParseError> {
        let mut acc = self.factor()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Star => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Token::Slash => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = acc
                        .div(&rhs)
                        .map_err(|e| ParseError(format!("division fails: {e}")))?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<AlgNum, ParseError> {
        match self.peek().cloned() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(-&self.factor()?)
            }
            Some(Token::Int(n)) => {
                self.pos += 1;
                Ok(AlgNum::from_int(&self.ctx.tower, n))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                self.resolve(&name)
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.expression()?;
                match self.peek() {
                    Some(Token::Close) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => err("unclosed parenthesis"),
                }
            }
            other => err(format!("expected a value, found {other:?}")),
        }
    }

    fn resolve(&self, name: &str) -> Result<AlgNum, ParseError> {
        if let Some(v) = self.ctx.names.get(name) {
            return Ok(v.clone());
        }
        // sqrtN resolves whenever the tower contains a square root of N,
        // even as a product of generators (sqrt6 in Q(sqrt2, sqrt3)).
        if let Some(r) = name.strip_prefix("sqrt").and_then(|s| s.parse::<i64>().ok()) {
            if let Some(root) = sqrt_in_tower(&AlgNum::from_int(&self.ctx.tower, r)) {
                return Ok(root);
            }
            return err(format!("the tower contains no square root of {r}"));
        }
        err(format!(
            "unknown generator {name:?}; this tower defines: {}",
            if self.ctx.names.is_empty() {
                "no names (rational field)".to_string()
            } else {
                self.ctx.names.keys().cloned().collect::<Vec<_>>().join(", ")
            }
        ))
    }
}
