//! Problem-file parsing.
//!
//! Grammar (whitespace-insensitive, `#` starts a line comment):
//!
//! ```text
//! problem  := stmt*
//! stmt     := sdecl | rdecl | hdef | cfg
//! sdecl    := "symbol" NAME ("even"|"odd") ("even"|"odd") "order" INT ";"
//! rdecl    := "commute" NAME NAME ";"
//! hdef     := "H" "=" expr ";"
//! cfg      := "set" KEY "=" VALUE ";"
//! expr     := term (("+"|"-") term)*
//! term     := ("-")? factor ("*" factor)*
//! factor   := RATIONAL | "i" | ("m1"|"m2"|"c") ("^" INT)? | "b1" | "b2"
//!           | NAME | ("comm"|"acomm") "(" expr "," expr ")"
//!           | "(" expr ")" ("^" INT)?
//! RATIONAL := DIGITS ("/" DIGITS)?
//! ```
//!
//! A parenthesized group may carry an integer exponent; a negative exponent
//! is only valid for pure scalar groups (it inverts the coefficient), which
//! is what makes rational-function coefficients round-trippable through the
//! text renderer. Config keys: `sequence`, `trunc`, `cleanup`, `masses_equal`,
//! `bch_cleanup_first_order_only`, `max_rounds`, `one_body`, `mass1`,
//! `mass2`, `c_values`, `seed`, `aux_dim`. Unknown keys are rejected.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::coeff::{Coefficient, PolyRatio};
use crate::engine::{ReductionConfig, SectorKind};
use crate::expr::{acomm, comm, Expression};
use crate::poly::IntPoly;
use crate::table::{Parity, ParticleParity, SymbolDecl, SymbolTable};

#[derive(Debug, Error, PartialEq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        message: message.into(),
    })
}

/// Numeric-check settings from the optional numeric block.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericCheck {
    pub m1: f64,
    pub m2: f64,
    pub c_values: Vec<f64>,
    pub seed: u64,
    pub aux_dim: usize,
}

impl Default for NumericCheck {
    fn default() -> Self {
        NumericCheck {
            m1: 1.0,
            m2: 2.0,
            c_values: vec![8.0, 16.0, 32.0, 64.0, 128.0],
            seed: 0,
            aux_dim: 2,
        }
    }
}

/// A parsed problem: symbol table, Hamiltonian, reduction settings.
#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub table: Arc<SymbolTable>,
    pub hamiltonian: Expression,
    pub config: ReductionConfig,
    pub one_body: bool,
    pub numeric: NumericCheck,
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        if ch == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if ch == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
            continue;
        }
        let (l, c0) = (line, col);
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: l,
                col: c0,
            });
            continue;
        }
        if ch.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Number(s),
                line: l,
                col: c0,
            });
            continue;
        }
        if "();=^*+-,/.".contains(ch) {
            chars.next();
            col += 1;
            out.push(Token {
                tok: Tok::Punct(ch),
                line: l,
                col: c0,
            });
            continue;
        }
        return err(l, c0, format!("unexpected character `{ch}`"));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Statement AST (first pass) and expression AST
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum Ast {
    Rational(BigInt, BigInt),
    ImagUnit,
    Mass(u8, i32),
    CPow(i32),
    Beta(u8),
    Sym(String, usize, usize),
    Comm(Box<Ast>, Box<Ast>, bool),
    Pow(Box<Ast>, i32, usize, usize),
    Prod(Vec<Ast>, bool),
    Sum(Vec<Ast>),
}

#[derive(Debug)]
enum Stmt {
    Symbol {
        name: String,
        parity: Parity,
        order: i32,
        line: usize,
        col: usize,
    },
    Commute(String, String, usize, usize),
    Hamiltonian(Ast, usize, usize),
    Set(String, Vec<Token>, usize, usize),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn loc(&self) -> (usize, usize) {
        self.peek()
            .map(|t| (t.line, t.col))
            .or_else(|| self.toks.last().map(|t| (t.line, t.col + 1)))
            .unwrap_or((1, 1))
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_punct(&mut self, ch: char) -> Result<(), ParseError> {
        let (l, c) = self.loc();
        match self.bump() {
            Some(Token {
                tok: Tok::Punct(p), ..
            }) if p == ch => Ok(()),
            Some(t) => err(t.line, t.col, format!("expected `{ch}`, found {}", show(&t.tok))),
            None => err(l, c, format!("expected `{ch}`, found end of input")),
        }
    }

    fn expect_ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        let (l, c) = self.loc();
        match self.bump() {
            Some(Token {
                tok: Tok::Ident(s),
                line,
                col,
            }) => Ok((s, line, col)),
            Some(t) => err(t.line, t.col, format!("expected a name, found {}", show(&t.tok))),
            None => err(l, c, "expected a name, found end of input"),
        }
    }

    /// A signed integer (used for orders and exponents).
    fn expect_int(&mut self, what: &str) -> Result<i32, ParseError> {
        let (l, c) = self.loc();
        let neg = matches!(
            self.peek(),
            Some(Token {
                tok: Tok::Punct('-'),
                ..
            })
        );
        if neg {
            self.bump();
        }
        match self.bump() {
            Some(Token {
                tok: Tok::Number(s),
                line,
                col,
            }) => {
                // A following `/` would make the exponent rational.
                if matches!(
                    self.peek(),
                    Some(Token {
                        tok: Tok::Punct('/'),
                        ..
                    })
                ) {
                    return err(line, col, format!("{what} must be an integer"));
                }
                let v: i64 = s
                    .parse()
                    .map_err(|_| ParseError {
                        line,
                        col,
                        message: format!("{what} out of range"),
                    })?;
                let v = if neg { -v } else { v };
                i32::try_from(v).map_err(|_| ParseError {
                    line,
                    col,
                    message: format!("{what} out of range"),
                })
            }
            Some(t) => err(t.line, t.col, format!("{what} must be an integer, found {}", show(&t.tok))),
            None => err(l, c, format!("{what} must be an integer, found end of input")),
        }
    }

    fn maybe_power(&mut self) -> Result<Option<i32>, ParseError> {
        if matches!(
            self.peek(),
            Some(Token {
                tok: Tok::Punct('^'),
                ..
            })
        ) {
            self.bump();
            Ok(Some(self.expect_int("exponent")?))
        } else {
            Ok(None)
        }
    }

    fn parse_statements(&mut self) -> Result<Vec<Stmt>, ParseError> {
        let mut out = Vec::new();
        while !self.at_end() {
            let (l, c) = self.loc();
            let t = self.bump().unwrap();
            match &t.tok {
                Tok::Ident(kw) if kw == "symbol" => {
                    let (name, nl, nc) = self.expect_ident()?;
                    if is_reserved(&name) {
                        return err(nl, nc, format!("`{name}` is reserved and cannot be a symbol name"));
                    }
                    let p1 = self.expect_parity()?;
                    let p2 = self.expect_parity()?;
                    let (kw2, kl, kc) = self.expect_ident()?;
                    if kw2 != "order" {
                        return err(kl, kc, "expected `order`");
                    }
                    let order = self.expect_int("symbol order")?;
                    self.expect_punct(';')?;
                    out.push(Stmt::Symbol {
                        name,
                        parity: Parity { p1, p2 },
                        order,
                        line: nl,
                        col: nc,
                    });
                }
                Tok::Ident(kw) if kw == "commute" => {
                    let (a, al, ac) = self.expect_ident()?;
                    let (b, _, _) = self.expect_ident()?;
                    self.expect_punct(';')?;
                    out.push(Stmt::Commute(a, b, al, ac));
                }
                Tok::Ident(kw) if kw == "H" => {
                    self.expect_punct('=')?;
                    let ast = self.parse_expr()?;
                    self.expect_punct(';')?;
                    out.push(Stmt::Hamiltonian(ast, l, c));
                }
                Tok::Ident(kw) if kw == "set" => {
                    let (key, _, _) = self.expect_ident()?;
                    self.expect_punct('=')?;
                    let mut toks = Vec::new();
                    loop {
                        match self.peek() {
                            Some(Token {
                                tok: Tok::Punct(';'),
                                ..
                            }) => {
                                self.bump();
                                break;
                            }
                            Some(_) => toks.push(self.bump().unwrap()),
                            None => return err(l, c, "unterminated `set` statement"),
                        }
                    }
                    out.push(Stmt::Set(key, toks, l, c));
                }
                other => {
                    return err(
                        t.line,
                        t.col,
                        format!(
                            "expected `symbol`, `commute`, `H` or `set`, found {}",
                            show(other)
                        ),
                    )
                }
            }
        }
        Ok(out)
    }

    fn expect_parity(&mut self) -> Result<ParticleParity, ParseError> {
        let (s, l, c) = self.expect_ident()?;
        match s.as_str() {
            "even" => Ok(ParticleParity::Even),
            "odd" => Ok(ParticleParity::Odd),
            _ => err(l, c, format!("expected `even` or `odd`, found `{s}`")),
        }
    }

    fn parse_expr(&mut self) -> Result<Ast, ParseError> {
        let mut terms = vec![self.parse_term(false)?];
        loop {
            match self.peek() {
                Some(Token {
                    tok: Tok::Punct('+'),
                    ..
                }) => {
                    self.bump();
                    terms.push(self.parse_term(false)?);
                }
                Some(Token {
                    tok: Tok::Punct('-'),
                    ..
                }) => {
                    self.bump();
                    terms.push(self.parse_term(true)?);
                }
                _ => break,
            }
        }
        Ok(Ast::Sum(terms))
    }

    fn parse_term(&mut self, negated_by_separator: bool) -> Result<Ast, ParseError> {
        let mut neg = negated_by_separator;
        if matches!(
            self.peek(),
            Some(Token {
                tok: Tok::Punct('-'),
                ..
            })
        ) {
            self.bump();
            neg = !neg;
        }
        let mut factors = vec![self.parse_factor()?];
        while matches!(
            self.peek(),
            Some(Token {
                tok: Tok::Punct('*'),
                ..
            })
        ) {
            self.bump();
            factors.push(self.parse_factor()?);
        }
        Ok(Ast::Prod(factors, neg))
    }

    fn parse_factor(&mut self) -> Result<Ast, ParseError> {
        let (l, c) = self.loc();
        let t = match self.bump() {
            Some(t) => t,
            None => return err(l, c, "expected a factor, found end of input"),
        };
        match &t.tok {
            Tok::Number(numstr) => {
                let num: BigInt = numstr.parse().unwrap();
                if matches!(
                    self.peek(),
                    Some(Token {
                        tok: Tok::Punct('/'),
                        ..
                    })
                ) {
                    self.bump();
                    let (dl, dc) = self.loc();
                    match self.bump() {
                        Some(Token {
                            tok: Tok::Number(denstr),
                            line,
                            col,
                        }) => {
                            let den: BigInt = denstr.parse().unwrap();
                            if den == BigInt::from(0) {
                                return err(line, col, "malformed rational: zero denominator");
                            }
                            Ok(Ast::Rational(num, den))
                        }
                        Some(tk) => err(
                            tk.line,
                            tk.col,
                            format!("malformed rational: expected digits after `/`, found {}", show(&tk.tok)),
                        ),
                        None => err(dl, dc, "malformed rational: missing denominator"),
                    }
                } else {
                    Ok(Ast::Rational(num, BigInt::from(1)))
                }
            }
            Tok::Ident(name) => match name.as_str() {
                "i" => Ok(Ast::ImagUnit),
                "b1" => Ok(Ast::Beta(1)),
                "b2" => Ok(Ast::Beta(2)),
                "m1" => Ok(Ast::Mass(1, self.maybe_power()?.unwrap_or(1))),
                "m2" => Ok(Ast::Mass(2, self.maybe_power()?.unwrap_or(1))),
                "c" => Ok(Ast::CPow(self.maybe_power()?.unwrap_or(1))),
                "comm" | "acomm" => {
                    let anti = name == "acomm";
                    self.expect_punct('(')?;
                    let a = self.parse_expr()?;
                    self.expect_punct(',')?;
                    let b = self.parse_expr()?;
                    self.expect_punct(')')?;
                    Ok(Ast::Comm(Box::new(a), Box::new(b), anti))
                }
                _ => Ok(Ast::Sym(name.clone(), t.line, t.col)),
            },
            Tok::Punct('(') => {
                let inner = self.parse_expr()?;
                self.expect_punct(')')?;
                if let Some(p) = self.maybe_power()? {
                    Ok(Ast::Pow(Box::new(inner), p, t.line, t.col))
                } else {
                    Ok(inner)
                }
            }
            other => err(t.line, t.col, format!("expected a factor, found {}", show(other))),
        }
    }
}

fn show(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(s) => format!("`{s}`"),
        Tok::Punct(c) => format!("`{c}`"),
    }
}

fn is_reserved(name: &str) -> bool {
    matches!(
        name,
        "symbol"
            | "commute"
            | "H"
            | "set"
            | "even"
            | "odd"
            | "order"
            | "i"
            | "b1"
            | "b2"
            | "m1"
            | "m2"
            | "c"
            | "comm"
            | "acomm"
    )
}

// ---------------------------------------------------------------------------
// AST evaluation
// ---------------------------------------------------------------------------

fn eval_ast(ast: &Ast, table: &Arc<SymbolTable>) -> Result<Expression, ParseError> {
    Ok(match ast {
        Ast::Rational(n, d) => Expression::scalar(
            table,
            Coefficient::real(PolyRatio::new(
                IntPoly::from_bigint(n.clone()),
                IntPoly::from_bigint(d.clone()),
            )),
        ),
        Ast::ImagUnit => Expression::i(table),
        Ast::Mass(which, pow) => {
            let base = if *which == 1 {
                IntPoly::m1()
            } else {
                IntPoly::m2()
            };
            let ratio = if *pow >= 0 {
                PolyRatio::from_poly(base.pow(*pow as u32))
            } else {
                PolyRatio::new(IntPoly::one(), base.pow((-pow) as u32))
            };
            Expression::scalar(table, Coefficient::real(ratio))
        }
        Ast::CPow(k) => Expression::c_pow(table, *k),
        Ast::Beta(1) => Expression::beta1(table),
        Ast::Beta(_) => Expression::beta2(table),
        Ast::Sym(name, l, c) => match table.lookup(name) {
            Some(_) => Expression::symbol(table, name),
            None => return err(*l, *c, format!("undeclared symbol `{name}`")),
        },
        Ast::Comm(a, b, anti) => {
            let ea = eval_ast(a, table)?;
            let eb = eval_ast(b, table)?;
            if *anti {
                acomm(&ea, &eb)
            } else {
                comm(&ea, &eb)
            }
        }
        Ast::Pow(inner, p, l, c) => {
            let e = eval_ast(inner, table)?;
            if *p >= 0 {
                e.pow(*p as u32)
            } else {
                // Negative powers only for pure scalar groups.
                let coeff = pure_scalar(&e).ok_or(ParseError {
                    line: *l,
                    col: *c,
                    message: "negative power of a non-scalar group".into(),
                })?;
                let inv = coeff.inv().ok_or(ParseError {
                    line: *l,
                    col: *c,
                    message: "cannot invert zero".into(),
                })?;
                Expression::scalar(table, inv).pow((-p) as u32)
            }
        }
        Ast::Prod(factors, neg) => {
            let mut acc = Expression::one(table);
            for f in factors {
                let e = eval_ast(f, table)?;
                acc = &acc * &e;
            }
            if *neg {
                -&acc
            } else {
                acc
            }
        }
        Ast::Sum(terms) => {
            let mut acc = Expression::zero(table);
            for t in terms {
                let e = eval_ast(t, table)?;
                acc = &acc + &e;
            }
            acc
        }
    })
}

fn pure_scalar(e: &Expression) -> Option<Coefficient> {
    if e.is_zero() {
        return Some(Coefficient::zero());
    }
    if e.num_terms() != 1 {
        return None;
    }
    let (k, c) = e.terms().next().unwrap();
    if k.beta == (0, 0) && k.word.is_empty() && k.c_exp == 0 {
        Some(c.clone())
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Config values
// ---------------------------------------------------------------------------

fn toks_to_string(toks: &[Token]) -> String {
    toks.iter()
        .map(|t| match &t.tok {
            Tok::Ident(s) => s.clone(),
            Tok::Number(s) => s.clone(),
            Tok::Punct(c) => c.to_string(),
        })
        .collect::<Vec<_>>()
        .join("")
}

fn parse_bool(v: &str, l: usize, c: usize) -> Result<bool, ParseError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => err(l, c, format!("expected `true` or `false`, found `{v}`")),
    }
}

fn parse_number_list(v: &str, l: usize, c: usize) -> Result<Vec<f64>, ParseError> {
    v.split(',')
        .map(|s| {
            parse_numeric(s.trim(), l, c)
        })
        .collect()
}

fn parse_numeric(s: &str, l: usize, c: usize) -> Result<f64, ParseError> {
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| ParseError {
                line: l,
                col: c,
                message: format!("malformed rational `{s}`"),
            })?;
        let d: f64 = den.trim().parse().map_err(|_| ParseError {
            line: l,
            col: c,
            message: format!("malformed rational `{s}`"),
        })?;
        if d == 0.0 {
            return err(l, c, format!("malformed rational `{s}`: zero denominator"));
        }
        Ok(n / d)
    } else {
        s.parse().map_err(|_| ParseError {
            line: l,
            col: c,
            message: format!("malformed number `{s}`"),
        })
    }
}

/// Parse a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let stmts = parser.parse_statements()?;

    // Declarations first so relations after H still canonicalize it.
    let mut table = SymbolTable::new();
    for s in &stmts {
        match s {
            Stmt::Symbol {
                name,
                parity,
                order,
                line,
                col,
            } => {
                table = table
                    .declare(SymbolDecl::new(name, *parity, *order))
                    .map_err(|e| ParseError {
                        line: *line,
                        col: *col,
                        message: e.to_string(),
                    })?;
            }
            Stmt::Commute(a, b, l, c) => {
                table = table.declare_commuting(a, b).map_err(|e| ParseError {
                    line: *l,
                    col: *c,
                    message: e.to_string(),
                })?;
            }
            _ => {}
        }
    }
    let table = Arc::new(table);

    let mut hamiltonian: Option<Expression> = None;
    let mut config = ReductionConfig::default();
    let mut one_body = false;
    let mut numeric = NumericCheck::default();
    for s in &stmts {
        match s {
            Stmt::Hamiltonian(ast, l, c) => {
                if hamiltonian.is_some() {
                    return err(*l, *c, "H is defined twice");
                }
                hamiltonian = Some(eval_ast(ast, &table)?);
            }
            Stmt::Set(key, toks, l, c) => {
                let v = toks_to_string(toks);
                match key.as_str() {
                    "sequence" => {
                        config.sequence = v
                            .split(',')
                            .map(|s| {
                                SectorKind::from_str(s).map_err(|e| ParseError {
                                    line: *l,
                                    col: *c,
                                    message: e,
                                })
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                    }
                    "trunc" => {
                        config.trunc_order =
                            v.parse().map_err(|_| ParseError {
                                line: *l,
                                col: *c,
                                message: format!("trunc must be an integer, found `{v}`"),
                            })?;
                    }
                    "cleanup" => config.cleanup = parse_bool(&v, *l, *c)?,
                    "masses_equal" => config.masses_equal = parse_bool(&v, *l, *c)?,
                    "bch_cleanup_first_order_only" => {
                        config.bch_cleanup_first_order_only = parse_bool(&v, *l, *c)?
                    }
                    "max_rounds" => {
                        config.max_rounds = v.parse().map_err(|_| ParseError {
                            line: *l,
                            col: *c,
                            message: format!("max_rounds must be a positive integer, found `{v}`"),
                        })?;
                    }
                    "one_body" => one_body = parse_bool(&v, *l, *c)?,
                    "mass1" => numeric.m1 = parse_numeric(&v, *l, *c)?,
                    "mass2" => numeric.m2 = parse_numeric(&v, *l, *c)?,
                    "c_values" => numeric.c_values = parse_number_list(&v, *l, *c)?,
                    "seed" => {
                        numeric.seed = v.parse().map_err(|_| ParseError {
                            line: *l,
                            col: *c,
                            message: format!("seed must be a nonnegative integer, found `{v}`"),
                        })?;
                    }
                    "aux_dim" => {
                        numeric.aux_dim = v.parse().map_err(|_| ParseError {
                            line: *l,
                            col: *c,
                            message: format!("aux_dim must be a positive integer, found `{v}`"),
                        })?;
                        if numeric.aux_dim == 0 {
                            return err(*l, *c, "aux_dim must be at least 1");
                        }
                    }
                    other => {
                        return err(*l, *c, format!("unknown config key `{other}`"));
                    }
                }
            }
            _ => {}
        }
    }
    let hamiltonian = match hamiltonian {
        Some(h) => h,
        None => return err(1, 1, "problem file does not define H"),
    };
    Ok(ProblemFile {
        table,
        hamiltonian,
        config,
        one_body,
        numeric,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_problem() {
        let p = parse_problem(
            "symbol OE odd even order 1;\nH = b1*m1*c^2 + OE;\n",
        )
        .unwrap();
        assert!(p.table.lookup("OE").is_some());
        assert_eq!(p.hamiltonian.num_terms(), 2);
    }

    #[test]
    fn sugar_expansion() {
        let p = parse_problem(
            "symbol OE odd even order 1;\nsymbol EO even odd order 1;\nsymbol OO odd odd order 0;\nH = comm(OE, acomm(EO, OO));\n",
        )
        .unwrap();
        assert_eq!(p.hamiltonian.num_terms(), 4);
    }

    #[test]
    fn coefficient_factors() {
        let p = parse_problem("symbol OE odd even order 1;\nH = (1/2)*i*b1*c^-2*OE;\n").unwrap();
        let (k, c) = p.hamiltonian.terms().next().unwrap();
        assert_eq!(k.beta, (1, 0));
        assert_eq!(k.c_exp, -2);
        assert_eq!(c.im, PolyRatio::rational(1, 2));
        assert!(c.re.is_zero());
    }

    #[test]
    fn errors_have_positions() {
        let e = parse_problem("symbol OE odd even order 1;\nH = OE + XX;\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("undeclared symbol"));

        let e = parse_problem("symbol OE odd even order 1;\nH = c^(1/2)*OE;\n").unwrap_err();
        assert!(e.message.contains("exponent"), "{e}");

        let e = parse_problem("symbol OE odd even order 1;\nH = 1/0 * OE;\n").unwrap_err();
        assert!(e.message.contains("zero denominator"));

        let e = parse_problem("set nonsense = 1;\nsymbol OE odd even order 1;\nH = OE;").unwrap_err();
        assert!(e.message.contains("unknown config key"));
    }

    #[test]
    fn config_block() {
        let p = parse_problem(
            "symbol EE even even order 0;\nH = EE;\nset sequence = oo,oe,eo;\nset trunc = -2;\nset cleanup = true;\nset mass1 = 1;\nset mass2 = 3/2;\nset c_values = 8,16,32,64;\nset seed = 42;\nset aux_dim = 3;\n",
        )
        .unwrap();
        assert_eq!(
            p.config.sequence,
            vec![SectorKind::Oo, SectorKind::Oe, SectorKind::Eo]
        );
        assert_eq!(p.config.trunc_order, -2);
        assert!(p.config.cleanup);
        assert_eq!(p.numeric.m2, 1.5);
        assert_eq!(p.numeric.c_values.len(), 4);
        assert_eq!(p.numeric.seed, 42);
        assert_eq!(p.numeric.aux_dim, 3);
    }

    #[test]
    fn relation_after_h_still_canonicalizes() {
        let a = parse_problem(
            "symbol OE odd even order 1;\nsymbol EO even odd order 1;\nH = EO*OE;\ncommute OE EO;\n",
        )
        .unwrap();
        let b = parse_problem(
            "symbol OE odd even order 1;\nsymbol EO even odd order 1;\ncommute OE EO;\nH = OE*EO;\n",
        )
        .unwrap();
        assert_eq!(a.hamiltonian, b.hamiltonian);
    }

    #[test]
    fn negative_group_power_inverts_scalars_only() {
        let p = parse_problem(
            "symbol EE even even order 0;\nH = (m1^2 - m2^2)^-1 * EE;\n",
        )
        .unwrap();
        let (_, c) = p.hamiltonian.terms().next().unwrap();
        assert_eq!(c.re.den().to_string(), "m1^2 - m2^2");
        let e = parse_problem("symbol EE even even order 0;\nH = (EE)^-1;\n").unwrap_err();
        assert!(e.message.contains("non-scalar"));
    }
}
