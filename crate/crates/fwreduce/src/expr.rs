//! Canonical graded noncommutative expressions.
//!
//! An [`Expression`] is a finite sum of monomials `coeff * b1^e1 * b2^e2 *
//! c^k * x_1 x_2 ... x_n` keyed by `(beta, word, c_exp)`. Invariants held by
//! construction:
//!
//! * beta exponents live in {0,1}; `b1^2 = b2^2 = 1` is always applied and
//!   beta factors sit to the left of the word,
//! * words are in the lexicographic normal form of the trace monoid induced
//!   by the table's commutation relations,
//! * no stored coefficient is zero.
//!
//! Structural equality of canonical forms is the algebra's notion of
//! equality, so `PartialEq` is the `equals` operation and `a - b == 0` agrees
//! with `a == b`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{Coefficient, PolyRatio};
use crate::poly::{IntPoly, MassVar};
use crate::table::{Parity, SymbolId, SymbolTable};

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("symbol `{0}` is not Hermitian; adjoint is only defined for Hermitian symbols")]
    NonHermitianSymbol(String),
    #[error("mass limit diverges on monomial `{0}`")]
    MassLimitDiverges(String),
    #[error("symbol `{0}` is not declared in the target table")]
    UnknownSymbol(String),
    #[error("coefficient inversion of zero or non-scalar expression")]
    NotInvertible,
}

/// The key of one canonical monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonomialKey {
    /// (e1, e2) exponents of b1, b2, each 0 or 1.
    pub beta: (u8, u8),
    /// Canonical symbol word.
    pub word: Vec<SymbolId>,
    /// Explicit power of c.
    pub c_exp: i32,
}

impl MonomialKey {
    pub fn scalar() -> Self {
        MonomialKey {
            beta: (0, 0),
            word: Vec::new(),
            c_exp: 0,
        }
    }
}

/// Kind of bracket: commutator `[a,b]` or anticommutator `[a,b]_+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    Commutator,
    Anticommutator,
}

/// A canonical sum of monomials over a fixed symbol table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expression {
    table: Arc<SymbolTable>,
    terms: BTreeMap<MonomialKey, Coefficient>,
}

fn same_table(a: &Arc<SymbolTable>, b: &Arc<SymbolTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Lexicographic normal form of the trace monoid: repeatedly extract the
/// smallest symbol (by declaration order) that commutes with everything
/// before it. A symbol trivially commutes with itself, so equal letters never
/// block each other; on ties the leftmost occurrence is taken.
fn normal_form(table: &SymbolTable, word: &[SymbolId]) -> Vec<SymbolId> {
    let mut remaining: Vec<SymbolId> = word.to_vec();
    let mut out = Vec::with_capacity(word.len());
    while !remaining.is_empty() {
        let mut best: Option<(SymbolId, usize)> = None;
        for (i, &x) in remaining.iter().enumerate() {
            if remaining[..i].iter().all(|&y| table.commutes(x, y)) {
                match best {
                    None => best = Some((x, i)),
                    Some((bx, _)) if x < bx => best = Some((x, i)),
                    _ => {}
                }
            }
        }
        let (_, i) = best.expect("front position is always available");
        out.push(remaining.remove(i));
    }
    out
}

/// Sign picked up by moving `b1^e1 b2^e2` left through `word`: -1 for every
/// odd-in-1 letter passed by b1 and every odd-in-2 letter passed by b2.
fn beta_move_sign(table: &SymbolTable, word: &[SymbolId], beta: (u8, u8)) -> i64 {
    let mut flips = 0usize;
    if beta.0 == 1 {
        flips += word
            .iter()
            .filter(|s| table.decl(**s).parity.p1.is_odd())
            .count();
    }
    if beta.1 == 1 {
        flips += word
            .iter()
            .filter(|s| table.decl(**s).parity.p2.is_odd())
            .count();
    }
    if flips % 2 == 0 {
        1
    } else {
        -1
    }
}

impl Expression {
    pub fn zero(table: &Arc<SymbolTable>) -> Self {
        Expression {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(table: &Arc<SymbolTable>, coeff: Coefficient) -> Self {
        let mut e = Expression::zero(table);
        e.insert(MonomialKey::scalar(), coeff);
        e
    }

    pub fn one(table: &Arc<SymbolTable>) -> Self {
        Expression::scalar(table, Coefficient::one())
    }

    pub fn rational(table: &Arc<SymbolTable>, num: i64, den: i64) -> Self {
        Expression::scalar(table, Coefficient::rational(num, den))
    }

    /// The imaginary unit as a scalar expression.
    pub fn i(table: &Arc<SymbolTable>) -> Self {
        Expression::scalar(table, Coefficient::i())
    }

    /// The mass m1 or m2 as a scalar coefficient.
    pub fn mass(table: &Arc<SymbolTable>, var: MassVar) -> Self {
        let p = match var {
            MassVar::M1 => IntPoly::m1(),
            MassVar::M2 => IntPoly::m2(),
        };
        Expression::scalar(table, Coefficient::real(PolyRatio::from_poly(p)))
    }

    pub fn symbol(table: &Arc<SymbolTable>, name: &str) -> Self {
        let id = table
            .lookup(name)
            .unwrap_or_else(|| panic!("symbol `{name}` not declared in table"));
        let mut e = Expression::zero(table);
        e.insert(
            MonomialKey {
                beta: (0, 0),
                word: vec![id],
                c_exp: 0,
            },
            Coefficient::one(),
        );
        e
    }

    pub fn beta1(table: &Arc<SymbolTable>) -> Self {
        let mut e = Expression::zero(table);
        e.insert(
            MonomialKey {
                beta: (1, 0),
                word: Vec::new(),
                c_exp: 0,
            },
            Coefficient::one(),
        );
        e
    }

    pub fn beta2(table: &Arc<SymbolTable>) -> Self {
        let mut e = Expression::zero(table);
        e.insert(
            MonomialKey {
                beta: (0, 1),
                word: Vec::new(),
                c_exp: 0,
            },
            Coefficient::one(),
        );
        e
    }

    pub fn c_pow(table: &Arc<SymbolTable>, k: i32) -> Self {
        let mut e = Expression::zero(table);
        e.insert(
            MonomialKey {
                beta: (0, 0),
                word: Vec::new(),
                c_exp: k,
            },
            Coefficient::one(),
        );
        e
    }

    /// `b1 m1 c^2 + b2 m2 c^2`.
    pub fn rest_energy_two_body(table: &Arc<SymbolTable>) -> Self {
        let b1 = Expression::beta1(table);
        let b2 = Expression::beta2(table);
        let m1 = Expression::mass(table, MassVar::M1);
        let m2 = Expression::mass(table, MassVar::M2);
        let c2 = Expression::c_pow(table, 2);
        &(&(&b1 * &m1) * &c2) + &(&(&b2 * &m2) * &c2)
    }

    /// `b1 m1 c^2` (the single-particle rest term; the one-body machinery
    /// uses particle slot 1).
    pub fn rest_energy_one_body(table: &Arc<SymbolTable>) -> Self {
        let b1 = Expression::beta1(table);
        let m1 = Expression::mass(table, MassVar::M1);
        let c2 = Expression::c_pow(table, 2);
        &(&b1 * &m1) * &c2
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &MonomialKey) -> Option<&Coefficient> {
        self.terms.get(key)
    }

    fn insert(&mut self, key: MonomialKey, coeff: Coefficient) {
        use std::collections::btree_map::Entry;
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let sum = &*e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Parity sector of a monomial word (beta factors count as even-even).
    pub fn word_parity(&self, word: &[SymbolId]) -> Parity {
        word.iter().fold(Parity::EVEN_EVEN, |acc, s| {
            acc.compose(self.table.decl(*s).parity)
        })
    }

    /// Effective order: explicit c power plus the intrinsic orders of the
    /// word's symbols. Computed, never stored.
    pub fn effective_order(&self, key: &MonomialKey) -> i32 {
        key.c_exp
            + key
                .word
                .iter()
                .map(|s| self.table.decl(*s).c_order)
                .sum::<i32>()
    }

    pub fn max_effective_order(&self) -> Option<i32> {
        self.terms.keys().map(|k| self.effective_order(k)).max()
    }

    pub fn min_effective_order(&self) -> Option<i32> {
        self.terms.keys().map(|k| self.effective_order(k)).min()
    }

    pub fn scale(&self, coeff: &Coefficient) -> Expression {
        let mut out = Expression::zero(&self.table);
        for (k, c) in &self.terms {
            out.insert(k.clone(), c * coeff);
        }
        out
    }

    pub fn multiply(&self, other: &Expression) -> Expression {
        assert!(
            same_table(&self.table, &other.table),
            "expressions over different symbol tables"
        );
        let mut out = Expression::zero(&self.table);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let sign = beta_move_sign(&self.table, &ka.word, kb.beta);
                let beta = (ka.beta.0 ^ kb.beta.0, ka.beta.1 ^ kb.beta.1);
                let mut word = ka.word.clone();
                word.extend_from_slice(&kb.word);
                let word = normal_form(&self.table, &word);
                let mut coeff = ca * cb;
                if sign < 0 {
                    coeff = -&coeff;
                }
                out.insert(
                    MonomialKey {
                        beta,
                        word,
                        c_exp: ka.c_exp + kb.c_exp,
                    },
                    coeff,
                );
            }
        }
        out
    }

    pub fn bracket(kind: BracketKind, a: &Expression, b: &Expression) -> Expression {
        let ab = a.multiply(b);
        let ba = b.multiply(a);
        match kind {
            BracketKind::Commutator => &ab - &ba,
            BracketKind::Anticommutator => &ab + &ba,
        }
    }

    /// Adjoint: reverse words, conjugate coefficients, re-normalize beta
    /// placement. Only defined when every symbol present is Hermitian.
    pub fn adjoint(&self) -> Result<Expression, AlgebraError> {
        for k in self.terms.keys() {
            for s in &k.word {
                let d = self.table.decl(*s);
                if !d.hermitian {
                    return Err(AlgebraError::NonHermitianSymbol(d.name.clone()));
                }
            }
        }
        let mut out = Expression::zero(&self.table);
        for (k, c) in &self.terms {
            let sign = beta_move_sign(&self.table, &k.word, k.beta);
            let mut word: Vec<SymbolId> = k.word.clone();
            word.reverse();
            let word = normal_form(&self.table, &word);
            let mut coeff = c.conj();
            if sign < 0 {
                coeff = -&coeff;
            }
            out.insert(
                MonomialKey {
                    beta: k.beta,
                    word,
                    c_exp: k.c_exp,
                },
                coeff,
            );
        }
        Ok(out)
    }

    pub fn is_hermitian(&self) -> Result<bool, AlgebraError> {
        Ok(self.adjoint()? == *self)
    }

    /// The sub-sum of monomials whose word parity equals `sector`.
    pub fn project(&self, sector: Parity) -> Expression {
        let mut out = Expression::zero(&self.table);
        for (k, c) in &self.terms {
            if self.word_parity(&k.word) == sector {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        out
    }

    /// Everything outside one sector.
    pub fn project_out(&self, sector: Parity) -> Expression {
        let mut out = Expression::zero(&self.table);
        for (k, c) in &self.terms {
            if self.word_parity(&k.word) != sector {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        out
    }

    /// Drop every monomial with effective order below `min_order`.
    pub fn truncate(&self, min_order: i32) -> Expression {
        let mut out = Expression::zero(&self.table);
        for (k, c) in &self.terms {
            if self.effective_order(k) >= min_order {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        out
    }

    pub fn filter<F: Fn(&MonomialKey, &Coefficient) -> bool>(&self, f: F) -> Expression {
        let mut out = Expression::zero(&self.table);
        for (k, c) in &self.terms {
            if f(k, c) {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        out
    }

    /// Asymptotic limit as one mass grows without bound. Coefficients with
    /// negative asymptotic degree drop, zero-degree coefficients become their
    /// finite limits, positive degree is an error naming the monomial (the
    /// caller removes the diverging rest-energy term first).
    pub fn mass_limit(&self, particle: u8) -> Result<Expression, AlgebraError> {
        let var = match particle {
            1 => MassVar::M1,
            2 => MassVar::M2,
            _ => panic!("particle must be 1 or 2"),
        };
        let mut out = Expression::zero(&self.table);
        for (k, c) in &self.terms {
            let lim_re = c.re.mass_limit(var);
            let lim_im = c.im.mass_limit(var);
            match (lim_re, lim_im) {
                (Some(re), Some(im)) => {
                    out.insert(k.clone(), Coefficient::new(re, im));
                }
                _ => {
                    return Err(AlgebraError::MassLimitDiverges(format!(
                        "{} * {}",
                        c,
                        self.describe_key(k)
                    )));
                }
            }
        }
        Ok(out)
    }

    /// Rebuild this expression over another table, renaming symbols through
    /// `mapping` (old name -> new name; unlisted names map to themselves).
    /// Words are re-canonicalized under the target table's relations.
    pub fn map_symbols(
        &self,
        target: &Arc<SymbolTable>,
        mapping: &[(&str, &str)],
    ) -> Result<Expression, AlgebraError> {
        let mut out = Expression::zero(target);
        for (k, c) in &self.terms {
            let mut word = Vec::with_capacity(k.word.len());
            for s in &k.word {
                let old_name = &self.table.decl(*s).name;
                let new_name = mapping
                    .iter()
                    .find(|(from, _)| from == old_name)
                    .map(|(_, to)| *to)
                    .unwrap_or(old_name.as_str());
                let id = target
                    .lookup(new_name)
                    .ok_or_else(|| AlgebraError::UnknownSymbol(new_name.to_string()))?;
                word.push(id);
            }
            let word = normal_form(target, &word);
            out.insert(
                MonomialKey {
                    beta: k.beta,
                    word,
                    c_exp: k.c_exp,
                },
                c.clone(),
            );
        }
        Ok(out)
    }

    /// Human-readable form of a monomial key (word by names).
    pub fn describe_key(&self, k: &MonomialKey) -> String {
        let mut parts = Vec::new();
        if k.beta.0 == 1 {
            parts.push("b1".to_string());
        }
        if k.beta.1 == 1 {
            parts.push("b2".to_string());
        }
        if k.c_exp != 0 {
            parts.push(format!("c^{}", k.c_exp));
        }
        for s in &k.word {
            parts.push(self.table.decl(*s).name.clone());
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    pub fn pow(&self, n: u32) -> Expression {
        let mut acc = Expression::one(&self.table);
        for _ in 0..n {
            acc = acc.multiply(self);
        }
        acc
    }
}

impl Add for &Expression {
    type Output = Expression;
    fn add(self, rhs: &Expression) -> Expression {
        assert!(
            same_table(&self.table, &rhs.table),
            "expressions over different symbol tables"
        );
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Expression {
    type Output = Expression;
    fn sub(self, rhs: &Expression) -> Expression {
        assert!(
            same_table(&self.table, &rhs.table),
            "expressions over different symbol tables"
        );
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert(k.clone(), -c);
        }
        out
    }
}

impl Mul for &Expression {
    type Output = Expression;
    fn mul(self, rhs: &Expression) -> Expression {
        self.multiply(rhs)
    }
}

impl Neg for &Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        let mut out = Expression::zero(&self.table);
        for (k, c) in &self.terms {
            out.terms.insert(k.clone(), -c);
        }
        out
    }
}

/// `[a, b]`.
pub fn comm(a: &Expression, b: &Expression) -> Expression {
    Expression::bracket(BracketKind::Commutator, a, b)
}

/// `[a, b]_+`.
pub fn acomm(a: &Expression, b: &Expression) -> Expression {
    Expression::bracket(BracketKind::Anticommutator, a, b)
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::render::text(self))
    }
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyTermWire {
    pub coef: String,
    pub d1: u32,
    pub d2: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RatioWire {
    pub num: Vec<PolyTermWire>,
    pub den: Vec<PolyTermWire>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CoeffWire {
    pub real: RatioWire,
    pub imag: RatioWire,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermWire {
    pub beta: [u8; 2],
    pub word: Vec<String>,
    pub c_exp: i32,
    pub coeff: CoeffWire,
}

#[derive(Debug, Error)]
pub enum WireError {
    #[error("unknown symbol `{0}` in serialized expression")]
    UnknownSymbol(String),
    #[error("malformed integer `{0}` in serialized polynomial")]
    BadInteger(String),
    #[error("zero denominator in serialized coefficient")]
    ZeroDenominator,
}

fn poly_to_wire(p: &IntPoly) -> Vec<PolyTermWire> {
    p.terms()
        .map(|((d1, d2), c)| PolyTermWire {
            coef: c.to_string(),
            d1: *d1,
            d2: *d2,
        })
        .collect()
}

fn poly_from_wire(w: &[PolyTermWire]) -> Result<IntPoly, WireError> {
    let mut acc = IntPoly::zero();
    for t in w {
        let c: num_bigint::BigInt = t
            .coef
            .parse()
            .map_err(|_| WireError::BadInteger(t.coef.clone()))?;
        acc = acc.add(&IntPoly::monomial(c, t.d1, t.d2));
    }
    Ok(acc)
}

fn ratio_to_wire(r: &PolyRatio) -> RatioWire {
    RatioWire {
        num: poly_to_wire(r.num()),
        den: poly_to_wire(r.den()),
    }
}

fn ratio_from_wire(w: &RatioWire) -> Result<PolyRatio, WireError> {
    let num = poly_from_wire(&w.num)?;
    let den = poly_from_wire(&w.den)?;
    if den.is_zero() {
        return Err(WireError::ZeroDenominator);
    }
    Ok(PolyRatio::new(num, den))
}

impl Expression {
    /// Serialize to the wire form: an array of terms in canonical key order.
    pub fn to_wire(&self) -> Vec<TermWire> {
        self.terms
            .iter()
            .map(|(k, c)| TermWire {
                beta: [k.beta.0, k.beta.1],
                word: k
                    .word
                    .iter()
                    .map(|s| self.table.decl(*s).name.clone())
                    .collect(),
                c_exp: k.c_exp,
                coeff: CoeffWire {
                    real: ratio_to_wire(&c.re),
                    imag: ratio_to_wire(&c.im),
                },
            })
            .collect()
    }

    pub fn from_wire(table: &Arc<SymbolTable>, wire: &[TermWire]) -> Result<Expression, WireError> {
        let mut out = Expression::zero(table);
        for t in wire {
            let mut word = Vec::with_capacity(t.word.len());
            for name in &t.word {
                let id = table
                    .lookup(name)
                    .ok_or_else(|| WireError::UnknownSymbol(name.clone()))?;
                word.push(id);
            }
            let word = normal_form(table, &word);
            let coeff = Coefficient::new(
                ratio_from_wire(&t.coeff.real)?,
                ratio_from_wire(&t.coeff.imag)?,
            );
            out.insert(
                MonomialKey {
                    beta: (t.beta[0] % 2, t.beta[1] % 2),
                    word,
                    c_exp: t.c_exp,
                },
                coeff,
            );
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("wire form serializes")
    }

    pub fn from_json(table: &Arc<SymbolTable>, json: &str) -> Result<Expression, WireError> {
        let wire: Vec<TermWire> =
            serde_json::from_str(json).map_err(|e| WireError::BadInteger(e.to_string()))?;
        Expression::from_wire(table, &wire)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_body(rel: bool) -> Arc<SymbolTable> {
        SymbolTable::two_body(rel)
    }

    #[test]
    fn beta_normalization_signs() {
        let t = two_body(false);
        let b1 = Expression::beta1(&t);
        let oe = Expression::symbol(&t, "OE");

        // b1 * OE keeps +1.
        let left = &b1 * &oe;
        let (k, c) = left.terms().next().unwrap();
        assert_eq!(k.beta, (1, 0));
        assert_eq!(c, &Coefficient::one());

        // OE * b1 picks up -1 (OE is odd in particle 1).
        let right = &oe * &b1;
        let (k, c) = right.terms().next().unwrap();
        assert_eq!(k.beta, (1, 0));
        assert_eq!(c, &Coefficient::int(-1));

        // b1^2 = 1.
        assert_eq!(&b1 * &b1, Expression::one(&t));
    }

    #[test]
    fn relation_sorts_words() {
        let t = two_body(true);
        let oe = Expression::symbol(&t, "OE");
        let eo = Expression::symbol(&t, "EO");
        let prod = &eo * &oe;
        let (k, c) = prod.terms().next().unwrap();
        let names: Vec<_> = k.word.iter().map(|s| t.decl(*s).name.clone()).collect();
        assert_eq!(names, vec!["OE", "EO"]);
        assert_eq!(c, &Coefficient::one());
        // And the commutator vanishes.
        assert!(comm(&oe, &eo).is_zero());
    }

    #[test]
    fn no_relation_keeps_order() {
        let t = two_body(false);
        let oe = Expression::symbol(&t, "OE");
        let eo = Expression::symbol(&t, "EO");
        assert!(!comm(&oe, &eo).is_zero());
        let prod = &eo * &oe;
        let (k, _) = prod.terms().next().unwrap();
        let names: Vec<_> = k.word.iter().map(|s| t.decl(*s).name.clone()).collect();
        assert_eq!(names, vec!["EO", "OE"]);
    }

    #[test]
    fn self_commutator_vanishes() {
        let t = two_body(false);
        let x = &Expression::symbol(&t, "OE") + &Expression::symbol(&t, "OO");
        assert!(comm(&x, &x).is_zero());
    }

    #[test]
    fn anticommutator_with_beta() {
        // [b1*OE, b1*OE]_+ = -2*(OE)^2 with beta (0,0): moving the second b1
        // left past the odd-in-1 letter flips the sign, then b1^2 = 1.
        let t = two_body(false);
        let x = &Expression::beta1(&t) * &Expression::symbol(&t, "OE");
        let a = acomm(&x, &x);
        assert_eq!(a.num_terms(), 1);
        let (k, c) = a.terms().next().unwrap();
        assert_eq!(k.beta, (0, 0));
        assert_eq!(k.word.len(), 2);
        assert_eq!(c, &Coefficient::int(-2));
    }

    #[test]
    fn adjoint_involution_and_antihomomorphism() {
        let t = two_body(true);
        let oe = Expression::symbol(&t, "OE");
        let eo = Expression::symbol(&t, "EO");
        let oo = Expression::symbol(&t, "OO");
        let x = &(&oe * &eo) + &(&Expression::i(&t) * &oo);
        let y = &(&Expression::beta1(&t) * &oo) + &eo;
        assert_eq!(x.adjoint().unwrap().adjoint().unwrap(), x);
        let lhs = (&x * &y).adjoint().unwrap();
        let rhs = &y.adjoint().unwrap() * &x.adjoint().unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn adjoint_of_i_oe_eo() {
        // adjoint(i*OE*EO) = -i*EO*OE = -i*OE*EO under the relation.
        let t = two_body(true);
        let x = &(&Expression::i(&t) * &Expression::symbol(&t, "OE"))
            * &Expression::symbol(&t, "EO");
        assert_eq!(x.adjoint().unwrap(), -&x);
    }

    #[test]
    fn projections_partition() {
        let t = two_body(false);
        let h = &(&Expression::rest_energy_two_body(&t) + &Expression::symbol(&t, "OE"))
            + &(&Expression::symbol(&t, "EO") * &Expression::symbol(&t, "OO"));
        let mut sum = Expression::zero(&t);
        for sector in Parity::ALL {
            let p = h.project(sector);
            // idempotent
            assert_eq!(p.project(sector), p);
            sum = &sum + &p;
        }
        assert_eq!(sum, h);
        // OE and EO*OO are both odd in particle 1, even in particle 2.
        let oe_part = h.project(Parity::ODD_EVEN);
        assert_eq!(oe_part.num_terms(), 2);
    }

    #[test]
    fn truncation_thresholds() {
        let t = two_body(false);
        let rest = Expression::rest_energy_two_body(&t);
        let low = &Expression::symbol(&t, "OE") * &Expression::c_pow(&t, -6);
        let h = &rest + &low;
        // order of low term: 1 - 6 = -5 < -4 -> dropped
        assert_eq!(h.truncate(-4), rest);
        // (OE)^6 / c^10 has order -4 -> kept
        let oe6 = &Expression::symbol(&t, "OE").pow(6) * &Expression::c_pow(&t, -10);
        assert_eq!(oe6.truncate(-4), oe6);
        assert!(Expression::zero(&t).truncate(-4).is_zero());
    }

    #[test]
    fn mass_limit_examples() {
        let t = two_body(false);
        // (b1 m1 - b2 m2) / (2 (m1^2 - m2^2)) * (OO)^2 drops as m2 -> inf.
        let num = &(&Expression::beta1(&t) * &Expression::mass(&t, MassVar::M1))
            - &(&Expression::beta2(&t) * &Expression::mass(&t, MassVar::M2));
        let den_inv = Coefficient::real(PolyRatio::new(
            IntPoly::one(),
            IntPoly::m1()
                .pow(2)
                .sub(&IntPoly::m2().pow(2))
                .mul_int(&num_bigint::BigInt::from(2)),
        ));
        let coeff = Expression::scalar(&t, den_inv);
        let oo2 = Expression::symbol(&t, "OO").pow(2);
        let term = &(&num * &coeff) * &oo2;
        assert!(term.mass_limit(2).unwrap().is_zero());

        // b1 (OE)^2 / (2 m1 c^2) survives unchanged.
        let t2 = &(&Expression::beta1(&t) * &Expression::symbol(&t, "OE").pow(2))
            * &Expression::scalar(
                &t,
                Coefficient::real(PolyRatio::new(
                    IntPoly::one(),
                    IntPoly::m1().mul_int(&num_bigint::BigInt::from(2)),
                )),
            );
        assert_eq!(t2.mass_limit(2).unwrap(), t2);

        // The diverging rest term is an error.
        let rest2 = &(&Expression::beta2(&t) * &Expression::mass(&t, MassVar::M2))
            * &Expression::c_pow(&t, 2);
        assert!(rest2.mass_limit(2).is_err());
    }

    #[test]
    fn wire_round_trip() {
        let t = two_body(true);
        let x = &(&Expression::rest_energy_two_body(&t)
            + &(&Expression::symbol(&t, "OE") * &Expression::symbol(&t, "EO")))
            + &Expression::scalar(
                &t,
                Coefficient::new(PolyRatio::rational(-3, 7), PolyRatio::rational(1, 2)),
            );
        let json = x.to_json();
        let back = Expression::from_json(&t, &json).unwrap();
        assert_eq!(back, x);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn normal_form_is_trace_invariant() {
        // Letters a < b < c with {a,c} and {a,b} commuting but not {b,c}:
        // "312"-style words must normalize past local minima.
        let mut t = SymbolTable::new();
        t = t.declare(SymbolDecl::new("A", Parity::EVEN_EVEN, 0)).unwrap();
        t = t.declare(SymbolDecl::new("B", Parity::EVEN_EVEN, 0)).unwrap();
        t = t.declare(SymbolDecl::new("C", Parity::EVEN_EVEN, 0)).unwrap();
        t = t.declare_commuting("A", "C").unwrap();
        t = t.declare_commuting("A", "B").unwrap();
        let t = Arc::new(t);
        let a = Expression::symbol(&t, "A");
        let b = Expression::symbol(&t, "B");
        let c = Expression::symbol(&t, "C");
        // C*A*B == C*B*A ? No: A,B commute so CAB == CBA; and A can cross C:
        // CAB ~ ACB; lex least of {CAB, ACB, CBA} is ACB.
        let cab = &(&c * &a) * &b;
        let acb = &(&a * &c) * &b;
        let cba = &(&c * &b) * &a;
        assert_eq!(cab, acb);
        assert_eq!(cab, cba);
        let (k, _) = cab.terms().next().unwrap();
        let names: Vec<_> = k.word.iter().map(|s| t.decl(*s).name.clone()).collect();
        assert_eq!(names, vec!["A", "C", "B"]);
    }

    use crate::table::SymbolDecl;
}
