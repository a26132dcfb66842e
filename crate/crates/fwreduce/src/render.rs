//! Deterministic text, LaTeX, and JSON rendering of expressions.
//!
//! Text output is grammar-compatible with the problem-file parser, so
//! `parse(render(x))` reconstructs an equal expression. Monomials are sorted
//! by (effective order descending, beta, word lex).

use num_bigint::BigInt;
use num_traits::Signed;

use crate::coeff::{Coefficient, PolyRatio};
use crate::expr::{Expression, MonomialKey};
use crate::poly::IntPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

pub fn render(expr: &Expression, format: Format) -> String {
    match format {
        Format::Text => text(expr),
        Format::Latex => latex(expr),
        Format::Json => expr.to_json(),
    }
}

fn sorted_keys(expr: &Expression) -> Vec<&MonomialKey> {
    let mut keys: Vec<&MonomialKey> = expr.terms().map(|(k, _)| k).collect();
    keys.sort_by(|a, b| {
        expr.effective_order(b)
            .cmp(&expr.effective_order(a))
            .then_with(|| a.beta.cmp(&b.beta))
            .then_with(|| a.word.cmp(&b.word))
            .then_with(|| a.c_exp.cmp(&b.c_exp))
    });
    keys
}

// --------------------------------------------------------------------------
// Text
// --------------------------------------------------------------------------

/// True when the fraction is a single monomial over a single monomial.
fn simple_parts(r: &PolyRatio) -> Option<(BigInt, BigInt, i64, i64)> {
    if r.num().num_terms() != 1 || r.den().num_terms() != 1 {
        return None;
    }
    let ((n1, n2), nc) = r.num().terms().next().unwrap();
    let ((d1, d2), dc) = r.den().terms().next().unwrap();
    Some((
        nc.clone(),
        dc.clone(),
        *n1 as i64 - *d1 as i64,
        *n2 as i64 - *d2 as i64,
    ))
}

fn mass_factor(name: &str, pow: i64, out: &mut Vec<String>) {
    if pow == 1 {
        out.push(name.to_string());
    } else if pow != 0 {
        out.push(format!("{name}^{pow}"));
    }
}

fn ratio_text(r: &PolyRatio) -> String {
    if r.den().is_one() {
        format!("({})", r.num())
    } else {
        format!("(({}) * ({})^-1)", r.num(), r.den())
    }
}

/// Leading factors and trailing mass factors of one coefficient, plus an
/// overall sign flag. Mass powers render after the beta factors.
fn coeff_factors(c: &Coefficient) -> (bool, Vec<String>, Vec<String>) {
    let pure = |r: &PolyRatio, imag: bool| -> (bool, Vec<String>, Vec<String>) {
        let mut head = Vec::new();
        let mut mass = Vec::new();
        let neg;
        match simple_parts(r) {
            Some((nc, dc, p1, p2)) => {
                neg = nc.is_negative();
                let nabs = nc.abs();
                if dc == BigInt::from(1) {
                    head.push(format!("({nabs})"));
                } else {
                    head.push(format!("({nabs}/{dc})"));
                }
                if imag {
                    head.push("i".to_string());
                }
                mass_factor("m1", p1, &mut mass);
                mass_factor("m2", p2, &mut mass);
            }
            None => {
                neg = false;
                head.push(ratio_text(r));
                if imag {
                    head.push("i".to_string());
                }
            }
        }
        (neg, head, mass)
    };
    match (c.re.is_zero(), c.im.is_zero()) {
        (false, true) => pure(&c.re, false),
        (true, false) => pure(&c.im, true),
        _ => {
            // Mixed real and imaginary: a single parenthesized factor.
            (
                false,
                vec![format!("({} + {} * i)", ratio_text(&c.re), ratio_text(&c.im))],
                Vec::new(),
            )
        }
    }
}

fn term_text(expr: &Expression, key: &MonomialKey) -> (bool, String) {
    let coeff = expr.coefficient(key).expect("key comes from expr");
    let (neg, mut factors, mass) = coeff_factors(coeff);
    if key.beta.0 == 1 {
        factors.push("b1".to_string());
    }
    if key.beta.1 == 1 {
        factors.push("b2".to_string());
    }
    factors.extend(mass);
    if key.c_exp != 0 {
        factors.push(format!("c^{}", key.c_exp));
    }
    if !key.word.is_empty() {
        let word = key
            .word
            .iter()
            .map(|s| expr.table().decl(*s).name.clone())
            .collect::<Vec<_>>()
            .join("*");
        factors.push(word);
    }
    (neg, factors.join(" * "))
}

pub fn text(expr: &Expression) -> String {
    if expr.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, key) in sorted_keys(expr).iter().enumerate() {
        let (neg, body) = term_text(expr, key);
        if i == 0 {
            if neg {
                out.push_str("- ");
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
    out
}

// --------------------------------------------------------------------------
// LaTeX
// --------------------------------------------------------------------------

fn poly_latex(p: &IntPoly) -> String {
    p.to_string()
        .replace("m1", "m_1")
        .replace("m2", "m_2")
        .replace('*', " ")
        .replace('^', "^")
}

fn ratio_latex(r: &PolyRatio) -> String {
    if r.den().is_one() {
        poly_latex(r.num())
    } else {
        format!("\\frac{{{}}}{{{}}}", poly_latex(r.num()), poly_latex(r.den()))
    }
}

fn word_latex(expr: &Expression, key: &MonomialKey) -> String {
    // Group consecutive equal letters into powers.
    let mut out = String::new();
    let mut i = 0;
    while i < key.word.len() {
        let s = key.word[i];
        let mut j = i;
        while j < key.word.len() && key.word[j] == s {
            j += 1;
        }
        let name = &expr.table().decl(s).name;
        if j - i == 1 {
            out.push_str(&format!("(\\mathcal{{{name}}})"));
        } else {
            out.push_str(&format!("(\\mathcal{{{name}}})^{{{}}}", j - i));
        }
        i = j;
    }
    out
}

pub fn latex(expr: &Expression) -> String {
    if expr.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, key) in sorted_keys(expr).iter().enumerate() {
        let c = expr.coefficient(key).unwrap();
        let mut body = String::new();
        let neg;
        if c.im.is_zero() {
            neg = leading_negative(&c.re);
            body.push_str(&ratio_latex(&abs_ratio(&c.re)));
        } else if c.re.is_zero() {
            neg = leading_negative(&c.im);
            body.push_str("i\\,");
            body.push_str(&ratio_latex(&abs_ratio(&c.im)));
        } else {
            neg = false;
            body.push_str(&format!(
                "\\left({} + i\\,{}\\right)",
                ratio_latex(&c.re),
                ratio_latex(&c.im)
            ));
        }
        if key.beta.0 == 1 {
            body.push_str("\\beta_1");
        }
        if key.beta.1 == 1 {
            body.push_str("\\beta_2");
        }
        if key.c_exp != 0 {
            body.push_str(&format!("c^{{{}}}", key.c_exp));
        }
        body.push_str(&word_latex(expr, key));
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
    out
}

fn leading_negative(r: &PolyRatio) -> bool {
    r.num()
        .grlex_lead_coeff()
        .map(|c| c.is_negative())
        .unwrap_or(false)
}

fn abs_ratio(r: &PolyRatio) -> PolyRatio {
    if leading_negative(r) {
        r.neg()
    } else {
        r.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Coefficient;
    use crate::expr::Expression;
    use crate::poly::IntPoly;
    use crate::table::SymbolTable;
    use num_bigint::BigInt;

    #[test]
    fn fixed_formatting_rule() {
        let t = SymbolTable::two_body(false);
        // b1 (OE)^2 / (2 m1 c^2)
        let x = &(&(&Expression::beta1(&t) * &Expression::symbol(&t, "OE").pow(2))
            * &Expression::scalar(
                &t,
                Coefficient::real(PolyRatio::new(
                    IntPoly::one(),
                    IntPoly::m1().mul_int(&BigInt::from(2)),
                )),
            ))
            * &Expression::c_pow(&t, -2);
        assert_eq!(text(&x), "(1/2) * b1 * m1^-1 * c^-2 * OE*OE");
    }

    #[test]
    fn zero_renders_as_zero() {
        let t = SymbolTable::two_body(false);
        assert_eq!(text(&Expression::zero(&t)), "0");
    }

    #[test]
    fn latex_markup() {
        let t = SymbolTable::two_body(false);
        let x = &(&Expression::beta1(&t) * &Expression::symbol(&t, "OE").pow(2))
            * &Expression::c_pow(&t, -2);
        let s = latex(&x);
        assert!(s.contains("\\beta_1"));
        assert!(s.contains("c^{-2}"));
        assert!(s.contains("(\\mathcal{OE})^{2}"));
    }
}
