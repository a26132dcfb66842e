//! Hard-coded reference expressions for the shipped reduction pipelines, and
//! diff reporting for exact verification.
//!
//! Each [`ReferenceId`] names one reference form (the ids are part of the CLI
//! contract: `verify --against eq6` etc.). References are transcribed
//! term-by-term through the algebra with commutator sugar expanded
//! programmatically, never hand-expanded.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::coeff::{Coefficient, PolyRatio};
use crate::expr::{acomm, comm, Expression, MonomialKey};
use crate::poly::IntPoly;
use crate::table::SymbolTable;

/// Identifier of one reference expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReferenceId {
    Eq3Oe,
    Eq3Eo,
    Eq3Oo,
    Eq4,
    Eq6,
    Eq7,
    Eq8,
    Eq9,
    Eq26,
    Eq29a,
    Eq29b,
}

impl ReferenceId {
    pub const ALL: [ReferenceId; 11] = [
        ReferenceId::Eq3Oe,
        ReferenceId::Eq3Eo,
        ReferenceId::Eq3Oo,
        ReferenceId::Eq4,
        ReferenceId::Eq6,
        ReferenceId::Eq7,
        ReferenceId::Eq8,
        ReferenceId::Eq9,
        ReferenceId::Eq26,
        ReferenceId::Eq29a,
        ReferenceId::Eq29b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReferenceId::Eq3Oe => "eq3_oe",
            ReferenceId::Eq3Eo => "eq3_eo",
            ReferenceId::Eq3Oo => "eq3_oo",
            ReferenceId::Eq4 => "eq4",
            ReferenceId::Eq6 => "eq6",
            ReferenceId::Eq7 => "eq7",
            ReferenceId::Eq8 => "eq8",
            ReferenceId::Eq9 => "eq9",
            ReferenceId::Eq26 => "eq26",
            ReferenceId::Eq29a => "eq29a",
            ReferenceId::Eq29b => "eq29b",
        }
    }
}

impl FromStr for ReferenceId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ReferenceId::ALL
            .iter()
            .find(|id| id.name() == s.trim())
            .copied()
            .ok_or_else(|| format!("unknown reference id `{s}`"))
    }
}

impl fmt::Display for ReferenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum ReferenceError {
    #[error("reference `{id}` needs symbol `{symbol}` declared in the table")]
    MissingSymbol { id: &'static str, symbol: String },
    #[error("reference `{id}` needs the commutation relation between OE and EO")]
    MissingRelation { id: &'static str },
}

/// Builder helpers over one table; keeps the transcriptions close to their
/// printed forms.
struct Ctx {
    t: Arc<SymbolTable>,
}

impl Ctx {
    fn sym(&self, name: &str) -> Expression {
        Expression::symbol(&self.t, name)
    }
    fn b1(&self) -> Expression {
        Expression::beta1(&self.t)
    }
    fn b2(&self) -> Expression {
        Expression::beta2(&self.t)
    }
    fn c(&self, k: i32) -> Expression {
        Expression::c_pow(&self.t, k)
    }
    /// Real scalar num/den with a polynomial denominator.
    fn rp(&self, num: i64, den: IntPoly) -> Expression {
        Expression::scalar(
            &self.t,
            Coefficient::real(PolyRatio::new(IntPoly::int(num), den)),
        )
    }
    /// Imaginary scalar i*num/den.
    fn ip(&self, num: i64, den: IntPoly) -> Expression {
        Expression::scalar(
            &self.t,
            Coefficient::imaginary(PolyRatio::new(IntPoly::int(num), den)),
        )
    }
    /// b1*m1 - b2*m2.
    fn beta_mass_diff(&self) -> Expression {
        &(&self.b1() * &Expression::mass(&self.t, crate::poly::MassVar::M1))
            - &(&self.b2() * &Expression::mass(&self.t, crate::poly::MassVar::M2))
    }
    /// b1*m2 - b2*m1.
    fn beta_mass_crossed_diff(&self) -> Expression {
        &(&self.b1() * &Expression::mass(&self.t, crate::poly::MassVar::M2))
            - &(&self.b2() * &Expression::mass(&self.t, crate::poly::MassVar::M1))
    }
    /// b1*m2 + b2*m1.
    fn beta_mass_crossed_sum(&self) -> Expression {
        &(&self.b1() * &Expression::mass(&self.t, crate::poly::MassVar::M2))
            + &(&self.b2() * &Expression::mass(&self.t, crate::poly::MassVar::M1))
    }
    /// b1*m1 + b2*m2.
    fn beta_mass_sum(&self) -> Expression {
        &(&self.b1() * &Expression::mass(&self.t, crate::poly::MassVar::M1))
            + &(&self.b2() * &Expression::mass(&self.t, crate::poly::MassVar::M2))
    }
    fn scalar_poly(&self, p: IntPoly) -> Expression {
        Expression::scalar(&self.t, Coefficient::real(PolyRatio::from_poly(p)))
    }
}

fn m1p(k: u32) -> IntPoly {
    IntPoly::m1().pow(k)
}
fn m2p(k: u32) -> IntPoly {
    IntPoly::m2().pow(k)
}
fn mass_diff_sq() -> IntPoly {
    m1p(2).sub(&m2p(2))
}
fn times(p: IntPoly, n: i64) -> IntPoly {
    p.mul_int(&n.into())
}

fn require_symbols(
    id: &'static str,
    table: &Arc<SymbolTable>,
    names: &[&str],
) -> Result<(), ReferenceError> {
    for n in names {
        if table.lookup(n).is_none() {
            return Err(ReferenceError::MissingSymbol {
                id,
                symbol: n.to_string(),
            });
        }
    }
    Ok(())
}

fn require_relation(id: &'static str, table: &Arc<SymbolTable>) -> Result<(), ReferenceError> {
    let oe = table.lookup("OE").unwrap();
    let eo = table.lookup("EO").unwrap();
    if !table.commutes(oe, eo) {
        return Err(ReferenceError::MissingRelation { id });
    }
    Ok(())
}

/// Build one reference expression over the given table.
pub fn reference_expression(
    id: ReferenceId,
    table: &Arc<SymbolTable>,
) -> Result<Expression, ReferenceError> {
    match id {
        ReferenceId::Eq7 => require_symbols(id.name(), table, &["E", "O"])?,
        _ => require_symbols(id.name(), table, &["EE", "OE", "EO", "OO"])?,
    }
    if matches!(id, ReferenceId::Eq6 | ReferenceId::Eq8) {
        require_relation(id.name(), table)?;
    }
    let ctx = Ctx { t: table.clone() };
    Ok(match id {
        ReferenceId::Eq3Oe => first_gen_oe(&ctx),
        ReferenceId::Eq3Eo => first_gen_eo(&ctx),
        ReferenceId::Eq3Oo => first_gen_oo(&ctx),
        ReferenceId::Eq4 => second_order(&ctx),
        ReferenceId::Eq6 => fourth_order(&ctx),
        ReferenceId::Eq7 => one_body_fourth_order(&ctx),
        ReferenceId::Eq8 => extra_terms(&ctx),
        ReferenceId::Eq9 => cleanup_gen(&ctx),
        ReferenceId::Eq26 => even_even_gen_kinetic(&ctx),
        ReferenceId::Eq29a => even_even_gen_mixed_a(&ctx),
        ReferenceId::Eq29b => even_even_gen_mixed_b(&ctx),
    })
}

fn first_gen_oe(x: &Ctx) -> Expression {
    &(&(&x.b1() * &x.ip(-1, times(m1p(1), 2))) * &x.c(-2)) * &x.sym("OE")
}

fn first_gen_eo(x: &Ctx) -> Expression {
    &(&(&x.b2() * &x.ip(-1, times(m2p(1), 2))) * &x.c(-2)) * &x.sym("EO")
}

fn first_gen_oo(x: &Ctx) -> Expression {
    &(&(&x.beta_mass_diff() * &x.ip(-1, times(mass_diff_sq(), 2))) * &x.c(-2)) * &x.sym("OO")
}

/// The transformed Hamiltonian kept to second order, in its general
/// (relation-free) form.
fn second_order(x: &Ctx) -> Expression {
    let (ee, oe, eo, oo) = (x.sym("EE"), x.sym("OE"), x.sym("EO"), x.sym("OO"));
    let mut h = Expression::rest_energy_two_body(&x.t);
    // (EE)
    h = &h + &ee;
    // b_a (X)^2 / (2 m_a c^2)
    h = &h + &(&(&(&x.b1() * &x.rp(1, times(m1p(1), 2))) * &x.c(-2)) * &oe.pow(2));
    h = &h + &(&(&(&x.b2() * &x.rp(1, times(m2p(1), 2))) * &x.c(-2)) * &eo.pow(2));
    // [X,[(EE),X]] / (8 m_a^2 c^4)
    h = &h + &(&(&x.rp(1, times(m1p(2), 8)) * &x.c(-4)) * &comm(&oe, &comm(&ee, &oe)));
    h = &h + &(&(&x.rp(1, times(m2p(2), 8)) * &x.c(-4)) * &comm(&eo, &comm(&ee, &eo)));
    // - b_a (X)^4 / (8 m_a^3 c^6)
    h = &h + &(&(&(&x.b1() * &x.rp(-1, times(m1p(3), 8))) * &x.c(-6)) * &oe.pow(4));
    h = &h + &(&(&(&x.b2() * &x.rp(-1, times(m2p(3), 8))) * &x.c(-6)) * &eo.pow(4));
    // b1 b2 / (8 m1 m2 c^4) * { [OE,[EO,OO]+]+ + [EO,[OE,OO]+]+ }
    let pre_e = &(&(&x.b1() * &x.b2()) * &x.rp(1, times(m1p(1).mul(&m2p(1)), 8))) * &x.c(-4);
    h = &h + &(&pre_e * &(&acomm(&oe, &acomm(&eo, &oo)) + &acomm(&eo, &acomm(&oe, &oo))));
    // (b1 m1 - b2 m2) (OO)^2 / (2 (m1^2-m2^2) c^2)
    h = &h
        + &(&(&(&x.beta_mass_diff() * &x.rp(1, times(mass_diff_sq(), 2))) * &x.c(-2))
            * &oo.pow(2));
    // (b2 m1 - b1 m2) [OE,EO]^2 / (8 m1 m2 (m1^2-m2^2) c^6)
    let crossed = &(&x.b2() * &Expression::mass(&x.t, crate::poly::MassVar::M1))
        - &(&x.b1() * &Expression::mass(&x.t, crate::poly::MassVar::M2));
    h = &h
        + &(&(&(&crossed * &x.rp(1, times(m1p(1).mul(&m2p(1)).mul(&mass_diff_sq()), 8)))
            * &x.c(-6))
            * &comm(&oe, &eo).pow(2));
    // -(b1 m1 + b2 m2) [ (OE)^2, (EO)^2 ]_+ / (16 m1^2 m2^2 c^6)
    h = &h
        + &(&(&(&x.beta_mass_sum() * &x.rp(-1, times(m1p(2).mul(&m2p(2)), 16))) * &x.c(-6))
            * &acomm(&oe.pow(2), &eo.pow(2)));
    // b1 (EO)(OE)^2(EO) / (8 m1 m2^2 c^6) + b2 (OE)(EO)^2(OE) / (8 m1^2 m2 c^6)
    h = &h
        + &(&(&(&x.b1() * &x.rp(1, times(m1p(1).mul(&m2p(2)), 8))) * &x.c(-6))
            * &(&(&eo * &oe.pow(2)) * &eo));
    h = &h
        + &(&(&(&x.b2() * &x.rp(1, times(m1p(2).mul(&m2p(1)), 8))) * &x.c(-6))
            * &(&(&oe * &eo.pow(2)) * &oe));
    // (b1 b2 (m1^2+m2^2) - 2 m1 m2) [[EO,OE],OO] / (8 m1 m2 (m1^2-m2^2) c^4)
    let mixed = &(&(&x.b1() * &x.b2()) * &x.scalar_poly(m1p(2).add(&m2p(2))))
        - &x.scalar_poly(times(m1p(1).mul(&m2p(1)), 2));
    h = &h
        + &(&(&(&mixed * &x.rp(1, times(m1p(1).mul(&m2p(1)).mul(&mass_diff_sq()), 8)))
            * &x.c(-4))
            * &comm(&comm(&eo, &oe), &oo));
    h
}

/// The transformed Hamiltonian kept to fourth order under the commutation
/// relation between OE and EO.
fn fourth_order(x: &Ctx) -> Expression {
    let (ee, oe, eo, oo) = (x.sym("EE"), x.sym("OE"), x.sym("EO"), x.sym("OO"));
    // Leading block: rest + EE + squares + the merged odd-odd anticommutator.
    let mut h = Expression::rest_energy_two_body(&x.t);
    h = &h + &ee;
    h = &h + &(&(&(&x.b1() * &x.rp(1, times(m1p(1), 2))) * &x.c(-2)) * &oe.pow(2));
    h = &h + &(&(&(&x.b2() * &x.rp(1, times(m2p(1), 2))) * &x.c(-2)) * &eo.pow(2));
    h = &h
        + &(&(&(&x.beta_mass_diff() * &x.rp(1, times(mass_diff_sq(), 2))) * &x.c(-2))
            * &oo.pow(2));
    h = &h + &(&(&x.rp(1, times(m1p(2), 8)) * &x.c(-4)) * &comm(&oe, &comm(&ee, &oe)));
    h = &h + &(&(&x.rp(1, times(m2p(2), 8)) * &x.c(-4)) * &comm(&eo, &comm(&ee, &eo)));
    let pre = &(&(&x.b1() * &x.b2()) * &x.rp(1, times(m1p(1).mul(&m2p(1)), 4))) * &x.c(-4);
    h = &h + &(&pre * &acomm(&oe, &acomm(&eo, &oo)));
    h = &h + &(&(&(&x.b1() * &x.rp(-1, times(m1p(3), 8))) * &x.c(-6)) * &oe.pow(4));
    h = &h + &(&(&(&x.b2() * &x.rp(-1, times(m2p(3), 8))) * &x.c(-6)) * &eo.pow(4));
    // Squared commutators with EE.
    h = &h + &(&(&(&x.b1() * &x.rp(-1, times(m1p(3), 8))) * &x.c(-6)) * &comm(&oe, &ee).pow(2));
    h = &h + &(&(&(&x.b2() * &x.rp(-1, times(m2p(3), 8))) * &x.c(-6)) * &comm(&eo, &ee).pow(2));
    // Squared anticommutators with OO.
    h = &h
        + &(&(&(&x.b1() * &x.rp(1, times(m1p(1).mul(&m2p(2)), 8))) * &x.c(-6))
            * &acomm(&eo, &oo).pow(2));
    h = &h
        + &(&(&(&x.b2() * &x.rp(1, times(m1p(2).mul(&m2p(1)), 8))) * &x.c(-6))
            * &acomm(&oe, &oo).pow(2));
    // Nested odd-odd anticommutators.
    h = &h
        + &(&(&(&x.beta_mass_diff() * &x.rp(-1, times(m1p(2).mul(&mass_diff_sq()), 16)))
            * &x.c(-6))
            * &acomm(&oo, &acomm(&oe, &acomm(&oe, &oo))));
    let bmd2 = {
        let d = x.beta_mass_diff();
        &d * &d
    };
    h = &h
        + &(&(&(&(&x.b1() * &bmd2) * &x.rp(-1, times(m1p(1).mul(&mass_diff_sq().pow(2)), 16)))
            * &x.c(-6))
            * &acomm(&oo, &acomm(&oo, &oe.pow(2))));
    h = &h
        + &(&(&(&x.beta_mass_diff() * &x.rp(-1, times(m2p(2).mul(&mass_diff_sq()), 16)))
            * &x.c(-6))
            * &acomm(&oo, &acomm(&eo, &acomm(&eo, &oo))));
    h = &h
        + &(&(&(&(&x.b2() * &bmd2) * &x.rp(-1, times(m2p(1).mul(&mass_diff_sq().pow(2)), 16)))
            * &x.c(-6))
            * &acomm(&oo, &acomm(&oo, &eo.pow(2))));
    // Mixed even-even / odd-odd block.
    h = &h
        + &(&(&(&x.beta_mass_crossed_diff()
            * &x.rp(-1, times(m1p(1).mul(&m2p(1)).mul(&mass_diff_sq()), 8)))
            * &x.c(-6))
            * &acomm(&oo, &comm(&oe, &comm(&eo, &ee))));
    h = &h
        + &(&(&(&x.b1() * &x.rp(1, times(m1p(1).mul(&m2p(2)), 8))) * &x.c(-6))
            * &comm(&comm(&eo, &ee), &acomm(&oe, &oo)));
    h = &h
        + &(&(&(&x.b2() * &x.rp(1, times(m1p(2).mul(&m2p(1)), 8))) * &x.c(-6))
            * &comm(&comm(&oe, &ee), &acomm(&eo, &oo)));
    h = &h
        + &(&(&(&bmd2 * &x.rp(1, times(mass_diff_sq().pow(2), 8))) * &x.c(-4))
            * &comm(&oo, &comm(&ee, &oo)));
    // Fourfold nested commutators with EE.
    h = &h
        + &(&(&x.rp(1, times(m1p(4), 384)) * &x.c(-8))
            * &(&comm(&oe, &comm(&oe, &comm(&oe, &comm(&oe, &ee))))
                + &comm(&oe.pow(3), &comm(&oe, &ee)).scale(&Coefficient::int(32))));
    h = &h
        + &(&(&x.rp(1, times(m2p(4), 384)) * &x.c(-8))
            * &(&comm(&eo, &comm(&eo, &comm(&eo, &comm(&eo, &ee))))
                + &comm(&eo.pow(3), &comm(&eo, &ee)).scale(&Coefficient::int(32))));
    h = &h
        + &(&(&x.rp(1, times(m1p(2).mul(&m2p(2)), 64)) * &x.c(-8))
            * &comm(&oe, &comm(&oe, &comm(&eo, &comm(&eo, &ee)))));
    // Fourfold nested anticommutators with OO.
    let b12 = &x.b1() * &x.b2();
    h = &h
        + &(&(&(&b12 * &x.rp(-1, times(m1p(3).mul(&m2p(1)), 96))) * &x.c(-8))
            * &(&acomm(&oe, &acomm(&oe, &acomm(&oe, &acomm(&eo, &oo))))
                + &acomm(&oe.pow(3), &acomm(&eo, &oo)).scale(&Coefficient::int(8))));
    h = &h
        + &(&(&(&b12 * &x.rp(-1, times(m1p(1).mul(&m2p(3)), 96))) * &x.c(-8))
            * &(&acomm(&oe, &acomm(&eo, &acomm(&eo, &acomm(&eo, &oo))))
                + &acomm(&oe, &acomm(&eo.pow(3), &oo)).scale(&Coefficient::int(8))));
    // Sixth powers.
    h = &h + &(&(&(&x.b1() * &x.rp(1, times(m1p(5), 16))) * &x.c(-10)) * &oe.pow(6));
    h = &h + &(&(&(&x.b2() * &x.rp(1, times(m2p(5), 16))) * &x.c(-10)) * &eo.pow(6));
    h
}

/// One-particle transformed Hamiltonian to fourth order.
fn one_body_fourth_order(x: &Ctx) -> Expression {
    let (e, o) = (x.sym("E"), x.sym("O"));
    let b = x.b1();
    let mut h = Expression::rest_energy_one_body(&x.t);
    h = &h + &e;
    h = &h + &(&(&(&b * &x.rp(1, times(m1p(1), 2))) * &x.c(-2)) * &o.pow(2));
    h = &h + &(&(&x.rp(1, times(m1p(2), 8)) * &x.c(-4)) * &comm(&o, &comm(&e, &o)));
    h = &h + &(&(&(&b * &x.rp(-1, times(m1p(3), 8))) * &x.c(-6)) * &o.pow(4));
    h = &h + &(&(&(&b * &x.rp(-1, times(m1p(3), 8))) * &x.c(-6)) * &comm(&o, &e).pow(2));
    h = &h
        + &(&(&x.rp(1, times(m1p(4), 384)) * &x.c(-8))
            * &comm(&o, &comm(&o, &comm(&o, &comm(&o, &e)))));
    h = &h + &(&(&x.rp(1, times(m1p(4), 12)) * &x.c(-8)) * &comm(&o.pow(3), &comm(&o, &e)));
    h = &h + &(&(&(&b * &x.rp(1, times(m1p(5), 16))) * &x.c(-10)) * &o.pow(6));
    h
}

/// The extra fourth-order terms produced by the odd-odd-first sequencing.
fn extra_terms(x: &Ctx) -> Expression {
    let (ee, oe, eo, oo) = (x.sym("EE"), x.sym("OE"), x.sym("EO"), x.sym("OO"));
    let oe_eo = &oe * &eo;
    let sandwich = &(&(&eo * &oo) * &oe) - &(&(&oe * &oo) * &eo);
    let den6 = times(m1p(1).mul(&m2p(1)).mul(&mass_diff_sq()), 8);
    let den8_1 = times(m1p(2).mul(&m2p(1)).mul(&mass_diff_sq()), 16);
    let den8_2 = times(m1p(1).mul(&m2p(2)).mul(&mass_diff_sq()), 16);
    let b12 = &x.b1() * &x.b2();

    let mut h = Expression::zero(&x.t);
    h = &h
        + &(&(&(&x.beta_mass_crossed_diff() * &x.rp(1, den6.clone())) * &x.c(-6))
            * &comm(&comm(&oe_eo, &oo), &ee));
    h = &h
        + &(&(&(&x.beta_mass_crossed_sum() * &x.rp(1, den6)) * &x.c(-6))
            * &comm(&sandwich, &ee));
    // (m2 - b1 b2 m1) and partners
    let m1s = Expression::mass(&x.t, crate::poly::MassVar::M1);
    let m2s = Expression::mass(&x.t, crate::poly::MassVar::M2);
    let f3 = &m2s - &(&b12 * &m1s);
    let f4 = &(&b12 * &m2s) - &m1s;
    let f5 = &m2s + &(&b12 * &m1s);
    let f6 = &(&b12 * &m2s) + &m1s;
    h = &h
        + &(&(&(&f3 * &x.rp(1, den8_1.clone())) * &x.c(-8))
            * &comm(&comm(&oe_eo, &oo), &oe.pow(2)));
    h = &h
        + &(&(&(&f4 * &x.rp(1, den8_2.clone())) * &x.c(-8))
            * &comm(&comm(&oe_eo, &oo), &eo.pow(2)));
    h = &h + &(&(&(&f5 * &x.rp(1, den8_1)) * &x.c(-8)) * &comm(&sandwich, &oe.pow(2)));
    h = &h + &(&(&(&f6 * &x.rp(1, den8_2)) * &x.c(-8)) * &comm(&sandwich, &eo.pow(2)));
    h
}

/// The even-even cleanup generator in its printed two-part form.
fn cleanup_gen(x: &Ctx) -> Expression {
    let (oe, eo, oo) = (x.sym("OE"), x.sym("EO"), x.sym("OO"));
    let den = times(m1p(1).mul(&m2p(1)).mul(&mass_diff_sq()), 8);
    let part_a = &(&(&x.beta_mass_crossed_diff() * &x.ip(-1, den.clone())) * &x.c(-6))
        * &comm(&oo, &(&oe * &eo));
    let part_b = &(&(&x.beta_mass_crossed_sum() * &x.ip(-1, den)) * &x.c(-6))
        * &(&(&(&oe * &oo) * &eo) - &(&(&eo * &oo) * &oe));
    &part_a + &part_b
}

/// Even-even generator built from the squared odd operators and EE.
fn even_even_gen_kinetic(x: &Ctx) -> Expression {
    let (ee, oe, eo) = (x.sym("EE"), x.sym("OE"), x.sym("EO"));
    let inner = &(&(&x.b1() * &x.rp(1, m1p(3))) * &oe.pow(2))
        + &(&(&x.b2() * &x.rp(1, m2p(3))) * &eo.pow(2));
    &(&x.ip(-1, IntPoly::int(16)) * &x.c(-6)) * &comm(&inner, &ee)
}

fn even_even_gen_mixed_a(x: &Ctx) -> Expression {
    let (oe, eo, oo) = (x.sym("OE"), x.sym("EO"), x.sym("OO"));
    &(&(&x.b1() * &x.ip(-1, times(m1p(1).mul(&m2p(2)), 16))) * &x.c(-6))
        * &comm(&acomm(&oe, &oo), &eo)
}

fn even_even_gen_mixed_b(x: &Ctx) -> Expression {
    let (oe, eo, oo) = (x.sym("OE"), x.sym("EO"), x.sym("OO"));
    &(&(&x.b2() * &x.ip(-1, times(m1p(2).mul(&m2p(1)), 16))) * &x.c(-6))
        * &comm(&acomm(&eo, &oo), &oe)
}

// ---------------------------------------------------------------------------
// Diff reporting
// ---------------------------------------------------------------------------

/// Classification of candidate minus reference by monomial.
#[derive(Debug, Clone)]
pub struct DiffReport {
    /// In the reference but absent from the candidate.
    pub missing: Expression,
    /// In the candidate but absent from the reference.
    pub extra: Expression,
    /// Present in both with different coefficients: (key, candidate, reference).
    pub mismatched: Vec<(MonomialKey, Coefficient, Coefficient)>,
    /// The whole surplus, candidate - reference (mismatches included).
    pub difference: Expression,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.difference.is_zero()
    }
}

/// Compare a candidate against a reference monomial by monomial.
pub fn diff_report(candidate: &Expression, reference: &Expression) -> DiffReport {
    let mut missing = Expression::zero(reference.table());
    let mut extra = Expression::zero(candidate.table());
    let mut mismatched = Vec::new();
    for (k, rc) in reference.terms() {
        match candidate.coefficient(k) {
            None => missing = &missing + &single(reference, k),
            Some(cc) if cc != rc => mismatched.push((k.clone(), cc.clone(), rc.clone())),
            _ => {}
        }
    }
    for (k, _) in candidate.terms() {
        if reference.coefficient(k).is_none() {
            extra = &extra + &single(candidate, k);
        }
    }
    DiffReport {
        missing,
        extra,
        mismatched,
        difference: candidate - reference,
    }
}

fn single(src: &Expression, key: &MonomialKey) -> Expression {
    src.filter(|k, _| k == key)
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return writeln!(f, "exact match");
        }
        if !self.missing.is_zero() {
            writeln!(f, "missing ({} monomials):", self.missing.num_terms())?;
            writeln!(f, "  {}", self.missing)?;
        }
        if !self.extra.is_zero() {
            writeln!(f, "extra ({} monomials):", self.extra.num_terms())?;
            writeln!(f, "  {}", self.extra)?;
        }
        if !self.mismatched.is_empty() {
            writeln!(f, "coefficient mismatches ({}):", self.mismatched.len())?;
            for (k, cand, refc) in &self.mismatched {
                writeln!(
                    f,
                    "  {}: candidate {} vs reference {}",
                    self.extra.describe_key(k),
                    cand,
                    refc
                )?;
            }
        }
        writeln!(
            f,
            "difference (candidate - reference, {} monomials):",
            self.difference.num_terms()
        )?;
        writeln!(f, "  {}", self.difference)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Coefficient;

    #[test]
    fn second_order_spot_checks() {
        // Coefficient of the odd-odd square at c^-2: m1/(2(m1^2-m2^2)) in the
        // b1 sector and -m2/(2(m1^2-m2^2)) in the b2 sector.
        let t = SymbolTable::two_body(false);
        let eq4 = reference_expression(ReferenceId::Eq4, &t).unwrap();
        let oo = t.lookup("OO").unwrap();
        let key_b1 = MonomialKey {
            beta: (1, 0),
            word: vec![oo, oo],
            c_exp: -2,
        };
        let expect_b1 = Coefficient::real(PolyRatio::new(m1p(1), times(mass_diff_sq(), 2)));
        assert_eq!(eq4.coefficient(&key_b1), Some(&expect_b1));
        let key_b2 = MonomialKey {
            beta: (0, 1),
            word: vec![oo, oo],
            c_exp: -2,
        };
        let expect_b2 =
            Coefficient::real(PolyRatio::new(m2p(1).neg(), times(mass_diff_sq(), 2)));
        assert_eq!(eq4.coefficient(&key_b2), Some(&expect_b2));
    }

    #[test]
    fn fourth_order_spot_checks() {
        let t = SymbolTable::two_body(true);
        let eq6 = reference_expression(ReferenceId::Eq6, &t).unwrap();
        // b1-sector (OE)^6 at c^-10 with coefficient 1/(16 m1^5).
        let oe = t.lookup("OE").unwrap();
        let key = MonomialKey {
            beta: (1, 0),
            word: vec![oe; 6],
            c_exp: -10,
        };
        let expect = Coefficient::real(PolyRatio::new(IntPoly::one(), times(m1p(5), 16)));
        assert_eq!(eq6.coefficient(&key), Some(&expect));
        // Every reference is Hermitian.
        assert!(eq6.is_hermitian().unwrap());
    }

    #[test]
    fn fourth_order_requires_relation() {
        let t = SymbolTable::two_body(false);
        assert!(matches!(
            reference_expression(ReferenceId::Eq6, &t),
            Err(ReferenceError::MissingRelation { .. })
        ));
    }

    #[test]
    fn references_are_hermitian() {
        let t = SymbolTable::two_body(true);
        for id in [
            ReferenceId::Eq3Oe,
            ReferenceId::Eq3Eo,
            ReferenceId::Eq3Oo,
            ReferenceId::Eq4,
            ReferenceId::Eq6,
            ReferenceId::Eq8,
            ReferenceId::Eq9,
            ReferenceId::Eq26,
            ReferenceId::Eq29a,
            ReferenceId::Eq29b,
        ] {
            let e = reference_expression(id, &t).unwrap();
            assert!(e.is_hermitian().unwrap(), "{id} not Hermitian");
        }
        let ob = SymbolTable::one_body();
        let eq7 = reference_expression(ReferenceId::Eq7, &ob).unwrap();
        assert!(eq7.is_hermitian().unwrap());
    }

    #[test]
    fn even_even_references_project_cleanly() {
        let t = SymbolTable::two_body(true);
        for id in [
            ReferenceId::Eq4,
            ReferenceId::Eq6,
            ReferenceId::Eq9,
            ReferenceId::Eq26,
            ReferenceId::Eq29a,
            ReferenceId::Eq29b,
        ] {
            let e = reference_expression(id, &t).unwrap();
            assert!(
                e.project_out(crate::table::Parity::EVEN_EVEN).is_zero(),
                "{id} has non-even-even content"
            );
        }
    }

    #[test]
    fn extra_terms_all_fourth_order() {
        let t = SymbolTable::two_body(true);
        let eq8 = reference_expression(ReferenceId::Eq8, &t).unwrap();
        assert!(!eq8.is_zero());
        for (k, _) in eq8.terms() {
            assert_eq!(eq8.effective_order(k), -4);
        }
    }

    #[test]
    fn diff_report_identity_and_difference() {
        let t = SymbolTable::two_body(true);
        let eq6 = reference_expression(ReferenceId::Eq6, &t).unwrap();
        let eq8 = reference_expression(ReferenceId::Eq8, &t).unwrap();
        assert!(diff_report(&eq6, &eq6).is_empty());
        // The surplus of (eq6 + eq8) over eq6 is exactly eq8. Some keys are
        // shared between the two forms, so the surplus shows up partly as
        // `extra` and partly as coefficient mismatches.
        let sum = &eq6 + &eq8;
        let d = diff_report(&sum, &eq6);
        assert!(d.missing.is_zero());
        assert_eq!(d.difference, eq8);
    }

    #[test]
    fn second_order_collapses_under_relation() {
        // Under the commutation relation the general second-order form equals
        // the truncated fourth-order form.
        let t = SymbolTable::two_body(true);
        let eq4 = reference_expression(ReferenceId::Eq4, &t).unwrap();
        let eq6 = reference_expression(ReferenceId::Eq6, &t).unwrap();
        let d = diff_report(&eq6.truncate(-2), &eq4);
        assert!(d.is_empty(), "{d}");
    }
}
