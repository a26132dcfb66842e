//! Bivariate polynomials in the two masses over arbitrary-precision integers.
//!
//! These are the building blocks of the exact coefficient arithmetic: every
//! coefficient in the algebra is a reduced fraction of two `IntPoly` values.
//! Canonical form matters more than speed here, so the GCD is a classic
//! primitive pseudo-remainder sequence (viewing a bivariate polynomial as a
//! univariate polynomial in `m1` whose coefficients live in Z[m2]).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Which mass variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassVar {
    M1,
    M2,
}

/// A polynomial in m1, m2 with `BigInt` coefficients.
///
/// Keys are `(deg_m1, deg_m2)`; zero coefficients are never stored, so the
/// zero polynomial is the empty map and structural equality is canonical
/// equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        IntPoly::int(1)
    }

    pub fn int(n: i64) -> Self {
        IntPoly::from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !n.is_zero() {
            terms.insert((0, 0), n);
        }
        IntPoly { terms }
    }

    /// The monomial `coef * m1^d1 * m2^d2`.
    pub fn monomial(coef: BigInt, d1: u32, d2: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert((d1, d2), coef);
        }
        IntPoly { terms }
    }

    pub fn m1() -> Self {
        IntPoly::monomial(BigInt::from(1), 1, 0)
    }

    pub fn m2() -> Self {
        IntPoly::monomial(BigInt::from(1), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&(0, 0))
                .map(|c| *c == BigInt::from(1))
                .unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert_add(terms: &mut BTreeMap<(u32, u32), BigInt>, key: (u32, u32), val: BigInt) {
        use std::collections::btree_map::Entry;
        match terms.entry(key) {
            Entry::Vacant(e) => {
                if !val.is_zero() {
                    e.insert(val);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += val;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            Self::insert_add(&mut terms, *k, v.clone());
        }
        IntPoly { terms }
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut terms = BTreeMap::new();
        for ((a1, a2), ca) in &self.terms {
            for ((b1, b2), cb) in &other.terms {
                Self::insert_add(&mut terms, (a1 + b1, a2 + b2), ca * cb);
            }
        }
        IntPoly { terms }
    }

    pub fn mul_int(&self, n: &BigInt) -> IntPoly {
        if n.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * n)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> IntPoly {
        let mut base = self.clone();
        let mut acc = IntPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Degree in one variable; `None` for the zero polynomial.
    pub fn degree(&self, var: MassVar) -> Option<u32> {
        self.terms
            .keys()
            .map(|(d1, d2)| match var {
                MassVar::M1 => *d1,
                MassVar::M2 => *d2,
            })
            .max()
    }

    /// Total-degree graded-lex leading key with m1 > m2.
    fn grlex_lead_key(&self) -> Option<(u32, u32)> {
        self.terms
            .keys()
            .copied()
            .max_by_key(|(d1, d2)| (d1 + d2, *d1))
    }

    pub fn grlex_lead_coeff(&self) -> Option<&BigInt> {
        self.grlex_lead_key().and_then(|k| self.terms.get(&k))
    }

    /// The gcd of all integer coefficients (positive; zero for the zero poly).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = int_gcd(&g, c);
            if g == BigInt::from(1) {
                break;
            }
        }
        g
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        if d.is_zero() {
            return None;
        }
        let dk = d.grlex_lead_key().unwrap();
        let dc = d.terms.get(&dk).unwrap();
        let mut rem = self.clone();
        let mut quo = BTreeMap::new();
        while !rem.is_zero() {
            let rk = rem.grlex_lead_key().unwrap();
            let rc = rem.terms.get(&rk).unwrap().clone();
            if rk.0 < dk.0 || rk.1 < dk.1 {
                return None;
            }
            let qk = (rk.0 - dk.0, rk.1 - dk.1);
            let (q, r) = num_integer_div_rem(&rc, dc);
            if !r.is_zero() {
                return None;
            }
            Self::insert_add(&mut quo, qk, q.clone());
            let qt = IntPoly::monomial(q, qk.0, qk.1);
            rem = rem.sub(&qt.mul(d));
        }
        Some(IntPoly { terms: quo })
    }

    /// The slice of terms whose degree in `var` equals `deg`, with that
    /// variable divided out (a polynomial in the remaining mass). Used for
    /// asymptotic limits.
    pub fn leading_slice(&self, var: MassVar, deg: u32) -> IntPoly {
        let mut terms = BTreeMap::new();
        for ((d1, d2), c) in &self.terms {
            match var {
                MassVar::M1 if *d1 == deg => {
                    terms.insert((0, *d2), c.clone());
                }
                MassVar::M2 if *d2 == deg => {
                    terms.insert((*d1, 0), c.clone());
                }
                _ => {}
            }
        }
        IntPoly { terms }
    }

    pub fn eval_f64(&self, m1: f64, m2: f64) -> f64 {
        let mut acc = 0.0;
        for ((d1, d2), c) in &self.terms {
            let c = c.to_f64().unwrap_or(f64::NAN);
            acc += c * m1.powi(*d1 as i32) * m2.powi(*d2 as i32);
        }
        acc
    }

    /// GCD, sign-normalized so the graded-lex leading coefficient is positive.
    pub fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
        let g = if a.is_zero() {
            b.clone()
        } else if b.is_zero() {
            a.clone()
        } else {
            let ua = Biv::from_poly(a);
            let ub = Biv::from_poly(b);
            Biv::gcd(ua, ub).to_poly()
        };
        g.sign_normalized()
    }

    /// Negate if the graded-lex leading coefficient is negative.
    pub fn sign_normalized(&self) -> IntPoly {
        match self.grlex_lead_coeff() {
            Some(c) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }
}

fn num_integer_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let q = a / b;
    let r = a - &q * b;
    (q, r)
}

fn int_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

// ---------------------------------------------------------------------------
// Univariate layer over Z[m2] for the bivariate GCD.
// ---------------------------------------------------------------------------

/// Dense univariate polynomial over Z (coefficient i = degree i).
#[derive(Debug, Clone, PartialEq, Eq)]
struct ZPoly(Vec<BigInt>);

impl ZPoly {
    fn zero() -> Self {
        ZPoly(Vec::new())
    }

    fn trim(mut v: Vec<BigInt>) -> Self {
        while v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
        ZPoly(v)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigInt {
        self.0.last().expect("lead of zero polynomial")
    }

    fn neg(&self) -> ZPoly {
        ZPoly(self.0.iter().map(|c| -c).collect())
    }

    fn add(&self, other: &ZPoly) -> ZPoly {
        let n = self.0.len().max(other.0.len());
        let mut v = vec![BigInt::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            v[i] += c;
        }
        ZPoly::trim(v)
    }

    fn sub(&self, other: &ZPoly) -> ZPoly {
        self.add(&other.neg())
    }

    fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        let mut v = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        ZPoly::trim(v)
    }

    fn mul_int(&self, n: &BigInt) -> ZPoly {
        if n.is_zero() {
            return ZPoly::zero();
        }
        ZPoly(self.0.iter().map(|c| c * n).collect())
    }

    fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = int_gcd(&g, c);
        }
        g
    }

    fn div_int_exact(&self, n: &BigInt) -> ZPoly {
        ZPoly(self.0.iter().map(|c| c / n).collect())
    }

    /// Exact division in Z[x]; panics if not exact (internal use only, on
    /// quantities known to divide).
    fn div_exact(&self, d: &ZPoly) -> ZPoly {
        if self.is_zero() {
            return ZPoly::zero();
        }
        let mut rem = self.clone();
        let mut quo = vec![BigInt::zero(); self.0.len() - d.0.len() + 1];
        while !rem.is_zero() && rem.deg() >= d.deg() {
            let k = rem.deg() - d.deg();
            let q = rem.lead() / d.lead();
            debug_assert!((rem.lead() - &q * d.lead()).is_zero());
            quo[k] = q.clone();
            let mut shifted = vec![BigInt::zero(); k];
            shifted.extend(d.0.iter().map(|c| c * &q));
            rem = rem.sub(&ZPoly::trim(shifted));
        }
        debug_assert!(rem.is_zero(), "inexact division in ZPoly::div_exact");
        ZPoly::trim(quo)
    }

    /// Primitive part with positive leading coefficient.
    fn primitive(&self) -> ZPoly {
        if self.is_zero() {
            return ZPoly::zero();
        }
        let mut c = self.content();
        if self.lead().is_negative() {
            c = -c;
        }
        self.div_int_exact(&c)
    }

    /// Pseudo-remainder of a by b (deg a >= deg b, b nonzero).
    fn prem(a: &ZPoly, b: &ZPoly) -> ZPoly {
        let mut r = a.clone();
        let db = b.deg();
        let lb = b.lead().clone();
        while !r.is_zero() && r.deg() >= db {
            let k = r.deg() - db;
            let lr = r.lead().clone();
            let mut shifted = vec![BigInt::zero(); k];
            shifted.extend(b.0.iter().map(|c| c * &lr));
            r = r.mul_int(&lb).sub(&ZPoly::trim(shifted));
        }
        r
    }

    fn gcd(a: &ZPoly, b: &ZPoly) -> ZPoly {
        if a.is_zero() {
            return b.primitive().mul_int(&b.content());
        }
        if b.is_zero() {
            return a.primitive().mul_int(&a.content());
        }
        let cont = int_gcd(&a.content(), &b.content());
        let mut p = a.primitive();
        let mut q = b.primitive();
        if p.deg() < q.deg() {
            std::mem::swap(&mut p, &mut q);
        }
        loop {
            let r = ZPoly::prem(&p, &q);
            if r.is_zero() {
                return q.primitive().mul_int(&cont);
            }
            p = q;
            q = r.primitive();
        }
    }
}

/// Bivariate polynomial as univariate in m1 over Z[m2].
struct Biv(Vec<ZPoly>);

impl Biv {
    fn from_poly(p: &IntPoly) -> Biv {
        let d1 = p.degree(MassVar::M1).unwrap_or(0) as usize;
        let mut coeffs = vec![Vec::new(); d1 + 1];
        for ((a, b), c) in &p.terms {
            let v = &mut coeffs[*a as usize];
            if v.len() <= *b as usize {
                v.resize(*b as usize + 1, BigInt::zero());
            }
            v[*b as usize] = c.clone();
        }
        Biv(coeffs.into_iter().map(ZPoly::trim).collect())
    }

    fn to_poly(&self) -> IntPoly {
        let mut terms = BTreeMap::new();
        for (d1, zp) in self.0.iter().enumerate() {
            for (d2, c) in zp.0.iter().enumerate() {
                if !c.is_zero() {
                    terms.insert((d1 as u32, d2 as u32), c.clone());
                }
            }
        }
        IntPoly { terms }
    }

    fn trim(mut v: Vec<ZPoly>) -> Biv {
        while v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
        Biv(v)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &ZPoly {
        self.0.last().expect("lead of zero Biv")
    }

    fn sub(&self, other: &Biv) -> Biv {
        let n = self.0.len().max(other.0.len());
        let mut v = vec![ZPoly::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            v[i] = v[i].add(c);
        }
        for (i, c) in other.0.iter().enumerate() {
            v[i] = v[i].sub(c);
        }
        Biv::trim(v)
    }

    fn mul_zp(&self, z: &ZPoly) -> Biv {
        Biv::trim(self.0.iter().map(|c| c.mul(z)).collect())
    }

    /// Content in Z[m2]: gcd of the m1-coefficients.
    fn content(&self) -> ZPoly {
        let mut g = ZPoly::zero();
        for c in &self.0 {
            g = ZPoly::gcd(&g, c);
        }
        g
    }

    fn div_content(&self, cont: &ZPoly) -> Biv {
        Biv(self.0.iter().map(|c| c.div_exact(cont)).collect())
    }

    fn prem(a: &Biv, b: &Biv) -> Biv {
        let mut r = Biv(a.0.clone());
        let db = b.deg();
        let lb = b.lead().clone();
        while !r.is_zero() && r.deg() >= db {
            let k = r.deg() - db;
            let lr = r.lead().clone();
            let mut shifted = vec![ZPoly::zero(); k];
            shifted.extend(b.0.iter().map(|c| c.mul(&lr)));
            r = r.mul_zp(&lb).sub(&Biv::trim(shifted));
        }
        r
    }

    fn gcd(a: Biv, b: Biv) -> Biv {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let ca = a.content();
        let cb = b.content();
        let cont = ZPoly::gcd(&ca, &cb);
        let mut p = a.div_content(&ca);
        let mut q = b.div_content(&cb);
        if p.deg() < q.deg() {
            std::mem::swap(&mut p, &mut q);
        }
        loop {
            let r = Biv::prem(&p, &q);
            if r.is_zero() {
                let cq = q.content();
                return q.div_content(&cq).mul_zp(&cont);
            }
            p = q;
            let cr = r.content();
            q = r.div_content(&cr);
        }
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Render highest total degree first for readability.
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by_key(|(d1, d2)| std::cmp::Reverse((d1 + d2, *d1)));
        for (i, k) in keys.iter().enumerate() {
            let c = &self.terms[k];
            let mut parts = Vec::new();
            let abs = c.abs();
            if abs != BigInt::from(1) || *k == (0, 0) {
                parts.push(abs.to_string());
            }
            if k.0 > 0 {
                parts.push(if k.0 == 1 {
                    "m1".into()
                } else {
                    format!("m1^{}", k.0)
                });
            }
            if k.1 > 0 {
                parts.push(if k.1 == 1 {
                    "m2".into()
                } else {
                    format!("m2^{}", k.1)
                });
            }
            let body = parts.join("*");
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-{body}")?;
                } else {
                    write!(f, "{body}")?;
                }
            } else if c.is_negative() {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(i64, u32, u32)]) -> IntPoly {
        let mut acc = IntPoly::zero();
        for (c, d1, d2) in terms {
            acc = acc.add(&IntPoly::monomial(BigInt::from(*c), *d1, *d2));
        }
        acc
    }

    #[test]
    fn arithmetic_basics() {
        let m1 = IntPoly::m1();
        let m2 = IntPoly::m2();
        let s = m1.add(&m2);
        let d = m1.sub(&m2);
        let prod = s.mul(&d);
        assert_eq!(prod, p(&[(1, 2, 0), (-1, 0, 2)]));
        assert!(m1.sub(&m1).is_zero());
        assert_eq!(s.pow(2), p(&[(1, 2, 0), (2, 1, 1), (1, 0, 2)]));
    }

    #[test]
    fn exact_division() {
        let diff_sq = p(&[(1, 2, 0), (-1, 0, 2)]);
        let sum = p(&[(1, 1, 0), (1, 0, 1)]);
        let diff = p(&[(1, 1, 0), (-1, 0, 1)]);
        assert_eq!(diff_sq.div_exact(&sum).unwrap(), diff);
        assert_eq!(diff_sq.div_exact(&diff).unwrap(), sum);
        assert!(diff_sq.div_exact(&p(&[(1, 1, 0)])).is_none());
    }

    #[test]
    fn gcd_factored() {
        // gcd((m1^2 - m2^2) * m1, (m1 - m2) * 6) = m1 - m2 (up to sign normalization)
        let a = p(&[(1, 2, 0), (-1, 0, 2)]).mul(&IntPoly::m1());
        let b = p(&[(6, 1, 0), (-6, 0, 1)]);
        let g = IntPoly::gcd(&a, &b);
        assert_eq!(g, p(&[(1, 1, 0), (-1, 0, 1)]));
    }

    #[test]
    fn gcd_with_content() {
        let a = p(&[(4, 1, 0)]).mul(&p(&[(1, 1, 0), (1, 0, 1)]));
        let b = p(&[(6, 0, 1)]).mul(&p(&[(1, 1, 0), (1, 0, 1)]));
        let g = IntPoly::gcd(&a, &b);
        assert_eq!(g, p(&[(2, 1, 0), (2, 0, 1)]));
    }

    #[test]
    fn gcd_coprime() {
        let a = p(&[(1, 1, 0), (3, 0, 0)]);
        let b = p(&[(1, 0, 1), (-5, 0, 0)]);
        assert!(IntPoly::gcd(&a, &b).is_one());
    }

    #[test]
    fn gcd_sign_normalization() {
        let a = p(&[(-2, 1, 0), (2, 0, 1)]);
        let g = IntPoly::gcd(&a, &a);
        assert_eq!(g, p(&[(2, 1, 0), (-2, 0, 1)]));
        assert!(g.grlex_lead_coeff().unwrap() > &BigInt::zero());
    }

    #[test]
    fn leading_slice_for_limits() {
        // m1*m2^2 + 3*m2^2 + m1 : slice at deg_m2 = 2 is m1 + 3.
        let a = p(&[(1, 1, 2), (3, 0, 2), (1, 1, 0)]);
        assert_eq!(a.leading_slice(MassVar::M2, 2), p(&[(1, 1, 0), (3, 0, 0)]));
    }

    #[test]
    fn display_readable() {
        let a = p(&[(1, 2, 0), (-1, 0, 2)]);
        assert_eq!(a.to_string(), "m1^2 - m2^2");
        assert_eq!(IntPoly::zero().to_string(), "0");
        assert_eq!(IntPoly::int(-3).to_string(), "-3");
    }
}
