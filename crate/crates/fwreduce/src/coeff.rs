//! Exact coefficients: complex rational functions of the two masses.
//!
//! A [`PolyRatio`] is a reduced fraction of two [`IntPoly`] values with a
//! sign-normalized denominator (graded-lex leading coefficient positive,
//! m1 > m2), so structural equality is mathematical equality. A
//! [`Coefficient`] is a real plus imaginary pair of such fractions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Signed;

use crate::poly::{IntPoly, MassVar};

/// A reduced fraction of integer polynomials in m1, m2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyRatio {
    num: IntPoly,
    den: IntPoly,
}

impl PolyRatio {
    /// Build and canonicalize. Panics on a zero denominator (denominators in
    /// this crate are constructed, never parsed blind).
    pub fn new(num: IntPoly, den: IntPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator in PolyRatio");
        if num.is_zero() {
            return PolyRatio {
                num: IntPoly::zero(),
                den: IntPoly::one(),
            };
        }
        let g = IntPoly::gcd(&num, &den);
        let mut num = num.div_exact(&g).expect("gcd must divide numerator");
        let mut den = den.div_exact(&g).expect("gcd must divide denominator");
        if den
            .grlex_lead_coeff()
            .map(|c| c.is_negative())
            .unwrap_or(false)
        {
            num = num.neg();
            den = den.neg();
        }
        PolyRatio { num, den }
    }

    pub fn zero() -> Self {
        PolyRatio {
            num: IntPoly::zero(),
            den: IntPoly::one(),
        }
    }

    pub fn one() -> Self {
        PolyRatio {
            num: IntPoly::one(),
            den: IntPoly::one(),
        }
    }

    pub fn int(n: i64) -> Self {
        PolyRatio {
            num: IntPoly::int(n),
            den: IntPoly::one(),
        }
    }

    pub fn rational(num: i64, den: i64) -> Self {
        PolyRatio::new(IntPoly::int(num), IntPoly::int(den))
    }

    pub fn from_poly(p: IntPoly) -> Self {
        PolyRatio {
            num: p,
            den: IntPoly::one(),
        }
    }

    pub fn num(&self) -> &IntPoly {
        &self.num
    }

    pub fn den(&self) -> &IntPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &PolyRatio) -> PolyRatio {
        PolyRatio::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &PolyRatio) -> PolyRatio {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyRatio {
        PolyRatio {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &PolyRatio) -> PolyRatio {
        PolyRatio::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<PolyRatio> {
        if self.is_zero() {
            return None;
        }
        Some(PolyRatio::new(self.den.clone(), self.num.clone()))
    }

    /// Asymptotic degree as the given mass grows: deg(num) - deg(den).
    /// `None` for zero (which vanishes in every limit).
    pub fn asymptotic_degree(&self, var: MassVar) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let dn = self.num.degree(var).unwrap() as i64;
        let dd = self.den.degree(var).unwrap() as i64;
        Some(dn - dd)
    }

    /// The finite limit as the given mass goes to infinity, defined when the
    /// asymptotic degree is zero: ratio of the leading slices.
    pub fn mass_limit(&self, var: MassVar) -> Option<PolyRatio> {
        match self.asymptotic_degree(var) {
            None => Some(PolyRatio::zero()),
            Some(d) if d < 0 => Some(PolyRatio::zero()),
            Some(0) => {
                let dn = self.num.degree(var).unwrap();
                let dd = self.den.degree(var).unwrap();
                Some(PolyRatio::new(
                    self.num.leading_slice(var, dn),
                    self.den.leading_slice(var, dd),
                ))
            }
            Some(_) => None,
        }
    }

    pub fn eval_f64(&self, m1: f64, m2: f64) -> f64 {
        self.num.eval_f64(m1, m2) / self.den.eval_f64(m1, m2)
    }
}

impl fmt::Display for PolyRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// A complex coefficient: real and imaginary rational functions of the masses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coefficient {
    pub re: PolyRatio,
    pub im: PolyRatio,
}

impl Coefficient {
    pub fn new(re: PolyRatio, im: PolyRatio) -> Self {
        Coefficient { re, im }
    }

    pub fn zero() -> Self {
        Coefficient {
            re: PolyRatio::zero(),
            im: PolyRatio::zero(),
        }
    }

    pub fn one() -> Self {
        Coefficient {
            re: PolyRatio::one(),
            im: PolyRatio::zero(),
        }
    }

    pub fn int(n: i64) -> Self {
        Coefficient {
            re: PolyRatio::int(n),
            im: PolyRatio::zero(),
        }
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Coefficient {
            re: PolyRatio::rational(num, den),
            im: PolyRatio::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Coefficient {
            re: PolyRatio::zero(),
            im: PolyRatio::one(),
        }
    }

    pub fn real(re: PolyRatio) -> Self {
        Coefficient {
            re,
            im: PolyRatio::zero(),
        }
    }

    pub fn imaginary(im: PolyRatio) -> Self {
        Coefficient {
            re: PolyRatio::zero(),
            im,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Coefficient {
        Coefficient {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn inv(&self) -> Option<Coefficient> {
        if self.is_zero() {
            return None;
        }
        // 1/(a+bi) = (a-bi)/(a^2+b^2)
        let norm = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let inv_norm = norm.inv()?;
        Some(Coefficient {
            re: self.re.mul(&inv_norm),
            im: self.im.neg().mul(&inv_norm),
        })
    }

    pub fn mul_int(&self, n: i64) -> Coefficient {
        let k = PolyRatio::int(n);
        Coefficient {
            re: self.re.mul(&k),
            im: self.im.mul(&k),
        }
    }

    pub fn eval_complex(&self, m1: f64, m2: f64) -> (f64, f64) {
        (self.re.eval_f64(m1, m2), self.im.eval_f64(m1, m2))
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        Coefficient {
            re: self.re.add(&rhs.re),
            im: self.im.add(&rhs.im),
        }
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        Coefficient {
            re: self.re.sub(&rhs.re),
            im: self.im.sub(&rhs.im),
        }
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        Coefficient {
            re: self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im)),
            im: self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re)),
        }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "({})*i", self.im),
            (false, false) => write!(f, "({} + ({})*i)", self.re, self.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn reduction_and_sign() {
        // (2*m1) / (4*m1^2 - 4*m2^2) reduces to m1 / (2*(m1^2 - m2^2))
        let num = IntPoly::m1().mul_int(&BigInt::from(2));
        let den = IntPoly::m1()
            .pow(2)
            .sub(&IntPoly::m2().pow(2))
            .mul_int(&BigInt::from(4));
        let r = PolyRatio::new(num, den);
        assert_eq!(r.num().to_string(), "m1");
        assert_eq!(r.den().to_string(), "2*m1^2 - 2*m2^2");

        // Denominator sign normalization.
        let r2 = PolyRatio::new(IntPoly::one(), IntPoly::int(-2));
        assert_eq!(r2, PolyRatio::rational(-1, 2));
    }

    #[test]
    fn zero_is_unique() {
        let z = PolyRatio::new(IntPoly::zero(), IntPoly::m1().mul_int(&BigInt::from(7)));
        assert_eq!(z, PolyRatio::zero());
        assert!(z.den().is_one());
    }

    #[test]
    fn field_ops() {
        let a = PolyRatio::new(IntPoly::one(), IntPoly::m1());
        let b = PolyRatio::new(IntPoly::one(), IntPoly::m2());
        let s = a.add(&b);
        assert_eq!(s.num().to_string(), "m1 + m2");
        assert_eq!(s.den().to_string(), "m1*m2");
        let p = a.mul(&b);
        assert_eq!(p.den().to_string(), "m1*m2");
        assert_eq!(a.mul(&a.inv().unwrap()), PolyRatio::one());
    }

    #[test]
    fn complex_ops() {
        let i = Coefficient::i();
        assert_eq!(&i * &i, Coefficient::int(-1));
        let z = Coefficient::new(PolyRatio::rational(1, 2), PolyRatio::rational(-1, 3));
        assert_eq!(&z.conj().im, &PolyRatio::rational(1, 3));
        assert_eq!(&z * &z.inv().unwrap(), Coefficient::one());
    }

    #[test]
    fn asymptotic_degrees() {
        // m2 / (m1^2 - m2^2): degree in m2 is 1 - 2 = -1 -> drops
        let r = PolyRatio::new(
            IntPoly::m2(),
            IntPoly::m1().pow(2).sub(&IntPoly::m2().pow(2)),
        );
        assert_eq!(r.asymptotic_degree(MassVar::M2), Some(-1));
        assert_eq!(r.mass_limit(MassVar::M2).unwrap(), PolyRatio::zero());

        // (m1*m2 + 1) / (2*m2): degree 0 in m2, limit m1/2
        let r = PolyRatio::new(
            IntPoly::m1().mul(&IntPoly::m2()).add(&IntPoly::one()),
            IntPoly::m2().mul_int(&BigInt::from(2)),
        );
        assert_eq!(
            r.mass_limit(MassVar::M2).unwrap(),
            PolyRatio::new(IntPoly::m1(), IntPoly::int(2))
        );

        // m2^2 / m2 diverges
        let r = PolyRatio::new(IntPoly::m2().pow(2), IntPoly::m2());
        assert_eq!(r.mass_limit(MassVar::M2), None);
    }
}
