//! Independent numerical certification of symbolic reductions.
//!
//! Expressions are evaluated on concrete graded matrices (two 4x4 Dirac
//! factors tensored with auxiliary space) and the claimed unitary equivalence
//! is verified by exact matrix conjugation: the residual between the
//! conjugated input and the transformed Hamiltonian must scale at least one
//! order in 1/c faster than the kept terms.
//!
//! The conjugation residual is computed with the rest-energy part held as an
//! exact diagonal and only commutator-sized quantities formed in floating
//! point; otherwise rounding of the O(c^2) rest terms would drown the
//! O(c^-5) signal at the top of the sweep.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::engine::ReductionTrace;
use crate::expr::Expression;
use crate::matexp::{expm, expm1};
use crate::table::{Parity, ParticleParity, SymbolId, SymbolTable};

type CMat = DMatrix<Complex64>;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("no matrix assigned to symbol `{0}`")]
    MissingMatrix(String),
    #[error("coefficient denominator vanishes at the numeric masses: {0}")]
    SingularDenominator(String),
    #[error("accumulated transformation is not unitary (defect {0:.3e})")]
    NonUnitary(f64),
    #[error("need at least 4 distinct ascending c values, got {0}")]
    TooFewPoints(usize),
    #[error("all sweep points are saturated below the floor {0:.1e}")]
    AllSaturated(f64),
    #[error("masses must be positive and distinct when odd-odd coefficients appear")]
    BadMasses,
}

/// Concrete numeric matrices for the betas and every symbol, plus numeric
/// masses and c.
#[derive(Debug, Clone)]
pub struct MatrixAssignment {
    pub table: Arc<SymbolTable>,
    pub aux_dim: usize,
    pub m1: f64,
    pub m2: f64,
    pub c: f64,
    pub seed: u64,
    /// Signs of beta1 / beta2 on the full space (diagonal matrices).
    beta1: Vec<f64>,
    beta2: Vec<f64>,
    matrices: BTreeMap<SymbolId, CMat>,
    dim: usize,
}

fn beta_sign(i: usize) -> f64 {
    // beta = diag(1, 1, -1, -1)
    if i % 4 < 2 {
        1.0
    } else {
        -1.0
    }
}

fn dirac_beta_signs(dim: usize, aux: usize) -> (Vec<f64>, Vec<f64>) {
    // Full index = ((d1 * 4 + d2) * aux + a). beta1 reads d1, beta2 reads d2.
    let mut b1 = vec![0.0; dim];
    let mut b2 = vec![0.0; dim];
    for d1 in 0..4 {
        for d2 in 0..4 {
            for a in 0..aux {
                let idx = (d1 * 4 + d2) * aux + a;
                b1[idx] = beta_sign(d1);
                b2[idx] = beta_sign(d2);
            }
        }
    }
    (b1, b2)
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mt = m.adjoint();
    (m + mt) * Complex64::new(0.5, 0.0)
}

/// Conjugation by a diagonal sign matrix: (S M S)_ij = s_i s_j M_ij. Exact in
/// floating point.
fn sign_conjugate(m: &CMat, signs: &[f64]) -> CMat {
    let mut out = m.clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let s = signs[i] * signs[j];
            if s < 0.0 {
                out[(i, j)] = -out[(i, j)];
            }
        }
    }
    out
}

fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Project a random Hermitian draw onto one parity sector:
/// X = (M + s1 b1 M b1 + s2 b2 M b2 + s1 s2 b1 b2 M b1 b2) / 4
/// with s_a = +1 for even, -1 for odd; then re-Hermitize.
pub fn random_sector_matrix(
    sector: Parity,
    beta1: &[f64],
    beta2: &[f64],
    rng: &mut ChaCha8Rng,
) -> CMat {
    let n = beta1.len();
    let m = random_hermitian(rng, n);
    sector_project(&m, sector, beta1, beta2)
}

fn sector_project(m: &CMat, sector: Parity, beta1: &[f64], beta2: &[f64]) -> CMat {
    let s1 = if sector.p1 == ParticleParity::Even {
        1.0
    } else {
        -1.0
    };
    let s2 = if sector.p2 == ParticleParity::Even {
        1.0
    } else {
        -1.0
    };
    let c1 = sign_conjugate(m, beta1);
    let c2 = sign_conjugate(m, beta2);
    let c12 = sign_conjugate(&c1, beta2);
    let quarter = Complex64::new(0.25, 0.0);
    let x = (m + c1 * Complex64::new(s1, 0.0) + c2 * Complex64::new(s2, 0.0)
        + c12 * Complex64::new(s1 * s2, 0.0))
        * quarter;
    let xa = x.adjoint();
    (x + xa) * Complex64::new(0.5, 0.0)
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Random Hermitian 4x4 anticommuting with beta = diag(1,1,-1,-1):
/// off-diagonal-block form.
fn random_dirac_odd(rng: &mut ChaCha8Rng) -> CMat {
    let mut m = CMat::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j + 2)] = z;
            m[(j + 2, i)] = z.conj();
        }
    }
    m
}

impl MatrixAssignment {
    /// Draw matrices for every symbol of the table.
    ///
    /// When the table declares the OE/EO commutation relation, those two
    /// symbols are built on separate auxiliary tensor factors (each of size
    /// `aux_dim`), which makes their commutator exactly zero in floating
    /// point; the remaining symbols are random within their sectors over the
    /// full space. Without the relation the auxiliary space is a single
    /// factor of size `aux_dim`.
    pub fn random(
        table: &Arc<SymbolTable>,
        m1: f64,
        m2: f64,
        c: f64,
        aux_dim: usize,
        seed: u64,
    ) -> Result<MatrixAssignment, OracleError> {
        assert!(aux_dim >= 1, "aux_dim must be at least 1");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let oe = table.lookup("OE");
        let eo = table.lookup("EO");
        let split = match (oe, eo) {
            (Some(a), Some(b)) => table.commutes(a, b),
            _ => false,
        };
        let aux_total = if split { aux_dim * aux_dim } else { aux_dim };
        let dim = 16 * aux_total;
        let (beta1, beta2) = dirac_beta_signs(dim, aux_total);

        let mut matrices = BTreeMap::new();
        for id in table.ids() {
            let decl = table.decl(id);
            let is_split_symbol = split && (Some(id) == oe || Some(id) == eo);
            let mut x = if is_split_symbol {
                // One odd Dirac factor on its own particle slot, one random
                // Hermitian on its own auxiliary slot, identities elsewhere:
                // the OE and EO draws then commute entry-exactly.
                let d = random_dirac_odd(&mut rng);
                let a = random_hermitian(&mut rng, aux_dim);
                if Some(id) == oe {
                    kron(&kron(&kron(&d, &identity(4)), &a), &identity(aux_dim))
                } else {
                    kron(&kron(&kron(&identity(4), &d), &identity(aux_dim)), &a)
                }
            } else {
                random_sector_matrix(decl.parity, &beta1, &beta2, &mut rng)
            };
            let norm = frobenius(&x);
            if norm > 0.0 {
                x /= Complex64::new(norm, 0.0);
            }
            matrices.insert(id, x);
        }
        Ok(MatrixAssignment {
            table: table.clone(),
            aux_dim,
            m1,
            m2,
            c,
            seed,
            beta1,
            beta2,
            matrices,
            dim,
        })
    }

    pub fn with_c(&self, c: f64) -> MatrixAssignment {
        let mut a = self.clone();
        a.c = c;
        a
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbol_matrix(&self, id: SymbolId) -> Option<&CMat> {
        self.matrices.get(&id)
    }

    pub fn beta1_signs(&self) -> &[f64] {
        &self.beta1
    }

    pub fn beta2_signs(&self) -> &[f64] {
        &self.beta2
    }

    /// Apply beta1^e1 beta2^e2 from the left (diagonal sign scaling of rows).
    fn apply_beta_left(&self, m: &mut CMat, beta: (u8, u8)) {
        if beta == (0, 0) {
            return;
        }
        for i in 0..self.dim {
            let mut s = 1.0;
            if beta.0 == 1 {
                s *= self.beta1[i];
            }
            if beta.1 == 1 {
                s *= self.beta2[i];
            }
            if s < 0.0 {
                for j in 0..self.dim {
                    m[(i, j)] = -m[(i, j)];
                }
            }
        }
    }
}

/// Evaluate an expression as a concrete matrix: words map to matrix
/// products, beta sectors to the diagonal beta matrices, coefficients to
/// complex numbers with c^{c_exp} applied.
pub fn evaluate(expr: &Expression, asg: &MatrixAssignment) -> Result<CMat, OracleError> {
    let mut acc = CMat::zeros(asg.dim, asg.dim);
    for (key, coeff) in expr.terms() {
        if !coeff.re.den().eval_f64(asg.m1, asg.m2).is_normal()
            && !coeff.re.den().is_one()
        {
            return Err(OracleError::SingularDenominator(coeff.re.to_string()));
        }
        if !coeff.im.den().eval_f64(asg.m1, asg.m2).is_normal()
            && !coeff.im.den().is_one()
        {
            return Err(OracleError::SingularDenominator(coeff.im.to_string()));
        }
        let (re, im) = coeff.eval_complex(asg.m1, asg.m2);
        let scale = Complex64::new(re, im) * Complex64::new(asg.c.powi(key.c_exp), 0.0);
        if !(scale.re.is_finite() && scale.im.is_finite()) {
            return Err(OracleError::SingularDenominator(coeff.to_string()));
        }
        let mut term: Option<CMat> = None;
        for s in &key.word {
            let m = asg
                .matrices
                .get(s)
                .ok_or_else(|| OracleError::MissingMatrix(asg.table.decl(*s).name.clone()))?;
            term = Some(match term {
                None => m.clone(),
                Some(t) => t * m,
            });
        }
        let mut term = term.unwrap_or_else(|| identity(asg.dim));
        asg.apply_beta_left(&mut term, key.beta);
        acc += term * scale;
    }
    Ok(acc)
}

/// Residuals of one exact conjugation replay.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Residual {
    pub absolute: f64,
    pub relative: f64,
    pub unitarity_defect: f64,
}

/// Split off the rest-energy part (empty-word monomials with positive
/// effective order); it evaluates to an exact diagonal.
fn rest_split(h: &Expression) -> (Expression, Expression) {
    let rest = h.filter(|k, _| k.word.is_empty() && k.c_exp > 0);
    let other = h.filter(|k, _| !(k.word.is_empty() && k.c_exp > 0));
    (rest, other)
}

fn diagonal_of(m: &CMat) -> DVector<Complex64> {
    DVector::from_fn(m.nrows(), |i, _| m[(i, i)])
}

/// `U H U^dag - H_tr` with `U` the product of `exp(i S_k)` in trace order.
///
/// The rest part `R` stays an exact diagonal: for each step the update
/// `e^{iS} R e^{-iS} - R = e^{iS} [R, e^{-iS} - I]` is formed entrywise as
/// `(r_i - r_j) T_ij`, so no O(c^2) products are subtracted in floating
/// point. Returns the Frobenius residual, both absolute and relative to
/// ||evaluate(H)||.
pub fn exact_conjugation_residual(
    h: &Expression,
    trace: &ReductionTrace,
    asg: &MatrixAssignment,
) -> Result<Residual, OracleError> {
    let (rest_h, body_h) = rest_split(h);
    let (rest_tr, body_tr) = rest_split(&trace.transformed);
    let r = diagonal_of(&evaluate(&rest_h, asg)?);
    let r_tr = diagonal_of(&evaluate(&rest_tr, asg)?);

    let mut a = CMat::zeros(asg.dim, asg.dim);
    let mut v = evaluate(&body_h, asg)?;
    let mut u_total = identity(asg.dim);
    let i_unit = Complex64::new(0.0, 1.0);
    for step in &trace.steps {
        let s = evaluate(&step.generator, asg)?;
        let is = &s * i_unit;
        let u = expm(&is);
        let t = expm1(&(&s * (-i_unit)));
        // [R, T]_ij = (r_i - r_j) T_ij
        let mut rt = t.clone();
        for i in 0..asg.dim {
            for j in 0..asg.dim {
                rt[(i, j)] *= r[i] - r[j];
            }
        }
        a = &u * &a * u.adjoint() + &u * rt;
        v = &u * &v * u.adjoint();
        u_total = &u * &u_total;
    }
    let defect = frobenius(&(&u_total * u_total.adjoint() - identity(asg.dim)));
    if defect > 1e-10 {
        return Err(OracleError::NonUnitary(defect));
    }

    let w = evaluate(&body_tr, asg)?;
    let mut d = &a + &v - &w;
    for i in 0..asg.dim {
        d[(i, i)] += r[i] - r_tr[i];
    }
    let absolute = frobenius(&d);
    let h_norm = frobenius(&evaluate(h, asg)?);
    Ok(Residual {
        absolute,
        relative: absolute / h_norm,
        unitarity_defect: defect,
    })
}

/// Absolute residuals below this are treated as saturated by round-off.
pub const SATURATION_FLOOR: f64 = 1e-13;

/// One point of a scaling sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPoint {
    pub c: f64,
    pub absolute: f64,
    pub relative: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of log(absolute residual) vs log(c) over the
    /// unsaturated prefix.
    pub slope: f64,
    pub fitted_points: usize,
}

/// Sweep the same symbol matrices and masses over several c values and fit
/// the order-scaling slope of the conjugation residual.
pub fn order_scaling_slope(
    h: &Expression,
    trace: &ReductionTrace,
    base: &MatrixAssignment,
    c_values: &[f64],
) -> Result<SlopeReport, OracleError> {
    let mut distinct = c_values.to_vec();
    distinct.dedup();
    if distinct.len() < 4 || c_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(OracleError::TooFewPoints(distinct.len()));
    }
    let mut points = Vec::with_capacity(c_values.len());
    for &c in c_values {
        let asg = base.with_c(c);
        let res = exact_conjugation_residual(h, trace, &asg)?;
        points.push(SweepPoint {
            c,
            absolute: res.absolute,
            relative: res.relative,
            saturated: res.absolute < SATURATION_FLOOR,
        });
    }
    // Refit on the longest unsaturated prefix.
    let keep: Vec<&SweepPoint> = points.iter().take_while(|p| !p.saturated).collect();
    if keep.len() < 2 {
        return Err(OracleError::AllSaturated(SATURATION_FLOOR));
    }
    let n = keep.len() as f64;
    let xs: Vec<f64> = keep.iter().map(|p| p.c.ln()).collect();
    let ys: Vec<f64> = keep.iter().map(|p| p.absolute.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    Ok(SlopeReport {
        fitted_points: keep.len(),
        slope: sxy / sxx,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::comm;

    fn std_assignment(rel: bool) -> (Arc<SymbolTable>, MatrixAssignment) {
        let t = SymbolTable::two_body(rel);
        let asg = MatrixAssignment::random(&t, 1.0, 2.0, 16.0, 2, 7).unwrap();
        (t, asg)
    }

    #[test]
    fn sector_matrices_graded_exactly() {
        let (t, asg) = std_assignment(false);
        for id in t.ids() {
            let decl = t.decl(id);
            let x = asg.symbol_matrix(id).unwrap();
            let c1 = sign_conjugate(x, asg.beta1_signs());
            let c2 = sign_conjugate(x, asg.beta2_signs());
            let s1 = if decl.parity.p1 == ParticleParity::Even {
                1.0
            } else {
                -1.0
            };
            let s2 = if decl.parity.p2 == ParticleParity::Even {
                1.0
            } else {
                -1.0
            };
            assert!(frobenius(&(c1 - x * Complex64::new(s1, 0.0))) == 0.0);
            assert!(frobenius(&(c2 - x * Complex64::new(s2, 0.0))) == 0.0);
            // Hermitian to tight tolerance and unit Frobenius norm.
            assert!(frobenius(&(x.adjoint() - x)) <= 1e-12 * frobenius(x));
            assert!((frobenius(x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_idempotent() {
        let t = SymbolTable::two_body(false);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (b1, b2) = dirac_beta_signs(32, 2);
        let x = random_sector_matrix(Parity::ODD_EVEN, &b1, &b2, &mut rng);
        let again = sector_project(&x, Parity::ODD_EVEN, &b1, &b2);
        assert!(frobenius(&(&again - &x)) <= 1e-14);
        let _ = t;
    }

    #[test]
    fn declared_relation_is_exact() {
        let (t, asg) = std_assignment(true);
        let oe = asg.symbol_matrix(t.lookup("OE").unwrap()).unwrap();
        let eo = asg.symbol_matrix(t.lookup("EO").unwrap()).unwrap();
        let lhs = oe * eo;
        let rhs = eo * oe;
        assert!(frobenius(&(lhs - rhs)) == 0.0, "relation must hold exactly");
    }

    #[test]
    fn evaluate_is_a_homomorphism() {
        let (t, asg) = std_assignment(false);
        let a = &Expression::symbol(&t, "OE") * &Expression::beta1(&t);
        let b = &Expression::symbol(&t, "EO") + &Expression::symbol(&t, "OO");
        let ma = evaluate(&a, &asg).unwrap();
        let mb = evaluate(&b, &asg).unwrap();
        let prod = evaluate(&(&a * &b), &asg).unwrap();
        assert!(frobenius(&(&ma * &mb - &prod)) <= 1e-12 * frobenius(&prod).max(1.0));
        let br = evaluate(&comm(&a, &b), &asg).unwrap();
        assert!(
            frobenius(&(&ma * &mb - &mb * &ma - &br)) <= 1e-12 * frobenius(&br).max(1.0)
        );
        let adj = evaluate(&a.adjoint().unwrap(), &asg).unwrap();
        assert!(frobenius(&(ma.adjoint() - adj)) <= 1e-12);
    }

    #[test]
    fn evaluate_rejects_equal_masses_on_mass_difference_denominators() {
        let t = SymbolTable::two_body(false);
        let asg = MatrixAssignment::random(&t, 1.0, 1.0, 8.0, 1, 0).unwrap();
        let coeff = crate::coeff::Coefficient::real(crate::coeff::PolyRatio::new(
            crate::poly::IntPoly::one(),
            crate::poly::IntPoly::m1().pow(2).sub(&crate::poly::IntPoly::m2().pow(2)),
        ));
        let e = Expression::scalar(&t, coeff);
        assert!(matches!(
            evaluate(&e, &asg),
            Err(OracleError::SingularDenominator(_))
        ));
    }

    #[test]
    fn empty_trace_zero_residual() {
        let (t, asg) = std_assignment(false);
        let h = &Expression::rest_energy_two_body(&t) + &Expression::symbol(&t, "EE");
        let trace = ReductionTrace {
            steps: vec![],
            transformed: h.clone(),
        };
        let r = exact_conjugation_residual(&h, &trace, &asg).unwrap();
        assert!(r.absolute <= 1e-13);
    }
}
