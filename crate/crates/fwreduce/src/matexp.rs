//! Matrix exponential via scaling-and-squaring.
//!
//! `expm` uses the Pade(13) approximant with the Higham scaling thresholds;
//! `expm1` computes `exp(A) - I` without forming the identity-sized terms,
//! which keeps absolute entry errors proportional to `exp(A) - I` itself
//! (needed when the result multiplies large diagonal energies).

use nalgebra::DMatrix;
use num_complex::Complex64;

type CMat = DMatrix<Complex64>;

fn one_norm(a: &CMat) -> f64 {
    let mut max = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = (0..a.nrows()).map(|i| a[(i, j)].norm()).sum();
        if s > max {
            max = s;
        }
    }
    max
}

fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Pade(13) coefficients.
const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// exp(A) for a square complex matrix.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let norm = one_norm(a);
    let theta13 = 5.371920351148152;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((0.5f64).powi(s as i32), 0.0);
    let a1 = a * scale;

    let a2 = &a1 * &a1;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let id = identity(n);
    let cb = |k: usize| Complex64::new(B[k], 0.0);

    let u_inner = &a6 * cb(13) + &a4 * cb(11) + &a2 * cb(9);
    let u = &a1 * &(&a6 * &u_inner + &a6 * cb(7) + &a4 * cb(5) + &a2 * cb(3) + &id * cb(1));
    let v_inner = &a6 * cb(12) + &a4 * cb(10) + &a2 * cb(8);
    let v = &a6 * &v_inner + &a6 * cb(6) + &a4 * cb(4) + &a2 * cb(2) + &id * cb(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Pade denominator is nonsingular for scaled input");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// exp(A) - I, accurate entrywise for small-norm A.
///
/// Scales A down until its norm is below 1/4, sums the Taylor tail starting
/// at the linear term, then undoes the scaling with the doubling identity
/// `E(2X) = E(X)^2 + 2 E(X)`.
pub fn expm1(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm1 requires a square matrix");
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let norm = one_norm(a);
    let s = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((0.5f64).powi(s as i32), 0.0);
    let a1 = a * scale;

    // E = A + A^2/2! + A^3/3! + ...
    let mut term = a1.clone();
    let mut acc = a1.clone();
    let target = one_norm(&a1) * 1e-18 + f64::MIN_POSITIVE;
    for k in 2..60 {
        term = (&term * &a1) / Complex64::new(k as f64, 0.0);
        acc += &term;
        if one_norm(&term) <= target {
            break;
        }
    }
    let two = Complex64::new(2.0, 0.0);
    for _ in 0..s {
        acc = &acc * &acc + &acc * two;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: &CMat, b: &CMat, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn exp_of_diagonal() {
        let n = 4;
        let mut a = CMat::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = Complex64::new(i as f64 * 0.3 - 0.5, 0.1 * i as f64);
        }
        let e = expm(&a);
        let mut expect = CMat::zeros(n, n);
        for i in 0..n {
            expect[(i, i)] = a[(i, i)].exp();
        }
        assert!(approx_eq(&e, &expect, 1e-13));
    }

    #[test]
    fn exp_of_rotation_generator() {
        // exp(i*theta*sigma_x) = cos(theta) I + i sin(theta) sigma_x
        let theta = 0.7;
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = Complex64::new(0.0, theta);
        a[(1, 0)] = Complex64::new(0.0, theta);
        let e = expm(&a);
        let c = theta.cos();
        let s = theta.sin();
        let mut expect = CMat::zeros(2, 2);
        expect[(0, 0)] = Complex64::new(c, 0.0);
        expect[(1, 1)] = Complex64::new(c, 0.0);
        expect[(0, 1)] = Complex64::new(0.0, s);
        expect[(1, 0)] = Complex64::new(0.0, s);
        assert!(approx_eq(&e, &expect, 1e-12));
    }

    #[test]
    fn expm1_matches_expm_minus_identity() {
        let n = 6;
        let mut a = CMat::zeros(n, n);
        let mut state = 1u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 0.01
        };
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = Complex64::new(rnd(), rnd());
            }
        }
        let e1 = expm1(&a);
        let e = expm(&a) - identity(n);
        assert!((&e1 - &e).norm() <= 1e-12 * e1.norm().max(1e-30));
        // Large-norm path exercises the doubling identity.
        let big = &a * Complex64::new(400.0, 0.0);
        let e1 = expm1(&big);
        let e = expm(&big) - identity(n);
        assert!(approx_eq(&e1, &e, 1e-11));
    }

    #[test]
    fn scaling_branch_large_norm() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = Complex64::new(8.0, 0.0);
        a[(1, 0)] = Complex64::new(-8.0, 0.0);
        // exp of a rotation by 8 radians
        let e = expm(&a);
        let mut expect = CMat::zeros(2, 2);
        expect[(0, 0)] = Complex64::new(8.0f64.cos(), 0.0);
        expect[(1, 1)] = Complex64::new(8.0f64.cos(), 0.0);
        expect[(0, 1)] = Complex64::new(8.0f64.sin(), 0.0);
        expect[(1, 0)] = Complex64::new(-(8.0f64.sin()), 0.0);
        assert!(approx_eq(&e, &expect, 1e-12));
    }
}
