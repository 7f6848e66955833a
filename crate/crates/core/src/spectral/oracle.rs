//! Reference eigenvalues for small matrices via the characteristic polynomial.
//!
//! Coefficients come from the Faddeev–LeVerrier recurrence and the roots from
//! the quadratic formula (dimension ≤ 2) or Aberth–Ehrlich simultaneous
//! iteration. None of this shares code with the QR solver, so the two can be
//! used to check each other.

use alloc::vec;
use alloc::vec::Vec;

use libm::{cos, sin};
use num_complex::Complex64;

use super::DenseMatrix;

/// Coefficients `c[0..=n]` of `det(λI - A) = Σ c[k] λ^k`, with `c[n] = 1`.
pub fn characteristic_polynomial(matrix: &DenseMatrix) -> Vec<f64> {
    let n = matrix.dim();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = DenseMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matrix.mul(&m);
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        coeffs[n - k] = -matrix.mul(&next).trace() / k as f64;
        m = next;
    }
    coeffs
}

fn eval(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // Horner for p and p'
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a monic real polynomial given by ascending coefficients.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    match n {
        0 => Vec::new(),
        1 => vec![Complex64::new(-coeffs[0], 0.0)],
        2 => {
            let (b, c) = (coeffs[1], coeffs[0]);
            let disc = b * b - 4.0 * c;
            if disc >= 0.0 {
                let s = libm::sqrt(disc);
                // numerically stable pair
                let q = -0.5 * (b + if b >= 0.0 { s } else { -s });
                if q == 0.0 {
                    vec![Complex64::new(0.0, 0.0); 2]
                } else {
                    vec![Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
                }
            } else {
                let im = 0.5 * libm::sqrt(-disc);
                vec![Complex64::new(-0.5 * b, im), Complex64::new(-0.5 * b, -im)]
            }
        }
        _ => aberth(coeffs),
    }
}

fn aberth(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    // Cauchy bound on root moduli
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::new(radius * cos(angle), radius * sin(angle))
        })
        .collect();

    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Eigenvalues of a square matrix (intended for dimension ≤ 4) as the roots
/// of its characteristic polynomial.
pub fn charpoly_roots_oracle(matrix: &DenseMatrix) -> Vec<Complex64> {
    polynomial_roots(&characteristic_polynomial(matrix))
}

/// Maximum distance under the best one-to-one pairing of two equally sized
/// multisets (exhaustive over permutations; meant for a handful of points).
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    fn search(a: &[Complex64], b: &[Complex64], used: &mut [bool], i: usize, worst: f64, best: &mut f64) {
        if worst >= *best {
            return;
        }
        if i == a.len() {
            *best = worst;
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                search(a, b, used, i + 1, worst.max((a[i] - b[j]).norm()), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    search(a, b, &mut vec![false; b.len()], 0, 0.0, &mut best);
    if a.is_empty() {
        0.0
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let roots = charpoly_roots_oracle(&DenseMatrix::from_rows([[3.25]]));
        assert_eq!(roots, [Complex64::new(3.25, 0.0)]);
    }

    #[test]
    fn rotation() {
        let roots = charpoly_roots_oracle(&DenseMatrix::from_rows([[0.0, -1.0], [1.0, 0.0]]));
        let want = [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        assert!(multiset_distance(&roots, &want) < 1e-15);
    }

    #[test]
    fn faddeev_leverrier_coefficients() {
        // λ² − 4λ + 5
        let c = characteristic_polynomial(&DenseMatrix::from_rows([[2.0, -1.0], [1.0, 2.0]]));
        assert_eq!(c, [5.0, -4.0, 1.0]);
        // diag(1,2,3): (λ−1)(λ−2)(λ−3) = λ³ − 6λ² + 11λ − 6
        let c = characteristic_polynomial(&DenseMatrix::from_diagonal(&[1.0, 2.0, 3.0]));
        assert_eq!(c, [-6.0, 11.0, -6.0, 1.0]);
    }

    #[test]
    fn quartic_with_complex_pairs() {
        // (λ² + 1)(λ² − 2λ + 5): roots ±i, 1 ± 2i
        // = λ⁴ − 2λ³ + 6λ² − 2λ + 5
        let roots = polynomial_roots(&[5.0, -2.0, 6.0, -2.0, 1.0]);
        let want = [
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(1.0, 2.0),
            Complex64::new(1.0, -2.0),
        ];
        assert!(multiset_distance(&roots, &want) < 1e-12);
    }

    #[test]
    fn pairing_distance() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        let b = [Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.5)];
        assert_eq!(multiset_distance(&a, &b), 0.5);
    }
}
