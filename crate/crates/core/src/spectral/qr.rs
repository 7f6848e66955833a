//! Eigenvalues of a general real matrix: balancing, reduction to upper
//! Hessenberg form by stabilized elementary similarity transforms, then the
//! Francis double-shift QR iteration on the Hessenberg matrix.

use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};
use num_complex::Complex64;

use super::DenseMatrix;

const RADIX: f64 = 2.0;

/// Row/column scaling by powers of two so that row and column norms are
/// comparable. Eigenvalues are unchanged (diagonal similarity transform).
fn balance(a: &mut [f64], n: usize) {
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += fabs(a[j * n + i]);
                    r += fabs(a[i * n + j]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i * n + j] *= g;
                }
                for j in 0..n {
                    a[j * n + i] *= f;
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form with partial pivoting. Entries below
/// the subdiagonal are cleared on return.
fn hessenberg(a: &mut [f64], n: usize) {
    for m in 1..n.saturating_sub(1) {
        let mut x = 0.0;
        let mut pivot = m;
        for j in m..n {
            if fabs(a[j * n + m - 1]) > fabs(x) {
                x = a[j * n + m - 1];
                pivot = j;
            }
        }
        if pivot != m {
            for j in m - 1..n {
                a.swap(pivot * n + j, m * n + j);
            }
            for j in 0..n {
                a.swap(j * n + pivot, j * n + m);
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[i * n + m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i * n + m - 1] = y;
                    for j in m..n {
                        a[i * n + j] -= y * a[m * n + j];
                    }
                    for j in 0..n {
                        a[j * n + m] += y * a[j * n + i];
                    }
                }
            }
        }
    }
    for i in 2..n {
        for j in 0..i - 1 {
            a[i * n + j] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        fabs(a)
    } else {
        -fabs(a)
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix. Returns `None` when
/// the total number of QR sweeps exceeds `max_sweeps`.
fn hessenberg_qr(a: &mut [f64], n: usize, max_sweeps: usize) -> Option<Vec<Complex64>> {
    let at = |a: &[f64], i: isize, j: isize| a[i as usize * n + j as usize];
    macro_rules! a {
        ($i:expr, $j:expr) => {
            a[($i) as usize * n + ($j) as usize]
        };
    }

    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += fabs(a[i * n + j]);
        }
    }

    let mut sweeps = 0usize;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // deflation: look for a negligible subdiagonal element
            let mut l = nn;
            while l >= 1 {
                let mut s = fabs(at(a, l - 1, l - 1)) + fabs(at(a, l, l));
                if s == 0.0 {
                    s = anorm;
                }
                if fabs(at(a, l, l - 1)) + s == s {
                    a!(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = at(a, nn, nn);
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = at(a, nn - 1, nn - 1);
            let mut w = at(a, nn, nn - 1) * at(a, nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = sqrt(fabs(q));
                x += t;
                let (i, j) = ((nn - 1) as usize, nn as usize);
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[i] = x + z;
                    wr[j] = x + z;
                    if z != 0.0 {
                        wr[j] = x - w / z;
                    }
                    wi[i] = 0.0;
                    wi[j] = 0.0;
                } else {
                    wr[i] = x + p;
                    wr[j] = x + p;
                    wi[i] = z;
                    wi[j] = -z;
                }
                nn -= 2;
                break;
            }

            if sweeps >= max_sweeps {
                return None;
            }
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=nn {
                    a!(i, i) -= x;
                }
                let s = fabs(at(a, nn, nn - 1)) + fabs(at(a, nn - 1, nn - 2));
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            sweeps += 1;

            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = at(a, m, m);
                let rr = x - z;
                let s = y - z;
                p = (rr * s - w) / at(a, m + 1, m) + at(a, m, m + 1);
                q = at(a, m + 1, m + 1) - z - rr - s;
                r = at(a, m + 2, m + 1);
                let s = fabs(p) + fabs(q) + fabs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = fabs(at(a, m, m - 1)) * (fabs(q) + fabs(r));
                let v = fabs(p) * (fabs(at(a, m - 1, m - 1)) + fabs(z) + fabs(at(a, m + 1, m + 1)));
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a!(i, i - 2) = 0.0;
                if i != m + 2 {
                    a!(i, i - 3) = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = at(a, k, k - 1);
                    q = at(a, k + 1, k - 1);
                    r = 0.0;
                    if k != nn - 1 {
                        r = at(a, k + 2, k - 1);
                    }
                    x = fabs(p) + fabs(q) + fabs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign(sqrt(p * p + q * q + r * r), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a!(k, k - 1) = -at(a, k, k - 1);
                        }
                    } else {
                        a!(k, k - 1) = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = at(a, k, j) + q * at(a, k + 1, j);
                        if k != nn - 1 {
                            pp += r * at(a, k + 2, j);
                            a!(k + 2, j) -= pp * z;
                        }
                        a!(k + 1, j) -= pp * y;
                        a!(k, j) -= pp * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * at(a, i, k) + y * at(a, i, k + 1);
                        if k != nn - 1 {
                            pp += z * at(a, i, k + 2);
                            a!(i, k + 2) -= pp * r;
                        }
                        a!(i, k + 1) -= pp * q;
                        a!(i, k) -= pp;
                    }
                }
                k += 1;
            }
        }
    }

    Some(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
}

/// All eigenvalues of `matrix` in Schur order. Complex conjugate pairs are
/// adjacent, the member with positive imaginary part first, and the two are
/// exact conjugates of each other. `None` on non-convergence.
pub(crate) fn eigenvalues(matrix: &DenseMatrix, max_sweeps: usize) -> Option<Vec<Complex64>> {
    let n = matrix.dim();
    match n {
        0 => return Some(Vec::new()),
        1 => return Some(vec![Complex64::new(matrix[(0, 0)], 0.0)]),
        _ => {}
    }
    if !matrix.is_finite() {
        return None;
    }
    let mut a = matrix.as_slice().to_vec();
    balance(&mut a, n);
    hessenberg(&mut a, n);
    let values = hessenberg_qr(&mut a, n, max_sweeps)?;
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return None;
    }
    Some(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn hessenberg_preserves_trace() {
        let m = DenseMatrix::from_rows([
            [1.0, 2.0, 3.0, 4.0],
            [-1.0, 0.5, 2.0, 0.0],
            [0.3, 0.2, -1.0, 1.0],
            [4.0, -2.0, 0.1, 0.0],
        ]);
        let mut a = m.as_slice().to_vec();
        hessenberg(&mut a, 4);
        let tr: f64 = (0..4).map(|i| a[i * 4 + i]).sum();
        assert!((tr - m.trace()).abs() < 1e-12);
        assert_eq!(a[2 * 4], 0.0);
        assert_eq!(a[3 * 4 + 1], 0.0);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let m = DenseMatrix::from_rows([[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let ev = sorted(eigenvalues(&m, 300).unwrap());
        for (got, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got.re - want).abs() < 1e-10 && got.im.abs() < 1e-10, "{got}");
        }
    }

    #[test]
    fn zero_budget_reports_non_convergence() {
        let m = DenseMatrix::from_rows([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 10.0]]);
        assert!(eigenvalues(&m, 0).is_none());
        assert!(eigenvalues(&m, 300).is_some());
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let m = DenseMatrix::from_rows([[1.0, f64::NAN], [0.0, 1.0]]);
        assert!(eigenvalues(&m, 200).is_none());
    }
}
