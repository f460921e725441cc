//! Zeroth-order prolate spheroidal wave function via its Legendre expansion.
//!
//! The prolate differential operator is tridiagonal on the even normalized
//! Legendre polynomials; the lowest eigenpair gives psi_0.

use crate::error::{Error, Result};

/// Legendre coefficients (standard `P_k` basis, odd entries zero) of psi_0
/// with unit L2 norm on [-1, 1] and `psi_0(0) > 0`.
pub fn prolate_legendre_coefficients(c: f64) -> Result<Vec<f64>> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("prolate bandlimit must be positive, got {c}")));
    }
    let order = (2.0 * c).ceil() as usize + 60;
    let n = order / 2 + 1;
    let c2 = c * c;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    for i in 0..n {
        let k = (2 * i) as f64;
        diag[i] = k * (k + 1.0) + c2 * (2.0 * k * (k + 1.0) - 1.0) / ((2.0 * k + 3.0) * (2.0 * k - 1.0));
        if i + 1 < n {
            off[i] = c2 * (k + 1.0) * (k + 2.0) / ((2.0 * k + 3.0) * ((2.0 * k + 1.0) * (2.0 * k + 5.0)).sqrt());
        }
    }
    let chi = lowest_eigenvalue(&diag, &off);
    let vec = inverse_iteration(&diag, &off, chi).ok_or(Error::EigenSolve { c })?;

    let mut coeffs = vec![0.0; 2 * n - 1];
    for (i, v) in vec.iter().enumerate() {
        let k = 2 * i;
        coeffs[k] = v * (k as f64 + 0.5).sqrt();
    }
    if legendre_eval(&coeffs, 0.0) < 0.0 {
        coeffs.iter_mut().for_each(|a| *a = -*a);
    }
    let amax = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mut keep = coeffs.len();
    while keep > 1 && coeffs[keep - 1].abs() < 1e-16 * amax {
        keep -= 1;
    }
    coeffs.truncate(keep);
    if keep + 4 >= 2 * n - 1 {
        // coefficients did not decay inside the expansion order
        return Err(Error::EigenSolve { c });
    }
    Ok(coeffs)
}

fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = diag[0] - x;
    if d < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if d == 0.0 { f64::MIN_POSITIVE } else { d };
        d = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn lowest_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i + 1 < n {
            r += off[i].abs();
        }
        lo = lo.min(diag[i] - r);
    }
    let mut hi = diag[0];
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn inverse_iteration(diag: &[f64], off: &[f64], shift: f64) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut x = vec![1.0; n];
    for _ in 0..4 {
        // Thomas algorithm on (A - shift I) y = x
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let mut b = diag[0] - shift;
        if b == 0.0 {
            b = 1e-300;
        }
        cp[0] = if n > 1 { off[0] / b } else { 0.0 };
        dp[0] = x[0] / b;
        for i in 1..n {
            let mut m = diag[i] - shift - off[i - 1] * cp[i - 1];
            if m == 0.0 {
                m = 1e-300;
            }
            cp[i] = if i + 1 < n { off[i] / m } else { 0.0 };
            dp[i] = (x[i] - off[i - 1] * dp[i - 1]) / m;
        }
        let mut y = vec![0.0; n];
        y[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            y[i] = dp[i] - cp[i] * y[i + 1];
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        x = y.into_iter().map(|v| v / norm).collect();
    }
    Some(x)
}

/// Clenshaw evaluation of `sum a_k P_k(x)`.
pub fn legendre_eval(a: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for k in (1..a.len()).rev() {
        let kf = k as f64;
        // P_{k+1} = ((2k+1) x P_k - k P_{k-1}) / (k+1)
        let alpha = (2.0 * kf + 1.0) * x / (kf + 1.0);
        let beta = -(kf + 1.0) / (kf + 2.0);
        let b0 = a[k] + alpha * b1 + beta * b2;
        b2 = b1;
        b1 = b0;
    }
    // P_0 = 1, P_1 = x, beta_1 = -1/2
    a[0] + x * b1 - 0.5 * b2
}

/// Coefficients of the derivative of a Legendre series.
pub fn legendre_derivative(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut b = vec![0.0; n];
    for k in (1..n).rev() {
        let next = if k + 1 < n { b[k + 1] / (2.0 * k as f64 + 3.0) } else { 0.0 };
        b[k - 1] = (2.0 * k as f64 - 1.0) * (a[k] + next);
    }
    b.truncate(n - 1);
    b
}

/// Coefficients of the antiderivative vanishing at x = -1.
pub fn legendre_antiderivative(a: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + 1];
    out[0] += a[0];
    out[1] += a[0];
    for k in 1..a.len() {
        let s = a[k] / (2.0 * k as f64 + 1.0);
        out[k + 1] += s;
        out[k - 1] -= s;
    }
    out
}

/// Coefficients of `x f(x)`.
pub fn legendre_times_x(a: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + 1];
    for k in 0..a.len() {
        let kf = k as f64;
        out[k + 1] += a[k] * (kf + 1.0) / (2.0 * kf + 1.0);
        if k > 0 {
            out[k - 1] += a[k] * kf / (2.0 * kf + 1.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_direct(a: &[f64], x: f64) -> f64 {
        let mut p0 = 1.0;
        let mut p1 = x;
        let mut s = a[0] + if a.len() > 1 { a[1] * x } else { 0.0 };
        for k in 2..a.len() {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            s += a[k] * p2;
            p0 = p1;
            p1 = p2;
        }
        s
    }

    #[test]
    fn clenshaw_matches_recurrence_sum() {
        let a: Vec<f64> = (0..30).map(|k| 1.0 / (1.0 + k as f64).powi(2)).collect();
        for &x in &[-1.0, -0.3, 0.0, 0.5, 1.0] {
            assert!((legendre_eval(&a, x) - legendre_direct(&a, x)).abs() < 1e-14);
        }
    }

    #[test]
    fn series_calculus_on_cubic() {
        // f = P_3 = (5x^3 - 3x)/2
        let a = [0.0, 0.0, 0.0, 1.0];
        let d = legendre_derivative(&a);
        let x = 0.37;
        assert!((legendre_eval(&d, x) - (7.5 * x * x - 1.5)).abs() < 1e-14);
        let int = legendre_antiderivative(&a);
        let exact = |x: f64| (5.0 * x.powi(4) / 4.0 - 1.5 * x * x) / 2.0 - (5.0 / 4.0 - 1.5) / 2.0;
        assert!((legendre_eval(&int, x) - exact(x)).abs() < 1e-14);
        let xf = legendre_times_x(&a);
        assert!((legendre_eval(&xf, x) - x * legendre_eval(&a, x)).abs() < 1e-14);
    }

    #[test]
    fn small_bandlimit_is_nearly_constant() {
        let a = prolate_legendre_coefficients(0.1).unwrap();
        assert!(a[2].abs() < 1e-2 * a[0]);
    }
}
