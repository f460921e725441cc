//! Fourier transforms of the Green's functions truncated at radius `R`.

use crate::numerics::{bessel_j0, bessel_j1};

const SERIES_SWITCH: f64 = 1.0;
const SERIES_TERMS: usize = 14;

/// Transform of the truncated biharmonic kernel.
pub fn truncated_biharmonic_fourier(k: f64, big_r: f64, dim: usize) -> f64 {
    let k = k.abs();
    let x = k * big_r;
    if x < SERIES_SWITCH {
        let r4 = big_r.powi(4);
        let x2 = x * x;
        let mut s = 0.0;
        if dim == 3 {
            // sum_{n>=2} (-1)^n (n-1) x^{2n-4} / (2n+1)!
            let mut fact = 120.0; // 5!
            let mut p = 1.0;
            for n in 2..2 + SERIES_TERMS {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * (n - 1) as f64 * p / fact;
                p *= x2;
                fact *= ((2 * n + 2) * (2 * n + 3)) as f64;
            }
        } else {
            // sum_{m>=2} (-1)^m (m-1) (x/2)^{2m} / (m!)^2, divided by x^4
            let q = 0.25 * x2;
            let mut term = 1.0 / 64.0; // (1/2)^4 / (2!)^2
            for m in 2..2 + SERIES_TERMS {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * (m - 1) as f64 * term;
                let mf = (m + 1) as f64;
                term *= q / (mf * mf);
            }
        }
        return r4 * s;
    }
    let k4 = k.powi(4);
    if dim == 3 {
        (1.0 + 0.5 * x.cos() - 1.5 * x.sin() / x) / k4
    } else {
        (1.0 - bessel_j0(x) - 0.5 * x * bessel_j1(x)) / k4
    }
}

/// Transform of the truncated harmonic kernel.
pub fn truncated_harmonic_fourier(k: f64, big_r: f64, dim: usize) -> f64 {
    let k = k.abs();
    let x = k * big_r;
    let r2 = big_r * big_r;
    if dim == 3 {
        if x < SERIES_SWITCH {
            // (1 - cos x)/x^2 = sum_{n>=1} (-1)^{n+1} x^{2n-2} / (2n)!
            let mut s = 0.0;
            let mut term = 0.5;
            for n in 1..1 + SERIES_TERMS {
                s += term;
                term *= -x * x / (((2 * n + 1) * (2 * n + 2)) as f64);
            }
            return r2 * s;
        }
        (1.0 - x.cos()) / (k * k)
    } else {
        let log_r = big_r.ln();
        if x < SERIES_SWITCH {
            // (1 - J0(x))/x^2 and J1(x)/x by their power series
            let q = 0.25 * x * x;
            let mut a = 0.0;
            let mut b = 0.0;
            let mut t = 1.0; // q^m / (m!)^2
            for m in 0..SERIES_TERMS {
                let mf = m as f64;
                // J1(x)/x = sum (-1)^m q^m / (2 m! (m+1)!)
                b += t / (2.0 * (mf + 1.0));
                // (1 - J0)/x^2 = sum_{m>=0} (-1)^m q^m / (4 ((m+1)!)^2)
                a += t / (4.0 * (mf + 1.0) * (mf + 1.0));
                t *= -q / ((mf + 1.0) * (mf + 1.0));
            }
            return r2 * (a - log_r * b);
        }
        (1.0 - bessel_j0(x)) / (k * k) - big_r * log_r * bessel_j1(x) / k
    }
}
