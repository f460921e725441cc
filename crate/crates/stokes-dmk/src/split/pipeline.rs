//! Mollified radial functions by Gauss-Legendre quadrature of radial
//! inverse transforms of the truncated mollified symbols.
//!
//! For the Stokeslet and stresslet the integrand is
//! `8 pi k g(kr) B^R(k) gamma_hat(k) k^{d-1} / (2 pi^{d-1})` where `g`
//! combines derivatives of the radial transform kernel `F` (`sin x / x` in
//! 3D, `J0` in 2D). The rotlet uses `-omega_d r^{d-1} H_M'(r)`.

use super::truncated::{truncated_biharmonic_fourier, truncated_harmonic_fourier};
use super::{Kernel, Mollifier};
use crate::error::{Error, Result};
use crate::numerics::{bessel_j0, bessel_j1, composite_gauss, ChebTable};
use std::f64::consts::PI;

const ORDER: usize = 32;
const SERIES_X: f64 = 2.0;

/// Precomputed quadrature for the mollified radial functions of one kernel.
#[derive(Clone, Debug)]
pub struct MollifiedQuadrature {
    kernel: Kernel,
    dim: usize,
    big_r: f64,
    k: Vec<f64>,
    w: Vec<f64>,
    series: Vec<f64>,
    nfun: usize,
}

/// Even power-series coefficients `a_n` of the radial transform kernel.
fn kernel_series(dim: usize, terms: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(terms);
    let mut t = 1.0;
    for n in 0..terms {
        a.push(t);
        let nf = n as f64;
        if dim == 3 {
            t *= -1.0 / ((2.0 * nf + 2.0) * (2.0 * nf + 3.0));
        } else {
            t *= -0.25 / ((nf + 1.0) * (nf + 1.0));
        }
    }
    a
}

/// `F'`, `x F''`, `x^2 F'''` at `x`.
fn kernel_derivs(dim: usize, x: f64, series: &[f64]) -> (f64, f64, f64) {
    if x < SERIES_X {
        let (mut d1, mut d2, mut d3) = (0.0, 0.0, 0.0);
        let x2 = x * x;
        let mut p = x; // x^{2n-1}
        for (n, a) in series.iter().enumerate().skip(1) {
            let m = 2.0 * n as f64;
            d1 += a * m * p;
            d2 += a * m * (m - 1.0) * p;
            d3 += a * m * (m - 1.0) * (m - 2.0) * p;
            p *= x2;
        }
        return (d1, d2, d3);
    }
    let (f0, f1) = if dim == 3 {
        let (s, c) = x.sin_cos();
        (s / x, s / (x * x) - c / x)
    } else {
        (bessel_j0(x), bessel_j1(x))
    };
    if dim == 3 {
        let fp = -f1;
        let fpp = -f0 + 2.0 * f1 / x;
        let fppp = f1 + 2.0 * f0 / x - 6.0 * f1 / (x * x);
        (fp, x * fpp, x * x * fppp)
    } else {
        let fp = -f1;
        let fpp = -f0 + f1 / x;
        let fppp = f1 + f0 / x - 2.0 * f1 / (x * x);
        (fp, x * fpp, x * x * fppp)
    }
}

impl MollifiedQuadrature {
    /// Quadrature valid for radii up to `rmax`.
    pub fn new(kernel: Kernel, dim: usize, mollifier: &Mollifier, big_r: f64, rmax: f64, refine: usize) -> Result<Self> {
        if !matches!(kernel, Kernel::Stokeslet | Kernel::Stresslet | Kernel::Rotlet) {
            return Err(Error::Unsupported(format!("{kernel:?} has no numeric pipeline")));
        }
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidArgument(format!("dimension {dim}")));
        }
        let kmax = mollifier.bandlimit();
        let oscillations = kmax * (rmax + big_r) / (2.0 * PI);
        let panels = refine * ((oscillations.ceil() as usize) + 8);
        let (k, gw) = composite_gauss(0.0, kmax, panels, ORDER);
        let norm = 4.0 / PI.powi(dim as i32 - 2);
        let w = k
            .iter()
            .zip(&gw)
            .map(|(&k, &g)| {
                let kd = k.powi(dim as i32 - 1);
                match kernel {
                    Kernel::Rotlet => {
                        // H_M'(r) = 1/(2 pi^{d-1}) int k F'(kr) H^R(k) phi_hat(k) k^{d-1} dk
                        g * k * truncated_harmonic_fourier(k, big_r, dim) * mollifier.window.fourier(k) * kd
                            / (2.0 * PI.powi(dim as i32 - 1))
                    }
                    _ => g * norm * k * truncated_biharmonic_fourier(k, big_r, dim) * mollifier.fourier(k) * kd,
                }
            })
            .collect();
        let nfun = if kernel == Kernel::Rotlet { 1 } else { 2 };
        Ok(MollifiedQuadrature { kernel, dim, big_r, k, w, series: kernel_series(dim, 30), nfun })
    }

    pub fn nfun(&self) -> usize {
        self.nfun
    }

    /// Mollified radial functions at `r` (before the exact-minus-mollified step).
    pub fn eval(&self, r: f64, out: &mut [f64]) {
        let d = self.dim as f64;
        let (mut a, mut b) = (0.0, 0.0);
        for (&k, &w) in self.k.iter().zip(&self.w) {
            let (f1, f2, f3) = kernel_derivs(self.dim, k * r, &self.series);
            match self.kernel {
                Kernel::Stokeslet => {
                    a += w * -((d - 2.0) * f1 + f2);
                    b += w * (-f1 + f2);
                }
                Kernel::Stresslet => {
                    a += w * ((d - 3.0) * (f1 - f2) - f3);
                    b += w * (-f1 + f2 - f3 / 3.0);
                }
                _ => a += w * f1,
            }
        }
        match self.kernel {
            Kernel::Stokeslet => {
                let corr = if self.dim == 2 { 2.0 * r * (1.0 - self.big_r.ln()) } else { 2.0 * r / self.big_r };
                out[0] = a + corr;
                out[1] = b;
            }
            Kernel::Stresslet => {
                out[0] = a;
                out[1] = b;
            }
            _ => {
                let omega = if self.dim == 3 { 4.0 * PI } else { 2.0 * PI };
                out[0] = -omega * r.powi(self.dim as i32 - 1) * a;
            }
        }
    }

    /// `lim_{r->0} S_M,diag(r) / r` for the Stokeslet.
    pub fn stokeslet_diag_slope(&self) -> f64 {
        // S_F,diag / r -> 8 pi (d-1)/d k^2, and w already holds 8 pi k ... / (2 pi^{d-1})
        let d = self.dim as f64;
        let s: f64 = self.k.iter().zip(&self.w).map(|(k, w)| w * k * (d - 1.0) / d).sum();
        let corr = if self.dim == 2 { 2.0 * (1.0 - self.big_r.ln()) } else { 2.0 / self.big_r };
        s + corr
    }
}

/// Chebyshev tables of the mollified radial functions on `[0, rmax]`.
pub fn numeric_residual_pipeline(
    kernel: Kernel,
    dim: usize,
    mollifier: &Mollifier,
    big_r: f64,
    rmax: f64,
    tol: f64,
) -> Result<ChebTable> {
    let quad = MollifiedQuadrature::new(kernel, dim, mollifier, big_r, rmax, 1)?;
    let fine = MollifiedQuadrature::new(kernel, dim, mollifier, big_r, rmax, 2)?;
    let nfun = quad.nfun();
    let mut a = vec![0.0; nfun];
    let mut b = vec![0.0; nfun];
    let mut achieved = 0.0f64;
    for i in 0..=8 {
        let r = rmax * i as f64 / 8.0;
        quad.eval(r, &mut a);
        fine.eval(r, &mut b);
        for f in 0..nfun {
            achieved = achieved.max((a[f] - b[f]).abs() / b[f].abs().max(1.0));
        }
    }
    if achieved > tol {
        return Err(Error::Quadrature { achieved, requested: tol });
    }
    ChebTable::fit(rmax, nfun, tol, |radii| {
        radii
            .iter()
            .map(|&r| {
                let mut v = vec![0.0; nfun];
                quad.eval(r, &mut v);
                v
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_derivative_branches_agree() {
        let s = kernel_series(3, 30);
        let s2 = kernel_series(2, 30);
        for dim in [2, 3] {
            let series = if dim == 3 { &s } else { &s2 };
            let lo = kernel_derivs(dim, SERIES_X - 1e-12, series);
            let x = SERIES_X + 1e-12;
            // evaluate the closed form just above the switch
            let hi = kernel_derivs(dim, x, series);
            assert!((lo.0 - hi.0).abs() < 1e-11);
            assert!((lo.1 - hi.1).abs() < 1e-11);
            assert!((lo.2 - hi.2).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_derivatives_match_finite_differences() {
        let s = kernel_series(2, 30);
        let h = 1e-3;
        let x = 3.7;
        let (f1, f2, _) = kernel_derivs(2, x, &s);
        let fd = (bessel_j0(x + h) - bessel_j0(x - h)) / (2.0 * h);
        assert!((fd - f1).abs() < 1e-7);
        let fd2 = (bessel_j0(x + h) - 2.0 * bessel_j0(x) + bessel_j0(x - h)) / (h * h);
        assert!((fd2 * x - f2).abs() < 1e-5);
    }

    #[test]
    fn three_dimensional_pipeline_matches_closed_forms() {
        use crate::windows::WindowFunction;
        for w in [WindowFunction::prolate(40.0).unwrap(), WindowFunction::gaussian(0.2).unwrap()] {
            let m = Mollifier::new(w.clone());
            for kernel in [Kernel::Stokeslet, Kernel::Stresslet, Kernel::Rotlet] {
                let q = MollifiedQuadrature::new(kernel, 3, &m, 1.0 + 3f64.sqrt(), 1.0, 1).unwrap();
                let mut out = [0.0; 2];
                for i in 1..40 {
                    let r = i as f64 / 40.0;
                    q.eval(r, &mut out[..q.nfun()]);
                    let phi = w.eval(r);
                    let dphi = w.eval_deriv(r, 1);
                    let tail = w.tail(r);
                    let want = match kernel {
                        Kernel::Stokeslet => [1.0 - (tail - 2.0 * r * phi), 1.0 - (tail + 2.0 * r * phi)],
                        Kernel::Stresslet => [2.0 * r * r * dphi, 1.0 - (tail + 2.0 * r * phi - 2.0 / 3.0 * r * r * dphi)],
                        _ => [1.0 - (tail + 2.0 * r * phi), 0.0],
                    };
                    for f in 0..q.nfun() {
                        assert!((out[f] - want[f]).abs() < 1e-12, "{kernel:?} f{f} r={r}: {} vs {}", out[f], want[f]);
                    }
                }
                if kernel == Kernel::Stokeslet {
                    assert!((q.stokeslet_diag_slope() - 4.0 * w.phi0()).abs() < 1e-11);
                }
            }
        }
    }
}
