//! Window functions: the prolate `psi_0` window and the Gaussian window.
//!
//! A window `phi` is even with unit mass. Its Fourier transform `phi_hat`
//! is normalized so `phi_hat(0) = 1`. `Phi(r) = 2 * int_r^inf phi` is the
//! tail integral.

pub mod cache;
mod pswf;

pub use pswf::{legendre_eval, prolate_legendre_coefficients};

use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;
use pswf::{legendre_antiderivative, legendre_derivative, legendre_times_x};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WindowKind {
    Prolate,
    Gaussian,
}

impl WindowKind {
    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Prolate => "prolate",
            WindowKind::Gaussian => "gaussian",
        }
    }
}

impl std::fmt::Display for WindowKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for WindowKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "prolate" | "pswf" => Ok(WindowKind::Prolate),
            "gaussian" => Ok(WindowKind::Gaussian),
            _ => Err(Error::InvalidArgument(format!("unknown window '{s}'"))),
        }
    }
}

/// An even, unit-mass window and its transform.
#[derive(Clone, Debug)]
pub struct WindowFunction {
    pub kind: WindowKind,
    /// Bandlimit, prolate only (0 for Gaussian).
    pub c: f64,
    /// Shape parameter, Gaussian only (0 for prolate).
    pub sigma: f64,
    /// `psi_0` in the standard Legendre basis, unit L2 norm.
    pub legendre_coeffs: Vec<f64>,
    pub lambda0: f64,
    pub norm_r: f64,
    pub trunc_error: f64,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    d2phi: Vec<f64>,
    d3phi: Vec<f64>,
    anti: Vec<f64>,
    xanti: Vec<f64>,
    phi0: f64,
}

impl WindowFunction {
    /// Prolate window with bandlimit `c`, using the coefficient cache if configured.
    pub fn prolate(c: f64) -> Result<Self> {
        let coeffs = match cache::lookup(c)? {
            Some(a) => a,
            None => {
                let a = prolate_legendre_coefficients(c)?;
                cache::store(c, &a)?;
                a
            }
        };
        Self::prolate_from_coefficients(c, coeffs)
    }

    /// Prolate window from precomputed `psi_0` Legendre coefficients.
    pub fn prolate_from_coefficients(c: f64, coeffs: Vec<f64>) -> Result<Self> {
        if !(c > 0.0) || coeffs.is_empty() || coeffs[0] <= 0.0 {
            return Err(Error::InvalidArgument(format!("bad prolate data for c = {c}")));
        }
        let integral = 2.0 * coeffs[0];
        let psi_at_0 = legendre_eval(&coeffs, 0.0);
        let phi: Vec<f64> = coeffs.iter().map(|a| a / integral).collect();
        let dphi = legendre_derivative(&phi);
        let d2phi = legendre_derivative(&dphi);
        let d3phi = legendre_derivative(&d2phi);
        let anti = legendre_antiderivative(&phi);
        let xanti = legendre_antiderivative(&legendre_times_x(&phi));
        let phi0 = legendre_eval(&phi, 0.0);
        let trunc_error = (legendre_eval(&phi, 1.0) / phi0).abs();
        Ok(WindowFunction {
            kind: WindowKind::Prolate,
            c,
            sigma: 0.0,
            legendre_coeffs: coeffs,
            lambda0: integral / psi_at_0,
            norm_r: 1.0 / integral,
            trunc_error,
            phi,
            dphi,
            d2phi,
            d3phi,
            anti,
            xanti,
            phi0,
        })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!("Gaussian shape must be positive, got {sigma}")));
        }
        let norm_r = 1.0 / (sigma * PI.sqrt());
        Ok(WindowFunction {
            kind: WindowKind::Gaussian,
            c: 0.0,
            sigma,
            legendre_coeffs: Vec::new(),
            lambda0: 0.0,
            norm_r,
            trunc_error: (-1.0 / (sigma * sigma)).exp(),
            phi: Vec::new(),
            dphi: Vec::new(),
            d2phi: Vec::new(),
            d3phi: Vec::new(),
            anti: Vec::new(),
            xanti: Vec::new(),
            phi0: norm_r,
        })
    }

    /// Radius beyond which `phi` is zero (prolate) or below 1e-17 relative (Gaussian).
    pub fn support(&self) -> f64 {
        match self.kind {
            WindowKind::Prolate => 1.0,
            WindowKind::Gaussian => self.sigma * (17.0 * std::f64::consts::LN_10).sqrt(),
        }
    }

    /// Wavenumber beyond which `phi_hat` is zero (prolate) or below 1e-17 (Gaussian).
    pub fn bandlimit(&self) -> f64 {
        match self.kind {
            WindowKind::Prolate => self.c,
            WindowKind::Gaussian => 2.0 * (17.0 * std::f64::consts::LN_10).sqrt() / self.sigma,
        }
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self.kind {
            WindowKind::Prolate => {
                if r.abs() > 1.0 {
                    0.0
                } else {
                    legendre_eval(&self.phi, r.abs())
                }
            }
            WindowKind::Gaussian => self.norm_r * (-(r * r) / (self.sigma * self.sigma)).exp(),
        }
    }

    /// `d^n phi / dr^n` for `n` in 1..=3.
    pub fn eval_deriv(&self, r: f64, order: u8) -> f64 {
        match self.kind {
            WindowKind::Prolate => {
                if r.abs() > 1.0 {
                    return 0.0;
                }
                let series = match order {
                    1 => &self.dphi,
                    2 => &self.d2phi,
                    3 => &self.d3phi,
                    _ => panic!("derivative order {order} not supported"),
                };
                legendre_eval(series, r)
            }
            WindowKind::Gaussian => {
                let s2 = self.sigma * self.sigma;
                let g = self.eval(r);
                match order {
                    1 => -2.0 * r / s2 * g,
                    2 => (4.0 * r * r / (s2 * s2) - 2.0 / s2) * g,
                    3 => (12.0 * r / (s2 * s2) - 8.0 * r * r * r / (s2 * s2 * s2)) * g,
                    _ => panic!("derivative order {order} not supported"),
                }
            }
        }
    }

    pub fn fourier(&self, k: f64) -> f64 {
        match self.kind {
            WindowKind::Prolate => {
                let x = k.abs() / self.c;
                if x > 1.0 {
                    0.0
                } else {
                    legendre_eval(&self.phi, x) / self.phi0
                }
            }
            WindowKind::Gaussian => (-0.25 * k * k * self.sigma * self.sigma).exp(),
        }
    }

    /// `d^n phi_hat / dk^n` for `n` in 1..=3.
    pub fn fourier_deriv(&self, k: f64, order: u8) -> f64 {
        match self.kind {
            WindowKind::Prolate => {
                let x = k / self.c;
                if x.abs() > 1.0 {
                    return 0.0;
                }
                let series = match order {
                    1 => &self.dphi,
                    2 => &self.d2phi,
                    3 => &self.d3phi,
                    _ => panic!("derivative order {order} not supported"),
                };
                legendre_eval(series, x) / (self.phi0 * self.c.powi(order as i32))
            }
            WindowKind::Gaussian => {
                let s2 = self.sigma * self.sigma;
                let e = self.fourier(k);
                match order {
                    1 => -0.5 * k * s2 * e,
                    2 => (0.25 * k * k * s2 * s2 - 0.5 * s2) * e,
                    3 => (0.75 * k * s2 * s2 - 0.125 * k * k * k * s2 * s2 * s2) * e,
                    _ => panic!("derivative order {order} not supported"),
                }
            }
        }
    }

    /// `Phi(r) = 2 int_r^inf phi`.
    pub fn tail(&self, r: f64) -> f64 {
        let r = r.abs();
        match self.kind {
            WindowKind::Prolate => {
                if r >= 1.0 {
                    0.0
                } else {
                    2.0 * (legendre_eval(&self.anti, 1.0) - legendre_eval(&self.anti, r))
                }
            }
            WindowKind::Gaussian => libm::erfc(r / self.sigma),
        }
    }

    /// `int_0^r s phi(s) ds`.
    pub fn first_moment(&self, r: f64) -> f64 {
        let r = r.abs();
        match self.kind {
            WindowKind::Prolate => {
                let r = r.min(1.0);
                legendre_eval(&self.xanti, r) - legendre_eval(&self.xanti, 0.0)
            }
            WindowKind::Gaussian => {
                let s = self.sigma;
                s / (2.0 * PI.sqrt()) * (1.0 - (-(r * r) / (s * s)).exp())
            }
        }
    }

    /// `int_r^inf s phi(s) ds`, computed without cancellation in the Gaussian tail.
    pub fn upper_moment(&self, r: f64) -> f64 {
        let r = r.abs();
        match self.kind {
            WindowKind::Prolate => {
                if r >= 1.0 {
                    0.0
                } else {
                    legendre_eval(&self.xanti, 1.0) - legendre_eval(&self.xanti, r)
                }
            }
            WindowKind::Gaussian => {
                let s = self.sigma;
                s / (2.0 * PI.sqrt()) * (-(r * r) / (s * s)).exp()
            }
        }
    }

    /// Even Taylor coefficients `b_n` with `phi_hat(k) = sum b_n k^{2n}`.
    pub fn fourier_taylor(&self, terms: usize) -> Vec<f64> {
        match self.kind {
            WindowKind::Gaussian => {
                let q = -0.25 * self.sigma * self.sigma;
                let mut out = Vec::with_capacity(terms);
                let mut t = 1.0;
                for n in 0..terms {
                    out.push(t);
                    t *= q / (n as f64 + 1.0);
                }
                out
            }
            WindowKind::Prolate => {
                // b_n = (-1)^n M_{2n} / (2n)!, M_j = int t^j phi
                let (x, w) = gauss_legendre(64);
                let vals: Vec<f64> = x.iter().map(|&t| legendre_eval(&self.phi, t)).collect();
                let mut out = Vec::with_capacity(terms);
                let mut fact = 1.0;
                for n in 0..terms {
                    if n > 0 {
                        fact *= (2 * n - 1) as f64 * (2 * n) as f64;
                    }
                    let m: f64 = x.iter().zip(&w).zip(&vals).map(|((t, w), v)| w * v * t.powi(2 * n as i32)).sum();
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    out.push(sign * m / fact);
                }
                out
            }
        }
    }
}

pub fn build_prolate(c: f64) -> Result<WindowFunction> {
    WindowFunction::prolate(c)
}

pub fn build_gaussian(sigma: f64) -> Result<WindowFunction> {
    WindowFunction::gaussian(sigma)
}

pub fn window_eval(w: &WindowFunction, r: f64) -> f64 {
    w.eval(r)
}

pub fn window_fourier(w: &WindowFunction, k: f64) -> f64 {
    w.fourier(k)
}

pub fn window_fourier_deriv(w: &WindowFunction, k: f64, order: u8) -> f64 {
    w.fourier_deriv(k, order)
}

pub fn phi_tail(w: &WindowFunction, r: f64) -> f64 {
    w.tail(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::composite_gauss;

    fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let (x, w) = composite_gauss(a, b, 16, 32);
        x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum()
    }

    #[test]
    fn prolate_c32_truncation_and_eigen_relation() {
        let w = WindowFunction::prolate(32.0).unwrap();
        assert!(w.trunc_error <= 1e-10, "{}", w.trunc_error);
        let psi = |t: f64| legendre_eval(&w.legendre_coeffs, t);
        let integral = quad(psi, -1.0, 1.0);
        assert!((w.lambda0 * psi(0.0) - integral).abs() < 1e-13);
        assert!((w.fourier(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn prolate_eigen_relation_at_many_points() {
        let w = WindowFunction::prolate(32.0).unwrap();
        let psi = |t: f64| legendre_eval(&w.legendre_coeffs, t);
        for i in 0..50 {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / 50.0;
            let rhs = quad(|t| psi(t) * (32.0 * t * x).cos(), -1.0, 1.0);
            assert!((w.lambda0 * psi(x) - rhs).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn prolate_fourier_matches_quadrature() {
        let w = WindowFunction::prolate(32.0).unwrap();
        for i in 0..200 {
            let k = -32.0 + 64.0 * i as f64 / 199.0;
            let direct = quad(|t| w.eval(t) * (k * t).cos(), -1.0, 1.0);
            assert!((direct - w.fourier(k)).abs() < 1e-11, "k={k}");
        }
        assert_eq!(w.fourier(33.0), 0.0);
    }

    #[test]
    fn prolate_derivatives_match_finite_differences() {
        let w = WindowFunction::prolate(32.0).unwrap();
        let h = 1e-4;
        let fd = (w.fourier(5.0 + h) - w.fourier(5.0 - h)) / (2.0 * h);
        assert!((fd - w.fourier_deriv(5.0, 1)).abs() < 1e-8);
        let fd2 = (w.fourier_deriv(5.0 + h, 2) - w.fourier_deriv(5.0 - h, 2)) / (2.0 * h);
        assert!((fd2 - w.fourier_deriv(5.0, 3)).abs() < 1e-8);
        let fdr = (w.eval(0.4 + h) - w.eval(0.4 - h)) / (2.0 * h);
        assert!((fdr - w.eval_deriv(0.4, 1)).abs() < 1e-6 * w.phi0());
        assert!(w.fourier_deriv(0.0, 1).abs() < 1e-15);
    }

    #[test]
    fn prolate_tail_and_moment_match_quadrature() {
        let w = WindowFunction::prolate(32.0).unwrap();
        let q = 2.0 * quad(|t| w.eval(t), 0.3, 1.0);
        assert!((w.tail(0.3) - q).abs() < 1e-13);
        assert!((w.tail(0.0) - 1.0).abs() < 1e-14);
        assert_eq!(w.tail(1.2), 0.0);
        let m = quad(|t| t * w.eval(t), 0.0, 0.7);
        assert!((w.first_moment(0.7) - m).abs() < 1e-14);
        let up = quad(|t| t * w.eval(t), 0.7, 1.0);
        assert!((w.upper_moment(0.7) - up).abs() < 1e-14);
        assert_eq!(w.upper_moment(1.5), 0.0);
    }

    #[test]
    fn prolate_taylor_reproduces_transform() {
        let w = WindowFunction::prolate(20.0).unwrap();
        let b = w.fourier_taylor(12);
        let k: f64 = 0.3;
        let s: f64 = b.iter().enumerate().map(|(n, b)| b * k.powi(2 * n as i32)).sum();
        assert!((s - w.fourier(k)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_closed_forms() {
        let w = WindowFunction::gaussian(0.2).unwrap();
        assert!((w.eval(0.0) - 1.0 / (0.2 * PI.sqrt())).abs() < 1e-14);
        assert!(((w.eval(1.0) / w.eval(0.0)) - (-25.0f64).exp()).abs() < 1e-24);
        assert!((w.fourier(50.0) - (-25.0f64).exp()).abs() < 1e-24);
        assert!((w.fourier_deriv(0.0, 2) + 0.02).abs() < 1e-16);
        let h = 1e-4;
        for order in 1..=3u8 {
            let f = |k: f64| if order == 1 { w.fourier(k) } else { w.fourier_deriv(k, order - 1) };
            let fd = (f(3.0 + h) - f(3.0 - h)) / (2.0 * h);
            assert!((fd - w.fourier_deriv(3.0, order)).abs() < 1e-8);
            let g = |r: f64| if order == 1 { w.eval(r) } else { w.eval_deriv(r, order - 1) };
            let fd = (g(0.1 + h) - g(0.1 - h)) / (2.0 * h);
            assert!((fd - w.eval_deriv(0.1, order)).abs() < 1e-5 * fd.abs().max(1.0));
        }
        let m = quad(|t| t * w.eval(t), 0.0, 0.3);
        assert!((w.first_moment(0.3) - m).abs() < 1e-14);
    }

    #[test]
    fn mass_is_one() {
        for w in [WindowFunction::prolate(17.0 * PI / 3.0).unwrap(), WindowFunction::gaussian(0.25).unwrap()] {
            let s = w.support();
            let m = quad(|t| w.eval(t), -s, s);
            assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(WindowFunction::prolate(-1.0).is_err());
        assert!(WindowFunction::gaussian(0.0).is_err());
    }
}
