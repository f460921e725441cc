//! Kernel splitting of the Stokes kernels into a mollified part with a
//! rapidly decaying Fourier transform and a localized residual part.
//!
//! The biharmonic mollifier is `gamma_hat(k) = phi_hat(k) - k phi_hat'(k) / 2`.
//! Stokeslet and stresslet splits derive from the biharmonic split; the
//! rotlet uses the harmonic split with `phi_hat` as mollifier.
//!
//! Residual kernels are written with radial functions in a fixed tensor
//! structure. For the Stokeslet
//! `S_R = S_diag(r) I / (8 pi r) + S_offd(r) x x^T / (8 pi r^3)`, for the
//! stresslet `T_diag (I x)_sym / (8 pi r^3) - (3 / 4 pi) T_offd x x x / r^5`,
//! for the rotlet `Omega(r) eps x / (8 pi r^3)` in 3D and
//! `Omega(r) eps x / (4 pi r^2)` in 2D. Tables hold the mollified radial
//! functions; residuals are exact minus mollified.

pub mod export;
pub mod kernels;
pub mod pipeline;
pub mod truncated;

pub use kernels::{exact_apply, fourier_components, output_len, strength_len};
pub use pipeline::{numeric_residual_pipeline, MollifiedQuadrature};
pub use truncated::{truncated_biharmonic_fourier, truncated_harmonic_fourier};

use crate::error::{Error, Result};
use crate::numerics::ChebTable;
use crate::windows::{WindowFunction, WindowKind};
use kernels::{apply_structure, apply_structure_pair, exact_functions, structure_tensor};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    Stokeslet,
    Stresslet,
    Rotlet,
    Biharmonic,
    Harmonic,
}

impl Kernel {
    pub fn id(self) -> u8 {
        match self {
            Kernel::Stokeslet => 0,
            Kernel::Stresslet => 1,
            Kernel::Rotlet => 2,
            Kernel::Biharmonic => 3,
            Kernel::Harmonic => 4,
        }
    }

    pub fn from_id(id: u8) -> Option<Kernel> {
        Some(match id {
            0 => Kernel::Stokeslet,
            1 => Kernel::Stresslet,
            2 => Kernel::Rotlet,
            3 => Kernel::Biharmonic,
            4 => Kernel::Harmonic,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Stokeslet => "stokeslet",
            Kernel::Stresslet => "stresslet",
            Kernel::Rotlet => "rotlet",
            Kernel::Biharmonic => "biharmonic",
            Kernel::Harmonic => "harmonic",
        }
    }

    /// True for kernels built from the biharmonic split.
    pub fn is_biharmonic_family(self) -> bool {
        matches!(self, Kernel::Stokeslet | Kernel::Stresslet | Kernel::Biharmonic)
    }
}

impl std::str::FromStr for Kernel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stokeslet" => Ok(Kernel::Stokeslet),
            "stresslet" => Ok(Kernel::Stresslet),
            "rotlet" => Ok(Kernel::Rotlet),
            "biharmonic" => Ok(Kernel::Biharmonic),
            "harmonic" => Ok(Kernel::Harmonic),
            _ => Err(Error::InvalidArgument(format!("unknown kernel '{s}'"))),
        }
    }
}

/// The biharmonic mollifier built from a window.
#[derive(Clone, Debug)]
pub struct Mollifier {
    pub window: WindowFunction,
}

impl Mollifier {
    pub fn new(window: WindowFunction) -> Self {
        Mollifier { window }
    }

    pub fn fourier(&self, k: f64) -> f64 {
        self.window.fourier(k) - 0.5 * k * self.window.fourier_deriv(k, 1)
    }

    /// One-dimensional screen `gamma(x) = 3/2 phi(x) + x phi'(x) / 2`.
    pub fn screen(&self, x: f64) -> f64 {
        1.5 * self.window.eval(x) + 0.5 * x * self.window.eval_deriv(x, 1)
    }

    /// Derivative of the screen, `2 phi'(x) + x phi''(x) / 2`.
    pub fn screen_deriv(&self, x: f64) -> f64 {
        2.0 * self.window.eval_deriv(x, 1) + 0.5 * x * self.window.eval_deriv(x, 2)
    }

    /// Even Taylor coefficients of `gamma_hat`.
    pub fn fourier_taylor(&self, terms: usize) -> Vec<f64> {
        self.window.fourier_taylor(terms).iter().enumerate().map(|(n, b)| b * (1.0 - n as f64)).collect()
    }

    pub fn bandlimit(&self) -> f64 {
        self.window.bandlimit()
    }
}

pub fn mollifier_fourier(m: &Mollifier, k: f64) -> f64 {
    m.fourier(k)
}

/// A kernel split for one kernel, dimension and window.
#[derive(Clone, Debug)]
pub struct SplitKernel {
    pub kernel: Kernel,
    pub dim: usize,
    pub mollifier: Mollifier,
    /// Mollified radial functions on `[0, table.rmax()]`.
    pub radial_tables: Option<ChebTable>,
    /// Diagonal coefficient of the self-interaction term at unit scale.
    pub self_const: f64,
    pub window_radius_r: f64,
    pub corr_const: f64,
    pub tol: f64,
}

/// Radius of the truncated Green's functions, `1 + sqrt(d)`.
pub fn window_radius(dim: usize) -> f64 {
    1.0 + (dim as f64).sqrt()
}

/// Closed-form 3D residual radial functions at `r`.
fn closed_form_residuals(kernel: Kernel, w: &WindowFunction, r: f64) -> (f64, f64) {
    let phi = w.eval(r);
    let tail = w.tail(r);
    match kernel {
        Kernel::Stokeslet => (tail - 2.0 * r * phi, tail + 2.0 * r * phi),
        Kernel::Stresslet => {
            let dphi = w.eval_deriv(r, 1);
            (-2.0 * r * r * dphi, tail + 2.0 * r * phi - 2.0 / 3.0 * r * r * dphi)
        }
        Kernel::Rotlet => (tail + 2.0 * r * phi, 0.0),
        _ => (0.0, 0.0),
    }
}

/// Radius beyond which residual radial functions are treated as zero.
fn table_radius(w: &WindowFunction) -> f64 {
    match w.kind {
        WindowKind::Prolate => 1.0,
        WindowKind::Gaussian => (6.5 * w.sigma).clamp(1.0, 4.0),
    }
}

pub fn build_split_kernel(kernel: Kernel, dim: usize, window: WindowFunction, tol: f64) -> Result<SplitKernel> {
    if !(1e-14..=1e-3).contains(&tol) {
        return Err(Error::InvalidArgument(format!("table tolerance {tol:e} outside [1e-14, 1e-3]")));
    }
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidArgument(format!("dimension {dim}")));
    }
    let big_r = window_radius(dim);
    let mollifier = Mollifier::new(window);
    let corr_const = if kernel == Kernel::Stokeslet {
        if dim == 2 {
            (1.0 - big_r.ln()) / (4.0 * PI)
        } else {
            1.0 / (4.0 * PI * big_r)
        }
    } else {
        0.0
    };
    let rmax = table_radius(&mollifier.window);
    let (radial_tables, self_const) = match (kernel, dim) {
        (Kernel::Biharmonic | Kernel::Harmonic, 3) => (None, 0.0),
        (Kernel::Biharmonic | Kernel::Harmonic, _) => {
            return Err(Error::Unsupported(format!("{} split is provided in 3D only", kernel.name())))
        }
        (_, 3) => {
            let w = &mollifier.window;
            let nfun = if kernel == Kernel::Rotlet { 1 } else { 2 };
            let table = ChebTable::fit(rmax, nfun, tol, |radii| {
                radii
                    .iter()
                    .map(|&r| {
                        let (ea, eb) = exact_functions(kernel, 3, r);
                        let (ra, rb) = closed_form_residuals(kernel, w, r);
                        let mut v = vec![ea - ra];
                        if nfun == 2 {
                            v.push(eb - rb);
                        }
                        v
                    })
                    .collect()
            })?;
            let self_const = if kernel == Kernel::Stokeslet { -w.phi0() / (2.0 * PI) } else { 0.0 };
            (Some(table), self_const)
        }
        _ => {
            let pipe_r = big_r.max(rmax + mollifier.window.support() + 0.25);
            let table = numeric_residual_pipeline(kernel, dim, &mollifier, pipe_r, rmax, tol)?;
            let self_const = if kernel == Kernel::Stokeslet {
                let q = MollifiedQuadrature::new(kernel, dim, &mollifier, pipe_r, 0.0, 1)?;
                -q.stokeslet_diag_slope() / (8.0 * PI)
            } else {
                0.0
            };
            (Some(table), self_const)
        }
    };
    Ok(SplitKernel { kernel, dim, mollifier, radial_tables, self_const, window_radius_r: big_r, corr_const, tol })
}

impl SplitKernel {
    pub fn window(&self) -> &WindowFunction {
        &self.mollifier.window
    }

    /// Radius beyond which residuals vanish (to table precision).
    pub fn residual_radius(&self) -> f64 {
        self.radial_tables.as_ref().map_or(self.window().support(), |t| t.rmax())
    }

    /// Residual radial functions at unit scale, `(a, b)` in the tensor
    /// structure of the kernel (`b` unused for the rotlet).
    #[inline(always)]
    pub fn residual_functions(&self, r: f64) -> (f64, f64) {
        let table = self.radial_tables.as_ref().expect("Stokes kernel tables");
        if r >= table.rmax() {
            return (0.0, 0.0);
        }
        let mut m = [0.0; 2];
        table.eval(r, &mut m[..table.nfun()]);
        let (ea, eb) = exact_functions(self.kernel, self.dim, r);
        (ea - m[0], eb - m[1])
    }

    /// Factor multiplying the residual radial functions at length scale `nu`.
    #[inline]
    fn scale_factor(&self, nu: f64) -> f64 {
        if self.dim == 2 && self.kernel != Kernel::Rotlet {
            nu
        } else {
            1.0
        }
    }

    /// Adds `K_R(x) rho` at length scale `nu` to `out`. Zero separation is
    /// skipped (self terms are separate).
    #[inline(always)]
    pub fn residual_apply(&self, x: &[f64], nu: f64, rho: &[f64], out: &mut [f64]) {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return;
        }
        let r = r2.sqrt();
        let rho_s = r / nu;
        let table = self.radial_tables.as_ref().expect("Stokes kernel tables");
        if rho_s >= table.rmax() {
            return;
        }
        let (a, b) = self.residual_functions(rho_s);
        let f = self.scale_factor(nu);
        apply_structure(self.kernel, self.dim, x, r, f * a, f * b, rho, out);
    }

    /// Both directions of one pair: adds `K_R(x) rho_s` to `out_t` and
    /// `K_R(-x) rho_t` to `out_s`, sharing the radial evaluation. `inv_nu`
    /// is `1 / nu`.
    #[inline(always)]
    #[allow(clippy::too_many_arguments)]
    pub fn residual_apply_pair(&self, x: &[f64], r2: f64, nu: f64, inv_nu: f64, rho_s: &[f64], out_t: &mut [f64], rho_t: &[f64], out_s: &mut [f64]) {
        let r = r2.sqrt();
        let table = self.radial_tables.as_ref().expect("Stokes kernel tables");
        let rho = r * inv_nu;
        if rho >= table.rmax() {
            return;
        }
        let (a, b) = self.residual_functions(rho);
        let f = self.scale_factor(nu);
        apply_structure_pair(self.kernel, self.dim, x, r, (f * a, f * b), rho_s, out_t, rho_t, out_s);
    }

    /// Diagonal coefficient of the self term at length scale `nu`.
    pub fn self_coefficient(&self, nu: f64) -> f64 {
        if self.kernel != Kernel::Stokeslet {
            return 0.0;
        }
        if self.dim == 3 {
            self.self_const / nu
        } else {
            self.self_const + nu.ln() / (4.0 * PI)
        }
    }

    fn residual_tensor(&self, x: &[f64]) -> Result<Vec<f64>> {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(Error::ZeroSeparation);
        }
        let (a, b) = self.residual_functions(r);
        Ok(structure_tensor(self.kernel, self.dim, x, r, a, b))
    }

    fn require(&self, k: Kernel) -> Result<()> {
        if self.kernel != k {
            return Err(Error::InvalidArgument(format!("split kernel is {}, not {}", self.kernel.name(), k.name())));
        }
        Ok(())
    }

    /// Residual Stokeslet tensor, row-major `d x d`.
    pub fn stokeslet_residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.require(Kernel::Stokeslet)?;
        self.residual_tensor(x)
    }

    /// Residual stresslet tensor, `T[(j*d + l)*d + m]`.
    pub fn stresslet_residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.require(Kernel::Stresslet)?;
        self.residual_tensor(x)
    }

    /// Residual rotlet: `3 x 3` in 3D, the 2-vector multiplying a scalar torque in 2D.
    pub fn rotlet_residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.require(Kernel::Rotlet)?;
        self.residual_tensor(x)
    }

    /// Residual biharmonic kernel `B_R(r)` (3D).
    pub fn biharmonic_residual(&self, r: f64) -> Result<f64> {
        self.require(Kernel::Biharmonic)?;
        let w = self.window();
        let r = r.abs();
        let inner = r * w.tail(r) - 2.0 * w.upper_moment(r);
        Ok(-inner / (8.0 * PI))
    }

    /// `(B_R', B_R'', B_R''')` at `r` (3D).
    pub fn biharmonic_residual_derivs(&self, r: f64) -> Result<(f64, f64, f64)> {
        self.require(Kernel::Biharmonic)?;
        let w = self.window();
        Ok((-w.tail(r) / (8.0 * PI), w.eval(r) / (4.0 * PI), w.eval_deriv(r, 1) / (4.0 * PI)))
    }

    /// Residual harmonic kernel `Phi(r) / (4 pi r)` (3D).
    pub fn harmonic_residual(&self, r: f64) -> Result<f64> {
        self.require(Kernel::Harmonic)?;
        if r == 0.0 {
            return Err(Error::ZeroSeparation);
        }
        Ok(self.window().tail(r) / (4.0 * PI * r))
    }

    /// Radial part of the mollified symbol: `B_hat gamma_hat` for the
    /// biharmonic family, `H_hat phi_hat` otherwise. `truncated` uses the
    /// truncated Green's functions (finite at `k = 0`).
    pub fn radial_symbol(&self, k: f64, truncated: bool) -> f64 {
        let k = k.abs();
        if self.kernel.is_biharmonic_family() {
            let g = self.mollifier.fourier(k);
            if truncated {
                truncated_biharmonic_fourier(k, self.window_radius_r, self.dim) * g
            } else {
                g / k.powi(4)
            }
        } else {
            let g = self.window().fourier(k);
            if truncated {
                truncated_harmonic_fourier(k, self.window_radius_r, self.dim) * g
            } else {
                g / (k * k)
            }
        }
    }

    /// Mollified Fourier symbol tensor, laid out as the residual tensors.
    pub fn mollified_fourier_tensor(&self, kvec: &[f64], truncated: bool) -> Result<Vec<Complex64>> {
        let d = self.dim;
        if kvec.len() != d {
            return Err(Error::InvalidArgument("wavevector length".into()));
        }
        let k2: f64 = kvec.iter().map(|v| v * v).sum();
        if k2 == 0.0 && !truncated {
            return Err(Error::ZeroSeparation);
        }
        let s = self.radial_symbol(k2.sqrt(), truncated);
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Ok(match self.kernel {
            Kernel::Stokeslet => {
                let mut t = vec![Complex64::new(0.0, 0.0); d * d];
                for j in 0..d {
                    for l in 0..d {
                        t[j * d + l] = Complex64::new((k2 * delta(j, l) - kvec[j] * kvec[l]) * s, 0.0);
                    }
                }
                t
            }
            Kernel::Stresslet => {
                let mut t = vec![Complex64::new(0.0, 0.0); d * d * d];
                for j in 0..d {
                    for l in 0..d {
                        for m in 0..d {
                            let p = (kvec[m] * delta(j, l) + kvec[j] * delta(l, m) + kvec[l] * delta(m, j)) * k2
                                - 2.0 * kvec[j] * kvec[l] * kvec[m];
                            t[(j * d + l) * d + m] = Complex64::new(0.0, p * s);
                        }
                    }
                }
                t
            }
            Kernel::Rotlet => {
                if d == 3 {
                    let h = -0.5 * s;
                    let c = |v: f64| Complex64::new(0.0, h * v);
                    vec![c(0.0), c(kvec[2]), c(-kvec[1]), c(-kvec[2]), c(0.0), c(kvec[0]), c(kvec[1]), c(-kvec[0]), c(0.0)]
                } else {
                    let h = -0.5 * s;
                    vec![Complex64::new(0.0, h * kvec[1]), Complex64::new(0.0, -h * kvec[0])]
                }
            }
            Kernel::Biharmonic | Kernel::Harmonic => vec![Complex64::new(s, 0.0)],
        })
    }

    /// Diagonal coefficient of the self term at unit scale.
    pub fn self_interaction(&self) -> f64 {
        self.self_const
    }
}

/// Applies the Fourier symbol with radial factor `radial` at wavevector `k`
/// to a transformed strength `q`, writing the `d` output components.
///
/// `q` holds `d` components for the Stokeslet, the `d x d` matrix
/// `f n^T` (row-major) for the stresslet, and the torque (3 or 1
/// components) for the rotlet. For the biharmonic family `radial` is the
/// factor multiplying `1/k^4`-type polynomials, e.g. `gamma_hat / k^4`; for
/// the rotlet it multiplies the harmonic symbol, e.g. `phi_hat / k^2`.
#[inline]
pub fn apply_fourier_symbol(kernel: Kernel, dim: usize, k: &[f64], radial: f64, q: &[Complex64], out: &mut [Complex64]) {
    let k2: f64 = k[..dim].iter().map(|v| v * v).sum();
    match kernel {
        Kernel::Stokeslet => {
            let mut kq = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                kq += q[j] * k[j];
            }
            for j in 0..dim {
                out[j] = (q[j] * k2 - kq * k[j]) * radial;
            }
        }
        Kernel::Stresslet => {
            let mut tr = Complex64::new(0.0, 0.0);
            let mut rk = [Complex64::new(0.0, 0.0); 3];
            let mut kr = [Complex64::new(0.0, 0.0); 3];
            for j in 0..dim {
                tr += q[j * dim + j];
                for m in 0..dim {
                    rk[j] += q[j * dim + m] * k[m];
                    kr[m] += q[j * dim + m] * k[j];
                }
            }
            let mut krk = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                krk += rk[j] * k[j];
            }
            let iu = Complex64::new(0.0, radial);
            for j in 0..dim {
                out[j] = iu * ((rk[j] + tr * k[j] + kr[j]) * k2 - krk * (2.0 * k[j]));
            }
        }
        Kernel::Rotlet => {
            let c = Complex64::new(0.0, 0.5 * radial);
            if dim == 3 {
                out[0] = c * (q[2] * k[1] - q[1] * k[2]);
                out[1] = c * (q[0] * k[2] - q[2] * k[0]);
                out[2] = c * (q[1] * k[0] - q[0] * k[1]);
            } else {
                out[0] = -c * q[0] * k[1];
                out[1] = c * q[0] * k[0];
            }
        }
        Kernel::Biharmonic | Kernel::Harmonic => out[0] = q[0] * radial,
    }
}

/// Self-interaction coefficient of `sk` at unit scale.
pub fn self_interaction(sk: &SplitKernel) -> f64 {
    sk.self_interaction()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prolate(c: f64) -> WindowFunction {
        WindowFunction::prolate(c).unwrap()
    }

    #[test]
    fn gaussian_mollifier_is_hasimoto() {
        let m = Mollifier::new(WindowFunction::gaussian(0.3).unwrap());
        for i in 0..50 {
            let k = 0.4 * i as f64;
            let want = (-k * k * 0.09 / 4.0).exp() * (1.0 + k * k * 0.09 / 4.0);
            assert!((m.fourier(k) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn prolate_mollifier_composes_window_ops() {
        let w = prolate(32.0);
        let m = Mollifier::new(w.clone());
        assert!((m.fourier(12.0) - (w.fourier(12.0) - 6.0 * w.fourier_deriv(12.0, 1))).abs() < 1e-15);
        assert_eq!(m.fourier(0.0), 1.0);
        assert_eq!(m.fourier(33.0), 0.0);
    }

    #[test]
    fn stokeslet_3d_table_matches_closed_form() {
        let sk = build_split_kernel(Kernel::Stokeslet, 3, prolate(32.0), 1e-14).unwrap();
        let w = sk.window().clone();
        let mut worst = 0.0f64;
        for i in 0..1000 {
            let r = (i as f64 + 0.5) / 1000.0;
            let (a, b) = sk.residual_functions(r);
            let (ca, cb) = closed_form_residuals(Kernel::Stokeslet, &w, r);
            worst = worst.max((a - ca).abs()).max((b - cb).abs());
        }
        assert!(worst <= 1e-13, "{worst:e}");
        assert!((sk.corr_const - 1.0 / (4.0 * PI * (1.0 + 3f64.sqrt()))).abs() < 1e-16);
    }

    #[test]
    fn compact_support_of_prolate_residuals() {
        let sk = build_split_kernel(Kernel::Stokeslet, 3, prolate(32.0), 1e-12).unwrap();
        assert_eq!(sk.stokeslet_residual(&[1.2, 0.0, 0.0]).unwrap(), vec![0.0; 9]);
        let sk = build_split_kernel(Kernel::Rotlet, 3, prolate(32.0), 1e-12).unwrap();
        assert_eq!(sk.rotlet_residual(&[0.0, 1.1, 0.0]).unwrap(), vec![0.0; 9]);
    }

    #[test]
    fn gaussian_residuals_match_erfc_forms() {
        let s = 0.25;
        let w = WindowFunction::gaussian(s).unwrap();
        let sk = build_split_kernel(Kernel::Stokeslet, 3, w.clone(), 1e-14).unwrap();
        let st = build_split_kernel(Kernel::Stresslet, 3, w.clone(), 1e-14).unwrap();
        let ro = build_split_kernel(Kernel::Rotlet, 3, w, 1e-14).unwrap();
        let erfc = libm::erfc;
        for i in 1..200 {
            let r = 1.5 * i as f64 / 200.0;
            let g = (-(r * r) / (s * s)).exp();
            let sd = erfc(r / s) - 2.0 * r / (s * PI.sqrt()) * g;
            let td = 4.0 * r.powi(3) / (s.powi(3) * PI.sqrt()) * g;
            let od = erfc(r / s) + 2.0 * r / (s * PI.sqrt()) * g;
            assert!((sk.residual_functions(r).0 - sd).abs() < 1e-13);
            assert!((st.residual_functions(r).0 - td).abs() < 1e-13);
            assert!((ro.residual_functions(r).0 - od).abs() < 1e-13);
        }
    }

    #[test]
    fn biharmonic_residual_matches_hasimoto() {
        let s = 0.3;
        let sk = build_split_kernel(Kernel::Biharmonic, 3, WindowFunction::gaussian(s).unwrap(), 1e-12).unwrap();
        let erfc = libm::erfc;
        for i in 0..100 {
            let r = 0.02 * i as f64;
            let want = -r / (8.0 * PI) * erfc(r / s) + s / (8.0 * PI.powf(1.5)) * (-(r * r) / (s * s)).exp();
            assert!((sk.biharmonic_residual(r).unwrap() - want).abs() < 1e-15);
        }
        let (d1, d2, _) = sk.biharmonic_residual_derivs(0.0).unwrap();
        assert!((d1 + 1.0 / (8.0 * PI)).abs() < 1e-16);
        assert!((d2 - 1.0 / (4.0 * PI.powf(1.5) * s)).abs() < 1e-14);
    }

    #[test]
    fn stokeslet_symbol_is_divergence_free() {
        let sk = build_split_kernel(Kernel::Stokeslet, 3, prolate(20.0), 1e-10).unwrap();
        let k = [1.3, -0.4, 2.2];
        let t = sk.mollified_fourier_tensor(&k, false).unwrap();
        for l in 0..3 {
            let s: Complex64 = (0..3).map(|j| t[j * 3 + l] * k[j]).sum();
            assert!(s.norm() < 1e-15);
        }
        assert!(sk.mollified_fourier_tensor(&[0.0; 3], false).is_err());
        assert!(sk.mollified_fourier_tensor(&[0.0; 3], true).is_ok());
    }

    #[test]
    fn symbol_application_matches_dense_tensor() {
        let w = prolate(20.0);
        let k = [0.7, -1.9, 1.1];
        for dim in [2, 3] {
            for kernel in [Kernel::Stokeslet, Kernel::Stresslet, Kernel::Rotlet] {
                let sk = build_split_kernel(kernel, dim, w.clone(), 1e-10).unwrap();
                let t = sk.mollified_fourier_tensor(&k[..dim], false).unwrap();
                let kn = k[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
                let radial = sk.radial_symbol(kn, false);
                let nq = match kernel {
                    Kernel::Stresslet => dim * dim,
                    _ => strength_len(kernel, dim),
                };
                let q: Vec<Complex64> = (0..nq).map(|i| Complex64::new(0.3 * i as f64 - 0.5, 0.2 + 0.1 * i as f64)).collect();
                let mut out = vec![Complex64::new(0.0, 0.0); dim];
                apply_fourier_symbol(kernel, dim, &k, radial, &q, &mut out);
                for j in 0..dim {
                    let want: Complex64 = match kernel {
                        Kernel::Stresslet => (0..dim * dim).map(|lm| t[j * dim * dim + lm] * q[lm]).sum(),
                        Kernel::Rotlet if dim == 2 => t[j] * q[0],
                        _ => (0..dim).map(|l| t[j * dim + l] * q[l]).sum(),
                    };
                    assert!((out[j] - want).norm() < 1e-15 * (1.0 + want.norm()), "{kernel:?} {dim}D");
                }
            }
        }
    }

    #[test]
    fn self_terms() {
        let s = 0.2;
        let sk = build_split_kernel(Kernel::Stokeslet, 3, WindowFunction::gaussian(s).unwrap(), 1e-12).unwrap();
        assert!((sk.self_interaction() + 1.0 / (2.0 * PI * s * PI.sqrt())).abs() < 1e-14);
        let st = build_split_kernel(Kernel::Stresslet, 3, prolate(20.0), 1e-10).unwrap();
        assert_eq!(st.self_interaction(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_split_kernel(Kernel::Stokeslet, 3, prolate(10.0), 1e-16).is_err());
        assert!(build_split_kernel(Kernel::Biharmonic, 2, prolate(10.0), 1e-10).is_err());
        let sk = build_split_kernel(Kernel::Stokeslet, 3, prolate(10.0), 1e-10).unwrap();
        assert!(matches!(sk.stokeslet_residual(&[0.0; 3]), Err(Error::ZeroSeparation)));
        assert!(sk.stresslet_residual(&[0.1; 3]).is_err());
    }
}
