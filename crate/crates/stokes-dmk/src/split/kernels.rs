//! Exact Stokes kernels and their tensor forms.

use super::Kernel;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Number of scalars per source for `kernel` in `dim` dimensions.
pub fn strength_len(kernel: Kernel, dim: usize) -> usize {
    match kernel {
        Kernel::Stokeslet => dim,
        Kernel::Stresslet => 2 * dim,
        Kernel::Rotlet => {
            if dim == 3 {
                3
            } else {
                1
            }
        }
        Kernel::Biharmonic | Kernel::Harmonic => 1,
    }
}

/// Number of scalars per target.
pub fn output_len(kernel: Kernel, dim: usize) -> usize {
    match kernel {
        Kernel::Biharmonic | Kernel::Harmonic => 1,
        _ => dim,
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const INV_8PI: f64 = 1.0 / (8.0 * PI);
const INV_4PI: f64 = 1.0 / (4.0 * PI);

/// Adds `K(x) rho` to `out` given radial coefficient functions.
///
/// `fa`, `fb` are the two radial functions (diagonal/offdiagonal style)
/// already evaluated at `r`; the rotlet uses only `fa`.
#[inline(always)]
#[allow(clippy::too_many_arguments)]
pub(crate) fn apply_structure(kernel: Kernel, dim: usize, x: &[f64], r: f64, fa: f64, fb: f64, rho: &[f64], out: &mut [f64]) {
    apply_scaled(kernel, dim, x, 1.0 / r, fa, fb, rho, out, 1.0);
}

/// Both directions of one pair: `K(x) rho_s` into `out_t` and
/// `K(-x) rho_t` into `out_s`. The Stokeslet is even in `x`; the stresslet
/// and rotlet are odd, so the reverse term is the same expression negated.
#[inline(always)]
#[allow(clippy::too_many_arguments)]
pub(crate) fn apply_structure_pair(
    kernel: Kernel,
    dim: usize,
    x: &[f64],
    r: f64,
    (fa, fb): (f64, f64),
    rho_s: &[f64],
    out_t: &mut [f64],
    rho_t: &[f64],
    out_s: &mut [f64],
) {
    let ir = 1.0 / r;
    apply_scaled(kernel, dim, x, ir, fa, fb, rho_s, out_t, 1.0);
    let sign = if kernel == Kernel::Stokeslet { 1.0 } else { -1.0 };
    apply_scaled(kernel, dim, x, ir, fa, fb, rho_t, out_s, sign);
}

#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn apply_scaled(kernel: Kernel, dim: usize, x: &[f64], ir: f64, fa: f64, fb: f64, rho: &[f64], out: &mut [f64], sign: f64) {
    match kernel {
        Kernel::Stokeslet => {
            let xf = dot(x, &rho[..dim]);
            let a = sign * fa * ir * INV_8PI;
            let b = sign * fb * xf * ir * ir * ir * INV_8PI;
            for j in 0..dim {
                out[j] += a * rho[j] + b * x[j];
            }
        }
        Kernel::Stresslet => {
            let f = &rho[..dim];
            let n = &rho[dim..2 * dim];
            let xf = dot(x, f);
            let xn = dot(x, n);
            let fnn = dot(f, n);
            let ir3 = ir * ir * ir;
            let a = sign * fa * ir3 * INV_8PI;
            let b = -3.0 * sign * INV_4PI * fb * xf * xn * ir3 * ir * ir;
            for j in 0..dim {
                out[j] += a * (f[j] * xn + x[j] * fnn + n[j] * xf) + b * x[j];
            }
        }
        Kernel::Rotlet => {
            if dim == 3 {
                let a = sign * fa * ir * ir * ir * INV_8PI;
                out[0] += a * (rho[1] * x[2] - rho[2] * x[1]);
                out[1] += a * (rho[2] * x[0] - rho[0] * x[2]);
                out[2] += a * (rho[0] * x[1] - rho[1] * x[0]);
            } else {
                let a = sign * fa * rho[0] * ir * ir * INV_4PI;
                out[0] += a * x[1];
                out[1] -= a * x[0];
            }
        }
        Kernel::Biharmonic | Kernel::Harmonic => out[0] += fa * rho[0],
    }
}

/// Exact radial functions at separation `r` in the same normalization as
/// the residual functions.
#[inline(always)]
pub(crate) fn exact_functions(kernel: Kernel, dim: usize, r: f64) -> (f64, f64) {
    match (kernel, dim) {
        (Kernel::Stokeslet, 3) => (1.0, 1.0),
        (Kernel::Stokeslet, _) => (-2.0 * r * r.ln(), 2.0 * r),
        (Kernel::Stresslet, 3) => (0.0, 1.0),
        (Kernel::Stresslet, _) => (0.0, 4.0 * r / 3.0),
        (Kernel::Rotlet, _) => (1.0, 0.0),
        (Kernel::Biharmonic, 3) => (-r / (8.0 * PI), 0.0),
        (Kernel::Biharmonic, _) => ((r * r * r.ln() - 1.5 * r * r) / (8.0 * PI), 0.0),
        (Kernel::Harmonic, 3) => (1.0 / (4.0 * PI * r), 0.0),
        (Kernel::Harmonic, _) => (-r.ln() / (2.0 * PI), 0.0),
    }
}

/// Per-source data in the layout taken by the Fourier symbols: `f n^T`
/// (row-major) for the stresslet, the strength itself otherwise. Returns
/// the component count.
pub fn fourier_components(kernel: Kernel, dim: usize, rho: &[f64], out: &mut [f64]) -> usize {
    match kernel {
        Kernel::Stresslet => {
            for j in 0..dim {
                for m in 0..dim {
                    out[j * dim + m] = rho[j] * rho[dim + m];
                }
            }
            dim * dim
        }
        _ => {
            let n = strength_len(kernel, dim);
            out[..n].copy_from_slice(&rho[..n]);
            n
        }
    }
}

/// Adds the exact kernel `K(x) rho` to `out`.
pub fn exact_apply(kernel: Kernel, dim: usize, x: &[f64], rho: &[f64], out: &mut [f64]) -> Result<()> {
    let r = dot(x, x).sqrt();
    if r == 0.0 {
        return Err(Error::ZeroSeparation);
    }
    let (fa, fb) = exact_functions(kernel, dim, r);
    apply_structure(kernel, dim, x, r, fa, fb, rho, out);
    Ok(())
}

/// Dense tensor of the radial structure: `d x d` for the Stokeslet and the
/// 3D rotlet, `d x d x d` for the stresslet, a `d`-vector for the 2D rotlet.
pub(crate) fn structure_tensor(kernel: Kernel, dim: usize, x: &[f64], r: f64, fa: f64, fb: f64) -> Vec<f64> {
    match kernel {
        Kernel::Stokeslet => {
            let mut t = vec![0.0; dim * dim];
            for j in 0..dim {
                for l in 0..dim {
                    let delta = if j == l { 1.0 } else { 0.0 };
                    t[j * dim + l] = fa * delta / (8.0 * PI * r) + fb * x[j] * x[l] / (8.0 * PI * r * r * r);
                }
            }
            t
        }
        Kernel::Stresslet => {
            let mut t = vec![0.0; dim * dim * dim];
            let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
            let r3 = r * r * r;
            for j in 0..dim {
                for l in 0..dim {
                    for m in 0..dim {
                        let s = d(j, l) * x[m] + d(l, m) * x[j] + d(m, j) * x[l];
                        t[(j * dim + l) * dim + m] =
                            fa * s / (8.0 * PI * r3) - 3.0 / (4.0 * PI) * fb * x[j] * x[l] * x[m] / (r3 * r * r);
                    }
                }
            }
            t
        }
        Kernel::Rotlet => {
            if dim == 3 {
                let a = fa / (8.0 * PI * r * r * r);
                vec![0.0, a * x[2], -a * x[1], -a * x[2], 0.0, a * x[0], a * x[1], -a * x[0], 0.0]
            } else {
                let a = fa / (4.0 * PI * r * r);
                vec![a * x[1], -a * x[0]]
            }
        }
        Kernel::Biharmonic | Kernel::Harmonic => vec![fa],
    }
}
