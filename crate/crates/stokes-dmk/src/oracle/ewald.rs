use super::direct::{collect_rows, residual_sum};
use super::{Mode, ParticleSystem};
use crate::error::{Error, Result};
use crate::split::{apply_fourier_symbol, fourier_components, Kernel, SplitKernel};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Fourier quadrature for the reference far field.
///
/// Free space: trapezoidal rule with spacing `2 pi / period` over
/// `|k_i| <= kmax`. Periodic: modes `2 pi kappa`, `|kappa_i| <= ceil(kmax / 2 pi)`
/// (`period` unused).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EwaldGrid {
    pub kmax: f64,
    pub period: f64,
}

impl EwaldGrid {
    /// Grid resolving the mollifier of `sk` to its table tolerance.
    pub fn for_split(sk: &SplitKernel, mode: Mode) -> EwaldGrid {
        let period = required_period(sk);
        let kmax = match mode {
            Mode::Free => sk.mollifier.bandlimit(),
            Mode::Periodic => {
                let f = |k: f64| match sk.kernel {
                    Kernel::Rotlet => sk.window().fourier(k),
                    _ => sk.mollifier.fourier(k),
                };
                let mut kappa = 1.0;
                while f(2.0 * PI * kappa).abs() >= sk.tol / 100.0 && kappa < 1e4 {
                    kappa += 1.0;
                }
                2.0 * PI * kappa
            }
        };
        EwaldGrid { kmax, period }
    }
}

/// Smallest trapezoid period free of aliasing for unit-box separations.
fn required_period(sk: &SplitKernel) -> f64 {
    sk.window_radius_r + 1.0 + sk.residual_radius()
}

fn check_grid(sk: &SplitKernel, mode: Mode, grid: &EwaldGrid) -> Result<()> {
    let band = sk.mollifier.bandlimit();
    let decay = |k: f64| match sk.kernel {
        Kernel::Rotlet => sk.window().fourier(k).abs(),
        _ => sk.mollifier.fourier(k).abs(),
    };
    let requested = sk.tol;
    match mode {
        Mode::Free => {
            if grid.period < required_period(sk) {
                return Err(Error::Quadrature { achieved: 1.0, requested });
            }
            if grid.kmax < band && decay(grid.kmax) > requested {
                return Err(Error::Quadrature { achieved: decay(grid.kmax), requested });
            }
        }
        Mode::Periodic => {
            let kappa = (grid.kmax / (2.0 * PI)).ceil();
            let k = 2.0 * PI * (kappa + 1.0);
            if k < band && decay(k) > requested {
                return Err(Error::Quadrature { achieved: decay(k), requested });
            }
        }
    }
    Ok(())
}

/// Single-level Ewald reference: local residual sum at unit scale, Fourier
/// far field, self term, and (free space) the truncation correction or
/// (periodic stresslet) the zero-mode term.
pub fn ewald_reference(sk: &SplitKernel, sys: &ParticleSystem, mode: Mode, grid: &EwaldGrid) -> Result<Vec<f64>> {
    sys.check_kernel(sk.kernel)?;
    let d = sys.dim;
    if d != sk.dim {
        return Err(Error::InvalidArgument("split kernel and system dimensions differ".into()));
    }
    if mode == Mode::Periodic && d == 2 && sk.kernel == Kernel::Stresslet {
        return Err(Error::Unsupported("2D periodic stresslet".into()));
    }
    check_grid(sk, mode, grid)?;
    let mut u = residual_sum(sk, sys, 1.0, sk.residual_radius(), mode == Mode::Periodic)?;
    let far = far_field(sk, sys, mode, grid);
    for (a, b) in u.iter_mut().zip(&far) {
        *a += b;
    }
    let kernel = sk.kernel;
    if sys.aliased() && kernel == Kernel::Stokeslet {
        let s = sk.self_coefficient(1.0);
        for b in 0..sys.n_targets() {
            for j in 0..d {
                u[b * d + j] += s * sys.strength(b)[j];
            }
        }
    }
    if mode == Mode::Free && kernel == Kernel::Stokeslet {
        let mut total = [0.0; 3];
        for a in 0..sys.n_sources() {
            for j in 0..d {
                total[j] += sys.strength(a)[j];
            }
        }
        for b in 0..sys.n_targets() {
            for j in 0..d {
                u[b * d + j] += sk.corr_const * total[j];
            }
        }
    }
    if mode == Mode::Periodic && kernel == Kernel::Stresslet {
        add_stresslet_zero_mode(sys, &mut u);
    }
    Ok(u)
}

/// `u0(x_b) = -sum_a (x_b - x_a) (f_a . n_a)`.
pub(crate) fn add_stresslet_zero_mode(sys: &ParticleSystem, u: &mut [f64]) {
    let d = sys.dim;
    let mut q = 0.0;
    let mut qx = [0.0; 3];
    for a in 0..sys.n_sources() {
        let s = sys.strength(a);
        let fn_: f64 = (0..d).map(|j| s[j] * s[d + j]).sum();
        q += fn_;
        for j in 0..d {
            qx[j] += fn_ * sys.source(a)[j];
        }
    }
    for b in 0..sys.n_targets() {
        let x = sys.target(b);
        for j in 0..d {
            u[b * d + j] -= x[j] * q - qx[j];
        }
    }
}

/// Far field by direct evaluation of the Fourier sum, using the
/// half-space of modes and conjugate symmetry.
fn far_field(sk: &SplitKernel, sys: &ParticleSystem, mode: Mode, grid: &EwaldGrid) -> Vec<f64> {
    let d = sys.dim;
    let kernel = sk.kernel;
    let (h, n, weight, truncated) = match mode {
        Mode::Free => {
            let h = 2.0 * PI / grid.period;
            let n = (grid.kmax / h).ceil() as i64;
            (h, n, (h / (2.0 * PI)).powi(d as i32), true)
        }
        Mode::Periodic => (2.0 * PI, (grid.kmax / (2.0 * PI)).ceil() as i64, 1.0, false),
    };
    let mut modes: Vec<[i64; 3]> = Vec::new();
    let r = -n..=n;
    for a in r.clone() {
        for b in r.clone() {
            if d == 2 {
                if b > 0 || (b == 0 && a >= 0) {
                    modes.push([a, b, 0]);
                }
            } else {
                for c in r.clone() {
                    if c > 0 || (c == 0 && (b > 0 || (b == 0 && a >= 0))) {
                        modes.push([a, b, c]);
                    }
                }
            }
        }
    }
    if !truncated {
        modes.retain(|m| *m != [0, 0, 0]);
    }
    let nm = (2 * n + 1) as usize;
    // 1D phase tables e^{-i h m x} per point and dimension
    let phases = |pts: &[f64]| -> Vec<Complex64> {
        let np = pts.len() / d;
        let mut t = vec![Complex64::new(0.0, 0.0); np * d * nm];
        for p in 0..np {
            for j in 0..d {
                let x = pts[p * d + j];
                for (i, m) in (-n..=n).enumerate() {
                    t[(p * d + j) * nm + i] = Complex64::from_polar(1.0, -h * m as f64 * x);
                }
            }
        }
        t
    };
    let src = phases(&sys.sources);
    let tgt = phases(sys.target_coords());
    let ns = sys.n_sources();
    let nt = sys.n_targets();
    let mut qbuf = vec![0.0; 9];
    let ncomp = fourier_components(kernel, d, sys.strength(0), &mut qbuf);
    let mut strengths = vec![0.0; ns * ncomp];
    for a in 0..ns {
        fourier_components(kernel, d, sys.strength(a), &mut strengths[a * ncomp..(a + 1) * ncomp]);
    }
    let idx = |m: i64| (m + n) as usize;
    let spectra: Vec<[Complex64; 3]> = modes
        .par_iter()
        .map(|m| {
            let mut s = [Complex64::new(0.0, 0.0); 9];
            for a in 0..ns {
                let mut e = src[(a * d) * nm + idx(m[0])];
                for j in 1..d {
                    e *= src[(a * d + j) * nm + idx(m[j])];
                }
                for c in 0..ncomp {
                    s[c] += e * strengths[a * ncomp + c];
                }
            }
            let k = [h * m[0] as f64, h * m[1] as f64, h * m[2] as f64];
            let kn = k[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
            let radial = sk.radial_symbol(kn, truncated);
            let mut out = [Complex64::new(0.0, 0.0); 3];
            apply_fourier_symbol(kernel, d, &k, radial, &s[..ncomp], &mut out);
            let sym = if m[d - 1] == 0 && m[..d - 1].iter().all(|&v| v == 0) { 1.0 } else { 2.0 };
            for o in &mut out {
                *o *= weight * sym;
            }
            out
        })
        .collect();
    let rows: Vec<Result<[f64; 3]>> = (0..nt)
        .into_par_iter()
        .map(|b| {
            let mut acc = [0.0; 3];
            for (m, s) in modes.iter().zip(&spectra) {
                // conj of the source-side phase gives e^{+i k x}
                let mut e = tgt[(b * d) * nm + idx(m[0])].conj();
                for j in 1..d {
                    e *= tgt[(b * d + j) * nm + idx(m[j])].conj();
                }
                for j in 0..d {
                    acc[j] += (e * s[j]).re;
                }
            }
            Ok(acc)
        })
        .collect();
    collect_rows(rows, d).expect("far field rows")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{direct_sum, relative_l2};
    use crate::split::build_split_kernel;
    use crate::windows::WindowFunction;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_system(kernel: Kernel, dim: usize, n: usize, seed: u64) -> ParticleSystem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<f64> = (0..n * dim).map(|_| rng.random::<f64>() - 0.5).collect();
        let ar = crate::split::strength_len(kernel, dim);
        let st: Vec<f64> = (0..n * ar).map(|_| rng.random::<f64>() - 0.5).collect();
        ParticleSystem::new(dim, pts, None, st).unwrap()
    }

    #[test]
    fn free_space_reference_matches_direct_sum() {
        for dim in [2, 3] {
            for kernel in [Kernel::Stokeslet, Kernel::Stresslet, Kernel::Rotlet] {
                let sys = random_system(kernel, dim, 60, 7);
                let sk = build_split_kernel(kernel, dim, WindowFunction::prolate(30.0).unwrap(), 1e-12).unwrap();
                let g = EwaldGrid::for_split(&sk, Mode::Free);
                let u = ewald_reference(&sk, &sys, Mode::Free, &g).unwrap();
                let want = direct_sum(kernel, &sys).unwrap();
                let e = relative_l2(&u, &want);
                assert!(e < 1e-10, "{kernel:?} {dim}D: {e:e}");
            }
        }
    }

    #[test]
    fn coarse_grid_is_diagnosed() {
        let sk = build_split_kernel(Kernel::Stokeslet, 3, WindowFunction::prolate(20.0).unwrap(), 1e-10).unwrap();
        let sys = random_system(Kernel::Stokeslet, 3, 5, 1);
        let g = EwaldGrid { kmax: 10.0, period: 5.0 };
        assert!(matches!(ewald_reference(&sk, &sys, Mode::Free, &g), Err(Error::Quadrature { .. })));
        let g = EwaldGrid { kmax: 20.0, period: 2.0 };
        assert!(matches!(ewald_reference(&sk, &sys, Mode::Free, &g), Err(Error::Quadrature { .. })));
    }

    #[test]
    fn periodic_reference_is_translation_invariant() {
        for kernel in [Kernel::Stokeslet, Kernel::Rotlet] {
            let sys = random_system(kernel, 3, 40, 3);
            let sk = build_split_kernel(kernel, 3, WindowFunction::prolate(30.0).unwrap(), 1e-12).unwrap();
            let g = EwaldGrid::for_split(&sk, Mode::Periodic);
            let u = ewald_reference(&sk, &sys, Mode::Periodic, &g).unwrap();
            let v = ewald_reference(&sk, &sys.translated(&[0.3, 0.3, 0.3]), Mode::Periodic, &g).unwrap();
            let e = relative_l2(&v, &u);
            assert!(e < 1e-10, "{kernel:?}: {e:e}");
        }
    }
}
