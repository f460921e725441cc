use super::{Compensated, ParticleSystem};
use crate::error::{Error, Result};
use crate::split::{exact_apply, Kernel, SplitKernel};
use rayon::prelude::*;

/// Lattice shifts in `[-m, m]^d`.
pub(crate) fn image_shifts(dim: usize, m: i32) -> Vec<[f64; 3]> {
    let r = -m..=m;
    let mut out = Vec::new();
    for a in r.clone() {
        for b in r.clone() {
            if dim == 2 {
                out.push([a as f64, b as f64, 0.0]);
            } else {
                for c in r.clone() {
                    out.push([a as f64, b as f64, c as f64]);
                }
            }
        }
    }
    out
}

/// `u(x_b) = sum_a K(x_b - x_a) rho_a` with the exact kernel, skipping the
/// self pair when targets alias sources.
pub fn direct_sum(kernel: Kernel, sys: &ParticleSystem) -> Result<Vec<f64>> {
    sys.check_kernel(kernel)?;
    let d = sys.dim;
    let aliased = sys.aliased();
    let rows: Vec<Result<[f64; 3]>> = (0..sys.n_targets())
        .into_par_iter()
        .map(|b| {
            let xb = sys.target(b);
            let mut acc = Compensated::default();
            let mut x = [0.0; 3];
            for a in 0..sys.n_sources() {
                if aliased && a == b {
                    continue;
                }
                let xa = sys.source(a);
                for j in 0..d {
                    x[j] = xb[j] - xa[j];
                }
                let mut tmp = [0.0; 3];
                exact_apply(kernel, d, &x[..d], sys.strength(a), &mut tmp).map_err(|_| Error::SingularConfiguration { a, b })?;
                acc.add(&tmp[..d]);
            }
            Ok([acc.value(0), acc.value(1), acc.value(2)])
        })
        .collect();
    collect_rows(rows, d)
}

pub(crate) fn collect_rows(rows: Vec<Result<[f64; 3]>>, d: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(rows.len() * d);
    for r in rows {
        out.extend_from_slice(&r?[..d]);
    }
    Ok(out)
}

/// Residual-only sum at length scale `cutoff`: the residual kernel
/// `K_R(x / cutoff)` (scaled per kernel) over pairs closer than `cutoff`.
/// Periodic mode adds images in `{-1, 0, 1}^d`.
pub fn direct_residual_sum(sk: &SplitKernel, sys: &ParticleSystem, cutoff: f64, periodic: bool) -> Result<Vec<f64>> {
    residual_sum(sk, sys, cutoff, cutoff, periodic)
}

/// Residual sum at scale `nu` over pairs closer than `cutoff`.
pub(crate) fn residual_sum(sk: &SplitKernel, sys: &ParticleSystem, nu: f64, cutoff: f64, periodic: bool) -> Result<Vec<f64>> {
    sys.check_kernel(sk.kernel)?;
    if sys.dim != sk.dim {
        return Err(Error::InvalidArgument("split kernel and system dimensions differ".into()));
    }
    if !(cutoff > 0.0) || !(nu > 0.0) {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff}")));
    }
    let d = sys.dim;
    let aliased = sys.aliased();
    let shifts = if periodic { image_shifts(d, cutoff.ceil() as i32) } else { vec![[0.0; 3]] };
    let c2 = cutoff * cutoff;
    let rows: Vec<Result<[f64; 3]>> = (0..sys.n_targets())
        .into_par_iter()
        .map(|b| {
            let xb = sys.target(b);
            let mut acc = Compensated::default();
            let mut x = [0.0; 3];
            for a in 0..sys.n_sources() {
                let xa = sys.source(a);
                for p in &shifts {
                    let mut r2 = 0.0;
                    for j in 0..d {
                        x[j] = xb[j] - xa[j] + p[j];
                        r2 += x[j] * x[j];
                    }
                    if r2 >= c2 {
                        continue;
                    }
                    if r2 == 0.0 {
                        if aliased && a == b {
                            continue;
                        }
                        return Err(Error::SingularConfiguration { a, b });
                    }
                    let mut tmp = [0.0; 3];
                    sk.residual_apply(&x[..d], nu, sys.strength(a), &mut tmp);
                    acc.add(&tmp[..d]);
                }
            }
            Ok([acc.value(0), acc.value(1), acc.value(2)])
        })
        .collect();
    collect_rows(rows, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::split::build_split_kernel;
    use crate::windows::WindowFunction;
    use std::f64::consts::PI;

    #[test]
    fn single_stokeslet_on_axis() {
        let r = 0.3;
        let sys = ParticleSystem::new(3, vec![0.0; 3], Some(vec![r, 0.0, 0.0]), vec![1.0, 0.0, 0.0]).unwrap();
        let u = direct_sum(Kernel::Stokeslet, &sys).unwrap();
        assert!((u[0] - 1.0 / (4.0 * PI * r)).abs() < 1e-15);
        assert_eq!(&u[1..], &[0.0, 0.0]);
    }

    #[test]
    fn stresslet_on_axis() {
        let r = 0.25;
        let sys = ParticleSystem::new(3, vec![0.0; 3], Some(vec![r, 0.0, 0.0]), vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let u = direct_sum(Kernel::Stresslet, &sys).unwrap();
        assert!((u[0] + 3.0 / (4.0 * PI * r * r)).abs() < 1e-13);
    }

    #[test]
    fn coincident_points_are_singular() {
        let sys = ParticleSystem::new(3, vec![0.1, 0.1, 0.1, 0.1, 0.1, 0.1], None, vec![1.0; 6]).unwrap();
        assert!(matches!(direct_sum(Kernel::Stokeslet, &sys), Err(Error::SingularConfiguration { .. })));
    }

    #[test]
    fn prolate_residual_vanishes_beyond_unit_separation() {
        let sk = build_split_kernel(Kernel::Stokeslet, 3, WindowFunction::prolate(20.0).unwrap(), 1e-10).unwrap();
        let sys = ParticleSystem::new(3, vec![-0.5, -0.5, -0.5, 0.5, 0.5, 0.5], None, vec![1.0; 6]).unwrap();
        assert_eq!(direct_residual_sum(&sk, &sys, 1.0, false).unwrap(), vec![0.0; 6]);
    }

    #[test]
    fn pairwise_residual_composition() {
        let sk = build_split_kernel(Kernel::Stokeslet, 3, WindowFunction::prolate(32.0).unwrap(), 1e-12).unwrap();
        let sys = ParticleSystem::new(3, vec![0.0, 0.0, 0.0, 0.3, 0.4, 0.0], None, vec![1.0, 2.0, 3.0, -1.0, 0.5, 0.0]).unwrap();
        let u = direct_residual_sum(&sk, &sys, 1.0, false).unwrap();
        let t = sk.stokeslet_residual(&[-0.3, -0.4, 0.0]).unwrap();
        for j in 0..3 {
            let want: f64 = (0..3).map(|l| t[j * 3 + l] * sys.strength(1)[l]).sum();
            assert!((u[j] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn periodic_residual_sees_through_the_boundary() {
        let sk = build_split_kernel(Kernel::Stokeslet, 3, WindowFunction::prolate(20.0).unwrap(), 1e-10).unwrap();
        let sys = ParticleSystem::new(3, vec![0.49, 0.0, 0.0, -0.49, 0.0, 0.0], None, vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let free = direct_residual_sum(&sk, &sys, 0.1, false).unwrap();
        assert_eq!(free, vec![0.0; 6]);
        let per = direct_residual_sum(&sk, &sys, 0.1, true).unwrap();
        let t = sk.stokeslet_residual(&[-0.2, 0.0, 0.0]).unwrap();
        // scale 0.1 turns distance 0.02 into 0.2 at unit scale
        assert!((per[0] - t[0] / 0.1).abs() < 1e-12 * t[0].abs());
    }
}
