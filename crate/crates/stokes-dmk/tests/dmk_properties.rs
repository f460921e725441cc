//! Structural properties of the fast sums, checked on small random systems.

use proptest::prelude::*;
use stokes_dmk::dmk::{select_parameters, DmkPlan};
use stokes_dmk::oracle::{direct_sum, ewald_reference, relative_l2, EwaldGrid};
use stokes_dmk::split::strength_len;
use stokes_dmk::windows::WindowKind;
use stokes_dmk::{Kernel, Mode, ParticleSystem};

const EPS: f64 = 1e-6;

fn kernel_strategy() -> impl Strategy<Value = Kernel> {
    prop_oneof![Just(Kernel::Stokeslet), Just(Kernel::Stresslet), Just(Kernel::Rotlet)]
}

/// Between `lo` and `hi` points in the unit box, with strengths for `kernel`.
fn system(kernel: Kernel, dim: usize, lo: usize, hi: usize) -> impl Strategy<Value = ParticleSystem> {
    (lo..hi).prop_flat_map(move |n| {
        (
            prop::collection::vec(-0.5f64..0.5, n * dim).prop_filter("coincident points", move |x| distinct(x, dim)),
            prop::collection::vec(-1.0f64..1.0, n * strength_len(kernel, dim)),
        )
            .prop_map(move |(x, s)| ParticleSystem::new(dim, x, None, s).unwrap())
    })
}

/// Shrinking drives coordinates toward zero, which would otherwise produce
/// coincident points, a singular configuration.
fn distinct(x: &[f64], dim: usize) -> bool {
    let mut pts: Vec<&[f64]> = x.chunks(dim).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.windows(2).all(|w| w[0] != w[1])
}

/// A plan whose leaves are small enough that even these systems build a
/// few levels.
fn plan(kernel: Kernel, dim: usize, mode: Mode) -> DmkPlan {
    let mut params = select_parameters(kernel, EPS, WindowKind::Prolate, dim).unwrap();
    params.n_s = 24;
    DmkPlan::with_params(kernel, dim, EPS, WindowKind::Prolate, mode, params).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sums_are_linear(
        (kernel, dim, sys) in (kernel_strategy(), 2usize..4)
            .prop_flat_map(|(k, d)| (Just(k), Just(d), system(k, d, 150, 300))),
        a in -2.0f64..2.0,
    ) {
        // the stresslet is bilinear in (f, n), so only f varies there
        let ar = strength_len(kernel, dim);
        let fixed = |i: usize| kernel == Kernel::Stresslet && i % ar >= dim;
        let s0 = &sys.strengths;
        let other: Vec<f64> = (0..s0.len()).map(|i| if fixed(i) { s0[i] } else { s0[s0.len() - 1 - i] }).collect();
        let combo: Vec<f64> = (0..s0.len()).map(|i| if fixed(i) { s0[i] } else { a * s0[i] + other[i] }).collect();
        let p = plan(kernel, dim, Mode::Free);
        let u = p.evaluate(&sys).unwrap().potentials;
        let v = p.evaluate(&sys.with_strengths(other).unwrap()).unwrap().potentials;
        let w = p.evaluate(&sys.with_strengths(combo).unwrap()).unwrap().potentials;
        let lin: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + y).collect();
        let e = relative_l2(&w, &lin);
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(e < 1e-12, "{e:e} |u| {:e} |v| {:e} |w| {:e} a {a}", norm(&u), norm(&v), norm(&w));
    }

    #[test]
    fn free_sums_match_direct(kernel in kernel_strategy(), sys in system(Kernel::Stokeslet, 3, 200, 400)) {
        // strengths are regenerated for the kernel's arity
        let n = sys.n_sources();
        let s: Vec<f64> = (0..n * strength_len(kernel, 3)).map(|i| ((i * 7919) % 13) as f64 / 13.0 - 0.5).collect();
        let sys = sys.with_strengths(s).unwrap();
        let u = plan(kernel, 3, Mode::Free).evaluate(&sys).unwrap().potentials;
        let e = relative_l2(&u, &direct_sum(kernel, &sys).unwrap());
        // small leaves add a level of window truncation per level
        prop_assert!(e < 5.0 * EPS, "{e:e}");
    }

    #[test]
    fn point_order_does_not_matter(sys in system(Kernel::Stokeslet, 3, 100, 250), rot in 1usize..50) {
        let n = sys.n_sources();
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let mut x = Vec::new();
        let mut s = Vec::new();
        for &i in &perm {
            x.extend_from_slice(sys.source(i));
            s.extend_from_slice(sys.strength(i));
        }
        let shuffled = ParticleSystem::new(3, x, None, s).unwrap();
        let p = plan(Kernel::Stokeslet, 3, Mode::Free);
        let u = p.evaluate(&sys).unwrap().potentials;
        let v = p.evaluate(&shuffled).unwrap().potentials;
        for (k, &i) in perm.iter().enumerate() {
            for j in 0..3 {
                prop_assert!((v[3 * k + j] - u[3 * i + j]).abs() <= 1e-12 * u[3 * i + j].abs().max(1.0));
            }
        }
    }

    #[test]
    fn periodic_sums_respect_the_lattice(
        kernel in kernel_strategy(),
        sys in system(Kernel::Stokeslet, 3, 100, 200),
        shift in prop::array::uniform3(-0.5f64..0.5),
    ) {
        let n = sys.n_sources();
        let s: Vec<f64> = (0..n * strength_len(kernel, 3)).map(|i| ((i * 104729) % 17) as f64 / 17.0 - 0.5).collect();
        let sys = sys.with_strengths(s).unwrap();
        let p = plan(kernel, 3, Mode::Periodic);
        let u = p.evaluate(&sys).unwrap().potentials;

        // integer lattice vectors change nothing
        let mut moved = sys.sources.clone();
        for (i, v) in moved.iter_mut().enumerate() {
            *v += [1.0, -1.0, 2.0][i % 3];
        }
        let lattice = ParticleSystem::new_periodic(3, moved, None, sys.strengths.clone()).unwrap();
        let e = relative_l2(&p.evaluate(&lattice).unwrap().potentials, &u);
        prop_assert!(e < 1e-10, "lattice {e:e}");

        // A rigid translation changes the tree but not the oscillatory part.
        // The stresslet zero mode depends on unwrapped separations, so it is
        // taken out on both sides.
        let moved = sys.translated(&shift);
        let v = p.evaluate(&moved).unwrap().potentials;
        let e = relative_l2(&without_zero_mode(kernel, &moved, v), &without_zero_mode(kernel, &sys, u));
        prop_assert!(e < 4.0 * EPS, "{e:e}");
    }
}

/// Removes `-sum_a (x_b - x_a)(f_a . n_a)` from periodic stresslet output.
fn without_zero_mode(kernel: Kernel, sys: &ParticleSystem, mut u: Vec<f64>) -> Vec<f64> {
    if kernel != Kernel::Stresslet {
        return u;
    }
    let d = sys.dim;
    for b in 0..sys.n_targets() {
        for a in 0..sys.n_sources() {
            let s = sys.strength(a);
            let fn_: f64 = (0..d).map(|j| s[j] * s[d + j]).sum();
            for j in 0..d {
                u[b * d + j] += (sys.target(b)[j] - sys.source(a)[j]) * fn_;
            }
        }
    }
    u
}

#[test]
fn periodic_sums_match_the_ewald_reference_in_2d() {
    let n = 400;
    let x: Vec<f64> = (0..2 * n).map(|i| ((i as f64 * 0.618_033_988_7) % 1.0) - 0.5).collect();
    let s: Vec<f64> = (0..2 * n).map(|i| ((i * 31) % 11) as f64 / 11.0 - 0.5).collect();
    let sys = ParticleSystem::new(2, x, None, s).unwrap();
    let p = plan(Kernel::Stokeslet, 2, Mode::Periodic);
    let grid = EwaldGrid::for_split(&p.split, Mode::Periodic);
    let reference = ewald_reference(&p.split, &sys, Mode::Periodic, &grid).unwrap();
    assert!(relative_l2(&p.evaluate(&sys).unwrap().potentials, &reference) < 2.0 * EPS);
}
