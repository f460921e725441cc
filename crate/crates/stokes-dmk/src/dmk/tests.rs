use super::*;
use crate::oracle::{direct_sum, ewald_reference, relative_l2, EwaldGrid};
use crate::split::strength_len;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_system(kernel: Kernel, dim: usize, n: usize, seed: u64) -> ParticleSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<f64> = (0..n * dim).map(|_| rng.random_range(-0.5..0.5)).collect();
    let s: Vec<f64> = (0..n * strength_len(kernel, dim)).map(|_| rng.random_range(-0.5..0.5)).collect();
    ParticleSystem::new(dim, pts, None, s).unwrap()
}

fn plan_with_leaf(kernel: Kernel, dim: usize, eps: f64, mode: Mode, n_s: usize) -> DmkPlan {
    let mut params = select_parameters(kernel, eps, WindowKind::Prolate, dim).unwrap();
    params.n_s = n_s;
    DmkPlan::with_params(kernel, dim, eps, WindowKind::Prolate, mode, params).unwrap()
}

const KERNELS: [Kernel; 3] = [Kernel::Stokeslet, Kernel::Stresslet, Kernel::Rotlet];

/// Leaf capacities far below the table's add levels, and each level adds
/// its share of the window truncation error.
const DEEP_TREE_SLACK: f64 = 3.0;

#[test]
fn two_points_match_direct_sum() {
    for dim in [2, 3] {
        for kernel in KERNELS {
            let sys = random_system(kernel, dim, 2, 1);
            let plan = DmkPlan::new(kernel, dim, 1e-6, WindowKind::Prolate, Mode::Free).unwrap();
            let out = plan.evaluate(&sys).unwrap();
            assert_eq!(out.levels, 1);
            let e = relative_l2(&out.potentials, &direct_sum(kernel, &sys).unwrap());
            // a single separation is a pointwise error, not an aggregate over many pairs
            assert!(e < 2e-6, "{kernel:?} {dim}D: {e:e}");
        }
    }
}

#[test]
fn multilevel_trees_match_direct_sum() {
    for dim in [2, 3] {
        for kernel in KERNELS {
            let sys = random_system(kernel, dim, 1500, 2);
            let plan = plan_with_leaf(kernel, dim, 1e-6, Mode::Free, 20);
            let out = plan.evaluate(&sys).unwrap();
            assert!(out.levels >= 3, "{}", out.levels);
            let e = relative_l2(&out.potentials, &direct_sum(kernel, &sys).unwrap());
            assert!(e < DEEP_TREE_SLACK * 1e-6, "{kernel:?} {dim}D: {e:e}");
        }
    }
}

#[test]
fn adaptive_tree_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 1200;
    let mut pts = Vec::new();
    for i in 0..n {
        for _ in 0..3 {
            let x: f64 = if i % 2 == 0 { rng.random_range(-0.5..0.5) } else { -0.5 + rng.random_range(0.0..0.03) };
            pts.push(x);
        }
    }
    let s: Vec<f64> = (0..n * 3).map(|_| rng.random_range(-0.5..0.5)).collect();
    let sys = ParticleSystem::new(3, pts, None, s).unwrap();
    let plan = plan_with_leaf(Kernel::Stokeslet, 3, 1e-6, Mode::Free, 30);
    let out = plan.evaluate(&sys).unwrap();
    assert!(out.levels >= 5);
    let e = relative_l2(&out.potentials, &direct_sum(Kernel::Stokeslet, &sys).unwrap());
    assert!(e < 1e-6, "{e:e}");
}

#[test]
fn separate_targets_match_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let base = random_system(Kernel::Stresslet, 3, 800, 5);
    let targets: Vec<f64> = (0..300 * 3).map(|_| rng.random_range(-0.5..0.5)).collect();
    let sys = ParticleSystem::new(3, base.sources.clone(), Some(targets), base.strengths.clone()).unwrap();
    let plan = plan_with_leaf(Kernel::Stresslet, 3, 1e-6, Mode::Free, 25);
    let out = plan.evaluate(&sys).unwrap();
    let e = relative_l2(&out.potentials, &direct_sum(Kernel::Stresslet, &sys).unwrap());
    assert!(e < 1e-6, "{e:e}");
}

#[test]
fn periodic_matches_ewald_reference() {
    for kernel in KERNELS {
        let sys = random_system(kernel, 3, 400, 6);
        let plan = plan_with_leaf(kernel, 3, 1e-6, Mode::Periodic, 20);
        let out = plan.evaluate(&sys).unwrap();
        let grid = EwaldGrid::for_split(&plan.split, Mode::Periodic);
        let reference = ewald_reference(&plan.split, &sys, Mode::Periodic, &grid).unwrap();
        let e = relative_l2(&out.potentials, &reference);
        assert!(e < DEEP_TREE_SLACK * 1e-6, "{kernel:?}: {e:e}");
    }
}

#[test]
fn periodic_two_dimensional_stokeslet_matches_reference() {
    let sys = random_system(Kernel::Stokeslet, 2, 500, 7);
    let plan = plan_with_leaf(Kernel::Stokeslet, 2, 1e-6, Mode::Periodic, 15);
    let out = plan.evaluate(&sys).unwrap();
    let grid = EwaldGrid::for_split(&plan.split, Mode::Periodic);
    let reference = ewald_reference(&plan.split, &sys, Mode::Periodic, &grid).unwrap();
    assert!(relative_l2(&out.potentials, &reference) < 2e-6);
}

#[test]
fn periodic_two_dimensional_stresslet_is_rejected() {
    let r = DmkPlan::new(Kernel::Stresslet, 2, 1e-6, WindowKind::Prolate, Mode::Periodic);
    assert!(matches!(r, Err(Error::Unsupported(_))));
}

#[test]
fn evaluation_is_linear_in_strengths() {
    let a = random_system(Kernel::Rotlet, 3, 600, 8);
    let b = random_system(Kernel::Rotlet, 3, 600, 9);
    let b = a.with_strengths(b.strengths).unwrap();
    let sum: Vec<f64> = a.strengths.iter().zip(&b.strengths).map(|(x, y)| x + y).collect();
    let ab = a.with_strengths(sum).unwrap();
    let plan = plan_with_leaf(Kernel::Rotlet, 3, 1e-6, Mode::Free, 30);
    let ua = plan.evaluate(&a).unwrap().potentials;
    let ub = plan.evaluate(&b).unwrap().potentials;
    let uab = plan.evaluate(&ab).unwrap().potentials;
    let lin: Vec<f64> = ua.iter().zip(&ub).map(|(x, y)| x + y).collect();
    assert!(relative_l2(&uab, &lin) < 1e-12);
}

#[test]
fn permuting_points_permutes_outputs() {
    let sys = random_system(Kernel::Stokeslet, 3, 500, 10);
    let n = sys.n_sources();
    let perm: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
    let mut pts = Vec::new();
    let mut s = Vec::new();
    for &i in &perm {
        pts.extend_from_slice(sys.source(i));
        s.extend_from_slice(sys.strength(i));
    }
    let permuted = ParticleSystem::new(3, pts, None, s).unwrap();
    let plan = plan_with_leaf(Kernel::Stokeslet, 3, 1e-6, Mode::Free, 25);
    let u = plan.evaluate(&sys).unwrap().potentials;
    let up = plan.evaluate(&permuted).unwrap().potentials;
    for (k, &i) in perm.iter().enumerate() {
        for j in 0..3 {
            assert!((up[k * 3 + j] - u[i * 3 + j]).abs() <= 1e-12 * u[i * 3 + j].abs().max(1.0));
        }
    }
}

#[test]
fn leaf_capacity_barely_changes_answers() {
    let sys = random_system(Kernel::Stokeslet, 3, 1000, 11);
    let fine = plan_with_leaf(Kernel::Stokeslet, 3, 1e-6, Mode::Free, 15).evaluate(&sys).unwrap();
    let coarse = plan_with_leaf(Kernel::Stokeslet, 3, 1e-6, Mode::Free, 400).evaluate(&sys).unwrap();
    assert!(fine.levels > coarse.levels);
    assert!(relative_l2(&fine.potentials, &coarse.potentials) < 2e-6);
}

#[test]
fn zero_strengths_give_zero_field() {
    let sys = random_system(Kernel::Stresslet, 3, 300, 12);
    let zero = sys.with_strengths(vec![0.0; sys.strengths.len()]).unwrap();
    let u = evaluate(Kernel::Stresslet, &zero, 1e-3, WindowKind::Prolate, Mode::Free).unwrap();
    assert!(u.iter().all(|&v| v == 0.0));
}

#[test]
fn coincident_points_are_reported() {
    let sys = ParticleSystem::new(3, vec![0.1, 0.1, 0.1, 0.1, 0.1, 0.1], None, vec![1.0; 6]).unwrap();
    let r = evaluate(Kernel::Stokeslet, &sys, 1e-6, WindowKind::Prolate, Mode::Free);
    assert!(matches!(r, Err(Error::SingularConfiguration { .. })));
}

#[test]
fn gaussian_and_prolate_plans_agree() {
    let sys = random_system(Kernel::Stokeslet, 3, 800, 13);
    let mut gp = select_parameters(Kernel::Stokeslet, 1e-6, WindowKind::Gaussian, 3).unwrap();
    gp.n_s = 40;
    let g = DmkPlan::with_params(Kernel::Stokeslet, 3, 1e-6, WindowKind::Gaussian, Mode::Free, gp).unwrap();
    let p = plan_with_leaf(Kernel::Stokeslet, 3, 1e-6, Mode::Free, 40);
    let ug = g.evaluate(&sys).unwrap().potentials;
    let up = p.evaluate(&sys).unwrap().potentials;
    assert!(relative_l2(&ug, &up) < 3e-6);
}

#[test]
fn child_bits_follow_morton_order() {
    assert_eq!(child_bits(3, 0b101), [1, 0, 1]);
    assert_eq!(child_bits(2, 0b10), [1, 0, 0]);
}

#[test]
fn summary_reports_table_values() {
    let plan = DmkPlan::new(Kernel::Stokeslet, 3, 1e-6, WindowKind::Prolate, Mode::Periodic).unwrap();
    let s = plan.summary();
    assert_eq!((s.t, s.p, s.n1, s.n_per, s.n_s), (17, 23, 33, 5, 1200));
    assert_eq!(s.root_modes, 5);
}
