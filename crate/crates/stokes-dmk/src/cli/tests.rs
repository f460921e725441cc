use super::*;

#[test]
fn uniform_points_are_in_the_box_and_reproducible() {
    let a = generate_points(Generator::UniformCube, 5000, 3, 7);
    assert!(a.iter().all(|v| (-0.5..=0.5).contains(v)));
    assert_eq!(a, generate_points(Generator::UniformCube, 5000, 3, 7));
    assert_ne!(a, generate_points(Generator::UniformCube, 5000, 3, 8));
}

#[test]
fn perturbed_shell_radii() {
    for dim in [2, 3] {
        let pts = generate_points(Generator::PerturbedSphere, 1000, dim, 1);
        for x in pts.chunks(dim) {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((0.3 - 1e-12..=0.4 + 1e-12).contains(&r), "{r}");
        }
    }
}

#[test]
fn corner_cluster_stays_in_its_ball() {
    for dim in [2, 3] {
        let pts = generate_points(Generator::CornerCluster, 100, dim, 2);
        for x in pts.chunks(dim) {
            let r = x.iter().map(|v| (v + 0.5 - CLUSTER_RADIUS).powi(2)).sum::<f64>().sqrt();
            assert!(r <= CLUSTER_RADIUS);
        }
    }
}

#[test]
fn stresslet_normals_are_unit() {
    let s = generate_strengths(Kernel::Stresslet, 50, 3, 3);
    for q in s.chunks(6) {
        let n: f64 = q[3..].iter().map(|v| v * v).sum();
        assert!((n - 1.0).abs() < 1e-14);
        assert!(q[..3].iter().all(|v| (-0.5..0.5).contains(v)));
    }
}

#[test]
fn target_count_does_not_change_sources() {
    let a = ExperimentConfig { n_sources: 100, ..Default::default() }.system().unwrap();
    let b = ExperimentConfig { n_sources: 100, n_targets: Some(30), ..Default::default() }.system().unwrap();
    assert_eq!(a.sources, b.sources);
    assert_eq!(a.strengths, b.strengths);
    assert_eq!(b.n_targets(), 30);
}

#[test]
fn accuracy_run_meets_tolerance_and_reports_each_pass() {
    let cfg = ExperimentConfig { n_sources: 800, eps: 1e-3, ..Default::default() };
    let r = run_accuracy(&cfg).unwrap();
    assert!(r.passed, "{}", r.rel_l2);
    let passes: Vec<&str> = r.report.rows.iter().map(|x| x.pass.as_str()).collect();
    assert_eq!(passes, ["tree", "upward", "root", "downward", "residual", "total"]);
    let mut buf = Vec::new();
    r.report.write_to(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("# stokes-dmk"));
    assert!(text.contains("kernel,dim,mode,window,eps,N,pass,seconds,rel_l2,c,p,N1,N_per,n_s"));
}

#[test]
fn zero_strengths_give_zero_error() {
    let cfg = ExperimentConfig { n_sources: 200, ..Default::default() };
    let sys = cfg.system().unwrap();
    let zero = sys.with_strengths(vec![0.0; sys.strengths.len()]).unwrap();
    let plan = cfg.plan().unwrap();
    let out = plan.evaluate(&zero).unwrap();
    assert!(out.potentials.iter().all(|&v| v == 0.0));
    assert_eq!(relative_l2(&out.potentials, &direct_sum(cfg.kernel, &zero).unwrap()), 0.0);
}

#[test]
fn oracle_guards() {
    let big = ExperimentConfig { n_sources: ACCURACY_MAX_N + 1, ..Default::default() };
    assert!(run_accuracy(&big).is_err());
    let sweep = ExperimentConfig { n_sources: SWEEP_MAX_N + 1, ..Default::default() };
    assert!(run_sweep(&sweep, &[10], &[12]).is_err());
    assert!(run_scaling(&ExperimentConfig::default(), &[200, 100]).is_err());
}

#[test]
fn single_scaling_point_has_one_row_per_pass() {
    let cfg = ExperimentConfig { n_sources: 300, eps: 1e-3, ..Default::default() };
    let r = run_scaling(&cfg, &[300]).unwrap();
    assert_eq!(r.report.rows.len(), 6);
    assert!(r.report.rows.iter().all(|x| x.rel_l2.is_none()));
}

#[test]
fn sweep_frontier_picks_the_minimum() {
    let cfg = ExperimentConfig { n_sources: 300, dim: 2, eps: 1e-3, ..Default::default() };
    let r = run_sweep(&cfg, &[6, 10], &[8, 12]).unwrap();
    assert_eq!(r.points.len(), 4);
    for f in &r.frontier {
        assert!(r.points.iter().filter(|s| s.p == f.p).all(|s| s.rel_l2 >= f.rel_l2));
    }
}

#[test]
fn lists_and_names_parse() {
    assert_eq!(parse_list::<usize>("1e5, 200000,4e5").unwrap(), vec![100_000, 200_000, 400_000]);
    assert!(parse_list::<usize>("abc").is_err());
    assert_eq!("perturbed-circle".parse::<Generator>().unwrap(), Generator::PerturbedSphere);
    assert_eq!(Generator::CornerCluster.to_string().parse::<Generator>().unwrap(), Generator::CornerCluster);
}
