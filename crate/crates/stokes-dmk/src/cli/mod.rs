//! Experiment harness: point generators, accuracy, scaling and parameter
//! sweeps, and CSV reports.
//!
//! Every report starts with `#` comment lines echoing the library version,
//! the configuration and the resolved plan, followed by a CSV table with
//! one row per (configuration, pass).
//!
//! Random streams come from ChaCha8 seeded with the configuration seed.
//! Stream 0 draws source points, stream 1 target points and stream 2
//! strengths, so changing `N_targets` never perturbs the sources.

use crate::dmk::{DmkParams, DmkPlan, PlanSummary, Timings};
use crate::error::{Error, Result};
use crate::oracle::{direct_sum, ewald_reference, relative_l2, EwaldGrid, Mode, ParticleSystem};
use crate::split::{strength_len, Kernel};
use crate::windows::WindowKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest source count accepted by the accuracy run (direct-sum oracle).
pub const ACCURACY_MAX_N: usize = 50_000;
/// Largest source count accepted by a parameter sweep.
pub const SWEEP_MAX_N: usize = 20_000;

/// Radius of the corner cluster ball.
pub const CLUSTER_RADIUS: f64 = 1.0 / 32.0;
/// Mean radius and jitter half-width of the perturbed shell.
pub const SHELL_RADIUS: f64 = 0.35;
pub const SHELL_JITTER: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    UniformCube,
    /// Perturbed circle in 2D, perturbed sphere in 3D.
    PerturbedSphere,
    CornerCluster,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::UniformCube => "uniform-cube",
            Generator::PerturbedSphere => "perturbed-sphere",
            Generator::CornerCluster => "corner-cluster",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform-cube" | "uniform" => Ok(Generator::UniformCube),
            "perturbed-sphere" | "perturbed-circle" | "sphere" | "circle" => Ok(Generator::PerturbedSphere),
            "corner-cluster" | "cluster" => Ok(Generator::CornerCluster),
            _ => Err(Error::InvalidArgument(format!("unknown generator '{s}'"))),
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn fill_points(rng: &mut ChaCha8Rng, generator: Generator, n: usize, dim: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n * dim);
    for _ in 0..n {
        match generator {
            Generator::UniformCube => {
                for _ in 0..dim {
                    out.push(rng.random_range(-0.5..0.5));
                }
            }
            Generator::PerturbedSphere => {
                let r = SHELL_RADIUS + rng.random_range(-SHELL_JITTER..=SHELL_JITTER);
                let phi = rng.random_range(0.0..2.0 * PI);
                if dim == 2 {
                    out.extend_from_slice(&[r * phi.cos(), r * phi.sin()]);
                } else {
                    let z: f64 = rng.random_range(-1.0..=1.0);
                    let s = (1.0 - z * z).sqrt();
                    out.extend_from_slice(&[r * s * phi.cos(), r * s * phi.sin(), r * z]);
                }
            }
            Generator::CornerCluster => {
                let c = -0.5 + CLUSTER_RADIUS;
                let mut y = [0.0; 3];
                loop {
                    let mut r2 = 0.0;
                    for v in y.iter_mut().take(dim) {
                        *v = rng.random_range(-1.0..1.0);
                        r2 += *v * *v;
                    }
                    if r2 < 1.0 {
                        break;
                    }
                }
                out.extend(y[..dim].iter().map(|v| c + CLUSTER_RADIUS * v));
            }
        }
    }
    out
}

/// `n` points in the unit box, deterministic in `seed`.
pub fn generate_points(generator: Generator, n: usize, dim: usize, seed: u64) -> Vec<f64> {
    fill_points(&mut stream(seed, 0), generator, n, dim)
}

/// I.i.d. uniform forces in `[-1/2, 1/2]^d`; stresslets append a unit normal.
pub fn generate_strengths(kernel: Kernel, n: usize, dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, 2);
    let arity = strength_len(kernel, dim);
    let mut out = Vec::with_capacity(n * arity);
    for _ in 0..n {
        let start = out.len();
        for _ in 0..arity {
            out.push(rng.random_range(-0.5..0.5));
        }
        if kernel == Kernel::Stresslet {
            let nv = &mut out[start + dim..start + 2 * dim];
            let norm = nv.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                nv.iter_mut().for_each(|v| *v /= norm);
            } else {
                nv[0] = 1.0;
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub kernel: Kernel,
    pub dim: usize,
    pub mode: Mode,
    pub window: WindowKind,
    pub eps: f64,
    pub n_sources: usize,
    /// Separate targets drawn from the same generator; `None` aliases sources.
    pub n_targets: Option<usize>,
    pub generator: Generator,
    pub seed: u64,
    pub repetitions: usize,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kernel: Kernel::Stokeslet,
            dim: 3,
            mode: Mode::Free,
            window: WindowKind::Prolate,
            eps: 1e-6,
            n_sources: 5000,
            n_targets: None,
            generator: Generator::UniformCube,
            seed: 0,
            repetitions: 1,
            out: None,
        }
    }
}

impl ExperimentConfig {
    fn check(&self) -> Result<()> {
        if self.n_sources == 0 || self.n_targets == Some(0) {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
        }
        Ok(())
    }

    /// The particle system this configuration describes.
    pub fn system(&self) -> Result<ParticleSystem> {
        self.check()?;
        let sources = generate_points(self.generator, self.n_sources, self.dim, self.seed);
        let targets = self.n_targets.map(|m| fill_points(&mut stream(self.seed, 1), self.generator, m, self.dim));
        let strengths = generate_strengths(self.kernel, self.n_sources, self.dim, self.seed);
        match self.mode {
            Mode::Free => ParticleSystem::new(self.dim, sources, targets, strengths),
            Mode::Periodic => ParticleSystem::new_periodic(self.dim, sources, targets, strengths),
        }
    }

    pub fn plan(&self) -> Result<DmkPlan> {
        DmkPlan::new(self.kernel, self.dim, self.eps, self.window, self.mode)
    }

    fn echo(&self) -> String {
        format!(
            "# config kernel={} dim={} mode={} window={} eps={:e} N={} targets={} generator={} seed={} repetitions={}",
            self.kernel.name(),
            self.dim,
            self.mode,
            self.window,
            self.eps,
            self.n_sources,
            self.n_targets.map_or("aliased".to_string(), |m| m.to_string()),
            self.generator,
            self.seed,
            self.repetitions
        )
    }
}

/// One CSV row.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub kernel: &'static str,
    pub dim: usize,
    pub mode: &'static str,
    pub window: &'static str,
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub pass: String,
    pub seconds: Option<f64>,
    pub rel_l2: Option<f64>,
    /// Prolate `c`, or Gaussian `sigma`.
    pub c: f64,
    pub p: usize,
    #[serde(rename = "N1")]
    pub n1: usize,
    #[serde(rename = "N_per")]
    pub n_per: usize,
    pub n_s: usize,
}

#[derive(Clone, Debug)]
pub struct Report {
    /// `#`-prefixed lines written before the table.
    pub header: Vec<String>,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for line in &self.header {
            writeln!(w, "{line}")?;
        }
        let mut csv = csv::Writer::from_writer(w);
        for row in &self.rows {
            csv.serialize(row)?;
        }
        csv.flush()?;
        Ok(())
    }

    /// Writes to `path`, or to standard output when `None`.
    pub fn write(&self, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => self.write_to(std::fs::File::create(p)?),
            None => self.write_to(std::io::stdout().lock()),
        }
    }
}

fn plan_line(s: &PlanSummary, levels: Option<usize>) -> String {
    let mut line = format!(
        "# plan t={} window_param={} p={} N1={} N_per={} n_s={} root_modes={}",
        s.t, s.window_param, s.p, s.n1, s.n_per, s.n_s, s.root_modes
    );
    if let Some(l) = levels {
        line.push_str(&format!(" levels={l}"));
    }
    line
}

fn row(cfg: &ExperimentConfig, params: &DmkParams, n: usize, pass: &str, seconds: Option<f64>, rel_l2: Option<f64>) -> Row {
    Row {
        kernel: cfg.kernel.name(),
        dim: cfg.dim,
        mode: cfg.mode.name(),
        window: cfg.window.name(),
        eps: cfg.eps,
        n,
        pass: pass.to_string(),
        seconds,
        rel_l2,
        c: params.window_param,
        p: params.p,
        n1: params.n1,
        n_per: params.n_per,
        n_s: params.n_s,
    }
}

fn timing_rows(cfg: &ExperimentConfig, params: &DmkParams, n: usize, t: &Timings, rel_l2: Option<f64>) -> Vec<Row> {
    let mut rows: Vec<Row> = t.passes().iter().map(|(name, s)| row(cfg, params, n, name, Some(*s), rel_l2)).collect();
    rows.push(row(cfg, params, n, "total", Some(t.total()), rel_l2));
    rows
}

/// Evaluates `repetitions` times and keeps the fastest run.
fn timed_runs(plan: &DmkPlan, sys: &ParticleSystem, reps: usize) -> Result<crate::dmk::DmkOutput> {
    let mut best = plan.evaluate(sys)?;
    for _ in 1..reps {
        let out = plan.evaluate(sys)?;
        if out.timings.total() < best.timings.total() {
            best = out;
        }
    }
    Ok(best)
}

fn reference(plan: &DmkPlan, sys: &ParticleSystem) -> Result<Vec<f64>> {
    match plan.mode {
        Mode::Free => direct_sum(plan.kernel, sys),
        Mode::Periodic => ewald_reference(&plan.split, sys, Mode::Periodic, &EwaldGrid::for_split(&plan.split, Mode::Periodic)),
    }
}

#[derive(Clone, Debug)]
pub struct AccuracyReport {
    pub report: Report,
    pub rel_l2: f64,
    pub levels: usize,
    pub timings: Timings,
    /// `rel_l2 <= eps`.
    pub passed: bool,
}

/// DMK against the direct sum (free) or the Ewald reference (periodic).
pub fn run_accuracy(cfg: &ExperimentConfig) -> Result<AccuracyReport> {
    if cfg.n_sources > ACCURACY_MAX_N {
        return Err(Error::InvalidArgument(format!("accuracy runs need N <= {ACCURACY_MAX_N} for the direct oracle")));
    }
    let sys = cfg.system()?;
    let plan = cfg.plan()?;
    let out = timed_runs(&plan, &sys, cfg.repetitions)?;
    let rel_l2 = relative_l2(&out.potentials, &reference(&plan, &sys)?);
    let rows = timing_rows(cfg, &plan.params, cfg.n_sources, &out.timings, Some(rel_l2));
    let header = vec![format!("# stokes-dmk {VERSION} accuracy"), cfg.echo(), plan_line(&plan.summary(), Some(out.levels))];
    Ok(AccuracyReport {
        report: Report { header, rows },
        rel_l2,
        levels: out.levels,
        timings: out.timings,
        passed: rel_l2 <= cfg.eps,
    })
}

/// One point of a scaling run.
#[derive(Clone, Copy, Debug)]
pub struct ScalingPoint {
    pub n: usize,
    pub levels: usize,
    pub timings: Timings,
}

impl ScalingPoint {
    pub fn throughput(&self) -> f64 {
        self.n as f64 / self.timings.total()
    }
}

#[derive(Clone, Debug)]
pub struct ScalingReport {
    pub report: Report,
    pub points: Vec<ScalingPoint>,
}

/// Wall times per pass for each `N` in `n_list` (ascending).
pub fn run_scaling(cfg: &ExperimentConfig, n_list: &[usize]) -> Result<ScalingReport> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("N list must be non-empty and strictly ascending".into()));
    }
    let plan = cfg.plan()?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &n in n_list {
        let c = ExperimentConfig { n_sources: n, ..cfg.clone() };
        let sys = c.system()?;
        let out = timed_runs(&plan, &sys, cfg.repetitions)?;
        rows.extend(timing_rows(&c, &plan.params, n, &out.timings, None));
        points.push(ScalingPoint { n, levels: out.levels, timings: out.timings });
    }
    let header = vec![
        format!("# stokes-dmk {VERSION} scaling"),
        cfg.echo(),
        format!("# scaling N={n_list:?}"),
        plan_line(&plan.summary(), None),
    ];
    Ok(ScalingReport { report: Report { header, rows }, points })
}

/// One `(T, p)` sample of a sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepPoint {
    pub t: u32,
    pub p: usize,
    pub rel_l2: f64,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub report: Report,
    pub points: Vec<SweepPoint>,
    /// Smallest error over `T` for each `p`.
    pub frontier: Vec<SweepPoint>,
}

/// Error surface over `T` (`3c/pi` or `6/(pi sigma^2)`) and `p`. The leaf
/// capacity comes from the table for `cfg.eps`.
pub fn run_sweep(cfg: &ExperimentConfig, ts: &[u32], ps: &[usize]) -> Result<SweepReport> {
    if cfg.n_sources > SWEEP_MAX_N {
        return Err(Error::InvalidArgument(format!("sweeps need N <= {SWEEP_MAX_N}")));
    }
    if ts.is_empty() || ps.is_empty() {
        return Err(Error::InvalidArgument("empty sweep grid".into()));
    }
    let sys = cfg.system()?;
    let n_s = crate::dmk::select_parameters(cfg.kernel, cfg.eps, cfg.window, cfg.dim)?.n_s;
    let mut exact: Option<Vec<f64>> = None;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &p in ps {
        for &t in ts {
            let params = DmkParams::from_t(cfg.window, t, p, n_s);
            // residual tables well below any error the sweep can resolve
            let plan = DmkPlan::with_params(cfg.kernel, cfg.dim, 1e-12, cfg.window, cfg.mode, params)?;
            let out = plan.evaluate(&sys)?;
            if exact.is_none() {
                exact = Some(reference(&plan, &sys)?);
            }
            let e = relative_l2(&out.potentials, exact.as_ref().unwrap());
            rows.push(row(cfg, &params, cfg.n_sources, "sweep", Some(out.timings.total()), Some(e)));
            points.push(SweepPoint { t, p, rel_l2: e });
        }
    }
    let mut frontier = Vec::new();
    for &p in ps {
        let best = points.iter().filter(|s| s.p == p).min_by(|a, b| a.rel_l2.total_cmp(&b.rel_l2)).copied().unwrap();
        rows.push(row(cfg, &DmkParams::from_t(cfg.window, best.t, p, n_s), cfg.n_sources, "frontier", None, Some(best.rel_l2)));
        frontier.push(best);
    }
    let header = vec![format!("# stokes-dmk {VERSION} sweep"), cfg.echo(), format!("# sweep T={ts:?} p={ps:?}")];
    Ok(SweepReport { report: Report { header, rows }, points, frontier })
}

/// Parses a comma-separated list.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|v| v.trim())
        .filter(|v| !v.is_empty())
        .map(|v| {
            // accept 1e5 style counts
            v.parse::<T>()
                .or_else(|_| v.parse::<f64>().map_err(|_| ()).and_then(|f| format!("{}", f as u64).parse::<T>().map_err(|_| ())))
                .map_err(|_| Error::InvalidArgument(format!("cannot parse '{v}'")))
        })
        .collect()
}

#[cfg(test)]
mod tests;
