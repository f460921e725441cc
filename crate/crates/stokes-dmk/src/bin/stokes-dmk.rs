use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use stokes_dmk::cli::{parse_list, run_accuracy, run_scaling, run_sweep, ExperimentConfig, Generator};
use stokes_dmk::windows::WindowKind;
use stokes_dmk::{Kernel, Mode};

/// Fast Stokes kernel sums: accuracy checks, scaling runs and parameter sweeps.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// stokeslet, stresslet or rotlet
    #[arg(long, default_value = "stokeslet")]
    kernel: Kernel,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// free or periodic
    #[arg(long, default_value = "free")]
    mode: Mode,
    /// prolate or gaussian
    #[arg(long, default_value = "prolate")]
    window: WindowKind,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Number of sources
    #[arg(long, default_value_t = 5000)]
    n: usize,
    /// Number of separate targets (default: targets are the sources)
    #[arg(long)]
    targets: Option<usize>,
    /// uniform-cube, perturbed-sphere (perturbed-circle) or corner-cluster
    #[arg(long = "gen", default_value = "uniform-cube")]
    generator: Generator,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// CSV output path (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameter sweep as `T1,T2,...:p1,p2,...`
    #[arg(long, conflicts_with = "scaling")]
    sweep: Option<String>,
    /// Scaling run over ascending source counts, e.g. `1e5,2e5,4e5`
    #[arg(long)]
    scaling: Option<String>,
}

fn run(args: Args) -> stokes_dmk::Result<bool> {
    let cfg = ExperimentConfig {
        kernel: args.kernel,
        dim: args.dim,
        mode: args.mode,
        window: args.window,
        eps: args.eps,
        n_sources: args.n,
        n_targets: args.targets,
        generator: args.generator,
        seed: args.seed,
        repetitions: args.reps,
        out: args.out.clone(),
    };
    let out = cfg.out.as_deref();
    if let Some(spec) = &args.sweep {
        let (ts, ps) = spec
            .split_once(':')
            .ok_or_else(|| stokes_dmk::Error::InvalidArgument("--sweep expects T-list:p-list".into()))?;
        let r = run_sweep(&cfg, &parse_list(ts)?, &parse_list(ps)?)?;
        r.report.write(out)?;
        return Ok(true);
    }
    if let Some(list) = &args.scaling {
        let r = run_scaling(&cfg, &parse_list(list)?)?;
        r.report.write(out)?;
        return Ok(true);
    }
    let r = run_accuracy(&cfg)?;
    r.report.write(out)?;
    if !r.passed {
        eprintln!("relative l2 error {:.3e} exceeds eps {:.1e}", r.rel_l2, cfg.eps);
    }
    Ok(r.passed)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
