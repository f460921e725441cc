//! Wall time per pass as N doubles, written as CSV to standard output.

use stokes_dmk::cli::{run_scaling, ExperimentConfig, Generator};

fn main() -> stokes_dmk::Result<()> {
    let cfg = ExperimentConfig { eps: 1e-3, generator: Generator::PerturbedSphere, ..Default::default() };
    let r = run_scaling(&cfg, &[12_500, 25_000, 50_000])?;
    r.report.write(None)?;
    for w in r.points.windows(2) {
        eprintln!("N {} -> {}: time ratio {:.2}", w[0].n, w[1].n, w[1].timings.total() / w[0].timings.total());
    }
    Ok(())
}
