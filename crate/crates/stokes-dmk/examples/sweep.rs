//! Error surface over the window parameter and the proxy order, with the
//! per-order frontier.

use stokes_dmk::cli::{run_sweep, ExperimentConfig};

fn main() -> stokes_dmk::Result<()> {
    let cfg = ExperimentConfig { n_sources: 2000, eps: 1e-6, ..Default::default() };
    let r = run_sweep(&cfg, &[11, 14, 17, 20], &[12, 16, 23])?;
    for s in &r.points {
        println!("T={:>2} p={:>2} error {:.2e}", s.t, s.p, s.rel_l2);
    }
    for f in &r.frontier {
        println!("best for p={:>2}: T={} ({:.2e})", f.p, f.t, f.rel_l2);
    }
    Ok(())
}
