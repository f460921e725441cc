//! Free-space DMK for each Stokes kernel against the direct sum.

use stokes_dmk::cli::ExperimentConfig;
use stokes_dmk::dmk::DmkPlan;
use stokes_dmk::oracle::{direct_sum, relative_l2};
use stokes_dmk::windows::WindowKind;
use stokes_dmk::{Kernel, Mode};

fn main() -> stokes_dmk::Result<()> {
    for kernel in [Kernel::Stokeslet, Kernel::Stresslet, Kernel::Rotlet] {
        let cfg = ExperimentConfig { kernel, n_sources: 5000, ..Default::default() };
        let sys = cfg.system()?;
        let plan = DmkPlan::new(kernel, 3, 1e-6, WindowKind::Prolate, Mode::Free)?;
        let out = plan.evaluate(&sys)?;
        let err = relative_l2(&out.potentials, &direct_sum(kernel, &sys)?);
        let s = plan.summary();
        println!(
            "{:<9} c={:.3} p={} N1={} levels={} error {:.2e} in {:.2}s",
            kernel.name(),
            s.window_param,
            s.p,
            s.n1,
            out.levels,
            err,
            out.timings.total()
        );
    }
    Ok(())
}
