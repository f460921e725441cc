//! Table-driven parameters for every kernel, window and tolerance, with
//! the prolate to Gaussian mode-count ratio.

use stokes_dmk::dmk::select_parameters;
use stokes_dmk::windows::WindowKind;
use stokes_dmk::Kernel;

fn main() -> stokes_dmk::Result<()> {
    println!("{:<9} {:>6} | {:>3} {:>3} {:>3} {:>5} | {:>3} {:>3} {:>3} {:>5} | N1 ratio", "kernel", "eps", "T", "p", "N1", "N_per", "T", "p", "N1", "N_per");
    for kernel in [Kernel::Stokeslet, Kernel::Stresslet, Kernel::Rotlet] {
        for eps in [1e-3, 1e-6, 1e-9, 1e-12] {
            let a = select_parameters(kernel, eps, WindowKind::Prolate, 3)?;
            let b = select_parameters(kernel, eps, WindowKind::Gaussian, 3)?;
            println!(
                "{:<9} {eps:>6.0e} | {:>3} {:>3} {:>3} {:>5} | {:>3} {:>3} {:>3} {:>5} | {:.3}",
                kernel.name(),
                a.t,
                a.p,
                a.n1,
                a.n_per,
                b.t,
                b.p,
                b.n1,
                b.n_per,
                a.n1 as f64 / b.n1 as f64
            );
        }
    }
    let between = select_parameters(Kernel::Stokeslet, 1e-7, WindowKind::Prolate, 3)?;
    println!("\nStokeslet at 1e-7 from the fitted lines: {between:?}");
    Ok(())
}
