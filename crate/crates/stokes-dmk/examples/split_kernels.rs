//! Residual radial functions of the three Stokes kernels. With a prolate
//! window they vanish beyond unit distance.

use stokes_dmk::split::build_split_kernel;
use stokes_dmk::windows::WindowFunction;
use stokes_dmk::Kernel;

fn main() -> stokes_dmk::Result<()> {
    let window = WindowFunction::prolate(25.0 * std::f64::consts::PI / 3.0)?;
    for kernel in [Kernel::Stokeslet, Kernel::Stresslet, Kernel::Rotlet] {
        let sk = build_split_kernel(kernel, 3, window.clone(), 1e-10)?;
        println!("{} (self coefficient at unit scale {:.6})", kernel.name(), sk.self_coefficient(1.0));
        for r in [0.05, 0.25, 0.5, 0.75, 0.99, 1.2] {
            let (a, b) = sk.residual_functions(r);
            println!("  r={r:<5} a={a:>12.4e} b={b:>12.4e}");
        }
    }

    // residual at three points on the x axis for a unit force along x
    let sk = build_split_kernel(Kernel::Stokeslet, 3, window, 1e-10)?;
    for r in [0.1, 0.5, 0.9] {
        let t = sk.stokeslet_residual(&[r, 0.0, 0.0])?;
        println!("stokeslet residual xx at r={r}: {:.6e}", t[0]);
    }
    Ok(())
}
