//! The direct sum and the single-level Ewald reference on a small free-space
//! system, plus the periodic reference for the same points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stokes_dmk::oracle::{direct_sum, ewald_reference, relative_l2, EwaldGrid};
use stokes_dmk::split::build_split_kernel;
use stokes_dmk::windows::WindowFunction;
use stokes_dmk::{Kernel, Mode, ParticleSystem};

fn main() -> stokes_dmk::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 200;
    let points: Vec<f64> = (0..3 * n).map(|_| rng.random_range(-0.5..0.5)).collect();
    let forces: Vec<f64> = (0..3 * n).map(|_| rng.random_range(-0.5..0.5)).collect();
    let sys = ParticleSystem::new(3, points, None, forces)?;

    let sk = build_split_kernel(Kernel::Stokeslet, 3, WindowFunction::prolate(30.0)?, 1e-12)?;
    let direct = direct_sum(Kernel::Stokeslet, &sys)?;
    let free = ewald_reference(&sk, &sys, Mode::Free, &EwaldGrid::for_split(&sk, Mode::Free))?;
    println!("free-space Ewald vs direct: relative l2 {:.3e}", relative_l2(&free, &direct));

    let periodic = ewald_reference(&sk, &sys, Mode::Periodic, &EwaldGrid::for_split(&sk, Mode::Periodic))?;
    println!("periodic velocity of particle 0: {:?}", &periodic[..3]);
    println!("free-space velocity of particle 0: {:?}", &direct[..3]);
    Ok(())
}
