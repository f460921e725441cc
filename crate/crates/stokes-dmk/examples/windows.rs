//! Prolate and Gaussian windows side by side: values, transforms and the
//! prolate truncation error at a few bandlimits.

use stokes_dmk::windows::WindowFunction;

fn main() -> stokes_dmk::Result<()> {
    for c in [10.0, 20.0, 30.0] {
        let w = WindowFunction::prolate(c)?;
        println!("prolate c={c:>4}: phi(0)={:.6} truncation error {:.2e}", w.eval(0.0), w.trunc_error);
    }

    let p = WindowFunction::prolate(20.0)?;
    let g = WindowFunction::gaussian(0.3)?;
    println!("\n{:>6} {:>14} {:>14}", "r", "prolate", "gaussian");
    for i in 0..=8 {
        let r = i as f64 / 8.0;
        println!("{r:>6.3} {:>14.6e} {:>14.6e}", p.eval(r), g.eval(r));
    }
    println!("\n{:>6} {:>14} {:>14}", "k", "prolate^", "gaussian^");
    for i in 0..=8 {
        let k = 3.0 * i as f64;
        println!("{k:>6.1} {:>14.6e} {:>14.6e}", p.fourier(k), g.fourier(k));
    }
    Ok(())
}
