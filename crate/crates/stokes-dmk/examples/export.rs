//! Writes split-kernel tables to disk, reads them back and evaluates both.

use stokes_dmk::split::build_split_kernel;
use stokes_dmk::split::export::{export_tables, import_tables};
use stokes_dmk::windows::WindowFunction;
use stokes_dmk::Kernel;

fn main() -> stokes_dmk::Result<()> {
    let sk = build_split_kernel(Kernel::Rotlet, 2, WindowFunction::prolate(20.0)?, 1e-10)?;
    let path = std::env::temp_dir().join("rotlet-2d.stksplit");
    export_tables(&sk, &path)?;
    let back = import_tables(&path)?;
    println!("wrote {} ({} bytes)", path.display(), std::fs::metadata(&path)?.len());
    for r in [0.1, 0.4, 0.8] {
        println!("r={r}: {:?} vs {:?}", sk.residual_functions(r), back.residual_functions(r));
    }
    std::fs::remove_file(&path)?;
    Ok(())
}
