//! Split and discretization parameters per kernel, window and tolerance.
//!
//! Rows for `eps = 1e-3, 1e-6, 1e-9, 1e-12` are the measured optima. Other
//! tolerances use least-squares lines `T(log10 eps)` and `p(T)` through
//! those rows, rounded up. `T` is `3c/pi` for the prolate window and
//! `6/(pi sigma^2)` for the Gaussian; either way the bandlimit of the
//! mollifier at unit scale is `K_max = T pi / 3`.

use crate::error::{Error, Result};
use crate::split::Kernel;
use crate::windows::WindowKind;
use serde::Serialize;
use std::f64::consts::PI;

/// `(T, p, N1, N_per)` per tolerance for the prolate and Gaussian windows.
type Row = [(u32, u32, u32, u32); 2];

const STOKESLET: [Row; 4] = [
    [(10, 12, 19, 3), (14, 14, 27, 5)],
    [(17, 23, 33, 5), (25, 28, 49, 9)],
    [(25, 33, 49, 9), (38, 43, 75, 13)],
    [(31, 44, 61, 11), (50, 58, 99, 17)],
];
const STRESSLET: [Row; 4] = [
    [(9, 11, 17, 3), (11, 12, 21, 3)],
    [(17, 22, 33, 5), (26, 28, 51, 9)],
    [(25, 33, 49, 9), (40, 44, 79, 13)],
    [(32, 44, 63, 11), (54, 60, 107, 17)],
];
const ROTLET: [Row; 4] = [
    [(7, 8, 13, 3), (9, 9, 17, 3)],
    [(14, 18, 27, 5), (21, 23, 41, 7)],
    [(20, 28, 39, 7), (34, 38, 67, 11)],
    [(27, 39, 53, 9), (47, 53, 93, 15)],
];
const TABLE_EXPONENTS: [i32; 4] = [-3, -6, -9, -12];
const LEAF_2D: [f64; 4] = [120.0, 240.0, 360.0, 480.0];
const LEAF_3D: [f64; 4] = [600.0, 1200.0, 2000.0, 3000.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DmkParams {
    /// `3c/pi` (prolate) or `6/(pi sigma^2)` (Gaussian).
    pub t: u32,
    /// Prolate bandlimit `c`, or Gaussian `sigma`.
    pub window_param: f64,
    pub p: usize,
    pub n1: usize,
    pub n_per: usize,
    pub n_s: usize,
}

impl DmkParams {
    /// Parameters for a given `T` and `p`, with derived mode counts.
    pub fn from_t(window: WindowKind, t: u32, p: usize, n_s: usize) -> DmkParams {
        let k_max = t as f64 * PI / 3.0;
        let window_param = match window {
            WindowKind::Prolate => k_max,
            WindowKind::Gaussian => (6.0 / (PI * t as f64)).sqrt(),
        };
        DmkParams {
            t,
            window_param,
            p,
            n1: (2 * t - 1) as usize,
            // modes 2 pi m with 2 pi m < K_max, i.e. m < T / 6
            n_per: 2 * t.div_ceil(6) as usize - 1,
            n_s,
        }
    }

    /// Mollifier bandlimit at unit scale.
    pub fn k_max(&self) -> f64 {
        self.t as f64 * PI / 3.0
    }
}

fn rows(kernel: Kernel) -> Result<&'static [Row; 4]> {
    match kernel {
        Kernel::Stokeslet => Ok(&STOKESLET),
        Kernel::Stresslet => Ok(&STRESSLET),
        Kernel::Rotlet => Ok(&ROTLET),
        _ => Err(Error::Unsupported(format!("no DMK parameters for the {} kernel", kernel.name()))),
    }
}

fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Leaf capacity, piecewise linear in `log10 eps` through the tabulated values.
fn leaf_capacity(dim: usize, log_eps: f64) -> usize {
    let v = if dim == 2 { &LEAF_2D } else { &LEAF_3D };
    let x = -log_eps;
    let i = ((x - 3.0) / 3.0).floor().clamp(0.0, 2.0) as usize;
    let (x0, x1) = (3.0 * (i + 1) as f64, 3.0 * (i + 2) as f64);
    let n = v[i] + (v[i + 1] - v[i]) * (x - x0) / (x1 - x0);
    n.round().max(1.0) as usize
}

/// Table-driven parameters for `eps` in `[1e-13, 1e-2]`.
pub fn select_parameters(kernel: Kernel, eps: f64, window: WindowKind, dim: usize) -> Result<DmkParams> {
    if !(1e-13..=1e-2).contains(&eps) {
        return Err(Error::InvalidArgument(format!("tolerance {eps:e} outside [1e-13, 1e-2]")));
    }
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidArgument(format!("dimension {dim}")));
    }
    let table = rows(kernel)?;
    let w = usize::from(window == WindowKind::Gaussian);
    let n_s = leaf_capacity(dim, eps.log10());
    // The rows are 3D optima. 2D fields decay more slowly, so the fitted
    // lines are used one decade tighter.
    let log_eps = if dim == 2 { eps.log10() - 1.0 } else { eps.log10() };
    for (row, &e) in table.iter().zip(&TABLE_EXPONENTS) {
        if dim == 3 && (log_eps - e as f64).abs() < 1e-9 {
            let (t, p, n1, n_per) = row[w];
            let mut params = DmkParams::from_t(window, t, p as usize, n_s);
            debug_assert_eq!(params.n1, n1 as usize);
            params.n_per = n_per as usize;
            return Ok(params);
        }
    }
    let xs: Vec<f64> = TABLE_EXPONENTS.iter().map(|&e| e as f64).collect();
    let ts: Vec<f64> = table.iter().map(|r| r[w].0 as f64).collect();
    let ps: Vec<f64> = table.iter().map(|r| r[w].1 as f64).collect();
    let (a, b) = fit_line(&xs, &ts);
    let t = (a + b * log_eps).ceil().max(2.0) as u32;
    let (c, d) = fit_line(&ts, &ps);
    let p = (c + d * t as f64).ceil().max(2.0) as usize;
    Ok(DmkParams::from_t(window, t, p, n_s))
}
