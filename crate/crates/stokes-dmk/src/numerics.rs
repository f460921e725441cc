//! Small numerical building blocks shared by the windows and split modules:
//! Gauss-Legendre rules, Bessel functions of order 0 and 1, and piecewise
//! Chebyshev tables.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels of `order` nodes.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(lo + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// Bessel function of the first kind, order 0.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 25.0 {
        bessel_trapezoid(0, ax)
    } else {
        bessel_asymptotic(0, ax)
    }
}

/// Bessel function of the first kind, order 1.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 25.0 {
        bessel_trapezoid(1, ax)
    } else {
        bessel_asymptotic(1, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

// J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt; the trapezoid rule is
// exponentially accurate for this periodic integrand.
fn bessel_trapezoid(n: i32, x: f64) -> f64 {
    let m = ((x + 40.0) / 2.0).ceil() as usize * 2;
    let h = PI / m as f64;
    let mut s = 0.5 * ((0.0f64).cos() + (n as f64 * PI).cos());
    for j in 1..m {
        let t = j as f64 * h;
        s += (n as f64 * t - x * t.sin()).cos();
    }
    s / m as f64
}

fn bessel_asymptotic(n: i32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let z = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..80 {
        let kk = (2 * k - 1) as f64;
        term *= (mu - kk * kk) / (k as f64 * z);
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (n as f64 * 0.5 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Chebyshev nodes of the first kind on [-1, 1], in decreasing order.
pub fn chebyshev_nodes(p: usize) -> Vec<f64> {
    (0..p)
        .map(|i| ((2 * i + 1) as f64 * PI / (2 * p) as f64).cos())
        .collect()
}

/// Piecewise Chebyshev approximation of several functions sharing one
/// uniform panel layout on `[0, rmax]`.
#[derive(Clone, Debug)]
pub struct ChebTable {
    rmax: f64,
    panels: usize,
    ncoef: usize,
    nfun: usize,
    inv_h: f64,
    coeffs: Vec<f64>,
}

const FIT_NODES: usize = 32;
/// Doublings tried past the first panel count that meets the tolerance.
const EXTRA_DOUBLINGS: usize = 3;

impl ChebTable {
    /// Fits the functions returned by `eval` (one row per radius, one column
    /// per function), doubling the panel count until the trailing
    /// coefficients fall below `tol / 10` relative to each function's scale,
    /// then keeping the layout with the shortest series among a few more
    /// doublings.
    pub fn fit<F>(rmax: f64, nfun: usize, tol: f64, mut eval: F) -> Result<ChebTable>
    where
        F: FnMut(&[f64]) -> Vec<Vec<f64>>,
    {
        let nodes = chebyshev_nodes(FIT_NODES);
        // coefficients of a 32-point transform carry ~1e-15 rounding noise
        let thresh = (tol / 10.0).max(5e-15);
        let mut panels = 1usize;
        let mut last_tail = f64::INFINITY;
        let mut best: Option<ChebTable> = None;
        let mut extra = 0;
        while panels <= 4096 {
            let h = rmax / panels as f64;
            let radii: Vec<f64> = (0..panels)
                .flat_map(|p| nodes.iter().map(move |t| h * (p as f64 + 0.5 * (t + 1.0))))
                .collect();
            let values = eval(&radii);
            let mut scale = vec![0.0f64; nfun];
            for row in &values {
                for f in 0..nfun {
                    scale[f] = scale[f].max(row[f].abs());
                }
            }
            for s in scale.iter_mut() {
                if *s == 0.0 {
                    *s = 1.0;
                }
            }
            let mut full = vec![0.0; panels * nfun * FIT_NODES];
            let mut tail = 0.0f64;
            for p in 0..panels {
                for f in 0..nfun {
                    let vals: Vec<f64> = (0..FIT_NODES).map(|i| values[p * FIT_NODES + i][f]).collect();
                    let c = cheb_coefficients(&vals);
                    for j in FIT_NODES - 3..FIT_NODES {
                        tail = tail.max(c[j].abs() / scale[f]);
                    }
                    full[(p * nfun + f) * FIT_NODES..(p * nfun + f + 1) * FIT_NODES].copy_from_slice(&c);
                }
            }
            last_tail = tail;
            if tail <= thresh {
                let mut keep = 1;
                for p in 0..panels {
                    for f in 0..nfun {
                        let c = &full[(p * nfun + f) * FIT_NODES..(p * nfun + f + 1) * FIT_NODES];
                        for j in (0..FIT_NODES).rev() {
                            if c[j].abs() > thresh * scale[f] {
                                keep = keep.max(j + 1);
                                break;
                            }
                        }
                    }
                }
                let mut coeffs = Vec::with_capacity(panels * nfun * keep);
                for p in 0..panels {
                    for f in 0..nfun {
                        let c = &full[(p * nfun + f) * FIT_NODES..(p * nfun + f + 1) * FIT_NODES];
                        coeffs.extend_from_slice(&c[..keep]);
                    }
                }
                let table = ChebTable { rmax, panels, ncoef: keep, nfun, inv_h: panels as f64 / rmax, coeffs };
                // Evaluation cost follows the coefficient count, so a few
                // more panels are worth it while they shorten the series.
                match &best {
                    Some(b) if b.ncoef <= keep + 1 => return Ok(best.unwrap()),
                    _ => best = Some(table),
                }
                extra += 1;
                if extra > EXTRA_DOUBLINGS {
                    return Ok(best.unwrap());
                }
            }
            panels *= 2;
        }
        best.ok_or(Error::TableFit { achieved: last_tail, requested: tol })
    }

    /// Rebuilds a table from raw parts (used by the binary import).
    pub fn from_parts(rmax: f64, panels: usize, ncoef: usize, nfun: usize, coeffs: Vec<f64>) -> Result<ChebTable> {
        if coeffs.len() != panels * ncoef * nfun || panels == 0 || ncoef == 0 || !(rmax > 0.0) {
            return Err(Error::Format("inconsistent Chebyshev table dimensions".into()));
        }
        Ok(ChebTable { rmax, panels, ncoef, nfun, inv_h: panels as f64 / rmax, coeffs })
    }

    pub fn rmax(&self) -> f64 {
        self.rmax
    }
    pub fn panels(&self) -> usize {
        self.panels
    }
    pub fn ncoef(&self) -> usize {
        self.ncoef
    }
    pub fn nfun(&self) -> usize {
        self.nfun
    }
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Evaluates all functions at `r` in `[0, rmax]` into `out`.
    #[inline(always)]
    pub fn eval(&self, r: f64, out: &mut [f64]) {
        let s = r * self.inv_h;
        let p = (s as usize).min(self.panels - 1);
        let t = 2.0 * (s - p as f64) - 1.0;
        let t2 = 2.0 * t;
        let base = p * self.nfun * self.ncoef;
        if self.nfun == 2 {
            // both recurrences in one loop so their latencies overlap
            let n = self.ncoef;
            let (c, e) = self.coeffs[base..base + 2 * n].split_at(n);
            let (mut b1, mut b2, mut d1, mut d2) = (0.0, 0.0, 0.0, 0.0);
            for (&cj, &ej) in c[1..].iter().zip(&e[1..]).rev() {
                let b0 = cj + t2 * b1 - b2;
                let d0 = ej + t2 * d1 - d2;
                b2 = b1;
                b1 = b0;
                d2 = d1;
                d1 = d0;
            }
            out[0] = c[0] + t * b1 - b2;
            out[1] = e[0] + t * d1 - d2;
            return;
        }
        for (f, o) in out.iter_mut().enumerate().take(self.nfun) {
            let c = &self.coeffs[base + f * self.ncoef..base + (f + 1) * self.ncoef];
            let mut b1 = 0.0;
            let mut b2 = 0.0;
            for &cj in c[1..].iter().rev() {
                let b0 = cj + t2 * b1 - b2;
                b2 = b1;
                b1 = b0;
            }
            *o = c[0] + t * b1 - b2;
        }
    }
}

/// Chebyshev coefficients from values at first-kind nodes (decreasing order).
fn cheb_coefficients(vals: &[f64]) -> Vec<f64> {
    let n = vals.len();
    let mut c = vec![0.0; n];
    for (j, cj) in c.iter_mut().enumerate() {
        let mut s = 0.0;
        for (i, v) in vals.iter().enumerate() {
            s += v * (j as f64 * (2 * i + 1) as f64 * PI / (2 * n) as f64).cos();
        }
        *cj = s * if j == 0 { 1.0 } else { 2.0 } / n as f64;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j0_series(x: f64) -> f64 {
        let mut term = 1.0;
        let mut s = 1.0;
        for m in 1..60 {
            term *= -(x * x / 4.0) / (m * m) as f64;
            s += term;
        }
        s
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn bessel_matches_power_series_for_small_arguments() {
        for &x in &[0.0, 0.3, 1.0, 2.5, 5.0, 8.0] {
            assert!((bessel_j0(x) - j0_series(x)).abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn bessel_branches_agree_at_switch() {
        for &x in &[25.0, 30.0, 41.3] {
            assert!((bessel_trapezoid(0, x) - bessel_asymptotic(0, x)).abs() < 1e-15);
            assert!((bessel_trapezoid(1, x) - bessel_asymptotic(1, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn bessel_known_values() {
        assert!((bessel_j0(2.404825557695773)).abs() < 1e-15);
        assert!((bessel_j1(3.831705970207512)).abs() < 1e-15);
        assert!((bessel_j1(1.0) - 0.4400505857449335).abs() < 1e-15);
    }

    #[test]
    fn cheb_table_reproduces_smooth_functions() {
        let t = ChebTable::fit(2.0, 2, 1e-14, |r| r.iter().map(|&x| vec![x.sin(), (-x * x).exp()]).collect()).unwrap();
        let mut out = [0.0; 2];
        for i in 0..=200 {
            let r = 2.0 * i as f64 / 200.0;
            t.eval(r, &mut out);
            assert!((out[0] - r.sin()).abs() < 1e-14);
            assert!((out[1] - (-r * r).exp()).abs() < 1e-14);
        }
    }
}
