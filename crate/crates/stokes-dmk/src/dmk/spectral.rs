//! Dense separable transforms between proxy grids and Fourier grids.
//!
//! Spectra of real data are stored on the half grid: full range
//! `m = -M..=M` on every axis but the last, which keeps `m = 0..=M`.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct SpectralGrid {
    pub dim: usize,
    pub p: usize,
    /// Half-width `M`.
    pub m: usize,
    /// Wavenumbers for `m = -M..=M`.
    pub modes: Vec<f64>,
    /// `fwd[m * p + i] = exp(-i k_m x_i)`.
    fwd: Vec<Complex64>,
    /// `inv[i * nf + m] = exp(+i k_m x_i)`.
    inv: Vec<Complex64>,
    /// `phase[delta + 1][m] = exp(i k_m delta)`.
    phase: [Vec<Complex64>; 3],
}

impl SpectralGrid {
    /// Grid with wavenumbers `h * m`, `|m| <= half_width`, acting on the
    /// proxy nodes `x` (box units).
    pub fn new(dim: usize, x: &[f64], h: f64, half_width: usize) -> Self {
        let p = x.len();
        let nf = 2 * half_width + 1;
        let modes: Vec<f64> = (0..nf).map(|i| h * (i as f64 - half_width as f64)).collect();
        let mut fwd = vec![ZERO; nf * p];
        let mut inv = vec![ZERO; p * nf];
        for (mi, &k) in modes.iter().enumerate() {
            for (i, &xi) in x.iter().enumerate() {
                let e = Complex64::from_polar(1.0, -k * xi);
                fwd[mi * p + i] = e;
                inv[i * nf + mi] = e.conj();
            }
        }
        let phase = [-1.0, 0.0, 1.0].map(|d: f64| modes.iter().map(|&k| Complex64::from_polar(1.0, k * d)).collect());
        SpectralGrid { dim, p, m: half_width, modes, fwd, inv, phase }
    }

    pub fn nf(&self) -> usize {
        2 * self.m + 1
    }

    /// Number of stored (half-grid) modes.
    pub fn len(&self) -> usize {
        self.nf().pow(self.dim as u32 - 1) * (self.m + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Full-range mode indices of the half-grid entry `idx`.
    #[inline]
    pub fn mode_indices(&self, idx: usize) -> [usize; 3] {
        let nf = self.nf();
        let h = self.m + 1;
        if self.dim == 2 {
            [idx / h, self.m + idx % h, 0]
        } else {
            [idx / (nf * h), (idx / h) % nf, self.m + idx % h]
        }
    }

    /// Wavevector of the half-grid entry `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.mode_indices(idx);
        let mut k = [0.0; 3];
        for j in 0..self.dim {
            k[j] = self.modes[m[j]];
        }
        k
    }

    /// Half-grid spectrum of the real array `q` (`p^d`).
    pub fn forward(&self, q: &[f64], out: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let (p, nf, h, m0) = (self.p, self.nf(), self.m + 1, self.m);
        if self.dim == 2 {
            // a[i1][m2] = sum_i2 q[i1][i2] fwd[m2][i2]
            scratch.clear();
            scratch.resize(p * h, ZERO);
            for i1 in 0..p {
                for m2 in 0..h {
                    let f = &self.fwd[(m0 + m2) * p..(m0 + m2 + 1) * p];
                    let mut s = ZERO;
                    for i2 in 0..p {
                        s += f[i2] * q[i1 * p + i2];
                    }
                    scratch[i1 * h + m2] = s;
                }
            }
            out[..nf * h].fill(ZERO);
            for m1 in 0..nf {
                let o = &mut out[m1 * h..(m1 + 1) * h];
                for i1 in 0..p {
                    let f = self.fwd[m1 * p + i1];
                    let a = &scratch[i1 * h..(i1 + 1) * h];
                    for t in 0..h {
                        o[t] += f * a[t];
                    }
                }
            }
            return;
        }
        let na = p * p * h;
        let nb = p * nf * h;
        scratch.clear();
        scratch.resize(na + nb, ZERO);
        let (a, b) = scratch.split_at_mut(na);
        // a[i1][i2][m3]
        for r in 0..p * p {
            let row = &q[r * p..(r + 1) * p];
            for m3 in 0..h {
                let f = &self.fwd[(m0 + m3) * p..(m0 + m3 + 1) * p];
                let mut s = ZERO;
                for i3 in 0..p {
                    s += f[i3] * row[i3];
                }
                a[r * h + m3] = s;
            }
        }
        // b[i1][m2][m3]
        for i1 in 0..p {
            for m2 in 0..nf {
                let dst = &mut b[(i1 * nf + m2) * h..(i1 * nf + m2 + 1) * h];
                for i2 in 0..p {
                    let f = self.fwd[m2 * p + i2];
                    let src = &a[(i1 * p + i2) * h..(i1 * p + i2 + 1) * h];
                    for t in 0..h {
                        dst[t] += f * src[t];
                    }
                }
            }
        }
        // out[m1][m2][m3]
        let plane = nf * h;
        out[..nf * plane].fill(ZERO);
        for m1 in 0..nf {
            let dst = &mut out[m1 * plane..(m1 + 1) * plane];
            for i1 in 0..p {
                let f = self.fwd[m1 * p + i1];
                let src = &b[i1 * plane..(i1 + 1) * plane];
                for t in 0..plane {
                    dst[t] += f * src[t];
                }
            }
        }
    }

    /// Adds the real field of the half-grid spectrum `u` at the proxy nodes
    /// to `out` (`p^d`).
    pub fn inverse_add(&self, u: &[Complex64], out: &mut [f64], scratch: &mut Vec<Complex64>) {
        let (p, nf, h, m0) = (self.p, self.nf(), self.m + 1, self.m);
        let weight = |m: usize| if m == 0 { 1.0 } else { 2.0 };
        if self.dim == 2 {
            // v[i1][m2] = sum_m1 inv[i1][m1] u[m1][m2]
            scratch.clear();
            scratch.resize(p * h, ZERO);
            for i1 in 0..p {
                let dst = &mut scratch[i1 * h..(i1 + 1) * h];
                for m1 in 0..nf {
                    let e = self.inv[i1 * nf + m1];
                    let src = &u[m1 * h..(m1 + 1) * h];
                    for t in 0..h {
                        dst[t] += e * src[t];
                    }
                }
            }
            for i1 in 0..p {
                for i2 in 0..p {
                    let e = &self.inv[i2 * nf + m0..i2 * nf + m0 + h];
                    let mut s = 0.0;
                    for m2 in 0..h {
                        s += weight(m2) * (e[m2] * scratch[i1 * h + m2]).re;
                    }
                    out[i1 * p + i2] += s;
                }
            }
            return;
        }
        let plane = nf * h;
        let nv = p * plane;
        let nw = p * p * h;
        scratch.clear();
        scratch.resize(nv + nw, ZERO);
        let (v, w) = scratch.split_at_mut(nv);
        // v[i1][m2][m3]
        for i1 in 0..p {
            let dst = &mut v[i1 * plane..(i1 + 1) * plane];
            for m1 in 0..nf {
                let e = self.inv[i1 * nf + m1];
                let src = &u[m1 * plane..(m1 + 1) * plane];
                for t in 0..plane {
                    dst[t] += e * src[t];
                }
            }
        }
        // w[i1][i2][m3]
        for i1 in 0..p {
            for i2 in 0..p {
                let dst = &mut w[(i1 * p + i2) * h..(i1 * p + i2 + 1) * h];
                for m2 in 0..nf {
                    let e = self.inv[i2 * nf + m2];
                    let src = &v[(i1 * nf + m2) * h..(i1 * nf + m2 + 1) * h];
                    for t in 0..h {
                        dst[t] += e * src[t];
                    }
                }
            }
        }
        let ew: Vec<Complex64> = (0..p * h).map(|k| self.inv[(k / h) * nf + m0 + k % h] * weight(k % h)).collect();
        for r in 0..p * p {
            let src = &w[r * h..(r + 1) * h];
            for i3 in 0..p {
                let e = &ew[i3 * h..(i3 + 1) * h];
                let mut s = 0.0;
                for t in 0..h {
                    s += e[t].re * src[t].re - e[t].im * src[t].im;
                }
                out[r * p + i3] += s;
            }
        }
    }

    /// Adds `exp(i k . delta) * e` to `acc` over the half grid.
    pub fn accumulate_shifted(&self, delta: [i64; 3], e: &[Complex64], acc: &mut [Complex64]) {
        let (nf, h, m0) = (self.nf(), self.m + 1, self.m);
        let ph = |j: usize| &self.phase[(delta[j] + 1) as usize];
        if delta == [0, 0, 0] {
            for (a, b) in acc.iter_mut().zip(e) {
                *a += b;
            }
            return;
        }
        if self.dim == 2 {
            let (p1, p2) = (ph(0), &ph(1)[m0..]);
            for m1 in 0..nf {
                for m2 in 0..h {
                    let k = m1 * h + m2;
                    acc[k] += e[k] * (p1[m1] * p2[m2]);
                }
            }
            return;
        }
        let (p1, p2, p3) = (ph(0), ph(1), &ph(2)[m0..]);
        for m1 in 0..nf {
            for m2 in 0..nf {
                let a = p1[m1] * p2[m2];
                let base = (m1 * nf + m2) * h;
                for m3 in 0..h {
                    acc[base + m3] += e[base + m3] * (a * p3[m3]);
                }
            }
        }
    }
}
