//! Dual-space multilevel kernel summation.
//!
//! The mollified kernel at unit scale is evaluated on the root proxy grid,
//! each level `l` adds the difference kernel `M_{r_{l+1}} - M_{r_l}` between
//! colleagues through small dense Fourier transforms, and the residual
//! `K - M_{r_L}` is summed directly over leaf neighbors. Within a level all
//! per-box work runs in parallel into disjoint buffers.

mod params;
mod proxy;
mod spectral;

pub use params::{select_parameters, DmkParams};
pub use proxy::ChebBasis;
pub use spectral::SpectralGrid;

use crate::error::{Error, Result};
use crate::oracle::{wrap_into_cell, Mode, ParticleSystem};
use crate::split::{apply_fourier_symbol, build_split_kernel, fourier_components, output_len, Kernel, SplitKernel};
use crate::tree::{build_tree, Tree};
use crate::windows::{WindowFunction, WindowKind};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::time::Instant;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Precomputed split, proxy basis and Fourier symbols for one kernel,
/// dimension, window, tolerance and boundary condition.
#[derive(Clone, Debug)]
pub struct DmkPlan {
    pub kernel: Kernel,
    pub dim: usize,
    pub window: WindowKind,
    pub mode: Mode,
    pub eps: f64,
    pub params: DmkParams,
    pub split: SplitKernel,
    basis: ChebBasis,
    level_grid: SpectralGrid,
    level_radial: Vec<f64>,
    root_grid: SpectralGrid,
    root_radial: Vec<f64>,
}

/// Plan scalars for reporting.
#[derive(Clone, Debug, Serialize)]
pub struct PlanSummary {
    pub kernel: &'static str,
    pub dim: usize,
    pub mode: &'static str,
    pub window: &'static str,
    pub eps: f64,
    pub t: u32,
    pub window_param: f64,
    pub p: usize,
    pub n1: usize,
    pub n_per: usize,
    pub n_s: usize,
    pub root_modes: usize,
}

/// Per-box proxy arrays, component-major with `p^d` values per component.
/// Boxes that carry no data hold an empty vector.
#[derive(Clone, Debug)]
pub struct ProxyData {
    pub ncomp: usize,
    pub boxes: Vec<Vec<f64>>,
}

/// Points and strengths in tree order.
#[derive(Clone, Debug)]
pub struct SortedSystem {
    pub sources: Vec<f64>,
    pub targets: Vec<f64>,
    /// Raw strengths, `arity` per source.
    pub strengths: Vec<f64>,
    /// Strengths in the layout of the Fourier symbols.
    pub charges: Vec<f64>,
    pub arity: usize,
    pub ncharge: usize,
    pub aliased: bool,
}

/// Wall time per pass, in seconds.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Timings {
    pub tree: f64,
    pub upward: f64,
    pub root: f64,
    pub downward: f64,
    pub residual: f64,
}

impl Timings {
    pub fn total(&self) -> f64 {
        self.tree + self.upward + self.root + self.downward + self.residual
    }

    /// `(pass, seconds)` in execution order.
    pub fn passes(&self) -> [(&'static str, f64); 5] {
        [
            ("tree", self.tree),
            ("upward", self.upward),
            ("root", self.root),
            ("downward", self.downward),
            ("residual", self.residual),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct DmkOutput {
    /// `d` values per target, in caller order.
    pub potentials: Vec<f64>,
    pub timings: Timings,
    /// Number of tree levels (depth + 1).
    pub levels: usize,
    pub boxes: usize,
    pub leaves: usize,
}

fn window_function(kind: WindowKind, param: f64) -> Result<WindowFunction> {
    match kind {
        WindowKind::Prolate => WindowFunction::prolate(param),
        WindowKind::Gaussian => WindowFunction::gaussian(param),
    }
}

fn norm(k: &[f64]) -> f64 {
    k.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A target (already shifted by the neighbor's periodic image) against one
/// neighbor box.
struct Near {
    xr: [f64; 3],
    nu: f64,
    src: std::ops::Range<usize>,
    target: usize,
}

/// Two leaves that list each other, visited once for both directions.
struct Pair {
    b: usize,
    c: usize,
    shift: [i32; 3],
    upper: bool,
}

impl DmkPlan {
    /// Plan with table-driven parameters.
    pub fn new(kernel: Kernel, dim: usize, eps: f64, window: WindowKind, mode: Mode) -> Result<Self> {
        let params = select_parameters(kernel, eps, window, dim)?;
        Self::with_params(kernel, dim, eps, window, mode, params)
    }

    /// Plan with explicit parameters; `eps` only sets the residual table tolerance.
    pub fn with_params(kernel: Kernel, dim: usize, eps: f64, window: WindowKind, mode: Mode, params: DmkParams) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidArgument(format!("dimension {dim}")));
        }
        if !matches!(kernel, Kernel::Stokeslet | Kernel::Stresslet | Kernel::Rotlet) {
            return Err(Error::Unsupported(format!("DMK for the {} kernel", kernel.name())));
        }
        if mode == Mode::Periodic && dim == 2 && kernel == Kernel::Stresslet {
            return Err(Error::Unsupported("periodic 2D stresslet".into()));
        }
        if params.p < 2 || params.n1 < 3 || params.n1.is_multiple_of(2) || params.n_per.is_multiple_of(2) || params.n_s == 0 {
            return Err(Error::InvalidArgument(format!("parameters {params:?}")));
        }
        let w = window_function(window, params.window_param)?;
        let tol = (eps * 1e-2).clamp(1e-14, 1e-4);
        let split = build_split_kernel(kernel, dim, w, tol)?;
        let basis = ChebBasis::new(params.p);

        let level_grid = SpectralGrid::new(dim, &basis.nodes, 2.0 * PI / 3.0, (params.n1 - 1) / 2);
        let weight = 3f64.powi(-(dim as i32));
        let level_radial = (0..level_grid.len())
            .map(|idx| {
                let k = norm(&level_grid.wavevector(idx)[..dim]);
                if k == 0.0 {
                    return 0.0;
                }
                if kernel == Kernel::Rotlet {
                    let wf = split.window();
                    weight * (wf.fourier(0.5 * k) - wf.fourier(k)) / (k * k)
                } else {
                    let m = &split.mollifier;
                    weight * (m.fourier(0.5 * k) - m.fourier(k)) / k.powi(4)
                }
            })
            .collect();

        let k_max = params.k_max();
        let (root_grid, root_radial) = match mode {
            Mode::Free => {
                let period = split.window_radius_r + 1.0 + split.residual_radius();
                let h = 2.0 * PI / period;
                let n0 = (k_max / h).ceil() as usize;
                let g = SpectralGrid::new(dim, &basis.nodes, h, n0);
                let wt = (h / (2.0 * PI)).powi(dim as i32);
                let r = (0..g.len()).map(|idx| wt * split.radial_symbol(norm(&g.wavevector(idx)[..dim]), true)).collect();
                (g, r)
            }
            Mode::Periodic => {
                let g = SpectralGrid::new(dim, &basis.nodes, 2.0 * PI, (params.n_per - 1) / 2);
                let r = (0..g.len())
                    .map(|idx| {
                        let k = norm(&g.wavevector(idx)[..dim]);
                        if k == 0.0 {
                            0.0
                        } else {
                            split.radial_symbol(k, false)
                        }
                    })
                    .collect();
                (g, r)
            }
        };
        Ok(DmkPlan { kernel, dim, window, mode, eps, params, split, basis, level_grid, level_radial, root_grid, root_radial })
    }

    pub fn summary(&self) -> PlanSummary {
        PlanSummary {
            kernel: self.kernel.name(),
            dim: self.dim,
            mode: self.mode.name(),
            window: self.window.name(),
            eps: self.eps,
            t: self.params.t,
            window_param: self.params.window_param,
            p: self.params.p,
            n1: self.params.n1,
            n_per: self.params.n_per,
            n_s: self.params.n_s,
            root_modes: self.root_grid.nf(),
        }
    }

    fn np(&self) -> usize {
        self.params.p.pow(self.dim as u32)
    }

    /// `s^{2-d}` for the Stokeslet, `s^{1-d}` otherwise, `s = 2^{-level}`.
    fn level_factor(&self, level: usize) -> f64 {
        let alpha = if self.kernel == Kernel::Stokeslet { 2 } else { 1 } - self.dim as i32;
        0.5f64.powi(level as i32).powi(alpha)
    }

    /// Validates `sys` and builds its tree.
    pub fn prepare(&self, sys: &ParticleSystem) -> Result<(Tree, SortedSystem)> {
        sys.check_kernel(self.kernel)?;
        if sys.dim != self.dim {
            return Err(Error::InvalidArgument(format!("system is {}D, plan is {}D", sys.dim, self.dim)));
        }
        let d = self.dim;
        let periodic = self.mode == Mode::Periodic;
        let mut src = sys.sources.clone();
        let mut tgt = sys.targets.clone();
        if periodic {
            wrap_into_cell(&mut src);
            if let Some(t) = tgt.as_mut() {
                wrap_into_cell(t);
            }
        }
        let tree = build_tree(d, &src, tgt.as_deref(), self.params.n_s, periodic, self.params.p)?;
        let arity = sys.arity();
        let ncharge = match self.kernel {
            Kernel::Stresslet => d * d,
            _ => arity,
        };
        let n = sys.n_sources();
        let mut sorted = SortedSystem {
            sources: vec![0.0; n * d],
            targets: Vec::new(),
            strengths: vec![0.0; n * arity],
            charges: vec![0.0; n * ncharge],
            arity,
            ncharge,
            aliased: sys.aliased(),
        };
        for (k, &i) in tree.src_perm.iter().enumerate() {
            sorted.sources[k * d..(k + 1) * d].copy_from_slice(&src[i * d..(i + 1) * d]);
            sorted.strengths[k * arity..(k + 1) * arity].copy_from_slice(sys.strength(i));
            fourier_components(self.kernel, d, sys.strength(i), &mut sorted.charges[k * ncharge..(k + 1) * ncharge]);
        }
        let tsrc = tgt.as_deref().unwrap_or(&src);
        sorted.targets = vec![0.0; sys.n_targets() * d];
        for (k, &i) in tree.tgt_perm.iter().enumerate() {
            sorted.targets[k * d..(k + 1) * d].copy_from_slice(&tsrc[i * d..(i + 1) * d]);
        }
        Ok((tree, sorted))
    }

    /// Outgoing proxy charges: anterpolation at leaves, child merges above.
    pub fn upward_pass(&self, tree: &Tree, sorted: &SortedSystem) -> ProxyData {
        let (d, p, np, nc) = (self.dim, self.params.p, self.np(), sorted.ncharge);
        let mut out = vec![Vec::new(); tree.boxes.len()];
        for level in (0..tree.levels.len()).rev() {
            let done: Vec<(usize, Vec<f64>)> = tree.levels[level]
                .par_iter()
                .filter(|&&id| tree.boxes[id].n_sources() > 0)
                .map(|&id| {
                    let b = &tree.boxes[id];
                    let mut q = vec![0.0; nc * np];
                    if b.is_leaf() {
                        let mut l = vec![0.0; d * p];
                        let mut y = [0.0; 3];
                        for s in b.src.clone() {
                            for j in 0..d {
                                y[j] = (sorted.sources[s * d + j] - b.center[j]) / b.side;
                            }
                            proxy::point_basis(&self.basis, d, &y[..d], &mut l);
                            proxy::anterpolate_point(p, d, &l, &sorted.charges[s * nc..(s + 1) * nc], &mut q);
                        }
                    } else {
                        let mut scratch = Vec::new();
                        for (ci, c) in tree.children(id).enumerate() {
                            let child: &Vec<f64> = &out[c];
                            if child.is_empty() {
                                continue;
                            }
                            let bits = child_bits(d, ci);
                            for comp in 0..nc {
                                let r = comp * np..(comp + 1) * np;
                                proxy::merge_child(&self.basis, d, &bits[..d], &child[r.clone()], &mut q[r], &mut scratch);
                            }
                        }
                    }
                    (id, q)
                })
                .collect();
            for (id, q) in done {
                out[id] = q;
            }
        }
        ProxyData { ncomp: nc, boxes: out }
    }

    /// Incoming potentials on the root proxy grid from the unit-scale
    /// mollified kernel (truncated in free space, periodized otherwise).
    pub fn root_far_field(&self, outgoing: &ProxyData) -> Vec<f64> {
        let (d, np) = (self.dim, self.np());
        let mut u = vec![0.0; d * np];
        let q = &outgoing.boxes[0];
        if q.is_empty() {
            return u;
        }
        let spec = self.apply_symbol(&self.root_grid, &self.root_radial, 1.0, q, outgoing.ncomp);
        let mut scratch = Vec::new();
        for j in 0..d {
            self.root_grid.inverse_add(&spec[j], &mut u[j * np..(j + 1) * np], &mut scratch);
        }
        u
    }

    /// Forward transforms `q` and applies the kernel symbol, returning `d`
    /// half-grid spectra.
    fn apply_symbol(&self, grid: &SpectralGrid, radial: &[f64], factor: f64, q: &[f64], ncomp: usize) -> Vec<Vec<Complex64>> {
        let (d, np, len) = (self.dim, self.np(), grid.len());
        let mut scratch = Vec::new();
        let mut qhat = vec![vec![ZERO; len]; ncomp];
        for (c, qh) in qhat.iter_mut().enumerate() {
            grid.forward(&q[c * np..(c + 1) * np], qh, &mut scratch);
        }
        let mut out = vec![vec![ZERO; len]; d];
        let mut qk = vec![ZERO; ncomp];
        let mut uk = [ZERO; 3];
        for idx in 0..len {
            let r = radial[idx];
            if r == 0.0 {
                continue;
            }
            for c in 0..ncomp {
                qk[c] = qhat[c][idx];
            }
            let k = grid.wavevector(idx);
            apply_fourier_symbol(self.kernel, d, &k[..d], r * factor, &qk, &mut uk[..d]);
            for j in 0..d {
                out[j][idx] = uk[j];
            }
        }
        out
    }

    /// Incoming potentials: root field interpolated down the tree plus
    /// difference-kernel colleague interactions at every level.
    pub fn downward_pass(&self, tree: &Tree, outgoing: &ProxyData, root: Vec<f64>) -> ProxyData {
        let (d, np) = (self.dim, self.np());
        let leaf = |id: usize| tree.boxes[id].is_leaf();
        let needs_d = |id: usize| !leaf(id) || tree.colleagues[id].iter().any(|c| !leaf(c.id));
        let mut incoming = vec![Vec::new(); tree.boxes.len()];
        let mut slot = vec![0; tree.boxes.len()];
        for ids in &tree.levels {
            for (i, &id) in ids.iter().enumerate() {
                slot[id] = i;
            }
        }
        for (level, ids) in tree.levels.iter().enumerate() {
            let factor = self.level_factor(level);
            let spectra: Vec<Option<Vec<Vec<Complex64>>>> = ids
                .par_iter()
                .map(|&id| {
                    let q = &outgoing.boxes[id];
                    (!q.is_empty() && needs_d(id))
                        .then(|| self.apply_symbol(&self.level_grid, &self.level_radial, factor, q, outgoing.ncomp))
                })
                .collect();
            let done: Vec<(usize, Vec<f64>)> = ids
                .par_iter()
                .filter(|&&id| tree.boxes[id].n_targets() > 0)
                .map(|&id| {
                    let b = &tree.boxes[id];
                    let mut scratch = Vec::new();
                    let mut inc = if level == 0 {
                        root.clone()
                    } else {
                        let parent = b.parent.expect("non-root box has a parent");
                        let ci = id - tree.boxes[parent].first_child.expect("parent has children");
                        let bits = child_bits(d, ci);
                        let mut v = vec![0.0; d * np];
                        let pu = &incoming[parent];
                        for j in 0..d {
                            let r = j * np..(j + 1) * np;
                            proxy::interpolate_to_child(&self.basis, d, &bits[..d], &pu[r.clone()], &mut v[r], &mut scratch);
                        }
                        v
                    };
                    if needs_d(id) {
                        let len = self.level_grid.len();
                        let mut acc = vec![vec![ZERO; len]; d];
                        let mut any = false;
                        let scale = 1i64 << level;
                        for nb in &tree.colleagues[id] {
                            if leaf(id) && leaf(nb.id) {
                                continue;
                            }
                            let Some(e) = &spectra[slot[nb.id]] else { continue };
                            let c = &tree.boxes[nb.id];
                            let mut delta = [0i64; 3];
                            for j in 0..d {
                                delta[j] = b.coords[j] as i64 - (c.coords[j] as i64 + nb.shift[j] as i64 * scale);
                            }
                            for j in 0..d {
                                self.level_grid.accumulate_shifted(delta, &e[j], &mut acc[j]);
                            }
                            any = true;
                        }
                        if any {
                            let mut cs = Vec::new();
                            for j in 0..d {
                                self.level_grid.inverse_add(&acc[j], &mut inc[j * np..(j + 1) * np], &mut cs);
                            }
                        }
                    }
                    (id, inc)
                })
                .collect();
            for (id, v) in done {
                incoming[id] = v;
            }
        }
        ProxyData { ncomp: d, boxes: incoming }
    }

    /// Residual contributions to one target from the sources of one box.
    fn near_field<const D: usize>(&self, near: &Near, tree: &Tree, sorted: &SortedSystem, ut: &mut [f64]) -> Result<()> {
        let ar = sorted.arity;
        let nu2 = near.nu * near.nu;
        let src = &sorted.sources[near.src.start * D..near.src.end * D];
        for (i, xs) in src.chunks_exact(D).enumerate() {
            let mut x = [0.0; D];
            let mut r2 = 0.0;
            for j in 0..D {
                x[j] = near.xr[j] - xs[j];
                r2 += x[j] * x[j];
            }
            if r2 >= nu2 {
                continue;
            }
            let s = near.src.start + i;
            if r2 == 0.0 {
                let (a, b) = (tree.src_perm[s], tree.tgt_perm[near.target]);
                if sorted.aliased && a == b {
                    continue;
                }
                return Err(Error::SingularConfiguration { a, b });
            }
            self.split.residual_apply(&x, near.nu, &sorted.strengths[s * ar..(s + 1) * ar], ut);
        }
        Ok(())
    }

    /// Both directions of the residual between the targets of `b` and the
    /// sources of `c` seen through `shift`. With `upper` only pairs `s > t`
    /// are taken (a box against itself).
    fn near_pairs<const D: usize>(&self, tree: &Tree, sorted: &SortedSystem, pair: &Pair, acc: &mut [f64]) -> Result<()> {
        let (b, c) = (&tree.boxes[pair.b], &tree.boxes[pair.c]);
        let ar = sorted.arity;
        let outd = output_len(self.kernel, D);
        let nu = b.side.min(c.side);
        let (nu2, inv_nu) = (nu * nu, 1.0 / nu);
        let (mut ut, mut us) = ([0.0; 3], [0.0; 3]);
        for t in b.tgt.clone() {
            let xt = &sorted.targets[t * D..(t + 1) * D];
            let mut gap2 = 0.0;
            let mut xr = [0.0; D];
            for j in 0..D {
                xr[j] = xt[j] - pair.shift[j] as f64;
                let g = (xr[j] - c.center[j]).abs() - 0.5 * c.side;
                if g > 0.0 {
                    gap2 += g * g;
                }
            }
            if gap2 >= nu2 {
                continue;
            }
            let start = if pair.upper { t + 1 } else { c.src.start };
            let rho_t = &sorted.strengths[t * ar..(t + 1) * ar];
            ut[..outd].fill(0.0);
            for s in start..c.src.end {
                let xs = &sorted.sources[s * D..(s + 1) * D];
                let mut x = [0.0; D];
                let mut r2 = 0.0;
                for j in 0..D {
                    x[j] = xr[j] - xs[j];
                    r2 += x[j] * x[j];
                }
                if r2 >= nu2 {
                    continue;
                }
                if r2 == 0.0 {
                    return Err(Error::SingularConfiguration { a: tree.src_perm[s], b: tree.tgt_perm[t] });
                }
                us[..outd].fill(0.0);
                self.split.residual_apply_pair(&x, r2, nu, inv_nu, &sorted.strengths[s * ar..(s + 1) * ar], &mut ut[..outd], rho_t, &mut us[..outd]);
                for j in 0..outd {
                    acc[s * outd + j] += us[j];
                }
            }
            for j in 0..outd {
                acc[t * outd + j] += ut[j];
            }
        }
        Ok(())
    }

    /// Interpolated far field, neighbor residuals and self terms at every
    /// target, in tree order.
    ///
    /// When the targets are the sources, a pair of leaves that list each
    /// other is visited once and both directions are accumulated, which
    /// halves the radial work. Each worker keeps its own output vector.
    pub fn residual_pass(&self, tree: &Tree, sorted: &SortedSystem, incoming: &ProxyData) -> Result<Vec<f64>> {
        let (d, p) = (self.dim, self.params.p);
        let outd = output_len(self.kernel, d);
        let ar = sorted.arity;
        let n_out = sorted.targets.len() / d * outd;
        let is_target_leaf = |i: usize| tree.boxes[i].is_leaf() && tree.boxes[i].n_targets() > 0;
        let leaves: Vec<usize> = (0..tree.boxes.len()).filter(|&i| is_target_leaf(i)).collect();
        let symmetric = sorted.aliased && tree.src_perm == tree.tgt_perm && tree.boxes.iter().all(|b| b.src == b.tgt);
        let neighbors = |id: usize| {
            let (coll, coarse, fine) = tree.neighbor_query(id);
            coll.iter().filter(|n| tree.boxes[n.id].is_leaf()).chain(coarse).chain(fine)
        };
        let out = leaves
            .par_iter()
            .try_fold(
                || vec![0.0; n_out],
                |mut acc, &id| -> Result<Vec<f64>> {
                    let b = &tree.boxes[id];
                    let mut l = vec![0.0; d * p];
                    let mut y = [0.0; 3];
                    let inc = &incoming.boxes[id];
                    let self_coef = self.split.self_coefficient(b.side);
                    for t in b.tgt.clone() {
                        let xt = &sorted.targets[t * d..(t + 1) * d];
                        let ut = &mut acc[t * outd..(t + 1) * outd];
                        for j in 0..d {
                            y[j] = (xt[j] - b.center[j]) / b.side;
                        }
                        proxy::point_basis(&self.basis, d, &y[..d], &mut l);
                        proxy::interpolate_point(p, d, &l, inc, outd, ut);
                        if sorted.aliased && self.kernel == Kernel::Stokeslet {
                            let f = &sorted.strengths[t * ar..(t + 1) * ar];
                            for j in 0..d {
                                ut[j] += self_coef * f[j];
                            }
                        }
                    }
                    // Neighbor-major order keeps one box's sources in cache
                    // while every target of the leaf visits them.
                    for nb in neighbors(id) {
                        let back: [i32; 3] = nb.shift.map(|v| -v);
                        let reciprocal = symmetric && is_target_leaf(nb.id) && neighbors(nb.id).any(|m| m.id == id && m.shift == back);
                        if reciprocal {
                            if (nb.id, back) < (id, nb.shift) {
                                continue;
                            }
                            let pair = Pair { b: id, c: nb.id, shift: nb.shift, upper: nb.id == id && back == nb.shift };
                            if d == 3 {
                                self.near_pairs::<3>(tree, sorted, &pair, &mut acc)?;
                            } else {
                                self.near_pairs::<2>(tree, sorted, &pair, &mut acc)?;
                            }
                            continue;
                        }
                        let c = &tree.boxes[nb.id];
                        let nu = b.side.min(c.side);
                        let nu2 = nu * nu;
                        for t in b.tgt.clone() {
                            let xt = &sorted.targets[t * d..(t + 1) * d];
                            let mut gap2 = 0.0;
                            for j in 0..d {
                                let g = (xt[j] - c.center[j] - nb.shift[j] as f64).abs() - 0.5 * c.side;
                                if g > 0.0 {
                                    gap2 += g * g;
                                }
                            }
                            if gap2 >= nu2 {
                                continue;
                            }
                            let ut = &mut acc[t * outd..(t + 1) * outd];
                            let mut xr = [0.0; 3];
                            for j in 0..d {
                                xr[j] = xt[j] - nb.shift[j] as f64;
                            }
                            let near = Near { xr, nu, src: c.src.clone(), target: t };
                            if d == 3 {
                                self.near_field::<3>(&near, tree, sorted, ut)?;
                            } else {
                                self.near_field::<2>(&near, tree, sorted, ut)?;
                            }
                        }
                    }
                    Ok(acc)
                },
            )
            .try_reduce(
                || vec![0.0; n_out],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(&b) {
                        *x += y;
                    }
                    Ok(a)
                },
            )?;
        Ok(out)
    }

    /// Evaluates the sum for `sys`, in caller order.
    pub fn evaluate(&self, sys: &ParticleSystem) -> Result<DmkOutput> {
        let d = self.dim;
        let mut timings = Timings::default();
        let t0 = Instant::now();
        let (tree, sorted) = self.prepare(sys)?;
        timings.tree = t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let outgoing = self.upward_pass(&tree, &sorted);
        timings.upward = t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let root = self.root_far_field(&outgoing);
        timings.root = t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let incoming = self.downward_pass(&tree, &outgoing, root);
        drop(outgoing);
        timings.downward = t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let u_sorted = self.residual_pass(&tree, &sorted, &incoming)?;
        let mut potentials = vec![0.0; u_sorted.len()];
        for (k, &i) in tree.tgt_perm.iter().enumerate() {
            potentials[i * d..(i + 1) * d].copy_from_slice(&u_sorted[k * d..(k + 1) * d]);
        }
        if self.mode == Mode::Free && self.kernel == Kernel::Stokeslet {
            let mut total = [0.0; 3];
            for i in 0..sys.n_sources() {
                for (t, f) in total.iter_mut().zip(sys.strength(i)) {
                    *t += f;
                }
            }
            for u in potentials.chunks_mut(d) {
                for j in 0..d {
                    u[j] += self.split.corr_const * total[j];
                }
            }
        }
        if self.mode == Mode::Periodic && self.kernel == Kernel::Stresslet {
            crate::oracle::add_stresslet_zero_mode(sys, &mut potentials);
        }
        timings.residual = t0.elapsed().as_secs_f64();

        Ok(DmkOutput {
            potentials,
            timings,
            levels: tree.levels.len(),
            boxes: tree.boxes.len(),
            leaves: tree.n_leaves(),
        })
    }
}

/// Child half along each axis for child index `ci` (first axis most significant).
fn child_bits(dim: usize, ci: usize) -> [usize; 3] {
    let mut bits = [0; 3];
    for (j, b) in bits.iter_mut().enumerate().take(dim) {
        *b = (ci >> (dim - 1 - j)) & 1;
    }
    bits
}

/// One-shot evaluation with table-driven parameters.
pub fn evaluate(kernel: Kernel, sys: &ParticleSystem, eps: f64, window: WindowKind, mode: Mode) -> Result<Vec<f64>> {
    Ok(DmkPlan::new(kernel, sys.dim, eps, window, mode)?.evaluate(sys)?.potentials)
}

#[cfg(test)]
mod tests;
