//! Tensor-product Chebyshev interpolation on proxy grids, in box units
//! (box side 1, centered at the origin).

use crate::numerics::chebyshev_nodes;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct ChebBasis {
    pub p: usize,
    /// Nodes `cos((2i+1) pi / 2p) / 2`, decreasing.
    pub nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `child[b][j * p + i] = L_j(child node i)` for the lower (`b = 0`) and
    /// upper (`b = 1`) child along one axis.
    child: [Vec<f64>; 2],
}

impl ChebBasis {
    pub fn new(p: usize) -> Self {
        let nodes: Vec<f64> = chebyshev_nodes(p).into_iter().map(|x| 0.5 * x).collect();
        let weights = (0..p)
            .map(|i| {
                let s = ((2 * i + 1) as f64 * PI / (2 * p) as f64).sin();
                if i % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();
        let mut basis = ChebBasis { p, nodes, weights, child: [Vec::new(), Vec::new()] };
        let mut l = vec![0.0; p];
        for (b, off) in [-0.25, 0.25].into_iter().enumerate() {
            let mut m = vec![0.0; p * p];
            for i in 0..p {
                basis.lagrange(off + 0.5 * basis.nodes[i], &mut l);
                for j in 0..p {
                    m[j * p + i] = l[j];
                }
            }
            basis.child[b] = m;
        }
        basis
    }

    /// Values of the `p` Lagrange polynomials at `x`.
    #[inline]
    pub fn lagrange(&self, x: f64, out: &mut [f64]) {
        let mut sum = 0.0;
        for i in 0..self.p {
            let dx = x - self.nodes[i];
            if dx == 0.0 {
                out[..self.p].fill(0.0);
                out[i] = 1.0;
                return;
            }
            out[i] = self.weights[i] / dx;
            sum += out[i];
        }
        let inv = 1.0 / sum;
        for v in &mut out[..self.p] {
            *v *= inv;
        }
    }

    pub fn child_matrix(&self, b: usize) -> &[f64] {
        &self.child[b]
    }
}

/// Applies `m` (`p x p`, `out[j] = sum_i m[j*p+i] in[i]` or its transpose)
/// along `axis` of a `p^d` array.
fn apply_axis(dim: usize, p: usize, axis: usize, m: &[f64], transpose: bool, data: &[f64], out: &mut [f64]) {
    let inner = p.pow((dim - 1 - axis) as u32);
    let outer = p.pow(axis as u32);
    out.fill(0.0);
    for o in 0..outer {
        for j in 0..p {
            let dst = (o * p + j) * inner;
            for i in 0..p {
                let c = if transpose { m[i * p + j] } else { m[j * p + i] };
                if c == 0.0 {
                    continue;
                }
                let src = (o * p + i) * inner;
                for t in 0..inner {
                    out[dst + t] += c * data[src + t];
                }
            }
        }
    }
}

/// Adds the child-to-parent anterpolation of `child` (one component) to
/// `parent`; `bits[j]` selects the child half along axis `j`.
pub fn merge_child(basis: &ChebBasis, dim: usize, bits: &[usize], child: &[f64], parent: &mut [f64], scratch: &mut Vec<f64>) {
    transfer(basis, dim, bits, false, child, parent, scratch);
}

/// Adds the parent-to-child interpolation of `parent` to `child`.
pub fn interpolate_to_child(basis: &ChebBasis, dim: usize, bits: &[usize], parent: &[f64], child: &mut [f64], scratch: &mut Vec<f64>) {
    transfer(basis, dim, bits, true, parent, child, scratch);
}

fn transfer(basis: &ChebBasis, dim: usize, bits: &[usize], transpose: bool, input: &[f64], acc: &mut [f64], scratch: &mut Vec<f64>) {
    let p = basis.p;
    let n = p.pow(dim as u32);
    scratch.resize(2 * n, 0.0);
    let (a, b) = scratch.split_at_mut(n);
    a.copy_from_slice(&input[..n]);
    for axis in 0..dim {
        apply_axis(dim, p, axis, basis.child_matrix(bits[axis]), transpose, a, b);
        a.copy_from_slice(b);
    }
    for (x, y) in acc.iter_mut().zip(a.iter()) {
        *x += y;
    }
}

/// Per-point tensor weights: `L[j][i]` for axis `j`, point in box units.
#[inline]
pub fn point_basis(basis: &ChebBasis, dim: usize, y: &[f64], l: &mut [f64]) {
    let p = basis.p;
    for j in 0..dim {
        basis.lagrange(y[j], &mut l[j * p..(j + 1) * p]);
    }
}

/// Adds `w(y) * rho[c]` to component `c` of `q` (component-major, `p^d` each).
#[inline]
pub fn anterpolate_point(p: usize, dim: usize, l: &[f64], rho: &[f64], q: &mut [f64]) {
    let n = p.pow(dim as u32);
    if dim == 2 {
        for i1 in 0..p {
            let a = l[i1];
            for i2 in 0..p {
                let w = a * l[p + i2];
                let k = i1 * p + i2;
                for (c, r) in rho.iter().enumerate() {
                    q[c * n + k] += w * r;
                }
            }
        }
    } else {
        for i1 in 0..p {
            let a = l[i1];
            for i2 in 0..p {
                let b = a * l[p + i2];
                let base = (i1 * p + i2) * p;
                for (c, r) in rho.iter().enumerate() {
                    let br = b * r;
                    let row = &mut q[c * n + base..c * n + base + p];
                    for (i3, v) in row.iter_mut().enumerate() {
                        *v += br * l[2 * p + i3];
                    }
                }
            }
        }
    }
}

/// Adds the interpolant of `u` (component-major) at one point to `out`.
#[inline]
pub fn interpolate_point(p: usize, dim: usize, l: &[f64], u: &[f64], ncomp: usize, out: &mut [f64]) {
    let n = p.pow(dim as u32);
    for c in 0..ncomp {
        let uc = &u[c * n..(c + 1) * n];
        let mut s = 0.0;
        if dim == 2 {
            for i1 in 0..p {
                let mut t = 0.0;
                for i2 in 0..p {
                    t += l[p + i2] * uc[i1 * p + i2];
                }
                s += l[i1] * t;
            }
        } else {
            for i1 in 0..p {
                let mut t1 = 0.0;
                for i2 in 0..p {
                    let row = &uc[(i1 * p + i2) * p..(i1 * p + i2 + 1) * p];
                    let mut t2 = 0.0;
                    for i3 in 0..p {
                        t2 += l[2 * p + i3] * row[i3];
                    }
                    t1 += l[p + i2] * t2;
                }
                s += l[i1] * t1;
            }
        }
        out[c] += s;
    }
}
