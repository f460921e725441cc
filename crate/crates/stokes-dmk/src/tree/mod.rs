//! Adaptive level-restricted `2^d`-tree with colleague, coarse and fine
//! neighbor lists, in free-space and periodic variants.
//!
//! Boxes are half-open, `[lo, hi)` per dimension, except that the upper
//! face of the unit box belongs to the root. Subdivision counts sources
//! only. Points are reordered into Morton order; `src_perm[i]` is the
//! caller index of the `i`-th sorted source (likewise `tgt_perm`).

use crate::error::{Error, Result};
use crate::numerics::chebyshev_nodes;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::ops::Range;

/// Depth cap guarding against duplicate points.
pub const LEVEL_CAP: usize = 30;

/// A box reference with the lattice shift of the periodic image it stands
/// for (always zero in free space).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Neighbor {
    pub id: usize,
    pub shift: [i32; 3],
}

#[derive(Clone, Debug)]
pub struct TreeBox {
    pub level: usize,
    /// Integer position among the `2^level` boxes per dimension.
    pub coords: [u32; 3],
    pub center: [f64; 3],
    pub side: f64,
    pub parent: Option<usize>,
    /// Children are stored contiguously from this index.
    pub first_child: Option<usize>,
    pub src: Range<usize>,
    pub tgt: Range<usize>,
}

impl TreeBox {
    pub fn is_leaf(&self) -> bool {
        self.first_child.is_none()
    }

    pub fn n_sources(&self) -> usize {
        self.src.len()
    }

    pub fn n_targets(&self) -> usize {
        self.tgt.len()
    }
}

#[derive(Clone, Debug)]
pub struct Tree {
    pub dim: usize,
    pub periodic: bool,
    pub n_s: usize,
    pub proxy_order: usize,
    pub boxes: Vec<TreeBox>,
    /// Box ids per level.
    pub levels: Vec<Vec<usize>>,
    pub src_perm: Vec<usize>,
    pub tgt_perm: Vec<usize>,
    pub colleagues: Vec<Vec<Neighbor>>,
    /// Adjacent leaves one level coarser (leaves only).
    pub coarse: Vec<Vec<Neighbor>>,
    /// Adjacent leaves one level finer (leaves only).
    pub fine: Vec<Vec<Neighbor>>,
    pub warnings: Vec<String>,
    keys: HashMap<(usize, [u32; 3]), usize>,
}

struct Builder<'a> {
    dim: usize,
    sources: &'a [f64],
    targets: &'a [f64],
    boxes: Vec<TreeBox>,
    src_perm: Vec<usize>,
    tgt_perm: Vec<usize>,
    keys: HashMap<(usize, [u32; 3]), usize>,
}

fn child_index(dim: usize, x: &[f64], center: &[f64; 3]) -> usize {
    let mut c = 0;
    for j in 0..dim {
        c = (c << 1) | usize::from(x[j] >= center[j]);
    }
    c
}

/// Stable partition of `perm` into `2^d` buckets; returns bucket offsets.
fn partition(dim: usize, pts: &[f64], perm: &mut [usize], center: &[f64; 3]) -> Vec<usize> {
    let nc = 1 << dim;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for &i in perm.iter() {
        buckets[child_index(dim, &pts[i * dim..(i + 1) * dim], center)].push(i);
    }
    let mut offsets = vec![0; nc + 1];
    let mut k = 0;
    for (c, b) in buckets.into_iter().enumerate() {
        for i in b {
            perm[k] = i;
            k += 1;
        }
        offsets[c + 1] = k;
    }
    offsets
}

impl Builder<'_> {
    fn subdivide(&mut self, id: usize) {
        let dim = self.dim;
        let parent = self.boxes[id].clone();
        let so = partition(dim, self.sources, &mut self.src_perm[parent.src.clone()], &parent.center);
        let to = partition(dim, self.targets, &mut self.tgt_perm[parent.tgt.clone()], &parent.center);
        let first = self.boxes.len();
        let side = parent.side / 2.0;
        for c in 0..(1 << dim) {
            let mut coords = [0u32; 3];
            let mut center = [0.0; 3];
            for j in 0..dim {
                let bit = ((c >> (dim - 1 - j)) & 1) as u32;
                coords[j] = 2 * parent.coords[j] + bit;
                center[j] = -0.5 + (coords[j] as f64 + 0.5) * side;
            }
            self.keys.insert((parent.level + 1, coords), first + c);
            self.boxes.push(TreeBox {
                level: parent.level + 1,
                coords,
                center,
                side,
                parent: Some(id),
                first_child: None,
                src: parent.src.start + so[c]..parent.src.start + so[c + 1],
                tgt: parent.tgt.start + to[c]..parent.tgt.start + to[c + 1],
            });
        }
        self.boxes[id].first_child = Some(first);
    }
}

/// Wraps raw integer coordinates at `level`; `None` outside the unit box in
/// free space. Returns the wrapped coordinates and the lattice shift.
fn resolve(dim: usize, periodic: bool, level: usize, raw: [i64; 3]) -> Option<([u32; 3], [i32; 3])> {
    let n = 1i64 << level;
    let mut w = [0u32; 3];
    let mut s = [0i32; 3];
    for j in 0..dim {
        if periodic {
            w[j] = raw[j].rem_euclid(n) as u32;
            s[j] = raw[j].div_euclid(n) as i32;
        } else {
            if raw[j] < 0 || raw[j] >= n {
                return None;
            }
            w[j] = raw[j] as u32;
        }
    }
    Some((w, s))
}

fn offsets(dim: usize) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for a in -1..=1 {
        for b in -1..=1 {
            if dim == 2 {
                out.push([a, b, 0]);
            } else {
                for c in -1..=1 {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn raw_neighbor(b: &TreeBox, o: &[i64; 3]) -> [i64; 3] {
    [b.coords[0] as i64 + o[0], b.coords[1] as i64 + o[1], b.coords[2] as i64 + o[2]]
}

/// Deepest existing box at or above `level` covering the cell `w`.
fn covering(keys: &HashMap<(usize, [u32; 3]), usize>, dim: usize, level: usize, w: [u32; 3]) -> (usize, usize) {
    let mut l = level;
    loop {
        let mut c = [0u32; 3];
        for j in 0..dim {
            c[j] = w[j] >> (level - l);
        }
        if let Some(&id) = keys.get(&(l, c)) {
            return (l, id);
        }
        l -= 1;
    }
}

/// Builds the tree over `sources` and `targets` (flat, `dim` per point;
/// `None` aliases the sources) with at most `n_s` sources per leaf.
pub fn build_tree(dim: usize, sources: &[f64], targets: Option<&[f64]>, n_s: usize, periodic: bool, p: usize) -> Result<Tree> {
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidArgument(format!("dimension {dim}")));
    }
    if n_s == 0 || p == 0 {
        return Err(Error::InvalidArgument("leaf capacity and proxy order must be positive".into()));
    }
    let targets = targets.unwrap_or(sources);
    for v in sources.iter().chain(targets) {
        if !(v.is_finite() && (-0.5..=0.5).contains(v)) {
            return Err(Error::InvalidArgument(format!("coordinate {v} outside the unit box")));
        }
    }
    let ns = sources.len() / dim;
    let nt = targets.len() / dim;
    let mut b = Builder {
        dim,
        sources,
        targets,
        boxes: vec![TreeBox {
            level: 0,
            coords: [0; 3],
            center: [0.0; 3],
            side: 1.0,
            parent: None,
            first_child: None,
            src: 0..ns,
            tgt: 0..nt,
        }],
        src_perm: (0..ns).collect(),
        tgt_perm: (0..nt).collect(),
        keys: HashMap::from([((0, [0; 3]), 0)]),
    };
    let mut warnings = Vec::new();
    let mut i = 0;
    while i < b.boxes.len() {
        if b.boxes[i].n_sources() > n_s {
            if b.boxes[i].level < LEVEL_CAP {
                b.subdivide(i);
            } else if warnings.is_empty() {
                warnings.push(format!("depth capped at level {LEVEL_CAP}; leaf holds {} sources", b.boxes[i].n_sources()));
            }
        }
        i += 1;
    }
    balance(&mut b, periodic);
    let Builder { boxes, src_perm, tgt_perm, keys, .. } = b;
    let mut tree = Tree {
        dim,
        periodic,
        n_s,
        proxy_order: p,
        boxes,
        levels: Vec::new(),
        src_perm,
        tgt_perm,
        colleagues: Vec::new(),
        coarse: Vec::new(),
        fine: Vec::new(),
        warnings,
        keys,
    };
    tree.index_levels();
    tree.build_neighbors();
    Ok(tree)
}

/// 2:1 balancing: refine any leaf adjacent to a leaf more than one level finer.
fn balance(b: &mut Builder, periodic: bool) {
    let dim = b.dim;
    let offs = offsets(dim);
    loop {
        let mut violators = Vec::new();
        let mut seen = HashSet::new();
        for bx in b.boxes.iter().filter(|x| x.is_leaf() && x.level >= 2) {
            for o in &offs {
                let Some((w, _)) = resolve(dim, periodic, bx.level, raw_neighbor(bx, o)) else { continue };
                let (l, id) = covering(&b.keys, dim, bx.level, w);
                if l + 1 < bx.level && seen.insert(id) {
                    violators.push(id);
                }
            }
        }
        if violators.is_empty() {
            break;
        }
        violators.sort_unstable();
        for id in violators {
            b.subdivide(id);
        }
    }
}

impl Tree {
    fn index_levels(&mut self) {
        let depth = self.boxes.iter().map(|b| b.level).max().unwrap_or(0);
        self.levels = vec![Vec::new(); depth + 1];
        for (i, b) in self.boxes.iter().enumerate() {
            self.levels[b.level].push(i);
        }
    }

    fn build_neighbors(&mut self) {
        let dim = self.dim;
        let offs = offsets(dim);
        let nb = self.boxes.len();
        self.colleagues = vec![Vec::new(); nb];
        self.coarse = vec![Vec::new(); nb];
        self.fine = vec![Vec::new(); nb];
        for id in 0..nb {
            let bx = &self.boxes[id];
            for o in &offs {
                let Some((w, shift)) = resolve(dim, self.periodic, bx.level, raw_neighbor(bx, o)) else { continue };
                if let Some(&c) = self.keys.get(&(bx.level, w)) {
                    self.colleagues[id].push(Neighbor { id: c, shift });
                    if bx.is_leaf() && *o != [0; 3] {
                        if let Some(first) = self.boxes[c].first_child {
                            for ch in 0..(1usize << dim) {
                                let adjacent = (0..dim).all(|j| {
                                    let bit = (ch >> (dim - 1 - j)) & 1;
                                    match o[j] {
                                        1 => bit == 0,
                                        -1 => bit == 1,
                                        _ => true,
                                    }
                                });
                                if adjacent {
                                    self.fine[id].push(Neighbor { id: first + ch, shift });
                                }
                            }
                        }
                    }
                } else if bx.is_leaf() && bx.level > 0 {
                    let mut pc = [0u32; 3];
                    for j in 0..dim {
                        pc[j] = w[j] >> 1;
                    }
                    if let Some(&c) = self.keys.get(&(bx.level - 1, pc)) {
                        let n = Neighbor { id: c, shift };
                        if !self.coarse[id].contains(&n) {
                            self.coarse[id].push(n);
                        }
                    }
                }
            }
        }
    }

    /// Deepest level present.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn n_leaves(&self) -> usize {
        self.boxes.iter().filter(|b| b.is_leaf()).count()
    }

    pub fn children(&self, id: usize) -> Range<usize> {
        match self.boxes[id].first_child {
            Some(f) => f..f + (1 << self.dim),
            None => 0..0,
        }
    }

    /// Box id at `level` with integer coordinates `coords`, if present.
    pub fn find(&self, level: usize, coords: [u32; 3]) -> Option<usize> {
        self.keys.get(&(level, coords)).copied()
    }

    /// Colleagues, coarse neighbors and fine neighbors of `id`.
    pub fn neighbor_query(&self, id: usize) -> (&[Neighbor], &[Neighbor], &[Neighbor]) {
        (&self.colleagues[id], &self.coarse[id], &self.fine[id])
    }

    /// Tensor-product Chebyshev proxy points of box `id`, first dimension
    /// slowest.
    pub fn proxy_nodes(&self, id: usize) -> Vec<f64> {
        let b = &self.boxes[id];
        let x = chebyshev_nodes(self.proxy_order);
        let p = self.proxy_order;
        let d = self.dim;
        let total = p.pow(d as u32);
        let mut out = Vec::with_capacity(total * d);
        for flat in 0..total {
            let mut rem = flat;
            let mut idx = [0usize; 3];
            for j in (0..d).rev() {
                idx[j] = rem % p;
                rem /= p;
            }
            for j in 0..d {
                out.push(b.center[j] + 0.5 * b.side * x[idx[j]]);
            }
        }
        out
    }

    /// Line-oriented text dump for golden tests.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tree dim={} periodic={} n_s={} p={} boxes={} depth={}", self.dim, self.periodic, self.n_s, self.proxy_order, self.boxes.len(), self.depth());
        let fmt_list = |v: &[Neighbor]| {
            v.iter()
                .map(|n| {
                    if n.shift == [0; 3] {
                        n.id.to_string()
                    } else {
                        format!("{}@{},{},{}", n.id, n.shift[0], n.shift[1], n.shift[2])
                    }
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        for (i, b) in self.boxes.iter().enumerate() {
            let c: Vec<String> = b.center[..self.dim].iter().map(|v| format!("{v:.6}")).collect();
            let _ = writeln!(
                s,
                "box {i} level {} center {} src {} tgt {} leaf {} colleagues [{}] coarse [{}] fine [{}]",
                b.level,
                c.join(","),
                b.n_sources(),
                b.n_targets(),
                u8::from(b.is_leaf()),
                fmt_list(&self.colleagues[i]),
                fmt_list(&self.coarse[i]),
                fmt_list(&self.fine[i]),
            );
        }
        s
    }
}
