//! Reference evaluators: direct sums of the exact kernels, residual-only
//! sums, and a slow single-level Ewald reference.

mod direct;
mod ewald;

pub use direct::{direct_residual_sum, direct_sum};
pub use ewald::{ewald_reference, EwaldGrid};
pub(crate) use ewald::add_stresslet_zero_mode;

use crate::error::{Error, Result};
use crate::split::{strength_len, Kernel};
use std::fmt;
use std::str::FromStr;

/// Free-space or unit-cell periodic summation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Free,
    Periodic,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Free => "free",
            Mode::Periodic => "periodic",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "free" => Ok(Mode::Free),
            "periodic" => Ok(Mode::Periodic),
            _ => Err(Error::InvalidArgument(format!("unknown mode {s:?}"))),
        }
    }
}

/// Sources, targets and strengths in the unit box `[-1/2, 1/2]^d`.
///
/// Coordinates are stored flat, `d` per point. Strengths are stored flat
/// with the per-kernel arity of [`strength_len`]: `f` for the Stokeslet,
/// `f` followed by `n` for the stresslet, the torque for the rotlet.
/// `targets == None` means targets alias sources, and the self pair is
/// skipped.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSystem {
    pub dim: usize,
    pub sources: Vec<f64>,
    pub targets: Option<Vec<f64>>,
    pub strengths: Vec<f64>,
}

fn check_coords(dim: usize, pts: &[f64], what: &str) -> Result<()> {
    if !pts.len().is_multiple_of(dim) {
        return Err(Error::InvalidArgument(format!("{what} length {} is not a multiple of {dim}", pts.len())));
    }
    if let Some(v) = pts.iter().find(|v| !(v.is_finite() && (-0.5..=0.5).contains(*v))) {
        return Err(Error::InvalidArgument(format!("{what} coordinate {v} outside the unit box")));
    }
    Ok(())
}

/// Maps each coordinate into `[-1/2, 1/2)` by integer shifts.
pub fn wrap_into_cell(coords: &mut [f64]) {
    for v in coords {
        *v -= (*v + 0.5).floor();
        if *v >= 0.5 {
            *v -= 1.0;
        }
    }
}

impl ParticleSystem {
    pub fn new(dim: usize, sources: Vec<f64>, targets: Option<Vec<f64>>, strengths: Vec<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidArgument(format!("dimension {dim}")));
        }
        check_coords(dim, &sources, "source")?;
        if let Some(t) = &targets {
            check_coords(dim, t, "target")?;
        }
        let n = sources.len() / dim;
        if n == 0 {
            return Err(Error::InvalidArgument("no sources".into()));
        }
        if !strengths.len().is_multiple_of(n) {
            return Err(Error::InvalidArgument(format!("{} strengths for {n} sources", strengths.len())));
        }
        if strengths.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite strength".into()));
        }
        Ok(ParticleSystem { dim, sources, targets, strengths })
    }

    /// Like [`ParticleSystem::new`] but wraps coordinates into the unit cell first.
    pub fn new_periodic(dim: usize, mut sources: Vec<f64>, targets: Option<Vec<f64>>, strengths: Vec<f64>) -> Result<Self> {
        wrap_into_cell(&mut sources);
        let targets = targets.map(|mut t| {
            wrap_into_cell(&mut t);
            t
        });
        Self::new(dim, sources, targets, strengths)
    }

    pub fn n_sources(&self) -> usize {
        self.sources.len() / self.dim
    }

    pub fn n_targets(&self) -> usize {
        self.target_coords().len() / self.dim
    }

    pub fn aliased(&self) -> bool {
        self.targets.is_none()
    }

    pub fn target_coords(&self) -> &[f64] {
        self.targets.as_deref().unwrap_or(&self.sources)
    }

    pub fn source(&self, i: usize) -> &[f64] {
        &self.sources[i * self.dim..(i + 1) * self.dim]
    }

    pub fn target(&self, i: usize) -> &[f64] {
        &self.target_coords()[i * self.dim..(i + 1) * self.dim]
    }

    pub fn arity(&self) -> usize {
        self.strengths.len() / self.n_sources()
    }

    pub fn strength(&self, i: usize) -> &[f64] {
        let a = self.arity();
        &self.strengths[i * a..(i + 1) * a]
    }

    /// Checks that the strength layout fits `kernel`.
    pub fn check_kernel(&self, kernel: Kernel) -> Result<()> {
        if !matches!(kernel, Kernel::Stokeslet | Kernel::Stresslet | Kernel::Rotlet) {
            return Err(Error::Unsupported(format!("{} sums", kernel.name())));
        }
        let want = strength_len(kernel, self.dim);
        if self.arity() != want {
            return Err(Error::InvalidArgument(format!(
                "{} in {}D needs {want} strength components per source, got {}",
                kernel.name(),
                self.dim,
                self.arity()
            )));
        }
        Ok(())
    }

    /// Every point translated by `v` and wrapped back into the unit cell.
    pub fn translated(&self, v: &[f64]) -> Self {
        let shift = |pts: &[f64]| {
            let mut out: Vec<f64> = pts.iter().enumerate().map(|(i, x)| x + v[i % self.dim]).collect();
            wrap_into_cell(&mut out);
            out
        };
        ParticleSystem {
            dim: self.dim,
            sources: shift(&self.sources),
            targets: self.targets.as_deref().map(shift),
            strengths: self.strengths.clone(),
        }
    }

    /// Same geometry with new strengths.
    pub fn with_strengths(&self, strengths: Vec<f64>) -> Result<Self> {
        Self::new(self.dim, self.sources.clone(), self.targets.clone(), strengths)
    }
}

/// Neumaier-compensated accumulator for a small vector.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Compensated {
    sum: [f64; 3],
    comp: [f64; 3],
}

impl Compensated {
    #[inline]
    pub(crate) fn add(&mut self, v: &[f64]) {
        for (j, &x) in v.iter().enumerate() {
            let s = self.sum[j];
            let t = s + x;
            if s.abs() >= x.abs() {
                self.comp[j] += (s - t) + x;
            } else {
                self.comp[j] += (x - t) + s;
            }
            self.sum[j] = t;
        }
    }

    #[inline]
    pub(crate) fn value(&self, j: usize) -> f64 {
        self.sum[j] + self.comp[j]
    }
}

/// Relative l2 error `|a - b| / |b|`.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}
