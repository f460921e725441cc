//! On-disk cache of prolate Legendre coefficients.
//!
//! Enabled by setting `STOKES_DMK_CACHE_DIR`. Layout: 8-byte magic,
//! `u32` version, `f64` c, `u64` count, then `count` `f64` values, all
//! little-endian.

use crate::error::{Error, Result};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const CACHE_ENV: &str = "STOKES_DMK_CACHE_DIR";
const MAGIC: &[u8; 8] = b"PSWFLEG\0";
const VERSION: u32 = 1;
/// Relative coefficient truncation used by the solver; part of the cache key.
pub const COEFF_TOL: f64 = 1e-16;

fn cache_path(dir: &Path, c: f64) -> PathBuf {
    dir.join(format!("pswf_c{:016x}_tol{:e}.bin", c.to_bits(), COEFF_TOL))
}

pub fn write_coefficients(path: &Path, c: f64, coeffs: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(28 + 8 * coeffs.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&c.to_le_bytes());
    buf.extend_from_slice(&(coeffs.len() as u64).to_le_bytes());
    for a in coeffs {
        buf.extend_from_slice(&a.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    fs::File::create(&tmp)?.write_all(&buf)?;
    fs::rename(tmp, path)?;
    Ok(())
}

pub fn read_coefficients(path: &Path) -> Result<(f64, Vec<f64>)> {
    let bytes = fs::read(path)?;
    if bytes.len() < 28 || &bytes[..8] != MAGIC {
        return Err(Error::Format("missing prolate cache magic".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Format(format!("unsupported cache version {version}")));
    }
    let c = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let count = u64::from_le_bytes(bytes[20..28].try_into().unwrap()) as usize;
    if bytes.len() != 28 + 8 * count {
        return Err(Error::Format("prolate cache length mismatch".into()));
    }
    let coeffs = bytes[28..].chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    Ok((c, coeffs))
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|s| !s.is_empty()).map(PathBuf::from)
}

/// Cached coefficients for `c`, if the cache is enabled and holds a valid entry.
pub fn lookup(c: f64) -> Result<Option<Vec<f64>>> {
    let Some(dir) = cache_dir() else { return Ok(None) };
    let path = cache_path(&dir, c);
    if !path.exists() {
        return Ok(None);
    }
    match read_coefficients(&path) {
        Ok((cc, a)) if cc.to_bits() == c.to_bits() => Ok(Some(a)),
        // stale or corrupt entries are recomputed and overwritten
        _ => Ok(None),
    }
}

pub fn store(c: f64, coeffs: &[f64]) -> Result<()> {
    let Some(dir) = cache_dir() else { return Ok(()) };
    fs::create_dir_all(&dir)?;
    write_coefficients(&cache_path(&dir, c), c, coeffs)
}
