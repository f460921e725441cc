//! Versioned binary import/export of split-kernel tables.
//!
//! Layout (little-endian): magic `STKSPLIT`, `u32` version, `u8` kernel id,
//! `u8` dim, `u8` window kind, `u8` reserved, `f64` window parameter
//! (c or sigma), `f64` tol, `f64` self constant, `f64` corr constant,
//! `f64` rmax, `u64` panels, `u64` coefficients per panel, `u64` function
//! count, then the coefficient blocks.

use super::{Kernel, Mollifier, SplitKernel};
use crate::error::{Error, Result};
use crate::numerics::ChebTable;
use crate::windows::{WindowFunction, WindowKind};
use std::fs;
use std::path::Path;

const MAGIC: &[u8; 8] = b"STKSPLIT";
const VERSION: u32 = 1;

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Format("truncated split table".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn to_bytes(sk: &SplitKernel) -> Result<Vec<u8>> {
    let table = sk
        .radial_tables
        .as_ref()
        .ok_or_else(|| Error::Unsupported(format!("{} split has no tables", sk.kernel.name())))?;
    let w = sk.window();
    let mut b = Vec::new();
    b.extend_from_slice(MAGIC);
    b.extend_from_slice(&VERSION.to_le_bytes());
    b.push(sk.kernel.id());
    b.push(sk.dim as u8);
    b.push(match w.kind {
        WindowKind::Prolate => 0,
        WindowKind::Gaussian => 1,
    });
    b.push(0);
    let param = match w.kind {
        WindowKind::Prolate => w.c,
        WindowKind::Gaussian => w.sigma,
    };
    for v in [param, sk.tol, sk.self_const, sk.corr_const, table.rmax()] {
        b.extend_from_slice(&v.to_le_bytes());
    }
    for v in [table.panels(), table.ncoef(), table.nfun()] {
        b.extend_from_slice(&(v as u64).to_le_bytes());
    }
    for c in table.coeffs() {
        b.extend_from_slice(&c.to_le_bytes());
    }
    Ok(b)
}

pub fn from_bytes(bytes: &[u8]) -> Result<SplitKernel> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Format("missing split table magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported split table version {version}")));
    }
    let kernel = Kernel::from_id(r.u8()?).ok_or_else(|| Error::Format("unknown kernel id".into()))?;
    let dim = r.u8()? as usize;
    let kind = r.u8()?;
    r.u8()?;
    let param = r.f64()?;
    let tol = r.f64()?;
    let self_const = r.f64()?;
    let corr_const = r.f64()?;
    let rmax = r.f64()?;
    let panels = r.u64()? as usize;
    let ncoef = r.u64()? as usize;
    let nfun = r.u64()? as usize;
    let count = panels
        .checked_mul(ncoef)
        .and_then(|v| v.checked_mul(nfun))
        .ok_or_else(|| Error::Format("table dimensions overflow".into()))?;
    if bytes.len() != r.pos + 8 * count {
        return Err(Error::Format("split table length mismatch".into()));
    }
    let mut coeffs = Vec::with_capacity(count);
    for _ in 0..count {
        coeffs.push(r.f64()?);
    }
    let window = match kind {
        0 => WindowFunction::prolate(param)?,
        1 => WindowFunction::gaussian(param)?,
        _ => return Err(Error::Format(format!("unknown window kind {kind}"))),
    };
    if dim != 2 && dim != 3 {
        return Err(Error::Format(format!("dimension {dim}")));
    }
    Ok(SplitKernel {
        kernel,
        dim,
        mollifier: Mollifier::new(window),
        radial_tables: Some(ChebTable::from_parts(rmax, panels, ncoef, nfun, coeffs)?),
        self_const,
        window_radius_r: super::window_radius(dim),
        corr_const,
        tol,
    })
}

pub fn export_tables(sk: &SplitKernel, path: &Path) -> Result<()> {
    fs::write(path, to_bytes(sk)?)?;
    Ok(())
}

pub fn import_tables(path: &Path) -> Result<SplitKernel> {
    from_bytes(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::split::build_split_kernel;

    #[test]
    fn roundtrip_preserves_evaluation() {
        let sk = build_split_kernel(Kernel::Stresslet, 3, WindowFunction::prolate(15.0).unwrap(), 1e-10).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.bin");
        export_tables(&sk, &p).unwrap();
        let back = import_tables(&p).unwrap();
        for i in 1..20 {
            let r = i as f64 / 20.0;
            assert_eq!(sk.residual_functions(r), back.residual_functions(r));
        }
        assert_eq!(back.kernel, Kernel::Stresslet);
    }

    #[test]
    fn corrupt_input_is_rejected() {
        assert!(from_bytes(b"STKSPLIT").is_err());
        assert!(from_bytes(&[0u8; 100]).is_err());
    }
}
