//! Binary field files: a 40-byte little-endian header
//! `{"RTMF", version u32, nx1 u32, nx2 u32, dx f64, origin 2 x f64}`
//! followed by `nx1 * nx2` f64 values, x1 fastest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Grid2D, ScalarField};
use crate::error::{Result, RtmError};

pub const FIELD_MAGIC: &[u8; 4] = b"RTMF";
pub const FIELD_VERSION: u32 = 1;

pub(crate) fn put_u32(w: &mut impl Write, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub(crate) fn put_f64(w: &mut impl Write, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub(crate) fn get_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub(crate) fn get_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub(crate) fn expect_magic(r: &mut impl Read, magic: &[u8; 4]) -> Result<()> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    if &b != magic {
        return Err(RtmError::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&b),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

pub(crate) fn get_f64s(r: &mut impl Read, n: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; n * 8];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub(crate) fn put_f64s(w: &mut impl Write, v: &[f64]) -> Result<()> {
    for x in v {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_field_to(w: &mut impl Write, f: &ScalarField) -> Result<()> {
    let g = f.grid();
    w.write_all(FIELD_MAGIC)?;
    put_u32(w, FIELD_VERSION)?;
    put_u32(w, g.nx1 as u32)?;
    put_u32(w, g.nx2 as u32)?;
    put_f64(w, g.dx)?;
    put_f64(w, g.origin.0)?;
    put_f64(w, g.origin.1)?;
    put_f64s(w, f.values())
}

pub fn read_field_from(r: &mut impl Read) -> Result<ScalarField> {
    expect_magic(r, FIELD_MAGIC)?;
    let version = get_u32(r)?;
    if version != FIELD_VERSION {
        return Err(RtmError::Format(format!("unsupported field version {version}")));
    }
    let nx1 = get_u32(r)? as usize;
    let nx2 = get_u32(r)? as usize;
    let dx = get_f64(r)?;
    let o1 = get_f64(r)?;
    let o2 = get_f64(r)?;
    let grid = Grid2D::new(nx1, nx2, dx, (o1, o2))?;
    let values = get_f64s(r, grid.len())?;
    ScalarField::new(grid, values)
}

pub fn write_field(path: impl AsRef<Path>, f: &ScalarField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field_to(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<ScalarField> {
    read_field_from(&mut BufReader::new(File::open(path)?))
}
