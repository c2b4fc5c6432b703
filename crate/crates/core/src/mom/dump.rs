//! `KMOM1` container for complex matrices.
//!
//! Layout, all little-endian:
//!
//! ```text
//! b"KMOM1" | rows: u64 | cols: u64 | rows*cols × (re: f64, im: f64), row-major
//! ```

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 5] = b"KMOM1";

/// Writes a `rows × cols` matrix given by `at(i, j)`.
pub fn write_kmom1<W: Write>(
    mut w: W,
    rows: usize,
    cols: usize,
    at: impl Fn(usize, usize) -> Complex64,
) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(rows as u64).to_le_bytes())?;
    w.write_all(&(cols as u64).to_le_bytes())?;
    let mut row = Vec::with_capacity(cols * 16);
    for i in 0..rows {
        row.clear();
        for j in 0..cols {
            let c = at(i, j);
            row.extend_from_slice(&c.re.to_le_bytes());
            row.extend_from_slice(&c.im.to_le_bytes());
        }
        w.write_all(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a matrix back as `(rows, cols, row-major data)`.
pub fn read_kmom1<R: Read>(mut r: R) -> Result<(usize, usize, Vec<Complex64>)> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "not a KMOM1 file",
        )));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let count = rows.checked_mul(cols).ok_or_else(|| {
        Error::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "dimensions overflow",
        ))
    })?;
    let mut data = Vec::with_capacity(count.min(1 << 24));
    let mut pair = [0u8; 16];
    for _ in 0..count {
        r.read_exact(&mut pair)?;
        let re = f64::from_le_bytes(pair[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(pair[8..].try_into().expect("8 bytes"));
        data.push(Complex64::new(re, im));
    }
    Ok((rows, cols, data))
}
