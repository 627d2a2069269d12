//! Binary matrix dump for debugging.
//!
//! Layout, all little-endian: `b"LCH1"`, `dim: u32`, `k: f64`, `spin: i32`,
//! then `dim * dim` row-major `f64` entries.

use std::io::{Read, Write};

use nalgebra::DMatrix;

use super::matrix::HamiltonianMatrix;
use crate::model::Spin;

pub const DUMP_MAGIC: &[u8; 4] = b"LCH1";

pub fn write_matrix_dump<W: Write>(matrix: &HamiltonianMatrix, mut out: W) -> std::io::Result<()> {
    let dim = matrix.dim();
    let dim32 = u32::try_from(dim).map_err(|_| {
        std::io::Error::new(std::io::ErrorKind::InvalidInput, "dimension exceeds u32")
    })?;
    out.write_all(DUMP_MAGIC)?;
    out.write_all(&dim32.to_le_bytes())?;
    out.write_all(&matrix.k.to_le_bytes())?;
    out.write_all(&matrix.spin.as_i32().to_le_bytes())?;
    for r in 0..dim {
        for c in 0..dim {
            out.write_all(&matrix.entries[(r, c)].to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_matrix_dump<R: Read>(mut input: R) -> std::io::Result<HamiltonianMatrix> {
    let invalid = |msg: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, msg.to_string());
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(invalid("bad magic"));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b4)?;
    let dim = u32::from_le_bytes(b4) as usize;
    input.read_exact(&mut b8)?;
    let k = f64::from_le_bytes(b8);
    input.read_exact(&mut b4)?;
    let spin =
        Spin::from_i32(i32::from_le_bytes(b4)).ok_or_else(|| invalid("spin must be +1 or -1"))?;
    let mut values = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        input.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    Ok(HamiltonianMatrix {
        k,
        spin,
        entries: DMatrix::from_row_slice(dim, dim, &values),
    })
}
