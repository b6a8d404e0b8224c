//! `LRMAT1` binary matrix files: the 6-byte magic `LRMAT1`, row and column
//! counts as little-endian `u64`, then `rows * cols` little-endian `f64`
//! values in column-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::dense::DenseMatrix;
use crate::error::{LowRankError, Result};

pub const MAGIC: &[u8; 6] = b"LRMAT1";

pub fn write_matrix<W: Write>(mut w: W, a: &DenseMatrix) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(a.rows() as u64).to_le_bytes())?;
    w.write_all(&(a.cols() as u64).to_le_bytes())?;
    for x in a.as_slice() {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<DenseMatrix> {
    let truncated = |what: &str| LowRankError::format("LRMAT1", format!("truncated {what}"));
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic).map_err(|_| truncated("header"))?;
    if &magic != MAGIC {
        return Err(LowRankError::format("LRMAT1", "bad magic"));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(|_| truncated("header"))?;
    let rows = u64::from_le_bytes(word);
    r.read_exact(&mut word).map_err(|_| truncated("header"))?;
    let cols = u64::from_le_bytes(word);
    let len = rows
        .checked_mul(cols)
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| LowRankError::format("LRMAT1", format!("dimensions {rows}x{cols} too large")))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != len * 8 {
        return Err(if bytes.len() < len * 8 {
            truncated("payload")
        } else {
            LowRankError::format("LRMAT1", "trailing bytes after payload")
        });
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    DenseMatrix::from_col_major(rows as usize, cols as usize, data)
}

pub fn save(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    write_matrix(BufWriter::new(File::create(path)?), a)
}

pub fn load(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    read_matrix(BufReader::new(File::open(path)?))
}
