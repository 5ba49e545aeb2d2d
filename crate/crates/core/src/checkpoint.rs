//! `LPNS` field checkpoints.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `b"LPNS"` |
//! | 4     | `u32` version, currently 1 |
//! | 4     | `u32` dimension `d` |
//! | 4     | `u32` points per axis `n` |
//! | 8     | `f64` period |
//! | 8·d·n^d | `f64` collocation values, component-major, each component row-major |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::RealVectorField;
use crate::grid::Grid;

pub const MAGIC: &[u8; 4] = b"LPNS";
pub const VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(mut w: W, field: &RealVectorField) -> Result<()> {
    let grid = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.period().to_le_bytes())?;
    for comp in field.values() {
        for x in comp {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<RealVectorField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Checkpoint("truncated header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint(format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let dim = read_u32(&mut r)? as usize;
    let n = read_u32(&mut r)? as usize;
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)
        .map_err(|_| Error::Checkpoint("truncated header".into()))?;
    let period = f64::from_le_bytes(buf);
    let grid = Grid::new(dim, n, period).map_err(|e| Error::Checkpoint(e.to_string()))?;

    let mut values = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut comp = vec![0.0; grid.len()];
        for x in comp.iter_mut() {
            r.read_exact(&mut buf)
                .map_err(|_| Error::Checkpoint("truncated payload".into()))?;
            *x = f64::from_le_bytes(buf);
        }
        values.push(comp);
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Checkpoint("trailing bytes after payload".into()));
    }
    RealVectorField::new(&grid, values)
}

pub fn save(path: impl AsRef<Path>, field: &RealVectorField) -> Result<()> {
    write_checkpoint(BufWriter::new(File::create(path)?), field)
}

pub fn load(path: impl AsRef<Path>) -> Result<RealVectorField> {
    read_checkpoint(BufReader::new(File::open(path)?))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| Error::Checkpoint("truncated header".into()))?;
    Ok(u32::from_le_bytes(buf))
}
