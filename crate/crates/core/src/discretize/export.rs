//! `SECM` binary container and CSV diagonal dumps.
//!
//! Layout (little endian): `b"SECM"`, `u32` version, `u32` kind code,
//! `u32` dimension, per axis `f64 lower, f64 upper, f64 n`, then `u64` rows,
//! `u64` cols, then row-major interleaved `(re, im)` doubles.

use std::io::{self, Read, Write};

use num_complex::Complex;

use super::assemble::{AssembledOperator, CMatrix, OperatorKind};
use super::grid::{Axis, Grid};
use crate::scalar::Real;

pub const MAGIC: &[u8; 4] = b"SECM";
pub const VERSION: u32 = 1;

pub fn write_secm<T: Real, W: Write>(op: &AssembledOperator<T>, mut w: W) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&op.kind.code().to_le_bytes())?;
    w.write_all(&(op.grid.dimension() as u32).to_le_bytes())?;
    for a in &op.grid.axes {
        for v in [a.lower.to_f64_lossy(), a.upper.to_f64_lossy(), a.n as f64] {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    let (r, c) = op.matrix.dim();
    w.write_all(&(r as u64).to_le_bytes())?;
    w.write_all(&(c as u64).to_le_bytes())?;
    for z in op.matrix.iter() {
        w.write_all(&z.re.to_f64_lossy().to_le_bytes())?;
        w.write_all(&z.im.to_f64_lossy().to_le_bytes())?;
    }
    w.flush()
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn bad(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

/// Reads a container back; the spec hash is not stored and comes back empty.
pub fn read_secm<R: Read>(mut r: R) -> io::Result<AssembledOperator<f64>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a SECM container"));
    }
    if read_u32(&mut r)? != VERSION {
        return Err(bad("unsupported SECM version"));
    }
    let kind = OperatorKind::from_code(read_u32(&mut r)?).ok_or_else(|| bad("unknown operator kind"))?;
    let d = read_u32(&mut r)? as usize;
    if d == 0 || d > 3 {
        return Err(bad("implausible dimension"));
    }
    let mut axes = Vec::with_capacity(d);
    for _ in 0..d {
        let lower = read_f64(&mut r)?;
        let upper = read_f64(&mut r)?;
        let n = read_f64(&mut r)? as usize;
        axes.push(Axis { lower, upper, n });
    }
    let rows = read_u64(&mut r)? as usize;
    let cols = read_u64(&mut r)? as usize;
    if rows.checked_mul(cols).is_none_or(|n| n > 64 << 20) {
        return Err(bad("matrix too large"));
    }
    let mut m = CMatrix::zeros((rows, cols));
    for z in m.iter_mut() {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        *z = Complex::new(re, im);
    }
    Ok(AssembledOperator {
        matrix: m,
        grid: Grid { axes },
        spec_hash: String::new(),
        kind,
    })
}

/// CSV of the diagonal: `index, x_1[, x_2], re, im`.
pub fn write_diagonal_csv<T: Real, W: Write>(op: &AssembledOperator<T>, mut w: W) -> io::Result<()> {
    let d = op.grid.dimension();
    let coords: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    writeln!(w, "index,{},re,im", coords.join(","))?;
    for r in 0..op.dim() {
        let x = op.grid.point(r);
        let z = op.matrix[(r, r)];
        let xs: Vec<String> = x.iter().map(|v| format!("{:?}", v.to_f64_lossy())).collect();
        writeln!(
            w,
            "{r},{},{:?},{:?}",
            xs.join(","),
            z.re.to_f64_lossy(),
            z.im.to_f64_lossy()
        )?;
    }
    w.flush()
}
