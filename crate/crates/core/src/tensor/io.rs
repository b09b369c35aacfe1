//! Binary tensor (`.dtf`) and mask (`.dmk`) files.
//!
//! ```text
//! .dtf: "DTF1" | u32 ndims | ndims × u64 dims | Π dims × f64 values (storage order)
//! .dmk: "DMK1" | u32 ndims | ndims × u64 dims | u64 m | m × u64 indices
//! ```
//!
//! All integers and floats are little-endian.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{DenseTensor, ObservationMask, Shape};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const TENSOR_MAGIC: &[u8; 4] = b"DTF1";
const MASK_MAGIC: &[u8; 4] = b"DMK1";

pub fn write_tensor<T: Scalar, W: Write>(x: &DenseTensor<T>, mut w: W) -> Result<()> {
    w.write_all(TENSOR_MAGIC)?;
    write_shape(x.shape(), &mut w)?;
    for v in x.as_slice() {
        w.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_tensor<T: Scalar, R: Read>(mut r: R) -> Result<DenseTensor<T>> {
    expect_magic(&mut r, TENSOR_MAGIC)?;
    let shape = read_shape(&mut r)?;
    let mut data = Vec::with_capacity(shape.len());
    let mut buf = [0u8; 8];
    for _ in 0..shape.len() {
        r.read_exact(&mut buf).map_err(truncated)?;
        let v = f64::from_le_bytes(buf);
        data.push(T::from_f64(v).unwrap_or_else(T::nan));
    }
    expect_eof(&mut r)?;
    DenseTensor::from_vec(shape, data)
}

pub fn write_mask<W: Write>(mask: &ObservationMask, mut w: W) -> Result<()> {
    w.write_all(MASK_MAGIC)?;
    write_shape(mask.shape(), &mut w)?;
    w.write_all(&(mask.len() as u64).to_le_bytes())?;
    for &i in mask.indices() {
        w.write_all(&(i as u64).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_mask<R: Read>(mut r: R) -> Result<ObservationMask> {
    expect_magic(&mut r, MASK_MAGIC)?;
    let shape = read_shape(&mut r)?;
    let m = to_usize(read_u64(&mut r)?)?;
    if m > shape.len() {
        return Err(Error::Format(format!(
            "mask claims {m} entries for {} elements",
            shape.len()
        )));
    }
    let mut indices = Vec::with_capacity(m);
    for _ in 0..m {
        indices.push(to_usize(read_u64(&mut r)?)?);
    }
    expect_eof(&mut r)?;
    ObservationMask::new(shape, indices)
}

pub fn save_tensor<T: Scalar>(x: &DenseTensor<T>, path: impl AsRef<Path>) -> Result<()> {
    write_tensor(x, BufWriter::new(File::create(path)?))
}

pub fn load_tensor<T: Scalar>(path: impl AsRef<Path>) -> Result<DenseTensor<T>> {
    read_tensor(BufReader::new(File::open(path)?))
}

pub fn save_mask(mask: &ObservationMask, path: impl AsRef<Path>) -> Result<()> {
    write_mask(mask, BufWriter::new(File::create(path)?))
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<ObservationMask> {
    read_mask(BufReader::new(File::open(path)?))
}

fn write_shape<W: Write>(shape: &Shape, w: &mut W) -> Result<()> {
    w.write_all(&(shape.order() as u32).to_le_bytes())?;
    for &d in shape.dims() {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    Ok(())
}

fn read_shape<R: Read>(r: &mut R) -> Result<Shape> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(truncated)?;
    let ndims = u32::from_le_bytes(buf) as usize;
    if ndims == 0 || ndims > 64 {
        return Err(Error::Format(format!("implausible ndims {ndims}")));
    }
    let dims = (0..ndims)
        .map(|_| read_u64(r).and_then(to_usize))
        .collect::<Result<Vec<_>>>()?;
    Shape::new(dims).map_err(|e| Error::Format(e.to_string()))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf).map_err(truncated)?;
    Ok(u64::from_le_bytes(buf))
}

fn to_usize(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::Format(format!("{v} exceeds the index range")))
}

fn expect_magic<R: Read>(r: &mut R, magic: &[u8; 4]) -> Result<()> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(truncated)?;
    if &buf != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&buf),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

fn expect_eof<R: Read>(r: &mut R) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(Error::Format("trailing bytes after payload".into())),
    }
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format("file truncated".into())
    } else {
        Error::Io(e)
    }
}
