//! Binary containers for dense and TT tensors and the sparse text format.
//!
//! Binary layout: `"TTSK"`, u16 version, u16 d, d × u64 dims, then a
//! kind-specific payload of little-endian values. TT payloads carry the
//! d−1 ranks as u64 followed by every core in row-major order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{Core3, DenseTensor, Shape, SparseTensor, StructuredTensor, TtTensor};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"TTSK";
pub const FORMAT_VERSION: u16 = 1;

pub(crate) fn write_header(w: &mut impl Write, shape: &Shape) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_u16::<LittleEndian>(FORMAT_VERSION)?;
    w.write_u16::<LittleEndian>(shape.order() as u16)?;
    for &n in shape.dims() {
        w.write_u64::<LittleEndian>(n as u64)?;
    }
    Ok(())
}

pub(crate) fn read_header(r: &mut impl Read) -> Result<Shape> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(fmt_err)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic bytes".into()));
    }
    let version = r.read_u16::<LittleEndian>().map_err(fmt_err)?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let d = r.read_u16::<LittleEndian>().map_err(fmt_err)? as usize;
    let dims = read_u64s(r, d)?;
    Shape::new(dims)
}

pub(crate) fn read_u64s(r: &mut impl Read, n: usize) -> Result<Vec<usize>> {
    (0..n)
        .map(|_| {
            let v = r.read_u64::<LittleEndian>().map_err(fmt_err)?;
            usize::try_from(v).map_err(|_| Error::Format(format!("value {v} overflows usize")))
        })
        .collect()
}

pub(crate) fn read_f64s(r: &mut impl Read, n: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n];
    r.read_f64_into::<LittleEndian>(&mut out).map_err(fmt_err)?;
    Ok(out)
}

pub(crate) fn write_f64s(w: &mut impl Write, values: &[f64]) -> std::io::Result<()> {
    for &v in values {
        w.write_f64::<LittleEndian>(v)?;
    }
    Ok(())
}

pub(crate) fn expect_eof(r: &mut impl Read) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe) {
        Ok(0) => Ok(()),
        Ok(_) => Err(Error::Format("trailing bytes after payload".into())),
        Err(e) => Err(fmt_err(e)),
    }
}

fn fmt_err(e: std::io::Error) -> Error {
    Error::Format(format!("truncated or unreadable container: {e}"))
}

pub fn write_dense(w: &mut impl Write, t: &DenseTensor) -> std::io::Result<()> {
    write_header(w, t.shape())?;
    write_f64s(w, t.values())
}

pub fn read_dense(r: &mut impl Read) -> Result<DenseTensor> {
    let shape = read_header(r)?;
    let values = read_f64s(r, shape.numel())?;
    expect_eof(r)?;
    DenseTensor::new(shape, values)
}

pub fn write_tt(w: &mut impl Write, t: &TtTensor) -> std::io::Result<()> {
    write_header(w, t.shape())?;
    for &r in t.ranks().as_slice() {
        w.write_u64::<LittleEndian>(r as u64)?;
    }
    for c in t.cores() {
        write_f64s(w, c.as_slice())?;
    }
    Ok(())
}

pub fn read_tt(r: &mut impl Read) -> Result<TtTensor> {
    let shape = read_header(r)?;
    let d = shape.order();
    let ranks = read_u64s(r, d - 1)?;
    let mut cores = Vec::with_capacity(d);
    for mu in 0..d {
        let left = if mu == 0 { 1 } else { ranks[mu - 1] };
        let right = if mu == d - 1 { 1 } else { ranks[mu] };
        let n = shape.dims()[mu];
        let len = left
            .checked_mul(n)
            .and_then(|x| x.checked_mul(right))
            .ok_or_else(|| Error::Format("core size overflows".into()))?;
        cores.push(Core3::new(left, n, right, read_f64s(r, len)?)?);
    }
    expect_eof(r)?;
    TtTensor::new(cores)
}

/// Sparse text: `d n_1 … n_d` then one `i_1 … i_d value` line per entry (1-based).
pub fn write_sparse_text(w: &mut impl Write, t: &SparseTensor) -> std::io::Result<()> {
    let dims: Vec<String> = t.shape().dims().iter().map(|n| n.to_string()).collect();
    writeln!(w, "{} {}", t.shape().order(), dims.join(" "))?;
    for (idx, v) in t.entries() {
        let idx: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        writeln!(w, "{} {:e}", idx.join(" "), v)?;
    }
    Ok(())
}

pub fn read_sparse_text(r: impl BufRead) -> Result<SparseTensor> {
    let mut lines = r
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format("empty sparse file".into()))?;
    let header = header.map_err(fmt_err)?;
    let nums = parse_usizes(&header, 1)?;
    let d = *nums.first().ok_or_else(|| Error::Format("missing order".into()))?;
    if nums.len() != d + 1 {
        return Err(Error::Format(format!("header lists {} dims for d = {d}", nums.len() - 1)));
    }
    let shape = Shape::new(nums[1..].to_vec())?;
    let mut entries = Vec::new();
    for (lineno, line) in lines {
        let line = line.map_err(fmt_err)?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != d + 1 {
            return Err(Error::Format(format!(
                "line {}: expected {} fields, got {}",
                lineno + 1,
                d + 1,
                fields.len()
            )));
        }
        let idx = parse_usizes(&fields[..d].join(" "), lineno + 1)?;
        let v: f64 = fields[d]
            .parse()
            .map_err(|_| Error::Format(format!("line {}: bad value {:?}", lineno + 1, fields[d])))?;
        entries.push((idx, v));
    }
    SparseTensor::new(shape, entries)
}

fn parse_usizes(s: &str, lineno: usize) -> Result<Vec<usize>> {
    s.split_whitespace()
        .map(|f| {
            f.parse()
                .map_err(|_| Error::Format(format!("line {lineno}: bad integer {f:?}")))
        })
        .collect()
}

/// On-disk tensor kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorFileKind {
    Dense,
    Tt,
    SparseText,
}

impl TensorFileKind {
    /// `.tt` → TT, `.txt`/`.coo` → sparse text, anything else → dense.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tt") => TensorFileKind::Tt,
            Some("txt") | Some("coo") => TensorFileKind::SparseText,
            _ => TensorFileKind::Dense,
        }
    }
}

pub fn save_tensor(path: &Path, t: &StructuredTensor) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res = match t {
        StructuredTensor::Dense(d) => write_dense(&mut w, d),
        StructuredTensor::Tt(tt) => write_tt(&mut w, tt),
        StructuredTensor::Sparse(s) => write_sparse_text(&mut w, s),
        other => {
            return Err(Error::Unsupported(format!(
                "no file format for {} tensors",
                other.kind()
            )))
        }
    };
    res.and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn load_tensor(path: &Path, kind: Option<TensorFileKind>) -> Result<StructuredTensor> {
    let kind = kind.unwrap_or_else(|| TensorFileKind::from_path(path));
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    Ok(match kind {
        TensorFileKind::Dense => StructuredTensor::Dense(read_dense(&mut r)?),
        TensorFileKind::Tt => StructuredTensor::Tt(read_tt(&mut r)?),
        TensorFileKind::SparseText => StructuredTensor::Sparse(read_sparse_text(r)?),
    })
}
