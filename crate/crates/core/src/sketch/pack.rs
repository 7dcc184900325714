use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::drm::{DrmChain, Fingerprint};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tensor::io::{expect_eof, read_f64s, read_header, read_u64s, write_f64s, write_header};
use crate::tensor::{Core3, RankTuple, Shape};

/// The two sketch families of a tensor: `Ψ_µ` (µ = 1..d), of size
/// `r^L_{µ−1} × n_µ × r^R_µ`, and `Ω_µ` (µ = 1..d−1), of size `r^L_µ × r^R_µ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchPack {
    shape: Shape,
    left_ranks: RankTuple,
    right_ranks: RankTuple,
    left_fingerprint: Fingerprint,
    right_fingerprint: Fingerprint,
    psi: Vec<Core3>,
    omega: Vec<Matrix>,
}

impl SketchPack {
    pub fn new(
        shape: Shape,
        left_ranks: RankTuple,
        right_ranks: RankTuple,
        fingerprints: (Fingerprint, Fingerprint),
        psi: Vec<Core3>,
        omega: Vec<Matrix>,
    ) -> Result<Self> {
        let d = shape.order();
        let left_ranks = left_ranks.for_shape(&shape)?;
        let right_ranks = right_ranks.for_shape(&shape)?;
        if psi.len() != d || omega.len() != d - 1 {
            return Err(Error::dims(
                "SketchPack::new",
                format!("{} Ψ and {} Ω for order {d}", psi.len(), omega.len()),
            ));
        }
        for mu in 1..=d {
            let want = (left_ranks.get(mu - 1), shape.mode(mu), right_ranks.get(mu));
            if psi[mu - 1].dims() != want {
                return Err(Error::dims(
                    "SketchPack::new",
                    format!("Ψ_{mu} is {:?}, expected {want:?}", psi[mu - 1].dims()),
                ));
            }
        }
        for mu in 1..d {
            let want = (left_ranks.get(mu), right_ranks.get(mu));
            if omega[mu - 1].shape() != want {
                return Err(Error::dims(
                    "SketchPack::new",
                    format!("Ω_{mu} is {:?}, expected {want:?}", omega[mu - 1].shape()),
                ));
            }
        }
        Ok(SketchPack {
            shape,
            left_ranks,
            right_ranks,
            left_fingerprint: fingerprints.0,
            right_fingerprint: fingerprints.1,
            psi,
            omega,
        })
    }

    /// All-zero pack for the given chains.
    pub fn zeros(left: &DrmChain, right: &DrmChain) -> Result<Self> {
        let shape = left.shape().clone();
        let d = shape.order();
        let psi = (1..=d)
            .map(|mu| Core3::zeros(left.rank(mu - 1), shape.mode(mu), right.rank(mu)))
            .collect();
        let omega = (1..d)
            .map(|mu| Matrix::zeros(left.rank(mu), right.rank(mu)))
            .collect();
        SketchPack::new(
            shape,
            left.ranks()?,
            right.ranks()?,
            (left.fingerprint(), right.fingerprint()),
            psi,
            omega,
        )
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn left_ranks(&self) -> &RankTuple {
        &self.left_ranks
    }

    pub fn right_ranks(&self) -> &RankTuple {
        &self.right_ranks
    }

    pub fn fingerprints(&self) -> (Fingerprint, Fingerprint) {
        (self.left_fingerprint, self.right_fingerprint)
    }

    /// `Ψ_µ`, µ = 1..d.
    pub fn psi(&self, mu: usize) -> &Core3 {
        &self.psi[mu - 1]
    }

    /// `Ω_µ`, µ = 1..d−1.
    pub fn omega(&self, mu: usize) -> &Matrix {
        &self.omega[mu - 1]
    }

    pub fn psis(&self) -> &[Core3] {
        &self.psi
    }

    pub fn omegas(&self) -> &[Matrix] {
        &self.omega
    }

    pub fn scale(&mut self, alpha: f64) {
        self.psi.iter_mut().for_each(|p| p.scale(alpha));
        self.omega.iter_mut().for_each(|o| o.scale(alpha));
    }

    pub(crate) fn check_compatible(&self, other: &SketchPack) -> Result<()> {
        self.shape.check_same(&other.shape)?;
        if self.left_ranks != other.left_ranks || self.right_ranks != other.right_ranks {
            return Err(Error::InvalidRanks("sketch ranks differ".into()));
        }
        if self.fingerprints() != other.fingerprints() {
            return Err(Error::FingerprintMismatch);
        }
        Ok(())
    }

    /// Streaming update: add the sketch of another summand.
    pub fn add_assign(&mut self, other: &SketchPack) -> Result<()> {
        self.check_compatible(other)?;
        self.psi
            .iter_mut()
            .zip(&other.psi)
            .for_each(|(a, b)| a.add_assign(b));
        self.omega
            .iter_mut()
            .zip(&other.omega)
            .for_each(|(a, b)| a.add_assign(b));
        Ok(())
    }

    /// Largest entry magnitude over all sketches.
    pub fn max_abs(&self) -> f64 {
        let p = self
            .psi
            .iter()
            .flat_map(|c| c.as_slice())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        self.omega.iter().fold(p, |m, o| m.max(o.max_abs()))
    }

    /// Largest entrywise difference to another pack of the same dimensions.
    pub fn max_abs_diff(&self, other: &SketchPack) -> f64 {
        let p = self
            .psi
            .iter()
            .zip(&other.psi)
            .flat_map(|(a, b)| a.as_slice().iter().zip(b.as_slice()))
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        self.omega
            .iter()
            .zip(&other.omega)
            .fold(p, |m, (a, b)| m.max(a.sub(b).max_abs()))
    }

    pub fn write(&self, w: &mut impl Write) -> std::io::Result<()> {
        write_header(w, &self.shape)?;
        for &r in self.left_ranks.as_slice().iter().chain(self.right_ranks.as_slice()) {
            w.write_u64::<LittleEndian>(r as u64)?;
        }
        for fp in [self.left_fingerprint, self.right_fingerprint] {
            w.write_u8(fp.kind)?;
            w.write_u8(fp.side)?;
            w.write_u64::<LittleEndian>(fp.seed)?;
            w.write_u64::<LittleEndian>(fp.digest)?;
        }
        for p in &self.psi {
            write_f64s(w, p.as_slice())?;
        }
        for o in &self.omega {
            write_f64s(w, o.as_slice())?;
        }
        Ok(())
    }

    pub fn read(r: &mut impl Read) -> Result<Self> {
        let shape = read_header(r)?;
        let d = shape.order();
        let left_ranks = RankTuple::new(read_u64s(r, d - 1)?)?;
        let right_ranks = RankTuple::new(read_u64s(r, d - 1)?)?;
        let mut fps = [Fingerprint {
            kind: 0,
            side: 0,
            seed: 0,
            digest: 0,
        }; 2];
        for fp in &mut fps {
            let fmt = |e: std::io::Error| Error::Format(format!("truncated fingerprint: {e}"));
            fp.kind = r.read_u8().map_err(fmt)?;
            fp.side = r.read_u8().map_err(fmt)?;
            fp.seed = r.read_u64::<LittleEndian>().map_err(fmt)?;
            fp.digest = r.read_u64::<LittleEndian>().map_err(fmt)?;
        }
        let mut psi = Vec::with_capacity(d);
        for mu in 1..=d {
            let (a, n, b) = (left_ranks.get(mu - 1), shape.mode(mu), right_ranks.get(mu));
            psi.push(Core3::new(a, n, b, read_f64s(r, a * n * b)?)?);
        }
        let mut omega = Vec::with_capacity(d - 1);
        for mu in 1..d {
            let (a, b) = (left_ranks.get(mu), right_ranks.get(mu));
            omega.push(Matrix::from_vec(a, b, read_f64s(r, a * b)?)?);
        }
        expect_eof(r)?;
        SketchPack::new(shape, left_ranks, right_ranks, (fps[0], fps[1]), psi, omega)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        SketchPack::read(&mut BufReader::new(file))
    }
}
