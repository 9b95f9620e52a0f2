//! File containers: an exact float image format ("FPR1"), a mask format
//! ("FPM1"), an observation format ("FPO1"), and 8-bit PGM export for
//! viewing.
//!
//! The exact containers exist because quality claims in the tens of dB
//! cannot be verified through 8-bit quantization. Layout (little-endian):
//! magic, side length n as u32, then payload — row-major f64 samples for
//! images, row-major {0,1} bytes for masks, and for observations the mask
//! bytes followed by interleaved re/im f64 pairs of the sampled
//! coefficients in row-major mask order.

use std::fs;
use std::path::Path;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{Observation, SamplingMask};
use crate::grid::{Image, Spectrum};

const IMAGE_MAGIC: &[u8; 4] = b"FPR1";
const MASK_MAGIC: &[u8; 4] = b"FPM1";
const OBS_MAGIC: &[u8; 4] = b"FPO1";

fn push_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn push_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.pos + len > self.bytes.len() {
            return Err(Error::Format("truncated container".into()));
        }
        let slice = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(slice)
    }

    fn magic(&mut self, expected: &[u8; 4]) -> Result<()> {
        let got = self.take(4)?;
        if got != expected {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(got),
                String::from_utf8_lossy(expected)
            )));
        }
        Ok(())
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        let b = self.take(8)?;
        Ok(f64::from_le_bytes(b.try_into().unwrap()))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes",
                self.bytes.len() - self.pos
            )));
        }
        Ok(())
    }
}

pub fn image_to_bytes(img: &Image) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 8 * img.samples().len());
    out.extend_from_slice(IMAGE_MAGIC);
    push_u32(&mut out, img.n() as u32);
    for &v in img.samples() {
        push_f64(&mut out, v);
    }
    out
}

pub fn image_from_bytes(bytes: &[u8]) -> Result<Image> {
    let mut r = Reader::new(bytes);
    r.magic(IMAGE_MAGIC)?;
    let n = r.u32()? as usize;
    let mut samples = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        samples.push(r.f64()?);
    }
    r.finish()?;
    Image::new(n, samples)
}

pub fn mask_to_bytes(mask: &SamplingMask) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + mask.flags().len());
    out.extend_from_slice(MASK_MAGIC);
    push_u32(&mut out, mask.n() as u32);
    out.extend(mask.flags().iter().map(|&f| f as u8));
    out
}

pub fn mask_from_bytes(bytes: &[u8]) -> Result<SamplingMask> {
    let mut r = Reader::new(bytes);
    r.magic(MASK_MAGIC)?;
    let n = r.u32()? as usize;
    let raw = r.take(n * n)?;
    r.finish()?;
    let flags = raw
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::Format(format!("mask byte {other} not in {{0,1}}"))),
        })
        .collect::<Result<Vec<bool>>>()?;
    SamplingMask::new(n, flags)
}

pub fn observation_to_bytes(obs: &Observation) -> Vec<u8> {
    let mask = obs.mask();
    let n = obs.n();
    let mut out = Vec::new();
    out.extend_from_slice(OBS_MAGIC);
    push_u32(&mut out, n as u32);
    out.extend(mask.flags().iter().map(|&f| f as u8));
    for (idx, &keep) in mask.flags().iter().enumerate() {
        if keep {
            let c = obs.values().coeffs()[idx];
            push_f64(&mut out, c.re);
            push_f64(&mut out, c.im);
        }
    }
    out
}

pub fn observation_from_bytes(bytes: &[u8]) -> Result<Observation> {
    let mut r = Reader::new(bytes);
    r.magic(OBS_MAGIC)?;
    let n = r.u32()? as usize;
    let raw = r.take(n * n)?.to_vec();
    let flags = raw
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::Format(format!("mask byte {other} not in {{0,1}}"))),
        })
        .collect::<Result<Vec<bool>>>()?;
    let mask = SamplingMask::new(n, flags)?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n * n];
    for (idx, &keep) in mask.flags().iter().enumerate() {
        if keep {
            let re = r.f64()?;
            let im = r.f64()?;
            coeffs[idx] = Complex64::new(re, im);
        }
    }
    r.finish()?;
    Observation::new(mask, Spectrum::new(n, coeffs)?)
}

/// 8-bit binary PGM with clamp(round(255·pixel), 0, 255). Clamping happens
/// only here, at export.
pub fn image_to_pgm(img: &Image) -> Vec<u8> {
    let n = img.n();
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.extend(img.samples().iter().map(|&v| {
        let q = (255.0 * v).round();
        q.clamp(0.0, 255.0) as u8
    }));
    out
}

/// Atomic write: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Format(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_image(path: &Path, img: &Image) -> Result<()> {
    write_atomic(path, &image_to_bytes(img))
}

pub fn read_image(path: &Path) -> Result<Image> {
    image_from_bytes(&fs::read(path)?)
}

pub fn write_mask(path: &Path, mask: &SamplingMask) -> Result<()> {
    write_atomic(path, &mask_to_bytes(mask))
}

pub fn read_mask(path: &Path) -> Result<SamplingMask> {
    mask_from_bytes(&fs::read(path)?)
}

pub fn write_observation(path: &Path, obs: &Observation) -> Result<()> {
    write_atomic(path, &observation_to_bytes(obs))
}

pub fn read_observation(path: &Path) -> Result<Observation> {
    observation_from_bytes(&fs::read(path)?)
}

pub fn write_pgm(path: &Path, img: &Image) -> Result<()> {
    write_atomic(path, &image_to_pgm(img))
}
