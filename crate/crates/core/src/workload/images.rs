//! Test images and image file formats.
//!
//! Two on-disk formats are read:
//! - IDX unsigned-byte files (the MNIST container): magic `00 00 08 nd`,
//!   `nd` big-endian u32 dimensions, then row-major bytes. Two dimensions
//!   hold one image; three hold a batch and an index selects one.
//! - BLNK raw files: ASCII `BLNK`, big-endian u16 height, big-endian u16
//!   width, then `height * width` row-major bytes.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Grid;
use crate::error::{Error, Result};

pub const BLNK_MAGIC: &[u8; 4] = b"BLNK";

/// Seed of the standard pseudo-random test image.
pub const STANDARD_IMAGE_SEED: u64 = 0x1e5e7;

/// Diagonal ramp from 0 at the top-left to 255 at the bottom-right.
pub fn gradient(height: usize, width: usize) -> Grid<u8> {
    let span = (height + width).saturating_sub(2).max(1);
    Grid::from_fn(height, width, |r, c| ((r + c) * 255 / span) as u8)
}

/// Alternating 0 / 255 squares of side `cell`.
pub fn checkerboard(height: usize, width: usize, cell: usize) -> Grid<u8> {
    let cell = cell.max(1);
    Grid::from_fn(height, width, |r, c| {
        if (r / cell + c / cell).is_multiple_of(2) {
            0
        } else {
            255
        }
    })
}

pub fn pseudo_random(height: usize, width: usize, seed: u64) -> Grid<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..height * width).map(|_| rng.random()).collect();
    Grid::new(height, width, data).expect("sized by construction")
}

/// The three deterministic images used by the workload checks.
pub fn standard_images(height: usize, width: usize) -> Vec<(&'static str, Grid<u8>)> {
    vec![
        ("gradient", gradient(height, width)),
        ("checkerboard", checkerboard(height, width, 4)),
        ("random", pseudo_random(height, width, STANDARD_IMAGE_SEED)),
    ]
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn read_idx<R: Read>(mut r: R, index: usize) -> Result<Grid<u8>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic[..3] != [0, 0, 0x08] {
        return Err(format_err("not an unsigned-byte IDX file"));
    }
    let ndims = magic[3] as usize;
    let mut dims = Vec::with_capacity(ndims);
    for _ in 0..ndims {
        let mut d = [0u8; 4];
        r.read_exact(&mut d)?;
        dims.push(u32::from_be_bytes(d) as usize);
    }
    let (count, rows, cols) = match dims[..] {
        [rows, cols] => (1, rows, cols),
        [count, rows, cols] => (count, rows, cols),
        _ => return Err(format_err(format!("IDX image needs 2 or 3 dims, got {ndims}"))),
    };
    if index >= count {
        return Err(format_err(format!("image index {index} out of {count}")));
    }
    let size = rows * cols;
    let mut skip = r.by_ref().take((index * size) as u64);
    std::io::copy(&mut skip, &mut std::io::sink())?;
    let mut data = vec![0u8; size];
    r.read_exact(&mut data)?;
    Grid::new(rows, cols, data)
}

pub fn write_idx<W: Write>(mut w: W, images: &[Grid<u8>]) -> Result<()> {
    let (rows, cols) = images.first().map_or((0, 0), |g| (g.rows(), g.cols()));
    w.write_all(&[0, 0, 0x08, 3])?;
    for d in [images.len(), rows, cols] {
        w.write_all(&(d as u32).to_be_bytes())?;
    }
    for g in images {
        if (g.rows(), g.cols()) != (rows, cols) {
            return Err(Error::Dimension("IDX batch images differ in size".into()));
        }
        w.write_all(g.data())?;
    }
    Ok(())
}

pub fn read_blnk<R: Read>(mut r: R) -> Result<Grid<u8>> {
    let mut header = [0u8; 8];
    r.read_exact(&mut header)?;
    if &header[..4] != BLNK_MAGIC {
        return Err(format_err("missing BLNK magic"));
    }
    let height = u16::from_be_bytes([header[4], header[5]]) as usize;
    let width = u16::from_be_bytes([header[6], header[7]]) as usize;
    let mut data = vec![0u8; height * width];
    r.read_exact(&mut data)?;
    Grid::new(height, width, data)
}

pub fn write_blnk<W: Write>(mut w: W, image: &Grid<u8>) -> Result<()> {
    let h = u16::try_from(image.rows()).map_err(|_| format_err("height exceeds u16"))?;
    let wd = u16::try_from(image.cols()).map_err(|_| format_err("width exceeds u16"))?;
    w.write_all(BLNK_MAGIC)?;
    w.write_all(&h.to_be_bytes())?;
    w.write_all(&wd.to_be_bytes())?;
    w.write_all(image.data())?;
    Ok(())
}

/// Loads the first image of an IDX or BLNK file, picking the format by its
/// magic bytes.
pub fn load_image(path: &Path) -> Result<Grid<u8>> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(BLNK_MAGIC) {
        read_blnk(&bytes[..])
    } else if bytes.starts_with(&[0, 0, 0x08]) {
        read_idx(&bytes[..], 0)
    } else {
        Err(format_err(format!("{}: unrecognized image format", path.display())))
    }
}
