//! Binary PGM (P5, 8-bit) and the lossless raw-float container.
//!
//! Raw-float layout, all integers little-endian:
//!
//! | offset | size | content                         |
//! |--------|------|---------------------------------|
//! | 0      | 8    | ASCII magic `VDRAWF64`          |
//! | 8      | 4    | width as `u32`                  |
//! | 12     | 4    | height as `u32`                 |
//! | 16     | 8·WH | samples as `f64`, row-major     |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::Image;
use crate::error::{Error, Result};

pub const RAW_MAGIC: &[u8; 8] = b"VDRAWF64";

pub fn write_raw(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(RAW_MAGIC)?;
    out.write_all(&(image.width() as u32).to_le_bytes())?;
    out.write_all(&(image.height() as u32).to_le_bytes())?;
    for v in image.data() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_raw(path: impl AsRef<Path>) -> Result<Image> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_raw(&bytes)
}

fn decode_raw(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 16 || &bytes[..8] != RAW_MAGIC {
        return Err(Error::Format("missing raw-float magic".into()));
    }
    let width = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let body = &bytes[16..];
    if body.len() != width * height * 8 {
        return Err(Error::Format(format!(
            "raw-float body has {} bytes, header declares {width}x{height}",
            body.len()
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Image::new(width, height, data)
}

/// Writes an 8-bit P5 file; values are rounded and clamped to `0..=255`.
pub fn write_pgm(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    write_pgm_offset(image, 0.0, path)
}

/// Display export for signed components: writes `value + 128` clamped to
/// `0..=255`, so zero maps to mid-gray.
pub fn write_pgm_display(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    write_pgm_offset(image, 128.0, path)
}

fn write_pgm_offset(image: &Image, offset: f64, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{} {}\n255\n", image.width(), image.height())?;
    let bytes: Vec<u8> = image
        .data()
        .iter()
        .map(|&v| to_u8(v + offset))
        .collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

fn to_u8(v: f64) -> u8 {
    if v.is_nan() {
        0
    } else {
        v.round().clamp(0.0, 255.0) as u8
    }
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    decode_pgm(&bytes)
}

fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::Format("not a binary PGM (P5) file".into()));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        *field = next_header_number(bytes, &mut pos)?;
    }
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Format(format!(
            "only 8-bit PGM is supported, maxval {maxval}"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::Format("truncated PGM header".into()));
    }
    pos += 1;
    let raster = &bytes[pos..];
    if raster.len() < width * height {
        return Err(Error::Format(format!(
            "PGM raster has {} bytes, expected {}",
            raster.len(),
            width * height
        )));
    }
    let scale = 255.0 / maxval as f64;
    let data = raster[..width * height]
        .iter()
        .map(|&b| b as f64 * scale)
        .collect();
    Image::new(width, height, data)
}

fn next_header_number(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while let Some(&c) = bytes.get(*pos) {
                    *pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            }
            Some(c) if c.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(Error::Format("truncated PGM header".into())),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Format("expected a number in PGM header".into()));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .unwrap()
        .parse()
        .map_err(|e| Error::Format(format!("bad PGM header number: {e}")))
}

/// Reads either format, detected from the file's leading bytes.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.starts_with(RAW_MAGIC) {
        decode_raw(&bytes)
    } else if bytes.starts_with(b"P5") {
        decode_pgm(&bytes)
    } else {
        Err(Error::Format("unrecognized image format".into()))
    }
}

/// Writes PGM for a `.pgm` extension and raw-float otherwise.
pub fn write_image(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_pgm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        write_pgm(image, path)
    } else {
        write_raw(image, path)
    }
}
