//! File formats: PBM rasters (P1 ascii, P4 binary) and the `.rld` run
//! length document container.
//!
//! The `.rld` layout is fixed little-endian:
//!
//! ```text
//! magic "RLD1"
//! width  u32
//! height u32
//! height x row records, each:
//!     pair_count u32
//!     pair_count x (white u32, black u32)
//! ```
//!
//! Readers validate everything up front; a file that decodes at all yields
//! an image whose rows sum to the width.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rle::{Bitmap, CompressedImage, RunPair, MAX_DIMENSION};

const RLD_MAGIC: &[u8; 4] = b"RLD1";

/// Read a PBM file, either P1 or P4. Returns a bitmap with 1 = black,
/// matching the PBM convention.
pub fn read_pbm(path: impl AsRef<Path>) -> Result<Bitmap> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_pbm(&data).map_err(|(offset, message)| Error::Parse {
        path: path.to_path_buf(),
        offset,
        message,
    })
}

/// Write a bitmap as canonical binary P4.
pub fn write_pbm(bitmap: &Bitmap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_p4(bitmap)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Read an `.rld` file, rejecting anything that violates the row
/// invariants. Offending rows are named 1-based.
pub fn read_rldoc(path: impl AsRef<Path>) -> Result<CompressedImage> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_rldoc(&data, path)
}

/// Write an `.rld` file.
pub fn write_rldoc(img: &CompressedImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_rldoc(img)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Serialize to the `.rld` byte layout.
pub fn encode_rldoc(img: &CompressedImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + img.total_pairs() as usize * 8);
    out.extend_from_slice(RLD_MAGIC);
    out.extend_from_slice(&img.width().to_le_bytes());
    out.extend_from_slice(&img.height().to_le_bytes());
    for row in img.rows() {
        out.extend_from_slice(&(row.len() as u32).to_le_bytes());
        for pair in row {
            out.extend_from_slice(&pair.white.to_le_bytes());
            out.extend_from_slice(&pair.black.to_le_bytes());
        }
    }
    out
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn fail(&self, offset: usize, message: String) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            offset: offset as u64,
            message,
        }
    }

    fn take_u32(&mut self, what: &str) -> Result<u32> {
        let bytes: [u8; 4] = self
            .data
            .get(self.pos..self.pos + 4)
            .ok_or_else(|| self.fail(self.pos, format!("truncated while reading {what}")))?
            .try_into()
            .unwrap();
        self.pos += 4;
        Ok(u32::from_le_bytes(bytes))
    }
}

fn parse_rldoc(data: &[u8], path: &Path) -> Result<CompressedImage> {
    let mut cur = Cursor { data, pos: 0, path };
    match data.get(0..4) {
        Some(m) if m == RLD_MAGIC => cur.pos = 4,
        Some(_) => return Err(cur.fail(0, "bad magic, expected RLD1".into())),
        None => return Err(cur.fail(0, "file shorter than magic".into())),
    }
    let width = cur.take_u32("width")?;
    let height = cur.take_u32("height")?;
    if width == 0 || height == 0 || width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(cur.fail(4, format!("invalid dimensions {width}x{height}")));
    }

    let mut rows = Vec::with_capacity(height as usize);
    for row_no in 1..=height {
        let pair_count = cur.take_u32(&format!("pair count of row {row_no}"))?;
        let mut row = Vec::with_capacity(pair_count.min(1 << 20) as usize);
        for _ in 0..pair_count {
            let white = cur.take_u32(&format!("runs of row {row_no}"))?;
            let black = cur.take_u32(&format!("runs of row {row_no}"))?;
            row.push(RunPair::new(white, black));
        }
        rows.push(row);
    }
    if cur.pos != data.len() {
        let n = data.len() - cur.pos;
        return Err(cur.fail(cur.pos, format!("{n} trailing bytes")));
    }
    // Row sums are validated by the constructor, which names the row.
    CompressedImage::from_rows(width, rows)
}

fn parse_pbm(data: &[u8]) -> std::result::Result<Bitmap, (u64, String)> {
    let magic = data
        .get(0..2)
        .ok_or_else(|| (0, "file shorter than magic".to_string()))?;
    match magic {
        b"P1" => parse_p1(data),
        b"P4" => parse_p4(data),
        _ => Err((0, "bad magic, expected P1 or P4".into())),
    }
}

/// Advance past whitespace and `#` comments, returning the new position.
fn skip_pbm_space(data: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < data.len() && data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < data.len() && data[pos] == b'#' {
            while pos < data.len() && data[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn read_pbm_number(data: &[u8], pos: &mut usize) -> std::result::Result<u32, (u64, String)> {
    *pos = skip_pbm_space(data, *pos);
    let start = *pos;
    let mut value: u64 = 0;
    while *pos < data.len() && data[*pos].is_ascii_digit() {
        value = value * 10 + u64::from(data[*pos] - b'0');
        if value > u64::from(MAX_DIMENSION) {
            return Err((start as u64, "dimension overflow".into()));
        }
        *pos += 1;
    }
    if *pos == start {
        return Err((start as u64, "expected a decimal number".into()));
    }
    Ok(value as u32)
}

fn parse_header(data: &[u8]) -> std::result::Result<(u32, u32, usize), (u64, String)> {
    let mut pos = 2usize;
    let width = read_pbm_number(data, &mut pos)?;
    let height = read_pbm_number(data, &mut pos)?;
    if width == 0 || height == 0 {
        return Err((2, format!("invalid dimensions {width}x{height}")));
    }
    Ok((width, height, pos))
}

fn parse_p1(data: &[u8]) -> std::result::Result<Bitmap, (u64, String)> {
    let (width, height, mut pos) = parse_header(data)?;
    let mut bitmap = Bitmap::new(width, height).map_err(|e| (2, e.to_string()))?;
    for r in 0..height {
        for c in 0..width {
            pos = skip_pbm_space(data, pos);
            match data.get(pos) {
                Some(b'0') => bitmap.set(r, c, 0),
                Some(b'1') => bitmap.set(r, c, 1),
                Some(other) => {
                    return Err((
                        pos as u64,
                        format!("expected 0 or 1, found {:?}", *other as char),
                    ))
                }
                None => return Err((pos as u64, "truncated pixel data".into())),
            }
            pos += 1;
        }
    }
    Ok(bitmap)
}

fn parse_p4(data: &[u8]) -> std::result::Result<Bitmap, (u64, String)> {
    let (width, height, mut pos) = parse_header(data)?;
    // Exactly one whitespace byte separates the header from the payload.
    match data.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err((pos as u64, "expected whitespace before pixel data".into())),
    }
    let stride = (width as usize).div_ceil(8);
    let need = stride * height as usize;
    let payload = data
        .get(pos..pos + need)
        .ok_or_else(|| (pos as u64, format!("truncated payload, need {need} bytes")))?;
    let mut bitmap = Bitmap::new(width, height).map_err(|e| (2, e.to_string()))?;
    for r in 0..height as usize {
        let row = &payload[r * stride..(r + 1) * stride];
        for c in 0..width as usize {
            let bit = (row[c / 8] >> (7 - c % 8)) & 1;
            bitmap.set(r as u32, c as u32, bit);
        }
    }
    Ok(bitmap)
}

/// Canonical P4 bytes: `P4\n<w> <h>\n` then MSB-first rows padded to whole
/// bytes.
pub fn encode_p4(bitmap: &Bitmap) -> Vec<u8> {
    let stride = (bitmap.width() as usize).div_ceil(8);
    let mut out = format!("P4\n{} {}\n", bitmap.width(), bitmap.height()).into_bytes();
    for r in 0..bitmap.height() {
        let mut packed = vec![0u8; stride];
        for (c, &px) in bitmap.row(r).iter().enumerate() {
            if px != 0 {
                packed[c / 8] |= 0x80 >> (c % 8);
            }
        }
        out.extend_from_slice(&packed);
    }
    out
}
