//! Run-length representation of binary images and the lossless raster
//! conversions used to cross-check everything computed on it.
//!
//! A compressed image stores each row as pairs of (white, black) run
//! lengths. Rows always start with a white run, which may be zero when the
//! row begins with ink, and end on a whole pair, so a row ending on white
//! carries a zero black run. The analysis pipeline works on this form
//! directly; [`decode`] exists so tests can compare against plain rasters.

use crate::error::{Error, Result};

/// Largest supported width or height in pixels.
pub const MAX_DIMENSION: u32 = i32::MAX as u32;

/// One (white, black) run pair. `(0, 0)` is only meaningful as trailing
/// padding when a row is viewed at a fixed pair count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunPair {
    pub white: u32,
    pub black: u32,
}

impl RunPair {
    pub const fn new(white: u32, black: u32) -> Self {
        Self { white, black }
    }

    /// Pixels covered by the pair.
    pub fn span(&self) -> u64 {
        u64::from(self.white) + u64::from(self.black)
    }

    pub fn is_padding(&self) -> bool {
        self.white == 0 && self.black == 0
    }
}

/// Row-major binary raster, one byte per pixel, 1 = black ink.
#[derive(Clone, PartialEq, Eq)]
pub struct Bitmap {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for Bitmap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Bitmap({}x{})", self.width, self.height)
    }
}

impl Bitmap {
    /// All-white bitmap of the given size.
    pub fn new(width: u32, height: u32) -> Result<Self> {
        check_dimensions(width, height)?;
        Ok(Self {
            width,
            height,
            pixels: vec![0; width as usize * height as usize],
        })
    }

    /// Parse rows of '0'/'1' characters, mainly for tests and docs.
    pub fn from_ascii(rows: &[&str]) -> Result<Self> {
        let height = rows.len() as u32;
        let width = rows.first().map_or(0, |r| r.len()) as u32;
        let mut bm = Self::new(width, height)?;
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len() as u32, width, "ragged ascii rows");
            for (j, ch) in row.bytes().enumerate() {
                bm.set(i as u32, j as u32, if ch == b'1' { 1 } else { 0 });
            }
        }
        Ok(bm)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Pixel at 0-based (row, col).
    #[inline]
    pub fn get(&self, row: u32, col: u32) -> u8 {
        self.pixels[row as usize * self.width as usize + col as usize]
    }

    #[inline]
    pub fn set(&mut self, row: u32, col: u32, value: u8) {
        debug_assert!(value <= 1);
        self.pixels[row as usize * self.width as usize + col as usize] = value;
    }

    /// 0-based row slice.
    #[inline]
    pub fn row(&self, row: u32) -> &[u8] {
        let w = self.width as usize;
        &self.pixels[row as usize * w..(row as usize + 1) * w]
    }

    pub fn count_ink(&self) -> u64 {
        self.pixels.iter().map(|&p| u64::from(p)).sum()
    }
}

/// A binary image as rows of run pairs, all summing to the same width.
#[derive(Clone, PartialEq, Eq)]
pub struct CompressedImage {
    width: u32,
    rows: Vec<Vec<RunPair>>,
}

impl std::fmt::Debug for CompressedImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CompressedImage({}x{}, {} pairs)",
            self.width,
            self.rows.len(),
            self.total_pairs()
        )
    }
}

impl CompressedImage {
    /// Build from raw rows, enforcing the row invariants eagerly: every row
    /// must sum to `width` and zero pairs may only appear as trailing
    /// padding. Rows are reported 1-based in errors.
    pub fn from_rows(width: u32, rows: Vec<Vec<RunPair>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyImage);
        }
        check_dimensions(width, rows.len() as u64 as u32)?;
        for (i, row) in rows.iter().enumerate() {
            let row_no = (i + 1) as u32;
            let sum: u64 = row.iter().map(RunPair::span).sum();
            if sum != u64::from(width) {
                return Err(Error::CorruptRow {
                    row: row_no,
                    expected: width,
                    actual: sum,
                });
            }
            // Zero pairs are only valid as a trailing padding suffix.
            let body_len = row
                .iter()
                .rposition(|p| !p.is_padding())
                .map_or(0, |k| k + 1);
            if row[..body_len].iter().any(RunPair::is_padding) {
                return Err(Error::InteriorPadding { row: row_no });
            }
        }
        Ok(Self { width, rows })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn rows(&self) -> &[Vec<RunPair>] {
        &self.rows
    }

    /// 0-based row access.
    pub fn row(&self, row: u32) -> &[RunPair] {
        &self.rows[row as usize]
    }

    pub fn total_pairs(&self) -> u64 {
        self.rows.iter().map(|r| r.len() as u64).sum()
    }

    /// Pair count of the widest row. The image viewed as a fixed-shape
    /// matrix has this many pair columns, shorter rows padded with zeros.
    pub fn max_pairs_per_row(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Uncompressed pixel count divided by the number of stored run values
    /// (two per pair). This is the work ratio between the raster and the
    /// run representation, which is what the timing comparison reports.
    pub fn compression_ratio(&self) -> f64 {
        let pixels = u64::from(self.width) * u64::from(self.height());
        let runs = self.total_pairs() * 2;
        if runs == 0 {
            return 0.0;
        }
        pixels as f64 / runs as f64
    }

    /// Copy of the row range `first..=last`, 1-based inclusive.
    pub fn extract_rows(&self, first: u32, last: u32) -> Result<CompressedImage> {
        let height = self.height();
        if first == 0 || first > last || last > height {
            return Err(Error::RowRange {
                first,
                last,
                height,
            });
        }
        let rows = self.rows[(first - 1) as usize..last as usize].to_vec();
        Ok(CompressedImage {
            width: self.width,
            rows,
        })
    }
}

fn check_dimensions(width: u32, height: u32) -> Result<()> {
    if width == 0 || height == 0 || width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(Error::InvalidDimensions {
            width: u64::from(width),
            height: u64::from(height),
            reason: "width and height must be in 1..=2^31-1",
        });
    }
    Ok(())
}

/// Run-length encode a raster. Each output row starts with a (possibly
/// zero) white run and ends on a whole pair.
pub fn encode(bitmap: &Bitmap) -> CompressedImage {
    let mut rows = Vec::with_capacity(bitmap.height() as usize);
    for r in 0..bitmap.height() {
        rows.push(encode_row(bitmap.row(r)));
    }
    CompressedImage {
        width: bitmap.width(),
        rows,
    }
}

fn encode_row(pixels: &[u8]) -> Vec<RunPair> {
    let mut pairs = Vec::new();
    let mut i = 0usize;
    while i < pixels.len() {
        let white_start = i;
        while i < pixels.len() && pixels[i] == 0 {
            i += 1;
        }
        let white = (i - white_start) as u32;
        let black_start = i;
        while i < pixels.len() && pixels[i] != 0 {
            i += 1;
        }
        let black = (i - black_start) as u32;
        pairs.push(RunPair::new(white, black));
    }
    if pairs.is_empty() {
        // Zero-width rows cannot occur for a valid bitmap, but keep the
        // row-sum invariant meaningful regardless.
        pairs.push(RunPair::new(0, 0));
    }
    pairs
}

/// Expand back to a raster. Fails on rows that do not sum to the width,
/// naming the 1-based row.
pub fn decode(img: &CompressedImage) -> Result<Bitmap> {
    if img.rows.is_empty() {
        return Err(Error::EmptyImage);
    }
    let mut bitmap = Bitmap::new(img.width, img.height())?;
    for (r, row) in img.rows.iter().enumerate() {
        let mut col = 0u64;
        for pair in row {
            col += u64::from(pair.white);
            for c in col..col + u64::from(pair.black) {
                if c >= u64::from(img.width) {
                    break;
                }
                bitmap.set(r as u32, c as u32, 1);
            }
            col += u64::from(pair.black);
        }
        if col != u64::from(img.width) {
            return Err(Error::CorruptRow {
                row: (r + 1) as u32,
                expected: img.width,
                actual: col,
            });
        }
    }
    Ok(bitmap)
}
