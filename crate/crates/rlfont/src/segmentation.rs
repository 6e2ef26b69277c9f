//! Vertical projection profile and text line segmentation, computed on run
//! data without expanding any pixels.

use crate::error::{Error, Result};
use crate::rle::CompressedImage;

/// Per-row ink counts P(1)..P(height). Stored 0-based; `get(i)` takes the
/// 1-based row index used everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionProfile {
    values: Vec<u32>,
}

impl ProjectionProfile {
    pub fn from_values(values: Vec<u32>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// P(i) for a 1-based row index.
    #[inline]
    pub fn get(&self, i: u32) -> u32 {
        self.values[(i - 1) as usize]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn total_ink(&self) -> u64 {
        self.values.iter().map(|&v| u64::from(v)).sum()
    }
}

/// One segmented text line, rows 1-based inclusive into the source page.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineBounds {
    pub first_row: u32,
    pub last_row: u32,
}

impl LineBounds {
    pub fn height(&self) -> u32 {
        self.last_row - self.first_row + 1
    }

    /// Rows shared with another bound.
    pub fn overlap(&self, other: &LineBounds) -> u32 {
        let lo = self.first_row.max(other.first_row);
        let hi = self.last_row.min(other.last_row);
        hi.saturating_sub(lo).saturating_add(u32::from(hi >= lo))
    }
}

/// Result of splitting a profile into lines. `discarded` counts ink runs
/// shorter than the minimum height, kept for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    pub lines: Vec<LineBounds>,
    pub discarded: usize,
}

/// Projection profile of a compressed image: P(i) is the sum of the black
/// runs of row i. Touches each stored pair exactly once.
pub fn vpp(img: &CompressedImage) -> ProjectionProfile {
    vpp_counting(img).0
}

/// Same as [`vpp`], also returning the number of pairs visited so callers
/// can check the work done against the image's pair count.
pub fn vpp_counting(img: &CompressedImage) -> (ProjectionProfile, u64) {
    let mut visited = 0u64;
    let values = img
        .rows()
        .iter()
        .map(|row| {
            let mut ink = 0u64;
            for pair in row {
                ink += u64::from(pair.black);
                visited += 1;
            }
            // Row sums are bounded by the width, which fits in u32.
            ink as u32
        })
        .collect();
    (ProjectionProfile::from_values(values), visited)
}

/// Maximal runs of rows with P(i) > 0, top to bottom, keeping only runs at
/// least `min_height` rows tall. Shorter runs are tallied as discarded.
pub fn segment_lines(profile: &ProjectionProfile, min_height: u32) -> Segmentation {
    let min_height = min_height.max(1);
    let mut lines = Vec::new();
    let mut discarded = 0usize;
    let mut start: Option<u32> = None;
    for i in 1..=profile.len() {
        let inked = profile.get(i) > 0;
        match (inked, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                push_run(&mut lines, &mut discarded, s, i - 1, min_height);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        push_run(&mut lines, &mut discarded, s, profile.len(), min_height);
    }
    Segmentation { lines, discarded }
}

fn push_run(
    lines: &mut Vec<LineBounds>,
    discarded: &mut usize,
    first: u32,
    last: u32,
    min_height: u32,
) {
    let bounds = LineBounds {
        first_row: first,
        last_row: last,
    };
    if bounds.height() >= min_height {
        lines.push(bounds);
    } else {
        *discarded += 1;
    }
}

/// Compressed data of one text line.
pub fn extract_line(img: &CompressedImage, bounds: LineBounds) -> Result<CompressedImage> {
    if bounds.first_row == 0 || bounds.first_row > bounds.last_row {
        return Err(Error::RowRange {
            first: bounds.first_row,
            last: bounds.last_row,
            height: img.height(),
        });
    }
    img.extract_rows(bounds.first_row, bounds.last_row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rle::{self, Bitmap, RunPair};

    #[test]
    fn vpp_sums_black_runs() {
        let img =
            rle::CompressedImage::from_rows(8, vec![vec![RunPair::new(2, 4), RunPair::new(2, 0)]])
                .unwrap();
        assert_eq!(vpp(&img).values(), &[4]);
    }

    #[test]
    fn vpp_all_white_is_zero() {
        let img = rle::encode(&Bitmap::new(16, 5).unwrap());
        assert!(vpp(&img).values().iter().all(|&v| v == 0));
    }

    #[test]
    fn vpp_matches_decoded_row_sums() {
        let bm = Bitmap::from_ascii(&["0110", "1111", "0000", "1010"]).unwrap();
        let img = rle::encode(&bm);
        let profile = vpp(&img);
        for r in 0..bm.height() {
            let raster: u32 = bm.row(r).iter().map(|&p| u32::from(p)).sum();
            assert_eq!(profile.get(r + 1), raster);
        }
    }

    #[test]
    fn vpp_visits_every_pair_once() {
        let bm = Bitmap::from_ascii(&["0110", "1111", "0000", "1010"]).unwrap();
        let img = rle::encode(&bm);
        let (_, visited) = vpp_counting(&img);
        assert_eq!(visited, img.total_pairs());
    }

    #[test]
    fn segment_hand_example() {
        let p = ProjectionProfile::from_values(vec![0, 0, 5, 6, 0, 0, 3, 0]);
        let seg = segment_lines(&p, 1);
        assert_eq!(
            seg.lines,
            vec![
                LineBounds {
                    first_row: 3,
                    last_row: 4
                },
                LineBounds {
                    first_row: 7,
                    last_row: 7
                },
            ]
        );
        assert_eq!(seg.discarded, 0);
    }

    #[test]
    fn segment_min_height_discards_and_tallies() {
        let p = ProjectionProfile::from_values(vec![0, 5, 0, 3, 3, 3, 0, 1]);
        let seg = segment_lines(&p, 3);
        assert_eq!(
            seg.lines,
            vec![LineBounds {
                first_row: 4,
                last_row: 6
            }]
        );
        assert_eq!(seg.discarded, 2);
    }

    #[test]
    fn segment_all_zero_is_empty() {
        let p = ProjectionProfile::from_values(vec![0; 10]);
        let seg = segment_lines(&p, 1);
        assert!(seg.lines.is_empty());
    }

    #[test]
    fn segment_covers_exactly_inked_rows_at_min_height_one() {
        let p = ProjectionProfile::from_values(vec![1, 0, 2, 2, 0, 0, 7]);
        let seg = segment_lines(&p, 1);
        let mut covered = vec![false; p.len() as usize];
        for b in &seg.lines {
            for i in b.first_row..=b.last_row {
                covered[(i - 1) as usize] = true;
            }
        }
        for i in 1..=p.len() {
            assert_eq!(covered[(i - 1) as usize], p.get(i) > 0);
        }
        // Re-running on the same profile is a no-op.
        assert_eq!(segment_lines(&p, 1), seg);
    }

    #[test]
    fn extract_line_delegates_with_bounds_check() {
        let bm = Bitmap::from_ascii(&["00", "11", "11", "00"]).unwrap();
        let img = rle::encode(&bm);
        let line = extract_line(
            &img,
            LineBounds {
                first_row: 2,
                last_row: 3,
            },
        )
        .unwrap();
        assert_eq!(line.height(), 2);
        assert!(extract_line(
            &img,
            LineBounds {
                first_row: 2,
                last_row: 9
            }
        )
        .is_err());
    }
}
