//! Per-line feature extraction from run data: the differential profile and
//! its peak rows, the height features, compressed and original lengths,
//! and the density report used for line classification.

use crate::error::{Error, Result};
use crate::rle::CompressedImage;
use crate::segmentation::{vpp, ProjectionProfile};

/// Measurements of one text line. Row indices are 1-based within the line.
///
/// * `h` is the line height, the row count of the segmented line.
/// * `m1` and `m2` are the differential profile's positive maximum and
///   negative minimum rows; the band between them is the base region.
/// * `b = m2 - m1` base height, `a = m2` ascender height, `d = h - m1`
///   descender height, so `h == a + d - b` always holds.
/// * `l` is the compressed length: twice the pair-column count of the
///   widest row (shorter rows count as padded with zero pairs).
/// * `r` is the reconstructed horizontal extent of the original line and
///   `ratio = l / r` its fill-independent normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFeatures {
    pub h: u32,
    pub b: u32,
    pub a: u32,
    pub d: u32,
    pub m1: u32,
    pub m2: u32,
    pub l: u32,
    pub r: u32,
    pub ratio: f64,
}

/// Ink fractions of the line regions plus the top/bottom density
/// percentage that separates the line classes.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub line_density: f64,
    pub base_density: f64,
    pub ascender_density: f64,
    pub descender_density: f64,
    /// 100 * (P(1) + P(h)) / (2 r).
    pub mhd: f64,
}

/// P'(i) = P(i+1) - P(i) for i = 1..h-1.
pub fn differential_profile(profile: &ProjectionProfile) -> Result<Vec<i64>> {
    let h = profile.len();
    if h < 2 {
        return Err(Error::DegenerateLine { height: h });
    }
    Ok(profile
        .values()
        .windows(2)
        .map(|w| i64::from(w[1]) - i64::from(w[0]))
        .collect())
}

/// Rows of the strongest rise and drop in the profile: m1 is the first
/// index attaining the positive maximum, m2 the last index attaining the
/// negative minimum, which keeps the base band as wide as possible.
pub fn find_peaks(dp: &[i64]) -> Result<(u32, u32)> {
    if dp.is_empty() {
        return Err(Error::DegenerateLine { height: 1 });
    }
    let mut max_val = i64::MIN;
    let mut m1 = 0u32;
    for (k, &v) in dp.iter().enumerate() {
        if v > max_val {
            max_val = v;
            m1 = (k + 1) as u32;
        }
    }
    let mut min_val = i64::MAX;
    let mut m2 = 0u32;
    for (k, &v) in dp.iter().enumerate() {
        if v <= min_val {
            min_val = v;
            m2 = (k + 1) as u32;
        }
    }
    if max_val <= 0 {
        return Err(Error::NoBaseBand {
            reason: "differential profile has no positive maximum",
        });
    }
    if min_val >= 0 {
        return Err(Error::NoBaseBand {
            reason: "differential profile has no negative minimum",
        });
    }
    if m2 <= m1 {
        return Err(Error::InvertedPeaks { m1, m2 });
    }
    Ok((m1, m2))
}

/// Horizontal extent of the original line in pixels, reconstructed from
/// the runs alone: the width minus the smallest leading white run and the
/// largest last-column white run. Rows narrower than the widest are read
/// as padded with zero pairs, so only full-width rows contribute to the
/// last column.
pub fn text_extent(line: &CompressedImage) -> Result<u32> {
    let width = i64::from(line.width());
    let max_pairs = line.max_pairs_per_row();
    let mut min_leading = i64::MAX;
    let mut max_trailing = 0i64;
    for row in line.rows() {
        let leading = row.first().map_or(0, |p| i64::from(p.white));
        min_leading = min_leading.min(leading);
        if row.len() == max_pairs {
            let trailing = row.last().map_or(0, |p| i64::from(p.white));
            max_trailing = max_trailing.max(trailing);
        }
    }
    if min_leading == i64::MAX {
        min_leading = 0;
    }
    let r = width - min_leading - max_trailing;
    if r <= 0 {
        return Err(Error::EmptyExtent { r });
    }
    Ok(r as u32)
}

/// Full per-line measurement. Fails on lines shorter than two rows, lines
/// without a detectable base band and lines with no usable extent.
pub fn extract_features(line: &CompressedImage) -> Result<LineFeatures> {
    let profile = vpp(line);
    extract_features_with_profile(line, &profile)
}

/// Same as [`extract_features`] when the caller already has the profile.
pub fn extract_features_with_profile(
    line: &CompressedImage,
    profile: &ProjectionProfile,
) -> Result<LineFeatures> {
    let dp = differential_profile(profile)?;
    let (m1, m2) = find_peaks(&dp)?;
    let h = line.height();
    let r = text_extent(line)?;
    let l = (line.max_pairs_per_row() as u32) * 2;
    Ok(LineFeatures {
        h,
        b: m2 - m1,
        a: m2,
        d: h - m1,
        m1,
        m2,
        l,
        r,
        ratio: f64::from(l) / f64::from(r),
    })
}

/// Region ink densities and the top/bottom density percentage.
pub fn densities(line: &CompressedImage, feats: &LineFeatures) -> DensityReport {
    let profile = vpp(line);
    densities_with_profile(&profile, feats)
}

/// Same as [`densities`] when the caller already has the profile.
pub fn densities_with_profile(profile: &ProjectionProfile, feats: &LineFeatures) -> DensityReport {
    let sum = |from: u32, to: u32| -> f64 {
        (from..=to).map(|i| u64::from(profile.get(i))).sum::<u64>() as f64
    };
    let h = feats.h;
    let r = f64::from(feats.r);
    DensityReport {
        line_density: sum(1, h) / (f64::from(h) * r),
        base_density: sum(feats.m1, feats.m2) / (f64::from(feats.b) * r),
        ascender_density: sum(1, feats.m2) / (f64::from(feats.a) * r),
        descender_density: sum(feats.m1, h) / (f64::from(feats.d) * r),
        mhd: 100.0 * (f64::from(profile.get(1)) + f64::from(profile.get(h))) / (2.0 * r),
    }
}
