//! Brute-force raster oracle used by the integration suites. Everything
//! here works over decoded pixels with plain loops, independent of the
//! run-domain code paths it cross-checks.

// Each test binary compiles this module separately and uses a subset.
#![allow(dead_code)]

use rlfont::rle::Bitmap;

/// Per-row ink counts from pixels.
pub fn oracle_profile(bm: &Bitmap) -> Vec<u32> {
    let mut profile = Vec::with_capacity(bm.height() as usize);
    for r in 0..bm.height() {
        let mut ink = 0u32;
        for c in 0..bm.width() {
            if bm.get(r, c) != 0 {
                ink += 1;
            }
        }
        profile.push(ink);
    }
    profile
}

/// Maximal runs of inked rows, 1-based inclusive, dropping runs shorter
/// than `min_height`.
pub fn oracle_segments(profile: &[u32], min_height: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &p) in profile.iter().enumerate() {
        if p > 0 && start.is_none() {
            start = Some(i);
        }
        if p == 0 {
            if let Some(s) = start.take() {
                if (i - s) as u32 >= min_height {
                    out.push((s as u32 + 1, i as u32));
                }
            }
        }
    }
    if let Some(s) = start {
        let end = profile.len();
        if (end - s) as u32 >= min_height {
            out.push((s as u32 + 1, end as u32));
        }
    }
    out
}

/// Alternating (white, black) run pairs of one pixel row, starting on
/// white and ending on a whole pair.
fn row_pairs(row: &[u8]) -> Vec<(u32, u32)> {
    let mut pairs = Vec::new();
    let mut i = 0usize;
    while i < row.len() {
        let mut white = 0u32;
        while i < row.len() && row[i] == 0 {
            white += 1;
            i += 1;
        }
        let mut black = 0u32;
        while i < row.len() && row[i] != 0 {
            black += 1;
            i += 1;
        }
        pairs.push((white, black));
    }
    if pairs.is_empty() {
        pairs.push((0, 0));
    }
    pairs
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleFeatures {
    pub h: u32,
    pub b: u32,
    pub a: u32,
    pub d: u32,
    pub m1: u32,
    pub m2: u32,
    pub l: u32,
    pub r: u32,
    pub ratio: f64,
    pub mhd: f64,
}

/// Feature measurement over a decoded line, mirroring the definitions by
/// brute force. Returns None when the line has no usable peak pair or no
/// positive extent.
pub fn oracle_features(line: &Bitmap) -> Option<OracleFeatures> {
    let h = line.height();
    if h < 2 {
        return None;
    }
    let profile = oracle_profile(line);

    let mut dp = Vec::with_capacity(profile.len() - 1);
    for i in 0..profile.len() - 1 {
        dp.push(i64::from(profile[i + 1]) - i64::from(profile[i]));
    }
    let mut m1 = 0usize;
    for (i, &v) in dp.iter().enumerate() {
        if v > dp[m1] {
            m1 = i;
        }
    }
    let mut m2 = 0usize;
    for (i, &v) in dp.iter().enumerate() {
        if v <= dp[m2] {
            m2 = i;
        }
    }
    if dp[m1] <= 0 || dp[m2] >= 0 || m2 <= m1 {
        return None;
    }
    let (m1, m2) = (m1 as u32 + 1, m2 as u32 + 1);

    let pair_rows: Vec<Vec<(u32, u32)>> = (0..h).map(|r| row_pairs(line.row(r))).collect();
    let max_pairs = pair_rows.iter().map(Vec::len).max().unwrap();
    let mut min_lead = i64::MAX;
    let mut max_trail = 0i64;
    for pairs in &pair_rows {
        min_lead = min_lead.min(i64::from(pairs[0].0));
        if pairs.len() == max_pairs {
            max_trail = max_trail.max(i64::from(pairs[pairs.len() - 1].0));
        }
    }
    let r = i64::from(line.width()) - min_lead - max_trail;
    if r <= 0 {
        return None;
    }
    let r = r as u32;
    let l = 2 * max_pairs as u32;

    Some(OracleFeatures {
        h,
        b: m2 - m1,
        a: m2,
        d: h - m1,
        m1,
        m2,
        l,
        r,
        ratio: f64::from(l) / f64::from(r),
        mhd: 100.0 * (f64::from(profile[0]) + f64::from(profile[(h - 1) as usize]))
            / (2.0 * f64::from(r)),
    })
}

/// Copy of a row range of a bitmap, 1-based inclusive.
pub fn bitmap_slice(bm: &Bitmap, first: u32, last: u32) -> Bitmap {
    let mut out = Bitmap::new(bm.width(), last - first + 1).unwrap();
    for (dst, src) in (first - 1..last).enumerate() {
        for c in 0..bm.width() {
            out.set(dst as u32, c, bm.get(src, c));
        }
    }
    out
}

/// One pass/fail line per acceptance criterion, panicking after a FAIL so
/// the test harness reports it too.
pub fn criterion<F>(number: u32, name: &str, body: F)
where
    F: FnOnce() -> String + std::panic::UnwindSafe,
{
    match std::panic::catch_unwind(body) {
        Ok(detail) if detail.is_empty() => println!("criterion {number} ({name}): PASS"),
        Ok(detail) => println!("criterion {number} ({name}): PASS [{detail}]"),
        Err(cause) => {
            let msg = cause
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| cause.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string());
            println!("criterion {number} ({name}): FAIL [{msg}]");
            std::panic::resume_unwind(cause);
        }
    }
}
