//! Timing comparison between the run-domain projection profile and the
//! expand-first raster path over the same page.

use std::time::Instant;

use crate::error::Result;
use crate::rle::{decode, CompressedImage};
use crate::segmentation::vpp_counting;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub iterations: u32,
    /// Best and mean wall time per iteration, in nanoseconds.
    pub compressed_best_ns: u128,
    pub compressed_mean_ns: u128,
    pub raster_best_ns: u128,
    pub raster_mean_ns: u128,
    pub pixels: u64,
    pub pairs: u64,
    /// Pairs visited by the run-domain pass; equals `pairs` when the pass
    /// touches each stored pair exactly once.
    pub visits: u64,
    pub compression_ratio: f64,
    /// Both paths produced identical profiles.
    pub profiles_match: bool,
}

impl BenchReport {
    pub fn speedup(&self) -> f64 {
        if self.compressed_best_ns == 0 {
            return f64::INFINITY;
        }
        self.raster_best_ns as f64 / self.compressed_best_ns as f64
    }
}

/// Time `iterations` runs of each path. The raster path pays for the full
/// expansion plus a per-pixel sweep, which is the cost a pipeline avoids
/// by staying in the run domain.
pub fn run_bench(img: &CompressedImage, iterations: u32) -> Result<BenchReport> {
    let iterations = iterations.max(1);

    let (reference, visits) = vpp_counting(img);

    let mut compressed_best = u128::MAX;
    let mut compressed_total = 0u128;
    for _ in 0..iterations {
        let start = Instant::now();
        let (profile, _) = vpp_counting(img);
        let ns = start.elapsed().as_nanos();
        std::hint::black_box(&profile);
        compressed_best = compressed_best.min(ns);
        compressed_total += ns;
    }

    let mut raster_best = u128::MAX;
    let mut raster_total = 0u128;
    let mut profiles_match = true;
    for _ in 0..iterations {
        let start = Instant::now();
        let bitmap = decode(img)?;
        let mut profile = Vec::with_capacity(bitmap.height() as usize);
        for r in 0..bitmap.height() {
            let ink: u32 = bitmap.row(r).iter().map(|&p| u32::from(p)).sum();
            profile.push(ink);
        }
        let ns = start.elapsed().as_nanos();
        std::hint::black_box(&profile);
        raster_best = raster_best.min(ns);
        raster_total += ns;
        profiles_match &= profile == reference.values();
    }

    Ok(BenchReport {
        iterations,
        compressed_best_ns: compressed_best,
        compressed_mean_ns: compressed_total / u128::from(iterations),
        raster_best_ns: raster_best,
        raster_mean_ns: raster_total / u128::from(iterations),
        pixels: u64::from(img.width()) * u64::from(img.height()),
        pairs: img.total_pairs(),
        visits,
        compression_ratio: img.compression_ratio(),
        profiles_match,
    })
}
