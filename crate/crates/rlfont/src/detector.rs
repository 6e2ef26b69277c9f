//! End-to-end recognition: segment a compressed page, measure each line,
//! classify it, route it to the right height model and snap the predicted
//! size. Also scores a report against ground truth.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::classify::{classify_line, LineClass, MhdThresholds};
use crate::error::{Error, Result};
use crate::features::{densities_with_profile, extract_features, DensityReport, LineFeatures};
use crate::regression::{predict_size, FeatureKind, FontSizeEstimate, RegressionModel};
use crate::rle::CompressedImage;
use crate::segmentation::{extract_line, segment_lines, vpp, LineBounds};
use crate::synthgen::GroundTruth;

/// Sizes detection snaps to when nothing else is requested.
pub const DEFAULT_CANDIDATES: [u32; 7] = [8, 10, 12, 14, 16, 18, 20];

/// The models detection needs: a line height model, an ascender height
/// model, and optionally a base height model, which is carried along but
/// not routed to by default.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet {
    pub line_height: RegressionModel,
    pub ascender_height: RegressionModel,
    pub base_height: Option<RegressionModel>,
}

impl ModelSet {
    pub fn from_models(models: Vec<RegressionModel>) -> Result<Self> {
        let mut by_kind: BTreeMap<FeatureKind, RegressionModel> = BTreeMap::new();
        for m in models {
            by_kind.insert(m.feature, m);
        }
        let take = |kind: FeatureKind, by: &mut BTreeMap<FeatureKind, RegressionModel>| {
            by.remove(&kind).ok_or_else(|| Error::MissingModel {
                feature: kind.to_string(),
            })
        };
        Ok(Self {
            line_height: take(FeatureKind::LineHeight, &mut by_kind)?,
            ascender_height: take(FeatureKind::AscenderHeight, &mut by_kind)?,
            base_height: by_kind.remove(&FeatureKind::BaseHeight),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_models(crate::regression::load_models(path)?)
    }

    pub fn to_vec(&self) -> Vec<RegressionModel> {
        let mut v = vec![self.line_height.clone(), self.ascender_height.clone()];
        if let Some(b) = &self.base_height {
            v.push(b.clone());
        }
        v
    }
}

/// Which models recognition may route to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Routing {
    /// Ascender rich lines go to the ascender height model.
    TwoModel,
    /// Everything goes to the line height model.
    LineHeightOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectOptions {
    pub thresholds: MhdThresholds,
    pub candidates: Vec<u32>,
    pub min_line_height: u32,
    pub routing: Routing,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            thresholds: MhdThresholds::default(),
            candidates: DEFAULT_CANDIDATES.to_vec(),
            min_line_height: 3,
            routing: Routing::TwoModel,
        }
    }
}

/// Everything measured for one successfully processed line.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredLine {
    pub features: LineFeatures,
    pub densities: DensityReport,
    pub class: LineClass,
    pub estimate: FontSizeEstimate,
    /// Upper case lines are outside the supported scope; the size is a
    /// best effort value from the line height model.
    pub uppercase_unsupported: bool,
    /// Set when the normalized length ratio deviates more than 50% from
    /// the page median, which marks short trailing lines whose height can
    /// come out under the true line height.
    pub short_line_low_confidence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LineOutcome {
    Measured(Box<MeasuredLine>),
    /// Feature extraction failed; the line is reported, not dropped.
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineRecord {
    pub bounds: LineBounds,
    pub outcome: LineOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentReport {
    pub lines: Vec<LineRecord>,
    /// Ink runs shorter than the minimum line height, skipped by
    /// segmentation.
    pub discarded_segments: usize,
}

/// Run the whole pipeline over one compressed page.
pub fn detect_document(
    page: &CompressedImage,
    models: &ModelSet,
    opts: &DetectOptions,
) -> Result<DocumentReport> {
    if opts.candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let profile = vpp(page);
    let seg = segment_lines(&profile, opts.min_line_height);

    let mut lines = Vec::with_capacity(seg.lines.len());
    for bounds in seg.lines {
        let outcome = measure_line(page, bounds, models, opts);
        lines.push(LineRecord { bounds, outcome });
    }

    flag_short_lines(&mut lines);
    Ok(DocumentReport {
        lines,
        discarded_segments: seg.discarded,
    })
}

fn measure_line(
    page: &CompressedImage,
    bounds: LineBounds,
    models: &ModelSet,
    opts: &DetectOptions,
) -> LineOutcome {
    let attempt = || -> Result<MeasuredLine> {
        let line = extract_line(page, bounds)?;
        let features = extract_features(&line)?;
        let line_profile = vpp(&line);
        let densities = densities_with_profile(&line_profile, &features);
        let class = classify_line(densities.mhd, opts.thresholds);
        let height = f64::from(features.h);
        let model = match (opts.routing, class) {
            (Routing::TwoModel, LineClass::AscenderRich) => &models.ascender_height,
            // Without descenders the measured line height is already the
            // ascender height, so the ascender model reads it directly.
            _ => &models.line_height,
        };
        let estimate = predict_size(model, height, &opts.candidates)?;
        Ok(MeasuredLine {
            features,
            densities,
            class,
            estimate,
            uppercase_unsupported: class == LineClass::UpperCase,
            short_line_low_confidence: false,
        })
    };
    match attempt() {
        Ok(m) => LineOutcome::Measured(Box::new(m)),
        Err(e) => LineOutcome::Failed {
            error: e.to_string(),
        },
    }
}

/// Mark lines whose normalized length ratio strays more than 50% from the
/// page median.
fn flag_short_lines(lines: &mut [LineRecord]) {
    let mut ratios: Vec<f64> = lines
        .iter()
        .filter_map(|l| match &l.outcome {
            LineOutcome::Measured(m) => Some(m.features.ratio),
            LineOutcome::Failed { .. } => None,
        })
        .collect();
    if ratios.len() < 2 {
        return;
    }
    ratios.sort_by(|a, b| a.total_cmp(b));
    let mid = ratios.len() / 2;
    let median = if ratios.len().is_multiple_of(2) {
        (ratios[mid - 1] + ratios[mid]) / 2.0
    } else {
        ratios[mid]
    };
    if median <= 0.0 {
        return;
    }
    for line in lines {
        if let LineOutcome::Measured(m) = &mut line.outcome {
            if (m.features.ratio - median).abs() > 0.5 * median {
                m.short_line_low_confidence = true;
            }
        }
    }
}

/// Accuracy of one size bucket.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SizeScore {
    pub total: usize,
    pub correct: usize,
}

impl SizeScore {
    pub fn percent(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.correct as f64 / self.total as f64
        }
    }
}

/// Per-size and overall accuracy of a report against ground truth. Lines
/// the detector flagged as upper case are tallied separately instead of
/// entering the accuracy, which covers mixed case text only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreReport {
    pub per_size: BTreeMap<u32, SizeScore>,
    pub overall: SizeScore,
    pub excluded_uppercase: usize,
}

/// Pair detected line bounds with ground truth lines by row overlap, one
/// to one. Returns the truth index for each bound, or an alignment error
/// naming whatever could not be matched.
pub fn align_bounds(bounds: &[LineBounds], truth: &GroundTruth) -> Result<Vec<usize>> {
    if bounds.len() != truth.lines.len() {
        return Err(Error::Alignment(format!(
            "{} detected lines vs {} ground truth lines",
            bounds.len(),
            truth.lines.len()
        )));
    }
    let mut used = vec![false; truth.lines.len()];
    let mut assignment = Vec::with_capacity(bounds.len());
    for b in bounds {
        let best = truth
            .lines
            .iter()
            .enumerate()
            .filter(|(i, t)| !used[*i] && b.overlap(&t.bounds()) > 0)
            .max_by_key(|(_, t)| b.overlap(&t.bounds()));
        let (idx, _) = best.ok_or_else(|| {
            Error::Alignment(format!(
                "no ground truth line overlaps rows {}..{}",
                b.first_row, b.last_row
            ))
        })?;
        used[idx] = true;
        assignment.push(idx);
    }
    if let Some(missed) = used.iter().position(|&u| !u) {
        let t = &truth.lines[missed];
        return Err(Error::Alignment(format!(
            "ground truth rows {}..{} matched no detected line",
            t.first_row, t.last_row
        )));
    }
    Ok(assignment)
}

/// Align detected lines with ground truth by row overlap and score the
/// snapped sizes. Both sets must pair up one to one; anything unmatched is
/// an alignment error naming the offending bounds.
pub fn score(report: &DocumentReport, truth: &GroundTruth) -> Result<ScoreReport> {
    let bounds: Vec<LineBounds> = report.lines.iter().map(|l| l.bounds).collect();
    let assignment = align_bounds(&bounds, truth)?;
    let mut out = ScoreReport::default();
    for (record, &idx) in report.lines.iter().zip(&assignment) {
        let truth_line = &truth.lines[idx];
        match &record.outcome {
            LineOutcome::Measured(m) if m.uppercase_unsupported => {
                out.excluded_uppercase += 1;
            }
            LineOutcome::Measured(m) => {
                let entry = out.per_size.entry(truth_line.font_size).or_default();
                entry.total += 1;
                out.overall.total += 1;
                if m.estimate.snapped_size == truth_line.font_size {
                    entry.correct += 1;
                    out.overall.correct += 1;
                }
            }
            LineOutcome::Failed { .. } if truth_line.class == LineClass::UpperCase => {
                out.excluded_uppercase += 1;
            }
            LineOutcome::Failed { .. } => {
                out.per_size.entry(truth_line.font_size).or_default().total += 1;
                out.overall.total += 1;
            }
        }
    }
    Ok(out)
}

/// Tab-separated line dump: one row per line with every measured field.
pub fn render_tsv(report: &DocumentReport) -> String {
    let mut out = String::from("# rlfont v1\n");
    out.push_str("# rows\tclass\tsize\traw\th\tb\ta\td\tm1\tm2\tl\tr\tR\tmhd\tflags\n");
    for record in &report.lines {
        let rows = format!("{}..{}", record.bounds.first_row, record.bounds.last_row);
        match &record.outcome {
            LineOutcome::Measured(m) => {
                let f = &m.features;
                let mut flags = Vec::new();
                if m.uppercase_unsupported {
                    flags.push("uppercase_unsupported");
                }
                if m.short_line_low_confidence {
                    flags.push("short_line_low_confidence");
                }
                writeln!(
                    out,
                    "{rows}\t{}\t{}\t{:.4}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.4}\t{}",
                    m.class,
                    m.estimate.snapped_size,
                    m.estimate.raw_size,
                    f.h,
                    f.b,
                    f.a,
                    f.d,
                    f.m1,
                    f.m2,
                    f.l,
                    f.r,
                    f.ratio,
                    m.densities.mhd,
                    if flags.is_empty() {
                        "-".to_string()
                    } else {
                        flags.join(",")
                    },
                )
                .unwrap();
            }
            LineOutcome::Failed { error } => {
                writeln!(
                    out,
                    "{rows}\terror\t-\t-\t-\t-\t-\t-\t-\t-\t-\t-\t-\t-\t{error}"
                )
                .unwrap();
            }
        }
    }
    out
}

/// Two-column text layout: the text region on the left, the detected font
/// size on the right.
pub fn render_layout(report: &DocumentReport) -> String {
    let mut out = String::from("# rlfont v1\n");
    out.push_str("# text region\tfont size\n");
    for record in &report.lines {
        let region = format!(
            "text rows {}..{}",
            record.bounds.first_row, record.bounds.last_row
        );
        match &record.outcome {
            LineOutcome::Measured(m) if m.uppercase_unsupported => {
                writeln!(
                    out,
                    "{region}\t{} (upper case, best effort)",
                    m.estimate.snapped_size
                )
                .unwrap();
            }
            LineOutcome::Measured(m) => {
                writeln!(out, "{region}\t{}", m.estimate.snapped_size).unwrap();
            }
            LineOutcome::Failed { error } => {
                writeln!(out, "{region}\tunrecognized ({error})").unwrap();
            }
        }
    }
    out
}

/// Table-style accuracy rendering with one row per size and the overall
/// percentage at the bottom.
pub fn render_score(score: &ScoreReport) -> String {
    let mut out = String::from("# font size\tlines\tcorrect\taccuracy %\n");
    for (size, s) in &score.per_size {
        writeln!(
            out,
            "{size}\t{}\t{}\t{:.2}",
            s.total,
            s.correct,
            s.percent()
        )
        .unwrap();
    }
    writeln!(
        out,
        "overall\t{}\t{}\t{:.2}",
        score.overall.total,
        score.overall.correct,
        score.overall.percent()
    )
    .unwrap();
    if score.excluded_uppercase > 0 {
        writeln!(
            out,
            "# {} upper case line(s) excluded from accuracy",
            score.excluded_uppercase
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regression::{fit, TrainingSet};
    use crate::rle;
    use crate::synthgen::{generate_page, training_midpoints, GeometryTable, LineSpec, PageLayout};

    fn reference_models() -> ModelSet {
        let line = fit(&TrainingSet {
            feature: FeatureKind::LineHeight,
            samples: training_midpoints(FeatureKind::LineHeight),
        })
        .unwrap();
        let asc = fit(&TrainingSet {
            feature: FeatureKind::AscenderHeight,
            samples: training_midpoints(FeatureKind::AscenderHeight),
        })
        .unwrap();
        ModelSet {
            line_height: line,
            ascender_height: asc,
            base_height: None,
        }
    }

    fn layout() -> PageLayout {
        PageLayout {
            width: 900,
            margin_x: 40,
            margin_y: 25,
            gap: 18,
            height: None,
        }
    }

    #[test]
    fn blank_page_gives_empty_report() {
        let (page, _) = generate_page(&[], &GeometryTable::standard(), &layout(), 1).unwrap();
        let img = rle::encode(&page);
        let report = detect_document(&img, &reference_models(), &DetectOptions::default()).unwrap();
        assert!(report.lines.is_empty());
    }

    #[test]
    fn mixed_page_detects_every_size() {
        let table = GeometryTable::standard();
        let mut specs = Vec::new();
        for (i, &size) in DEFAULT_CANDIDATES.iter().enumerate() {
            specs.push(LineSpec {
                font_size: size,
                class: if i % 2 == 0 {
                    LineClass::AscenderAndDescenderRich
                } else {
                    LineClass::AscenderRich
                },
                fill: 0.9,
            });
        }
        let (page, truth) = generate_page(&specs, &table, &layout(), 5).unwrap();
        let img = rle::encode(&page);
        let report = detect_document(&img, &reference_models(), &DetectOptions::default()).unwrap();
        let s = score(&report, &truth).unwrap();
        assert_eq!(s.overall.total, specs.len());
        assert_eq!(s.overall.correct, specs.len());
        assert!((s.overall.percent() - 100.0).abs() < 1e-12);
    }

    #[test]
    fn ascender_rich_lines_route_to_the_ascender_model() {
        let table = GeometryTable::standard();
        let specs = [LineSpec {
            font_size: 14,
            class: LineClass::AscenderRich,
            fill: 0.8,
        }];
        let (page, _) = generate_page(&specs, &table, &layout(), 9).unwrap();
        let img = rle::encode(&page);
        let report = detect_document(&img, &reference_models(), &DetectOptions::default()).unwrap();
        match &report.lines[0].outcome {
            LineOutcome::Measured(m) => {
                assert_eq!(m.class, LineClass::AscenderRich);
                assert_eq!(m.estimate.model_used, FeatureKind::AscenderHeight);
                assert_eq!(m.estimate.snapped_size, 14);
            }
            other => panic!("expected measured line, got {other:?}"),
        }
    }

    #[test]
    fn line_height_only_undersizes_ascender_rich_lines() {
        let table = GeometryTable::standard();
        let specs = [LineSpec {
            font_size: 14,
            class: LineClass::AscenderRich,
            fill: 0.8,
        }];
        let (page, _) = generate_page(&specs, &table, &layout(), 9).unwrap();
        let img = rle::encode(&page);
        let opts = DetectOptions {
            routing: Routing::LineHeightOnly,
            ..DetectOptions::default()
        };
        let report = detect_document(&img, &reference_models(), &opts).unwrap();
        match &report.lines[0].outcome {
            LineOutcome::Measured(m) => {
                assert_eq!(m.estimate.model_used, FeatureKind::LineHeight);
                assert!(m.estimate.snapped_size < 14);
            }
            other => panic!("expected measured line, got {other:?}"),
        }
    }

    #[test]
    fn uppercase_lines_are_flagged_and_excluded_from_scoring() {
        let table = GeometryTable::standard();
        let specs = [
            LineSpec {
                font_size: 12,
                class: LineClass::UpperCase,
                fill: 0.9,
            },
            LineSpec {
                font_size: 12,
                class: LineClass::AscenderAndDescenderRich,
                fill: 0.9,
            },
        ];
        let (page, truth) = generate_page(&specs, &table, &layout(), 21).unwrap();
        let img = rle::encode(&page);
        let report = detect_document(&img, &reference_models(), &DetectOptions::default()).unwrap();
        match &report.lines[0].outcome {
            LineOutcome::Measured(m) => assert!(m.uppercase_unsupported),
            other => panic!("expected measured line, got {other:?}"),
        }
        let s = score(&report, &truth).unwrap();
        assert_eq!(s.excluded_uppercase, 1);
        assert_eq!(s.overall.total, 1);
        assert_eq!(s.overall.correct, 1);
    }

    #[test]
    fn outlier_ratio_lines_are_flagged_against_the_page_median() {
        // Three blobby lines and one nearly solid band. The solid band has
        // a far smaller normalized length ratio than the page median.
        let width = 600u32;
        let blobby_row = || -> Vec<crate::rle::RunPair> {
            let mut row = vec![crate::rle::RunPair::new(20, 10)];
            for _ in 0..39 {
                row.push(crate::rle::RunPair::new(4, 10));
            }
            // Runs so far cover 20 + 10 + 39*14 = 576 columns.
            row.push(crate::rle::RunPair::new(0, 3));
            row.push(crate::rle::RunPair::new(21, 0));
            row
        };
        let half_row = || -> Vec<crate::rle::RunPair> {
            let mut row = vec![crate::rle::RunPair::new(20, 5)];
            for _ in 0..39 {
                row.push(crate::rle::RunPair::new(9, 5));
            }
            row.push(crate::rle::RunPair::new(29, 0));
            row
        };
        let sparse_row = || {
            vec![
                crate::rle::RunPair::new(20, 3),
                crate::rle::RunPair::new(553, 3),
                crate::rle::RunPair::new(21, 0),
            ]
        };
        let solid_row = || {
            vec![
                crate::rle::RunPair::new(20, 559),
                crate::rle::RunPair::new(21, 0),
            ]
        };
        let half_solid_row = || {
            vec![
                crate::rle::RunPair::new(20, 280),
                crate::rle::RunPair::new(300, 0),
            ]
        };
        let gap_row = || vec![crate::rle::RunPair::new(width, 0)];

        let mut rows: Vec<Vec<crate::rle::RunPair>> = vec![gap_row()];
        for _ in 0..3 {
            rows.push(sparse_row());
            for _ in 0..6 {
                rows.push(blobby_row());
            }
            rows.push(half_row());
            rows.push(gap_row());
        }
        rows.push(sparse_row());
        for _ in 0..6 {
            rows.push(solid_row());
        }
        rows.push(half_solid_row());
        rows.push(gap_row());

        let img = crate::rle::CompressedImage::from_rows(width, rows).unwrap();
        let report = detect_document(&img, &reference_models(), &DetectOptions::default()).unwrap();
        let flags: Vec<bool> = report
            .lines
            .iter()
            .map(|l| match &l.outcome {
                LineOutcome::Measured(m) => m.short_line_low_confidence,
                LineOutcome::Failed { error } => panic!("unexpected failure: {error}"),
            })
            .collect();
        assert_eq!(flags, vec![false, false, false, true]);
    }

    #[test]
    fn scoring_arithmetic() {
        let table = GeometryTable::standard();
        let specs: Vec<LineSpec> = (0..10)
            .map(|_| LineSpec {
                font_size: 12,
                class: LineClass::AscenderAndDescenderRich,
                fill: 0.9,
            })
            .collect();
        let (page, mut truth) = generate_page(&specs, &table, &layout(), 2).unwrap();
        let img = rle::encode(&page);
        let report = detect_document(&img, &reference_models(), &DetectOptions::default()).unwrap();
        let s = score(&report, &truth).unwrap();
        assert!((s.overall.percent() - 100.0).abs() < 1e-12);
        // One deliberately corrupted label drops the overall to 90%.
        truth.lines[3].font_size = 8;
        let s = score(&report, &truth).unwrap();
        assert!((s.overall.percent() - 90.0).abs() < 1e-12);
    }

    #[test]
    fn misaligned_truth_is_an_error() {
        let table = GeometryTable::standard();
        let specs = [LineSpec {
            font_size: 12,
            class: LineClass::AscenderAndDescenderRich,
            fill: 0.9,
        }];
        let (page, mut truth) = generate_page(&specs, &table, &layout(), 2).unwrap();
        let img = rle::encode(&page);
        let report = detect_document(&img, &reference_models(), &DetectOptions::default()).unwrap();
        truth.lines[0].first_row += 500;
        truth.lines[0].last_row += 500;
        match score(&report, &truth) {
            Err(Error::Alignment(msg)) => assert!(msg.contains("rows")),
            other => panic!("expected alignment error, got {other:?}"),
        }
    }

    #[test]
    fn report_rendering_is_deterministic() {
        let table = GeometryTable::standard();
        let specs = [
            LineSpec {
                font_size: 10,
                class: LineClass::AscenderAndDescenderRich,
                fill: 0.9,
            },
            LineSpec {
                font_size: 16,
                class: LineClass::AscenderRich,
                fill: 0.7,
            },
        ];
        let (page, _) = generate_page(&specs, &table, &layout(), 13).unwrap();
        let img = rle::encode(&page);
        let models = reference_models();
        let a = render_tsv(&detect_document(&img, &models, &DetectOptions::default()).unwrap());
        let b = render_tsv(&detect_document(&img, &models, &DetectOptions::default()).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with("# rlfont v1\n"));
    }
}
