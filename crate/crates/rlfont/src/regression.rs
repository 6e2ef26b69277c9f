//! Least-squares lines mapping font size to feature height, their file
//! format, and inverse prediction with nearest-size snapping.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which measured height a model was trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKind {
    LineHeight,
    AscenderHeight,
    BaseHeight,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 3] = [
        FeatureKind::LineHeight,
        FeatureKind::AscenderHeight,
        FeatureKind::BaseHeight,
    ];
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureKind::LineHeight => "line_height",
            FeatureKind::AscenderHeight => "ascender_height",
            FeatureKind::BaseHeight => "base_height",
        })
    }
}

impl FromStr for FeatureKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "line_height" => Ok(FeatureKind::LineHeight),
            "ascender_height" => Ok(FeatureKind::AscenderHeight),
            "base_height" => Ok(FeatureKind::BaseHeight),
            other => Err(format!("unknown feature name {other:?}")),
        }
    }
}

/// (font size, measured height) samples for one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub feature: FeatureKind,
    pub samples: Vec<(u32, f64)>,
}

/// Fitted line `height = slope * size + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel {
    pub feature: FeatureKind,
    pub slope: f64,
    pub intercept: f64,
    pub residual_norm: f64,
    pub n_samples: usize,
}

/// Inverse prediction of one model for one measured value.
#[derive(Debug, Clone, PartialEq)]
pub struct FontSizeEstimate {
    pub raw_size: f64,
    pub snapped_size: u32,
    pub model_used: FeatureKind,
}

/// Ordinary least squares over (size, height) samples. Needs at least two
/// distinct sizes, and the slope must come out positive for the model to
/// be invertible toward larger sizes.
pub fn fit(ts: &TrainingSet) -> Result<RegressionModel> {
    let n = ts.samples.len();
    let distinct = {
        let mut xs: Vec<u32> = ts.samples.iter().map(|&(x, _)| x).collect();
        xs.sort_unstable();
        xs.dedup();
        xs.len()
    };
    if distinct < 2 {
        return Err(Error::SingularFit);
    }
    let nf = n as f64;
    let mean_x = ts.samples.iter().map(|&(x, _)| f64::from(x)).sum::<f64>() / nf;
    let mean_y = ts.samples.iter().map(|&(_, y)| y).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in &ts.samples {
        let dx = f64::from(x) - mean_x;
        sxx += dx * dx;
        sxy += dx * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    if slope <= 0.0 {
        return Err(Error::NonPositiveSlope {
            feature: ts.feature.to_string(),
            slope,
        });
    }
    let residual_norm = ts
        .samples
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + slope * f64::from(x));
            e * e
        })
        .sum::<f64>()
        .sqrt();
    Ok(RegressionModel {
        feature: ts.feature,
        slope,
        intercept,
        residual_norm,
        n_samples: n,
    })
}

/// Invert the model for a measured height and snap to the nearest
/// candidate size, ties going to the smaller candidate.
pub fn predict_size(
    model: &RegressionModel,
    feature_value: f64,
    candidates: &[u32],
) -> Result<FontSizeEstimate> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let raw = (feature_value - model.intercept) / model.slope;
    let mut sorted: Vec<u32> = candidates.to_vec();
    sorted.sort_unstable();
    let mut best = sorted[0];
    let mut best_dist = (f64::from(sorted[0]) - raw).abs();
    for &c in &sorted[1..] {
        let dist = (f64::from(c) - raw).abs();
        if dist < best_dist {
            best = c;
            best_dist = dist;
        }
    }
    Ok(FontSizeEstimate {
        raw_size: raw,
        snapped_size: best,
        model_used: model.feature,
    })
}

/// Write models one per line as
/// `feature=<name> p=<slope> q=<intercept> resid=<norm> n=<count>`.
/// Floats use the shortest representation that parses back exactly.
pub fn save_models(models: &[RegressionModel], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("# rlfont v1\n");
    for m in models {
        out.push_str(&format!(
            "feature={} p={} q={} resid={} n={}\n",
            m.feature, m.slope, m.intercept, m.residual_norm, m.n_samples
        ));
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Read a model file written by [`save_models`]. Blank lines and `#`
/// comments are skipped; duplicate features, unknown feature names and
/// malformed numbers are rejected with the offending line number.
pub fn load_models(path: impl AsRef<Path>) -> Result<Vec<RegressionModel>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let fail = |line: usize, message: String| Error::TextParse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut models: Vec<RegressionModel> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut feature: Option<FeatureKind> = None;
        let mut slope: Option<f64> = None;
        let mut intercept: Option<f64> = None;
        let mut resid: Option<f64> = None;
        let mut n: Option<usize> = None;
        for token in line.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| fail(line_no, format!("expected key=value, found {token:?}")))?;
            match key {
                "feature" => {
                    feature = Some(value.parse().map_err(|e| fail(line_no, e))?);
                }
                "p" => slope = Some(parse_f64(value, line_no, &fail)?),
                "q" => intercept = Some(parse_f64(value, line_no, &fail)?),
                "resid" => resid = Some(parse_f64(value, line_no, &fail)?),
                "n" => {
                    n = Some(
                        value
                            .parse()
                            .map_err(|_| fail(line_no, format!("malformed count {value:?}")))?,
                    )
                }
                other => return Err(fail(line_no, format!("unknown key {other:?}"))),
            }
        }
        let feature = feature.ok_or_else(|| fail(line_no, "missing feature=".into()))?;
        if models.iter().any(|m| m.feature == feature) {
            return Err(fail(line_no, format!("duplicate model for {feature}")));
        }
        let slope = slope.ok_or_else(|| fail(line_no, "missing p=".into()))?;
        if slope <= 0.0 {
            return Err(Error::NonPositiveSlope {
                feature: feature.to_string(),
                slope,
            });
        }
        models.push(RegressionModel {
            feature,
            slope,
            intercept: intercept.ok_or_else(|| fail(line_no, "missing q=".into()))?,
            residual_norm: resid.ok_or_else(|| fail(line_no, "missing resid=".into()))?,
            n_samples: n.ok_or_else(|| fail(line_no, "missing n=".into()))?,
        });
    }
    Ok(models)
}

fn parse_f64(value: &str, line_no: usize, fail: &impl Fn(usize, String) -> Error) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| fail(line_no, format!("malformed number {value:?}")))
}
