//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Image dimensions are zero or exceed the supported range.
    #[error("invalid dimensions {width}x{height}: {reason}")]
    InvalidDimensions {
        width: u64,
        height: u64,
        reason: &'static str,
    },

    /// A compressed row whose run lengths do not sum to the image width.
    /// Rows are reported 1-based.
    #[error("corrupt row {row}: runs sum to {actual}, expected width {expected}")]
    CorruptRow {
        row: u32,
        expected: u32,
        actual: u64,
    },

    /// A zero pair appeared before the end of a row.
    #[error("corrupt row {row}: zero pair before end of row")]
    InteriorPadding { row: u32 },

    /// An image with no rows where at least one is required.
    #[error("image has no rows")]
    EmptyImage,

    /// Row range outside the image, 1-based inclusive.
    #[error("row range {first}..{last} out of bounds for height {height}")]
    RowRange { first: u32, last: u32, height: u32 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed file content; `offset` is the byte position of the problem.
    #[error("{path}: parse error at byte {offset}: {message}")]
    Parse {
        path: PathBuf,
        offset: u64,
        message: String,
    },

    /// Malformed line-oriented text file (model, truth or line-spec files).
    #[error("{path}:{line}: {message}")]
    TextParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A profile too short to differentiate.
    #[error("degenerate line: height {height} < 2")]
    DegenerateLine { height: u32 },

    /// The differential profile has no usable positive maximum or negative minimum.
    #[error("no base band detected: {reason}")]
    NoBaseBand { reason: &'static str },

    /// Peak rows came out in the wrong order.
    #[error("inverted peaks: m1 = {m1}, m2 = {m2}")]
    InvertedPeaks { m1: u32, m2: u32 },

    /// The reconstructed text extent is not positive.
    #[error("non-positive text extent r = {r}")]
    EmptyExtent { r: i64 },

    /// Regression over samples with no spread in font size.
    #[error("singular fit: need at least 2 distinct font sizes")]
    SingularFit,

    /// A fitted or loaded model whose slope is not positive.
    #[error("model {feature} has non-positive slope {slope}")]
    NonPositiveSlope { feature: String, slope: f64 },

    #[error("candidate size set is empty")]
    EmptyCandidates,

    #[error("model set is missing a {feature} model")]
    MissingModel { feature: String },

    /// Page layout that cannot fit the requested lines.
    #[error("layout error: {0}")]
    Layout(String),

    /// Font size absent from the geometry table.
    #[error("no geometry for font size {0}")]
    UnknownSize(u32),

    /// Detected lines and ground truth that cannot be paired up.
    #[error("alignment error: {0}")]
    Alignment(String),
}
