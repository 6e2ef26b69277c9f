//! C ABI over the rlfont pipeline: opaque handles, status codes, and a
//! flat per-line record. Every constructor has a matching `_free`; handles
//! must not be used after freeing. All functions are safe to call from any
//! thread as long as a handle is not freed while another call uses it.

use std::ffi::{c_char, CStr};
use std::path::PathBuf;

use rlfont::classify::{LineClass, MhdThresholds};
use rlfont::detector::{
    detect_document, DetectOptions, DocumentReport, LineOutcome, ModelSet, Routing,
    DEFAULT_CANDIDATES,
};
use rlfont::regression::{fit, FeatureKind, TrainingSet};
use rlfont::rle::{encode, CompressedImage};
use rlfont::synthgen::training_midpoints;
use rlfont::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlfStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument value was out of range or malformed.
    InvalidArgument = 2,
    IoError = 3,
    /// A file failed validation while being read.
    ParseError = 4,
    /// A line could not be measured or a page could not be processed.
    FeatureError = 5,
    /// The model set is unusable for detection.
    ModelError = 6,
    InternalError = 7,
}

/// Class of a text line.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlfLineClass {
    AscenderAndDescenderRich = 0,
    AscenderRich = 1,
    UpperCase = 2,
}

/// One detected line. When `measured` is false only the row range is
/// meaningful.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RlfLineInfo {
    pub first_row: u32,
    pub last_row: u32,
    pub measured: bool,
    pub line_class: RlfLineClass,
    pub snapped_size: u32,
    pub raw_size: f64,
    pub line_height: u32,
    pub mhd: f64,
    pub uppercase_unsupported: bool,
    pub short_line_low_confidence: bool,
}

/// A run-length compressed page.
pub struct RlfImage(CompressedImage);

/// Height models used for size prediction.
pub struct RlfModels(ModelSet);

/// Output of one detection run.
pub struct RlfReport(DocumentReport);

fn status_of(err: &Error) -> RlfStatus {
    match err {
        Error::Io { .. } => RlfStatus::IoError,
        Error::Parse { .. }
        | Error::TextParse { .. }
        | Error::CorruptRow { .. }
        | Error::InteriorPadding { .. } => RlfStatus::ParseError,
        Error::InvalidDimensions { .. }
        | Error::EmptyImage
        | Error::RowRange { .. }
        | Error::EmptyCandidates
        | Error::Layout(_)
        | Error::UnknownSize(_)
        | Error::Alignment(_) => RlfStatus::InvalidArgument,
        Error::DegenerateLine { .. }
        | Error::NoBaseBand { .. }
        | Error::InvertedPeaks { .. }
        | Error::EmptyExtent { .. } => RlfStatus::FeatureError,
        Error::SingularFit | Error::NonPositiveSlope { .. } | Error::MissingModel { .. } => {
            RlfStatus::ModelError
        }
    }
}

/// # Safety
/// `path` must be a valid NUL-terminated string.
unsafe fn path_arg(path: *const c_char) -> Option<PathBuf> {
    if path.is_null() {
        return None;
    }
    let bytes = unsafe { CStr::from_ptr(path) }.to_bytes();
    Some(PathBuf::from(String::from_utf8_lossy(bytes).into_owned()))
}

/// Read a `.rld` run document.
///
/// # Safety
/// `path` must point to a NUL-terminated string and `out` to writable
/// pointer storage.
#[no_mangle]
pub unsafe extern "C" fn rlf_image_read_rld(
    path: *const c_char,
    out: *mut *mut RlfImage,
) -> RlfStatus {
    if out.is_null() {
        return RlfStatus::NullArgument;
    }
    let Some(path) = (unsafe { path_arg(path) }) else {
        return RlfStatus::NullArgument;
    };
    match rlfont::docio::read_rldoc(&path) {
        Ok(img) => {
            unsafe { *out = Box::into_raw(Box::new(RlfImage(img))) };
            RlfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Read a PBM raster and compress it.
///
/// # Safety
/// Same contract as [`rlf_image_read_rld`].
#[no_mangle]
pub unsafe extern "C" fn rlf_image_read_pbm(
    path: *const c_char,
    out: *mut *mut RlfImage,
) -> RlfStatus {
    if out.is_null() {
        return RlfStatus::NullArgument;
    }
    let Some(path) = (unsafe { path_arg(path) }) else {
        return RlfStatus::NullArgument;
    };
    match rlfont::docio::read_pbm(&path) {
        Ok(bm) => {
            unsafe { *out = Box::into_raw(Box::new(RlfImage(encode(&bm)))) };
            RlfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Write an image back out as `.rld`.
///
/// # Safety
/// `img` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rlf_image_write_rld(
    img: *const RlfImage,
    path: *const c_char,
) -> RlfStatus {
    if img.is_null() {
        return RlfStatus::NullArgument;
    }
    let Some(path) = (unsafe { path_arg(path) }) else {
        return RlfStatus::NullArgument;
    };
    match rlfont::docio::write_rldoc(&unsafe { &*img }.0, &path) {
        Ok(()) => RlfStatus::Ok,
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `img` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlf_image_width(img: *const RlfImage) -> u32 {
    if img.is_null() {
        return 0;
    }
    unsafe { &*img }.0.width()
}

/// # Safety
/// `img` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlf_image_height(img: *const RlfImage) -> u32 {
    if img.is_null() {
        return 0;
    }
    unsafe { &*img }.0.height()
}

/// Pixels per stored run value; 0 for a null handle.
///
/// # Safety
/// `img` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlf_image_compression_ratio(img: *const RlfImage) -> f64 {
    if img.is_null() {
        return 0.0;
    }
    unsafe { &*img }.0.compression_ratio()
}

/// # Safety
/// `img` must come from an `rlf_image_*` constructor and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn rlf_image_free(img: *mut RlfImage) {
    if !img.is_null() {
        drop(unsafe { Box::from_raw(img) });
    }
}

/// Load a model file produced by training.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rlf_models_load(
    path: *const c_char,
    out: *mut *mut RlfModels,
) -> RlfStatus {
    if out.is_null() {
        return RlfStatus::NullArgument;
    }
    let Some(path) = (unsafe { path_arg(path) }) else {
        return RlfStatus::NullArgument;
    };
    match ModelSet::load(&path) {
        Ok(set) => {
            unsafe { *out = Box::into_raw(Box::new(RlfModels(set))) };
            RlfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Models fitted from the built-in reference measurements, usable without
/// any training data.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlf_models_reference(out: *mut *mut RlfModels) -> RlfStatus {
    if out.is_null() {
        return RlfStatus::NullArgument;
    }
    let build = || -> rlfont::Result<ModelSet> {
        Ok(ModelSet {
            line_height: fit(&TrainingSet {
                feature: FeatureKind::LineHeight,
                samples: training_midpoints(FeatureKind::LineHeight),
            })?,
            ascender_height: fit(&TrainingSet {
                feature: FeatureKind::AscenderHeight,
                samples: training_midpoints(FeatureKind::AscenderHeight),
            })?,
            base_height: Some(fit(&TrainingSet {
                feature: FeatureKind::BaseHeight,
                samples: training_midpoints(FeatureKind::BaseHeight),
            })?),
        })
    };
    match build() {
        Ok(set) => {
            unsafe { *out = Box::into_raw(Box::new(RlfModels(set))) };
            RlfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `models` must come from an `rlf_models_*` constructor and not be freed
/// yet.
#[no_mangle]
pub unsafe extern "C" fn rlf_models_free(models: *mut RlfModels) {
    if !models.is_null() {
        drop(unsafe { Box::from_raw(models) });
    }
}

/// Detect per-line font sizes. `candidates` may be null with
/// `n_candidates` 0 to snap to the seven standard sizes; `line_height_only`
/// disables the ascender model routing.
///
/// # Safety
/// `img` and `models` must be live handles, `candidates` must point to
/// `n_candidates` readable values when non-null, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlf_detect(
    img: *const RlfImage,
    models: *const RlfModels,
    candidates: *const u32,
    n_candidates: usize,
    mhd_low: f64,
    mhd_high: f64,
    line_height_only: bool,
    out: *mut *mut RlfReport,
) -> RlfStatus {
    if img.is_null() || models.is_null() || out.is_null() {
        return RlfStatus::NullArgument;
    }
    let candidate_vec: Vec<u32> = if candidates.is_null() || n_candidates == 0 {
        DEFAULT_CANDIDATES.to_vec()
    } else {
        unsafe { std::slice::from_raw_parts(candidates, n_candidates) }.to_vec()
    };
    if !(mhd_low >= 0.0 && mhd_high > mhd_low) {
        return RlfStatus::InvalidArgument;
    }
    let opts = DetectOptions {
        thresholds: MhdThresholds {
            low: mhd_low,
            high: mhd_high,
        },
        candidates: candidate_vec,
        min_line_height: 3,
        routing: if line_height_only {
            Routing::LineHeightOnly
        } else {
            Routing::TwoModel
        },
    };
    match detect_document(&unsafe { &*img }.0, &unsafe { &*models }.0, &opts) {
        Ok(report) => {
            unsafe { *out = Box::into_raw(Box::new(RlfReport(report))) };
            RlfStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `report` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rlf_report_line_count(report: *const RlfReport) -> usize {
    if report.is_null() {
        return 0;
    }
    unsafe { &*report }.0.lines.len()
}

/// Copy one line record into `info`.
///
/// # Safety
/// `report` must be a live handle and `info` writable.
#[no_mangle]
pub unsafe extern "C" fn rlf_report_line(
    report: *const RlfReport,
    index: usize,
    info: *mut RlfLineInfo,
) -> RlfStatus {
    if report.is_null() || info.is_null() {
        return RlfStatus::NullArgument;
    }
    let lines = &unsafe { &*report }.0.lines;
    let Some(record) = lines.get(index) else {
        return RlfStatus::InvalidArgument;
    };
    let mut out = RlfLineInfo {
        first_row: record.bounds.first_row,
        last_row: record.bounds.last_row,
        measured: false,
        line_class: RlfLineClass::AscenderAndDescenderRich,
        snapped_size: 0,
        raw_size: 0.0,
        line_height: record.bounds.last_row - record.bounds.first_row + 1,
        mhd: 0.0,
        uppercase_unsupported: false,
        short_line_low_confidence: false,
    };
    if let LineOutcome::Measured(m) = &record.outcome {
        out.measured = true;
        out.line_class = match m.class {
            LineClass::AscenderAndDescenderRich => RlfLineClass::AscenderAndDescenderRich,
            LineClass::AscenderRich => RlfLineClass::AscenderRich,
            LineClass::UpperCase => RlfLineClass::UpperCase,
        };
        out.snapped_size = m.estimate.snapped_size;
        out.raw_size = m.estimate.raw_size;
        out.line_height = m.features.h;
        out.mhd = m.densities.mhd;
        out.uppercase_unsupported = m.uppercase_unsupported;
        out.short_line_low_confidence = m.short_line_low_confidence;
    }
    unsafe { *info = out };
    RlfStatus::Ok
}

/// # Safety
/// `report` must come from [`rlf_detect`] and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn rlf_report_free(report: *mut RlfReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn rlf_status_message(status: RlfStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        RlfStatus::Ok => b"ok\0",
        RlfStatus::NullArgument => b"null argument\0",
        RlfStatus::InvalidArgument => b"invalid argument\0",
        RlfStatus::IoError => b"i/o error\0",
        RlfStatus::ParseError => b"file failed validation\0",
        RlfStatus::FeatureError => b"line could not be measured\0",
        RlfStatus::ModelError => b"model set unusable\0",
        RlfStatus::InternalError => b"internal error\0",
    };
    msg.as_ptr().cast()
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rlf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
