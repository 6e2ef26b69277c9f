//! Exercises the C surface the way a foreign caller would: paths in,
//! handles out, flat records, explicit frees.

use std::ffi::CString;
use std::ptr;

use rlfont::classify::LineClass;
use rlfont::rle::encode;
use rlfont::synthgen::{generate_page, GeometryTable, LineSpec, PageLayout};
use rlfont_capi::*;

fn c_path(path: &std::path::Path) -> CString {
    CString::new(path.to_str().unwrap()).unwrap()
}

fn write_test_page(dir: &std::path::Path) -> std::path::PathBuf {
    let layout = PageLayout {
        width: 1000,
        margin_x: 40,
        margin_y: 30,
        gap: 18,
        height: None,
    };
    let specs = [
        LineSpec {
            font_size: 12,
            class: LineClass::AscenderAndDescenderRich,
            fill: 0.9,
        },
        LineSpec {
            font_size: 16,
            class: LineClass::AscenderRich,
            fill: 0.8,
        },
        LineSpec {
            font_size: 10,
            class: LineClass::UpperCase,
            fill: 0.7,
        },
    ];
    let (page, _) = generate_page(&specs, &GeometryTable::standard(), &layout, 77).unwrap();
    let path = dir.join("page.rld");
    rlfont::docio::write_rldoc(&encode(&page), &path).unwrap();
    path
}

#[test]
fn detect_through_the_c_surface() {
    let dir = tempfile::tempdir().unwrap();
    let page = write_test_page(dir.path());

    unsafe {
        let mut img: *mut RlfImage = ptr::null_mut();
        assert_eq!(
            rlf_image_read_rld(c_path(&page).as_ptr(), &mut img),
            RlfStatus::Ok
        );
        assert_eq!(rlf_image_width(img), 1000);
        assert!(rlf_image_height(img) > 0);
        assert!(rlf_image_compression_ratio(img) > 1.0);

        let mut models: *mut RlfModels = ptr::null_mut();
        assert_eq!(rlf_models_reference(&mut models), RlfStatus::Ok);

        let mut report: *mut RlfReport = ptr::null_mut();
        assert_eq!(
            rlf_detect(img, models, ptr::null(), 0, 7.0, 25.0, false, &mut report),
            RlfStatus::Ok
        );
        assert_eq!(rlf_report_line_count(report), 3);

        let mut info = RlfLineInfo {
            first_row: 0,
            last_row: 0,
            measured: false,
            line_class: RlfLineClass::AscenderAndDescenderRich,
            snapped_size: 0,
            raw_size: 0.0,
            line_height: 0,
            mhd: 0.0,
            uppercase_unsupported: false,
            short_line_low_confidence: false,
        };
        assert_eq!(rlf_report_line(report, 0, &mut info), RlfStatus::Ok);
        assert!(info.measured);
        assert_eq!(info.line_class, RlfLineClass::AscenderAndDescenderRich);
        assert_eq!(info.snapped_size, 12);

        assert_eq!(rlf_report_line(report, 1, &mut info), RlfStatus::Ok);
        assert_eq!(info.line_class, RlfLineClass::AscenderRich);
        assert_eq!(info.snapped_size, 16);

        assert_eq!(rlf_report_line(report, 2, &mut info), RlfStatus::Ok);
        assert_eq!(info.line_class, RlfLineClass::UpperCase);
        assert!(info.uppercase_unsupported);

        assert_eq!(
            rlf_report_line(report, 3, &mut info),
            RlfStatus::InvalidArgument
        );

        rlf_report_free(report);
        rlf_models_free(models);
        rlf_image_free(img);
    }
}

#[test]
fn custom_candidates_and_routing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let page = write_test_page(dir.path());

    unsafe {
        let mut img: *mut RlfImage = ptr::null_mut();
        rlf_image_read_rld(c_path(&page).as_ptr(), &mut img);
        let mut models: *mut RlfModels = ptr::null_mut();
        rlf_models_reference(&mut models);

        // Only 8 and 20 to snap to.
        let candidates = [8u32, 20];
        let mut report: *mut RlfReport = ptr::null_mut();
        assert_eq!(
            rlf_detect(
                img,
                models,
                candidates.as_ptr(),
                2,
                7.0,
                25.0,
                false,
                &mut report
            ),
            RlfStatus::Ok
        );
        let mut info = std::mem::zeroed::<RlfLineInfo>();
        rlf_report_line(report, 0, &mut info);
        assert!(info.snapped_size == 8 || info.snapped_size == 20);
        rlf_report_free(report);

        // Line-height-only routing undersizes the ascender rich line.
        let mut ablated: *mut RlfReport = ptr::null_mut();
        assert_eq!(
            rlf_detect(img, models, ptr::null(), 0, 7.0, 25.0, true, &mut ablated),
            RlfStatus::Ok
        );
        rlf_report_line(ablated, 1, &mut info);
        assert!(info.snapped_size < 16);
        rlf_report_free(ablated);

        rlf_models_free(models);
        rlf_image_free(img);
    }
}

#[test]
fn status_codes_for_bad_inputs() {
    unsafe {
        let mut img: *mut RlfImage = ptr::null_mut();
        let missing = CString::new("/nonexistent/nope.rld").unwrap();
        assert_eq!(
            rlf_image_read_rld(missing.as_ptr(), &mut img),
            RlfStatus::IoError
        );
        assert_eq!(
            rlf_image_read_rld(ptr::null(), &mut img),
            RlfStatus::NullArgument
        );
        assert_eq!(rlf_image_width(ptr::null()), 0);

        let dir = tempfile::tempdir().unwrap();
        let junk = dir.path().join("junk.rld");
        std::fs::write(&junk, b"not a run document").unwrap();
        assert_eq!(
            rlf_image_read_rld(c_path(&junk).as_ptr(), &mut img),
            RlfStatus::ParseError
        );

        let mut models: *mut RlfModels = ptr::null_mut();
        let empty = dir.path().join("empty-models.txt");
        std::fs::write(&empty, "# rlfont v1\n").unwrap();
        assert_eq!(
            rlf_models_load(c_path(&empty).as_ptr(), &mut models),
            RlfStatus::ModelError
        );

        // Frees tolerate null.
        rlf_image_free(ptr::null_mut());
        rlf_models_free(ptr::null_mut());
        rlf_report_free(ptr::null_mut());
    }
}

#[test]
fn static_strings_are_nul_terminated() {
    unsafe {
        let version = std::ffi::CStr::from_ptr(rlf_version());
        assert!(!version.to_str().unwrap().is_empty());
        for status in [
            RlfStatus::Ok,
            RlfStatus::NullArgument,
            RlfStatus::InvalidArgument,
            RlfStatus::IoError,
            RlfStatus::ParseError,
            RlfStatus::FeatureError,
            RlfStatus::ModelError,
            RlfStatus::InternalError,
        ] {
            let msg = std::ffi::CStr::from_ptr(rlf_status_message(status));
            assert!(!msg.to_str().unwrap().is_empty());
        }
    }
}

#[test]
fn generated_header_covers_the_surface() {
    let header = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rlfont.h"),
    )
    .expect("header must be generated at build time");
    for symbol in [
        "rlf_image_read_rld",
        "rlf_image_read_pbm",
        "rlf_image_write_rld",
        "rlf_image_free",
        "rlf_models_load",
        "rlf_models_reference",
        "rlf_models_free",
        "rlf_detect",
        "rlf_report_line_count",
        "rlf_report_line",
        "rlf_report_free",
        "rlf_status_message",
        "rlf_version",
        "RlfLineInfo",
        "RlfStatus",
    ] {
        assert!(header.contains(symbol), "header missing {symbol}");
    }
}
