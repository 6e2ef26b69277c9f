//! Command line surface over the library: codec conversion, synthetic
//! page generation, segmentation and feature dumps, model training, font
//! size detection and the run-domain vs raster timing comparison.
//!
//! Results go to standard output, diagnostics to standard error. Exit
//! codes: 0 success, 1 input error, 2 internal invariant violation.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rlfont::bench::run_bench;
use rlfont::classify::MhdThresholds;
use rlfont::detector::{
    align_bounds, detect_document, render_layout, render_score, render_tsv, score, DetectOptions,
    ModelSet, Routing,
};
use rlfont::error::{Error, Result};
use rlfont::features::extract_features;
use rlfont::regression::{fit, save_models, FeatureKind, RegressionModel, TrainingSet};
use rlfont::rle::{decode, encode, CompressedImage};
use rlfont::segmentation::{extract_line, segment_lines, vpp};
use rlfont::synthgen::{generate_page, parse_line_specs, GeometryTable, GroundTruth, PageLayout};
use rlfont::{docio, LineClass};

#[derive(Parser)]
#[command(
    name = "rlfont",
    version,
    about = "Font size detection on run-length compressed documents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert between .pbm rasters and .rld run documents.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Generate a synthetic page and its ground truth from a line spec
    /// file (one `size=<s> class=<c> fill=<f>` per line).
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, default_value_t = 2375)]
        width: u32,
        #[arg(long, default_value_t = 60)]
        margin_x: u32,
        #[arg(long, default_value_t = 40)]
        margin_y: u32,
        #[arg(long, default_value_t = 20)]
        gap: u32,
        /// Fixed page height; grown to fit when omitted.
        #[arg(long)]
        page_height: Option<u32>,
    },
    /// List segmented line bounds of a page.
    Segment {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        min_height: u32,
    },
    /// Dump per-line features of a page.
    Features {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        min_height: u32,
    },
    /// Fit height models from pages with ground truth.
    Train {
        #[arg(long = "pages", num_args = 1.., required = true)]
        pages: Vec<PathBuf>,
        #[arg(long = "truth", num_args = 1.., required = true)]
        truths: Vec<PathBuf>,
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long, default_value_t = 3)]
        min_height: u32,
        /// Worker threads for multi-page training.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Detect per-line font sizes, optionally scoring against truth.
    Detect {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        models: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![8u32, 10, 12, 14, 16, 18, 20])]
        sizes: Vec<u32>,
        #[arg(long, default_value_t = 7.0)]
        mhd_low: f64,
        #[arg(long, default_value_t = 25.0)]
        mhd_high: f64,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        min_height: u32,
        /// Route every line to the line height model instead of using the
        /// ascender height model for ascender rich lines.
        #[arg(long)]
        line_height_only: bool,
    },
    /// Time the run-domain projection profile against decode plus raster
    /// sums on the same page.
    Bench {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        iters: u32,
    },
}

/// Write a line of results, converting stream failures into errors the
/// caller can inspect.
macro_rules! wline {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(stream_err)?
    };
}

/// Write an already formatted block of results.
macro_rules! wtext {
    ($out:expr, $text:expr) => {
        $out.write_all($text.as_bytes()).map_err(stream_err)?
    };
}

fn stream_err(source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn main() -> ExitCode {
    let mut out = std::io::stdout().lock();
    match run(Cli::parse(), &mut out) {
        Ok(code) => code,
        // A reader that stops consuming output is not an error.
        Err(Error::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<ExitCode> {
    match cli.command {
        Command::Convert { input, output } => convert(&input, &output)?,
        Command::Synth {
            spec,
            seed,
            output,
            truth,
            width,
            margin_x,
            margin_y,
            gap,
            page_height,
        } => {
            let text = read_text(&spec)?;
            let specs = parse_line_specs(&text, &spec)?;
            let layout = PageLayout {
                width,
                margin_x,
                margin_y,
                gap,
                height: page_height,
            };
            let (page, gt) = generate_page(&specs, &GeometryTable::extended(), &layout, seed)?;
            docio::write_rldoc(&encode(&page), &output)?;
            gt.write(&truth)?;
            eprintln!(
                "wrote {} ({} lines) and {}",
                output.display(),
                gt.lines.len(),
                truth.display()
            );
        }
        Command::Segment { input, min_height } => {
            let img = docio::read_rldoc(&input)?;
            let seg = segment_lines(&vpp(&img), min_height);
            wline!(out, "# rlfont v1");
            for (i, b) in seg.lines.iter().enumerate() {
                wline!(
                    out,
                    "line {}: rows={}..{} height={}",
                    i + 1,
                    b.first_row,
                    b.last_row,
                    b.height()
                );
            }
            if seg.discarded > 0 {
                eprintln!(
                    "discarded {} ink run(s) shorter than {min_height} rows",
                    seg.discarded
                );
            }
        }
        Command::Features { input, min_height } => {
            let img = docio::read_rldoc(&input)?;
            let seg = segment_lines(&vpp(&img), min_height);
            wline!(out, "# rlfont v1");
            wline!(out, "# row_range\th\tb\ta\td\tm1\tm2\tl\tr\tR\tmhd");
            for (i, bounds) in seg.lines.iter().enumerate() {
                let line = extract_line(&img, *bounds)?;
                match extract_features(&line) {
                    Ok(f) => {
                        let dens = rlfont::features::densities(&line, &f);
                        wline!(
                            out,
                            "{}..{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.4}",
                            bounds.first_row,
                            bounds.last_row,
                            f.h,
                            f.b,
                            f.a,
                            f.d,
                            f.m1,
                            f.m2,
                            f.l,
                            f.r,
                            f.ratio,
                            dens.mhd
                        );
                    }
                    Err(e) => eprintln!(
                        "line {} (rows {}..{}): {e}",
                        i + 1,
                        bounds.first_row,
                        bounds.last_row
                    ),
                }
            }
        }
        Command::Train {
            pages,
            truths,
            output,
            min_height,
            jobs,
        } => {
            let models = train(&pages, &truths, min_height, jobs)?;
            save_models(&models, &output)?;
            for m in &models {
                eprintln!(
                    "fitted {}: p={:.4} q={:.4} resid={:.4} n={}",
                    m.feature, m.slope, m.intercept, m.residual_norm, m.n_samples
                );
            }
            eprintln!("wrote {}", output.display());
        }
        Command::Detect {
            input,
            models,
            sizes,
            mhd_low,
            mhd_high,
            truth,
            min_height,
            line_height_only,
        } => {
            let img = docio::read_rldoc(&input)?;
            let model_set = ModelSet::load(&models)?;
            let opts = DetectOptions {
                thresholds: MhdThresholds {
                    low: mhd_low,
                    high: mhd_high,
                },
                candidates: sizes,
                min_line_height: min_height,
                routing: if line_height_only {
                    Routing::LineHeightOnly
                } else {
                    Routing::TwoModel
                },
            };
            let report = detect_document(&img, &model_set, &opts)?;
            wtext!(out, render_tsv(&report));
            writeln!(out).map_err(stream_err)?;
            wtext!(out, render_layout(&report));
            if let Some(truth_path) = truth {
                let gt = GroundTruth::read(&truth_path)?;
                let s = score(&report, &gt)?;
                writeln!(out).map_err(stream_err)?;
                wtext!(out, render_score(&s));
            }
        }
        Command::Bench { input, iters } => {
            let img = docio::read_rldoc(&input)?;
            let report = run_bench(&img, iters)?;
            wline!(out, "# rlfont v1");
            wline!(out, "# path\tbest_ns\tmean_ns");
            wline!(
                out,
                "compressed_vpp\t{}\t{}",
                report.compressed_best_ns,
                report.compressed_mean_ns
            );
            wline!(
                out,
                "decode_raster_sums\t{}\t{}",
                report.raster_best_ns,
                report.raster_mean_ns
            );
            wline!(out, "pixels\t{}", report.pixels);
            wline!(out, "run_values\t{}", report.pairs * 2);
            wline!(out, "compression_ratio\t{:.2}", report.compression_ratio);
            wline!(out, "pair_visits\t{}", report.visits);
            wline!(out, "speedup\t{:.2}", report.speedup());
            if !report.profiles_match {
                eprintln!("internal error: run-domain and raster profiles disagree");
                return Ok(ExitCode::from(2));
            }
            if report.visits != report.pairs {
                eprintln!(
                    "internal error: profile pass visited {} of {} pairs",
                    report.visits, report.pairs
                );
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn convert(input: &Path, output: &Path) -> Result<()> {
    let img: CompressedImage = if has_extension(input, "pbm") {
        encode(&docio::read_pbm(input)?)
    } else if has_extension(input, "rld") {
        docio::read_rldoc(input)?
    } else {
        return Err(Error::Layout(format!(
            "cannot tell the format of {} (expected .pbm or .rld)",
            input.display()
        )));
    };
    if has_extension(output, "pbm") {
        docio::write_pbm(&decode(&img)?, output)
    } else if has_extension(output, "rld") {
        docio::write_rldoc(&img, output)
    } else {
        Err(Error::Layout(format!(
            "cannot tell the format of {} (expected .pbm or .rld)",
            output.display()
        )))
    }
}

/// Feature samples of one page, grouped by model kind.
type PageSamples = Vec<(FeatureKind, u32, f64)>;

fn collect_page_samples(
    page_path: &Path,
    truth_path: &Path,
    min_height: u32,
) -> Result<PageSamples> {
    let img = docio::read_rldoc(page_path)?;
    let truth = GroundTruth::read(truth_path)?;
    let seg = segment_lines(&vpp(&img), min_height);
    let assignment = align_bounds(&seg.lines, &truth)?;
    let mut samples = Vec::new();
    for (bounds, &truth_idx) in seg.lines.iter().zip(&assignment) {
        let t = &truth.lines[truth_idx];
        let line = extract_line(&img, *bounds)?;
        let f = match extract_features(&line) {
            Ok(f) => f,
            Err(e) => {
                eprintln!(
                    "{}: skipping rows {}..{}: {e}",
                    page_path.display(),
                    bounds.first_row,
                    bounds.last_row
                );
                continue;
            }
        };
        match t.class {
            LineClass::AscenderAndDescenderRich => {
                samples.push((FeatureKind::LineHeight, t.font_size, f64::from(f.h)));
                samples.push((FeatureKind::AscenderHeight, t.font_size, f64::from(f.a)));
                samples.push((FeatureKind::BaseHeight, t.font_size, f64::from(f.b)));
            }
            // Without descenders the measured line height is the ascender
            // height.
            LineClass::AscenderRich => {
                samples.push((FeatureKind::AscenderHeight, t.font_size, f64::from(f.h)));
            }
            LineClass::UpperCase => {}
        }
    }
    Ok(samples)
}

fn train(
    pages: &[PathBuf],
    truths: &[PathBuf],
    min_height: u32,
    jobs: usize,
) -> Result<Vec<RegressionModel>> {
    if pages.len() != truths.len() {
        return Err(Error::Alignment(format!(
            "{} pages but {} truth files",
            pages.len(),
            truths.len()
        )));
    }
    let jobs = jobs.clamp(1, pages.len().max(1));
    let inputs: Vec<(usize, &PathBuf, &PathBuf)> = pages
        .iter()
        .zip(truths)
        .enumerate()
        .map(|(i, (p, t))| (i, p, t))
        .collect();

    let mut per_page: Vec<Option<PageSamples>> = vec![None; pages.len()];
    if jobs <= 1 {
        for (i, page, truth) in inputs {
            per_page[i] = Some(collect_page_samples(page, truth, min_height)?);
        }
    } else {
        let chunks: Vec<Vec<(usize, &PathBuf, &PathBuf)>> = inputs
            .chunks(pages.len().div_ceil(jobs))
            .map(<[_]>::to_vec)
            .collect();
        let results: Vec<Result<Vec<(usize, PageSamples)>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|chunk| {
                    scope.spawn(move || {
                        chunk
                            .into_iter()
                            .map(|(i, page, truth)| {
                                collect_page_samples(page, truth, min_height).map(|s| (i, s))
                            })
                            .collect()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for result in results {
            for (i, samples) in result? {
                per_page[i] = Some(samples);
            }
        }
    }

    // Pages contribute in input order regardless of how many workers ran.
    let mut by_kind: std::collections::BTreeMap<FeatureKind, Vec<(u32, f64)>> =
        std::collections::BTreeMap::new();
    for samples in per_page.into_iter().flatten() {
        for (kind, size, value) in samples {
            by_kind.entry(kind).or_default().push((size, value));
        }
    }

    let mut models = Vec::new();
    for kind in FeatureKind::ALL {
        let Some(samples) = by_kind.get(&kind) else {
            continue;
        };
        // Average the measured values per size before fitting, so each
        // size contributes one point no matter how many lines it had.
        let mut by_size: std::collections::BTreeMap<u32, (f64, u32)> =
            std::collections::BTreeMap::new();
        for &(size, value) in samples {
            let entry = by_size.entry(size).or_insert((0.0, 0));
            entry.0 += value;
            entry.1 += 1;
        }
        let averaged: Vec<(u32, f64)> = by_size
            .into_iter()
            .map(|(size, (sum, count))| (size, sum / f64::from(count)))
            .collect();
        if averaged.len() < 2 {
            eprintln!(
                "skipping {kind}: only {} size(s) in the training data",
                averaged.len()
            );
            continue;
        }
        models.push(fit(&TrainingSet {
            feature: kind,
            samples: averaged,
        })?);
    }
    Ok(models)
}
