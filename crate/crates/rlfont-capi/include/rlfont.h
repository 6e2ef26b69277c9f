#ifndef RLFONT_H
#define RLFONT_H

/* Generated by cbindgen from rlfont-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum RlfStatus {
  RLF_STATUS_OK = 0,
  // A required pointer argument was null.
  RLF_STATUS_NULL_ARGUMENT = 1,
  // An argument value was out of range or malformed.
  RLF_STATUS_INVALID_ARGUMENT = 2,
  RLF_STATUS_IO_ERROR = 3,
  // A file failed validation while being read.
  RLF_STATUS_PARSE_ERROR = 4,
  // A line could not be measured or a page could not be processed.
  RLF_STATUS_FEATURE_ERROR = 5,
  // The model set is unusable for detection.
  RLF_STATUS_MODEL_ERROR = 6,
  RLF_STATUS_INTERNAL_ERROR = 7,
} RlfStatus;

// Class of a text line.
typedef enum RlfLineClass {
  RLF_LINE_CLASS_ASCENDER_AND_DESCENDER_RICH = 0,
  RLF_LINE_CLASS_ASCENDER_RICH = 1,
  RLF_LINE_CLASS_UPPER_CASE = 2,
} RlfLineClass;

// A run-length compressed page.
typedef struct RlfImage RlfImage;

// Height models used for size prediction.
typedef struct RlfModels RlfModels;

// Output of one detection run.
typedef struct RlfReport RlfReport;

// One detected line. When `measured` is false only the row range is
// meaningful.
typedef struct RlfLineInfo {
  uint32_t first_row;
  uint32_t last_row;
  bool measured;
  enum RlfLineClass line_class;
  uint32_t snapped_size;
  double raw_size;
  uint32_t line_height;
  double mhd;
  bool uppercase_unsupported;
  bool short_line_low_confidence;
} RlfLineInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Read a `.rld` run document.
//
// # Safety
// `path` must point to a NUL-terminated string and `out` to writable
// pointer storage.
enum RlfStatus rlf_image_read_rld(const char *path, struct RlfImage **out);

// Read a PBM raster and compress it.
//
// # Safety
// Same contract as [`rlf_image_read_rld`].
enum RlfStatus rlf_image_read_pbm(const char *path, struct RlfImage **out);

// Write an image back out as `.rld`.
//
// # Safety
// `img` must be a live handle and `path` a NUL-terminated string.
enum RlfStatus rlf_image_write_rld(const struct RlfImage *img, const char *path);

// # Safety
// `img` must be a live handle.
uint32_t rlf_image_width(const struct RlfImage *img);

// # Safety
// `img` must be a live handle.
uint32_t rlf_image_height(const struct RlfImage *img);

// Pixels per stored run value; 0 for a null handle.
//
// # Safety
// `img` must be a live handle.
double rlf_image_compression_ratio(const struct RlfImage *img);

// # Safety
// `img` must come from an `rlf_image_*` constructor and not be freed yet.
void rlf_image_free(struct RlfImage *img);

// Load a model file produced by training.
//
// # Safety
// `path` must be a NUL-terminated string and `out` writable.
enum RlfStatus rlf_models_load(const char *path, struct RlfModels **out);

// Models fitted from the built-in reference measurements, usable without
// any training data.
//
// # Safety
// `out` must be writable.
enum RlfStatus rlf_models_reference(struct RlfModels **out);

// # Safety
// `models` must come from an `rlf_models_*` constructor and not be freed
// yet.
void rlf_models_free(struct RlfModels *models);

// Detect per-line font sizes. `candidates` may be null with
// `n_candidates` 0 to snap to the seven standard sizes; `line_height_only`
// disables the ascender model routing.
//
// # Safety
// `img` and `models` must be live handles, `candidates` must point to
// `n_candidates` readable values when non-null, `out` must be writable.
enum RlfStatus rlf_detect(const struct RlfImage *img,
                          const struct RlfModels *models,
                          const uint32_t *candidates,
                          size_t n_candidates,
                          double mhd_low,
                          double mhd_high,
                          bool line_height_only,
                          struct RlfReport **out);

// # Safety
// `report` must be a live handle.
size_t rlf_report_line_count(const struct RlfReport *report);

// Copy one line record into `info`.
//
// # Safety
// `report` must be a live handle and `info` writable.
enum RlfStatus rlf_report_line(const struct RlfReport *report,
                               size_t index,
                               struct RlfLineInfo *info);

// # Safety
// `report` must come from [`rlf_detect`] and not be freed yet.
void rlf_report_free(struct RlfReport *report);

// Static description of a status code.
const char *rlf_status_message(enum RlfStatus status);

// Library version as a static string.
const char *rlf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RLFONT_H */
