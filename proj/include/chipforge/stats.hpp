#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "chipforge/dataset.hpp"
#include "chipforge/manifest.hpp"

namespace chipforge {

// Pixel and chip accounting over a manifest: total chip pixels against the
// pixels of a single-scale baseline resize (shorter side -> `short_side`,
// longer side capped at `long_side`, aspect preserved). Padded chip pixels
// count in full.
struct PixelReport {
  std::int64_t total_chip_pixels = 0;
  std::int64_t baseline_pixels = 0;
  double ratio = 0.0;
  std::int64_t n_records = 0;
  std::int64_t n_images = 0;
  double chips_per_image_mean = 0.0;
  int chips_per_image_min = 0;
  int chips_per_image_max = 0;
  std::map<int, std::int64_t> chips_histogram;   // chips-per-image -> images
  std::map<int, std::int64_t> per_scale_chips;   // scale index -> chips
  std::int64_t positive_chips = 0;
  std::int64_t negative_chips = 0;
  int baseline_short = 800;
  int baseline_long = 1333;

  std::string to_json() const;
  std::string to_table() const;
  std::string histogram_csv() const;
};

// Streaming accumulator so million-record manifests never need to be held
// in memory.
class PixelReportBuilder {
 public:
  explicit PixelReportBuilder(const Dataset& ds, int baseline_short = 800,
                              int baseline_long = 1333);
  void add(const ChipRecord& r);  // throws UnknownImageError
  PixelReport finish() const;

 private:
  const Dataset& ds_;
  int short_side_;
  int long_side_;
  std::map<std::int64_t, int> per_image_;
  std::map<int, std::int64_t> per_scale_;
  std::int64_t total_pixels_ = 0;
  std::int64_t n_records_ = 0;
  std::int64_t positives_ = 0;
  std::int64_t negatives_ = 0;
};

PixelReport pixel_report(const Manifest& m, const Dataset& ds, int baseline_short = 800,
                         int baseline_long = 1333);

// Baseline resize dimensions for one image (exposed for tests).
std::pair<int, int> baseline_resize(int w, int h, int short_side, int long_side);

}  // namespace chipforge
