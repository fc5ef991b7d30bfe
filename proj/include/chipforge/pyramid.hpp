#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "chipforge/box.hpp"

namespace chipforge {

// Per-scale validity interval on box side length, always evaluated on areas
// in original-image coordinates: r_min^2 <= w*h < r_max^2. An unbounded
// upper end is stored as +infinity.
struct AreaRange {
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();

  bool contains_area(double area) const {
    return r_min * r_min <= area && area < r_max * r_max;
  }
  bool unbounded() const { return !std::isfinite(r_max); }
};

// How a scale resizes the image: a fixed factor, or fit the longer side to a
// target length (factor = target / max(w, h)).
struct ResizeRule {
  enum class Kind { kFactor, kFitLongSide };
  Kind kind = Kind::kFactor;
  double value = 1.0;

  static ResizeRule factor(double s) { return {Kind::kFactor, s}; }
  static ResizeRule fit_long_side(double target) { return {Kind::kFitLongSide, target}; }
};

// One pyramid level: resize rule, chip size K, grid stride d, valid range.
struct ScaleSpec {
  int index = 1;  // 1-based, fine-to-coarse
  ResizeRule rule;
  int chip_size = 512;
  int stride = 32;
  AreaRange range;
};

// The resized-and-padded canvas a scale's chip grid lives on. Content is
// anchored top-left; padding extends right and bottom only, so the
// canvas->original map stays a pure scaling.
struct Canvas {
  int scale_index = 0;
  double factor = 1.0;
  int content_w = 0;
  int content_h = 0;
  int grid_w = 0;
  int grid_h = 0;
  int pad_right = 0;
  int pad_bottom = 0;
};

// Content dims are round-half-up of original * factor; grid dims are padded
// up to at least the chip size per side. Throws MalformedInputError on
// non-positive image dimensions.
Canvas resolve_canvas(int image_w, int image_h, const ScaleSpec& spec);

// A box mapped into canvas coordinates for enclosure tests. Content
// rounding can leave a sub-pixel overhang past the grid for boxes flush
// with the image's right/bottom edge; the resized image has no such
// overhang, so the scaled box is trimmed to the canvas.
inline Box scale_to_canvas(const Box& b, const Canvas& canvas) {
  const Box s = scale_box(b, canvas.factor);
  const double x2 = std::min(s.x2(), static_cast<double>(canvas.grid_w));
  const double y2 = std::min(s.y2(), static_cast<double>(canvas.grid_h));
  return Box{s.x, s.y, x2 - s.x, y2 - s.y};
}

// K x K chips at stride d along each axis, with a final position clamped to
// the canvas edge whenever the stride lattice does not land exactly on
// grid_dim - K. Row-major (y outer, x inner); covers the whole canvas.
std::vector<Box> grid_chips(const Canvas& canvas, int chip_size, int stride);
inline std::vector<Box> grid_chips(const Canvas& canvas, const ScaleSpec& spec) {
  return grid_chips(canvas, spec.chip_size, spec.stride);
}

class PyramidConfig {
 public:
  PyramidConfig() = default;
  explicit PyramidConfig(std::vector<ScaleSpec> scales);

  const std::vector<ScaleSpec>& scales() const { return scales_; }
  std::size_t size() const { return scales_.size(); }
  const ScaleSpec& at(int index) const;  // by 1-based scale index

  // Three-scale configuration: 3x and 1.667x upsampling plus a
  // fit-long-side-512 level, chip 512, stride 32, side ranges
  // (0,80), (32,150), (120,inf) paired fine-to-coarse.
  static PyramidConfig default_3scale();
  // Two-scale variant: identity scale plus fit-long-side-512.
  static PyramidConfig default_2scale();

  static PyramidConfig from_json_text(const std::string& text, const std::string& origin);
  static PyramidConfig load(const std::string& path);
  std::string to_json_text() const;  // canonical form, also used for hashing
  void save(const std::string& path) const;

 private:
  void validate() const;
  std::vector<ScaleSpec> scales_;
};

}  // namespace chipforge
