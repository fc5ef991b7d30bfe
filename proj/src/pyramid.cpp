#include "chipforge/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chipforge/errors.hpp"
#include "chipforge/jsonfmt.hpp"

namespace chipforge {
namespace {

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

// {0, d, 2d, ...} clamped so every chip fits; final edge position appended
// when the lattice does not land exactly on grid_dim - K.
std::vector<int> axis_positions(int grid_dim, int chip_size, int stride) {
  const int last = grid_dim - chip_size;  // >= 0 by canvas invariant
  std::vector<int> pos;
  for (int p = 0; p <= last; p += stride) pos.push_back(p);
  if (pos.back() != last) pos.push_back(last);
  return pos;
}

}  // namespace

Canvas resolve_canvas(int image_w, int image_h, const ScaleSpec& spec) {
  if (image_w < 1 || image_h < 1)
    throw MalformedInputError("resolve_canvas: non-positive image dimensions " +
                              std::to_string(image_w) + "x" + std::to_string(image_h));
  double factor = 0.0;
  switch (spec.rule.kind) {
    case ResizeRule::Kind::kFactor:
      factor = spec.rule.value;
      break;
    case ResizeRule::Kind::kFitLongSide:
      factor = spec.rule.value / static_cast<double>(std::max(image_w, image_h));
      break;
  }
  Canvas c;
  c.scale_index = spec.index;
  c.factor = factor;
  c.content_w = std::max(1, round_half_up(image_w * factor));
  c.content_h = std::max(1, round_half_up(image_h * factor));
  c.grid_w = std::max(c.content_w, spec.chip_size);
  c.grid_h = std::max(c.content_h, spec.chip_size);
  c.pad_right = c.grid_w - c.content_w;
  c.pad_bottom = c.grid_h - c.content_h;
  return c;
}

std::vector<Box> grid_chips(const Canvas& canvas, int chip_size, int stride) {
  const std::vector<int> xs = axis_positions(canvas.grid_w, chip_size, stride);
  const std::vector<int> ys = axis_positions(canvas.grid_h, chip_size, stride);
  std::vector<Box> chips;
  chips.reserve(xs.size() * ys.size());
  const double k = static_cast<double>(chip_size);
  for (int y : ys)
    for (int x : xs)
      chips.push_back(Box{static_cast<double>(x), static_cast<double>(y), k, k});
  return chips;
}

PyramidConfig::PyramidConfig(std::vector<ScaleSpec> scales) : scales_(std::move(scales)) {
  for (std::size_t i = 0; i < scales_.size(); ++i)
    scales_[i].index = static_cast<int>(i) + 1;
  validate();
}

const ScaleSpec& PyramidConfig::at(int index) const {
  for (const auto& s : scales_)
    if (s.index == index) return s;
  throw MalformedInputError("no scale with index " + std::to_string(index));
}

void PyramidConfig::validate() const {
  if (scales_.empty()) throw MalformedInputError("pyramid config: no scales");
  for (const auto& s : scales_) {
    const std::string tag = "pyramid config scale " + std::to_string(s.index) + ": ";
    if (s.chip_size <= 0) throw MalformedInputError(tag + "chip_size must be > 0");
    if (s.stride <= 0 || s.stride > s.chip_size)
      throw MalformedInputError(tag + "stride must satisfy 0 < d <= chip_size");
    if (s.rule.value <= 0.0 || !std::isfinite(s.rule.value))
      throw MalformedInputError(tag + "resize rule value must be a positive real");
    if (s.range.r_min < 0.0 || !(s.range.r_min < s.range.r_max))
      throw MalformedInputError(tag + "range must satisfy 0 <= r_min < r_max");
  }
}

PyramidConfig PyramidConfig::default_3scale() {
  std::vector<ScaleSpec> s(3);
  s[0].rule = ResizeRule::factor(3.0);
  s[0].range = {0.0, 80.0};
  s[1].rule = ResizeRule::factor(1.667);
  s[1].range = {32.0, 150.0};
  s[2].rule = ResizeRule::fit_long_side(512.0);
  s[2].range = {120.0, std::numeric_limits<double>::infinity()};
  return PyramidConfig(std::move(s));
}

PyramidConfig PyramidConfig::default_2scale() {
  std::vector<ScaleSpec> s(2);
  s[0].rule = ResizeRule::factor(1.0);
  s[0].range = {0.0, 150.0};
  s[1].rule = ResizeRule::fit_long_side(512.0);
  s[1].range = {120.0, std::numeric_limits<double>::infinity()};
  return PyramidConfig(std::move(s));
}

PyramidConfig PyramidConfig::from_json_text(const std::string& text,
                                            const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInputError(origin + ": invalid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("scales") || !j["scales"].is_array())
    throw MalformedInputError(origin + ": expected object with a \"scales\" array");

  std::vector<ScaleSpec> scales;
  int idx = 0;
  for (const auto& e : j["scales"]) {
    ++idx;
    const std::string tag = origin + ": scales[" + std::to_string(idx - 1) + "]";
    if (!e.is_object()) throw MalformedInputError(tag + " is not an object");
    ScaleSpec s;
    try {
      const std::string rule = e.at("rule").get<std::string>();
      const double value = e.at("value").get<double>();
      if (rule == "factor")
        s.rule = ResizeRule::factor(value);
      else if (rule == "fit_long_side")
        s.rule = ResizeRule::fit_long_side(value);
      else
        throw MalformedInputError(tag + ": unknown rule \"" + rule + "\"");
      s.chip_size = e.value("chip_size", 512);
      s.stride = e.value("stride", 32);
      s.range.r_min = e.at("r_min").get<double>();
      if (!e.contains("r_max") || e["r_max"].is_null())
        s.range.r_max = std::numeric_limits<double>::infinity();
      else
        s.range.r_max = e["r_max"].get<double>();
    } catch (const nlohmann::json::exception& ex) {
      throw MalformedInputError(tag + ": " + ex.what());
    }
    scales.push_back(s);
  }
  return PyramidConfig(std::move(scales));
}

PyramidConfig PyramidConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pyramid config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(), path);
}

std::string PyramidConfig::to_json_text() const {
  std::string out = "{\"scales\":[";
  for (std::size_t i = 0; i < scales_.size(); ++i) {
    const auto& s = scales_[i];
    if (i > 0) out.push_back(',');
    out += "{\"rule\":";
    out += s.rule.kind == ResizeRule::Kind::kFactor ? "\"factor\"" : "\"fit_long_side\"";
    out += ",\"value\":";
    append_f6(out, s.rule.value);
    out += ",\"chip_size\":" + std::to_string(s.chip_size);
    out += ",\"stride\":" + std::to_string(s.stride);
    out += ",\"r_min\":";
    append_f6(out, s.range.r_min);
    out += ",\"r_max\":";
    if (s.range.unbounded())
      out += "null";
    else
      append_f6(out, s.range.r_max);
    out += "}";
  }
  out += "]}";
  return out;
}

void PyramidConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write pyramid config: " + path);
  out << to_json_text() << "\n";
  if (!out) throw IoError("short write: " + path);
}

}  // namespace chipforge
