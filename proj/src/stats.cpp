#include "chipforge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chipforge/errors.hpp"
#include "chipforge/jsonfmt.hpp"

namespace chipforge {

std::pair<int, int> baseline_resize(int w, int h, int short_side, int long_side) {
  const double f = std::min(static_cast<double>(short_side) / std::min(w, h),
                            static_cast<double>(long_side) / std::max(w, h));
  const int rw = std::max(1, static_cast<int>(std::floor(w * f + 0.5)));
  const int rh = std::max(1, static_cast<int>(std::floor(h * f + 0.5)));
  return {rw, rh};
}

PixelReportBuilder::PixelReportBuilder(const Dataset& ds, int baseline_short,
                                       int baseline_long)
    : ds_(ds), short_side_(baseline_short), long_side_(baseline_long) {}

void PixelReportBuilder::add(const ChipRecord& r) {
  if (ds_.find_image(r.image_id) == nullptr)
    throw UnknownImageError("manifest record references unknown image_id " +
                            std::to_string(r.image_id));
  const double chip_pixels = r.rect_canvas.w * r.rect_canvas.h;
  total_pixels_ += static_cast<std::int64_t>(std::llround(chip_pixels));
  per_image_[r.image_id] += 1;
  per_scale_[r.scale_index] += 1;
  ++n_records_;
  if (r.kind == ChipKind::kPositive)
    ++positives_;
  else
    ++negatives_;
}

PixelReport PixelReportBuilder::finish() const {
  PixelReport rep;
  rep.baseline_short = short_side_;
  rep.baseline_long = long_side_;
  rep.total_chip_pixels = total_pixels_;
  rep.n_records = n_records_;
  rep.n_images = static_cast<std::int64_t>(ds_.images.size());
  rep.per_scale_chips = per_scale_;
  rep.positive_chips = positives_;
  rep.negative_chips = negatives_;

  for (const auto& im : ds_.images) {
    const auto [rw, rh] = baseline_resize(im.width, im.height, short_side_, long_side_);
    rep.baseline_pixels += static_cast<std::int64_t>(rw) * rh;
  }
  rep.ratio = rep.baseline_pixels > 0
                  ? static_cast<double>(rep.total_chip_pixels) /
                        static_cast<double>(rep.baseline_pixels)
                  : 0.0;

  bool first = true;
  for (const auto& im : ds_.images) {
    auto it = per_image_.find(im.id);
    const int count = it == per_image_.end() ? 0 : it->second;
    rep.chips_histogram[count] += 1;
    if (first) {
      rep.chips_per_image_min = count;
      rep.chips_per_image_max = count;
      first = false;
    } else {
      rep.chips_per_image_min = std::min(rep.chips_per_image_min, count);
      rep.chips_per_image_max = std::max(rep.chips_per_image_max, count);
    }
  }
  rep.chips_per_image_mean =
      rep.n_images > 0 ? static_cast<double>(rep.n_records) / static_cast<double>(rep.n_images)
                       : 0.0;
  return rep;
}

PixelReport pixel_report(const Manifest& m, const Dataset& ds, int baseline_short,
                         int baseline_long) {
  PixelReportBuilder builder(ds, baseline_short, baseline_long);
  for (const auto& r : m.records) builder.add(r);
  return builder.finish();
}

std::string PixelReport::to_json() const {
  std::string out = "{\"total_chip_pixels\":" + std::to_string(total_chip_pixels);
  out += ",\"baseline_pixels\":" + std::to_string(baseline_pixels);
  out += ",\"baseline\":[" + std::to_string(baseline_short) + "," +
         std::to_string(baseline_long) + "]";
  out += ",\"ratio\":";
  append_f6(out, ratio);
  out += ",\"records\":" + std::to_string(n_records);
  out += ",\"positive\":" + std::to_string(positive_chips);
  out += ",\"negative\":" + std::to_string(negative_chips);
  out += ",\"images\":" + std::to_string(n_images);
  out += ",\"chips_per_image\":{\"mean\":";
  append_f6(out, chips_per_image_mean);
  out += ",\"min\":" + std::to_string(chips_per_image_min);
  out += ",\"max\":" + std::to_string(chips_per_image_max);
  out += ",\"histogram\":{";
  bool first = true;
  for (const auto& [k, v] : chips_histogram) {
    if (!first) out.push_back(',');
    first = false;
    out += "\"" + std::to_string(k) + "\":" + std::to_string(v);
  }
  out += "}}";
  out += ",\"per_scale\":{";
  first = true;
  for (const auto& [k, v] : per_scale_chips) {
    if (!first) out.push_back(',');
    first = false;
    out += "\"" + std::to_string(k) + "\":" + std::to_string(v);
  }
  out += "}}";
  return out;
}

std::string PixelReport::to_table() const {
  std::ostringstream os;
  os << "chips            " << n_records << " (" << positive_chips << " positive, "
     << negative_chips << " negative)\n";
  os << "images           " << n_images << "\n";
  os << "chips/image      mean " << f6(chips_per_image_mean) << ", min "
     << chips_per_image_min << ", max " << chips_per_image_max << "\n";
  os << "chip pixels      " << total_chip_pixels << "\n";
  os << "baseline pixels  " << baseline_pixels << " (" << baseline_short << "x"
     << baseline_long << " resize)\n";
  os << "pixel ratio      " << f6(ratio) << "\n";
  os << "per-scale chips ";
  for (const auto& [k, v] : per_scale_chips) os << "  s" << k << ": " << v;
  os << "\n";
  return os.str();
}

std::string PixelReport::histogram_csv() const {
  std::string out = "chips_per_image,images\n";
  for (const auto& [k, v] : chips_histogram)
    out += std::to_string(k) + "," + std::to_string(v) + "\n";
  return out;
}

}  // namespace chipforge
