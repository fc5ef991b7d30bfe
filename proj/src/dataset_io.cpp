#include "chipforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chipforge/errors.hpp"
#include "chipforge/jsonfmt.hpp"
#include "chipforge/logging.hpp"

namespace chipforge {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure: " + path);
  return buf.str();
}

Box bbox_from_json(const nlohmann::json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 4)
    throw MalformedInputError(where + ": bbox must be [x,y,w,h]");
  Box b{arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(),
        arr[3].get<double>()};
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) ||
      !std::isfinite(b.h))
    throw MalformedInputError(where + ": bbox has non-finite values");
  return b;
}

}  // namespace

const Image* Dataset::find_image(std::int64_t id) const {
  auto it = std::lower_bound(images.begin(), images.end(), id,
                             [](const Image& im, std::int64_t v) { return im.id < v; });
  if (it == images.end() || it->id != id) return nullptr;
  return &*it;
}

std::span<const GroundTruth> Dataset::gts_for(std::int64_t image_id) const {
  auto lo = std::lower_bound(
      annotations.begin(), annotations.end(), image_id,
      [](const GroundTruth& g, std::int64_t v) { return g.image_id < v; });
  auto hi = lo;
  while (hi != annotations.end() && hi->image_id == image_id) ++hi;
  return {&*lo, static_cast<std::size_t>(hi - lo)};
}

void Dataset::sort_canonical() {
  std::sort(images.begin(), images.end(),
            [](const Image& a, const Image& b) { return a.id < b.id; });
  std::sort(annotations.begin(), annotations.end(),
            [](const GroundTruth& a, const GroundTruth& b) {
              if (a.image_id != b.image_id) return a.image_id < b.image_id;
              return a.id < b.id;
            });
}

Dataset parse_annotations(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInputError(origin + ": invalid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("images") || !j.contains("annotations"))
    throw MalformedInputError(origin +
                              ": expected object with \"images\" and \"annotations\"");

  Dataset ds;
  std::size_t idx = 0;
  for (const auto& e : j["images"]) {
    const std::string where = origin + ": images[" + std::to_string(idx++) + "]";
    Image im;
    try {
      im.id = e.at("id").get<std::int64_t>();
      im.width = e.at("width").get<int>();
      im.height = e.at("height").get<int>();
      im.file_name = e.value("file_name", std::string{});
    } catch (const nlohmann::json::exception& ex) {
      throw MalformedInputError(where + ": " + ex.what());
    }
    if (im.width < 1 || im.height < 1)
      throw MalformedInputError(where + ": non-positive image dimensions");
    ds.images.push_back(std::move(im));
  }
  ds.sort_canonical();

  idx = 0;
  for (const auto& e : j["annotations"]) {
    const std::string where = origin + ": annotations[" + std::to_string(idx++) + "]";
    GroundTruth g;
    try {
      g.id = e.at("id").get<std::int64_t>();
      g.image_id = e.at("image_id").get<std::int64_t>();
      g.box = bbox_from_json(e.at("bbox"), where);
      g.category = e.at("category_id").get<int>();
      g.is_crowd = e.value("iscrowd", 0) != 0;
    } catch (const nlohmann::json::exception& ex) {
      throw MalformedInputError(where + ": " + ex.what());
    }
    const Image* im = ds.find_image(g.image_id);
    if (im == nullptr)
      throw MalformedInputError(where + ": references unknown image_id " +
                                std::to_string(g.image_id));
    // Sanitize: clamp to the image frame (chips can only cover content that
    // is inside it), drop anything left without positive extent.
    const double x1 = std::max(0.0, g.box.x);
    const double y1 = std::max(0.0, g.box.y);
    const double x2 = std::min(static_cast<double>(im->width), g.box.x2());
    const double y2 = std::min(static_cast<double>(im->height), g.box.y2());
    if (!(x2 - x1 > 0.0) || !(y2 - y1 > 0.0)) {
      ++ds.dropped_annotations;
      continue;
    }
    g.box = Box{x1, y1, x2 - x1, y2 - y1};
    ds.annotations.push_back(std::move(g));
  }
  ds.sort_canonical();
  if (ds.dropped_annotations > 0)
    CF_WARN("%s: dropped %d annotations with non-positive width/height", origin.c_str(),
            ds.dropped_annotations);
  return ds;
}

Dataset load_annotations(const std::string& path) {
  return parse_annotations(read_file(path), path);
}

ProposalMap parse_proposals(const std::string& text, const std::string& origin) {
  ProposalMap out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedInputError(where + ": invalid JSON: " + e.what());
    }
    Proposal p;
    try {
      p.image_id = j.at("image_id").get<std::int64_t>();
      p.box = bbox_from_json(j.at("bbox"), where);
      p.score = j.at("score").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw MalformedInputError(where + ": " + e.what());
    }
    if (p.box.w <= 0.0 || p.box.h <= 0.0)
      throw MalformedInputError(where + ": proposal box must have positive size");
    if (!(p.score >= 0.0 && p.score <= 1.0))
      throw MalformedInputError(where + ": score must lie in [0,1]");
    out[p.image_id].push_back(std::move(p));
  }
  return out;
}

ProposalMap load_proposals(const std::string& path) {
  return parse_proposals(read_file(path), path);
}

std::int64_t flip_id_offset(const Dataset& ds) {
  std::int64_t max_id = 0;
  for (const auto& im : ds.images) max_id = std::max(max_id, im.id);
  for (const auto& g : ds.annotations) max_id = std::max(max_id, g.id);
  std::int64_t offset = 1;
  while (offset <= max_id) offset *= 10;
  return offset;
}

Dataset flip_augment(const Dataset& ds) {
  const std::int64_t offset = flip_id_offset(ds);
  Dataset out = ds;
  out.images.reserve(ds.images.size() * 2);
  out.annotations.reserve(ds.annotations.size() * 2);
  for (const auto& im : ds.images) {
    Image twin = im;
    twin.id = im.id + offset;
    twin.file_name = im.file_name + "#flip";
    twin.flipped = true;
    out.images.push_back(std::move(twin));
  }
  for (const auto& g : ds.annotations) {
    const Image* im = ds.find_image(g.image_id);
    GroundTruth twin = g;
    twin.id = g.id + offset;
    twin.image_id = g.image_id + offset;
    twin.box = flip_box(g.box, static_cast<double>(im->width));
    out.annotations.push_back(std::move(twin));
  }
  out.sort_canonical();
  return out;
}

ProposalMap flip_augment_proposals(const ProposalMap& proposals, const Dataset& original_ds) {
  const std::int64_t offset = flip_id_offset(original_ds);
  ProposalMap out = proposals;
  for (const auto& [image_id, props] : proposals) {
    const Image* im = original_ds.find_image(image_id);
    if (im == nullptr) continue;  // stray proposals stay un-mirrored
    std::vector<Proposal> twins;
    twins.reserve(props.size());
    for (const auto& p : props) {
      Proposal t = p;
      t.image_id = image_id + offset;
      t.box = flip_box(p.box, static_cast<double>(im->width));
      twins.push_back(std::move(t));
    }
    out[image_id + offset] = std::move(twins);
  }
  return out;
}

namespace {

void append_bbox(std::string& out, const Box& b) {
  out.push_back('[');
  append_f6(out, b.x);
  out.push_back(',');
  append_f6(out, b.y);
  out.push_back(',');
  append_f6(out, b.w);
  out.push_back(',');
  append_f6(out, b.h);
  out.push_back(']');
}

}  // namespace

std::string dataset_to_coco_json(const Dataset& ds) {
  std::string out = "{\"images\":[";
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    const Image& im = ds.images[i];
    if (i > 0) out.push_back(',');
    out += "{\"id\":" + std::to_string(im.id);
    out += ",\"width\":" + std::to_string(im.width);
    out += ",\"height\":" + std::to_string(im.height);
    out += ",\"file_name\":";
    append_json_string(out, im.file_name);
    out += "}";
  }
  out += "],\"annotations\":[";
  for (std::size_t i = 0; i < ds.annotations.size(); ++i) {
    const GroundTruth& g = ds.annotations[i];
    if (i > 0) out.push_back(',');
    out += "{\"id\":" + std::to_string(g.id);
    out += ",\"image_id\":" + std::to_string(g.image_id);
    out += ",\"bbox\":";
    append_bbox(out, g.box);
    out += ",\"category_id\":" + std::to_string(g.category);
    out += ",\"iscrowd\":";
    out += g.is_crowd ? "1" : "0";
    out += "}";
  }
  out += "]}";
  return out;
}

std::string proposals_to_jsonl(const ProposalMap& proposals) {
  std::string out;
  for (const auto& [image_id, props] : proposals) {
    for (const auto& p : props) {
      out += "{\"image_id\":" + std::to_string(image_id);
      out += ",\"bbox\":";
      append_bbox(out, p.box);
      out += ",\"score\":";
      append_f6(out, p.score);
      out += "}\n";
    }
  }
  return out;
}

}  // namespace chipforge
