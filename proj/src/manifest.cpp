#include "chipforge/manifest.hpp"

#include <algorithm>

#include <json.hpp>

#include "chipforge/errors.hpp"
#include "chipforge/jsonfmt.hpp"

namespace chipforge {
namespace {

void append_rect(std::string& out, const Box& b) {
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

Box rect_from_json(const nlohmann::json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 4)
    throw MalformedInputError(where + ": rect must be [x,y,w,h]");
  return Box{arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(),
             arr[3].get<double>()};
}

LabelKind label_from_string(const std::string& s, const std::string& where) {
  if (s == "pos") return LabelKind::kPositive;
  if (s == "neg") return LabelKind::kNegative;
  if (s == "ign") return LabelKind::kIgnore;
  throw MalformedInputError(where + ": unknown label \"" + s + "\"");
}

}  // namespace

bool ManifestHeader::operator==(const ManifestHeader& o) const {
  return schema == o.schema && tool_version == o.tool_version &&
         config_hash == o.config_hash && seed == o.seed && epoch == o.epoch &&
         flip == o.flip && min_proposals == o.min_proposals && neg_max == o.neg_max &&
         score_floor == o.score_floor && coverage == o.coverage &&
         pyramid.to_json_text() == o.pyramid.to_json_text();
}

std::string compute_config_hash(const PyramidConfig& pyramid, const NegativeParams& params,
                                bool flip) {
  std::string blob = pyramid.to_json_text();
  blob += "|M=" + std::to_string(params.min_proposals);
  blob += "|neg_max=" + std::to_string(params.max_per_image);
  blob += "|score_floor=" + f6(params.score_floor);
  blob += params.coverage == ProposalCoverage::kCenter ? "|cov=center" : "|cov=enclose";
  blob += flip ? "|flip=1" : "|flip=0";
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(blob)));
  return std::string(buf);
}

std::string serialize_header(const ManifestHeader& h) {
  std::string out = "{\"schema\":";
  append_json_string(out, h.schema);
  out += ",\"version\":";
  append_json_string(out, h.tool_version);
  out += ",\"config_hash\":";
  append_json_string(out, h.config_hash);
  out += ",\"seed\":" + std::to_string(h.seed);
  out += ",\"epoch\":" + std::to_string(h.epoch);
  out += ",\"flip\":";
  out += h.flip ? "true" : "false";
  out += ",\"min_proposals\":" + std::to_string(h.min_proposals);
  out += ",\"neg_max\":" + std::to_string(h.neg_max);
  out += ",\"score_floor\":";
  append_f6(out, h.score_floor);
  out += ",\"coverage\":";
  append_json_string(out, h.coverage);
  out += ",\"pyramid\":" + h.pyramid.to_json_text();
  out += "}";
  return out;
}

std::string serialize_record(const ChipRecord& r) {
  std::string out = "{\"image_id\":" + std::to_string(r.image_id);
  out += ",\"scale\":" + std::to_string(r.scale_index);
  out += ",\"kind\":\"";
  out += to_string(r.kind);
  out += "\",\"flipped\":";
  out += r.flipped ? "true" : "false";
  out += ",\"canvas_rect\":";
  append_rect(out, r.rect_canvas);
  out += ",\"orig_rect\":";
  append_rect(out, r.rect_original);
  out += ",\"n_props\":" + std::to_string(r.n_proposals);
  out += ",\"gts\":[";
  for (std::size_t i = 0; i < r.gts.size(); ++i) {
    const ChipGt& g = r.gts[i];
    if (i > 0) out.push_back(',');
    out += "{\"id\":" + std::to_string(g.gt_id);
    out += ",\"cat\":" + std::to_string(g.category);
    out += ",\"crowd\":";
    out += g.is_crowd ? "true" : "false";
    out += ",\"valid\":";
    out += g.valid ? "true" : "false";
    out += ",\"box\":";
    append_rect(out, g.box);
    out += "}";
  }
  out += "]";
  if (r.has_labels) {
    out += ",\"labels\":[";
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
      const ProposalLabel& l = r.labels[i];
      if (i > 0) out.push_back(',');
      out += "{\"i\":" + std::to_string(l.proposal_index);
      out += ",\"box\":";
      append_rect(out, l.box_chip);
      out += ",\"label\":\"";
      out += to_string(l.label);
      out += "\"";
      if (l.label == LabelKind::kPositive) {
        out += ",\"cat\":" + std::to_string(l.category);
        out += ",\"gt\":" + std::to_string(l.matched_gt);
        out += ",\"t\":[";
        for (int k = 0; k < 4; ++k) {
          if (k > 0) out.push_back(',');
          append_f6(out, l.target[static_cast<std::size_t>(k)]);
        }
        out += "]";
      }
      out += "}";
    }
    out += "]";
  }
  out += "}";
  return out;
}

ManifestHeader parse_header(const std::string& line, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInputError(origin + ": invalid header JSON: " + e.what());
  }
  ManifestHeader h;
  try {
    h.schema = j.at("schema").get<std::string>();
    if (h.schema != kManifestSchema)
      throw VersionMismatchError(origin + ": manifest schema \"" + h.schema +
                                 "\" does not match expected \"" + kManifestSchema + "\"");
    h.tool_version = j.at("version").get<std::string>();
    h.config_hash = j.at("config_hash").get<std::string>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.epoch = j.at("epoch").get<int>();
    h.flip = j.at("flip").get<bool>();
    h.min_proposals = j.at("min_proposals").get<int>();
    h.neg_max = j.at("neg_max").get<int>();
    h.score_floor = j.at("score_floor").get<double>();
    h.coverage = j.at("coverage").get<std::string>();
    h.pyramid = PyramidConfig::from_json_text(j.at("pyramid").dump(), origin + " pyramid");
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInputError(origin + ": header: " + e.what());
  }
  return h;
}

ChipRecord parse_record(const std::string& line, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInputError(origin + ": invalid record JSON: " + e.what());
  }
  ChipRecord r;
  try {
    r.image_id = j.at("image_id").get<std::int64_t>();
    r.scale_index = j.at("scale").get<int>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pos")
      r.kind = ChipKind::kPositive;
    else if (kind == "neg")
      r.kind = ChipKind::kNegative;
    else
      throw MalformedInputError(origin + ": unknown chip kind \"" + kind + "\"");
    r.flipped = j.at("flipped").get<bool>();
    r.rect_canvas = rect_from_json(j.at("canvas_rect"), origin);
    r.rect_original = rect_from_json(j.at("orig_rect"), origin);
    r.n_proposals = j.at("n_props").get<int>();
    for (const auto& e : j.at("gts")) {
      ChipGt g;
      g.gt_id = e.at("id").get<std::int64_t>();
      g.category = e.at("cat").get<int>();
      g.is_crowd = e.at("crowd").get<bool>();
      g.valid = e.at("valid").get<bool>();
      g.box = rect_from_json(e.at("box"), origin);
      r.gts.push_back(std::move(g));
    }
    if (j.contains("labels")) {
      r.has_labels = true;
      for (const auto& e : j["labels"]) {
        ProposalLabel l;
        l.proposal_index = e.at("i").get<int>();
        l.box_chip = rect_from_json(e.at("box"), origin);
        l.label = label_from_string(e.at("label").get<std::string>(), origin);
        if (l.label == LabelKind::kPositive) {
          l.category = e.at("cat").get<int>();
          l.matched_gt = e.at("gt").get<std::int64_t>();
          const auto& t = e.at("t");
          if (!t.is_array() || t.size() != 4)
            throw MalformedInputError(origin + ": regression target must have 4 entries");
          for (int k = 0; k < 4; ++k)
            l.target[static_cast<std::size_t>(k)] = t[static_cast<std::size_t>(k)].get<double>();
        }
        r.labels.push_back(std::move(l));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInputError(origin + ": record: " + e.what());
  }
  return r;
}

ManifestWriter::ManifestWriter(const std::string& path, const ManifestHeader& header)
    : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw IoError("cannot open manifest for writing: " + path);
  out_ << serialize_header(header) << "\n";
  if (!out_) throw IoError("write failure: " + path);
}

ManifestWriter::~ManifestWriter() {
  if (out_.is_open()) out_.close();
}

void ManifestWriter::add(const ChipRecord& r) {
  if (have_last_ && record_less(r, last_key_))
    throw std::logic_error("manifest records must be added in canonical order");
  last_key_.image_id = r.image_id;
  last_key_.kind = r.kind;
  last_key_.scale_index = r.scale_index;
  last_key_.rect_canvas = r.rect_canvas;
  have_last_ = true;
  out_ << serialize_record(r) << "\n";
  if (!out_) throw IoError("write failure: " + path_);
  ++n_written_;
}

void ManifestWriter::close() {
  if (out_.is_open()) {
    out_.flush();
    if (!out_) throw IoError("write failure: " + path_);
    out_.close();
  }
}

ManifestReader::ManifestReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw IoError("cannot open manifest: " + path);
  std::string line;
  if (!std::getline(in_, line)) throw MalformedInputError(path + ": empty manifest");
  line_no_ = 1;
  header_ = parse_header(line, path + ":1");
}

std::optional<ChipRecord> ManifestReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.empty()) continue;
    return parse_record(line, path_ + ":" + std::to_string(line_no_));
  }
  if (in_.bad()) throw IoError("read failure: " + path_);
  return std::nullopt;
}

Manifest read_manifest(const std::string& path) {
  ManifestReader reader(path);
  Manifest m;
  m.header = reader.header();
  while (auto r = reader.next()) m.records.push_back(std::move(*r));
  return m;
}

void write_manifest(Manifest m, const std::string& path) {
  std::sort(m.records.begin(), m.records.end(), record_less);
  ManifestWriter writer(path, m.header);
  for (const auto& r : m.records) writer.add(r);
  writer.close();
}

}  // namespace chipforge
