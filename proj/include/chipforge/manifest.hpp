#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "chipforge/negative_miner.hpp"
#include "chipforge/pyramid.hpp"
#include "chipforge/records.hpp"

namespace chipforge {

inline constexpr const char* kManifestSchema = "chipforge/1";
inline constexpr const char* kToolVersion = "0.1.0";

struct ManifestHeader {
  std::string schema = kManifestSchema;
  std::string tool_version = kToolVersion;
  std::string config_hash;
  std::uint64_t seed = 0;
  int epoch = 0;
  bool flip = false;
  int min_proposals = 2;
  int neg_max = 2;
  double score_floor = 0.0;
  std::string coverage = "center";
  PyramidConfig pyramid;

  bool operator==(const ManifestHeader& o) const;
};

struct Manifest {
  ManifestHeader header;
  std::vector<ChipRecord> records;

  bool operator==(const Manifest& o) const = default;
};

// Hash over everything that shapes mining output except seed/epoch; lets a
// reader detect that two manifests came from the same configuration.
std::string compute_config_hash(const PyramidConfig& pyramid, const NegativeParams& params,
                                bool flip);

std::string serialize_header(const ManifestHeader& h);
std::string serialize_record(const ChipRecord& r);
ManifestHeader parse_header(const std::string& line, const std::string& origin);
ChipRecord parse_record(const std::string& line, const std::string& origin);

// Streaming JSON Lines writer: header first, then records, which must
// arrive in canonical (image_id, kind, scale, y, x) order.
class ManifestWriter {
 public:
  ManifestWriter(const std::string& path, const ManifestHeader& header);
  ~ManifestWriter();
  void add(const ChipRecord& r);
  void close();
  std::int64_t records_written() const { return n_written_; }

 private:
  std::ofstream out_;
  std::string path_;
  std::int64_t n_written_ = 0;
  bool have_last_ = false;
  ChipRecord last_key_;
};

class ManifestReader {
 public:
  explicit ManifestReader(const std::string& path);
  const ManifestHeader& header() const { return header_; }
  std::optional<ChipRecord> next();

 private:
  std::ifstream in_;
  std::string path_;
  ManifestHeader header_;
  int line_no_ = 0;
};

Manifest read_manifest(const std::string& path);
void write_manifest(Manifest m, const std::string& path);  // sorts records

}  // namespace chipforge
