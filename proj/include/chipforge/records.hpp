#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "chipforge/box.hpp"

namespace chipforge {

struct GroundTruth {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  Box box;  // original coordinates
  int category = 0;
  bool is_crowd = false;
};

struct Proposal {
  std::int64_t image_id = 0;
  Box box;  // original coordinates
  double score = 0.0;
};

enum class ChipKind { kPositive, kNegative };

enum class LabelKind { kPositive, kNegative, kIgnore };

// Label decision for one proposal inside a chip. category, matched_gt and
// target are only meaningful for kPositive.
struct ProposalLabel {
  int proposal_index = -1;  // index into the image's proposal list
  Box box_chip;             // proposal cropped to the chip, chip-local coords
  LabelKind label = LabelKind::kIgnore;
  int category = 0;
  std::int64_t matched_gt = -1;
  std::array<double, 4> target = {0.0, 0.0, 0.0, 0.0};

  bool operator==(const ProposalLabel&) const = default;
};

struct AnchorLabel {
  int anchor_index = -1;
  LabelKind label = LabelKind::kIgnore;
};

// A ground-truth instance as retained inside a chip: cropped to the chip,
// chip-local coordinates at canvas scale. `valid` is the scale's range test
// on the original-coordinate area; crowd regions are never valid.
struct ChipGt {
  std::int64_t gt_id = 0;
  int category = 0;
  bool is_crowd = false;
  bool valid = false;
  Box box;

  bool operator==(const ChipGt&) const = default;
};

// One selected training chip. rect_canvas is K x K on the scale's canvas;
// rect_original is the same rect back-projected by 1/factor.
struct ChipRecord {
  std::int64_t image_id = 0;
  int scale_index = 0;
  ChipKind kind = ChipKind::kPositive;
  bool flipped = false;
  Box rect_canvas;
  Box rect_original;
  int n_proposals = 0;  // residual proposals that qualified a negative chip
  std::vector<ChipGt> gts;
  bool has_labels = false;
  std::vector<ProposalLabel> labels;

  bool operator==(const ChipRecord&) const = default;
};

// Canonical record order: (image_id, kind, scale, y, x). Applied before
// serialization so manifests are byte-stable.
inline bool record_less(const ChipRecord& a, const ChipRecord& b) {
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.scale_index != b.scale_index) return a.scale_index < b.scale_index;
  if (a.rect_canvas.y != b.rect_canvas.y) return a.rect_canvas.y < b.rect_canvas.y;
  return a.rect_canvas.x < b.rect_canvas.x;
}

inline std::string to_string(ChipKind k) {
  return k == ChipKind::kPositive ? "pos" : "neg";
}
inline std::string to_string(LabelKind k) {
  switch (k) {
    case LabelKind::kPositive:
      return "pos";
    case LabelKind::kNegative:
      return "neg";
    default:
      return "ign";
  }
}

}  // namespace chipforge
