#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chipforge/records.hpp"

namespace chipforge {

struct Image {
  std::int64_t id = 0;
  int width = 0;
  int height = 0;
  std::string file_name;
  bool flipped = false;
};

// In-memory dataset: images sorted by id, annotations sorted by
// (image_id, id). The canonical sort makes loading independent of file
// ordering.
struct Dataset {
  std::vector<Image> images;
  std::vector<GroundTruth> annotations;
  int dropped_annotations = 0;  // non-positive-size boxes removed at load

  const Image* find_image(std::int64_t id) const;
  // Contiguous annotation range for one image (valid after canonical sort).
  std::span<const GroundTruth> gts_for(std::int64_t image_id) const;
  void sort_canonical();
};

using ProposalMap = std::map<std::int64_t, std::vector<Proposal>>;

// COCO-style annotation JSON: {"images":[{id,width,height,file_name}],
// "annotations":[{id,image_id,bbox:[x,y,w,h],category_id,iscrowd}]}.
// Boxes are clamped to the image frame; annotations left without positive
// width or height are dropped and counted. An annotation referencing a
// missing image is an error.
Dataset load_annotations(const std::string& path);
Dataset parse_annotations(const std::string& text, const std::string& origin);

// JSON Lines, one proposal per line: {"image_id":N,"bbox":[x,y,w,h],"score":s}.
// Grouped by image, input order preserved within an image. Malformed lines
// report their line number.
ProposalMap load_proposals(const std::string& path);
ProposalMap parse_proposals(const std::string& text, const std::string& origin);

// Doubles the dataset with horizontally mirrored twins. Twin image and
// annotation ids are original + offset, where the offset is the smallest
// power of ten above every existing id; twin file names carry a "#flip"
// marker.
Dataset flip_augment(const Dataset& ds);

// Mirrors proposals onto the flipped twin images so negative mining and
// label assignment see the same boxes the twins' annotations do. Takes the
// pre-flip dataset (for image widths and the id offset).
ProposalMap flip_augment_proposals(const ProposalMap& proposals, const Dataset& original_ds);

std::int64_t flip_id_offset(const Dataset& ds);

// Byte-stable serialization (fixed 6-decimal numbers), matching the formats
// load_annotations / load_proposals read back.
std::string dataset_to_coco_json(const Dataset& ds);
std::string proposals_to_jsonl(const ProposalMap& proposals);

}  // namespace chipforge
