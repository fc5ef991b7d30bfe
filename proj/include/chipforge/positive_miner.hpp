#pragma once

#include <span>
#include <vector>

#include "chipforge/dataset.hpp"
#include "chipforge/pyramid.hpp"
#include "chipforge/records.hpp"

namespace chipforge {

// Ground-truth boxes participating at a scale: non-crowd and inside the
// range (original-coordinate area). Order preserved.
std::vector<GroundTruth> valid_gts(std::span<const GroundTruth> gts,
                                   const AreaRange& range);

struct GreedyCoverResult {
  std::vector<int> selected;        // candidate indices in selection order
  std::vector<int> selected_cover;  // newly covered boxes per selection
  std::vector<int> uncoverable;     // valid-list indices no candidate encloses
};

// Greedy maximum coverage: repeatedly select the candidate chip enclosing
// the most not-yet-covered valid boxes (ties: first in row-major grid
// order) until every enclosable box is covered. Enclosure is tested in
// canvas coordinates.
GreedyCoverResult greedy_cover(std::span<const GroundTruth> valid, const Canvas& canvas,
                               std::span<const Box> candidates);

// Every ground truth with a non-empty clip against the chip, cropped and
// moved to chip-local coordinates, flagged valid per the scale's range on
// the original-coordinate area.
std::vector<ChipGt> attach_gts(const Box& chip_canvas, std::span<const GroundTruth> all_gts,
                               const Canvas& canvas, const AreaRange& range);

struct PositiveMineResult {
  std::vector<ChipRecord> records;  // canonical order
  std::int64_t uncoverable = 0;     // valid boxes no candidate could enclose
};

// Full per-image positive pass: for each scale, cover the valid boxes with
// grid chips and materialize the selections as records.
PositiveMineResult mine_positive(const Image& image, std::span<const GroundTruth> gts,
                                 const PyramidConfig& pyramid);

}  // namespace chipforge
