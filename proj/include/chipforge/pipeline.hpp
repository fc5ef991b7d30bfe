#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chipforge/dataset.hpp"
#include "chipforge/negative_miner.hpp"
#include "chipforge/positive_miner.hpp"
#include "chipforge/pyramid.hpp"

namespace chipforge {

struct MineParams {
  PyramidConfig pyramid = PyramidConfig::default_3scale();
  NegativeParams neg;
  std::uint64_t seed = 0;
  int epoch = 0;
};

struct ImageChips {
  std::vector<ChipRecord> positives;  // canonical order
  std::vector<ChipRecord> negatives;  // sampled, canonical order
  std::int64_t uncoverable = 0;
};

// Per-image mining entry point shared by the CLI commands and the
// benchmark. Negative mining always runs the positive pass first (the
// covered-proposal filter needs it); proposals may be null when only
// positives are wanted.
ImageChips mine_image(const Image& image, std::span<const GroundTruth> gts,
                      const std::vector<Proposal>* proposals, const MineParams& params,
                      bool want_negatives);

}  // namespace chipforge
