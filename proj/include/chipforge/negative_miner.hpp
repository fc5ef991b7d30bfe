#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chipforge/dataset.hpp"
#include "chipforge/pyramid.hpp"
#include "chipforge/records.hpp"

namespace chipforge {

// How a proposal counts as covered by a chip: by its center point (the
// default) or by full enclosure of its box.
enum class ProposalCoverage { kCenter, kEnclose };

struct NegativeParams {
  int min_proposals = 2;   // M: a negative chip must cover at least this many
  int max_per_image = 2;   // per-epoch sampling cap
  double score_floor = 0.0;
  ProposalCoverage coverage = ProposalCoverage::kCenter;
};

// Drops every proposal covered by a positive chip of any scale at which the
// proposal is range-valid. Coverage is tested in that scale's canvas
// coordinates. Idempotent; order preserved.
std::vector<Proposal> filter_covered(std::span<const Proposal> proposals,
                                     std::span<const ChipRecord> pos_chips,
                                     const Image& image, const PyramidConfig& pyramid,
                                     ProposalCoverage coverage = ProposalCoverage::kCenter);

struct NegativePick {
  int candidate = -1;  // index into the candidate grid
  int count = 0;       // uncovered qualifying proposals at selection time
};

// Greedy selection of chips covering at least min_proposals not-yet-covered
// range-valid residual proposals. Stops when no candidate reaches the
// threshold; ties break row-major.
std::vector<NegativePick> select_negative_chips(std::span<const Proposal> residual,
                                                const Canvas& canvas,
                                                const AreaRange& range,
                                                std::span<const Box> candidates,
                                                int min_proposals,
                                                ProposalCoverage coverage);

struct NegativePool {
  std::int64_t image_id = 0;
  std::vector<ChipRecord> chips;  // canonical order, all scales
};

// Full per-image negative pass: score floor, covered-proposal filtering,
// per-scale greedy selection, record materialization.
NegativePool mine_negative_pool(const Image& image, std::span<const GroundTruth> gts,
                                std::span<const Proposal> proposals,
                                std::span<const ChipRecord> pos_chips,
                                const PyramidConfig& pyramid, const NegativeParams& params);

// Uniform sample without replacement of min(n_max, pool size) chips,
// deterministic in (seed, epoch, image_id) and independent of scheduling.
std::vector<ChipRecord> sample_negatives(const NegativePool& pool, int n_max, int epoch,
                                         std::uint64_t seed);

}  // namespace chipforge
