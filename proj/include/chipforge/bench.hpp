#pragma once

#include <cstdint>

#include "chipforge/dataset.hpp"
#include "chipforge/pipeline.hpp"

namespace chipforge {

struct BenchResult {
  double images_per_second = 0.0;
  double wall_seconds = 0.0;
  std::int64_t n_images = 0;
  std::int64_t n_records = 0;
  std::uint64_t output_hash = 0;  // hash of the serialized record stream
};

// End-to-end mining throughput (positive + negative + sampling), warmup
// excluded. The output hash covers the ordered serialized records, so two
// runs at different worker counts can be compared without touching disk.
BenchResult bench_throughput(const Dataset& ds, const ProposalMap& proposals,
                             const MineParams& params, int workers, bool warmup = true);

}  // namespace chipforge
