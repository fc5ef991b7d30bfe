#pragma once

#include <span>
#include <vector>

#include "chipforge/pyramid.hpp"
#include "chipforge/records.hpp"

namespace chipforge {

// Exhaustive counterpart to greedy_cover for small instances: the exact
// minimum cover size over the enclosable boxes and the per-step argmax
// trace the greedy rule must attain. Implemented on the plain scalar
// geometry, independent of the kernel path.
struct BruteForceCover {
  int min_cover_size = 0;
  std::vector<int> per_step_argmax;  // best uncovered-cover count at each step
  std::vector<int> uncoverable;      // valid-list indices nothing encloses
};

inline constexpr std::size_t kMaxOracleCandidates = 20;
inline constexpr std::size_t kMaxOracleBoxes = 10;

// Throws InstanceTooLargeError beyond (kMaxOracleCandidates, kMaxOracleBoxes).
BruteForceCover brute_force_cover(std::span<const GroundTruth> valid,
                                  std::span<const Box> candidates, const Canvas& canvas);

}  // namespace chipforge
