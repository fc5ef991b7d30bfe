#include "chipforge/oracle.hpp"

#include <algorithm>
#include <bit>

#include "chipforge/errors.hpp"

namespace chipforge {

BruteForceCover brute_force_cover(std::span<const GroundTruth> valid,
                                  std::span<const Box> candidates, const Canvas& canvas) {
  if (candidates.size() > kMaxOracleCandidates || valid.size() > kMaxOracleBoxes)
    throw InstanceTooLargeError("brute_force_cover: instance exceeds exhaustive bounds");

  const std::size_t n = valid.size();
  const std::size_t m = candidates.size();
  BruteForceCover result;

  // Per-candidate enclosure sets over the boxes, by direct geometry.
  std::vector<std::uint32_t> sets(m, 0);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t j = 0; j < n; ++j)
      if (encloses(candidates[c], scale_to_canvas(valid[j].box, canvas)))
        sets[c] |= 1u << j;

  std::uint32_t target = 0;
  for (std::uint32_t s : sets) target |= s;
  for (std::size_t j = 0; j < n; ++j)
    if ((target & (1u << j)) == 0) result.uncoverable.push_back(static_cast<int>(j));

  // Exact minimum cover of `target` via subset DP.
  const std::size_t n_masks = 1u << n;
  constexpr int kInf = 1 << 28;
  std::vector<int> dp(n_masks, kInf);
  dp[0] = 0;
  for (std::size_t mask = 0; mask < n_masks; ++mask) {
    if (dp[mask] >= kInf) continue;
    for (std::size_t c = 0; c < m; ++c) {
      const std::size_t next = mask | sets[c];
      dp[next] = std::min(dp[next], dp[mask] + 1);
    }
  }
  result.min_cover_size = dp[target] >= kInf ? 0 : dp[target];

  // Greedy argmax trace: the count a correct greedy step must achieve.
  std::uint32_t covered = 0;
  while (covered != target) {
    int best = 0;
    for (std::size_t c = 0; c < m; ++c)
      best = std::max(best, std::popcount(sets[c] & ~covered));
    result.per_step_argmax.push_back(best);
    for (std::size_t c = 0; c < m; ++c)
      if (std::popcount(sets[c] & ~covered) == best) {
        covered |= sets[c];
        break;
      }
  }
  return result;
}

}  // namespace chipforge
