#include "chipforge/bench.hpp"

#include <chrono>
#include <string>

#include "chipforge/jsonfmt.hpp"
#include "chipforge/manifest.hpp"
#include "chipforge/parallel.hpp"

namespace chipforge {
namespace {

const std::vector<Proposal>* props_for(const ProposalMap& proposals, std::int64_t id) {
  auto it = proposals.find(id);
  return it == proposals.end() ? nullptr : &it->second;
}

}  // namespace

BenchResult bench_throughput(const Dataset& ds, const ProposalMap& proposals,
                             const MineParams& params, int workers, bool warmup) {
  BenchResult result;
  result.n_images = static_cast<std::int64_t>(ds.images.size());
  if (ds.images.empty()) return result;

  auto mine_one = [&](std::size_t i) {
    const Image& im = ds.images[i];
    return mine_image(im, ds.gts_for(im.id), props_for(proposals, im.id), params, true);
  };

  if (warmup) {
    const std::size_t n_warm = std::min<std::size_t>(ds.images.size(), 256);
    parallel_for(n_warm, workers, [&](std::size_t i) { (void)mine_one(i); });
  }

  struct ImageOutput {
    std::string lines;
    std::int64_t records = 0;
  };
  // Serialization runs in the producers; the ordered sink only folds the
  // hash, so the timed region parallelizes end to end.
  auto produce = [&](std::size_t i) {
    const ImageChips chips = mine_one(i);
    ImageOutput out;
    for (const auto& r : chips.positives) {
      out.lines += serialize_record(r);
      out.lines.push_back('\n');
      ++out.records;
    }
    for (const auto& r : chips.negatives) {
      out.lines += serialize_record(r);
      out.lines.push_back('\n');
      ++out.records;
    }
    return out;
  };

  std::uint64_t hash = 0xcbf29ce484222325ull;
  std::int64_t n_records = 0;
  const auto start = std::chrono::steady_clock::now();
  ordered_parallel_produce<ImageOutput>(
      ds.images.size(), workers, produce, [&](std::size_t, ImageOutput&& out) {
        for (unsigned char c : out.lines) {
          hash ^= c;
          hash *= 0x100000001b3ull;
        }
        n_records += out.records;
      });
  const auto stop = std::chrono::steady_clock::now();

  result.wall_seconds = std::chrono::duration<double>(stop - start).count();
  result.n_records = n_records;
  result.output_hash = hash;
  result.images_per_second = result.wall_seconds > 0.0
                                 ? static_cast<double>(result.n_images) / result.wall_seconds
                                 : 0.0;
  return result;
}

}  // namespace chipforge
