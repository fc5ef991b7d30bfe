#include "chipforge/pipeline.hpp"

namespace chipforge {

ImageChips mine_image(const Image& image, std::span<const GroundTruth> gts,
                      const std::vector<Proposal>* proposals, const MineParams& params,
                      bool want_negatives) {
  ImageChips out;
  PositiveMineResult pos = mine_positive(image, gts, params.pyramid);
  out.uncoverable = pos.uncoverable;
  out.positives = std::move(pos.records);

  if (want_negatives && proposals != nullptr && !proposals->empty()) {
    const NegativePool pool = mine_negative_pool(image, gts, *proposals, out.positives,
                                                 params.pyramid, params.neg);
    out.negatives =
        sample_negatives(pool, params.neg.max_per_image, params.epoch, params.seed);
  }
  return out;
}

}  // namespace chipforge
