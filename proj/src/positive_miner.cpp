#include "chipforge/positive_miner.hpp"

#include <algorithm>
#include <bit>

#include "chipforge/kernels.hpp"

namespace chipforge {

std::vector<GroundTruth> valid_gts(std::span<const GroundTruth> gts,
                                   const AreaRange& range) {
  std::vector<GroundTruth> out;
  for (const auto& g : gts)
    if (!g.is_crowd && range.contains_area(g.box.area())) out.push_back(g);
  return out;
}

GreedyCoverResult greedy_cover(std::span<const GroundTruth> valid, const Canvas& canvas,
                               std::span<const Box> candidates) {
  GreedyCoverResult result;
  const std::size_t n_boxes = valid.size();
  const std::size_t n_cand = candidates.size();
  if (n_boxes == 0 || n_cand == 0) {
    for (std::size_t j = 0; j < n_boxes; ++j)
      result.uncoverable.push_back(static_cast<int>(j));
    return result;
  }

  kernels::RectSoa cand_soa;
  cand_soa.reserve(n_cand);
  for (const auto& c : candidates) cand_soa.push(c);

  // Candidate-major bitmasks over boxes, built from the box-major kernel
  // sweep (candidates are the long, SIMD-friendly axis).
  const std::size_t wpm = kernels::mask_words(n_boxes);
  std::vector<std::uint64_t> cand_masks(n_cand * wpm, 0);
  std::vector<std::uint64_t> tmp(kernels::mask_words(n_cand));

  std::size_t enclosable = 0;
  for (std::size_t j = 0; j < n_boxes; ++j) {
    const Box scaled = scale_to_canvas(valid[j].box, canvas);
    kernels::enclosing_rects_mask(cand_soa, scaled, tmp.data());
    bool any = false;
    for (std::size_t w = 0; w < tmp.size(); ++w) {
      std::uint64_t bits = tmp[w];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        bits &= bits - 1;
        const std::size_t c = (w << 6) + static_cast<std::size_t>(b);
        cand_masks[c * wpm + (j >> 6)] |= 1ull << (j & 63);
        any = true;
      }
    }
    if (any)
      ++enclosable;
    else
      result.uncoverable.push_back(static_cast<int>(j));
  }

  std::vector<std::uint64_t> covered(wpm, 0);
  std::size_t remaining = enclosable;
  while (remaining > 0) {
    std::size_t best = 0;
    int best_cnt = 0;
    for (std::size_t c = 0; c < n_cand; ++c) {
      int cnt = 0;
      const std::uint64_t* m = &cand_masks[c * wpm];
      for (std::size_t w = 0; w < wpm; ++w)
        cnt += std::popcount(m[w] & ~covered[w]);
      if (cnt > best_cnt) {  // strict: ties keep the earliest candidate
        best_cnt = cnt;
        best = c;
      }
    }
    result.selected.push_back(static_cast<int>(best));
    result.selected_cover.push_back(best_cnt);
    const std::uint64_t* m = &cand_masks[best * wpm];
    for (std::size_t w = 0; w < wpm; ++w) covered[w] |= m[w];
    remaining -= static_cast<std::size_t>(best_cnt);
  }
  return result;
}

std::vector<ChipGt> attach_gts(const Box& chip_canvas, std::span<const GroundTruth> all_gts,
                               const Canvas& canvas, const AreaRange& range) {
  std::vector<ChipGt> out;
  for (const auto& g : all_gts) {
    const Box scaled = scale_box(g.box, canvas.factor);
    const auto clipped = clip(scaled, chip_canvas);
    if (!clipped) continue;
    ChipGt cg;
    cg.gt_id = g.id;
    cg.category = g.category;
    cg.is_crowd = g.is_crowd;
    cg.valid = !g.is_crowd && range.contains_area(g.box.area());
    cg.box = Box{clipped->x - chip_canvas.x, clipped->y - chip_canvas.y, clipped->w,
                 clipped->h};
    out.push_back(cg);
  }
  return out;
}

PositiveMineResult mine_positive(const Image& image, std::span<const GroundTruth> gts,
                                 const PyramidConfig& pyramid) {
  PositiveMineResult result;
  for (const auto& spec : pyramid.scales()) {
    const std::vector<GroundTruth> valid = valid_gts(gts, spec.range);
    if (valid.empty()) continue;
    const Canvas canvas = resolve_canvas(image.width, image.height, spec);
    const std::vector<Box> candidates = grid_chips(canvas, spec);
    const GreedyCoverResult cover = greedy_cover(valid, canvas, candidates);
    result.uncoverable += static_cast<std::int64_t>(cover.uncoverable.size());
    for (int idx : cover.selected) {
      const Box& chip = candidates[static_cast<std::size_t>(idx)];
      ChipRecord rec;
      rec.image_id = image.id;
      rec.scale_index = spec.index;
      rec.kind = ChipKind::kPositive;
      rec.flipped = image.flipped;
      rec.rect_canvas = chip;
      rec.rect_original = scale_box(chip, 1.0 / canvas.factor);
      rec.gts = attach_gts(chip, gts, canvas, spec.range);
      result.records.push_back(std::move(rec));
    }
  }
  std::sort(result.records.begin(), result.records.end(), record_less);
  return result;
}

}  // namespace chipforge
