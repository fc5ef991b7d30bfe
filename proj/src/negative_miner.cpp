#include "chipforge/negative_miner.hpp"

#include <algorithm>
#include <bit>

#include "chipforge/kernels.hpp"
#include "chipforge/positive_miner.hpp"
#include "chipforge/rng.hpp"

namespace chipforge {

std::vector<Proposal> filter_covered(std::span<const Proposal> proposals,
                                     std::span<const ChipRecord> pos_chips,
                                     const Image& image, const PyramidConfig& pyramid,
                                     ProposalCoverage coverage) {
  const std::size_t n = proposals.size();
  std::vector<char> covered(n, 0);

  for (const auto& spec : pyramid.scales()) {
    std::vector<const ChipRecord*> chips;
    for (const auto& r : pos_chips)
      if (r.scale_index == spec.index && r.kind == ChipKind::kPositive)
        chips.push_back(&r);
    if (chips.empty()) continue;

    const Canvas canvas = resolve_canvas(image.width, image.height, spec);

    if (coverage == ProposalCoverage::kCenter) {
      std::vector<double> cx(n), cy(n);
      for (std::size_t i = 0; i < n; ++i) {
        cx[i] = proposals[i].box.cx() * canvas.factor;
        cy[i] = proposals[i].box.cy() * canvas.factor;
      }
      std::vector<std::uint64_t> mask(kernels::mask_words(n));
      for (const ChipRecord* r : chips) {
        kernels::points_in_rect_mask(r->rect_canvas, cx.data(), cy.data(), n,
                                     mask.data());
        for (std::size_t w = 0; w < mask.size(); ++w) {
          std::uint64_t bits = mask[w];
          while (bits != 0) {
            const std::size_t i = (w << 6) + static_cast<std::size_t>(std::countr_zero(bits));
            bits &= bits - 1;
            if (spec.range.contains_area(proposals[i].box.area())) covered[i] = 1;
          }
        }
      }
    } else {
      kernels::RectSoa chip_soa;
      chip_soa.reserve(chips.size());
      for (const ChipRecord* r : chips) chip_soa.push(r->rect_canvas);
      std::vector<std::uint64_t> mask(kernels::mask_words(chips.size()));
      for (std::size_t i = 0; i < n; ++i) {
        if (covered[i] != 0) continue;
        if (!spec.range.contains_area(proposals[i].box.area())) continue;
        kernels::enclosing_rects_mask(chip_soa, scale_box(proposals[i].box, canvas.factor),
                                      mask.data());
        for (std::uint64_t w : mask)
          if (w != 0) {
            covered[i] = 1;
            break;
          }
      }
    }
  }

  std::vector<Proposal> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (covered[i] == 0) out.push_back(proposals[i]);
  return out;
}

std::vector<NegativePick> select_negative_chips(std::span<const Proposal> residual,
                                                const Canvas& canvas,
                                                const AreaRange& range,
                                                std::span<const Box> candidates,
                                                int min_proposals,
                                                ProposalCoverage coverage) {
  std::vector<NegativePick> picks;
  const std::size_t n_cand = candidates.size();
  if (n_cand == 0) return picks;

  // Range-valid subset of the residual proposals.
  std::vector<const Proposal*> props;
  for (const auto& p : residual)
    if (range.contains_area(p.box.area())) props.push_back(&p);
  const std::size_t n = props.size();
  if (n == 0 || static_cast<int>(n) < min_proposals) return picks;

  kernels::RectSoa cand_soa;
  cand_soa.reserve(n_cand);
  for (const auto& c : candidates) cand_soa.push(c);

  const std::size_t wpm = kernels::mask_words(n);
  std::vector<std::uint64_t> cand_masks(n_cand * wpm, 0);
  std::vector<std::uint64_t> tmp(kernels::mask_words(n_cand));

  for (std::size_t j = 0; j < n; ++j) {
    if (coverage == ProposalCoverage::kCenter) {
      kernels::rects_containing_point(cand_soa, props[j]->box.cx() * canvas.factor,
                                      props[j]->box.cy() * canvas.factor, tmp.data());
    } else {
      kernels::enclosing_rects_mask(cand_soa, scale_box(props[j]->box, canvas.factor),
                                    tmp.data());
    }
    for (std::size_t w = 0; w < tmp.size(); ++w) {
      std::uint64_t bits = tmp[w];
      while (bits != 0) {
        const int b = std::countr_zero(bits);
        bits &= bits - 1;
        const std::size_t c = (w << 6) + static_cast<std::size_t>(b);
        cand_masks[c * wpm + (j >> 6)] |= 1ull << (j & 63);
      }
    }
  }

  std::vector<std::uint64_t> covered(wpm, 0);
  while (true) {
    std::size_t best = 0;
    int best_cnt = 0;
    for (std::size_t c = 0; c < n_cand; ++c) {
      int cnt = 0;
      const std::uint64_t* m = &cand_masks[c * wpm];
      for (std::size_t w = 0; w < wpm; ++w)
        cnt += std::popcount(m[w] & ~covered[w]);
      if (cnt > best_cnt) {
        best_cnt = cnt;
        best = c;
      }
    }
    if (best_cnt < min_proposals) break;
    picks.push_back(NegativePick{static_cast<int>(best), best_cnt});
    const std::uint64_t* m = &cand_masks[best * wpm];
    for (std::size_t w = 0; w < wpm; ++w) covered[w] |= m[w];
  }
  return picks;
}

NegativePool mine_negative_pool(const Image& image, std::span<const GroundTruth> gts,
                                std::span<const Proposal> proposals,
                                std::span<const ChipRecord> pos_chips,
                                const PyramidConfig& pyramid,
                                const NegativeParams& params) {
  NegativePool pool;
  pool.image_id = image.id;

  std::vector<Proposal> kept;
  kept.reserve(proposals.size());
  for (const auto& p : proposals)
    if (p.score >= params.score_floor) kept.push_back(p);

  const std::vector<Proposal> residual =
      filter_covered(kept, pos_chips, image, pyramid, params.coverage);
  if (residual.empty()) return pool;

  for (const auto& spec : pyramid.scales()) {
    const Canvas canvas = resolve_canvas(image.width, image.height, spec);
    const std::vector<Box> candidates = grid_chips(canvas, spec);
    const std::vector<NegativePick> picks = select_negative_chips(
        residual, canvas, spec.range, candidates, params.min_proposals, params.coverage);
    for (const auto& pick : picks) {
      const Box& chip = candidates[static_cast<std::size_t>(pick.candidate)];
      ChipRecord rec;
      rec.image_id = image.id;
      rec.scale_index = spec.index;
      rec.kind = ChipKind::kNegative;
      rec.flipped = image.flipped;
      rec.rect_canvas = chip;
      rec.rect_original = scale_box(chip, 1.0 / canvas.factor);
      rec.n_proposals = pick.count;
      rec.gts = attach_gts(chip, gts, canvas, spec.range);
      pool.chips.push_back(std::move(rec));
    }
  }
  std::sort(pool.chips.begin(), pool.chips.end(), record_less);
  return pool;
}

std::vector<ChipRecord> sample_negatives(const NegativePool& pool, int n_max, int epoch,
                                         std::uint64_t seed) {
  if (n_max <= 0 || pool.chips.empty()) return {};
  const std::size_t n = pool.chips.size();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(n_max), n);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(epoch),
                   static_cast<std::uint64_t>(pool.image_id)));
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.bounded(n - i);
    std::swap(order[i], order[j]);
  }
  order.resize(k);
  std::sort(order.begin(), order.end());  // canonical output order

  std::vector<ChipRecord> out;
  out.reserve(k);
  for (std::size_t i : order) out.push_back(pool.chips[i]);
  return out;
}

}  // namespace chipforge
