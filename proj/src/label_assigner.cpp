#include "chipforge/label_assigner.hpp"

#include <cmath>
#include <limits>

#include "chipforge/errors.hpp"
#include "chipforge/kernels.hpp"

namespace chipforge {

std::array<double, 4> regression_targets(const Box& proposal, const Box& gt) {
  return {
      (gt.cx() - proposal.cx()) / proposal.w,
      (gt.cy() - proposal.cy()) / proposal.h,
      std::log(gt.w / proposal.w),
      std::log(gt.h / proposal.h),
  };
}

Box apply_regression(const Box& proposal, const std::array<double, 4>& t) {
  const double cx = proposal.cx() + t[0] * proposal.w;
  const double cy = proposal.cy() + t[1] * proposal.h;
  const double w = proposal.w * std::exp(t[2]);
  const double h = proposal.h * std::exp(t[3]);
  return Box{cx - w / 2.0, cy - h / 2.0, w, h};
}

std::vector<ProposalLabel> assign_proposal_labels(std::span<const Box> proposals_chip,
                                                  const ChipRecord& chip,
                                                  const ScaleSpec& spec,
                                                  double canvas_factor,
                                                  const ProposalLabelParams& params) {
  const double k_w = chip.rect_canvas.w;
  const double k_h = chip.rect_canvas.h;
  const std::size_t n = proposals_chip.size();

  for (std::size_t i = 0; i < n; ++i) {
    const Box& p = proposals_chip[i];
    if (!(p.x >= 0.0 && p.y >= 0.0 && p.x2() <= k_w && p.y2() <= k_h))
      throw MalformedInputError("proposal " + std::to_string(i) +
                                " lies outside the chip frame");
  }

  kernels::RectSoa props_soa;
  props_soa.reserve(n);
  for (const auto& p : proposals_chip) props_soa.push(p);

  // Best non-crowd match per proposal (gts are id-sorted, strict > keeps
  // the lowest id on ties) and best crowd overlap separately.
  std::vector<double> best_iou(n, 0.0);
  std::vector<int> best_gt(n, -1);
  std::vector<double> crowd_iou(n, 0.0);
  std::vector<double> row(n);
  for (std::size_t g = 0; g < chip.gts.size(); ++g) {
    const ChipGt& cg = chip.gts[g];
    if (n == 0) break;
    kernels::iou_many_vs_one(props_soa, cg.box, row.data());
    for (std::size_t i = 0; i < n; ++i) {
      if (cg.is_crowd) {
        if (row[i] > crowd_iou[i]) crowd_iou[i] = row[i];
      } else if (row[i] > best_iou[i]) {
        best_iou[i] = row[i];
        best_gt[i] = static_cast<int>(g);
      }
    }
  }

  const double inv = 1.0 / canvas_factor;
  std::vector<ProposalLabel> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    ProposalLabel& lab = out[i];
    lab.proposal_index = static_cast<int>(i);
    lab.box_chip = proposals_chip[i];

    const Box original = scale_box(proposals_chip[i], inv);
    if (!spec.range.contains_area(original.area())) {
      lab.label = LabelKind::kIgnore;
      continue;
    }
    if (best_gt[i] >= 0 && best_iou[i] > params.iou_pos) {
      const ChipGt& cg = chip.gts[static_cast<std::size_t>(best_gt[i])];
      lab.label = LabelKind::kPositive;
      lab.category = cg.category;
      lab.matched_gt = cg.gt_id;
      lab.target = regression_targets(proposals_chip[i], cg.box);
      continue;
    }
    // A proposal sitting on a crowd region is neither signal nor background.
    lab.label = crowd_iou[i] > params.iou_pos ? LabelKind::kIgnore : LabelKind::kNegative;
  }
  return out;
}

std::vector<AnchorLabel> assign_anchor_labels(std::span<const Box> anchors_chip,
                                              const ChipRecord& chip,
                                              const AnchorLabelParams& params) {
  if (!(0.0 <= params.iou_neg && params.iou_neg <= params.iou_pos && params.iou_pos <= 1.0))
    throw MalformedInputError("anchor thresholds must satisfy 0 <= iou_neg <= iou_pos <= 1");
  if (!(0.0 <= params.iou_invalid && params.iou_invalid <= 1.0))
    throw MalformedInputError("iou_invalid must lie in [0,1]");

  const std::size_t n = anchors_chip.size();
  kernels::RectSoa anchor_soa;
  anchor_soa.reserve(n);
  for (const auto& a : anchors_chip) anchor_soa.push(a);

  std::vector<double> valid_iou(n, 0.0);
  std::vector<double> invalid_iou(n, 0.0);
  std::vector<double> row(n);

  // Track each valid GT's best anchor for the promotion rule.
  struct GtBest {
    double iou = 0.0;
    int anchor = -1;
  };
  std::vector<GtBest> gt_best;

  for (const ChipGt& cg : chip.gts) {
    if (n == 0) break;
    kernels::iou_many_vs_one(anchor_soa, cg.box, row.data());
    if (cg.valid) {
      GtBest best;
      for (std::size_t i = 0; i < n; ++i) {
        if (row[i] > valid_iou[i]) valid_iou[i] = row[i];
        if (row[i] > best.iou) {  // strict: ties keep the lowest anchor index
          best.iou = row[i];
          best.anchor = static_cast<int>(i);
        }
      }
      gt_best.push_back(best);
    } else {
      for (std::size_t i = 0; i < n; ++i)
        if (row[i] > invalid_iou[i]) invalid_iou[i] = row[i];
    }
  }

  std::vector<AnchorLabel> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].anchor_index = static_cast<int>(i);
    if (valid_iou[i] >= params.iou_pos)
      out[i].label = LabelKind::kPositive;
    else if (valid_iou[i] < params.iou_neg)
      out[i].label = LabelKind::kNegative;
    else
      out[i].label = LabelKind::kIgnore;
  }

  // Promote the best anchor of any valid GT left without a positive match.
  for (const GtBest& best : gt_best) {
    if (best.anchor < 0 || best.iou <= 0.0) continue;
    if (best.iou < params.iou_pos)
      out[static_cast<std::size_t>(best.anchor)].label = LabelKind::kPositive;
  }

  // Invalidation dominates everything assigned above.
  for (std::size_t i = 0; i < n; ++i)
    if (invalid_iou[i] >= params.iou_invalid) out[i].label = LabelKind::kIgnore;

  return out;
}

}  // namespace chipforge
