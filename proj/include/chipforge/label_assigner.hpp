#pragma once

#include <array>
#include <span>
#include <vector>

#include "chipforge/pyramid.hpp"
#include "chipforge/records.hpp"

namespace chipforge {

struct ProposalLabelParams {
  double iou_pos = 0.5;  // strictly-greater threshold for a positive match
};

struct AnchorLabelParams {
  double iou_pos = 0.7;
  double iou_neg = 0.3;
  double iou_invalid = 0.3;  // overlap with an invalid GT that invalidates
};

// Log-space center/size box regression parameterization.
std::array<double, 4> regression_targets(const Box& proposal, const Box& gt);
// Inverse transform; apply_regression(p, regression_targets(p, g)) == g.
Box apply_regression(const Box& proposal, const std::array<double, 4>& t);

// Labels proposals (chip-local coordinates) against the chip's retained
// ground truth. A proposal whose back-projected original-coordinate area
// falls outside the scale's range is Ignore; otherwise it matches the
// highest-IoU ground truth, valid or invalid (ties: lowest gt id), and is
// Positive only when that overlap strictly exceeds iou_pos. Crowd regions
// never produce positives; overlapping one above the threshold yields
// Ignore. proposal_index is the position in the input span; throws
// MalformedInputError for proposals outside the chip frame.
std::vector<ProposalLabel> assign_proposal_labels(std::span<const Box> proposals_chip,
                                                  const ChipRecord& chip,
                                                  const ScaleSpec& spec,
                                                  double canvas_factor,
                                                  const ProposalLabelParams& params = {});

// Anchor rules: max IoU against valid GTs >= iou_pos is Positive,
// < iou_neg is Negative, otherwise Ignore; the best anchor of an otherwise
// unmatched valid GT is promoted to Positive; finally any anchor with
// IoU >= iou_invalid against an invalid GT becomes Ignore regardless.
std::vector<AnchorLabel> assign_anchor_labels(std::span<const Box> anchors_chip,
                                              const ChipRecord& chip,
                                              const AnchorLabelParams& params = {});

}  // namespace chipforge
