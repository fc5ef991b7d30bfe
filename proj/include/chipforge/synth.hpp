#pragma once

#include <cstdint>

#include "chipforge/dataset.hpp"

namespace chipforge {

// Synthetic-scene generation: COCO-shaped images with log-uniform box sizes
// (small-heavy, like detection datasets), every ground truth echoed as a
// proposal, plus background noise proposals.
struct SynthParams {
  int n_images = 100;
  int min_width = 400;
  int max_width = 640;
  int min_height = 300;
  int max_height = 640;
  double mean_boxes = 7.0;   // Poisson mean, truncated at max_boxes
  int max_boxes = 30;
  double min_side = 12.0;    // sqrt-area bounds, log-uniform
  double max_side = 400.0;
  double max_aspect = 3.0;   // w/h within [1/a, a]
  double crowd_rate = 0.02;
  double noise_rate = 3.0;   // Poisson mean of background proposals
};

struct SynthScenes {
  Dataset ds;
  ProposalMap proposals;
};

struct SynthImage {
  Image image;
  std::vector<GroundTruth> gts;
  std::vector<Proposal> proposals;
};

// One image's scene, deterministic in (params, seed, index). Image ids are
// index + 1.
SynthImage synth_image(const SynthParams& params, std::uint64_t seed, int index);

// Whole corpus; each image derives its own stream, so generation order
// never matters.
SynthScenes synth_scenes(const SynthParams& params, std::uint64_t seed);

}  // namespace chipforge
