#include "chipforge/synth.hpp"

#include <algorithm>
#include <cmath>

#include "chipforge/rng.hpp"

namespace chipforge {
namespace {

constexpr std::uint64_t kSynthStream = 0x53594e5448ull;

int poisson(Rng& rng, double mean) {
  // Knuth; fine for the small means used here.
  const double limit = std::exp(-mean);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.next_double();
  } while (p > limit);
  return k - 1;
}

Box random_box(Rng& rng, const SynthParams& p, int img_w, int img_h) {
  const double side =
      std::exp(rng.uniform(std::log(p.min_side), std::log(p.max_side)));
  const double aspect =
      std::exp(rng.uniform(-std::log(p.max_aspect), std::log(p.max_aspect)));
  const double sa = std::sqrt(aspect);
  double bw = std::clamp(side * sa, 2.0, img_w - 2.0);
  double bh = std::clamp(side / sa, 2.0, img_h - 2.0);
  const double x = rng.uniform(0.0, img_w - bw);
  const double y = rng.uniform(0.0, img_h - bh);
  return Box{x, y, bw, bh};
}

}  // namespace

SynthImage synth_image(const SynthParams& params, std::uint64_t seed, int index) {
  SynthImage out;
  Rng rng(mix_seed(seed, kSynthStream, static_cast<std::uint64_t>(index)));
  Image& im = out.image;
  im.id = index + 1;
  im.width = params.min_width +
             static_cast<int>(rng.bounded(
                 static_cast<std::uint64_t>(params.max_width - params.min_width + 1)));
  im.height = params.min_height +
              static_cast<int>(rng.bounded(
                  static_cast<std::uint64_t>(params.max_height - params.min_height + 1)));
  char name[32];
  std::snprintf(name, sizeof(name), "synth_%06d.jpg", index + 1);
  im.file_name = name;

  const int n_boxes = std::min(poisson(rng, params.mean_boxes), params.max_boxes);
  for (int k = 0; k < n_boxes; ++k) {
    GroundTruth g;
    g.id = im.id * 1000 + k;
    g.image_id = im.id;
    g.box = random_box(rng, params, im.width, im.height);
    g.category = 1 + static_cast<int>(rng.bounded(80));
    g.is_crowd = rng.next_double() < params.crowd_rate;
    out.gts.push_back(g);

    Proposal prop;
    prop.image_id = im.id;
    prop.box = g.box;
    prop.score = 0.5 + 0.5 * rng.next_double();
    out.proposals.push_back(std::move(prop));
  }

  const int n_noise = params.noise_rate > 0.0 ? poisson(rng, params.noise_rate) : 0;
  for (int k = 0; k < n_noise; ++k) {
    // background: keep the center out of every ground-truth box
    for (int attempt = 0; attempt < 8; ++attempt) {
      const Box b = random_box(rng, params, im.width, im.height);
      bool clear = true;
      for (const auto& g : out.gts)
        if (contains_point(g.box, b.cx(), b.cy())) {
          clear = false;
          break;
        }
      if (!clear) continue;
      Proposal prop;
      prop.image_id = im.id;
      prop.box = b;
      prop.score = rng.next_double();
      out.proposals.push_back(std::move(prop));
      break;
    }
  }
  return out;
}

SynthScenes synth_scenes(const SynthParams& params, std::uint64_t seed) {
  SynthScenes out;
  for (int i = 0; i < params.n_images; ++i) {
    SynthImage scene = synth_image(params, seed, i);
    if (!scene.proposals.empty())
      out.proposals[scene.image.id] = std::move(scene.proposals);
    for (auto& g : scene.gts) out.ds.annotations.push_back(std::move(g));
    out.ds.images.push_back(std::move(scene.image));
  }
  out.ds.sort_canonical();
  return out;
}

}  // namespace chipforge
