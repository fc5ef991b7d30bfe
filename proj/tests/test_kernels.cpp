#include <doctest.h>

#include <bit>
#include <vector>

#include "chipforge/box.hpp"
#include "chipforge/kernels.hpp"
#include "chipforge/rng.hpp"

using namespace chipforge;
namespace k = chipforge::kernels;

namespace {

// Boxes on a coarse half-pixel lattice so shared edges and exact boundary
// coincidences occur constantly; that is where a sloppy SIMD port would
// diverge from the scalar reference.
Box lattice_box(Rng& rng) {
  const double x = 0.5 * static_cast<double>(rng.bounded(200));
  const double y = 0.5 * static_cast<double>(rng.bounded(200));
  const double w = 0.5 * static_cast<double>(1 + rng.bounded(100));
  const double h = 0.5 * static_cast<double>(1 + rng.bounded(100));
  return Box{x, y, w, h};
}

k::RectSoa random_soa(Rng& rng, std::size_t n) {
  k::RectSoa soa;
  soa.reserve(n);
  for (std::size_t i = 0; i < n; ++i) soa.push(lattice_box(rng));
  return soa;
}

std::vector<k::Backend> available_backends() {
  std::vector<k::Backend> out{k::Backend::kScalar};
  if (k::backend_available(k::Backend::kAvx2)) out.push_back(k::Backend::kAvx2);
  if (k::backend_available(k::Backend::kNeon)) out.push_back(k::Backend::kNeon);
  return out;
}

}  // namespace

TEST_CASE("every available backend matches the scalar reference exactly") {
  const auto& scalar = k::table_for(k::Backend::kScalar);
  Rng rng(101);

  for (k::Backend be : available_backends()) {
    const auto& table = k::table_for(be);
    CAPTURE(k::backend_name(be));

    // sizes straddle the SIMD width and word boundaries
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 63u, 64u, 65u, 130u, 400u}) {
      const k::RectSoa soa = random_soa(rng, n);
      const Box probe = lattice_box(rng);
      const std::size_t nw = k::mask_words(n);

      std::vector<std::uint64_t> want(nw + 1, ~0ull), got(nw + 1, ~0ull);
      scalar.enclosing_rects_mask(soa, probe, want.data());
      table.enclosing_rects_mask(soa, probe, got.data());
      for (std::size_t w = 0; w < nw; ++w) CHECK(want[w] == got[w]);

      const double px = 0.5 * static_cast<double>(rng.bounded(260));
      const double py = 0.5 * static_cast<double>(rng.bounded(260));
      scalar.rects_containing_point(soa, px, py, want.data());
      table.rects_containing_point(soa, px, py, got.data());
      for (std::size_t w = 0; w < nw; ++w) CHECK(want[w] == got[w]);

      std::vector<double> want_iou(n, -1.0), got_iou(n, -1.0);
      scalar.iou_many_vs_one(soa, probe, want_iou.data());
      table.iou_many_vs_one(soa, probe, got_iou.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(want_iou[i] == got_iou[i]);

      std::vector<double> xs(n), ys(n);
      for (std::size_t i = 0; i < n; ++i) {
        xs[i] = 0.5 * static_cast<double>(rng.bounded(260));
        ys[i] = 0.5 * static_cast<double>(rng.bounded(260));
      }
      scalar.points_in_rect_mask(probe, xs.data(), ys.data(), n, want.data());
      table.points_in_rect_mask(probe, xs.data(), ys.data(), n, got.data());
      for (std::size_t w = 0; w < nw; ++w) CHECK(want[w] == got[w]);
    }
  }
}

TEST_CASE("kernels agree with the plain geometry predicates") {
  Rng rng(102);
  const std::size_t n = 150;
  const k::RectSoa soa = random_soa(rng, n);
  const std::size_t nw = k::mask_words(n);
  std::vector<std::uint64_t> mask(nw);

  for (int trial = 0; trial < 50; ++trial) {
    const Box probe = lattice_box(rng);

    k::enclosing_rects_mask(soa, probe, mask.data());
    for (std::size_t i = 0; i < n; ++i) {
      const bool bit = (mask[i >> 6] >> (i & 63)) & 1;
      CHECK(bit == encloses(soa.box_at(i), probe));
    }

    std::vector<double> ious(n);
    k::iou_many_vs_one(soa, probe, ious.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(ious[i] == iou(soa.box_at(i), probe));

    const double px = 0.5 * static_cast<double>(rng.bounded(260));
    const double py = 0.5 * static_cast<double>(rng.bounded(260));
    k::rects_containing_point(soa, px, py, mask.data());
    for (std::size_t i = 0; i < n; ++i) {
      const bool bit = (mask[i >> 6] >> (i & 63)) & 1;
      CHECK(bit == contains_point(soa.box_at(i), px, py));
    }
  }
}

TEST_CASE("mask trailing bits beyond n are zero") {
  Rng rng(103);
  for (std::size_t n : {1u, 5u, 63u, 65u, 100u}) {
    const k::RectSoa soa = random_soa(rng, n);
    // probe enclosed by everything so all defined bits are set
    const Box probe{1e5, 1e5, 1, 1};
    k::RectSoa wide;
    for (std::size_t i = 0; i < n; ++i) wide.push(Box{0, 0, 2e5, 2e5});
    std::vector<std::uint64_t> mask(k::mask_words(n), ~0ull);
    k::enclosing_rects_mask(wide, probe, mask.data());
    std::size_t set = 0;
    for (auto w : mask) set += static_cast<std::size_t>(std::popcount(w));
    CHECK(set == n);
  }
}

TEST_CASE("backend forcing round-trips") {
  const k::Backend original = k::active_backend();
  k::force_backend(k::Backend::kScalar);
  CHECK(k::active_backend() == k::Backend::kScalar);
  CHECK(k::active().name == std::string("scalar"));
  k::force_backend(original);
  CHECK(k::active_backend() == original);
}
