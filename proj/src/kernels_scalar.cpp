// Reference kernels. Every SIMD variant is equivalence-tested against these
// for exact bit equality, so the arithmetic here is written in the clamped
// branch-free form the vector lanes evaluate.

#include <algorithm>

#include "chipforge/kernels.hpp"

namespace chipforge::kernels {
namespace {

void enclosing_rects_mask_scalar(const RectSoa& rects, const Box& inner,
                                 std::uint64_t* out_words) {
  const std::size_t n = rects.size();
  std::fill(out_words, out_words + mask_words(n), 0ull);
  const double bx1 = inner.x;
  const double by1 = inner.y;
  const double bx2 = inner.x + inner.w;
  const double by2 = inner.y + inner.h;
  for (std::size_t i = 0; i < n; ++i) {
    const bool in = rects.x1[i] <= bx1 && rects.y1[i] <= by1 && bx2 <= rects.x2[i] &&
                    by2 <= rects.y2[i];
    if (in) out_words[i >> 6] |= 1ull << (i & 63);
  }
}

void rects_containing_point_scalar(const RectSoa& rects, double px, double py,
                                   std::uint64_t* out_words) {
  const std::size_t n = rects.size();
  std::fill(out_words, out_words + mask_words(n), 0ull);
  for (std::size_t i = 0; i < n; ++i) {
    const bool in = rects.x1[i] <= px && px <= rects.x2[i] && rects.y1[i] <= py &&
                    py <= rects.y2[i];
    if (in) out_words[i >> 6] |= 1ull << (i & 63);
  }
}

void iou_many_vs_one_scalar(const RectSoa& rects, const Box& q, double* out) {
  const std::size_t n = rects.size();
  const double qx1 = q.x;
  const double qy1 = q.y;
  const double qx2 = q.x + q.w;
  const double qy2 = q.y + q.h;
  const double qarea = (qx2 - qx1) * (qy2 - qy1);
  for (std::size_t i = 0; i < n; ++i) {
    const double iw =
        std::max(0.0, std::min(qx2, rects.x2[i]) - std::max(qx1, rects.x1[i]));
    const double ih =
        std::max(0.0, std::min(qy2, rects.y2[i]) - std::max(qy1, rects.y1[i]));
    const double inter = iw * ih;
    const double area = (rects.x2[i] - rects.x1[i]) * (rects.y2[i] - rects.y1[i]);
    out[i] = inter / (qarea + area - inter);
  }
}

void points_in_rect_mask_scalar(const Box& rect, const double* xs, const double* ys,
                                std::size_t n, std::uint64_t* out_words) {
  std::fill(out_words, out_words + mask_words(n), 0ull);
  const double rx1 = rect.x;
  const double ry1 = rect.y;
  const double rx2 = rect.x + rect.w;
  const double ry2 = rect.y + rect.h;
  for (std::size_t i = 0; i < n; ++i) {
    const bool in = rx1 <= xs[i] && xs[i] <= rx2 && ry1 <= ys[i] && ys[i] <= ry2;
    if (in) out_words[i >> 6] |= 1ull << (i & 63);
  }
}

}  // namespace

namespace detail {
const KernelTable kScalarTable = {
    enclosing_rects_mask_scalar,
    rects_containing_point_scalar,
    iou_many_vs_one_scalar,
    points_in_rect_mask_scalar,
    "scalar",
};
}  // namespace detail

}  // namespace chipforge::kernels
