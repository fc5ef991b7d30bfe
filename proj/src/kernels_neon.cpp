// NEON kernel variants, 2 doubles per lane. ASIMD is mandatory on aarch64 so
// no runtime feature check is needed beyond the architecture itself.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "chipforge/kernels.hpp"

namespace chipforge::kernels {
namespace {

inline std::uint64_t lane_bits(uint64x2_t m) {
  return (vgetq_lane_u64(m, 0) & 1ull) | ((vgetq_lane_u64(m, 1) & 1ull) << 1);
}

void enclosing_rects_mask_neon(const RectSoa& rects, const Box& inner,
                               std::uint64_t* out_words) {
  const std::size_t n = rects.size();
  const std::size_t nw = mask_words(n);
  for (std::size_t w = 0; w < nw; ++w) out_words[w] = 0;

  const double* x1 = rects.x1.data();
  const double* y1 = rects.y1.data();
  const double* x2 = rects.x2.data();
  const double* y2 = rects.y2.data();

  const float64x2_t bx1 = vdupq_n_f64(inner.x);
  const float64x2_t by1 = vdupq_n_f64(inner.y);
  const float64x2_t bx2 = vdupq_n_f64(inner.x + inner.w);
  const float64x2_t by2 = vdupq_n_f64(inner.y + inner.h);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t c0 = vcleq_f64(vld1q_f64(x1 + i), bx1);
    const uint64x2_t c1 = vcleq_f64(vld1q_f64(y1 + i), by1);
    const uint64x2_t c2 = vcleq_f64(bx2, vld1q_f64(x2 + i));
    const uint64x2_t c3 = vcleq_f64(by2, vld1q_f64(y2 + i));
    const uint64x2_t all = vandq_u64(vandq_u64(c0, c1), vandq_u64(c2, c3));
    out_words[i >> 6] |= lane_bits(all) << (i & 63);
  }
  for (; i < n; ++i) {
    const bool in = x1[i] <= inner.x && y1[i] <= inner.y && inner.x + inner.w <= x2[i] &&
                    inner.y + inner.h <= y2[i];
    if (in) out_words[i >> 6] |= 1ull << (i & 63);
  }
}

void rects_containing_point_neon(const RectSoa& rects, double px, double py,
                                 std::uint64_t* out_words) {
  const std::size_t n = rects.size();
  const std::size_t nw = mask_words(n);
  for (std::size_t w = 0; w < nw; ++w) out_words[w] = 0;

  const double* x1 = rects.x1.data();
  const double* y1 = rects.y1.data();
  const double* x2 = rects.x2.data();
  const double* y2 = rects.y2.data();

  const float64x2_t pxv = vdupq_n_f64(px);
  const float64x2_t pyv = vdupq_n_f64(py);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t c0 = vcleq_f64(vld1q_f64(x1 + i), pxv);
    const uint64x2_t c1 = vcleq_f64(pxv, vld1q_f64(x2 + i));
    const uint64x2_t c2 = vcleq_f64(vld1q_f64(y1 + i), pyv);
    const uint64x2_t c3 = vcleq_f64(pyv, vld1q_f64(y2 + i));
    const uint64x2_t all = vandq_u64(vandq_u64(c0, c1), vandq_u64(c2, c3));
    out_words[i >> 6] |= lane_bits(all) << (i & 63);
  }
  for (; i < n; ++i) {
    const bool in = x1[i] <= px && px <= x2[i] && y1[i] <= py && py <= y2[i];
    if (in) out_words[i >> 6] |= 1ull << (i & 63);
  }
}

void iou_many_vs_one_neon(const RectSoa& rects, const Box& q, double* out) {
  const std::size_t n = rects.size();
  const double* x1 = rects.x1.data();
  const double* y1 = rects.y1.data();
  const double* x2 = rects.x2.data();
  const double* y2 = rects.y2.data();

  const double qx1s = q.x;
  const double qy1s = q.y;
  const double qx2s = q.x + q.w;
  const double qy2s = q.y + q.h;
  const double qareas = (qx2s - qx1s) * (qy2s - qy1s);

  const float64x2_t qx1 = vdupq_n_f64(qx1s);
  const float64x2_t qy1 = vdupq_n_f64(qy1s);
  const float64x2_t qx2 = vdupq_n_f64(qx2s);
  const float64x2_t qy2 = vdupq_n_f64(qy2s);
  const float64x2_t qarea = vdupq_n_f64(qareas);
  const float64x2_t zero = vdupq_n_f64(0.0);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t rx1 = vld1q_f64(x1 + i);
    const float64x2_t ry1 = vld1q_f64(y1 + i);
    const float64x2_t rx2 = vld1q_f64(x2 + i);
    const float64x2_t ry2 = vld1q_f64(y2 + i);
    const float64x2_t iw =
        vmaxq_f64(zero, vsubq_f64(vminq_f64(qx2, rx2), vmaxq_f64(qx1, rx1)));
    const float64x2_t ih =
        vmaxq_f64(zero, vsubq_f64(vminq_f64(qy2, ry2), vmaxq_f64(qy1, ry1)));
    const float64x2_t inter = vmulq_f64(iw, ih);
    const float64x2_t area = vmulq_f64(vsubq_f64(rx2, rx1), vsubq_f64(ry2, ry1));
    const float64x2_t uni = vsubq_f64(vaddq_f64(qarea, area), inter);
    vst1q_f64(out + i, vdivq_f64(inter, uni));
  }
  for (; i < n; ++i) {
    const double iw =
        std::max(0.0, std::min(qx2s, x2[i]) - std::max(qx1s, x1[i]));
    const double ih =
        std::max(0.0, std::min(qy2s, y2[i]) - std::max(qy1s, y1[i]));
    const double inter = iw * ih;
    const double area = (x2[i] - x1[i]) * (y2[i] - y1[i]);
    out[i] = inter / (qareas + area - inter);
  }
}

void points_in_rect_mask_neon(const Box& rect, const double* xs, const double* ys,
                              std::size_t n, std::uint64_t* out_words) {
  const std::size_t nw = mask_words(n);
  for (std::size_t w = 0; w < nw; ++w) out_words[w] = 0;

  const double rx1s = rect.x;
  const double ry1s = rect.y;
  const double rx2s = rect.x + rect.w;
  const double ry2s = rect.y + rect.h;

  const float64x2_t rx1 = vdupq_n_f64(rx1s);
  const float64x2_t ry1 = vdupq_n_f64(ry1s);
  const float64x2_t rx2 = vdupq_n_f64(rx2s);
  const float64x2_t ry2 = vdupq_n_f64(ry2s);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t px = vld1q_f64(xs + i);
    const float64x2_t py = vld1q_f64(ys + i);
    const uint64x2_t c0 = vcleq_f64(rx1, px);
    const uint64x2_t c1 = vcleq_f64(px, rx2);
    const uint64x2_t c2 = vcleq_f64(ry1, py);
    const uint64x2_t c3 = vcleq_f64(py, ry2);
    const uint64x2_t all = vandq_u64(vandq_u64(c0, c1), vandq_u64(c2, c3));
    out_words[i >> 6] |= lane_bits(all) << (i & 63);
  }
  for (; i < n; ++i) {
    const bool in = rx1s <= xs[i] && xs[i] <= rx2s && ry1s <= ys[i] && ys[i] <= ry2s;
    if (in) out_words[i >> 6] |= 1ull << (i & 63);
  }
}

}  // namespace

namespace detail {
const KernelTable kNeonTable = {
    enclosing_rects_mask_neon,
    rects_containing_point_neon,
    iou_many_vs_one_neon,
    points_in_rect_mask_neon,
    "neon",
};
}  // namespace detail

}  // namespace chipforge::kernels

#endif  // aarch64
