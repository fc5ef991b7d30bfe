// AVX2 kernel variants, 4 doubles per lane. This translation unit is compiled
// with -mavx2 and must only be entered through the dispatch table after the
// CPU check, so nothing here may run at static-init time.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "chipforge/kernels.hpp"

namespace chipforge::kernels {
namespace {

void enclosing_rects_mask_avx2(const RectSoa& rects, const Box& inner,
                               std::uint64_t* out_words) {
  const std::size_t n = rects.size();
  const std::size_t nw = mask_words(n);
  for (std::size_t w = 0; w < nw; ++w) out_words[w] = 0;

  const double* x1 = rects.x1.data();
  const double* y1 = rects.y1.data();
  const double* x2 = rects.x2.data();
  const double* y2 = rects.y2.data();

  const __m256d bx1 = _mm256_set1_pd(inner.x);
  const __m256d by1 = _mm256_set1_pd(inner.y);
  const __m256d bx2 = _mm256_set1_pd(inner.x + inner.w);
  const __m256d by2 = _mm256_set1_pd(inner.y + inner.h);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d c0 = _mm256_cmp_pd(_mm256_loadu_pd(x1 + i), bx1, _CMP_LE_OQ);
    const __m256d c1 = _mm256_cmp_pd(_mm256_loadu_pd(y1 + i), by1, _CMP_LE_OQ);
    const __m256d c2 = _mm256_cmp_pd(bx2, _mm256_loadu_pd(x2 + i), _CMP_LE_OQ);
    const __m256d c3 = _mm256_cmp_pd(by2, _mm256_loadu_pd(y2 + i), _CMP_LE_OQ);
    const __m256d all = _mm256_and_pd(_mm256_and_pd(c0, c1), _mm256_and_pd(c2, c3));
    const std::uint64_t bits = static_cast<std::uint64_t>(_mm256_movemask_pd(all));
    out_words[i >> 6] |= bits << (i & 63);
  }
  for (; i < n; ++i) {
    const bool in = x1[i] <= inner.x && y1[i] <= inner.y && inner.x + inner.w <= x2[i] &&
                    inner.y + inner.h <= y2[i];
    if (in) out_words[i >> 6] |= 1ull << (i & 63);
  }
}

void rects_containing_point_avx2(const RectSoa& rects, double px, double py,
                                 std::uint64_t* out_words) {
  const std::size_t n = rects.size();
  const std::size_t nw = mask_words(n);
  for (std::size_t w = 0; w < nw; ++w) out_words[w] = 0;

  const double* x1 = rects.x1.data();
  const double* y1 = rects.y1.data();
  const double* x2 = rects.x2.data();
  const double* y2 = rects.y2.data();

  const __m256d pxv = _mm256_set1_pd(px);
  const __m256d pyv = _mm256_set1_pd(py);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d c0 = _mm256_cmp_pd(_mm256_loadu_pd(x1 + i), pxv, _CMP_LE_OQ);
    const __m256d c1 = _mm256_cmp_pd(pxv, _mm256_loadu_pd(x2 + i), _CMP_LE_OQ);
    const __m256d c2 = _mm256_cmp_pd(_mm256_loadu_pd(y1 + i), pyv, _CMP_LE_OQ);
    const __m256d c3 = _mm256_cmp_pd(pyv, _mm256_loadu_pd(y2 + i), _CMP_LE_OQ);
    const __m256d all = _mm256_and_pd(_mm256_and_pd(c0, c1), _mm256_and_pd(c2, c3));
    const std::uint64_t bits = static_cast<std::uint64_t>(_mm256_movemask_pd(all));
    out_words[i >> 6] |= bits << (i & 63);
  }
  for (; i < n; ++i) {
    const bool in = x1[i] <= px && px <= x2[i] && y1[i] <= py && py <= y2[i];
    if (in) out_words[i >> 6] |= 1ull << (i & 63);
  }
}

void iou_many_vs_one_avx2(const RectSoa& rects, const Box& q, double* out) {
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

  const __m256d qx1 = _mm256_set1_pd(qx1s);
  const __m256d qy1 = _mm256_set1_pd(qy1s);
  const __m256d qx2 = _mm256_set1_pd(qx2s);
  const __m256d qy2 = _mm256_set1_pd(qy2s);
  const __m256d qarea = _mm256_set1_pd(qareas);
  const __m256d zero = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d rx1 = _mm256_loadu_pd(x1 + i);
    const __m256d ry1 = _mm256_loadu_pd(y1 + i);
    const __m256d rx2 = _mm256_loadu_pd(x2 + i);
    const __m256d ry2 = _mm256_loadu_pd(y2 + i);
    const __m256d iw = _mm256_max_pd(
        zero, _mm256_sub_pd(_mm256_min_pd(qx2, rx2), _mm256_max_pd(qx1, rx1)));
    const __m256d ih = _mm256_max_pd(
        zero, _mm256_sub_pd(_mm256_min_pd(qy2, ry2), _mm256_max_pd(qy1, ry1)));
    const __m256d inter = _mm256_mul_pd(iw, ih);
    const __m256d area =
        _mm256_mul_pd(_mm256_sub_pd(rx2, rx1), _mm256_sub_pd(ry2, ry1));
    const __m256d uni = _mm256_sub_pd(_mm256_add_pd(qarea, area), inter);
    _mm256_storeu_pd(out + i, _mm256_div_pd(inter, uni));
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

void points_in_rect_mask_avx2(const Box& rect, const double* xs, const double* ys,
                              std::size_t n, std::uint64_t* out_words) {
  const std::size_t nw = mask_words(n);
  for (std::size_t w = 0; w < nw; ++w) out_words[w] = 0;

  const double rx1s = rect.x;
  const double ry1s = rect.y;
  const double rx2s = rect.x + rect.w;
  const double ry2s = rect.y + rect.h;

  const __m256d rx1 = _mm256_set1_pd(rx1s);
  const __m256d ry1 = _mm256_set1_pd(ry1s);
  const __m256d rx2 = _mm256_set1_pd(rx2s);
  const __m256d ry2 = _mm256_set1_pd(ry2s);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d px = _mm256_loadu_pd(xs + i);
    const __m256d py = _mm256_loadu_pd(ys + i);
    const __m256d c0 = _mm256_cmp_pd(rx1, px, _CMP_LE_OQ);
    const __m256d c1 = _mm256_cmp_pd(px, rx2, _CMP_LE_OQ);
    const __m256d c2 = _mm256_cmp_pd(ry1, py, _CMP_LE_OQ);
    const __m256d c3 = _mm256_cmp_pd(py, ry2, _CMP_LE_OQ);
    const __m256d all = _mm256_and_pd(_mm256_and_pd(c0, c1), _mm256_and_pd(c2, c3));
    const std::uint64_t bits = static_cast<std::uint64_t>(_mm256_movemask_pd(all));
    out_words[i >> 6] |= bits << (i & 63);
  }
  for (; i < n; ++i) {
    const bool in = rx1s <= xs[i] && xs[i] <= rx2s && ry1s <= ys[i] && ys[i] <= ry2s;
    if (in) out_words[i >> 6] |= 1ull << (i & 63);
  }
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table = {
    enclosing_rects_mask_avx2,
    rects_containing_point_avx2,
    iou_many_vs_one_avx2,
    points_in_rect_mask_avx2,
    "avx2",
};
}  // namespace detail

}  // namespace chipforge::kernels

#endif  // x86_64
