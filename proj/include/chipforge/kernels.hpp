#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chipforge/box.hpp"

namespace chipforge::kernels {

// Structure-of-arrays rectangle storage for the batched kernels. Edges are
// precomputed once (x2 = x + w) so every backend sees identical operands.
struct RectSoa {
  std::vector<double> x1, y1, x2, y2;

  std::size_t size() const { return x1.size(); }
  bool empty() const { return x1.empty(); }

  void reserve(std::size_t n) {
    x1.reserve(n);
    y1.reserve(n);
    x2.reserve(n);
    y2.reserve(n);
  }

  void push(const Box& b) {
    x1.push_back(b.x);
    y1.push_back(b.y);
    x2.push_back(b.x + b.w);
    y2.push_back(b.y + b.h);
  }

  Box box_at(std::size_t i) const {
    return Box{x1[i], y1[i], x2[i] - x1[i], y2[i] - y1[i]};
  }
};

inline std::size_t mask_words(std::size_t n) { return (n + 63) / 64; }

// Batched predicates over a rect array. Bit i of the output refers to
// rect i; trailing bits of the last word are zero. All variants of a kernel
// are required to produce bit-identical output (tested), so the caller never
// needs to know which backend ran.
//
//   enclosing_rects_mask:     bit set iff rects[i] encloses `inner`
//                             (boundary-inclusive).
//   rects_containing_point:   bit set iff (px,py) lies in rects[i],
//                             edges inclusive.
//   iou_many_vs_one:          out[i] = iou(rects[i], q).
//   points_in_rect_mask:      bit set iff (xs[i], ys[i]) lies in `rect`.
struct KernelTable {
  void (*enclosing_rects_mask)(const RectSoa& rects, const Box& inner,
                               std::uint64_t* out_words);
  void (*rects_containing_point)(const RectSoa& rects, double px, double py,
                                 std::uint64_t* out_words);
  void (*iou_many_vs_one)(const RectSoa& rects, const Box& q, double* out);
  void (*points_in_rect_mask)(const Box& rect, const double* xs, const double* ys,
                              std::size_t n, std::uint64_t* out_words);
  const char* name;
};

enum class Backend { kScalar, kAvx2, kNeon };

// Active table. Resolved once at first use: best instruction set the CPU
// reports, overridable with CHIPFORGE_KERNELS=scalar|avx2|neon.
const KernelTable& active();
const KernelTable& table_for(Backend b);  // throws std::invalid_argument if unavailable
Backend active_backend();
std::string backend_name(Backend b);
bool backend_available(Backend b);
void force_backend(Backend b);  // testing hook; throws if unavailable

// Convenience wrappers through the active table.
inline void enclosing_rects_mask(const RectSoa& rects, const Box& inner,
                                 std::uint64_t* out_words) {
  active().enclosing_rects_mask(rects, inner, out_words);
}
inline void rects_containing_point(const RectSoa& rects, double px, double py,
                                   std::uint64_t* out_words) {
  active().rects_containing_point(rects, px, py, out_words);
}
inline void iou_many_vs_one(const RectSoa& rects, const Box& q, double* out) {
  active().iou_many_vs_one(rects, q, out);
}
inline void points_in_rect_mask(const Box& rect, const double* xs, const double* ys,
                                std::size_t n, std::uint64_t* out_words) {
  active().points_in_rect_mask(rect, xs, ys, n, out_words);
}

namespace detail {
extern const KernelTable kScalarTable;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2Table;
#endif
#if defined(__aarch64__)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

}  // namespace chipforge::kernels
