#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

namespace chipforge {

// Axis-aligned rectangle in pixel coordinates, origin top-left.
// Used for ground-truth boxes, proposals, chips and anchors alike.
// Coordinates are real-valued; a box is valid when w > 0, h > 0 and all
// fields are finite.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x2() const { return x + w; }
  double y2() const { return y + h; }
  double area() const { return w * h; }
  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }

  bool is_valid() const {
    return w > 0.0 && h > 0.0 && std::isfinite(x) && std::isfinite(y) &&
           std::isfinite(w) && std::isfinite(h);
  }

  bool operator==(const Box& o) const = default;
};

// Intersection over union; 0 when disjoint. Everything is derived from box
// edges so that iou(a, a) == 1.0 holds exactly, and the clamped branch-free
// form is deliberate: the SIMD kernels evaluate the identical expression
// lane-wise and are tested for bit equality against it.
inline double iou(const Box& a, const Box& b) {
  const double ax2 = a.x + a.w, ay2 = a.y + a.h;
  const double bx2 = b.x + b.w, by2 = b.y + b.h;
  const double iw = std::max(0.0, std::min(ax2, bx2) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(ay2, by2) - std::max(a.y, b.y));
  const double inter = iw * ih;
  const double area_a = (ax2 - a.x) * (ay2 - a.y);
  const double area_b = (bx2 - b.x) * (by2 - b.y);
  return inter / (area_a + area_b - inter);
}

// Boundary-inclusive: a box flush with the outer edge counts as enclosed.
inline bool encloses(const Box& outer, const Box& inner) {
  return outer.x <= inner.x && outer.y <= inner.y && inner.x2() <= outer.x2() &&
         inner.y2() <= outer.y2();
}

// Intersection rectangle, or nullopt when the clipped width or height falls
// below one pixel. Sub-pixel slivers carry no trainable signal.
inline std::optional<Box> clip(const Box& b, const Box& frame) {
  const double x1 = std::max(b.x, frame.x);
  const double y1 = std::max(b.y, frame.y);
  const double x2 = std::min(b.x2(), frame.x2());
  const double y2 = std::min(b.y2(), frame.y2());
  if (x2 - x1 < 1.0 || y2 - y1 < 1.0) return std::nullopt;
  return Box{x1, y1, x2 - x1, y2 - y1};
}

inline Box scale_box(const Box& b, double factor) {
  return Box{b.x * factor, b.y * factor, b.w * factor, b.h * factor};
}

// Horizontal mirror within an image of the given width. Involution.
inline Box flip_box(const Box& b, double image_width) {
  return Box{image_width - (b.x + b.w), b.y, b.w, b.h};
}

inline bool contains_point(const Box& rect, double px, double py) {
  return rect.x <= px && px <= rect.x2() && rect.y <= py && py <= rect.y2();
}

}  // namespace chipforge
