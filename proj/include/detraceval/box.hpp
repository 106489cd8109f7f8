#pragma once

#include <cmath>

namespace detraceval {

// Axis-aligned rectangle in pixel coordinates. Treated as half-open:
// [left, left + width) x [top, top + height).
template <typename Scalar>
struct BasicBox {
  Scalar left{};
  Scalar top{};
  Scalar width{};
  Scalar height{};

  Scalar right() const { return left + width; }
  Scalar bottom() const { return top + height; }
  Scalar area() const { return width * height; }

  bool valid() const {
    return std::isfinite(left) && std::isfinite(top) && std::isfinite(width) &&
           std::isfinite(height) && width > Scalar(0) && height > Scalar(0);
  }

  BasicBox translated(Scalar dx, Scalar dy) const { return {left + dx, top + dy, width, height}; }

  friend bool operator==(const BasicBox&, const BasicBox&) = default;
};

using BBox = BasicBox<double>;

}  // namespace detraceval
