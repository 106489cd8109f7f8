#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "detraceval/box.hpp"
#include "detraceval/datamodel.hpp"

namespace detraceval {

enum class ScaleClass { small, medium, large };
enum class OcclusionClass { none, partial, heavy };

// Band edges. Bands are closed on the upper side: scale 50 is small,
// occlusion 0.5 is partial.
inline constexpr double kSmallScaleMax = 50.0;
inline constexpr double kMediumScaleMax = 150.0;
inline constexpr double kPartialOcclusionMin = 0.01;
inline constexpr double kPartialOcclusionMax = 0.5;

template <typename Scalar>
Scalar intersection_area(const BasicBox<Scalar>& a, const BasicBox<Scalar>& b) {
  const Scalar w = std::min(a.right(), b.right()) - std::max(a.left, b.left);
  const Scalar h = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
  return (w > Scalar(0) && h > Scalar(0)) ? w * h : Scalar(0);
}

template <typename Scalar>
Scalar iou(const BasicBox<Scalar>& a, const BasicBox<Scalar>& b) {
  const Scalar inter = intersection_area(a, b);
  if (inter <= Scalar(0)) return Scalar(0);
  // Areas from the same extents as the intersection, so iou(a, a) is exactly 1.
  const auto extent_area = [](const BasicBox<Scalar>& x) { return (x.right() - x.left) * (x.bottom() - x.top); };
  const Scalar uni = extent_area(a) + extent_area(b) - inter;
  return std::min(Scalar(1), inter / uni);
}

// rows index `a`, columns index `b`.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> iou_matrix(std::span<const BasicBox<Scalar>> a,
                                                                 std::span<const BasicBox<Scalar>> b) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(a.size(), b.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = iou(a[i], b[j]);
  }
  return m;
}

// Area of `box` covered by the union of `cover`, exact via coordinate
// compression over the clipped rectangles.
template <typename Scalar>
Scalar covered_area(const BasicBox<Scalar>& box, std::span<const BasicBox<Scalar>> cover) {
  std::vector<BasicBox<Scalar>> clipped;
  std::vector<Scalar> xs{box.left, box.right()};
  std::vector<Scalar> ys{box.top, box.bottom()};
  for (const auto& c : cover) {
    const Scalar l = std::max(box.left, c.left), r = std::min(box.right(), c.right());
    const Scalar t = std::max(box.top, c.top), b = std::min(box.bottom(), c.bottom());
    if (r <= l || b <= t) continue;
    clipped.push_back({l, t, r - l, b - t});
    xs.push_back(l);
    xs.push_back(r);
    ys.push_back(t);
    ys.push_back(b);
  }
  if (clipped.empty()) return Scalar(0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  Scalar total(0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const Scalar cx = (xs[i] + xs[i + 1]) / Scalar(2);
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const Scalar cy = (ys[j] + ys[j + 1]) / Scalar(2);
      const bool inside = std::any_of(clipped.begin(), clipped.end(), [&](const BasicBox<Scalar>& c) {
        return cx >= c.left && cx < c.right() && cy >= c.top && cy < c.bottom();
      });
      if (inside) total += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
    }
  }
  return total;
}

// Fraction of `box` inside the union of the regions active at `frame`.
double ignore_coverage(const BBox& box, std::span<const IgnoreRegion> regions, int frame);

template <typename Scalar>
Scalar scale(const BasicBox<Scalar>& box) {
  return std::sqrt(box.area());
}

template <typename Scalar>
ScaleClass scale_class(const BasicBox<Scalar>& box) {
  const Scalar s = scale(box);
  if (s <= Scalar(kSmallScaleMax)) return ScaleClass::small;
  if (s <= Scalar(kMediumScaleMax)) return ScaleClass::medium;
  return ScaleClass::large;
}

inline OcclusionClass occlusion_class(double ratio) {
  if (ratio < kPartialOcclusionMin) return OcclusionClass::none;
  if (ratio <= kPartialOcclusionMax) return OcclusionClass::partial;
  return OcclusionClass::heavy;
}

}  // namespace detraceval
