#include "detraceval/geometry.hpp"

namespace detraceval {

double ignore_coverage(const BBox& box, std::span<const IgnoreRegion> regions, int frame) {
  std::vector<BBox> active;
  for (const auto& r : regions) {
    if (r.active(frame)) active.push_back(r.box);
  }
  if (active.empty()) return 0.0;
  return std::min(1.0, covered_area<double>(box, active) / box.area());
}

}  // namespace detraceval
