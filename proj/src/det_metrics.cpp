#include "detraceval/det_metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "detraceval/errors.hpp"
#include "detraceval/geometry.hpp"
#include "detraceval/matching.hpp"

namespace detraceval {
namespace {

ScaleClass parse_scale(const std::string& s) {
  if (s == "small") return ScaleClass::small;
  if (s == "medium") return ScaleClass::medium;
  if (s == "large") return ScaleClass::large;
  throw Error("unknown scale class '" + s + "'");
}

OcclusionClass parse_occlusion(const std::string& s) {
  if (s == "none") return OcclusionClass::none;
  if (s == "partial") return OcclusionClass::partial;
  if (s == "heavy") return OcclusionClass::heavy;
  throw Error("unknown occlusion class '" + s + "'");
}

}  // namespace

Subset parse_subset(const std::string& name) {
  Subset s;
  s.name = name;
  if (name == "overall") return s;
  const auto colon = name.find(':');
  if (colon == std::string::npos) throw Error("unknown subset '" + name + "'");
  const std::string kind = name.substr(0, colon);
  const std::string value = name.substr(colon + 1);
  if (kind == "difficulty") {
    const Difficulty d = parse_difficulty(value);
    s.sequence = [d](const GroundTruth& gt) { return gt.difficulty == d; };
  } else if (kind == "weather") {
    const Weather w = parse_weather(value);
    s.sequence = [w](const GroundTruth& gt) { return gt.weather == w; };
  } else if (kind == "scale") {
    const ScaleClass c = parse_scale(value);
    s.entry = [c](const GtEntry& e) { return scale_class(e.box) == c; };
  } else if (kind == "occlusion") {
    const OcclusionClass c = parse_occlusion(value);
    s.entry = [c](const GtEntry& e) { return occlusion_class(e.occlusion_ratio) == c; };
  } else if (kind == "category") {
    const Category c = parse_category(value);
    s.entry = [c](const GtEntry& e) { return e.category == c; };
  } else {
    throw Error("unknown subset '" + name + "'");
  }
  return s;
}

std::vector<std::string> all_subset_names() {
  return {"overall",          "difficulty:easy", "difficulty:medium", "difficulty:hard",  "weather:cloudy",
          "weather:night",    "weather:sunny",   "weather:rainy",     "scale:small",      "scale:medium",
          "scale:large",      "occlusion:none",  "occlusion:partial", "occlusion:heavy",  "category:car",
          "category:bus",     "category:van",    "category:others"};
}

void DetectionLabels::append(const DetectionLabels& other) {
  outcomes.insert(outcomes.end(), other.outcomes.begin(), other.outcomes.end());
  target_count += other.target_count;
}

DetectionLabels label_detections(const DetectionSet& dets, const GroundTruth& gt, const DetEvalConfig& config,
                                 const Subset& subset) {
  validate(dets, gt.frame_count);
  DetectionLabels labels;
  if (subset.sequence && !subset.sequence(gt)) return labels;

  const auto frames = static_cast<std::size_t>(gt.frame_count) + 1;
  std::vector<std::vector<BBox>> gt_boxes(frames);
  std::vector<std::vector<char>> gt_care(frames);
  for (const auto& track : gt.tracks) {
    for (const auto& e : track.entries) {
      const bool ignorable = (subset.entry && !subset.entry(e)) || (config.exclude_truncated && e.truncated()) ||
                             ignore_coverage(e.box, gt.ignore_regions, e.frame) > kIgnoreCoverageThreshold;
      gt_boxes[e.frame].push_back(e.box);
      gt_care[e.frame].push_back(ignorable ? 0 : 1);
      if (!ignorable) ++labels.target_count;
    }
  }
  std::vector<std::vector<Detection>> det_frames(frames);
  for (const auto& d : dets) det_frames[static_cast<std::size_t>(d.frame)].push_back(d);

  labels.outcomes.reserve(dets.size());
  for (std::size_t f = 1; f < frames; ++f) {
    const auto& fd = det_frames[f];
    if (fd.empty()) continue;
    const FrameMatching m = match_frame_greedy(fd, gt_boxes[f], config.iou_thr);
    std::vector<DetOutcome> outcome(fd.size(), DetOutcome::fp);
    for (const auto& p : m.pairs) outcome[p.hyp] = gt_care[f][p.gt] ? DetOutcome::tp : DetOutcome::neutral;
    for (int j : m.unmatched_hyp) {
      if (ignore_coverage(fd[j].box, gt.ignore_regions, static_cast<int>(f)) > kIgnoreCoverageThreshold) {
        outcome[j] = DetOutcome::neutral;
      }
    }
    for (std::size_t j = 0; j < fd.size(); ++j) labels.outcomes.push_back({fd[j].score, outcome[j]});
  }
  return labels;
}

DetCounts counts_at(const DetectionLabels& labels, double threshold) {
  DetCounts c;
  for (const auto& o : labels.outcomes) {
    if (o.score < threshold) continue;
    if (o.outcome == DetOutcome::tp) ++c.tp;
    if (o.outcome == DetOutcome::fp) ++c.fp;
  }
  c.fn = labels.target_count - c.tp;
  return c;
}

PRCurve pr_curve(const DetectionLabels& labels) {
  PRCurve curve;
  auto point_from = [&](double threshold, long tp, long fp) {
    DetCounts c{tp, fp, labels.target_count - tp};
    return PRPoint{threshold, c.precision(), c.recall(), c.tp, c.fp, c.fn};
  };
  if (labels.outcomes.empty()) {
    curve.points.push_back(point_from(std::numeric_limits<double>::infinity(), 0, 0));
    return curve;
  }
  std::vector<ScoredOutcome> sorted = labels.outcomes;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredOutcome& a, const ScoredOutcome& b) { return a.score > b.score; });
  long tp = 0, fp = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].outcome == DetOutcome::tp) ++tp;
    if (sorted[i].outcome == DetOutcome::fp) ++fp;
    if (i + 1 == sorted.size() || sorted[i + 1].score != sorted[i].score) {
      curve.points.push_back(point_from(sorted[i].score, tp, fp));
    }
  }
  std::stable_sort(curve.points.begin(), curve.points.end(), [](const PRPoint& a, const PRPoint& b) {
    return a.recall != b.recall ? a.recall < b.recall : a.precision > b.precision;
  });
  return curve;
}

PRCurve pr_curve(const DetectionSet& dets, const GroundTruth& gt, double iou_thr, const std::optional<Subset>& subset) {
  const Subset s = subset.value_or(Subset{});
  const DetectionLabels labels = label_detections(dets, gt, {iou_thr, false}, s);
  if (!s.is_overall() && labels.target_count == 0) throw Error("empty evaluation target set");
  return pr_curve(labels);
}

double average_precision(const PRCurve& curve) {
  const auto& pts = curve.points;
  if (pts.empty()) return 0.0;
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pts[a].recall < pts[b].recall; });
  // envelope[k]: best precision at recall >= recall of order[k]
  std::vector<double> envelope(order.size());
  double best = 0.0;
  for (std::size_t k = order.size(); k-- > 0;) {
    best = std::max(best, pts[order[k]].precision);
    envelope[k] = best;
  }
  double area = 0.0, prev_recall = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double r = pts[order[k]].recall;
    if (r > prev_recall) {
      area += (r - prev_recall) * envelope[k];
      prev_recall = r;
    }
  }
  return std::clamp(area, 0.0, 1.0);
}

std::vector<SubsetReport> detection_report(std::span<const GroundTruth> gts, std::span<const DetectionSet> dets,
                                           const std::vector<std::string>& subsets, const DetEvalConfig& config) {
  if (gts.size() != dets.size()) throw Error("detection_report: sequence count mismatch");
  std::vector<SubsetReport> report;
  for (const auto& name : subsets) {
    const Subset subset = parse_subset(name);
    DetectionLabels labels;
    for (std::size_t i = 0; i < gts.size(); ++i) labels.append(label_detections(dets[i], gts[i], config, subset));
    if (!subset.is_overall() && labels.target_count == 0) {
      throw Error("subset " + name + ": empty evaluation target set");
    }
    SubsetReport r{name, pr_curve(labels), 0.0};
    r.ap = average_precision(r.curve);
    report.push_back(std::move(r));
  }
  return report;
}

}  // namespace detraceval
