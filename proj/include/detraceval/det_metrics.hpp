#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detraceval/datamodel.hpp"

namespace detraceval {

inline constexpr double kDefaultIouThreshold = 0.7;
// Boxes more than this fraction inside ignore regions are neutral.
inline constexpr double kIgnoreCoverageThreshold = 0.5;

struct PRPoint {
  double threshold = 0.0;  // detections with score >= threshold are kept
  double precision = 1.0;
  double recall = 0.0;
  long tp = 0;
  long fp = 0;
  long fn = 0;
};

// Ordered by ascending recall, ties by descending precision.
struct PRCurve {
  std::vector<PRPoint> points;
};

// Evaluation subset. Sequence-level attributes (difficulty, weather) select
// whole sequences; box-level attributes (scale, occlusion, category) mark
// out-of-subset GT as ignorable.
struct Subset {
  std::string name = "overall";
  std::function<bool(const GroundTruth&)> sequence;  // empty: every sequence
  std::function<bool(const GtEntry&)> entry;         // empty: every entry

  bool is_overall() const { return !sequence && !entry; }
};

// Accepts "overall", "difficulty:<easy|medium|hard>",
// "weather:<cloudy|night|sunny|rainy>", "scale:<small|medium|large>",
// "occlusion:<none|partial|heavy>", "category:<car|bus|van|others>".
Subset parse_subset(const std::string& name);
std::vector<std::string> all_subset_names();

struct DetEvalConfig {
  double iou_thr = kDefaultIouThreshold;
  bool exclude_truncated = false;
};

enum class DetOutcome { tp, fp, neutral };

struct ScoredOutcome {
  double score = 0.0;
  DetOutcome outcome = DetOutcome::neutral;
};

// Per-detection outcomes at the loosest threshold. Greedy matching is
// prefix-consistent in score order, so every stricter threshold is read off
// these labels.
struct DetectionLabels {
  std::vector<ScoredOutcome> outcomes;
  long target_count = 0;  // evaluated (non-ignorable) GT boxes

  void append(const DetectionLabels& other);
};

DetectionLabels label_detections(const DetectionSet& dets, const GroundTruth& gt, const DetEvalConfig& config = {},
                                 const Subset& subset = {});

struct DetCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  double precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
};

DetCounts counts_at(const DetectionLabels& labels, double threshold);

PRCurve pr_curve(const DetectionLabels& labels);
PRCurve pr_curve(const DetectionSet& dets, const GroundTruth& gt, double iou_thr = kDefaultIouThreshold,
                 const std::optional<Subset>& subset = std::nullopt);

// Area under the non-increasing precision envelope over [0, max recall].
double average_precision(const PRCurve& curve);

struct SubsetReport {
  std::string subset;
  PRCurve curve;
  double ap = 0.0;
};

// `dets[i]` belongs to `gts[i]`.
std::vector<SubsetReport> detection_report(std::span<const GroundTruth> gts, std::span<const DetectionSet> dets,
                                           const std::vector<std::string>& subsets,
                                           const DetEvalConfig& config = {});

}  // namespace detraceval
