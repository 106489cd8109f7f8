#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detraceval/datamodel.hpp"
#include "detraceval/det_metrics.hpp"
#include "detraceval/errors.hpp"
#include "detraceval/mot_metrics.hpp"

namespace detraceval {

inline constexpr int kDefaultThresholdCount = 10;

enum class ThresholdSpacing { uniform, quantile };

// `n` thresholds from the minimal to the maximal detection score, both
// included, strictly increasing after de-duplication. All-equal scores give
// a single threshold (and set *degenerate when given).
std::vector<double> select_thresholds(const DetectionSet& dets, int n = kDefaultThresholdCount,
                                      ThresholdSpacing spacing = ThresholdSpacing::uniform,
                                      bool* degenerate = nullptr);
std::vector<double> select_thresholds(std::span<const DetectionSet> dets, int n = kDefaultThresholdCount,
                                      ThresholdSpacing spacing = ThresholdSpacing::uniform,
                                      bool* degenerate = nullptr);

struct OperatingPoint {
  double threshold = 0.0;
  double precision = 1.0;
  double recall = 0.0;
  MetricBundle metrics;
};

// Runs a tracker on one sequence's (already thresholded) detections.
using TrackerFn = std::function<TrackSet(const DetectionSet& dets, const std::string& sequence_id)>;

struct SweepOptions {
  double iou_thr = kDefaultIouThreshold;
  bool exclude_truncated = false;
  bool keep_going = false;  // record failed thresholds instead of aborting
  int jobs = 1;
};

struct SweepFailure {
  double threshold = 0.0;
  std::string sequence_id;
  std::string message;
};

struct SweepResult {
  std::vector<OperatingPoint> points;  // threshold order, failed thresholds omitted
  std::vector<SweepFailure> failures;
};

DetectionSet filter_by_score(const DetectionSet& dets, double threshold);

// For each threshold: keep detections with score >= threshold, measure
// (precision, recall) over all sequences, run the tracker on every sequence
// and aggregate the CLEAR metrics. Results do not depend on `jobs`.
SweepResult sweep(std::span<const GroundTruth> gts, std::span<const DetectionSet> dets, const TrackerFn& tracker,
                  std::span<const double> thresholds, const SweepOptions& options = {});

using MetricSelector = std::function<double(const MetricBundle&)>;

// Orders points by ascending recall, ties by descending precision.
std::vector<OperatingPoint> order_along_curve(std::vector<OperatingPoint> points);

double arc_length(std::span<const OperatingPoint> points);

// Half the trapezoidal line integral of the selected metric along the
// polyline through (precision, recall). Points are used in the given order.
double integrate(std::span<const OperatingPoint> points, const MetricSelector& metric);

struct PRIntegratedReport {
  std::string detector;
  std::string tracker;
  double pr_mota = 0.0;
  double pr_motp = 0.0;
  double pr_mt = 0.0;  // integrates MT percent
  double pr_ml = 0.0;  // integrates ML percent
  double pr_ids = 0.0;
  double pr_fm = 0.0;
  double pr_fp = 0.0;
  double pr_fn = 0.0;
  double arc_length = 0.0;
  std::vector<OperatingPoint> curve;  // ordered along the curve
  std::vector<std::string> warnings;
};

PRIntegratedReport pr_report(std::vector<OperatingPoint> points, std::string detector = {}, std::string tracker = {});

// Sorted by descending PR-MOTA; stable for equal scores.
std::vector<PRIntegratedReport> rank_systems(std::vector<PRIntegratedReport> systems);

struct TrackerAverage {
  std::string tracker;
  int detector_count = 0;
  double pr_mota = 0.0;
  double pr_motp = 0.0;
  double pr_mt = 0.0;
  double pr_ml = 0.0;
  double pr_ids = 0.0;
  double pr_fm = 0.0;
  double pr_fp = 0.0;
  double pr_fn = 0.0;
};

// Arithmetic mean of every PR-* score over the detectors each tracker was
// run with, sorted by descending mean PR-MOTA.
std::vector<TrackerAverage> average_over_detectors(std::span<const PRIntegratedReport> systems);

}  // namespace detraceval
