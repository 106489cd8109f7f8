#pragma once

#include <span>
#include <string>
#include <vector>

#include "detraceval/datamodel.hpp"
#include "detraceval/det_metrics.hpp"

namespace detraceval {

// Coverage bounds for mostly tracked / mostly lost; both strict.
inline constexpr double kMostlyTrackedRatio = 0.8;
inline constexpr double kMostlyLostRatio = 0.2;

struct FrameCounts {
  int frame = 1;
  long gt = 0;
  long matches = 0;
  long fp = 0;
  long fn = 0;
  long ids = 0;
  double iou_sum = 0.0;

  friend bool operator==(const FrameCounts&, const FrameCounts&) = default;
};

struct TrackStats {
  long total = 0;  // GT tracks with at least one evaluated box
  long mostly_tracked = 0;
  long partially_tracked = 0;
  long mostly_lost = 0;
  long fragmentations = 0;

  friend bool operator==(const TrackStats&, const TrackStats&) = default;
};

struct MetricBundle {
  double mota = 0.0;  // percent, may be negative
  double motp = 0.0;  // mean overlap of matches, percent
  long mt = 0;
  double mt_percent = 0.0;
  long ml = 0;
  double ml_percent = 0.0;
  long ids = 0;
  long fm = 0;
  long fp = 0;
  long fn = 0;
  // Totals behind the ratios.
  long gt_total = 0;
  long matches = 0;
  double iou_sum = 0.0;
  long track_total = 0;

  friend bool operator==(const MetricBundle&, const MetricBundle&) = default;
};

// MOTA from raw totals. With no ground truth MOTA is reported as 0.
double mota_from_counts(long gt_total, long fn, long fp, long ids);

MetricBundle make_bundle(std::span<const FrameCounts> frames, const TrackStats& tracks);

struct ClearConfig {
  double iou_thr = kDefaultIouThreshold;
  bool exclude_truncated = false;
};

struct SequenceClear {
  std::string sequence_id;
  MetricBundle bundle;
  std::vector<FrameCounts> frames;
  TrackStats tracks;
};

// GT boxes more than half inside an ignore region (and truncated boxes when
// configured) are not evaluated; unmatched hypotheses more than half inside
// an ignore region are dropped instead of counting as FP.
SequenceClear evaluate_clear(const GroundTruth& gt, const TrackSet& tracks, const ClearConfig& config = {});

// Sums counts over sequences before forming ratios.
MetricBundle aggregate(std::span<const SequenceClear> sequences);

}  // namespace detraceval
