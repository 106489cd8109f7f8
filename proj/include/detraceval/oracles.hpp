#pragma once

#include "detraceval/datamodel.hpp"
#include "detraceval/det_metrics.hpp"
#include "detraceval/mot_metrics.hpp"

namespace detraceval::synth {

inline constexpr int kOracleMaxBoxesPerFrame = 5;
inline constexpr double kOracleApGridStep = 1e-4;

// CLEAR metrics by exhaustive enumeration of every residual assignment.
// Shares no code with evaluate_clear beyond box geometry. Throws when a frame
// holds more than kOracleMaxBoxesPerFrame GT boxes or hypotheses.
MetricBundle oracle_clear(const GroundTruth& gt, const TrackSet& tracks, double iou_thr = kDefaultIouThreshold);

// Midpoint-rule integration of the precision envelope on a fixed recall grid.
double oracle_ap(const PRCurve& curve, double step = kOracleApGridStep);

}  // namespace detraceval::synth
