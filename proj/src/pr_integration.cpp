#include "detraceval/pr_integration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>

#include <Eigen/Core>

#include "detraceval/errors.hpp"
#include "detraceval/parallel.hpp"

namespace detraceval {
namespace {

std::vector<double> spaced(std::vector<double> scores, int n, ThresholdSpacing spacing, bool* degenerate) {
  if (scores.empty()) throw Error("select_thresholds: empty detection set");
  if (n < 2) throw Error("select_thresholds: need at least 2 thresholds");
  std::sort(scores.begin(), scores.end());
  const double lo = scores.front(), hi = scores.back();
  if (degenerate) *degenerate = lo == hi;
  if (lo == hi) return {lo};

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double t;
    if (i == 0) {
      t = lo;
    } else if (i == n - 1) {
      t = hi;
    } else if (spacing == ThresholdSpacing::uniform) {
      t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    } else {
      const double pos = static_cast<double>(i) * static_cast<double>(scores.size() - 1) / static_cast<double>(n - 1);
      const auto k = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(k);
      t = k + 1 < scores.size() ? scores[k] + frac * (scores[k + 1] - scores[k]) : scores[k];
    }
    out.push_back(std::clamp(t, lo, hi));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<double> select_thresholds(const DetectionSet& dets, int n, ThresholdSpacing spacing, bool* degenerate) {
  std::vector<double> scores;
  scores.reserve(dets.size());
  for (const auto& d : dets) scores.push_back(d.score);
  return spaced(std::move(scores), n, spacing, degenerate);
}

std::vector<double> select_thresholds(std::span<const DetectionSet> dets, int n, ThresholdSpacing spacing,
                                      bool* degenerate) {
  std::vector<double> scores;
  for (const auto& set : dets) {
    for (const auto& d : set) scores.push_back(d.score);
  }
  return spaced(std::move(scores), n, spacing, degenerate);
}

DetectionSet filter_by_score(const DetectionSet& dets, double threshold) {
  DetectionSet out;
  std::copy_if(dets.begin(), dets.end(), std::back_inserter(out),
               [threshold](const Detection& d) { return d.score >= threshold; });
  return out;
}

SweepResult sweep(std::span<const GroundTruth> gts, std::span<const DetectionSet> dets, const TrackerFn& tracker,
                  std::span<const double> thresholds, const SweepOptions& options) {
  if (gts.size() != dets.size()) throw Error("sweep: sequence count mismatch");
  const std::size_t n_seq = gts.size();
  const std::size_t n_thr = thresholds.size();
  const DetEvalConfig det_config{options.iou_thr, options.exclude_truncated};
  const ClearConfig clear_config{options.iou_thr, options.exclude_truncated};

  std::vector<DetectionLabels> labels(n_seq);
  parallel_for(n_seq, options.jobs, [&](std::size_t s) { labels[s] = label_detections(dets[s], gts[s], det_config); });

  std::vector<SequenceClear> clear(n_thr * n_seq);
  std::vector<std::optional<std::string>> errors(n_thr * n_seq);
  std::atomic<bool> abort{false};
  parallel_for(n_thr * n_seq, options.jobs, [&](std::size_t task) {
    if (abort) return;
    const std::size_t t = task / n_seq, s = task % n_seq;
    try {
      const TrackSet tracks = tracker(filter_by_score(dets[s], thresholds[t]), gts[s].sequence_id);
      clear[task] = evaluate_clear(gts[s], tracks, clear_config);
    } catch (const std::exception& e) {
      errors[task] = e.what();
      if (!options.keep_going) abort = true;
    }
  });

  SweepResult result;
  for (std::size_t t = 0; t < n_thr; ++t) {
    bool failed = false;
    for (std::size_t s = 0; s < n_seq; ++s) {
      const auto& err = errors[t * n_seq + s];
      if (!err) continue;
      if (!options.keep_going) {
        throw TrackerFailure("tracker failed on sequence " + gts[s].sequence_id + " at threshold " +
                                 std::to_string(thresholds[t]) + ": " + *err,
                             gts[s].sequence_id, thresholds[t]);
      }
      result.failures.push_back({thresholds[t], gts[s].sequence_id, *err});
      failed = true;
    }
    if (failed) continue;

    DetCounts counts;
    for (std::size_t s = 0; s < n_seq; ++s) {
      const DetCounts c = counts_at(labels[s], thresholds[t]);
      counts.tp += c.tp;
      counts.fp += c.fp;
      counts.fn += c.fn;
    }
    OperatingPoint op;
    op.threshold = thresholds[t];
    op.precision = counts.precision();
    op.recall = counts.recall();
    op.metrics = n_seq == 0 ? MetricBundle{}
                            : aggregate(std::span<const SequenceClear>(clear).subspan(t * n_seq, n_seq));
    result.points.push_back(op);
  }
  return result;
}

std::vector<OperatingPoint> order_along_curve(std::vector<OperatingPoint> points) {
  std::stable_sort(points.begin(), points.end(), [](const OperatingPoint& a, const OperatingPoint& b) {
    return a.recall != b.recall ? a.recall < b.recall : a.precision > b.precision;
  });
  return points;
}

namespace {

Eigen::ArrayXd segment_lengths(std::span<const OperatingPoint> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 2) return Eigen::ArrayXd();
  Eigen::ArrayXd p(n), r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i) = points[static_cast<std::size_t>(i)].precision;
    r(i) = points[static_cast<std::size_t>(i)].recall;
  }
  const Eigen::ArrayXd dp = p.tail(n - 1) - p.head(n - 1);
  const Eigen::ArrayXd dr = r.tail(n - 1) - r.head(n - 1);
  return (dp.square() + dr.square()).sqrt();
}

// Sum in ascending order so the result does not depend on traversal direction.
double ordered_sum(Eigen::ArrayXd terms) {
  std::sort(terms.data(), terms.data() + terms.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < terms.size(); ++i) total += terms(i);
  return total;
}

}  // namespace

double arc_length(std::span<const OperatingPoint> points) { return ordered_sum(segment_lengths(points)); }

double integrate(std::span<const OperatingPoint> points, const MetricSelector& metric) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 2) return 0.0;
  Eigen::ArrayXd psi(n);
  for (Eigen::Index i = 0; i < n; ++i) psi(i) = metric(points[static_cast<std::size_t>(i)].metrics);
  const Eigen::ArrayXd mean = 0.5 * (psi.head(n - 1) + psi.tail(n - 1));
  return 0.5 * ordered_sum(mean * segment_lengths(points));
}

PRIntegratedReport pr_report(std::vector<OperatingPoint> points, std::string detector, std::string tracker) {
  PRIntegratedReport r;
  r.detector = std::move(detector);
  r.tracker = std::move(tracker);
  r.curve = order_along_curve(std::move(points));
  if (r.curve.size() < 2) r.warnings.push_back("fewer than two operating points; every PR-* score is 0");
  const auto by = [&](auto field) {
    return integrate(r.curve, [field](const MetricBundle& b) { return static_cast<double>(b.*field); });
  };
  r.pr_mota = by(&MetricBundle::mota);
  r.pr_motp = by(&MetricBundle::motp);
  r.pr_mt = by(&MetricBundle::mt_percent);
  r.pr_ml = by(&MetricBundle::ml_percent);
  r.pr_ids = by(&MetricBundle::ids);
  r.pr_fm = by(&MetricBundle::fm);
  r.pr_fp = by(&MetricBundle::fp);
  r.pr_fn = by(&MetricBundle::fn);
  r.arc_length = arc_length(r.curve);
  return r;
}

std::vector<PRIntegratedReport> rank_systems(std::vector<PRIntegratedReport> systems) {
  std::stable_sort(systems.begin(), systems.end(),
                   [](const PRIntegratedReport& a, const PRIntegratedReport& b) { return a.pr_mota > b.pr_mota; });
  return systems;
}

std::vector<TrackerAverage> average_over_detectors(std::span<const PRIntegratedReport> systems) {
  std::map<std::string, TrackerAverage> by_tracker;
  for (const auto& s : systems) {
    auto& a = by_tracker[s.tracker];
    a.tracker = s.tracker;
    ++a.detector_count;
    a.pr_mota += s.pr_mota;
    a.pr_motp += s.pr_motp;
    a.pr_mt += s.pr_mt;
    a.pr_ml += s.pr_ml;
    a.pr_ids += s.pr_ids;
    a.pr_fm += s.pr_fm;
    a.pr_fp += s.pr_fp;
    a.pr_fn += s.pr_fn;
  }
  std::vector<TrackerAverage> out;
  for (auto& [name, a] : by_tracker) {
    const double k = a.detector_count;
    for (double* v : {&a.pr_mota, &a.pr_motp, &a.pr_mt, &a.pr_ml, &a.pr_ids, &a.pr_fm, &a.pr_fp, &a.pr_fn}) *v /= k;
    out.push_back(a);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TrackerAverage& a, const TrackerAverage& b) { return a.pr_mota > b.pr_mota; });
  return out;
}

}  // namespace detraceval
