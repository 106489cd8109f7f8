#include "detraceval/oracles.hpp"

#include <algorithm>
#include <map>

#include "detraceval/errors.hpp"
#include "detraceval/geometry.hpp"
#include "detraceval/matching.hpp"

namespace detraceval::synth {
namespace {

// Visits every partial injective assignment, rows in order, each row trying
// columns in ascending order and then "unassigned". That visiting order is
// lexicographic, so the first assignment meeting the optimum is the
// tie-break winner.
template <typename Visit>
bool enumerate(const std::vector<std::vector<double>>& ov, double thr, std::size_t row, std::vector<int>& current,
               std::vector<char>& used, int card, double weight, Visit&& visit) {
  if (row == ov.size()) return visit(current, card, weight);
  const std::size_t cols = ov.empty() ? 0 : ov[0].size();
  for (std::size_t j = 0; j < cols; ++j) {
    if (used[j] || ov[row][j] < thr) continue;
    used[j] = 1;
    current[row] = static_cast<int>(j);
    if (enumerate(ov, thr, row + 1, current, used, card + 1, weight + ov[row][j], visit)) return true;
    used[j] = 0;
  }
  current[row] = -1;
  return enumerate(ov, thr, row + 1, current, used, card, weight, visit);
}

std::vector<int> best_assignment(const std::vector<std::vector<double>>& ov, std::size_t cols, double thr) {
  std::vector<int> current(ov.size(), -1);
  std::vector<char> used(cols, 0);
  int best_card = 0;
  double best_weight = 0.0;
  enumerate(ov, thr, 0, current, used, 0, 0.0, [&](const std::vector<int>&, int card, double weight) {
    if (card > best_card || (card == best_card && weight > best_weight)) {
      best_card = card;
      best_weight = weight;
    }
    return false;
  });
  std::vector<int> winner;
  std::fill(current.begin(), current.end(), -1);
  std::fill(used.begin(), used.end(), 0);
  enumerate(ov, thr, 0, current, used, 0, 0.0, [&](const std::vector<int>& a, int card, double weight) {
    if (card == best_card && weight >= best_weight - kTieTolerance) {
      winner = a;
      return true;
    }
    return false;
  });
  return winner;
}

}  // namespace

MetricBundle oracle_clear(const GroundTruth& gt, const TrackSet& tracks, double iou_thr) {
  struct Box {
    int id;
    BBox box;
  };
  const std::size_t n_gt = gt.tracks.size();
  std::vector<int> last_hyp(n_gt, -1);
  std::map<int, int> prev;  // gt track index -> hypothesis id matched in the previous frame
  // matched status per GT track at each evaluated frame, in frame order
  std::vector<std::vector<char>> history(n_gt);

  long gt_total = 0, matches = 0, fp = 0, fn = 0, ids = 0;
  double iou_sum = 0.0;

  for (int f = 1; f <= gt.frame_count; ++f) {
    std::vector<Box> gts, hyps;
    for (std::size_t t = 0; t < n_gt; ++t) {
      for (const auto& e : gt.tracks[t].entries) {
        if (e.frame != f) continue;
        if (ignore_coverage(e.box, gt.ignore_regions, f) > kIgnoreCoverageThreshold) continue;
        gts.push_back({static_cast<int>(t), e.box});
      }
    }
    for (const auto& tr : tracks) {
      for (const auto& b : tr.boxes) {
        if (b.frame == f) hyps.push_back({tr.track_id, b.box});
      }
    }
    if (static_cast<int>(gts.size()) > kOracleMaxBoxesPerFrame ||
        static_cast<int>(hyps.size()) > kOracleMaxBoxesPerFrame) {
      throw Error("oracle_clear: instance too large at frame " + std::to_string(f));
    }

    std::vector<int> gt_to_hyp(gts.size(), -1);
    std::vector<char> hyp_taken(hyps.size(), 0);
    for (std::size_t i = 0; i < gts.size(); ++i) {
      const auto it = prev.find(gts[i].id);
      if (it == prev.end()) continue;
      for (std::size_t j = 0; j < hyps.size(); ++j) {
        if (hyps[j].id == it->second && !hyp_taken[j] && iou(gts[i].box, hyps[j].box) >= iou_thr) {
          gt_to_hyp[i] = static_cast<int>(j);
          hyp_taken[j] = 1;
        }
      }
    }
    std::vector<std::size_t> free_gt, free_hyp;
    for (std::size_t i = 0; i < gts.size(); ++i) {
      if (gt_to_hyp[i] < 0) free_gt.push_back(i);
    }
    for (std::size_t j = 0; j < hyps.size(); ++j) {
      if (!hyp_taken[j]) free_hyp.push_back(j);
    }
    std::vector<std::vector<double>> ov(free_gt.size(), std::vector<double>(free_hyp.size()));
    for (std::size_t a = 0; a < free_gt.size(); ++a) {
      for (std::size_t b = 0; b < free_hyp.size(); ++b) ov[a][b] = iou(gts[free_gt[a]].box, hyps[free_hyp[b]].box);
    }
    const std::vector<int> residual = best_assignment(ov, free_hyp.size(), iou_thr);
    for (std::size_t a = 0; a < free_gt.size(); ++a) {
      if (residual[a] < 0) continue;
      const std::size_t j = free_hyp[static_cast<std::size_t>(residual[a])];
      gt_to_hyp[free_gt[a]] = static_cast<int>(j);
      hyp_taken[j] = 1;
    }

    prev.clear();
    gt_total += static_cast<long>(gts.size());
    for (std::size_t i = 0; i < gts.size(); ++i) {
      const int t = gts[i].id;
      const int j = gt_to_hyp[i];
      history[t].push_back(j >= 0 ? 1 : 0);
      if (j < 0) {
        ++fn;
        continue;
      }
      ++matches;
      iou_sum += iou(gts[i].box, hyps[j].box);
      const int h = hyps[j].id;
      if (last_hyp[t] >= 0 && last_hyp[t] != h) ++ids;
      last_hyp[t] = h;
      prev[t] = h;
    }
    for (std::size_t j = 0; j < hyps.size(); ++j) {
      if (!hyp_taken[j] && ignore_coverage(hyps[j].box, gt.ignore_regions, f) <= kIgnoreCoverageThreshold) ++fp;
    }
  }

  MetricBundle b;
  b.gt_total = gt_total;
  b.matches = matches;
  b.iou_sum = iou_sum;
  b.fp = fp;
  b.fn = fn;
  b.ids = ids;
  b.mota = gt_total > 0 ? 100.0 - 100.0 * static_cast<double>(fn + fp + ids) / static_cast<double>(gt_total) : 0.0;
  b.motp = matches > 0 ? 100.0 * iou_sum / static_cast<double>(matches) : 0.0;
  for (const auto& h : history) {
    if (h.empty()) continue;
    ++b.track_total;
    long hits = 0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      hits += h[k];
      // a match following a miss, after some earlier match
      if (k > 0 && h[k] && !h[k - 1] && std::find(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(k), 1) !=
                                             h.begin() + static_cast<std::ptrdiff_t>(k)) {
        ++b.fm;
      }
    }
    const double ratio = static_cast<double>(hits) / static_cast<double>(h.size());
    if (ratio > 0.8) ++b.mt;
    if (ratio < 0.2) ++b.ml;
  }
  if (b.track_total > 0) {
    b.mt_percent = 100.0 * static_cast<double>(b.mt) / static_cast<double>(b.track_total);
    b.ml_percent = 100.0 * static_cast<double>(b.ml) / static_cast<double>(b.track_total);
  }
  return b;
}

double oracle_ap(const PRCurve& curve, double step) {
  double max_recall = 0.0;
  for (const auto& p : curve.points) max_recall = std::max(max_recall, p.recall);
  double area = 0.0;
  for (long k = 0; static_cast<double>(k) * step < max_recall; ++k) {
    const double lo = static_cast<double>(k) * step;
    const double hi = std::min(lo + step, max_recall);
    const double mid = 0.5 * (lo + hi);
    double env = 0.0;
    for (const auto& p : curve.points) {
      if (p.recall >= mid) env = std::max(env, p.precision);
    }
    area += env * (hi - lo);
  }
  return area;
}

}  // namespace detraceval::synth
