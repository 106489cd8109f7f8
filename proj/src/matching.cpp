#include "detraceval/matching.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "detraceval/geometry.hpp"
#include "detraceval/hungarian.hpp"

namespace detraceval {
namespace {

void finish(FrameMatching& m, std::size_t n_gt, std::size_t n_hyp) {
  std::sort(m.pairs.begin(), m.pairs.end(), [](const MatchPair& a, const MatchPair& b) { return a.gt < b.gt; });
  std::vector<char> gt_used(n_gt, 0), hyp_used(n_hyp, 0);
  for (const auto& p : m.pairs) {
    gt_used[static_cast<std::size_t>(p.gt)] = 1;
    hyp_used[static_cast<std::size_t>(p.hyp)] = 1;
  }
  for (std::size_t i = 0; i < n_gt; ++i) {
    if (!gt_used[i]) m.unmatched_gt.push_back(static_cast<int>(i));
  }
  for (std::size_t j = 0; j < n_hyp; ++j) {
    if (!hyp_used[j]) m.unmatched_hyp.push_back(static_cast<int>(j));
  }
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct Optimum {
  int cardinality = 0;
  double weight = 0.0;
};

// Best assignment between the listed rows and columns of `overlap`.
Optimum solve_subset(const Eigen::MatrixXd& overlap, double iou_thr, const std::vector<int>& rows,
                     const std::vector<int>& cols) {
  if (rows.empty() || cols.empty()) return {};
  Eigen::MatrixXd cost(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double o = overlap(rows[i], cols[j]);
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          o >= iou_thr ? 1.0 - o : kForbiddenCost<double>;
    }
  }
  const Assignment a = hungarian(cost);
  Optimum best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int j = a.row_to_col[i];
    if (j < 0) continue;
    ++best.cardinality;
    best.weight += overlap(rows[i], cols[static_cast<std::size_t>(j)]);
  }
  return best;
}

// Lexicographically smallest optimal assignment inside one connected
// component, found by fixing rows in order and re-solving the remainder.
void assign_component(const Eigen::MatrixXd& overlap, double iou_thr, const std::vector<int>& rows,
                      const std::vector<int>& cols, std::vector<int>& row_to_col) {
  if (rows.size() == 1 || cols.size() == 1) {
    // Best single pair; the earliest row, then the earliest column, wins ties.
    int bi = -1, bj = -1;
    double bv = -1.0;
    for (int i : rows) {
      for (int j : cols) {
        const double o = overlap(i, j);
        if (o >= iou_thr && o > bv) {
          bv = o;
          bi = i;
          bj = j;
        }
      }
    }
    if (rows.size() == 1 && cols.size() > 1) {
      // Columns compete for one row: lowest column among near-ties.
      for (int j : cols) {
        if (overlap(rows[0], j) >= iou_thr && overlap(rows[0], j) >= bv - kTieTolerance) {
          bj = j;
          break;
        }
      }
    } else if (cols.size() == 1 && rows.size() > 1) {
      for (int i : rows) {
        if (overlap(i, cols[0]) >= iou_thr && overlap(i, cols[0]) >= bv - kTieTolerance) {
          bi = i;
          break;
        }
      }
    }
    if (bi >= 0) row_to_col[static_cast<std::size_t>(bi)] = bj;
    return;
  }

  const Optimum target = solve_subset(overlap, iou_thr, rows, cols);
  std::vector<char> col_used(cols.size(), 0);
  int fixed_count = 0;
  double fixed_weight = 0.0;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    const int i = rows[ri];
    const std::vector<int> later_rows(rows.begin() + static_cast<std::ptrdiff_t>(ri) + 1, rows.end());
    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
      const int j = cols[ci];
      if (col_used[ci] || overlap(i, j) < iou_thr) continue;
      std::vector<int> rest_cols;
      for (std::size_t ck = 0; ck < cols.size(); ++ck) {
        if (!col_used[ck] && ck != ci) rest_cols.push_back(cols[ck]);
      }
      const Optimum rest = solve_subset(overlap, iou_thr, later_rows, rest_cols);
      if (fixed_count + 1 + rest.cardinality == target.cardinality &&
          fixed_weight + overlap(i, j) + rest.weight >= target.weight - kTieTolerance) {
        row_to_col[static_cast<std::size_t>(i)] = j;
        col_used[ci] = 1;
        ++fixed_count;
        fixed_weight += overlap(i, j);
        break;
      }
    }
  }
}

}  // namespace

FrameMatching match_frame_greedy(std::span<const Detection> dets, std::span<const BBox> gts, double iou_thr) {
  std::vector<int> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dets[a].score > dets[b].score; });
  std::vector<char> taken(gts.size(), 0);
  FrameMatching m;
  for (int d : order) {
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double o = iou(dets[d].box, gts[g]);
      if (o > best_iou) {
        best_iou = o;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0 && best_iou >= iou_thr) {
      taken[static_cast<std::size_t>(best)] = 1;
      m.pairs.push_back({best, d, best_iou});
    }
  }
  finish(m, gts.size(), dets.size());
  return m;
}

std::vector<int> max_overlap_assignment(const Eigen::MatrixXd& overlap, double iou_thr) {
  const int n_rows = static_cast<int>(overlap.rows());
  const int n_cols = static_cast<int>(overlap.cols());
  std::vector<int> row_to_col(static_cast<std::size_t>(n_rows), -1);
  DisjointSets sets(n_rows + n_cols);
  std::vector<char> row_live(static_cast<std::size_t>(n_rows), 0);
  for (int i = 0; i < n_rows; ++i) {
    for (int j = 0; j < n_cols; ++j) {
      if (overlap(i, j) >= iou_thr) {
        sets.unite(i, n_rows + j);
        row_live[static_cast<std::size_t>(i)] = 1;
      }
    }
  }
  // Components in order of their smallest row.
  std::unordered_map<int, std::size_t> slot;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> components;
  for (int i = 0; i < n_rows; ++i) {
    if (!row_live[static_cast<std::size_t>(i)]) continue;
    const auto [it, fresh] = slot.try_emplace(sets.find(i), components.size());
    if (fresh) components.emplace_back();
    components[it->second].first.push_back(i);
  }
  for (int j = 0; j < n_cols; ++j) {
    const auto it = slot.find(sets.find(n_rows + j));
    if (it != slot.end()) components[it->second].second.push_back(j);
  }
  for (const auto& [rows, cols] : components) assign_component(overlap, iou_thr, rows, cols, row_to_col);
  return row_to_col;
}

FrameMatching clear_correspond(std::span<const IdPair> prev, std::span<const IdentifiedBox> gts,
                               std::span<const IdentifiedBox> hyps, double iou_thr) {
  FrameMatching m;
  std::unordered_map<int, int> gt_index, hyp_index;
  for (std::size_t i = 0; i < gts.size(); ++i) gt_index.emplace(gts[i].id, static_cast<int>(i));
  for (std::size_t j = 0; j < hyps.size(); ++j) hyp_index.emplace(hyps[j].id, static_cast<int>(j));

  std::vector<char> gt_used(gts.size(), 0), hyp_used(hyps.size(), 0);
  for (const auto& p : prev) {
    const auto g = gt_index.find(p.gt_id);
    const auto h = hyp_index.find(p.hyp_id);
    if (g == gt_index.end() || h == hyp_index.end()) continue;
    if (gt_used[g->second] || hyp_used[h->second]) continue;
    const double o = iou(gts[g->second].box, hyps[h->second].box);
    if (o < iou_thr) continue;
    gt_used[g->second] = 1;
    hyp_used[h->second] = 1;
    m.pairs.push_back({g->second, h->second, o});
  }

  std::vector<int> rest_gt, rest_hyp;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (!gt_used[i]) rest_gt.push_back(static_cast<int>(i));
  }
  for (std::size_t j = 0; j < hyps.size(); ++j) {
    if (!hyp_used[j]) rest_hyp.push_back(static_cast<int>(j));
  }
  if (!rest_gt.empty() && !rest_hyp.empty()) {
    Eigen::MatrixXd overlap(rest_gt.size(), rest_hyp.size());
    for (std::size_t i = 0; i < rest_gt.size(); ++i) {
      for (std::size_t j = 0; j < rest_hyp.size(); ++j) {
        overlap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            iou(gts[rest_gt[i]].box, hyps[rest_hyp[j]].box);
      }
    }
    const auto assignment = max_overlap_assignment(overlap, iou_thr);
    for (std::size_t i = 0; i < rest_gt.size(); ++i) {
      const int j = assignment[i];
      if (j < 0) continue;
      m.pairs.push_back({rest_gt[i], rest_hyp[static_cast<std::size_t>(j)],
                         overlap(static_cast<Eigen::Index>(i), j)});
    }
  }
  finish(m, gts.size(), hyps.size());
  return m;
}

std::vector<IdPair> to_id_pairs(const FrameMatching& m, std::span<const IdentifiedBox> gts,
                                std::span<const IdentifiedBox> hyps) {
  std::vector<IdPair> out;
  out.reserve(m.pairs.size());
  for (const auto& p : m.pairs) out.push_back({gts[p.gt].id, hyps[p.hyp].id});
  return out;
}

}  // namespace detraceval
