#pragma once

// Helpers shared by the unit and acceptance tests. The brute-force routines
// here are deliberately naive and share no code with the library.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "detraceval/datamodel.hpp"
#include "detraceval/synth.hpp"

namespace testsupport {

using namespace detraceval;

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "detraceval-test-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) std::abort();
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Minimum over every partial injective assignment of maximum cardinality,
// enumerated by permutations of the columns (padded with "no column").
inline double brute_force_min_cost(const Eigen::MatrixXd& cost, int* best_cardinality = nullptr) {
  const int rows = static_cast<int>(cost.rows()), cols = static_cast<int>(cost.cols());
  std::vector<int> slots(static_cast<std::size_t>(std::max(rows, cols)));
  std::iota(slots.begin(), slots.end(), 0);
  int best_card = -1;
  double best = std::numeric_limits<double>::infinity();
  do {
    int card = 0;
    double total = 0.0;
    for (int i = 0; i < rows; ++i) {
      const int j = slots[static_cast<std::size_t>(i)];
      if (j >= cols || !std::isfinite(cost(i, j))) continue;
      ++card;
      total += cost(i, j);
    }
    if (card > best_card || (card == best_card && total < best)) {
      best_card = card;
      best = total;
    }
  } while (std::next_permutation(slots.begin(), slots.end()));
  if (best_cardinality) *best_cardinality = best_card;
  return best_card == 0 ? 0.0 : best;
}

// Random GT plus a perturbed tracker output with identity swaps, drops,
// clutter and the odd ignore region. Boxes sit on a coarse grid so exact IoU
// ties are common. At most five GT boxes and five hypotheses per frame.
struct TinyScenario {
  GroundTruth gt;
  TrackSet tracks;
  double iou_thr = 0.5;
};

inline TinyScenario tiny_scenario(std::uint64_t seed) {
  synth::Rng rng(seed, 99);
  const auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.uniform() * (hi - lo + 1)); };
  TinyScenario s;
  const double thresholds[] = {0.3, 0.5, 0.7};
  s.iou_thr = thresholds[pick(0, 2)];
  const int frames = pick(3, 10);
  const int targets = pick(1, 4);
  s.gt.sequence_id = "tiny" + std::to_string(seed);
  s.gt.frame_count = frames;

  std::map<int, std::vector<TrackBox>> hyp;
  int next_hyp = 1;
  std::vector<int> id_of(static_cast<std::size_t>(targets));
  for (int t = 0; t < targets; ++t) id_of[static_cast<std::size_t>(t)] = next_hyp++;

  std::vector<std::vector<BBox>> boxes(static_cast<std::size_t>(targets));
  for (int t = 0; t < targets; ++t) {
    double x = 10.0 * pick(0, 6), y = 10.0 * pick(0, 3);
    const double vx = 5.0 * pick(-2, 2), vy = 5.0 * pick(-1, 1);
    const double w = 10.0 * pick(2, 4), h = 10.0 * pick(2, 4);
    GtTrack track{"t" + std::to_string(t), {}};
    const int first = pick(1, frames), last = pick(first, frames);
    for (int f = first; f <= last; ++f) {
      track.entries.push_back({f, {x, y, w, h}, 0.0, 0.0, Category::car});
      x += vx;
      y += vy;
    }
    s.gt.tracks.push_back(std::move(track));
  }
  if (rng.uniform() < 0.3) {
    IgnoreRegion r{{10.0 * pick(0, 6), 10.0 * pick(0, 3), 10.0 * pick(2, 5), 10.0 * pick(2, 5)}, std::nullopt};
    if (rng.uniform() < 0.5) r.frame_range = std::make_pair(pick(1, frames), frames);
    s.gt.ignore_regions.push_back(r);
  }

  for (int f = 1; f <= frames; ++f) {
    int emitted = 0;
    // occasional identity swap between two targets
    if (targets >= 2 && rng.uniform() < 0.15) {
      const int a = pick(0, targets - 1), b = pick(0, targets - 1);
      std::swap(id_of[static_cast<std::size_t>(a)], id_of[static_cast<std::size_t>(b)]);
    }
    for (int t = 0; t < targets; ++t) {
      if (rng.uniform() < 0.1) id_of[static_cast<std::size_t>(t)] = next_hyp++;
      const auto& entries = s.gt.tracks[static_cast<std::size_t>(t)].entries;
      const auto it = std::find_if(entries.begin(), entries.end(), [&](const GtEntry& e) { return e.frame == f; });
      if (it == entries.end() || rng.uniform() < 0.15) continue;
      const BBox b{it->box.left + 5.0 * pick(-1, 1), it->box.top + 5.0 * pick(-1, 1), it->box.width,
                   it->box.height + 5.0 * pick(0, 1)};
      hyp[id_of[static_cast<std::size_t>(t)]].push_back({f, b});
      ++emitted;
    }
    const int clutter = pick(0, 2);
    for (int k = 0; k < clutter && emitted < 5; ++k, ++emitted) {
      const int id = rng.uniform() < 0.5 ? 900 + k : next_hyp++;
      hyp[id].push_back({f, {10.0 * pick(0, 6), 10.0 * pick(0, 3), 10.0 * pick(2, 4), 10.0 * pick(2, 4)}});
    }
  }
  for (auto& [id, bs] : hyp) {
    // a track id can appear at most once per frame
    std::vector<TrackBox> unique;
    for (const auto& b : bs) {
      if (unique.empty() || unique.back().frame != b.frame) unique.push_back(b);
    }
    s.tracks.push_back({id, std::move(unique)});
  }
  return s;
}

// Same track set with every id replaced by a random bijection.
inline TrackSet relabel(const TrackSet& tracks, std::uint64_t seed) {
  synth::Rng rng(seed, 7);
  std::vector<int> ids(tracks.size());
  std::iota(ids.begin(), ids.end(), 1);
  for (std::size_t i = ids.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i));
    std::swap(ids[i - 1], ids[j]);
  }
  TrackSet out = tracks;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].track_id = 1000 + ids[i] * 3;
  std::sort(out.begin(), out.end(), [](const OutTrack& a, const OutTrack& b) { return a.track_id < b.track_id; });
  return out;
}

}  // namespace testsupport
