#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "detraceval/errors.hpp"
#include "detraceval/geometry.hpp"
#include "detraceval/mot_metrics.hpp"
#include "detraceval/oracles.hpp"
#include "detraceval/synth.hpp"
#include "detraceval/trackers.hpp"
#include "support.hpp"

using namespace detraceval;

namespace {

TrackSet tracks_from_gt(const GroundTruth& gt) {
  TrackSet out;
  int id = 1;
  for (const auto& t : gt.tracks) {
    OutTrack ot{id++, {}};
    for (const auto& e : t.entries) ot.boxes.push_back({e.frame, e.box});
    out.push_back(std::move(ot));
  }
  return out;
}

// One target on a 5-frame static path; the hypothesis covers the frames
// listed in `hits`.
SequenceClear single_target(const std::vector<int>& hits, std::vector<int> ids = {}) {
  GroundTruth gt;
  gt.sequence_id = "one";
  gt.frame_count = 5;
  GtTrack t{"a", {}};
  for (int f = 1; f <= 5; ++f) t.entries.push_back({f, {0, 0, 10, 10}, 0, 0, Category::car});
  gt.tracks.push_back(t);
  TrackSet tracks;
  for (std::size_t k = 0; k < hits.size(); ++k) {
    const int id = ids.empty() ? 1 : ids[k];
    auto it = std::find_if(tracks.begin(), tracks.end(), [&](const OutTrack& o) { return o.track_id == id; });
    if (it == tracks.end()) {
      tracks.push_back({id, {}});
      it = tracks.end() - 1;
    }
    it->boxes.push_back({hits[k], {0, 0, 10, 10}});
  }
  return evaluate_clear(gt, tracks);
}

void expect_same(const MetricBundle& got, const MetricBundle& want, const std::string& label) {
  EXPECT_EQ(got.mt, want.mt) << label;
  EXPECT_EQ(got.ml, want.ml) << label;
  EXPECT_EQ(got.ids, want.ids) << label;
  EXPECT_EQ(got.fm, want.fm) << label;
  EXPECT_EQ(got.fp, want.fp) << label;
  EXPECT_EQ(got.fn, want.fn) << label;
  EXPECT_EQ(got.gt_total, want.gt_total) << label;
  EXPECT_EQ(got.track_total, want.track_total) << label;
  EXPECT_NEAR(got.mota, want.mota, 1e-9) << label;
  EXPECT_NEAR(got.motp, want.motp, 1e-9) << label;
  EXPECT_NEAR(got.mt_percent, want.mt_percent, 1e-9) << label;
  EXPECT_NEAR(got.ml_percent, want.ml_percent, 1e-9) << label;
}

}  // namespace

TEST(MotMetrics, PerfectTracker) {
  const auto fx = synth::make_fixture("perfect");
  const MetricBundle b = evaluate_clear(fx.gts[0], tracks_from_gt(fx.gts[0])).bundle;
  EXPECT_EQ(b.mota, 100.0);
  EXPECT_EQ(b.motp, 100.0);
  EXPECT_EQ(b.ids + b.fm + b.fp + b.fn, 0);
  EXPECT_EQ(b.mt, b.track_total);
  EXPECT_EQ(b.ml, 0);
}

TEST(MotMetrics, EmptyTracker) {
  const auto fx = synth::make_fixture("perfect");
  const MetricBundle b = evaluate_clear(fx.gts[0], TrackSet{}).bundle;
  EXPECT_EQ(b.fn, static_cast<long>(fx.gts[0].box_count()));
  EXPECT_EQ(b.fp, 0);
  EXPECT_EQ(b.ids, 0);
  EXPECT_EQ(b.mota, 0.0);
  EXPECT_EQ(b.ml, b.track_total);
}

TEST(MotMetrics, MotaSubstitution) {
  EXPECT_EQ(mota_from_counts(100, 20, 10, 2), 68.0);
  EXPECT_EQ(mota_from_counts(0, 0, 5, 0), 0.0);
  EXPECT_LT(mota_from_counts(10, 0, 30, 0), 0.0);
}

TEST(MotMetrics, IdentitySwitchAgainstLastMatch) {
  // ids 1,1,2,2,1: two switches
  const auto s = single_target({1, 2, 3, 4, 5}, {1, 1, 2, 2, 1});
  EXPECT_EQ(s.bundle.ids, 2);
  EXPECT_EQ(s.bundle.fm, 0);
  // a gap does not reset the last matched id
  const auto g = single_target({1, 3}, {1, 2});
  EXPECT_EQ(g.bundle.ids, 1);
  EXPECT_EQ(g.bundle.fm, 1);
}

TEST(MotMetrics, FragmentationsAndCoverageBands) {
  const auto frag = single_target({1, 3, 5});
  EXPECT_EQ(frag.bundle.fm, 2);
  EXPECT_EQ(frag.bundle.fn, 2);
  // 4 of 5 = 80%: not mostly tracked (strict)
  const auto eighty = single_target({1, 2, 3, 4});
  EXPECT_EQ(eighty.bundle.mt, 0);
  EXPECT_EQ(eighty.tracks.partially_tracked, 1);
  // 1 of 5 = 20%: not mostly lost (strict)
  const auto twenty = single_target({3});
  EXPECT_EQ(twenty.bundle.ml, 0);
  EXPECT_EQ(twenty.tracks.partially_tracked, 1);
  EXPECT_EQ(single_target({1, 2, 3, 4, 5}).bundle.mt, 1);
  EXPECT_EQ(single_target({}).bundle.ml, 1);
}

TEST(MotMetrics, PartitionOfTracks) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    synth::ScenarioConfig c;
    c.seed = seed;
    c.drop_rate = 0.4;
    const auto s = synth::gen_scenario(c);
    const auto r = evaluate_clear(s.gt, greedy_iou_track(s.dets), {0.5, false});
    EXPECT_EQ(r.tracks.mostly_tracked + r.tracks.partially_tracked + r.tracks.mostly_lost, r.tracks.total);
    EXPECT_LE(r.bundle.mota, 100.0);
  }
}

TEST(MotMetrics, OracleOnTinyScenarios) {
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 300; ++seed) {
    auto s = testsupport::tiny_scenario(seed);
    if (s.gt.tracks.size() > 3 || s.gt.frame_count > 5) continue;
    ++checked;
    expect_same(evaluate_clear(s.gt, s.tracks, {s.iou_thr, false}).bundle,
                synth::oracle_clear(s.gt, s.tracks, s.iou_thr), "seed " + std::to_string(seed));
  }
}

TEST(MotMetrics, CrossingFixtureEqualsOracle) {
  const auto fx = synth::make_fixture("crossing");
  const TrackSet tracks = greedy_iou_track(fx.dets[0], fx.trackers[0]);
  const MetricBundle b = evaluate_clear(fx.gts[0], tracks).bundle;
  expect_same(b, synth::oracle_clear(fx.gts[0], tracks), "crossing");
  EXPECT_GE(b.ids, 1);
}

TEST(MotMetrics, OracleRejectsLargeFrames) {
  synth::ScenarioConfig c;
  c.n_targets = 8;
  const auto s = synth::gen_scenario(c);
  EXPECT_THROW(synth::oracle_clear(s.gt, TrackSet{}), Error);
}

TEST(MotMetrics, AggregateSumsBeforeDividing) {
  const auto fx = synth::make_fixture("perfect");
  const auto one = evaluate_clear(fx.gts[0], tracks_from_gt(fx.gts[0]));
  EXPECT_EQ(aggregate(std::vector<SequenceClear>{one}), one.bundle);

  const auto half = single_target({1, 2, 4}, {1, 2, 2});
  const MetricBundle twice = aggregate(std::vector<SequenceClear>{half, half});
  EXPECT_EQ(twice.mota, half.bundle.mota);
  EXPECT_EQ(twice.fn, 2 * half.bundle.fn);
  EXPECT_EQ(twice.ids, 2 * half.bundle.ids);
  EXPECT_EQ(twice.gt_total, 2 * half.bundle.gt_total);

  SequenceClear a, b;
  a.frames = {{1, 100, 80, 0, 20, 0, 80.0}};
  b.frames = {{1, 300, 300, 240, 0, 0, 300.0}};
  a.bundle = make_bundle(a.frames, a.tracks);
  b.bundle = make_bundle(b.frames, b.tracks);
  EXPECT_NEAR(a.bundle.mota, 80.0, 1e-9);
  EXPECT_NEAR(b.bundle.mota, 20.0, 1e-9);
  EXPECT_NEAR(aggregate(std::vector<SequenceClear>{a, b}).mota, 35.0, 1e-9);
  EXPECT_THROW(aggregate(std::vector<SequenceClear>{}), Error);
}

TEST(MotMetrics, NegativeMotaOnFpHeavyFixture) {
  const auto fx = synth::make_fixture("fp-heavy");
  EXPECT_LT(evaluate_clear(fx.gts[0], greedy_iou_track(fx.dets[0])).bundle.mota, 0.0);
}

TEST(MotMetrics, RelabelingInvariance) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto s = testsupport::tiny_scenario(seed + 500);
    EXPECT_EQ(evaluate_clear(s.gt, s.tracks, {s.iou_thr, false}).bundle,
              evaluate_clear(s.gt, testsupport::relabel(s.tracks, seed), {s.iou_thr, false}).bundle);
  }
}

TEST(MotMetrics, RemovingClutterNeverLowersMota) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto s = testsupport::tiny_scenario(seed + 900);
    const double base = evaluate_clear(s.gt, s.tracks, {s.iou_thr, false}).bundle.mota;
    for (std::size_t k = 0; k < s.tracks.size(); ++k) {
      // clutter-only: no box reaches the threshold against any GT box of its frame
      bool clutter = true;
      for (const auto& b : s.tracks[k].boxes) {
        for (const auto& t : s.gt.tracks) {
          for (const auto& e : t.entries) clutter &= !(e.frame == b.frame && iou(e.box, b.box) >= s.iou_thr);
        }
      }
      if (!clutter) continue;
      TrackSet fewer = s.tracks;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(k));
      EXPECT_GE(evaluate_clear(s.gt, fewer, {s.iou_thr, false}).bundle.mota, base) << seed;
    }
  }
}

TEST(MotMetrics, IgnoreRegionsExcludeGtAndDropFalsePositives) {
  GroundTruth gt;
  gt.sequence_id = "ign";
  gt.frame_count = 1;
  gt.tracks.push_back({"a", {{1, {0, 0, 10, 10}, 0, 0, Category::car}}});
  gt.tracks.push_back({"b", {{1, {100, 0, 10, 10}, 0, 0, Category::car}}});
  gt.ignore_regions.push_back({{95, -5, 30, 30}, std::nullopt});
  const TrackSet tracks{{1, {{1, {0, 0, 10, 10}}}}, {2, {{1, {105, 5, 10, 10}}}}};
  const MetricBundle b = evaluate_clear(gt, tracks).bundle;
  EXPECT_EQ(b.gt_total, 1);
  EXPECT_EQ(b.fn, 0);
  EXPECT_EQ(b.fp, 0);
  EXPECT_EQ(b.mota, 100.0);
}

TEST(MotMetrics, ExcludeTruncated) {
  GroundTruth gt;
  gt.sequence_id = "t";
  gt.frame_count = 2;
  gt.tracks.push_back({"a", {{1, {0, 0, 10, 10}, 0, 0.9, Category::car}, {2, {0, 0, 10, 10}, 0, 0.1, Category::car}}});
  const TrackSet none;
  EXPECT_EQ(evaluate_clear(gt, none, {0.7, false}).bundle.fn, 2);
  EXPECT_EQ(evaluate_clear(gt, none, {0.7, true}).bundle.fn, 1);
}

TEST(MotMetrics, PerFrameCountsAddUp) {
  const auto fx = synth::make_fixture("ranking-flip");
  const auto r = evaluate_clear(fx.gts[0], greedy_iou_track(fx.dets[0]));
  long gt = 0, fp = 0;
  for (const auto& f : r.frames) {
    EXPECT_EQ(f.matches + f.fn, f.gt);
    gt += f.gt;
    fp += f.fp;
  }
  EXPECT_EQ(gt, r.bundle.gt_total);
  EXPECT_EQ(fp, r.bundle.fp);
}
