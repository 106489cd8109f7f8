#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "detraceval/det_metrics.hpp"
#include "detraceval/errors.hpp"
#include "detraceval/mot_metrics.hpp"
#include "detraceval/oracles.hpp"
#include "detraceval/synth.hpp"

using namespace detraceval;

namespace {

nlohmann::json golden() {
  std::ifstream in(std::string(DETRACEVAL_FIXTURE_DIR) + "/golden.json");
  return nlohmann::json::parse(in).at("fixtures");
}

long det_fn(const synth::Scenario& s) {
  return counts_at(label_detections(s.dets, s.gt), -1.0).fn;
}

long det_fp(const synth::Scenario& s) {
  return counts_at(label_detections(s.dets, s.gt), -1.0).fp;
}

}  // namespace

TEST(Rng, Deterministic) {
  synth::Rng a(99), b(99), c(100);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    differs |= x != c.uniform();
  }
  EXPECT_TRUE(differs);
  synth::Rng s1(7, 1), s2(7, 2), s1again(7, 1);
  EXPECT_NE(s1.uniform(), s2.uniform());
  EXPECT_NE(s1again.uniform(), s2.uniform());
}

TEST(Rng, KnownStreamValues) {
  // mt19937_64 output is fixed by the standard: the 10000th draw of the
  // default-seeded engine is 9981545732273789042.
  std::mt19937_64 e;
  e.discard(9999);
  EXPECT_EQ(e(), 9981545732273789042ull);
  EXPECT_EQ(synth::splitmix64(0), 0xe220a8397b1dcdafull);
}

TEST(Rng, PoissonIsMonotoneInTheMean) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    int last = 0;
    for (double mean : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      synth::Rng r(seed);
      const int k = r.poisson(mean);
      EXPECT_GE(k, last);
      last = k;
    }
  }
  synth::Rng r(3);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) sum += r.poisson(3.0);
  EXPECT_NEAR(sum / 20000, 3.0, 0.05);
}

TEST(Synth, NoiselessDetectionsEqualGroundTruth) {
  synth::ScenarioConfig c;
  c.drop_rate = 0.0;
  c.clutter_rate = 0.0;
  c.jitter_sigma = 0.0;
  const auto s = synth::gen_scenario(c);
  ASSERT_EQ(s.dets.size(), s.gt.box_count());
  std::size_t i = 0;
  for (int f = 1; f <= c.n_frames; ++f) {
    for (const auto& t : s.gt.tracks) {
      const auto& e = t.entries[static_cast<std::size_t>(f - 1)];
      EXPECT_EQ(s.dets[i].frame, f);
      EXPECT_EQ(s.dets[i].box, e.box);
      ++i;
    }
  }
}

TEST(Synth, SameSeedSameScenario) {
  synth::ScenarioConfig c;
  c.seed = 12345;
  const auto a = synth::gen_scenario(c);
  const auto b = synth::gen_scenario(c);
  EXPECT_EQ(a.gt, b.gt);
  EXPECT_EQ(a.dets, b.dets);
  c.seed = 12346;
  EXPECT_NE(synth::gen_scenario(c).dets, a.dets);
}

TEST(Synth, GeneratedDataValidates) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    synth::ScenarioConfig c;
    c.seed = seed;
    c.n_targets = static_cast<int>(seed % 9);
    c.jitter_sigma = 5.0;
    const auto s = synth::gen_scenario(c);
    EXPECT_NO_THROW(validate(s.gt));
    for (const auto& d : s.dets) EXPECT_NO_THROW(validate(d.box));
    for (const auto& t : s.gt.tracks) {
      for (const auto& e : t.entries) {
        EXPECT_GE(e.box.left, 0.0);
        EXPECT_GE(e.box.top, 0.0);
        EXPECT_LE(e.box.right(), c.arena_width + 1e-9);
        EXPECT_LE(e.box.bottom(), c.arena_height + 1e-9);
      }
    }
  }
}

TEST(Synth, HigherDropRateRemovesASubset) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    synth::ScenarioConfig lo, hi;
    lo.seed = hi.seed = seed;
    lo.drop_rate = 0.3;
    hi.drop_rate = 0.6;
    const auto a = synth::gen_scenario(lo), b = synth::gen_scenario(hi);
    EXPECT_EQ(a.gt, b.gt);
    for (const auto& d : b.dets) EXPECT_NE(std::find(a.dets.begin(), a.dets.end(), d), a.dets.end());
    EXPECT_LE(b.dets.size(), a.dets.size());
  }
}

TEST(Synth, RatesMoveErrorsMonotonically) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    long last_fn = -1;
    for (double drop : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      synth::ScenarioConfig c;
      c.seed = seed;
      c.drop_rate = drop;
      c.clutter_rate = 0.0;
      const long fn = det_fn(synth::gen_scenario(c));
      EXPECT_GE(fn, last_fn) << seed << " " << drop;
      last_fn = fn;
    }
    long last_fp = -1;
    for (double clutter : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      synth::ScenarioConfig c;
      c.seed = seed;
      c.clutter_rate = clutter;
      const long fp = det_fp(synth::gen_scenario(c));
      EXPECT_GE(fp, last_fp) << seed << " " << clutter;
      last_fp = fp;
    }
  }
}

TEST(Synth, ConfigValidation) {
  synth::ScenarioConfig c;
  c.arena_width = 50;
  try {
    synth::gen_scenario(c);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "arena");
  }
  c = {};
  c.drop_rate = 1.5;
  EXPECT_THROW(synth::validate(c), ValidationError);
  c = {};
  c.n_frames = 0;
  EXPECT_THROW(synth::validate(c), ValidationError);
  c = {};
  c.score.tp_mean = 0.3;
  EXPECT_THROW(synth::validate(c), ValidationError);
  EXPECT_THROW(synth::make_fixture("nope"), Error);
}

TEST(Fixtures, AllNamedFixturesBuildAndValidate) {
  for (const auto& name : synth::fixture_names()) {
    const auto fx = synth::make_fixture(name);
    EXPECT_EQ(fx.name, name);
    ASSERT_FALSE(fx.gts.empty());
    EXPECT_EQ(fx.gts.size(), fx.dets.size());
    EXPECT_FALSE(fx.trackers.empty());
    for (const auto& gt : fx.gts) EXPECT_NO_THROW(validate(gt));
  }
}

TEST(Fixtures, MatchTheGoldenManifest) {
  const nlohmann::json manifest = golden();
  for (const auto& name : synth::fixture_names()) {
    SCOPED_TRACE(name);
    const auto& want = manifest.at(name);
    const auto fx = synth::make_fixture(name);
    std::vector<SequenceClear> seqs;
    for (std::size_t s = 0; s < fx.gts.size(); ++s) {
      seqs.push_back(evaluate_clear(fx.gts[s], greedy_iou_track(fx.dets[s], fx.trackers[0])));
    }
    const MetricBundle b = aggregate(seqs);
    EXPECT_EQ(b.gt_total, want.at("gt").get<long>());
    EXPECT_EQ(b.fp, want.at("fp").get<long>());
    EXPECT_EQ(b.fn, want.at("fn").get<long>());
    EXPECT_EQ(b.ids, want.at("ids").get<long>());
    EXPECT_EQ(b.fm, want.at("fm").get<long>());
    if (want.contains("ap")) {
      const auto report = detection_report(fx.gts, fx.dets, {"overall"});
      // the manifest keeps six significant digits
      EXPECT_NEAR(report[0].ap, want.at("ap").get<double>(), 1e-6);
      EXPECT_NEAR(report[0].ap, synth::oracle_ap(report[0].curve), 1e-3);
    }
  }
}

TEST(Fixtures, OracleAgreesOnSmallFixtures) {
  for (const std::string name : {"perfect", "crossing"}) {
    const auto fx = synth::make_fixture(name);
    for (std::size_t s = 0; s < fx.gts.size(); ++s) {
      const TrackSet tracks = greedy_iou_track(fx.dets[s], fx.trackers[0]);
      const MetricBundle want = synth::oracle_clear(fx.gts[s], tracks);
      const MetricBundle got = evaluate_clear(fx.gts[s], tracks).bundle;
      EXPECT_EQ(got.fp, want.fp) << name;
      EXPECT_EQ(got.fn, want.fn) << name;
      EXPECT_EQ(got.ids, want.ids) << name;
      EXPECT_EQ(got.fm, want.fm) << name;
      EXPECT_NEAR(got.mota, want.mota, 1e-9) << name;
      EXPECT_NEAR(got.motp, want.motp, 1e-9) << name;
    }
  }
}

TEST(Fixtures, CrossingAndFpHeavyShapes) {
  const nlohmann::json manifest = golden();
  const auto& crossing = manifest.at("crossing");
  EXPECT_GE(crossing.at("ids").get<long>(), 1);
  const auto& fp_heavy = manifest.at("fp-heavy");
  EXPECT_LT(fp_heavy.at("ap").get<double>(), 1.0);
  EXPECT_LT(mota_from_counts(fp_heavy.at("gt"), fp_heavy.at("fn"), fp_heavy.at("fp"), fp_heavy.at("ids")), 0.0);
}
