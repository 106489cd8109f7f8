#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "detraceval/datamodel.hpp"
#include "detraceval/trackers.hpp"

namespace detraceval::synth {

// Portable random stream: std::mt19937_64 (output fully specified by the
// standard) with hand-written distributions, so a seed reproduces the same
// scenario on every standard library. Sub-streams are keyed by SplitMix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream);

  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();                       // Box-Muller, standard normal
  // Inverse-CDF Poisson draw from a single uniform, so counts for a fixed
  // stream are non-decreasing in `mean`.
  int poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct ScoreModel {
  double tp_mean = 0.8;
  double clutter_mean = 0.4;
  double sigma = 0.1;
};

struct ScenarioConfig {
  std::string sequence_id = "synthetic";
  int n_targets = 5;
  int n_frames = 50;
  double arena_width = 960.0;
  double arena_height = 540.0;
  double speed_min = 1.0;  // pixels per frame
  double speed_max = 4.0;
  double box_min = 40.0;  // pixels, width and height drawn independently
  double box_max = 90.0;
  double drop_rate = 0.1;
  double clutter_rate = 0.5;  // expected clutter boxes per frame
  double jitter_sigma = 1.0;  // pixels
  ScoreModel score;
  Weather weather = Weather::sunny;
  Difficulty difficulty = Difficulty::medium;
  std::uint64_t seed = 1;
};

void validate(const ScenarioConfig& config);

struct Scenario {
  GroundTruth gt;
  DetectionSet dets;
};

// Constant-velocity targets reflecting off the arena walls. Each GT box draws
// the same random numbers whatever the rates, so raising drop_rate only
// removes detections and raising clutter_rate only adds clutter.
Scenario gen_scenario(const ScenarioConfig& config);

// A named, shipped scenario set. `trackers` lists the built-in tracker
// configurations the fixture is meant to be run with.
struct Fixture {
  std::string name;
  std::vector<GroundTruth> gts;
  std::vector<DetectionSet> dets;
  std::vector<GreedyTrackerParams> trackers;
};

std::vector<std::string> fixture_names();
// "perfect", "crossing", "ranking-flip", "fp-heavy".
Fixture make_fixture(const std::string& name);

}  // namespace detraceval::synth
