#include "detraceval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "detraceval/errors.hpp"
#include "detraceval/geometry.hpp"

namespace detraceval::synth {
namespace {

enum Stream : std::uint64_t { kMotion = 1, kDetection = 2, kClutter = 3 };

struct Target {
  double x, y, w, h, vx, vy;
  Category category;
};

// Reflect a coordinate into [0, limit].
void reflect(double& pos, double& vel, double limit) {
  for (int guard = 0; guard < 8 && (pos < 0.0 || pos > limit); ++guard) {
    if (pos < 0.0) {
      pos = -pos;
      vel = -vel;
    }
    if (pos > limit) {
      pos = 2.0 * limit - pos;
      vel = -vel;
    }
  }
  pos = std::clamp(pos, 0.0, limit);
}

// Fraction of each box hidden by boxes whose bottom edge is lower in the image.
std::vector<double> occlusion_ratios(const std::vector<BBox>& boxes) {
  std::vector<double> ratios(boxes.size(), 0.0);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    std::vector<BBox> front;
    for (std::size_t j = 0; j < boxes.size(); ++j) {
      if (j != i && boxes[j].bottom() > boxes[i].bottom()) front.push_back(boxes[j]);
    }
    ratios[i] = std::min(1.0, covered_area<double>(boxes[i], front) / boxes[i].area());
  }
  return ratios;
}

// Ground truth from explicit per-frame boxes; boxes[t][f] is target t at frame f+1.
GroundTruth gt_from_paths(const std::string& id, const std::vector<std::vector<BBox>>& boxes) {
  GroundTruth gt;
  gt.sequence_id = id;
  gt.frame_count = boxes.empty() ? 1 : static_cast<int>(boxes.front().size());
  for (std::size_t t = 0; t < boxes.size(); ++t) {
    GtTrack track{std::to_string(t + 1), {}};
    for (std::size_t f = 0; f < boxes[t].size(); ++f) {
      track.entries.push_back({static_cast<int>(f) + 1, boxes[t][f], 0.0, 0.0, Category::car});
    }
    gt.tracks.push_back(std::move(track));
  }
  return gt;
}

Fixture perfect_fixture() {
  // Four targets on disjoint horizontal lanes.
  constexpr int kFrames = 30;
  std::vector<std::vector<BBox>> paths(4);
  for (int t = 0; t < 4; ++t) {
    double x = 50.0 + 100.0 * t, vx = 3.0 + t;
    for (int f = 0; f < kFrames; ++f) {
      paths[t].push_back({x, 40.0 + 120.0 * t, 80.0, 60.0});
      x += vx;
      reflect(x, vx, 960.0 - 80.0);
    }
  }
  Fixture fx{"perfect", {gt_from_paths("perfect", paths)}, {{}}, {GreedyTrackerParams{}}};
  for (const auto& track : fx.gts[0].tracks) {
    for (const auto& e : track.entries) fx.dets[0].push_back({e.frame, e.box, 1.0});
  }
  std::stable_sort(fx.dets[0].begin(), fx.dets[0].end(),
                   [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
  return fx;
}

Fixture crossing_fixture() {
  // Two targets meet head-on in one lane; target 1 is missed where they
  // coincide, which makes IoU linking swap the two identities.
  constexpr int kFrames = 21;
  constexpr int kMeetFrame = 11;
  std::vector<std::vector<BBox>> paths(2);
  for (int f = 0; f < kFrames; ++f) {
    paths[0].push_back({100.0 + 10.0 * f, 200.0, 40.0, 40.0});
    paths[1].push_back({300.0 - 10.0 * f, 200.0, 40.0, 40.0});
  }
  Fixture fx{"crossing", {gt_from_paths("crossing", paths)}, {{}}, {GreedyTrackerParams{}}};
  for (int f = 1; f <= kFrames; ++f) {
    for (int t = 0; t < 2; ++t) {
      if (t == 0 && f == kMeetFrame) continue;
      fx.dets[0].push_back({f, paths[t][static_cast<std::size_t>(f - 1)], 0.9});
    }
  }
  return fx;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::poisson(double mean) {
  const double u = uniform();
  if (mean <= 0.0) return 0;
  double p = std::exp(-mean);
  double cdf = p;
  int k = 0;
  while (u >= cdf && k < 100000) {
    ++k;
    p *= mean / k;
    cdf += p;
    if (p == 0.0 && cdf < u) break;  // tail underflow
  }
  return k;
}

void validate(const ScenarioConfig& c) {
  if (c.n_targets < 0) throw ValidationError("n_targets", "must be >= 0");
  if (c.n_frames < 1) throw ValidationError("n_frames", "must be >= 1");
  if (!(c.drop_rate >= 0.0 && c.drop_rate <= 1.0)) throw ValidationError("drop_rate", "must be in [0,1]");
  if (!(c.clutter_rate >= 0.0)) throw ValidationError("clutter_rate", "must be >= 0");
  if (!(c.jitter_sigma >= 0.0)) throw ValidationError("jitter_sigma", "must be >= 0");
  if (!(c.box_min > 0.0 && c.box_max >= c.box_min)) throw ValidationError("box_size", "need 0 < min <= max");
  if (!(c.speed_min >= 0.0 && c.speed_max >= c.speed_min)) throw ValidationError("speed", "need 0 <= min <= max");
  if (c.arena_width < c.box_max || c.arena_height < c.box_max) {
    throw ValidationError("arena", "degenerate arena smaller than box_size");
  }
  if (!(c.score.tp_mean > c.score.clutter_mean)) {
    throw ValidationError("score_model", "tp_mean must exceed clutter_mean");
  }
  if (!(c.score.sigma >= 0.0)) throw ValidationError("score_model.sigma", "must be >= 0");
}

Scenario gen_scenario(const ScenarioConfig& c) {
  validate(c);
  Rng motion(c.seed, kMotion);
  std::vector<Target> targets;
  for (int t = 0; t < c.n_targets; ++t) {
    Target tg{};
    tg.w = motion.uniform(c.box_min, c.box_max);
    tg.h = motion.uniform(c.box_min, c.box_max);
    tg.x = motion.uniform(0.0, c.arena_width - tg.w);
    tg.y = motion.uniform(0.0, c.arena_height - tg.h);
    const double speed = motion.uniform(c.speed_min, c.speed_max);
    const double heading = motion.uniform(0.0, 2.0 * std::numbers::pi);
    tg.vx = speed * std::cos(heading);
    tg.vy = speed * std::sin(heading);
    tg.category = static_cast<Category>(std::min(3, static_cast<int>(motion.uniform() * 4.0)));
    targets.push_back(tg);
  }

  Scenario s;
  s.gt.sequence_id = c.sequence_id;
  s.gt.frame_count = c.n_frames;
  s.gt.weather = c.weather;
  s.gt.difficulty = c.difficulty;
  for (int t = 0; t < c.n_targets; ++t) s.gt.tracks.push_back({std::to_string(t + 1), {}});

  Rng detection(c.seed, kDetection);
  for (int f = 1; f <= c.n_frames; ++f) {
    std::vector<BBox> boxes;
    for (const auto& tg : targets) boxes.push_back({tg.x, tg.y, tg.w, tg.h});
    const std::vector<double> occlusion = occlusion_ratios(boxes);

    for (std::size_t t = 0; t < targets.size(); ++t) {
      s.gt.tracks[t].entries.push_back({f, boxes[t], occlusion[t], 0.0, targets[t].category});
      // Fixed draw count per box keeps the stream aligned across configs.
      const double u_drop = detection.uniform();
      const double jl = detection.normal(), jt = detection.normal();
      const double jw = detection.normal(), jh = detection.normal();
      const double zs = detection.normal();
      if (u_drop < c.drop_rate) continue;
      const double sg = c.jitter_sigma;
      BBox box{boxes[t].left + sg * jl, boxes[t].top + sg * jt, std::max(1.0, boxes[t].width + sg * jw),
               std::max(1.0, boxes[t].height + sg * jh)};
      s.dets.push_back({f, box, c.score.tp_mean + c.score.sigma * zs});
    }

    Rng clutter(c.seed, (static_cast<std::uint64_t>(kClutter) << 32) | static_cast<std::uint64_t>(f));
    const int n_clutter = clutter.poisson(c.clutter_rate);
    for (int k = 0; k < n_clutter; ++k) {
      const double w = clutter.uniform(c.box_min, c.box_max);
      const double h = clutter.uniform(c.box_min, c.box_max);
      const double x = clutter.uniform(0.0, c.arena_width - w);
      const double y = clutter.uniform(0.0, c.arena_height - h);
      s.dets.push_back({f, {x, y, w, h}, c.score.clutter_mean + c.score.sigma * clutter.normal()});
    }

    for (auto& tg : targets) {
      tg.x += tg.vx;
      tg.y += tg.vy;
      reflect(tg.x, tg.vx, c.arena_width - tg.w);
      reflect(tg.y, tg.vy, c.arena_height - tg.h);
    }
  }
  return s;
}

std::vector<std::string> fixture_names() { return {"perfect", "crossing", "ranking-flip", "fp-heavy"}; }

Fixture make_fixture(const std::string& name) {
  if (name == "perfect") return perfect_fixture();
  if (name == "crossing") return crossing_fixture();
  if (name == "fp-heavy") {
    ScenarioConfig c;
    c.sequence_id = "fp-heavy";
    c.n_targets = 2;
    c.n_frames = 30;
    c.drop_rate = 0.1;
    c.clutter_rate = 6.0;
    c.score = {0.7, 0.5, 0.15};
    c.seed = 7;
    Scenario s = gen_scenario(c);
    return {name, {std::move(s.gt)}, {std::move(s.dets)}, {GreedyTrackerParams{}}};
  }
  if (name == "ranking-flip") {
    // Tracker A keeps every track; tracker B drops tracks shorter than four
    // boxes. B wins while clutter is admitted and loses once the threshold
    // fragments the true tracks.
    ScenarioConfig c;
    c.sequence_id = "ranking-flip";
    c.n_targets = 6;
    c.n_frames = 60;
    c.box_min = 50.0;
    c.box_max = 100.0;
    c.speed_min = 1.0;
    c.speed_max = 3.0;
    c.drop_rate = 0.15;
    c.clutter_rate = 2.0;
    c.jitter_sigma = 1.0;
    c.score = {0.7, 0.4, 0.15};
    c.seed = 11;
    Scenario s = gen_scenario(c);
    return {name,
            {std::move(s.gt)},
            {std::move(s.dets)},
            {GreedyTrackerParams{0.5, 1, 1}, GreedyTrackerParams{0.5, 1, 4}}};
  }
  throw Error("unknown fixture '" + name + "'");
}

}  // namespace detraceval::synth
