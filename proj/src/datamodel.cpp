#include "detraceval/datamodel.hpp"

#include <array>
#include <cmath>
#include <set>

#include "detraceval/errors.hpp"

namespace detraceval {
namespace {

constexpr std::array<std::string_view, 4> kCategoryNames{"car", "bus", "van", "others"};
constexpr std::array<std::string_view, 4> kWeatherNames{"cloudy", "night", "sunny", "rainy"};
constexpr std::array<std::string_view, 3> kDifficultyNames{"easy", "medium", "hard"};

template <typename Enum, std::size_t N>
Enum lookup(const std::array<std::string_view, N>& names, std::string_view s, const char* field) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  throw ValidationError(field, "unknown value '" + std::string(s) + "'");
}

void check_ratio(double r, const std::string& field) {
  if (!(r >= 0.0 && r <= 1.0)) throw ValidationError(field, "ratio out of range");
}

}  // namespace

std::string_view to_string(Category c) { return kCategoryNames.at(static_cast<std::size_t>(c)); }
std::string_view to_string(Weather w) { return kWeatherNames.at(static_cast<std::size_t>(w)); }
std::string_view to_string(Difficulty d) { return kDifficultyNames.at(static_cast<std::size_t>(d)); }

Category parse_category(std::string_view s) { return lookup<Category>(kCategoryNames, s, "category"); }
Weather parse_weather(std::string_view s) { return lookup<Weather>(kWeatherNames, s, "weather"); }
Difficulty parse_difficulty(std::string_view s) {
  return lookup<Difficulty>(kDifficultyNames, s, "difficulty");
}

std::size_t GroundTruth::box_count() const {
  std::size_t n = 0;
  for (const auto& t : tracks) n += t.entries.size();
  return n;
}

void validate(const BBox& box, const std::string& field) {
  if (!std::isfinite(box.left) || !std::isfinite(box.top) || !std::isfinite(box.width) ||
      !std::isfinite(box.height)) {
    throw ValidationError(field, "non-finite coordinate");
  }
  if (!(box.width > 0.0) || !(box.height > 0.0)) throw ValidationError(field, "degenerate box");
}

void validate(const GroundTruth& gt) {
  if (gt.frame_count < 1) throw ValidationError("frame_count", "must be positive");
  std::set<std::string> ids;
  for (const auto& track : gt.tracks) {
    const std::string where = "tracks[" + track.target_id + "]";
    if (!ids.insert(track.target_id).second) throw ValidationError(where, "duplicate target_id");
    if (track.entries.empty()) throw ValidationError(where, "track has no entries");
    int prev = 0;
    for (const auto& e : track.entries) {
      const std::string ef = where + ".frame " + std::to_string(e.frame);
      if (e.frame < 1) throw ValidationError(ef, "frame must be >= 1");
      if (e.frame > gt.frame_count) throw ValidationError(ef, "frame beyond frame_count");
      if (e.frame == prev) throw ValidationError(ef, "duplicate frame in track");
      if (e.frame < prev) throw ValidationError(ef, "frames not increasing");
      prev = e.frame;
      validate(e.box, ef + ".box");
      check_ratio(e.occlusion_ratio, ef + ".occlusion");
      check_ratio(e.truncation_ratio, ef + ".truncation");
    }
  }
  for (std::size_t i = 0; i < gt.ignore_regions.size(); ++i) {
    const auto& r = gt.ignore_regions[i];
    const std::string where = "ignore_regions[" + std::to_string(i) + "]";
    validate(r.box, where);
    if (r.frame_range && r.frame_range->first > r.frame_range->second) {
      throw ValidationError(where, "first_frame > last_frame");
    }
  }
}

void validate(const Detection& det, const std::string& field) {
  if (det.frame < 1) throw ValidationError(field + ".frame", "frame must be >= 1");
  if (!std::isfinite(det.score)) throw ValidationError(field + ".score", "non-finite score");
  validate(det.box, field + ".box");
}

void validate(const DetectionSet& dets) {
  for (std::size_t i = 0; i < dets.size(); ++i) validate(dets[i], "detections[" + std::to_string(i) + "]");
}

void validate(const TrackSet& tracks) {
  std::set<int> ids;
  for (const auto& t : tracks) {
    const std::string where = "tracks[" + std::to_string(t.track_id) + "]";
    if (!ids.insert(t.track_id).second) throw ValidationError(where, "duplicate track_id");
    int prev = 0;
    for (const auto& b : t.boxes) {
      const std::string bf = where + ".frame " + std::to_string(b.frame);
      if (b.frame < 1) throw ValidationError(bf, "frame must be >= 1");
      if (b.frame <= prev) throw ValidationError(bf, "duplicate or decreasing frame in track");
      prev = b.frame;
      validate(b.box, bf + ".box");
    }
  }
}

void validate(const DetectionSet& dets, int frame_count) {
  validate(dets);
  for (const auto& d : dets) {
    if (d.frame > frame_count) {
      throw ValidationError("detection.frame " + std::to_string(d.frame), "frame beyond frame_count");
    }
  }
}

void validate(const TrackSet& tracks, int frame_count) {
  validate(tracks);
  for (const auto& t : tracks) {
    if (!t.boxes.empty() && t.boxes.back().frame > frame_count) {
      throw ValidationError("tracks[" + std::to_string(t.track_id) + "].frame " +
                                std::to_string(t.boxes.back().frame),
                            "frame beyond frame_count");
    }
  }
}

}  // namespace detraceval
