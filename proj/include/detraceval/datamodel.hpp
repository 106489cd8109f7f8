#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "detraceval/box.hpp"

namespace detraceval {

enum class Category { car, bus, van, others };
enum class Weather { cloudy, night, sunny, rainy };
enum class Difficulty { easy, medium, hard };

std::string_view to_string(Category c);
std::string_view to_string(Weather w);
std::string_view to_string(Difficulty d);
Category parse_category(std::string_view s);
Weather parse_weather(std::string_view s);
Difficulty parse_difficulty(std::string_view s);

// Entries with truncation above this are kept in files but flagged.
inline constexpr double kTruncationFlagRatio = 0.5;

struct GtEntry {
  int frame = 1;
  BBox box;
  double occlusion_ratio = 0.0;
  double truncation_ratio = 0.0;
  Category category = Category::car;

  bool truncated() const { return truncation_ratio > kTruncationFlagRatio; }
  friend bool operator==(const GtEntry&, const GtEntry&) = default;
};

struct GtTrack {
  std::string target_id;
  std::vector<GtEntry> entries;  // strictly increasing frames

  friend bool operator==(const GtTrack&, const GtTrack&) = default;
};

struct IgnoreRegion {
  BBox box;
  std::optional<std::pair<int, int>> frame_range;  // inclusive; absent means every frame

  bool active(int frame) const {
    return !frame_range || (frame >= frame_range->first && frame <= frame_range->second);
  }
  friend bool operator==(const IgnoreRegion&, const IgnoreRegion&) = default;
};

struct GroundTruth {
  std::string sequence_id;
  int frame_count = 1;
  std::vector<GtTrack> tracks;
  std::vector<IgnoreRegion> ignore_regions;
  Weather weather = Weather::sunny;
  Difficulty difficulty = Difficulty::medium;

  std::size_t box_count() const;
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct Detection {
  int frame = 1;
  BBox box;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

using DetectionSet = std::vector<Detection>;

struct TrackBox {
  int frame = 1;
  BBox box;

  friend bool operator==(const TrackBox&, const TrackBox&) = default;
};

struct OutTrack {
  int track_id = 1;
  std::vector<TrackBox> boxes;  // strictly increasing frames

  friend bool operator==(const OutTrack&, const OutTrack&) = default;
};

using TrackSet = std::vector<OutTrack>;

// Each throws ValidationError naming the first offending field.
void validate(const BBox& box, const std::string& field = "box");
void validate(const GroundTruth& gt);
void validate(const Detection& det, const std::string& field = "detection");
void validate(const DetectionSet& dets);
void validate(const TrackSet& tracks);
// Additionally checks every frame against the sequence length.
void validate(const DetectionSet& dets, int frame_count);
void validate(const TrackSet& tracks, int frame_count);

}  // namespace detraceval
