#include "detraceval/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "detraceval/errors.hpp"

namespace detraceval {
namespace {

using Json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double to_real(std::string_view s, std::size_t line, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(s) + "'", line);
  }
  return v;
}

int to_int(std::string_view s, std::size_t line, const char* what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(s) + "'", line);
  }
  return v;
}

// Calls fn(fields, line_number) for every non-blank, non-comment line.
template <typename Fn>
void for_each_row(std::istream& in, Fn&& fn) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    fn(split_csv(line), line_no);
  }
}

BBox box_from_fields(const std::vector<std::string_view>& f, std::size_t first, std::size_t line) {
  return {to_real(f[first], line, "left"), to_real(f[first + 1], line, "top"),
          to_real(f[first + 2], line, "width"), to_real(f[first + 3], line, "height")};
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line); }

BBox box_from_json(const Json& j) {
  return {j.at("left").get<double>(), j.at("top").get<double>(), j.at("width").get<double>(),
          j.at("height").get<double>()};
}

void box_to_json(Json& j, const BBox& b) {
  j["left"] = b.left;
  j["top"] = b.top;
  j["width"] = b.width;
  j["height"] = b.height;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

GroundTruth parse_ground_truth(std::istream& in) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed ground truth JSON: ") + e.what(), 0);
  }
  GroundTruth gt;
  try {
    gt.sequence_id = doc.at("sequence_id").get<std::string>();
    gt.frame_count = doc.at("frame_count").get<int>();
    if (doc.contains("weather")) gt.weather = parse_weather(doc.at("weather").get<std::string>());
    if (doc.contains("difficulty")) gt.difficulty = parse_difficulty(doc.at("difficulty").get<std::string>());
    for (const auto& r : doc.value("ignore_regions", Json::array())) {
      IgnoreRegion region{box_from_json(r), std::nullopt};
      const bool has_first = r.contains("first_frame");
      const bool has_last = r.contains("last_frame");
      if (has_first != has_last) {
        throw ValidationError("ignore_regions", "first_frame and last_frame must appear together");
      }
      if (has_first) region.frame_range = {r.at("first_frame").get<int>(), r.at("last_frame").get<int>()};
      gt.ignore_regions.push_back(region);
    }
    for (const auto& t : doc.at("tracks")) {
      GtTrack track;
      const auto& id = t.at("target_id");
      track.target_id = id.is_string() ? id.get<std::string>() : id.dump();
      for (const auto& e : t.at("entries")) {
        GtEntry entry;
        entry.frame = e.at("frame").get<int>();
        entry.box = box_from_json(e);
        entry.occlusion_ratio = e.value("occlusion", 0.0);
        entry.truncation_ratio = e.value("truncation", 0.0);
        entry.category = parse_category(e.value("category", std::string("car")));
        track.entries.push_back(entry);
      }
      gt.tracks.push_back(std::move(track));
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("ground truth schema: ") + e.what(), 0);
  }
  validate(gt);
  return gt;
}

void write_ground_truth(std::ostream& out, const GroundTruth& gt) {
  Json doc;
  doc["sequence_id"] = gt.sequence_id;
  doc["frame_count"] = gt.frame_count;
  doc["weather"] = std::string(to_string(gt.weather));
  doc["difficulty"] = std::string(to_string(gt.difficulty));
  doc["ignore_regions"] = Json::array();
  for (const auto& r : gt.ignore_regions) {
    Json j;
    box_to_json(j, r.box);
    if (r.frame_range) {
      j["first_frame"] = r.frame_range->first;
      j["last_frame"] = r.frame_range->second;
    }
    doc["ignore_regions"].push_back(std::move(j));
  }
  doc["tracks"] = Json::array();
  for (const auto& t : gt.tracks) {
    Json jt;
    jt["target_id"] = t.target_id;
    jt["entries"] = Json::array();
    for (const auto& e : t.entries) {
      Json je;
      je["frame"] = e.frame;
      box_to_json(je, e.box);
      je["occlusion"] = e.occlusion_ratio;
      je["truncation"] = e.truncation_ratio;
      je["category"] = std::string(to_string(e.category));
      jt["entries"].push_back(std::move(je));
    }
    doc["tracks"].push_back(std::move(jt));
  }
  out << doc.dump(1) << '\n';
}

DetectionSet parse_detections(std::istream& in) {
  DetectionSet dets;
  for_each_row(in, [&](const std::vector<std::string_view>& f, std::size_t line) {
    if (f.size() < 7) throw ParseError("expected at least 7 fields, got " + std::to_string(f.size()), line);
    Detection d{to_int(f[0], line, "frame"), box_from_fields(f, 2, line), to_real(f[6], line, "score")};
    validate(d, at_line(line));
    dets.push_back(d);
  });
  return dets;
}

void write_detections(std::ostream& out, const DetectionSet& dets) {
  for (const auto& d : dets) {
    out << d.frame << ",-1," << format_real(d.box.left) << ',' << format_real(d.box.top) << ','
        << format_real(d.box.width) << ',' << format_real(d.box.height) << ',' << format_real(d.score)
        << ",-1,-1,-1\n";
  }
}

TrackSet parse_tracks(std::istream& in) {
  std::map<int, OutTrack> by_id;
  for_each_row(in, [&](const std::vector<std::string_view>& f, std::size_t line) {
    if (f.size() < 6) throw ParseError("expected at least 6 fields, got " + std::to_string(f.size()), line);
    const int frame = to_int(f[0], line, "frame");
    const int id = to_int(f[1], line, "track_id");
    if (frame < 1) throw ValidationError(at_line(line) + ".frame", "frame must be >= 1");
    if (id < 1) throw ValidationError(at_line(line) + ".track_id", "track_id must be a positive integer");
    const BBox box = box_from_fields(f, 2, line);
    validate(box, at_line(line) + ".box");
    auto& track = by_id[id];
    track.track_id = id;
    track.boxes.push_back({frame, box});
  });
  TrackSet tracks;
  tracks.reserve(by_id.size());
  for (auto& [id, t] : by_id) {
    std::stable_sort(t.boxes.begin(), t.boxes.end(),
                     [](const TrackBox& a, const TrackBox& b) { return a.frame < b.frame; });
    for (std::size_t i = 1; i < t.boxes.size(); ++i) {
      if (t.boxes[i].frame == t.boxes[i - 1].frame) {
        throw ValidationError("tracks[" + std::to_string(id) + "].frame " + std::to_string(t.boxes[i].frame),
                              "duplicate frame in track");
      }
    }
    tracks.push_back(std::move(t));
  }
  return tracks;
}

void write_tracks(std::ostream& out, const TrackSet& tracks) {
  struct Row {
    int frame;
    int id;
    const BBox* box;
  };
  std::vector<Row> rows;
  for (const auto& t : tracks) {
    for (const auto& b : t.boxes) rows.push_back({b.frame, t.track_id, &b.box});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  for (const auto& r : rows) {
    out << r.frame << ',' << r.id << ',' << format_real(r.box->left) << ',' << format_real(r.box->top) << ','
        << format_real(r.box->width) << ',' << format_real(r.box->height) << '\n';
  }
}

GroundTruth read_ground_truth_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return parse_ground_truth(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

DetectionSet read_detections_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return parse_detections(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

TrackSet read_tracks_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return parse_tracks(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_ground_truth_file(const std::filesystem::path& path, const GroundTruth& gt) {
  auto out = open_out(path);
  write_ground_truth(out, gt);
}

void write_detections_file(const std::filesystem::path& path, const DetectionSet& dets) {
  auto out = open_out(path);
  write_detections(out, dets);
}

void write_tracks_file(const std::filesystem::path& path, const TrackSet& tracks) {
  auto out = open_out(path);
  write_tracks(out, tracks);
}

}  // namespace detraceval
