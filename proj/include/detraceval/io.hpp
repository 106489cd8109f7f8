#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "detraceval/datamodel.hpp"

namespace detraceval {

// Shortest decimal text that parses back to exactly `v`.
std::string format_real(double v);

// Ground truth is a JSON document:
//   {sequence_id, frame_count, weather?, difficulty?,
//    ignore_regions: [{left, top, width, height, first_frame?, last_frame?}],
//    tracks: [{target_id, entries: [{frame, left, top, width, height,
//                                    occlusion, truncation, category}]}]}
// Optional keys default to the GroundTruth / GtEntry member defaults.
GroundTruth parse_ground_truth(std::istream& in);
void write_ground_truth(std::ostream& out, const GroundTruth& gt);

// One row per detection: frame,-1,left,top,width,height,score,-1,-1,-1
// Rows keep file order.
DetectionSet parse_detections(std::istream& in);
void write_detections(std::ostream& out, const DetectionSet& dets);

// One row per box: frame,track_id,left,top,width,height
// Extra trailing columns are ignored. Parsed tracks are ordered by ascending
// track_id; the writer emits rows ordered by (frame, track_id).
TrackSet parse_tracks(std::istream& in);
void write_tracks(std::ostream& out, const TrackSet& tracks);

GroundTruth read_ground_truth_file(const std::filesystem::path& path);
DetectionSet read_detections_file(const std::filesystem::path& path);
TrackSet read_tracks_file(const std::filesystem::path& path);
void write_ground_truth_file(const std::filesystem::path& path, const GroundTruth& gt);
void write_detections_file(const std::filesystem::path& path, const DetectionSet& dets);
void write_tracks_file(const std::filesystem::path& path, const TrackSet& tracks);

}  // namespace detraceval
