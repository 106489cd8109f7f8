#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "detraceval/datamodel.hpp"
#include "detraceval/pr_integration.hpp"

namespace detraceval {

struct GreedyTrackerParams {
  double link_thr = 0.5;
  int max_gap = 1;   // missed frames a track may bridge
  int min_hits = 1;  // shorter tracks are dropped from the output
};

// Frame-by-frame IoU linking. In each frame, (track, detection) pairs are
// accepted in descending IoU order (ties: older track, then earlier
// detection) when IoU >= link_thr; leftover detections open new tracks.
TrackSet greedy_iou_track(const DetectionSet& dets, const GreedyTrackerParams& params = {});

// Runs `command` through /bin/sh. The placeholders {input}, {output} and
// {sequence} are replaced by shell-quoted values. {input} holds the
// detections in detection CSV format; the command writes a track CSV to
// {output} and exits 0.
struct ExternalTracker {
  std::string command;
  double timeout_seconds = 0.0;  // 0: no limit
};

enum class TrackerKind { builtin_greedy, external };

struct TrackerAdapter {
  TrackerKind kind = TrackerKind::builtin_greedy;
  GreedyTrackerParams builtin;
  ExternalTracker external;
};

// "builtin" or "cmd:<template>".
TrackerAdapter parse_tracker_spec(std::string_view spec);
void validate(const TrackerAdapter& adapter);

// Workspace parent: $DETRACEVAL_TMPDIR when set, else the system temp dir.
std::filesystem::path workspace_root();

// Each call uses its own workspace directory, removed on success and kept
// (and named in the error) on failure. Throws TrackerFailure.
TrackSet run_external(const ExternalTracker& tracker, const DetectionSet& dets, const std::string& sequence_id);

TrackerFn make_tracker(const TrackerAdapter& adapter);

}  // namespace detraceval
