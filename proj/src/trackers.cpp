#include "detraceval/trackers.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "detraceval/errors.hpp"
#include "detraceval/geometry.hpp"
#include "detraceval/io.hpp"

extern char** environ;

namespace detraceval {
namespace {

struct LiveTrack {
  int id;
  BBox last_box;
  int last_frame;
  std::vector<TrackBox> boxes;
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string tail_of(const std::filesystem::path& path, std::size_t max_chars = 2000) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (text.size() > max_chars) text = "..." + text.substr(text.size() - max_chars);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

std::filesystem::path make_workspace() {
  const auto root = workspace_root();
  std::filesystem::create_directories(root);
  std::string pattern = (root / "detraceval-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) {
    throw Error("cannot create tracker workspace under " + root.string() + ": " + std::strerror(errno));
  }
  return pattern;
}

}  // namespace

TrackSet greedy_iou_track(const DetectionSet& dets, const GreedyTrackerParams& params) {
  std::map<int, std::vector<const Detection*>> by_frame;
  for (const auto& d : dets) by_frame[d.frame].push_back(&d);

  std::vector<LiveTrack> active;
  std::vector<LiveTrack> closed;
  int next_id = 1;
  for (const auto& [frame, frame_dets] : by_frame) {
    // Close tracks idle for more than max_gap frames.
    std::vector<LiveTrack> still;
    for (auto& t : active) {
      if (frame - t.last_frame - 1 > params.max_gap) {
        closed.push_back(std::move(t));
      } else {
        still.push_back(std::move(t));
      }
    }
    active = std::move(still);

    struct Candidate {
      double iou;
      std::size_t track;
      std::size_t det;
    };
    std::vector<Candidate> candidates;
    for (std::size_t t = 0; t < active.size(); ++t) {
      for (std::size_t d = 0; d < frame_dets.size(); ++d) {
        const double o = iou(active[t].last_box, frame_dets[d]->box);
        if (o >= params.link_thr) candidates.push_back({o, t, d});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.iou > b.iou; });
    std::vector<char> track_used(active.size(), 0), det_used(frame_dets.size(), 0);
    for (const auto& c : candidates) {
      if (track_used[c.track] || det_used[c.det]) continue;
      track_used[c.track] = det_used[c.det] = 1;
      auto& t = active[c.track];
      t.last_box = frame_dets[c.det]->box;
      t.last_frame = frame;
      t.boxes.push_back({frame, t.last_box});
    }
    for (std::size_t d = 0; d < frame_dets.size(); ++d) {
      if (det_used[d]) continue;
      const BBox& box = frame_dets[d]->box;
      active.push_back({next_id++, box, frame, {{frame, box}}});
    }
  }
  closed.insert(closed.end(), std::make_move_iterator(active.begin()), std::make_move_iterator(active.end()));

  TrackSet out;
  for (auto& t : closed) {
    if (static_cast<int>(t.boxes.size()) < params.min_hits) continue;
    out.push_back({t.id, std::move(t.boxes)});
  }
  std::sort(out.begin(), out.end(), [](const OutTrack& a, const OutTrack& b) { return a.track_id < b.track_id; });
  return out;
}

TrackerAdapter parse_tracker_spec(std::string_view spec) {
  TrackerAdapter adapter;
  if (spec == "builtin") return adapter;
  if (spec.starts_with("cmd:")) {
    adapter.kind = TrackerKind::external;
    adapter.external.command = std::string(spec.substr(4));
    validate(adapter);
    return adapter;
  }
  throw Error("unknown tracker spec '" + std::string(spec) + "' (expected builtin or cmd:<template>)");
}

void validate(const TrackerAdapter& adapter) {
  if (adapter.kind == TrackerKind::builtin_greedy) {
    const auto& p = adapter.builtin;
    if (!(p.link_thr > 0.0 && p.link_thr <= 1.0)) throw ValidationError("link_thr", "must be in (0,1]");
    if (p.max_gap < 0) throw ValidationError("max_gap", "must be >= 0");
    if (p.min_hits < 1) throw ValidationError("min_hits", "must be >= 1");
    return;
  }
  const auto& cmd = adapter.external.command;
  if (cmd.find("{input}") == std::string::npos || cmd.find("{output}") == std::string::npos) {
    throw ValidationError("tracker command", "template must contain {input} and {output}");
  }
  if (adapter.external.timeout_seconds < 0.0) throw ValidationError("timeout", "must be >= 0");
}

std::filesystem::path workspace_root() {
  if (const char* dir = std::getenv("DETRACEVAL_TMPDIR"); dir != nullptr && *dir != '\0') return dir;
  return std::filesystem::temp_directory_path();
}

TrackSet run_external(const ExternalTracker& tracker, const DetectionSet& dets, const std::string& sequence_id) {
  const auto dir = make_workspace();
  const auto input = dir / "input.csv";
  const auto output = dir / "output.csv";
  const auto log = dir / "tracker.log";
  write_detections_file(input, dets);

  std::string command = tracker.command;
  replace_all(command, "{input}", shell_quote(input.string()));
  replace_all(command, "{output}", shell_quote(output.string()));
  replace_all(command, "{sequence}", shell_quote(sequence_id));
  const auto fail = [&](const std::string& why) -> TrackerFailure {
    std::string msg = "tracker command `" + tracker.command + "` " + why;
    const std::string diag = tail_of(log);
    if (!diag.empty()) msg += "\n" + diag;
    msg += "\n(workspace kept at " + dir.string() + ")";
    return TrackerFailure(msg, sequence_id);
  };

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  std::string sh = "/bin/sh", dash_c = "-c";
  char* argv[] = {sh.data(), dash_c.data(), command.data(), nullptr};
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, "/bin/sh", &actions, &attr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) throw fail(std::string("could not be started: ") + std::strerror(rc));

  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + std::chrono::duration<double>(tracker.timeout_seconds);
  int status = 0;
  while (true) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) throw fail(std::string("wait failed: ") + std::strerror(errno));
    if (tracker.timeout_seconds > 0.0 && Clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      throw fail("timed out after " + format_real(tracker.timeout_seconds) + " s");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (WIFSIGNALED(status)) throw fail("killed by signal " + std::to_string(WTERMSIG(status)));
  if (WIFEXITED(status) && WEXITSTATUS(status) != 0) {
    throw fail("exited with status " + std::to_string(WEXITSTATUS(status)));
  }
  if (!std::filesystem::exists(output)) throw fail("produced no output file");

  TrackSet tracks;
  try {
    tracks = read_tracks_file(output);
  } catch (const Error& e) {
    throw fail(std::string("produced unparseable output: ") + e.what());
  }
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  return tracks;
}

TrackerFn make_tracker(const TrackerAdapter& adapter) {
  validate(adapter);
  if (adapter.kind == TrackerKind::builtin_greedy) {
    return [params = adapter.builtin](const DetectionSet& dets, const std::string&) {
      return greedy_iou_track(dets, params);
    };
  }
  return [ext = adapter.external](const DetectionSet& dets, const std::string& sequence_id) {
    return run_external(ext, dets, sequence_id);
  };
}

}  // namespace detraceval
