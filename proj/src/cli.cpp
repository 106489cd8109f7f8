#include "detraceval/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "detraceval/det_metrics.hpp"
#include "detraceval/errors.hpp"
#include "detraceval/io.hpp"
#include "detraceval/mot_metrics.hpp"
#include "detraceval/parallel.hpp"
#include "detraceval/pr_integration.hpp"
#include "detraceval/report_json.hpp"
#include "detraceval/synth.hpp"
#include "detraceval/trackers.hpp"

namespace fs = std::filesystem;

namespace detraceval::cli {
namespace {

struct CommonFlags {
  std::string gt_dir;
  std::string out_dir;
  double iou_thr = kDefaultIouThreshold;
  bool exclude_truncated = false;
  int jobs = 1;
};

struct DetFlags {
  std::string det_dir;
  std::vector<std::string> subsets{"overall"};
};

struct MotFlags {
  std::string track_dir;
};

struct SystemFlags {
  std::string det_dir;
  std::string tracker = "builtin";
  GreedyTrackerParams builtin;
  double timeout = 0.0;
  int thresholds = kDefaultThresholdCount;
  std::string spacing = "uniform";
  bool keep_going = false;
  std::string detector_name;
  std::string tracker_name;
};

struct SynthFlags {
  std::string fixture;
  synth::ScenarioConfig config;
  int sequences = 1;
  std::uint64_t seed = 1;
  GreedyTrackerParams builtin;
};

struct ReportFlags {
  std::string results_dir;
};

std::vector<GroundTruth> load_ground_truth(const std::vector<fs::path>& files, int jobs) {
  std::vector<GroundTruth> gts(files.size());
  std::vector<std::optional<std::string>> errors(files.size());
  parallel_for(files.size(), jobs, [&](std::size_t i) {
    try {
      gts[i] = read_ground_truth_file(files[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors) {
    if (e) throw Error(*e);
  }
  return gts;
}

template <typename T, typename Read>
std::vector<T> load_paired(const std::vector<fs::path>& gt_files, const std::vector<GroundTruth>& gts,
                           const fs::path& dir, const std::string& what, int jobs, Read read) {
  std::vector<fs::path> paths;
  for (const auto& f : gt_files) paths.push_back(paired_file(f, dir, what));
  std::vector<T> items(paths.size());
  std::vector<std::optional<std::string>> errors(paths.size());
  parallel_for(paths.size(), jobs, [&](std::size_t i) {
    try {
      items[i] = read(paths[i]);
      validate(items[i], gts[i].frame_count);
    } catch (const ValidationError& e) {
      errors[i] = paths[i].string() + ": " + e.what();
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors) {
    if (e) throw Error(*e);
  }
  return items;
}

DetEvalConfig det_config(const CommonFlags& c) { return {c.iou_thr, c.exclude_truncated}; }

void check_common(const CommonFlags& c) {
  if (!(c.iou_thr > 0.0 && c.iou_thr <= 1.0)) throw ValidationError("--iou-thr", "must be in (0,1]");
  if (c.jobs < 1) throw ValidationError("--jobs", "must be >= 1");
}

int eval_det(const CommonFlags& c, const DetFlags& f, std::ostream& out, std::ostream& err) {
  check_common(c);
  // Subsets named explicitly must have targets; the "all" expansion skips
  // the ones this benchmark has no targets for.
  std::vector<std::pair<std::string, bool>> subsets;
  for (const auto& s : f.subsets) {
    if (s == "all") {
      for (const auto& n : all_subset_names()) subsets.emplace_back(n, true);
    } else {
      parse_subset(s);
      subsets.emplace_back(s, false);
    }
  }
  const auto files = ground_truth_files(c.gt_dir);
  const auto gts = load_ground_truth(files, c.jobs);
  const auto dets = load_paired<DetectionSet>(files, gts, f.det_dir, "detection", c.jobs,
                                              [](const fs::path& p) { return read_detections_file(p); });
  std::vector<SubsetReport> report;
  for (const auto& [name, optional] : subsets) {
    if (std::any_of(report.begin(), report.end(), [&](const SubsetReport& r) { return r.subset == name; })) continue;
    if (optional) {
      const Subset subset = parse_subset(name);
      long targets = 0;
      for (std::size_t i = 0; i < gts.size(); ++i) {
        targets += label_detections(dets[i], gts[i], det_config(c), subset).target_count;
      }
      if (targets == 0 && !subset.is_overall()) {
        err << "note: subset " << name << " has no targets, skipped\n";
        continue;
      }
    }
    auto part = detection_report(gts, dets, {name}, det_config(c));
    report.push_back(std::move(part.front()));
  }

  const fs::path dir = c.out_dir;
  write_json_file(dir / "detection_report.json", to_json(std::span<const SubsetReport>(report)));
  for (const auto& r : report) {
    write_text_file(dir / ("pr_" + file_token(r.subset) + ".csv"), pr_curve_csv(r.curve));
    out << std::left << std::setw(20) << r.subset << " AP " << std::fixed << std::setprecision(4) << r.ap << '\n';
  }
  return 0;
}

int eval_mot(const CommonFlags& c, const MotFlags& f, std::ostream& out) {
  check_common(c);
  const auto files = ground_truth_files(c.gt_dir);
  const auto gts = load_ground_truth(files, c.jobs);
  const auto tracks = load_paired<TrackSet>(files, gts, f.track_dir, "track", c.jobs,
                                            [](const fs::path& p) { return read_tracks_file(p); });
  std::vector<SequenceClear> results(gts.size());
  const ClearConfig config{c.iou_thr, c.exclude_truncated};
  parallel_for(gts.size(), c.jobs, [&](std::size_t i) { results[i] = evaluate_clear(gts[i], tracks[i], config); });

  const fs::path dir = c.out_dir;
  Json summary;
  summary["sequences"] = Json::array();
  for (const auto& r : results) {
    write_json_file(dir / ("mot_" + file_token(r.sequence_id) + ".json"), to_json(r));
    summary["sequences"].push_back(r.sequence_id);
  }
  const MetricBundle total = aggregate(results);
  summary["bundle"] = to_json(total);
  write_json_file(dir / "mot_summary.json", summary);
  out << std::fixed << std::setprecision(2) << "MOTA " << total.mota << "  MOTP " << total.motp << "  MT "
      << total.mt_percent << "%  ML " << total.ml_percent << "%  IDS " << total.ids << "  FM " << total.fm << "  FP "
      << total.fp << "  FN " << total.fn << '\n';
  return 0;
}

int eval_system(const CommonFlags& c, const SystemFlags& f, std::ostream& out, std::ostream& err) {
  check_common(c);
  TrackerAdapter adapter = parse_tracker_spec(f.tracker);
  adapter.builtin = f.builtin;
  adapter.external.timeout_seconds = f.timeout;
  validate(adapter);
  if (f.thresholds < 2) throw ValidationError("--thresholds", "must be >= 2");
  const ThresholdSpacing spacing = f.spacing == "quantile" ? ThresholdSpacing::quantile : ThresholdSpacing::uniform;

  const auto files = ground_truth_files(c.gt_dir);
  const auto gts = load_ground_truth(files, c.jobs);
  const auto dets = load_paired<DetectionSet>(files, gts, f.det_dir, "detection", c.jobs,
                                              [](const fs::path& p) { return read_detections_file(p); });
  bool degenerate = false;
  const auto thresholds = select_thresholds(std::span<const DetectionSet>(dets), f.thresholds, spacing, &degenerate);

  SweepOptions options;
  options.iou_thr = c.iou_thr;
  options.exclude_truncated = c.exclude_truncated;
  options.keep_going = f.keep_going;
  options.jobs = c.jobs;
  const SweepResult sweep_result = sweep(gts, dets, make_tracker(adapter), thresholds, options);

  std::string detector = f.detector_name;
  if (detector.empty()) detector = fs::path(f.det_dir).lexically_normal().filename().string();
  if (detector.empty()) detector = fs::path(f.det_dir).lexically_normal().parent_path().filename().string();
  std::string tracker = f.tracker_name;
  if (tracker.empty()) tracker = adapter.kind == TrackerKind::builtin_greedy ? "builtin" : "external";

  PRIntegratedReport report = pr_report(sweep_result.points, detector, tracker);
  if (degenerate) report.warnings.insert(report.warnings.begin(), "all detection scores are equal");

  const fs::path dir = c.out_dir;
  const std::string stem = file_token(detector) + "__" + file_token(tracker);
  write_json_file(dir / (stem + ".system.json"), to_json(report, sweep_result.failures));
  write_text_file(dir / (stem + ".pr_curve.csv"), operating_points_csv(report.curve));

  out << std::fixed << std::setprecision(3) << detector << " + " << tracker << ": PR-MOTA " << report.pr_mota
      << "  PR-MOTP " << report.pr_motp << "  PR-IDS " << report.pr_ids << "  arc length " << report.arc_length
      << '\n';
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  for (const auto& failure : sweep_result.failures) {
    err << "error: tracker failed at threshold " << format_real(failure.threshold) << " on sequence "
        << failure.sequence_id << ": " << failure.message << '\n';
  }
  return sweep_result.failures.empty() ? 0 : 1;
}

int gen_synthetic(const CommonFlags& c, const SynthFlags& f, std::ostream& out) {
  if (c.out_dir.empty()) throw ValidationError("--out", "required");
  std::vector<GroundTruth> gts;
  std::vector<DetectionSet> dets;
  GreedyTrackerParams tracker = f.builtin;
  Json config;
  if (!f.fixture.empty()) {
    auto fx = synth::make_fixture(f.fixture);
    gts = std::move(fx.gts);
    dets = std::move(fx.dets);
    if (!fx.trackers.empty()) tracker = fx.trackers.front();
    config["fixture"] = f.fixture;
  } else {
    if (f.sequences < 1) throw ValidationError("--sequences", "must be >= 1");
    for (int k = 0; k < f.sequences; ++k) {
      synth::ScenarioConfig sc = f.config;
      sc.seed = f.seed + static_cast<std::uint64_t>(k);
      std::ostringstream id;
      id << "seq" << std::setw(3) << std::setfill('0') << k + 1;
      sc.sequence_id = id.str();
      auto s = synth::gen_scenario(sc);
      gts.push_back(std::move(s.gt));
      dets.push_back(std::move(s.dets));
    }
    const auto& sc = f.config;
    config["seed"] = f.seed;
    config["sequences"] = f.sequences;
    config["n_targets"] = sc.n_targets;
    config["n_frames"] = sc.n_frames;
    config["arena"] = {sc.arena_width, sc.arena_height};
    config["speed"] = {sc.speed_min, sc.speed_max};
    config["box_size"] = {sc.box_min, sc.box_max};
    config["drop_rate"] = sc.drop_rate;
    config["clutter_rate"] = sc.clutter_rate;
    config["jitter_sigma"] = sc.jitter_sigma;
    config["score_model"] = {{"tp_mean", sc.score.tp_mean},
                             {"clutter_mean", sc.score.clutter_mean},
                             {"sigma", sc.score.sigma}};
  }
  config["tracker"] = {{"link_thr", tracker.link_thr}, {"max_gap", tracker.max_gap}, {"min_hits", tracker.min_hits}};

  const fs::path dir = c.out_dir;
  config["sequence_ids"] = Json::array();
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const std::string token = file_token(gts[i].sequence_id);
    write_ground_truth_file(dir / "gt" / (token + ".json"), gts[i]);
    write_detections_file(dir / "det" / (token + ".csv"), dets[i]);
    write_tracks_file(dir / "tracks" / (token + ".csv"), greedy_iou_track(dets[i], tracker));
    config["sequence_ids"].push_back(gts[i].sequence_id);
  }
  write_json_file(dir / "config.json", config);
  out << "wrote " << gts.size() << " sequence(s) to " << dir.string() << '\n';
  return 0;
}

int report(const CommonFlags& c, const ReportFlags& f, std::ostream& out) {
  if (c.out_dir.empty()) throw ValidationError("--out", "required");
  std::vector<fs::path> files;
  if (!fs::is_directory(f.results_dir)) throw Error("results directory not found: " + f.results_dir);
  for (const auto& entry : fs::directory_iterator(f.results_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(".system.json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no *.system.json results in " + f.results_dir);

  std::vector<PRIntegratedReport> systems;
  for (const auto& p : files) {
    std::ifstream in(p);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ParseError(p.string() + ": " + e.what(), 0);
    }
    systems.push_back(system_report_from_json(j));
  }
  systems = rank_systems(std::move(systems));
  const auto trackers = average_over_detectors(systems);

  Json board;
  board["systems"] = Json::array();
  std::ostringstream sys_csv, trk_csv;
  sys_csv << "rank,detector,tracker,pr_mota,pr_motp,pr_mt,pr_ml,pr_ids,pr_fm,pr_fp,pr_fn\n";
  const auto num = [](double v) {
    std::ostringstream s;
    s << report_number(v).dump();
    return s.str();
  };
  int rank = 1;
  for (const auto& s : systems) {
    board["systems"].push_back({{"rank", rank},
                                {"detector", s.detector},
                                {"tracker", s.tracker},
                                {"pr_mota", report_number(s.pr_mota)},
                                {"pr_motp", report_number(s.pr_motp)},
                                {"pr_mt", report_number(s.pr_mt)},
                                {"pr_ml", report_number(s.pr_ml)},
                                {"pr_ids", report_number(s.pr_ids)},
                                {"pr_fm", report_number(s.pr_fm)},
                                {"pr_fp", report_number(s.pr_fp)},
                                {"pr_fn", report_number(s.pr_fn)}});
    sys_csv << rank << ',' << s.detector << ',' << s.tracker << ',' << num(s.pr_mota) << ',' << num(s.pr_motp) << ','
            << num(s.pr_mt) << ',' << num(s.pr_ml) << ',' << num(s.pr_ids) << ',' << num(s.pr_fm) << ','
            << num(s.pr_fp) << ',' << num(s.pr_fn) << '\n';
    ++rank;
  }
  board["trackers"] = Json::array();
  trk_csv << "tracker,detectors,pr_mota,pr_motp,pr_mt,pr_ml,pr_ids,pr_fm,pr_fp,pr_fn\n";
  for (const auto& t : trackers) {
    board["trackers"].push_back({{"tracker", t.tracker},
                                 {"detectors", t.detector_count},
                                 {"pr_mota", report_number(t.pr_mota)},
                                 {"pr_motp", report_number(t.pr_motp)},
                                 {"pr_mt", report_number(t.pr_mt)},
                                 {"pr_ml", report_number(t.pr_ml)},
                                 {"pr_ids", report_number(t.pr_ids)},
                                 {"pr_fm", report_number(t.pr_fm)},
                                 {"pr_fp", report_number(t.pr_fp)},
                                 {"pr_fn", report_number(t.pr_fn)}});
    trk_csv << t.tracker << ',' << t.detector_count << ',' << num(t.pr_mota) << ',' << num(t.pr_motp) << ','
            << num(t.pr_mt) << ',' << num(t.pr_ml) << ',' << num(t.pr_ids) << ',' << num(t.pr_fm) << ','
            << num(t.pr_fp) << ',' << num(t.pr_fn) << '\n';
  }
  const fs::path dir = c.out_dir;
  write_json_file(dir / "leaderboard.json", board);
  write_text_file(dir / "leaderboard_systems.csv", sys_csv.str());
  write_text_file(dir / "leaderboard_trackers.csv", trk_csv.str());

  out << std::left << std::setw(5) << "rank" << std::setw(16) << "detector" << std::setw(16) << "tracker"
      << std::right << std::setw(10) << "PR-MOTA" << std::setw(10) << "PR-MOTP" << std::setw(10) << "PR-IDS"
      << std::setw(10) << "PR-MT" << '\n';
  rank = 1;
  for (const auto& s : systems) {
    out << std::left << std::setw(5) << rank++ << std::setw(16) << s.detector << std::setw(16) << s.tracker
        << std::right << std::fixed << std::setprecision(2) << std::setw(10) << s.pr_mota << std::setw(10)
        << s.pr_motp << std::setw(10) << s.pr_ids << std::setw(10) << s.pr_mt << '\n';
  }
  return 0;
}

int default_jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

void add_common(CLI::App* cmd, CommonFlags& c, bool with_gt) {
  if (with_gt) cmd->add_option("--gt", c.gt_dir, "Directory of ground-truth <seq>.json files")->required();
  cmd->add_option("--out", c.out_dir, "Output directory")->required();
  cmd->add_option("--iou-thr", c.iou_thr, "IoU hit threshold")->capture_default_str();
  cmd->add_flag("--exclude-truncated", c.exclude_truncated, "Treat truncated GT boxes as ignorable");
  cmd->add_option("--jobs", c.jobs, "Worker threads (1 runs serially)")->capture_default_str();
}

void add_builtin_flags(CLI::App* cmd, GreedyTrackerParams& p) {
  cmd->add_option("--link-thr", p.link_thr, "Built-in tracker IoU link threshold")->capture_default_str();
  cmd->add_option("--max-gap", p.max_gap, "Built-in tracker frames a track may skip")->capture_default_str();
  cmd->add_option("--min-hits", p.min_hits, "Built-in tracker minimum track length")->capture_default_str();
}

}  // namespace

std::vector<fs::path> ground_truth_files(const fs::path& gt_dir) {
  if (!fs::is_directory(gt_dir)) throw Error("ground-truth directory not found: " + gt_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(gt_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no ground-truth .json files in " + gt_dir.string());
  return files;
}

fs::path paired_file(const fs::path& gt_file, const fs::path& dir, const std::string& what) {
  if (!fs::is_directory(dir)) throw Error(what + " directory not found: " + dir.string());
  const fs::path p = dir / (gt_file.stem().string() + ".csv");
  if (!fs::is_regular_file(p)) {
    throw Error("missing " + what + " file for sequence '" + gt_file.stem().string() + "': expected " + p.string());
  }
  return p;
}

std::string file_token(const std::string& s) {
  std::string out;
  for (char ch : s) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '-' ||
                    ch == '_' || ch == '.';
    out += ok ? ch : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint detection and tracking evaluation"};
  app.name("detraceval");
  app.require_subcommand(1);

  CommonFlags common;
  common.jobs = default_jobs();
  DetFlags det;
  MotFlags mot;
  SystemFlags sys;
  SynthFlags syn;
  ReportFlags rep;

  auto* det_cmd = app.add_subcommand("eval-det", "Detection PR curves and AP per subset");
  add_common(det_cmd, common, true);
  det_cmd->add_option("--det", det.det_dir, "Directory of detection <seq>.csv files")->required();
  det_cmd->add_option("--subset", det.subsets, "Subset name, repeatable; 'all' for every subset")
      ->capture_default_str();

  auto* mot_cmd = app.add_subcommand("eval-mot", "CLEAR MOT metrics of tracker output");
  add_common(mot_cmd, common, true);
  mot_cmd->add_option("--tracks", mot.track_dir, "Directory of track <seq>.csv files")->required();

  auto* sys_cmd = app.add_subcommand("eval-system", "Threshold sweep and PR-integrated metrics");
  add_common(sys_cmd, common, true);
  sys_cmd->add_option("--det", sys.det_dir, "Directory of detection <seq>.csv files")->required();
  sys_cmd->add_option("--tracker", sys.tracker, "builtin or cmd:<template with {input} {output} {sequence}>")
      ->capture_default_str();
  add_builtin_flags(sys_cmd, sys.builtin);
  sys_cmd->add_option("--timeout", sys.timeout, "External tracker timeout in seconds (0: none)")
      ->capture_default_str();
  sys_cmd->add_option("--thresholds", sys.thresholds, "Number of score thresholds")->capture_default_str();
  sys_cmd->add_option("--spacing", sys.spacing, "Threshold spacing")
      ->check(CLI::IsMember({"uniform", "quantile"}))
      ->capture_default_str();
  sys_cmd->add_flag("--keep-going", sys.keep_going, "Record tracker failures and continue");
  sys_cmd->add_option("--detector", sys.detector_name, "Detector name in reports (default: det directory name)");
  sys_cmd->add_option("--tracker-name", sys.tracker_name, "Tracker name in reports");

  auto* syn_cmd = app.add_subcommand("gen-synthetic", "Write a synthetic benchmark or a named fixture");
  syn_cmd->add_option("--out", common.out_dir, "Output directory")->required();
  syn_cmd->add_option("--fixture", syn.fixture, "Named fixture")->check(CLI::IsMember(synth::fixture_names()));
  auto* seqs = syn_cmd->add_option("--sequences", syn.sequences, "Number of sequences")->capture_default_str();
  auto* seed = syn_cmd->add_option("--seed", syn.seed, "Base seed; sequence k uses seed + k")->capture_default_str();
  auto* targets = syn_cmd->add_option("--targets", syn.config.n_targets, "Targets per sequence")->capture_default_str();
  auto* frames = syn_cmd->add_option("--frames", syn.config.n_frames, "Frames per sequence")->capture_default_str();
  auto* drop = syn_cmd->add_option("--drop-rate", syn.config.drop_rate, "Per-box miss probability")
                   ->capture_default_str();
  auto* clutter = syn_cmd->add_option("--clutter-rate", syn.config.clutter_rate, "Mean clutter boxes per frame")
                      ->capture_default_str();
  auto* jitter = syn_cmd->add_option("--jitter", syn.config.jitter_sigma, "Box jitter sigma in pixels")
                     ->capture_default_str();
  for (auto* opt : {seqs, seed, targets, frames, drop, clutter, jitter}) opt->excludes("--fixture");
  add_builtin_flags(syn_cmd, syn.builtin);

  auto* rep_cmd = app.add_subcommand("report", "Leaderboard tables from eval-system results");
  rep_cmd->add_option("--results", rep.results_dir, "Directory of *.system.json files")->required();
  rep_cmd->add_option("--out", common.out_dir, "Output directory")->required();

  std::vector<const char*> argv{"detraceval"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (det_cmd->parsed()) return eval_det(common, det, out, err);
    if (mot_cmd->parsed()) return eval_mot(common, mot, out);
    if (sys_cmd->parsed()) return eval_system(common, sys, out, err);
    if (syn_cmd->parsed()) return gen_synthetic(common, syn, out);
    if (rep_cmd->parsed()) return report(common, rep, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace detraceval::cli
