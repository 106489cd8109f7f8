#include "detraceval/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "detraceval/errors.hpp"

namespace detraceval {
namespace {

double number_or_nan(const Json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

std::string csv_real(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

MetricBundle bundle_from_json(const Json& j) {
  MetricBundle b;
  b.mota = number_or_nan(j.at("mota"));
  b.motp = number_or_nan(j.at("motp"));
  b.mt = j.at("mt").get<long>();
  b.mt_percent = number_or_nan(j.at("mt_percent"));
  b.ml = j.at("ml").get<long>();
  b.ml_percent = number_or_nan(j.at("ml_percent"));
  b.ids = j.at("ids").get<long>();
  b.fm = j.at("fm").get<long>();
  b.fp = j.at("fp").get<long>();
  b.fn = j.at("fn").get<long>();
  b.gt_total = j.at("gt").get<long>();
  b.matches = j.at("matches").get<long>();
  b.track_total = j.at("gt_tracks").get<long>();
  return b;
}

}  // namespace

Json report_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

Json to_json(const PRPoint& p) {
  Json j;
  j["threshold"] = report_number(p.threshold);
  j["precision"] = report_number(p.precision);
  j["recall"] = report_number(p.recall);
  j["tp"] = p.tp;
  j["fp"] = p.fp;
  j["fn"] = p.fn;
  return j;
}

Json to_json(const MetricBundle& b) {
  Json j;
  j["mota"] = report_number(b.mota);
  j["motp"] = report_number(b.motp);
  j["mt"] = b.mt;
  j["mt_percent"] = report_number(b.mt_percent);
  j["ml"] = b.ml;
  j["ml_percent"] = report_number(b.ml_percent);
  j["ids"] = b.ids;
  j["fm"] = b.fm;
  j["fp"] = b.fp;
  j["fn"] = b.fn;
  j["gt"] = b.gt_total;
  j["matches"] = b.matches;
  j["gt_tracks"] = b.track_total;
  return j;
}

Json to_json(const FrameCounts& c) {
  Json j;
  j["frame"] = c.frame;
  j["gt"] = c.gt;
  j["matches"] = c.matches;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["ids"] = c.ids;
  j["iou_sum"] = report_number(c.iou_sum);
  return j;
}

Json to_json(const SequenceClear& s) {
  Json j;
  j["sequence_id"] = s.sequence_id;
  j["bundle"] = to_json(s.bundle);
  j["per_frame_counts"] = Json::array();
  for (const auto& c : s.frames) j["per_frame_counts"].push_back(to_json(c));
  return j;
}

Json to_json(std::span<const SubsetReport> report) {
  Json j = Json::object();
  for (const auto& r : report) {
    Json entry;
    entry["ap"] = report_number(r.ap);
    entry["points"] = Json::array();
    for (const auto& p : r.curve.points) entry["points"].push_back(to_json(p));
    j[r.subset] = std::move(entry);
  }
  return j;
}

Json to_json(const PRIntegratedReport& r, std::span<const SweepFailure> failures) {
  Json j;
  j["detector"] = r.detector;
  j["tracker"] = r.tracker;
  j["points"] = Json::array();
  for (const auto& op : r.curve) {
    Json p;
    p["threshold"] = report_number(op.threshold);
    p["p"] = report_number(op.precision);
    p["r"] = report_number(op.recall);
    p["bundle"] = to_json(op.metrics);
    j["points"].push_back(std::move(p));
  }
  Json scores;
  scores["pr_mota"] = report_number(r.pr_mota);
  scores["pr_motp"] = report_number(r.pr_motp);
  scores["pr_mt"] = report_number(r.pr_mt);
  scores["pr_ml"] = report_number(r.pr_ml);
  scores["pr_ids"] = report_number(r.pr_ids);
  scores["pr_fm"] = report_number(r.pr_fm);
  scores["pr_fp"] = report_number(r.pr_fp);
  scores["pr_fn"] = report_number(r.pr_fn);
  j["scores"] = std::move(scores);
  j["arc_length"] = report_number(r.arc_length);
  j["warnings"] = r.warnings;
  j["failures"] = Json::array();
  for (const auto& f : failures) {
    j["failures"].push_back({{"threshold", report_number(f.threshold)},
                             {"sequence_id", f.sequence_id},
                             {"message", f.message}});
  }
  return j;
}

PRIntegratedReport system_report_from_json(const Json& j) {
  PRIntegratedReport r;
  try {
    r.detector = j.at("detector").get<std::string>();
    r.tracker = j.at("tracker").get<std::string>();
    for (const auto& p : j.at("points")) {
      OperatingPoint op;
      op.threshold = number_or_nan(p.at("threshold"));
      op.precision = number_or_nan(p.at("p"));
      op.recall = number_or_nan(p.at("r"));
      op.metrics = bundle_from_json(p.at("bundle"));
      r.curve.push_back(op);
    }
    const auto& s = j.at("scores");
    r.pr_mota = number_or_nan(s.at("pr_mota"));
    r.pr_motp = number_or_nan(s.at("pr_motp"));
    r.pr_mt = number_or_nan(s.at("pr_mt"));
    r.pr_ml = number_or_nan(s.at("pr_ml"));
    r.pr_ids = number_or_nan(s.at("pr_ids"));
    r.pr_fm = number_or_nan(s.at("pr_fm"));
    r.pr_fp = number_or_nan(s.at("pr_fp"));
    r.pr_fn = number_or_nan(s.at("pr_fn"));
    r.arc_length = number_or_nan(j.at("arc_length"));
    for (const auto& w : j.value("warnings", Json::array())) r.warnings.push_back(w.get<std::string>());
  } catch (const Json::exception& e) {
    throw ParseError(std::string("system report: ") + e.what(), 0);
  }
  return r;
}

std::string pr_curve_csv(const PRCurve& curve) {
  std::ostringstream out;
  out << "threshold,precision,recall,tp,fp,fn\n";
  for (const auto& p : curve.points) {
    out << csv_real(p.threshold) << ',' << csv_real(p.precision) << ',' << csv_real(p.recall) << ',' << p.tp << ','
        << p.fp << ',' << p.fn << '\n';
  }
  return out.str();
}

std::string operating_points_csv(std::span<const OperatingPoint> points) {
  std::ostringstream out;
  out << "threshold,precision,recall,mota,motp,mt_percent,ml_percent,ids,fm,fp,fn\n";
  for (const auto& op : points) {
    const auto& b = op.metrics;
    out << csv_real(op.threshold) << ',' << csv_real(op.precision) << ',' << csv_real(op.recall) << ','
        << csv_real(b.mota) << ',' << csv_real(b.motp) << ',' << csv_real(b.mt_percent) << ','
        << csv_real(b.ml_percent) << ',' << b.ids << ',' << b.fm << ',' << b.fp << ',' << b.fn << '\n';
  }
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace detraceval
