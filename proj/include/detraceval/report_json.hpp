#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "detraceval/det_metrics.hpp"
#include "detraceval/mot_metrics.hpp"
#include "detraceval/pr_integration.hpp"

namespace detraceval {

using Json = nlohmann::ordered_json;

// Reals in reports are rounded to 6 significant digits; non-finite values
// become null.
Json report_number(double v);

Json to_json(const PRPoint& p);
Json to_json(const MetricBundle& b);
Json to_json(const FrameCounts& c);
Json to_json(const SequenceClear& s);
Json to_json(std::span<const SubsetReport> report);
Json to_json(const PRIntegratedReport& r, std::span<const SweepFailure> failures = {});

// Reads back the fields written by to_json(PRIntegratedReport).
PRIntegratedReport system_report_from_json(const Json& j);

std::string pr_curve_csv(const PRCurve& curve);
std::string operating_points_csv(std::span<const OperatingPoint> points);

void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace detraceval
