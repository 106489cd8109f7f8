#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "detraceval/datamodel.hpp"

namespace detraceval::cli {

// Paired per-sequence inputs: <dir>/<seq>.json with <other>/<seq>.csv,
// sequences in lexicographic order of file name.
std::vector<std::filesystem::path> ground_truth_files(const std::filesystem::path& gt_dir);
std::filesystem::path paired_file(const std::filesystem::path& gt_file, const std::filesystem::path& dir,
                                  const std::string& what);

// Makes a string safe to use as a file name component.
std::string file_token(const std::string& s);

// Entry point of the detraceval tool. Returns the process exit code:
// 0 when every requested evaluation succeeded, nonzero otherwise, with the
// diagnostics written to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace detraceval::cli
