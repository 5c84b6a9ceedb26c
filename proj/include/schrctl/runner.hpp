#pragma once

#include <string>

namespace schrctl {

struct RunOptions {
    std::string out_dir = ".";
    long long seed = -1;  // >= 0 overrides the seed in the config
    int threads = 1;
};

/// Executes one batch run described by a JSON config. Artifacts (CSV tables
/// and a manifest) land in opts.out_dir. Returns the process exit code:
/// 0 success, 1 invalid input (partial outputs removed), 2 numerical
/// failure with data (artifacts kept).
int run_config_text(const std::string& json_text, const RunOptions& opts);
int run_config_file(const std::string& path, const RunOptions& opts);

}  // namespace schrctl
