#include <CLI11.hpp>
#include <cstdlib>
#include <string>

#include "schrctl/runner.hpp"

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"schrctl - batch runner for the 1D controlled Schrodinger suite"};

    std::string config = env_or("SCHRCTL_CONFIG", "");
    std::string out = env_or("SCHRCTL_OUT", ".");
    long long seed = -1;
    int threads = 1;
    if (const char* s = std::getenv("SCHRCTL_SEED")) seed = std::atoll(s);
    if (const char* s = std::getenv("SCHRCTL_THREADS")) threads = std::atoi(s);

    app.add_option("--config", config, "JSON config file (or SCHRCTL_CONFIG)");
    app.add_option("--out", out, "output directory for artifacts (or SCHRCTL_OUT)");
    app.add_option("--seed", seed, "override the config seed (or SCHRCTL_SEED)");
    app.add_option("--threads", threads, "worker threads (or SCHRCTL_THREADS)");

    CLI11_PARSE(app, argc, argv);

    if (config.empty()) {
        std::fprintf(stderr, "schrctl: no config given (use --config or SCHRCTL_CONFIG)\n");
        return 1;
    }
    if (threads < 1) {
        std::fprintf(stderr, "schrctl: --threads must be >= 1\n");
        return 1;
    }

    schrctl::RunOptions opts;
    opts.out_dir = out;
    opts.seed = seed;
    opts.threads = threads;
    return schrctl::run_config_file(config, opts);
}
