#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "schrctl/runner.hpp"

using namespace schrctl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    RunOptions opts() const {
        RunOptions o;
        o.out_dir = path.string();
        return o;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("invalid JSON and unknown keys are rejected with no artifacts") {
    TempDir d("schrctl_test_invalid");
    CHECK(run_config_text("{not json", d.opts()) == 1);
    CHECK(run_config_text(R"({"subcommand":"basis","bogus_key":1})", d.opts()) == 1);
    CHECK(run_config_text(R"({"subcommand":"basis","grid":{"X":30,"dx":0.01}})", d.opts()) ==
          1);
    CHECK(run_config_text(R"({"subcommand":"no-such-command"})", d.opts()) == 1);
    CHECK(run_config_text(R"({"subcommand":"basis","n_modes":-3})", d.opts()) == 1);
    // nothing left behind
    CHECK(fs::is_empty(d.path));
}

TEST_CASE("basis run writes eigenvalue table with reference columns") {
    TempDir d("schrctl_test_basis");
    const std::string cfg = R"({
        "subcommand": "basis",
        "grid": {"X": 30.0, "n_points": 3001},
        "potential": {"kind": "abs"},
        "n_modes": 5
    })";
    CHECK(run_config_text(cfg, d.opts()) == 0);
    const std::string csv = slurp(d.path / "basis.csv");
    CHECK(csv.rfind("index,lambda,airy_lambda,abs_error", 0) == 0);
    // ground state of -d2 + |x| is the first zero of Ai'(-x) ~ 1.0188
    CHECK(csv.find("\n0,1.018") != std::string::npos);
    CHECK(fs::exists(d.path / "manifest.json"));
}

TEST_CASE("control run with zero data costs nothing and exits cleanly") {
    TempDir d("schrctl_test_ctrl0");
    const std::string cfg = R"({
        "subcommand": "control",
        "grid": {"X": 15.0, "n_points": 601},
        "time": {"T": 0.25, "dt": 0.001},
        "n_modes": 16,
        "u0": {"type": "zero"},
        "uT": {"type": "zero"}
    })";
    CHECK(run_config_text(cfg, d.opts()) == 0);
    const std::string manifest = slurp(d.path / "manifest.json");
    CHECK(manifest.find("\"cost\": 0") != std::string::npos);
    CHECK(fs::exists(d.path / "control.csv"));
}

TEST_CASE("evolve run conserves mass and reports it") {
    TempDir d("schrctl_test_evolve");
    const std::string cfg = R"({
        "subcommand": "evolve",
        "grid": {"X": 15.0, "n_points": 601},
        "time": {"T": 0.2, "dt": 0.001},
        "scheme": "crank_nicolson",
        "initial": {"type": "gaussian", "center": 0.5, "momentum": 1.0,
                    "amplitude": 0.5, "width": 0.4}
    })";
    CHECK(run_config_text(cfg, d.opts()) == 0);
    const std::string csv = slurp(d.path / "evolve.csv");
    CHECK(csv.rfind("step,t,mass,mass_drift", 0) == 0);
}

TEST_CASE("interior non-controllability scan exits 2 but keeps its data") {
    TempDir d("schrctl_test_scan");
    const std::string cfg = R"({
        "subcommand": "noncontrol-scan",
        "grid": {"X": 15.0, "n_points": 601},
        "cutoff": {"kind": "interior", "R": 2.0},
        "n_modes": 48,
        "target_modes": 4,
        "targets": [2, 4],
        "cg_max_iter": 60
    })";
    CHECK(run_config_text(cfg, d.opts()) == 2);
    const std::string csv = slurp(d.path / "cost_scan.csv");
    CHECK(csv.rfind("N,lambda,cost,", 0) == 0);
    const std::string manifest = slurp(d.path / "manifest.json");
    CHECK(manifest.find("\"all_converged\": false") != std::string::npos);
    CHECK(manifest.find("\"exit_code\": 2") != std::string::npos);
}

TEST_CASE("scaling scan is deterministic: byte-identical CSV across reruns") {
    TempDir d1("schrctl_test_scale1");
    TempDir d2("schrctl_test_scale2");
    const std::string cfg = R"({
        "subcommand": "scaling-scan",
        "eps_list": [0.2, 0.1],
        "T": 0.5
    })";
    CHECK(run_config_text(cfg, d1.opts()) == 0);
    CHECK(run_config_text(cfg, d2.opts()) == 0);
    CHECK(slurp(d1.path / "scaling_scan.csv") == slurp(d2.path / "scaling_scan.csv"));
}

TEST_CASE("seed flag overrides the config seed in the manifest") {
    TempDir d("schrctl_test_seed");
    RunOptions o = d.opts();
    o.seed = 42;
    const std::string cfg = R"({
        "subcommand": "basis",
        "grid": {"X": 15.0, "n_points": 601},
        "n_modes": 4,
        "seed": 7
    })";
    CHECK(run_config_text(cfg, o) == 0);
    CHECK(slurp(d.path / "manifest.json").find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("config file round trip") {
    TempDir d("schrctl_test_file");
    const fs::path cfg = d.path / "cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"subcommand":"basis","grid":{"X":15.0,"n_points":601},"n_modes":3})";
    }
    RunOptions o;
    o.out_dir = (d.path / "out").string();
    CHECK(run_config_file(cfg.string(), o) == 0);
    CHECK(fs::exists(d.path / "out" / "basis.csv"));
    CHECK(run_config_file((d.path / "missing.json").string(), o) == 1);
}
