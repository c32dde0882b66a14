// Flat key = value run configuration shared by the CLI subcommands.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "choquard/functional.hpp"
#include "choquard/grid.hpp"
#include "choquard/riesz.hpp"
#include "choquard/solver.hpp"

namespace choquard {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // problem
    int dimension = 7;
    double alpha = 2.0;
    // grid
    double radius = 60.0;
    int node_count = 2000;
    double grading = 2.0;
    // kernel
    int quad_order = 256;
    std::string cache_dir;  // empty: no cache (CHOQUARD_CACHE_DIR overrides)
    // sweep: explicit list wins over the log-spaced range
    std::vector<double> lambda_list;
    double lambda_min = 1e-3;
    double lambda_max = 1e3;
    int lambda_count = 25;
    // solver
    SolverConfig solver;
    // output
    std::string out_dir = ".";
    std::vector<std::string> formats = {"json", "csv"};
    int threads = 0;
    std::uint64_t rng_seed = 12345;

    GridSpec grid_spec() const;
    NonlinearityParams params() const;  // doubly-critical pair for (N, alpha)
    std::vector<double> lambdas() const;
    RieszOptions riesz_options() const;

    bool operator==(const RunConfig&) const = default;
};

// Parses the documented key = value format ('#' comments, blank lines ok).
// Parse errors carry the line number; semantic errors name the violated
// invariant. Unknown keys are rejected.
RunConfig parse_config(const std::string& text);

// Emits every key with 17 significant digits; parse_config(serialize_config(c))
// reproduces c exactly.
std::string serialize_config(const RunConfig& config);

}  // namespace choquard
