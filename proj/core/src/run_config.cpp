#include "choquard/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace choquard {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail_line(int line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& value, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size())
            fail_line(line, "trailing characters after number for key '" + key + "'");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail_line(line, "cannot parse number '" + value + "' for key '" + key + "'");
    }
}

long long parse_int(const std::string& value, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(value, &used);
        if (used != value.size())
            fail_line(line, "trailing characters after integer for key '" + key + "'");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail_line(line, "cannot parse integer '" + value + "' for key '" + key + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

GridSpec RunConfig::grid_spec() const {
    return GridSpec{dimension, radius, node_count, grading};
}

NonlinearityParams RunConfig::params() const {
    return NonlinearityParams::doubly_critical(dimension, alpha);
}

std::vector<double> RunConfig::lambdas() const {
    if (!lambda_list.empty()) {
        std::vector<double> out = lambda_list;
        std::sort(out.begin(), out.end());
        return out;
    }
    std::vector<double> out(lambda_count);
    if (lambda_count == 1) {
        out[0] = lambda_min;
        return out;
    }
    const double la = std::log10(lambda_min), lb = std::log10(lambda_max);
    for (int i = 0; i < lambda_count; ++i)
        out[i] = std::pow(10.0, la + (lb - la) * i / (lambda_count - 1.0));
    return out;
}

RieszOptions RunConfig::riesz_options() const {
    return RieszOptions{quad_order, threads};
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            fail_line(line, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) fail_line(line, "empty key");
        if (value.empty()) fail_line(line, "empty value for key '" + key + "'");

        if (key == "N") {
            cfg.dimension = static_cast<int>(parse_int(value, line, key));
        } else if (key == "alpha") {
            cfg.alpha = parse_double(value, line, key);
        } else if (key == "R") {
            cfg.radius = parse_double(value, line, key);
        } else if (key == "M") {
            cfg.node_count = static_cast<int>(parse_int(value, line, key));
        } else if (key == "gamma") {
            cfg.grading = parse_double(value, line, key);
        } else if (key == "quad_order") {
            cfg.quad_order = static_cast<int>(parse_int(value, line, key));
        } else if (key == "cache_dir") {
            cfg.cache_dir = value;
        } else if (key == "lambda_list") {
            cfg.lambda_list.clear();
            for (const std::string& item : split(value, ' '))
                cfg.lambda_list.push_back(parse_double(item, line, key));
            if (cfg.lambda_list.empty())
                fail_line(line, "lambda_list must contain at least one value");
        } else if (key == "lambda_min") {
            cfg.lambda_min = parse_double(value, line, key);
        } else if (key == "lambda_max") {
            cfg.lambda_max = parse_double(value, line, key);
        } else if (key == "lambda_count") {
            cfg.lambda_count = static_cast<int>(parse_int(value, line, key));
        } else if (key == "path_nodes") {
            cfg.solver.path_nodes = static_cast<int>(parse_int(value, line, key));
        } else if (key == "max_outer_iters") {
            cfg.solver.max_outer_iters =
                static_cast<int>(parse_int(value, line, key));
        } else if (key == "gradient_tol") {
            cfg.solver.gradient_tol = parse_double(value, line, key);
        } else if (key == "backtrack_factor") {
            cfg.solver.backtrack_factor = parse_double(value, line, key);
        } else if (key == "backtrack_max_trials") {
            cfg.solver.backtrack_max_trials =
                static_cast<int>(parse_int(value, line, key));
        } else if (key == "seed_profile") {
            if (value == "mu")
                cfg.solver.seed.kind = SeedProfile::Kind::Mu;
            else if (value == "nu")
                cfg.solver.seed.kind = SeedProfile::Kind::Nu;
            else if (value == "gaussian")
                cfg.solver.seed.kind = SeedProfile::Kind::Gaussian;
            else
                fail_line(line, "seed_profile must be mu, nu or gaussian");
        } else if (key == "seed_lambda") {
            cfg.solver.seed.lambda = parse_double(value, line, key);
        } else if (key == "seed_width") {
            cfg.solver.seed.width = parse_double(value, line, key);
        } else if (key == "endpoint_scale_cap") {
            cfg.solver.endpoint_scale_cap = parse_double(value, line, key);
        } else if (key == "out_dir") {
            cfg.out_dir = value;
        } else if (key == "formats") {
            cfg.formats = split(value, ',');
            if (cfg.formats.empty())
                fail_line(line, "formats must name at least one of json, csv");
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_int(value, line, key));
        } else if (key == "seed") {
            cfg.rng_seed =
                static_cast<std::uint64_t>(parse_int(value, line, key));
        } else {
            fail_line(line, "unknown key '" + key + "'");
        }
    }

    // semantic validation naming the violated invariant
    if (cfg.dimension < 3)
        throw ConfigError("N must be an integer >= 3");
    if (!(cfg.alpha > 0.0) || !(cfg.alpha < cfg.dimension))
        throw ConfigError("alpha must lie in (0, N)");
    if (!(cfg.radius > 0.0)) throw ConfigError("R must be positive");
    if (cfg.node_count < 16) throw ConfigError("M must be >= 16");
    if (!(cfg.grading >= 1.0)) throw ConfigError("gamma must be >= 1");
    if (cfg.quad_order < 8) throw ConfigError("quad_order must be >= 8");
    for (double l : cfg.lambda_list)
        if (!(l > 0.0)) throw ConfigError("lambda_list entries must be positive");
    if (!(cfg.lambda_min > 0.0) || !(cfg.lambda_max >= cfg.lambda_min))
        throw ConfigError("lambda range must satisfy 0 < lambda_min <= lambda_max");
    if (cfg.lambda_count < 1) throw ConfigError("lambda_count must be >= 1");
    if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
    for (const std::string& f : cfg.formats)
        if (f != "json" && f != "csv")
            throw ConfigError("formats must be a comma list of json, csv");
    try {
        cfg.solver.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "# problem\n";
    os << "N = " << c.dimension << "\n";
    os << "alpha = " << fmt17(c.alpha) << "\n";
    os << "# grid\n";
    os << "R = " << fmt17(c.radius) << "\n";
    os << "M = " << c.node_count << "\n";
    os << "gamma = " << fmt17(c.grading) << "\n";
    os << "# kernel\n";
    os << "quad_order = " << c.quad_order << "\n";
    if (!c.cache_dir.empty()) os << "cache_dir = " << c.cache_dir << "\n";
    os << "# sweep\n";
    if (!c.lambda_list.empty()) {
        os << "lambda_list =";
        for (double l : c.lambda_list) os << " " << fmt17(l);
        os << "\n";
    }
    os << "lambda_min = " << fmt17(c.lambda_min) << "\n";
    os << "lambda_max = " << fmt17(c.lambda_max) << "\n";
    os << "lambda_count = " << c.lambda_count << "\n";
    os << "# solver\n";
    os << "path_nodes = " << c.solver.path_nodes << "\n";
    os << "max_outer_iters = " << c.solver.max_outer_iters << "\n";
    os << "gradient_tol = " << fmt17(c.solver.gradient_tol) << "\n";
    os << "backtrack_factor = " << fmt17(c.solver.backtrack_factor) << "\n";
    os << "backtrack_max_trials = " << c.solver.backtrack_max_trials << "\n";
    switch (c.solver.seed.kind) {
        case SeedProfile::Kind::Mu: os << "seed_profile = mu\n"; break;
        case SeedProfile::Kind::Nu: os << "seed_profile = nu\n"; break;
        case SeedProfile::Kind::Gaussian: os << "seed_profile = gaussian\n"; break;
    }
    os << "seed_lambda = " << fmt17(c.solver.seed.lambda) << "\n";
    os << "seed_width = " << fmt17(c.solver.seed.width) << "\n";
    os << "endpoint_scale_cap = " << fmt17(c.solver.endpoint_scale_cap) << "\n";
    os << "# output\n";
    os << "out_dir = " << c.out_dir << "\n";
    os << "formats = ";
    for (std::size_t i = 0; i < c.formats.size(); ++i)
        os << (i ? "," : "") << c.formats[i];
    os << "\n";
    os << "threads = " << c.threads << "\n";
    os << "seed = " << c.rng_seed << "\n";
    return os.str();
}

}  // namespace choquard
