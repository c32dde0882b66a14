#include "choquard/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace choquard {

namespace {

constexpr int kSchemaVersion = 1;

// floats go through the 17-digit formatter so documents are reproducible
// bit-for-bit across platforms
nlohmann::json num(double x) { return nlohmann::json(format_float(x)); }

}  // namespace

std::string format_float(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_json(const SharpConstants& c) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "sharp_constants";
    j["S1"] = num(c.S1);
    j["S2"] = num(c.S2);
    j["grid"] = {{"N", c.grid.dimension},
                 {"R", num(c.grid.radius)},
                 {"M", c.grid.node_count},
                 {"gamma", num(c.grid.grading)}};
    j["lambda_spread_S1"] = num(c.lambda_spread_S1);
    j["lambda_spread_S2"] = num(c.lambda_spread_S2);
    j["estimated_accuracy"] = num(c.estimated_accuracy);
    return j.dump(2);
}

std::string to_json(const ThresholdReport& r) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "threshold_report";
    j["N"] = r.dimension;
    j["alpha"] = num(r.alpha);
    j["p"] = num(r.p);
    j["q"] = num(r.q);
    j["grid"] = {{"N", r.grid.dimension},
                 {"R", num(r.grid.radius)},
                 {"M", r.grid.node_count},
                 {"gamma", num(r.grid.grading)}};
    j["S1"] = num(r.S1);
    j["S2"] = num(r.S2);
    j["threshold_p"] = num(r.threshold_p);
    j["threshold_q"] = num(r.threshold_q);
    j["threshold"] = num(r.threshold);
    nlohmann::json rows = nlohmann::json::array();
    for (const SweepRow& row : r.sweep)
        rows.push_back({{"lambda", num(row.lambda)},
                        {"t_lambda", num(row.t_lambda)},
                        {"J_mu", num(row.J_mu)},
                        {"s_lambda", num(row.s_lambda)},
                        {"J_nu", num(row.J_nu)}});
    j["sweep"] = std::move(rows);
    j["c0_upper"] = num(r.c0_upper);
    j["richardson_error"] = num(r.richardson_error);
    j["margin"] = num(r.margin);
    j["dimension_gate"] = r.gate_open;
    j["verdict"] = r.verdict == Verdict::BelowThreshold ? "BELOW_THRESHOLD"
                                                        : "NOT_ESTABLISHED";
    return j.dump(2);
}

std::string to_json(const SolveResult& r, const NonlinearityParams& params) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "solve_result";
    j["N"] = params.dimension();
    j["alpha"] = num(params.alpha());
    j["p"] = num(params.p());
    j["q"] = num(params.q());
    j["energy_level"] = num(r.energy_level);
    j["gradient_norm"] = num(r.gradient_norm);
    j["nehari_residual"] = num(r.nehari_residual);
    j["pohozaev_residual"] = num(r.pohozaev_residual);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["below_threshold"] = r.below_threshold;
    switch (r.status) {
        case SolveStatus::Converged: j["status"] = "converged"; break;
        case SolveStatus::MaxIterations: j["status"] = "max_iterations"; break;
        case SolveStatus::Stagnated: j["status"] = "stagnated"; break;
        case SolveStatus::LineSearchFailed:
            j["status"] = "line_search_failed";
            break;
    }
    return j.dump(2);
}

std::string sweep_to_csv(const std::vector<SweepRow>& sweep) {
    std::ostringstream os;
    os << "lambda,t_lambda,J_mu,s_lambda,J_nu\n";
    for (const SweepRow& row : sweep)
        os << format_float(row.lambda) << ',' << format_float(row.t_lambda)
           << ',' << format_float(row.J_mu) << ',' << format_float(row.s_lambda)
           << ',' << format_float(row.J_nu) << '\n';
    return os.str();
}

std::string profile_to_csv(const RadialFunction& f) {
    std::ostringstream os;
    os << "r,value\n";
    const Eigen::VectorXd& r = f.grid()->nodes();
    for (int i = 0; i < f.size(); ++i)
        os << format_float(r[i]) << ',' << format_float(f[i]) << '\n';
    return os.str();
}

}  // namespace choquard
