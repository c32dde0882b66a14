// Structured output: JSON documents (schema_version 1) and CSV tables with
// floats at 17 significant digits for cross-platform reproducibility.
#pragma once

#include <string>

#include "choquard/extremals.hpp"
#include "choquard/solver.hpp"
#include "choquard/threshold.hpp"

namespace choquard {

std::string format_float(double x);  // %.17g

std::string to_json(const SharpConstants& constants);
std::string to_json(const ThresholdReport& report);
std::string to_json(const SolveResult& result, const NonlinearityParams& params);

// columns: lambda, t_lambda, J_mu, s_lambda, J_nu
std::string sweep_to_csv(const std::vector<SweepRow>& sweep);
// columns: r, value
std::string profile_to_csv(const RadialFunction& f);

}  // namespace choquard
