// Command line surface: constants | threshold | sweep | solve | check.
// Data goes to stdout and to files under --out; diagnostics go to stderr.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "choquard/extremals.hpp"
#include "choquard/report.hpp"
#include "choquard/run_config.hpp"
#include "choquard/solver.hpp"
#include "choquard/threshold.hpp"

namespace {

using namespace choquard;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

bool wants_format(const RunConfig& cfg, const std::string& fmt) {
    for (const auto& f : cfg.formats)
        if (f == fmt) return true;
    return false;
}

void write_file(const RunConfig& cfg, const std::string& name,
                const std::string& body) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << body;
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) return parse_config("");
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

int run_constants(const RunConfig& cfg) {
    std::cerr << "measuring sharp constants on N=" << cfg.dimension
              << " alpha=" << cfg.alpha << " M=" << cfg.node_count << "\n";
    const SharpConstants c = measure_sharp_constants(
        cfg.grid_spec(), cfg.params(), cfg.riesz_options());
    const std::string doc = to_json(c);
    std::cout << doc << "\n";
    if (wants_format(cfg, "json")) write_file(cfg, "constants.json", doc);
    return kExitOk;
}

int run_threshold(const RunConfig& cfg) {
    std::cerr << "running threshold verification sweep ("
              << cfg.lambdas().size() << " lambdas)\n";
    const ThresholdReport report = verify_theorem(
        cfg.grid_spec(), cfg.params(), cfg.lambdas(), cfg.riesz_options());
    const std::string doc = to_json(report);
    std::cout << doc << "\n";
    if (wants_format(cfg, "json")) write_file(cfg, "threshold.json", doc);
    if (wants_format(cfg, "csv"))
        write_file(cfg, "sweep.csv", sweep_to_csv(report.sweep));
    return kExitOk;
}

int run_sweep(const RunConfig& cfg) {
    std::cerr << "running path-energy sweep (" << cfg.lambdas().size()
              << " lambdas)\n";
    const auto rows = path_energy_sweep(cfg.grid_spec(), cfg.params(),
                                        cfg.lambdas(), cfg.riesz_options());
    const std::string csv = sweep_to_csv(rows);
    std::cout << csv;
    if (wants_format(cfg, "csv")) write_file(cfg, "sweep.csv", csv);
    return kExitOk;
}

int run_solve(const RunConfig& cfg) {
    GridPtr grid = build_grid(cfg.grid_spec());
    const NonlinearityParams params = cfg.params();
    std::cerr << "building kernel M=" << cfg.node_count << "\n";
    const RieszKernel kernel = build_or_load_kernel(
        grid, params.alpha(), cfg.riesz_options(), cfg.cache_dir);
    const double S1 = sharp_constant_S1(kernel, params);
    const double S2 = sharp_constant_S2(kernel, params);
    const double threshold = compute_threshold(params, S1, S2).threshold;
    std::cerr << "solving (threshold " << threshold << ")\n";
    const SolveResult result = mpa_solve(kernel, params, cfg.solver, threshold);
    const std::string doc = to_json(result, params);
    std::cout << doc << "\n";
    if (wants_format(cfg, "json")) write_file(cfg, "solve.json", doc);
    if (wants_format(cfg, "csv"))
        write_file(cfg, "solution.csv", profile_to_csv(result.u_star));
    return result.converged ? kExitOk : kExitCheckFailed;
}

// --- the `check` invariant suite -------------------------------------------

struct CheckContext {
    int failures = 0;
    void report(const std::string& name, bool pass, const std::string& detail) {
        std::cout << (pass ? "PASS  " : "FAIL  ") << name;
        if (!detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
        if (!pass) ++failures;
    }
};

RadialFunction random_profile(GridPtr grid, std::mt19937_64& rng,
                              bool nonnegative) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> logw(std::log(0.5), std::log(4.0));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(grid->size());
    for (int k = 0; k < 4; ++k) {
        const double a = nonnegative ? std::abs(amp(rng)) + 0.1 : amp(rng);
        const double w = std::exp(logw(rng));
        v += grid->nodes().unaryExpr(
            [&](double r) { return a * std::exp(-(r / w) * (r / w)); });
    }
    v[grid->size() - 1] = 0.0;  // conforming
    return RadialFunction(std::move(grid), std::move(v));
}

int run_check(const RunConfig& cfg) {
    CheckContext ctx;
    std::mt19937_64 rng(cfg.rng_seed);
    std::ostringstream detail;

    // Newtonian oracle on its own problem; the mollified ball edge needs
    // M >= ~1400 at R = 5 regardless of the main grid
    {
        const int M = std::max(1400, std::min(cfg.node_count, 2000));
        GridPtr grid = build_grid(GridSpec{3, 5.0, M, 2.0});
        std::cerr << "check: building N=3 oracle kernel M=" << M << "\n";
        const RieszKernel kernel =
            build_kernel(grid, 2.0, cfg.riesz_options());
        const double eps = 0.005;  // mollified ball edge
        const RadialFunction ball =
            RadialFunction::sample(grid, [eps](double r) {
                return 0.5 * std::erfc((r - 1.0) / eps);
            });
        const RadialFunction pot = convolve(kernel, ball);
        double worst = 0.0;
        for (int i = 0; i < grid->size(); ++i) {
            const double r = grid->nodes()[i];
            const double exact = r <= 1.0 ? (3.0 - r * r) / 6.0 : 1.0 / (3.0 * r);
            worst = std::max(worst, std::abs(pot[i] - exact) / exact);
        }
        detail.str("");
        detail << "max rel err " << worst;
        ctx.report("newtonian_unit_ball_potential", worst <= 1e-4, detail.str());
    }

    GridPtr grid = build_grid(cfg.grid_spec());
    const NonlinearityParams params = cfg.params();
    std::cerr << "check: building main kernel M=" << cfg.node_count << "\n";
    const RieszKernel kernel = build_or_load_kernel(
        grid, params.alpha(), cfg.riesz_options(), cfg.cache_dir);

    {
        const RadialFunction f = random_profile(grid, rng, false);
        const RadialFunction g = random_profile(grid, rng, false);
        const double fg = hls_pairing(kernel, f, g);
        const double gf = hls_pairing(kernel, g, f);
        const double rel = std::abs(fg - gf) / std::max(std::abs(fg), 1e-300);
        detail.str("");
        detail << "asymmetry " << rel;
        ctx.report("hls_pairing_self_adjoint", rel <= 1e-12, detail.str());
    }
    {
        const RadialFunction f = random_profile(grid, rng, true);
        const double min = convolve(kernel, f).values().minCoeff();
        detail.str("");
        detail << "min value " << min;
        ctx.report("convolve_positivity", min >= 0.0, detail.str());
    }
    {
        // hls scaling law at lambda = 1/2 (same truncation radius)
        const double lambda = 0.5, beta = 1.3;
        const double N = params.dimension(), alpha = params.alpha();
        const RadialFunction f = RadialFunction::sample(
            grid, [](double r) { return std::exp(-r * r); });
        const RadialFunction fl = RadialFunction::sample(grid, [&](double r) {
            return std::pow(lambda, beta) * std::exp(-(lambda * r) * (lambda * r));
        });
        const double lhs = hls_pairing(kernel, fl, fl);
        const double rhs = std::pow(lambda, 2.0 * beta - N - alpha) *
                           hls_pairing(kernel, f, f);
        const double rel = std::abs(lhs - rhs) / rhs;
        detail.str("");
        detail << "rel err " << rel;
        ctx.report("hls_dilation_scaling", rel <= 1e-4, detail.str());
    }
    {
        // derivative vs central differences, order from the h-ladder
        const RadialFunction u = random_profile(grid, rng, true);
        const RadialFunction phi = random_profile(grid, rng, false);
        const double exact = derivative_action(kernel, params, u, phi);
        double errs[3];
        const double hs[3] = {1e-2, 1e-3, 1e-4};
        for (int k = 0; k < 3; ++k) {
            const double h = hs[k];
            const double ep = energy(kernel, params,
                                     u.with_values(u.values() + h * phi.values()))
                                  .total;
            const double em = energy(kernel, params,
                                     u.with_values(u.values() - h * phi.values()))
                                  .total;
            errs[k] = std::abs((ep - em) / (2.0 * h) - exact);
        }
        const double order = std::log10(errs[0] / std::max(errs[1], 1e-300));
        detail.str("");
        detail << "observed order " << order;
        ctx.report("gradient_fd_order", order >= 1.9, detail.str());
    }
    {
        const RadialFunction u = random_profile(grid, rng, true);
        const RadialFunction phi = random_profile(grid, rng, false);
        const RadialFunction g = h1_gradient(kernel, params, u);
        const H1Products gp = h1_products(g, phi);
        const double lhs = gp.dirichlet + gp.mass;
        const double rhs = derivative_action(kernel, params, u, phi);
        const double bound = 1e-8 * std::max(1.0, h1_norm(g) * h1_norm(phi));
        detail.str("");
        detail << "gap " << std::abs(lhs - rhs);
        ctx.report("h1_gradient_representation", std::abs(lhs - rhs) <= bound,
                   detail.str());
    }
    {
        const RadialFunction u = random_profile(grid, rng, true);
        const RayProfile ray = ray_profile(kernel, params, u);
        double worst = 0.0;
        for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            const double direct =
                energy(kernel, params, u.with_values(t * u.values())).total;
            worst = std::max(worst, std::abs(direct - ray.value(t)) /
                                        std::max(std::abs(direct), 1e-300));
        }
        detail.str("");
        detail << "max rel gap " << worst;
        ctx.report("ray_profile_identity", worst <= 1e-10, detail.str());
    }
    {
        const double S1 = 0.7, S2 = 1.9;
        const ThresholdForms forms = compute_threshold(params, S1, S2);
        const double rel_p =
            std::abs(forms.threshold_p - forms.product_form_p) / forms.threshold_p;
        const double rel_q =
            std::abs(forms.threshold_q - forms.product_form_q) / forms.threshold_q;
        detail.str("");
        detail << "rel gaps " << rel_p << " " << rel_q;
        ctx.report("threshold_two_forms_identity",
                   rel_p <= 1e-12 && rel_q <= 1e-12, detail.str());
    }
    {
        const Amplitudes amps = normalize_amplitudes(kernel, params);
        const RadialFunction mu =
            sample_extremal(grid, {ExtremalKind::Mu, 1.0, amps.A});
        const EnergyBreakdown e = energy(kernel, params, mu);
        const double rel = std::abs(e.mass - e.D_pp) / e.mass;
        detail.str("");
        detail << "rel gap " << rel;
        ctx.report("extremal_mu_normalization", rel <= 1e-8, detail.str());
    }
    {
        const RadialFunction u = random_profile(grid, rng, false);
        const EnergyBreakdown plus = energy(kernel, params, u);
        const EnergyBreakdown minus =
            energy(kernel, params, u.with_values(-u.values()));
        ctx.report("energy_evenness", plus.total == minus.total, "");
    }

    if (ctx.failures > 0) {
        std::cerr << ctx.failures << " properties failed\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"doubly-critical Choquard equation laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = -1;
    long long seed = -1;
    app.add_option("--config", config_path, "path to a key = value config file");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--threads", threads, "worker threads (overrides config)");
    app.add_option("--seed", seed, "seed for randomized checks");

    auto* constants = app.add_subcommand("constants", "sharp constants S1, S2");
    auto* threshold = app.add_subcommand("threshold", "full threshold report");
    auto* sweep = app.add_subcommand("sweep", "path-energy sweep CSV");
    auto* solve = app.add_subcommand("solve", "mountain-pass solve");
    auto* check = app.add_subcommand("check", "run the invariant suite");

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (threads >= 0) cfg.threads = threads;
        if (seed >= 0) cfg.rng_seed = static_cast<std::uint64_t>(seed);
        if (const char* env = std::getenv("CHOQUARD_CACHE_DIR"))
            cfg.cache_dir = env;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (constants->parsed()) return run_constants(cfg);
        if (threshold->parsed()) return run_threshold(cfg);
        if (sweep->parsed()) return run_sweep(cfg);
        if (solve->parsed()) return run_solve(cfg);
        if (check->parsed()) return run_check(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitConfigError;
}
