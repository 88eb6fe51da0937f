#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "cebap/asymptotic.hpp"
#include "cebap/channel.hpp"
#include "cebap/geometry.hpp"
#include "cebap/montecarlo.hpp"
#include "cebap/optimizer.hpp"
#include "cebap/precoding.hpp"
#include "cebap/scenario_io.hpp"
#include "cebap/vmf.hpp"

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t default_seed = 24601;

// Flag/file problems exit 1; numeric or degenerate outcomes exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Ordered key/value run description. Holds flags and resolved defaults only,
// never input file contents, so reruns of one invocation are byte-identical
// even when inputs like the transmit power change under the same path.
class Manifest {
  public:
    void add(const std::string& key, const std::string& value) {
        lines_.emplace_back(key, value);
    }
    void add(const std::string& key, double value) { add(key, format_double(value)); }
    void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }

    void write(const fs::path& path) const {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        for (const auto& [key, value] : lines_)
            out << key << ' ' << value << '\n';
    }

  private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

fs::path make_run_dir(const std::string& out) {
    if (out.empty())
        throw UsageError("--out directory is required");
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw UsageError("cannot create run directory " + out + ": " + ec.message());
    return dir;
}

arma::vec3 parse_direction(const std::string& text) {
    arma::vec3 v;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &v(0), &v(1), &v(2), &extra) != 3)
        throw UsageError("--direction expects x,y,z");
    return v;
}

struct GeometryFlags {
    arma::uword rows = 4;
    arma::uword cols = 4;
    double region_x_wl = 4.0;
    double region_y_wl = 4.0;
    double min_spacing_wl = 0.5;
    double dense_spacing_wl = 0.5;

    void attach(CLI::App* cmd) {
        cmd->add_option("--rows", rows, "lattice rows for built-in layouts");
        cmd->add_option("--cols", cols, "lattice columns for built-in layouts");
        cmd->add_option("--region-x-wl", region_x_wl, "region width, wavelengths");
        cmd->add_option("--region-y-wl", region_y_wl, "region height, wavelengths");
        cmd->add_option("--min-spacing-wl", min_spacing_wl, "minimum spacing, wavelengths");
        cmd->add_option("--dense-spacing-wl", dense_spacing_wl,
                        "lattice pitch of the upa-dense built-in, wavelengths");
    }

    void describe(Manifest& manifest) const {
        manifest.add("rows", static_cast<std::uint64_t>(rows));
        manifest.add("cols", static_cast<std::uint64_t>(cols));
        manifest.add("region_x_wl", region_x_wl);
        manifest.add("region_y_wl", region_y_wl);
        manifest.add("min_spacing_wl", min_spacing_wl);
        manifest.add("dense_spacing_wl", dense_spacing_wl);
    }
};

cebap::ArrayLayout resolve_layout(const std::string& spec, const GeometryFlags& geom,
                                  double wavelength) {
    const double sx = geom.region_x_wl * wavelength;
    const double sy = geom.region_y_wl * wavelength;
    const double delta = geom.min_spacing_wl * wavelength;
    if (spec == "upa-dense")
        return cebap::upa_dense(geom.rows, geom.cols, geom.dense_spacing_wl * wavelength, sx, sy,
                                delta);
    if (spec == "upa-sparse")
        return cebap::upa_sparse(geom.rows, geom.cols, sx, sy, delta);
    try {
        return cebap::load_layout_csv(spec, sx, sy, delta);
    } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
    }
}

// "name=path", bare built-in name, or bare path.
std::pair<std::string, std::string> split_layout_arg(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) {
        if (arg == "upa-dense" || arg == "upa-sparse")
            return {arg, arg};
        return {fs::path(arg).stem().string(), arg};
    }
    if (eq == 0 || eq + 1 == arg.size())
        throw UsageError("--layout expects name=path or a built-in name");
    return {arg.substr(0, eq), arg.substr(eq + 1)};
}

cebap::Scenario load_scenario_or_usage(const std::string& path) {
    if (path.empty())
        throw UsageError("--scenario is required");
    try {
        return cebap::load_scenario(path);
    } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
    }
}

double rho_db_rel_beta(double rho, double beta) {
    return 10.0 * std::log10(rho / beta);
}

// ---------------------------------------------------------------- gen-vmf

struct GenVmfArgs {
    std::string out;
    double nu0 = 0.1;
    std::string direction = "0,0.5,0.86602540378443865";
    double beta = 1.0;
    arma::uword n_elevation = 50;
    arma::uword n_azimuth = 80;
    double wavelength = 0.06;
    double k0_users = 12.0;
    arma::uword max_users = 16;
    double tx_power_dbm = 30.0;
    double noise_power_dbm = -90.0;
};

int run_gen_vmf(const GenVmfArgs& args) {
    const fs::path dir = make_run_dir(args.out);

    const arma::vec3 direction = parse_direction(args.direction);
    cebap::VmfParams params;
    try {
        params = cebap::make_vmf(direction, args.nu0, args.beta, 2.0 * M_PI / args.wavelength);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    cebap::Scenario scenario;
    scenario.grid = cebap::build_grid(args.n_elevation, args.n_azimuth, args.wavelength);
    const cebap::Aps aps = cebap::vmf_aps(scenario.grid, params);
    scenario.power_responses = aps.values;
    scenario.user_distribution = arma::vec{1.0};
    scenario.user_count_param = args.k0_users;
    scenario.max_users = args.max_users;
    scenario.tx_power_dbm = args.tx_power_dbm;
    scenario.noise_power_dbm = args.noise_power_dbm;
    scenario.tx_power = cebap::dbm_to_watts(args.tx_power_dbm);
    scenario.noise_power = cebap::dbm_to_watts(args.noise_power_dbm);

    cebap::save_scenario(scenario, (dir / "scenario.json").string());

    Manifest manifest;
    manifest.add("command", "gen-vmf-scenario");
    manifest.add("nu0", args.nu0);
    manifest.add("direction", args.direction);
    manifest.add("beta", args.beta);
    manifest.add("elevation", static_cast<std::uint64_t>(args.n_elevation));
    manifest.add("azimuth", static_cast<std::uint64_t>(args.n_azimuth));
    manifest.add("wavelength_m", args.wavelength);
    manifest.add("k0_users", args.k0_users);
    manifest.add("max_users", static_cast<std::uint64_t>(args.max_users));
    manifest.add("tx_power_dbm", args.tx_power_dbm);
    manifest.add("noise_power_dbm", args.noise_power_dbm);
    manifest.write(dir / "manifest.txt");

    std::cout << "scenario written to " << (dir / "scenario.json").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
    std::string scenario;
    std::string out;
    std::string init;
    GeometryFlags geom;
    double alpha0 = 1.0;
    double tau = 0.2;
    double step_wl = 0.2;
    double disp_tol_wl = 0.01;
    double eta = 1e-4;
    arma::uword inner_iters = 25;
    arma::uword newton_iters = 20;
    arma::uword max_backtracks = 30;
    arma::uword max_rounds = 50;
};

int run_optimize(const OptimizeArgs& args) {
    const fs::path dir = make_run_dir(args.out);
    const cebap::Scenario scenario = load_scenario_or_usage(args.scenario);
    const double wavelength = scenario.grid.wavelength;

    const cebap::Aps aps =
        cebap::compute_aps(scenario.power_responses, scenario.user_distribution);

    cebap::LobpoConfig config = cebap::LobpoConfig::defaults(wavelength);
    config.initial_penalty = args.alpha0;
    config.penalty_decay = args.tau;
    config.initial_step = args.step_wl * wavelength;
    config.displacement_tol = args.disp_tol_wl * wavelength;
    config.armijo_control = args.eta;
    config.inner_iters = args.inner_iters;
    config.newton_iters = args.newton_iters;
    config.max_backtracks = args.max_backtracks;
    config.max_outer_rounds = args.max_rounds;

    const cebap::ArrayLayout init = args.init.empty()
                                        ? cebap::upa_sparse(args.geom.rows, args.geom.cols,
                                                            args.geom.region_x_wl * wavelength,
                                                            args.geom.region_y_wl * wavelength,
                                                            args.geom.min_spacing_wl * wavelength)
                                        : resolve_layout(args.init, args.geom, wavelength);

    const cebap::LobpoResult result = cebap::lobpo(scenario.grid, aps, config, init);

    cebap::save_layout_csv(result.layout, (dir / "layout.csv").string());
    cebap::save_trace_csv(result.trace, (dir / "trace.csv").string());
    for (std::size_t i = 0; i < result.trace.iterates.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "layout_%03zu.csv", i);
        cebap::save_layout_csv(result.trace.iterates[i].layout, (dir / name).string());
    }

    Manifest manifest;
    manifest.add("command", "optimize");
    manifest.add("scenario", args.scenario);
    manifest.add("init", args.init.empty() ? "upa-sparse" : args.init);
    args.geom.describe(manifest);
    manifest.add("alpha0", args.alpha0);
    manifest.add("tau", args.tau);
    manifest.add("step_wl", args.step_wl);
    manifest.add("disp_tol_wl", args.disp_tol_wl);
    manifest.add("eta", args.eta);
    manifest.add("inner_iters", static_cast<std::uint64_t>(args.inner_iters));
    manifest.add("newton_iters", static_cast<std::uint64_t>(args.newton_iters));
    manifest.add("max_backtracks", static_cast<std::uint64_t>(args.max_backtracks));
    manifest.add("max_rounds", static_cast<std::uint64_t>(args.max_rounds));
    manifest.write(dir / "manifest.txt");

    const double beta = aps.total_power;
    if (result.degenerate) {
        std::cerr << "warning: rho_N is degenerate at the initial layout; the spectrum cannot "
                     "support a full load, emitting the initial layout unchanged\n";
        return 2;
    }

    const double rho_init = result.trace.iterates.front().rho_n;
    const double rho_final = result.trace.iterates.back().rho_n;
    std::printf("rho_N initial %.6e (%.3f dB rel beta)\n", rho_init,
                rho_db_rel_beta(rho_init, beta));
    std::printf("rho_N final   %.6e (%.3f dB rel beta)\n", rho_final,
                rho_db_rel_beta(rho_final, beta));
    std::printf("outer rounds  %zu\n", result.trace.iterates.size() - 1);
    return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string scenario;
    std::string out;
    std::vector<std::string> layouts;
    std::string utility = "sum-rate";
    std::string weights = "unit";
    arma::uword samples = 5000;
    std::uint64_t seed = default_seed;
    GeometryFlags geom;
};

cebap::WeightsPolicy parse_weights(const std::string& text) {
    if (text == "unit")
        return cebap::WeightsPolicy::unit();
    if (text == "random")
        return cebap::WeightsPolicy::random();
    if (text.rfind("fixed:", 0) == 0) {
        std::vector<double> values;
        std::stringstream ss(text.substr(6));
        std::string item;
        while (std::getline(ss, item, ','))
            values.push_back(std::stod(item));
        if (values.empty())
            throw UsageError("--weights fixed: needs at least one weight");
        return cebap::WeightsPolicy::fixed(arma::vec(values));
    }
    throw UsageError("--weights expects unit, random, or fixed:w1,w2,...");
}

int run_evaluate(const EvaluateArgs& args) {
    if (args.samples == 0)
        throw UsageError("--samples must be positive");
    if (args.layouts.empty())
        throw UsageError("at least one --layout is required");

    const fs::path dir = make_run_dir(args.out);
    const cebap::Scenario scenario = load_scenario_or_usage(args.scenario);
    const double wavelength = scenario.grid.wavelength;
    const cebap::UtilityKind kind = [&] {
        try {
            return cebap::parse_utility_kind(args.utility);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }();
    const cebap::WeightsPolicy policy = parse_weights(args.weights);

    std::vector<cebap::ResultRow> rows;
    for (const std::string& arg : args.layouts) {
        const auto [name, path] = split_layout_arg(arg);
        const cebap::ArrayLayout layout = resolve_layout(path, args.geom, wavelength);
        const cebap::ErgodicEstimate estimate = cebap::ergodic_utility(
            scenario, scenario.grid, layout, kind, policy, args.samples, args.seed);
        rows.push_back({name, args.utility, estimate.mean, estimate.std_error,
                        estimate.n_samples, estimate.seed});
        std::printf("%s %s: %.6g +- %.3g (n=%llu)\n", name.c_str(), args.utility.c_str(),
                    estimate.mean, estimate.std_error,
                    static_cast<unsigned long long>(estimate.n_samples));
    }
    cebap::save_results_csv(rows, (dir / "results.csv").string());

    Manifest manifest;
    manifest.add("command", "evaluate");
    manifest.add("scenario", args.scenario);
    for (const std::string& arg : args.layouts)
        manifest.add("layout", arg);
    manifest.add("utility", args.utility);
    manifest.add("weights", args.weights);
    manifest.add("samples", static_cast<std::uint64_t>(args.samples));
    manifest.add("seed", args.seed);
    args.geom.describe(manifest);
    manifest.write(dir / "manifest.txt");
    return 0;
}

// ---------------------------------------------------------------- rho-report

struct ReportArgs {
    std::string scenario;
    std::string out;
    std::string layout = "upa-sparse";
    GeometryFlags geom;
};

int run_rho_report(const ReportArgs& args) {
    const fs::path dir = make_run_dir(args.out);
    const cebap::Scenario scenario = load_scenario_or_usage(args.scenario);
    const cebap::ArrayLayout layout =
        resolve_layout(args.layout, args.geom, scenario.grid.wavelength);

    const cebap::Aps aps =
        cebap::compute_aps(scenario.power_responses, scenario.user_distribution);
    const cebap::Covariance cov = cebap::covariance(scenario.grid, layout, aps);
    const double beta = aps.total_power;

    {
        std::ofstream out(dir / "rho_vs_k.csv");
        if (!out)
            throw std::runtime_error("cannot write rho_vs_k.csv");
        out << "k,rho,rho_db_rel_beta,iterations,residual,degenerate\n";
        char buf[160];
        for (arma::uword k = 1; k <= layout.size(); ++k) {
            const cebap::RhoSolveReport report = cebap::solve_rho(cov.eigenvalues, k);
            const double db = report.rho > 0.0 ? rho_db_rel_beta(report.rho, beta) : -INFINITY;
            std::snprintf(buf, sizeof(buf), "%llu,%.12g,%.12g,%llu,%.12g,%d\n",
                          static_cast<unsigned long long>(k), report.rho, db,
                          static_cast<unsigned long long>(report.iterations), report.residual,
                          report.degenerate ? 1 : 0);
            out << buf;
        }
    }
    {
        const cebap::RhoSolveReport report = cebap::solve_rho(cov.eigenvalues, layout.size());
        std::ofstream out(dir / "newton_trace.csv");
        if (!out)
            throw std::runtime_error("cannot write newton_trace.csv");
        out << "iter,rho\n";
        char buf[64];
        for (std::size_t i = 0; i < report.iterate_trace.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", i, report.iterate_trace[i]);
            out << buf;
        }
    }

    Manifest manifest;
    manifest.add("command", "rho-report");
    manifest.add("scenario", args.scenario);
    manifest.add("layout", args.layout);
    args.geom.describe(manifest);
    manifest.write(dir / "manifest.txt");
    return 0;
}

// ---------------------------------------------------------------- report

int run_report(const ReportArgs& args) {
    const fs::path dir = make_run_dir(args.out);
    const cebap::Scenario scenario = load_scenario_or_usage(args.scenario);
    const cebap::ArrayLayout layout =
        resolve_layout(args.layout, args.geom, scenario.grid.wavelength);

    const cebap::Aps aps =
        cebap::compute_aps(scenario.power_responses, scenario.user_distribution);
    const cebap::Covariance cov = cebap::covariance(scenario.grid, layout, aps);

    {
        std::ofstream out(dir / "eigenvalues.csv");
        if (!out)
            throw std::runtime_error("cannot write eigenvalues.csv");
        out << "index,eigenvalue,normalized\n";
        const double top = cov.eigenvalues(0);
        char buf[96];
        for (arma::uword n = 0; n < cov.eigenvalues.n_elem; ++n) {
            std::snprintf(buf, sizeof(buf), "%llu,%.12g,%.12g\n",
                          static_cast<unsigned long long>(n), cov.eigenvalues(n),
                          top > 0.0 ? cov.eigenvalues(n) / top : 0.0);
            out << buf;
        }
    }
    {
        // Angular power spectral density: per-cell value divided by the cell
        // area, against the in-plane wavevector direction cosines.
        std::ofstream out(dir / "apsd.csv");
        if (!out)
            throw std::runtime_error("cannot write apsd.csv");
        out << "kappa_x_over_k0,kappa_y_over_k0,apsd\n";
        const double k0 = scenario.grid.wavenumber;
        char buf[128];
        for (arma::uword l = 0; l < scenario.grid.size(); ++l) {
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n",
                          scenario.grid.wavevectors(l, 0) / k0,
                          scenario.grid.wavevectors(l, 1) / k0,
                          aps.values(l) / scenario.grid.areas(l));
            out << buf;
        }
    }

    Manifest manifest;
    manifest.add("command", "report");
    manifest.add("scenario", args.scenario);
    manifest.add("layout", args.layout);
    args.geom.describe(manifest);
    manifest.write(dir / "manifest.txt");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("CEBAP_THREADS")) {
        const int threads = std::atoi(env);
        if (threads > 0)
            omp_set_num_threads(threads);
    }

    CLI::App app{"movable-antenna position optimization from angular power spectra"};
    app.require_subcommand(1);

    GenVmfArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen-vmf-scenario",
                                       "write a von Mises-Fisher scenario file");
    gen->add_option("--out", gen_args.out, "run directory")->required();
    gen->add_option("--nu0", gen_args.nu0, "concentration, meters");
    gen->add_option("--direction", gen_args.direction, "mean direction x,y,z");
    gen->add_option("--beta", gen_args.beta, "total spectrum power");
    gen->add_option("--elevation", gen_args.n_elevation, "elevation cells");
    gen->add_option("--azimuth", gen_args.n_azimuth, "azimuth cells");
    gen->add_option("--wavelength", gen_args.wavelength, "carrier wavelength, meters");
    gen->add_option("--k0-users", gen_args.k0_users, "mean user load");
    gen->add_option("--max-users", gen_args.max_users, "user count truncation");
    gen->add_option("--tx-power-dbm", gen_args.tx_power_dbm, "transmit power, dBm");
    gen->add_option("--noise-power-dbm", gen_args.noise_power_dbm, "noise power, dBm");

    OptimizeArgs opt_args;
    CLI::App* opt = app.add_subcommand("optimize", "optimize antenna positions for a scenario");
    opt->add_option("--scenario", opt_args.scenario, "scenario file")->required();
    opt->add_option("--out", opt_args.out, "run directory")->required();
    opt->add_option("--init", opt_args.init, "initial layout CSV (default: upa-sparse)");
    opt_args.geom.attach(opt);
    opt->add_option("--alpha0", opt_args.alpha0, "initial barrier penalty");
    opt->add_option("--tau", opt_args.tau, "penalty decay per outer round");
    opt->add_option("--step-wl", opt_args.step_wl, "initial ascent step, wavelengths");
    opt->add_option("--disp-tol-wl", opt_args.disp_tol_wl, "outer stop displacement, wavelengths");
    opt->add_option("--eta", opt_args.eta, "sufficient-increase control");
    opt->add_option("--inner-iters", opt_args.inner_iters, "ascent steps per round");
    opt->add_option("--newton-iters", opt_args.newton_iters, "rho solver iteration cap");
    opt->add_option("--max-backtracks", opt_args.max_backtracks, "step halvings per ascent step");
    opt->add_option("--max-rounds", opt_args.max_rounds, "outer round cap");

    EvaluateArgs eval_args;
    CLI::App* eval = app.add_subcommand("evaluate", "Monte-Carlo ergodic utility of layouts");
    eval->add_option("--scenario", eval_args.scenario, "scenario file")->required();
    eval->add_option("--out", eval_args.out, "run directory")->required();
    eval->add_option("--layout", eval_args.layouts,
                     "name=path, upa-dense, or upa-sparse (repeatable)");
    eval->add_option("--utility", eval_args.utility, "sum-rate or min-sinr");
    eval->add_option("--weights", eval_args.weights, "unit, random, or fixed:w1,w2,...");
    eval->add_option("--samples", eval_args.samples, "Monte-Carlo samples");
    eval->add_option("--seed", eval_args.seed, "Monte-Carlo seed");
    eval_args.geom.attach(eval);

    ReportArgs rho_args;
    CLI::App* rho = app.add_subcommand("rho-report", "asymptotic gain versus user count");
    rho->add_option("--scenario", rho_args.scenario, "scenario file")->required();
    rho->add_option("--out", rho_args.out, "run directory")->required();
    rho->add_option("--layout", rho_args.layout, "layout CSV path or built-in name");
    rho_args.geom.attach(rho);

    ReportArgs rep_args;
    CLI::App* rep = app.add_subcommand("report", "eigenvalue spectrum and APS density tables");
    rep->add_option("--scenario", rep_args.scenario, "scenario file")->required();
    rep->add_option("--out", rep_args.out, "run directory")->required();
    rep->add_option("--layout", rep_args.layout, "layout CSV path or built-in name");
    rep_args.geom.attach(rep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (gen->parsed())
            return run_gen_vmf(gen_args);
        if (opt->parsed())
            return run_optimize(opt_args);
        if (eval->parsed())
            return run_evaluate(eval_args);
        if (rho->parsed())
            return run_rho_report(rho_args);
        if (rep->parsed())
            return run_report(rep_args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
