// fswitch: command-line driver for the driven Ising chain simulator.
//
//   fswitch simulate --config run.json --out out/run
//   fswitch sweep    --config base.json --out out/sweep --workers 4
//   fswitch strobe   --config run.json --omega 2 --periods 10000 --out out/strobe
//   fswitch magnus   --config run.json --omega 2 --out out/magnus
//   fswitch local    --config local.json --out out/local
//   fswitch control  --omega 2 --omega 4 --out out/control
//   fswitch scenario blocked --override L=8 --out out/blocked
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fswitch/bessel.hpp"
#include "fswitch/config_io.hpp"
#include "fswitch/csv.hpp"
#include "fswitch/errors.hpp"
#include "fswitch/evolution.hpp"
#include "fswitch/experiments.hpp"
#include "fswitch/floquet.hpp"
#include "fswitch/observables.hpp"

namespace fs = std::filesystem;
using namespace fswitch;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
    std::string config;
    std::string out = "out";
    std::optional<double> dt;
    std::optional<double> t_final;
    int workers = 0;
    std::vector<std::string> overrides;
    Integrator integrator = Integrator::CommutatorFree4;
};

void add_common(CLI::App* app, Common& c, bool needs_config) {
    auto* opt = app->add_option("--config", c.config, "JSON configuration file");
    if (needs_config) opt->required();
    app->add_option("--out", c.out, "Output directory")->capture_default_str();
    app->add_option("--dt", c.dt, "Time step (units of 1/g)");
    app->add_option("--t-final", c.t_final, "Final time (units of 1/g)");
    app->add_option("--workers", c.workers, "Worker threads (0: available parallelism)");
    app->add_option("--override", c.overrides, "key=value override, repeatable");
    const std::map<std::string, Integrator> schemes = {{"cf4", Integrator::CommutatorFree4},
                                                       {"midpoint", Integrator::Midpoint}};
    app->add_option("--integrator", c.integrator, "Time stepper: cf4 or midpoint")
        ->transform(CLI::CheckedTransformer(schemes, CLI::ignore_case));
}

RunConfig load(const Common& c) {
    RunConfig rc = load_run_config(c.config);
    for (const auto& o : c.overrides) apply_override(rc, o);
    if (c.dt) rc.dt = *c.dt;
    if (c.t_final) rc.t_final = *c.t_final;
    rc.lattice.validate();
    return rc;
}

fs::path prepare(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + out);
    return dir;
}

double default_dt(const LatticeConfig& lattice) { return kLabStepPeriods * std::numbers::pi / lattice.g; }

void finish(const fs::path& dir, const std::string& kind, const nlohmann::json& config, const nlohmann::json& summary,
            std::vector<fs::path> files, std::chrono::steady_clock::time_point start) {
    const fs::path summary_path = dir / "summary.json";
    write_json(summary, summary_path);
    files.push_back(summary_path);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const nlohmann::json tol = {{"taylor_tolerance", EvolveOptions{}.taylor_tolerance},
                                {"renormalize_threshold", EvolveOptions{}.renormalize_threshold}};
    write_manifest(dir, kind, config, tol, wall, files);
    std::cout << summary.dump(2) << '\n';
}

void cmd_simulate(const Common& c) {
    const auto start = std::chrono::steady_clock::now();
    const RunConfig rc = load(c);
    if (!rc.t_final) throw ConfigError("simulate needs t_final (config key or --t-final)");
    const fs::path dir = prepare(c.out);
    EvolveOptions opts;
    opts.dt = rc.dt.value_or(default_dt(rc.lattice));
    opts.integrator = c.integrator;
    opts.t_final = *rc.t_final;
    opts.record_stride = rc.record_stride.value_or(1);
    const Trajectory traj = evolve(rc.lattice, opts);
    std::vector<fs::path> files;
    for (const auto& p : write_trajectory_csv(traj, dir.string())) files.emplace_back(p);
    nlohmann::json corr = nlohmann::json::array();
    for (int b = 1; b < traj.sites(); ++b) corr.push_back(max_abs_correlation(traj, b));
    const nlohmann::json summary = {{"time_unit", traj.time_unit}, {"steps", traj.steps},
                                    {"renormalizations", traj.renormalizations}, {"max_abs_C_per_bond", corr}};
    finish(dir, "simulate", to_json(rc), summary, files, start);
}

void cmd_sweep(const Common& c, SweepOptions so, int sites) {
    const auto start = std::chrono::steady_clock::now();
    RunConfig rc;
    if (c.config.empty()) {
        rc.lattice = configs::mid_bond_switch(sites, kDefaultJ0, 0.0);
        for (const auto& o : c.overrides) apply_override(rc, o);
    } else {
        rc = load(c);
    }
    if (c.dt) so.dt = *c.dt;
    if (c.t_final) so.t_final = *c.t_final;
    so.workers = c.workers;
    const fs::path dir = prepare(c.out);
    const SweepResult sweep = sweep_switch(rc.lattice, so);
    const fs::path csv = dir / "sweep.csv";
    write_sweep_csv(sweep, csv);
    int errors = 0;
    for (const auto& row : sweep.rows) errors += row.error ? 1 : 0;
    const nlohmann::json summary = {{"points", sweep.rows.size()}, {"errors", errors}, {"bond", sweep.bond}};
    finish(dir, "sweep", to_json(rc), summary, {csv}, start);
}

double drive_period(const LatticeConfig& lattice, std::optional<double> omega) {
    if (omega) {
        if (!(*omega > 0.0)) throw ConfigError("--omega must be positive");
        return 2.0 * std::numbers::pi / *omega;
    }
    std::optional<double> found;
    for (const auto& b : lattice.bonds) {
        if (const auto* cs = std::get_if<CosineDrive>(&b.variant()); cs != nullptr && cs->frequency > 0.0) {
            if (found && std::abs(*found - cs->frequency) > 1e-12) {
                throw ConfigError("several drive frequencies; pass --omega to fix the period");
            }
            found = cs->frequency;
        }
    }
    if (!found) throw ConfigError("no cosine-driven bond; pass --omega");
    return 2.0 * std::numbers::pi / *found;
}

void cmd_strobe(const Common& c, std::optional<double> omega, int periods, int stride) {
    const auto start = std::chrono::steady_clock::now();
    const RunConfig rc = load(c);
    const double period = drive_period(rc.lattice, omega);
    const double dt = c.dt.value_or(kPropagatorStepPeriods * period);
    const fs::path dir = prepare(c.out);
    const Propagator prop = one_period_propagator(rc.lattice, period, dt);
    const Trajectory traj = stroboscopic_evolve(prop, rc.lattice.initial_state(), periods, stride);
    std::vector<fs::path> files;
    for (const auto& p : write_trajectory_csv(traj, dir.string())) files.emplace_back(p);
    nlohmann::json corr = nlohmann::json::array();
    for (int b = 1; b < traj.sites(); ++b) corr.push_back(max_abs_correlation(traj, b));
    const nlohmann::json summary = {{"time_unit", "T"}, {"period", period}, {"unitarity_defect", prop.unitarity_defect()},
                                    {"max_abs_C_per_bond", corr}};
    finish(dir, "strobe", to_json(rc), summary, files, start);
}

void cmd_magnus(const Common& c, std::optional<double> omega, int nodes) {
    const auto start = std::chrono::steady_clock::now();
    const RunConfig rc = load(c);
    const double period = drive_period(rc.lattice, omega);
    const fs::path dir = prepare(c.out);
    const MagnusResult m = magnus(rc.lattice, period, nodes);
    std::vector<fs::path> files{dir / "hf0.csv", dir / "hf1.csv"};
    write_matrix_csv(m.order0, files[0]);
    write_matrix_csv(m.order1, files[1]);
    const double max0 = m.order0.cwiseAbs().maxCoeff();
    const double max1 = m.order1.cwiseAbs().maxCoeff();
    nlohmann::json summary = {{"period", period}, {"max_abs_hf0", max0}, {"max_abs_hf1", max1},
                              {"hf1_over_hf0", max0 > 0.0 ? max1 / max0 : 0.0}, {"warnings", m.warnings}};
    try {
        const Eigen::MatrixXcd analytic = to_dense(analytic_hf0(rc.lattice));
        files.push_back(dir / "hf0_analytic.csv");
        write_matrix_csv(analytic, files.back());
        summary["max_abs_diff_analytic"] = (m.order0 - analytic).cwiseAbs().maxCoeff();
    } catch (const UnsupportedConfiguration& e) {
        summary["analytic"] = e.what();
    }
    finish(dir, "magnus", to_json(rc), summary, files, start);
}

void cmd_local(const Common& c) {
    const auto start = std::chrono::steady_clock::now();
    const RunConfig rc = load(c);
    if (!rc.t_final) throw ConfigError("local needs t_final (config key or --t-final)");
    const fs::path dir = prepare(c.out);
    const RwaResult rwa = rwa_local_effective(rc.lattice);
    EvolveOptions opts;
    opts.dt = rc.dt.value_or(default_dt(rc.lattice));
    opts.integrator = c.integrator;
    opts.t_final = *rc.t_final;
    opts.record_stride = rc.record_stride.value_or(1);
    const Trajectory traj = evolve(rc.lattice, opts);
    std::vector<fs::path> files;
    for (const auto& p : write_trajectory_csv(traj, dir.string())) files.emplace_back(p);
    nlohmann::json corr = nlohmann::json::array();
    for (int b = 1; b < traj.sites(); ++b) corr.push_back(max_abs_correlation(traj, b));
    const nlohmann::json summary = {{"time_unit", traj.time_unit}, {"rwa_renormalized_coupling", rwa.renormalized_coupling},
                                    {"rwa_warnings", rwa.warnings}, {"max_abs_C_per_bond", corr}};
    finish(dir, "local", to_json(rc), summary, files, start);
}

void cmd_control(const Common& c, double x1, double x2, std::vector<double> omegas, double g, int samples) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = prepare(c.out);
    if (omegas.empty()) omegas = {2.0, 4.0};
    const double T = std::numbers::pi / g;
    std::vector<fs::path> files;
    nlohmann::json rows = nlohmann::json::array();
    for (double w : omegas) {
        const ControlFunction cf{x1, x2, w};
        files.push_back(dir / ("control_omega_" + format_double(w) + ".csv"));
        write_control_trace(cf, 2.0 * T, samples, files.back());
        rows.push_back({{"omega", w}, {"mean_J0_over_T", control_average(cf, 1 << 16, g)}});
    }
    const nlohmann::json config = {{"x1", x1}, {"x2", x2}, {"omegas", omegas}, {"g", g}, {"samples", samples}};
    finish(dir, "control", config, {{"period_T", T}, {"averages", rows}}, files, start);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet-engineered transverse-field Ising chain simulator"};
    app.require_subcommand(1);

    Common common;
    auto* simulate = app.add_subcommand("simulate", "Lab-frame evolution of a configuration file");
    add_common(simulate, common, true);

    SweepOptions so;
    int sweep_sites = 6;
    auto* sweep = app.add_subcommand("sweep", "Switch sweep over the mid-bond modulation frequency");
    add_common(sweep, common, false);
    sweep->add_option("--omega-min", so.omega_min)->capture_default_str();
    sweep->add_option("--omega-max", so.omega_max)->capture_default_str();
    sweep->add_option("--d-omega", so.d_omega)->capture_default_str();
    sweep->add_option("--threshold", so.threshold)->capture_default_str();
    sweep->add_option("-L,--sites", sweep_sites, "Chain length when no --config is given")->capture_default_str();

    std::optional<double> omega;
    int periods = 10000, stride = 1, nodes = kDefaultQuadratureNodes;
    auto* strobe = app.add_subcommand("strobe", "Stroboscopic evolution with the one-period propagator");
    add_common(strobe, common, true);
    strobe->add_option("--omega", omega, "Drive frequency fixing the period");
    strobe->add_option("--periods", periods)->capture_default_str();
    strobe->add_option("--stride", stride, "Record every n periods")->capture_default_str();

    auto* magnus_cmd = app.add_subcommand("magnus", "First two Magnus orders of the Floquet Hamiltonian");
    add_common(magnus_cmd, common, true);
    magnus_cmd->add_option("--omega", omega, "Drive frequency fixing the period");
    magnus_cmd->add_option("--nodes", nodes)->capture_default_str();

    auto* local = app.add_subcommand("local", "Locally driven chain with its RWA effective coupling");
    add_common(local, common, true);

    double x1 = 2.0, x2 = 2.84787695, g = 1.0;
    int samples = 2001;
    std::vector<double> omegas;
    auto* control = app.add_subcommand("control", "Bessel control function traces");
    add_common(control, common, false);
    control->add_option("--x1", x1)->capture_default_str();
    control->add_option("--x2", x2)->capture_default_str();
    control->add_option("--omega", omegas, "Control frequencies (default 2 and 4)");
    control->add_option("--g", g)->capture_default_str();
    control->add_option("--samples", samples)->capture_default_str();

    std::string scenario_name;
    bool list = false;
    auto* scenario = app.add_subcommand("scenario", "Run a catalogued scenario");
    add_common(scenario, common, false);
    scenario->add_option("name", scenario_name, "Scenario name");
    scenario->add_flag("--list", list, "List scenarios and their parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (simulate->parsed()) cmd_simulate(common);
        else if (sweep->parsed()) cmd_sweep(common, so, sweep_sites);
        else if (strobe->parsed()) cmd_strobe(common, omega, periods, stride);
        else if (magnus_cmd->parsed()) cmd_magnus(common, omega, nodes);
        else if (local->parsed()) cmd_local(common);
        else if (control->parsed()) cmd_control(common, x1, x2, omegas, g, samples);
        else if (scenario->parsed()) {
            if (list || scenario_name.empty()) {
                for (const auto& n : scenario_names()) {
                    std::cout << n << ':';
                    for (const auto& [k, v] : scenario_defaults(n)) std::cout << ' ' << k << '=' << v;
                    std::cout << '\n';
                }
                return 0;
            }
            if (!common.config.empty()) throw ConfigError("scenario takes --override, not --config");
            std::vector<std::string> overrides = common.overrides;
            if (common.dt || common.t_final) throw ConfigError("scenario uses its own dt/t_final parameters; use --override");
            RunnerOptions ro;
            ro.workers = common.workers;
            const ScenarioResult r = run_scenario(scenario_name, overrides, common.out, ro);
            std::cout << r.summary.dump(2) << '\n';
            std::cerr << r.name << ": " << r.files.size() << " files, " << r.wall_seconds << " s\n";
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const FrontNotCaptured& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
