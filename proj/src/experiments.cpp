#include "fswitch/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <thread>

#include "fswitch/bessel.hpp"
#include "fswitch/config_io.hpp"
#include "fswitch/csv.hpp"
#include "fswitch/drive.hpp"
#include "fswitch/errors.hpp"
#include "fswitch/evolution.hpp"
#include "fswitch/floquet.hpp"

namespace fswitch {

namespace fs = std::filesystem;

namespace {

using Params = std::map<std::string, double>;

const std::map<std::string, Params>& catalogue() {
    static const std::map<std::string, Params> table = {
        {"blocked",
         {{"L", 16}, {"g", 1.0}, {"J0", kDefaultJ0}, {"omega1", 4.0}, {"omega2", 2.0},
          {"dt_periods", kLabStepPeriods}, {"t_final_periods", 200.0}, {"record_stride", 10}}},
        {"unblocked",
         {{"L", 16}, {"g", 1.0}, {"J0", kDefaultJ0}, {"omega1", 4.0}, {"omega2", 0.0},
          {"dt_J0", 0.00125}, {"t_final_J0", 10.0}, {"record_stride", 8}}},
        {"switch_sweep",
         {{"L", 6}, {"g", 1.0}, {"J0", kDefaultJ0}, {"omega_min", 0.0}, {"omega_max", 3.0},
          {"d_omega", kSweepSpacing}, {"t_final_J0", 100.0}, {"dt_periods", kLabStepPeriods}}},
        {"switch_onoff",
         {{"L", 6}, {"g", 1.0}, {"J0", kDefaultJ0}, {"omega_on", 0.15}, {"omega_off", 2.0},
          {"t_final_J0", 100.0}, {"dt_periods", kLabStepPeriods}, {"record_stride", 4}}},
        {"double_drive",
         {{"L", 6}, {"g", 1.0}, {"J0", kDefaultJ0}, {"omega1", 4.0}, {"omega_mid", 2.0},
          {"t_final_J0", 100.0}, {"dt_periods", kLabStepPeriods}, {"record_stride", 4}}},
        {"stroboscopic",
         {{"L", 6}, {"g", 1.0}, {"J0", kDefaultJ0}, {"omega", 2.0}, {"dt_periods", kPropagatorStepPeriods},
          {"n_periods", 10000}, {"record_stride", 1}}},
        {"magnus", {{"L", 6}, {"g", 1.0}, {"J0", kDefaultJ0}, {"omega", 2.0}, {"nodes", kDefaultQuadratureNodes}}},
        {"local_drive",
         {{"L", 9}, {"g", 1.0}, {"k", 5}, {"nu", 3.0}, {"x0", kBesselJ0FirstRoot}, {"lambda0", 0.01},
          {"record_dt_lambda", kLocalRecordStepLambda}, {"substeps", 32}, {"t_final_lambda", 50.0}}},
        {"control_function",
         {{"g", 1.0}, {"x1", 2.0}, {"x2", 2.84787695}, {"omega1", 2.0}, {"omega2", 4.0}, {"periods", 2.0},
          {"samples", 2001}, {"nodes", 1 << 16}}},
    };
    return table;
}

const std::vector<std::string> kOrder = {"blocked",      "unblocked", "switch_sweep", "switch_onoff",    "double_drive",
                                         "stroboscopic", "magnus",    "local_drive",  "control_function"};

Params resolve(const std::string& name, const std::vector<std::string>& overrides) {
    Params p = scenario_defaults(name);
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override must be key=value: " + o);
        const std::string key = o.substr(0, eq);
        const std::string value = o.substr(eq + 1);
        if (!p.contains(key)) throw ConfigError("unknown parameter '" + key + "' for scenario " + name);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty() || !std::isfinite(v)) {
            throw ConfigError("override value for '" + key + "' is not a number: " + value);
        }
        p[key] = v;
    }
    return p;
}

int as_int(const Params& p, const std::string& key) {
    const double v = p.at(key);
    if (v != std::round(v)) throw ConfigError("parameter '" + key + "' must be an integer");
    return static_cast<int>(v);
}

nlohmann::json params_json(const Params& p) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : p) j[k] = v;
    return j;
}

void rescale_times(Trajectory& traj, double factor, const std::string& unit) {
    for (double& t : traj.times) t *= factor;
    traj.time_unit = unit;
}

void add_files(std::vector<fs::path>& files, const std::vector<std::string>& paths) {
    for (const auto& p : paths) files.emplace_back(p);
}

int evaluate_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Step count of roughly `dt` that lands exactly on t_final.
double aligned_step(double t_final, double dt) {
    const double n = std::max(1.0, std::round(t_final / dt));
    return t_final / n;
}

nlohmann::json trajectory_checks(const Trajectory& traj) {
    double norm_drift = 0.0, parity_drift = 0.0;
    for (double n : traj.norms) norm_drift = std::max(norm_drift, std::abs(n - 1.0));
    for (double p : traj.parity) parity_drift = std::max(parity_drift, std::abs(p - traj.parity.front()));
    return {{"max_norm_drift", norm_drift}, {"max_parity_drift", parity_drift},
            {"renormalizations", traj.renormalizations}, {"steps", traj.steps}};
}

// Lab-frame run of a bond-driven chain, reported in 1/J0.
Trajectory run_in_j0_units(const LatticeConfig& config, double j0, double t_final_j0, double dt, int stride) {
    EvolveOptions opts;
    opts.t_final = t_final_j0 / j0;
    opts.dt = aligned_step(opts.t_final, dt);
    opts.record_stride = stride;
    Trajectory traj = evolve(config, opts);
    rescale_times(traj, j0, "1/J0");
    return traj;
}

nlohmann::json correlation_maxima(const Trajectory& traj) {
    nlohmann::json j = nlohmann::json::array();
    for (int b = 1; b < traj.sites(); ++b) j.push_back({{"bond", b}, {"max_abs_C", max_abs_correlation(traj, b)}});
    return j;
}

ScenarioResult run_blocked(const Params& p, const fs::path& dir) {
    const int L = as_int(p, "L");
    const double g = p.at("g");
    const double T = std::numbers::pi / g;
    const LatticeConfig config = configs::edge_driven(L, p.at("J0"), p.at("omega1"), p.at("omega2"), g);
    EvolveOptions opts;
    opts.dt = p.at("dt_periods") * T;
    opts.t_final = p.at("t_final_periods") * T;
    opts.record_stride = as_int(p, "record_stride");
    Trajectory traj = evolve(config, opts);
    rescale_times(traj, 1.0 / T, "T");

    ScenarioResult r;
    add_files(r.files, write_trajectory_csv(traj, dir.string()));
    const auto sz1 = traj.magnetization_series(1);
    const SpectralPeak peak = dominant_period(sz1, traj.times[1] - traj.times[0]);
    nlohmann::json minima = nlohmann::json::array();
    double floor = 1.0;
    for (int j = 1; j <= L; ++j) {
        const auto s = traj.magnetization_series(j);
        const double m = *std::min_element(s.begin(), s.end());
        minima.push_back({{"site", j}, {"min_sz", m}});
        if (j >= 3) floor = std::min(floor, m);
    }
    r.summary = {{"time_unit", "T"},
                 {"sz1_dominant_period", peak.period},
                 {"sz1_dominant_bin", peak.bin},
                 {"frequency_bin_width", peak.bin_width},
                 {"min_sz_per_site", minima},
                 {"sz_floor_sites_3_up", floor},
                 {"checks", trajectory_checks(traj)}};
    r.summary["lattice"] = to_json(config);
    return r;
}

ScenarioResult run_unblocked(const Params& p, const fs::path& dir) {
    const int L = as_int(p, "L");
    const double j0 = p.at("J0");
    const LatticeConfig config = configs::edge_driven(L, j0, p.at("omega1"), p.at("omega2"), p.at("g"));
    Trajectory traj = run_in_j0_units(config, j0, p.at("t_final_J0"), p.at("dt_J0") / j0, as_int(p, "record_stride"));

    ScenarioResult r;
    add_files(r.files, write_trajectory_csv(traj, dir.string()));
    const FrontFit fit = front_fit(traj);
    nlohmann::json fj = to_json(fit);
    fj["time_unit"] = "1/J0";
    fj["v_group_units"] = "J0";
    fj["lieb_robinson_velocity"] = kLiebRobinsonVelocity;
    fj["within_lieb_robinson"] = fit.v_group <= kLiebRobinsonVelocity;
    const fs::path fit_path = dir / "front_fit.json";
    write_json(fj, fit_path);
    r.files.push_back(fit_path);
    r.summary = {{"time_unit", "1/J0"}, {"v_group", fit.v_group}, {"v_group_stderr", fit.v_group_stderr},
                 {"checks", trajectory_checks(traj)}};
    r.summary["lattice"] = to_json(config);
    return r;
}

ScenarioResult run_switch_sweep(const Params& p, const fs::path& dir, const RunnerOptions& ro) {
    const int L = as_int(p, "L");
    const double g = p.at("g");
    const LatticeConfig base = configs::mid_bond_switch(L, p.at("J0"), 0.0, g);
    SweepOptions so;
    so.omega_min = p.at("omega_min");
    so.omega_max = p.at("omega_max");
    so.d_omega = p.at("d_omega");
    so.t_final = p.at("t_final_J0") / p.at("J0");
    so.dt = p.at("dt_periods") * std::numbers::pi / g;
    so.workers = ro.workers;
    const SweepResult sweep = sweep_switch(base, so);

    ScenarioResult r;
    const fs::path csv = dir / "sweep.csv";
    write_sweep_csv(sweep, csv);
    r.files.push_back(csv);
    int on = 0, off = 0, failed = 0;
    for (const SweepRow& row : sweep.rows) {
        if (row.error) {
            ++failed;
        } else if (row.mode == SwitchMode::On) {
            ++on;
        } else {
            ++off;
        }
    }
    r.summary = {{"points", sweep.rows.size()}, {"on", on}, {"off", off}, {"failed", failed},
                 {"bond", sweep.bond}, {"threshold", sweep.threshold}};
    return r;
}

ScenarioResult run_switch_onoff(const Params& p, const fs::path& dir) {
    const int L = as_int(p, "L");
    const double j0 = p.at("J0");
    const double g = p.at("g");
    const double dt = p.at("dt_periods") * std::numbers::pi / g;
    ScenarioResult r;
    for (const auto& [label, key] : {std::pair{"on", "omega_on"}, std::pair{"off", "omega_off"}}) {
        const LatticeConfig config = configs::mid_bond_switch(L, j0, p.at(key), g);
        const Trajectory traj = run_in_j0_units(config, j0, p.at("t_final_J0"), dt, as_int(p, "record_stride"));
        add_files(r.files, write_trajectory_csv(traj, dir.string(), std::string(label) + "_"));
        const SwitchVerdict v = classify_switch(traj, L / 2);
        r.summary[label] = {{"omega", p.at(key)}, {"verdict", to_json(v)}, {"max_abs_C_per_bond", correlation_maxima(traj)},
                            {"checks", trajectory_checks(traj)}};
    }
    r.summary["time_unit"] = "1/J0";
    return r;
}

ScenarioResult run_double_drive(const Params& p, const fs::path& dir) {
    const int L = as_int(p, "L");
    const double j0 = p.at("J0");
    const double g = p.at("g");
    const LatticeConfig config = configs::double_drive(L, j0, p.at("omega1"), p.at("omega_mid"), g);
    const Trajectory traj = run_in_j0_units(config, j0, p.at("t_final_J0"), p.at("dt_periods") * std::numbers::pi / g,
                                            as_int(p, "record_stride"));
    ScenarioResult r;
    add_files(r.files, write_trajectory_csv(traj, dir.string()));
    r.summary = {{"time_unit", "1/J0"}, {"verdict", to_json(classify_switch(traj, L / 2))},
                 {"max_abs_C_per_bond", correlation_maxima(traj)}, {"checks", trajectory_checks(traj)}};
    r.summary["lattice"] = to_json(config);
    return r;
}

ScenarioResult run_stroboscopic(const Params& p, const fs::path& dir) {
    const int L = as_int(p, "L");
    const double period = 2.0 * std::numbers::pi / p.at("omega");
    const LatticeConfig config = configs::mid_bond_switch(L, p.at("J0"), p.at("omega"), p.at("g"));
    const Propagator prop = one_period_propagator(config, period, p.at("dt_periods") * period);
    const Trajectory traj = stroboscopic_evolve(prop, config.initial_state(), as_int(p, "n_periods"),
                                                as_int(p, "record_stride"));
    ScenarioResult r;
    add_files(r.files, write_trajectory_csv(traj, dir.string()));
    const int mid = L / 2;
    r.summary = {{"time_unit", "T"},
                 {"period", period},
                 {"unitarity_defect", prop.unitarity_defect()},
                 {"max_abs_C_mid", max_abs_correlation(traj, mid)},
                 {"max_abs_C_mid_plus_1", mid + 1 < L ? max_abs_correlation(traj, mid + 1) : 0.0},
                 {"checks", trajectory_checks(traj)}};
    r.summary["lattice"] = to_json(config);
    return r;
}

ScenarioResult run_magnus(const Params& p, const fs::path& dir) {
    const int L = as_int(p, "L");
    const double period = 2.0 * std::numbers::pi / p.at("omega");
    const LatticeConfig config = configs::mid_bond_switch(L, p.at("J0"), p.at("omega"), p.at("g"));
    const MagnusResult m = magnus(config, period, as_int(p, "nodes"));
    const Eigen::MatrixXcd analytic = to_dense(analytic_hf0(config));

    ScenarioResult r;
    for (const auto& [name, mat] : {std::pair{"hf0.csv", &m.order0}, std::pair{"hf1.csv", &m.order1},
                                    std::pair{"hf0_analytic.csv", &analytic}}) {
        write_matrix_csv(*mat, dir / name);
        r.files.push_back(dir / name);
    }
    const double max0 = m.order0.cwiseAbs().maxCoeff();
    const double max1 = m.order1.cwiseAbs().maxCoeff();
    r.summary = {{"period", period},
                 {"quadrature_points", m.quadrature_points},
                 {"max_abs_hf0", max0},
                 {"max_abs_hf1", max1},
                 {"hf1_over_hf0", max0 > 0.0 ? max1 / max0 : 0.0},
                 {"max_abs_diff_analytic", (m.order0 - analytic).cwiseAbs().maxCoeff()},
                 {"warnings", m.warnings}};
    r.summary["lattice"] = to_json(config);
    return r;
}

ScenarioResult run_local_drive(const Params& p, const fs::path& dir) {
    const int L = as_int(p, "L");
    const int k = as_int(p, "k");
    const double lambda0 = p.at("lambda0");
    const double nu = p.at("nu");
    const double epsilon = p.at("x0") * nu / 2.0;
    const LatticeConfig config = configs::local_switch(L, k, lambda0, epsilon, nu, p.at("g"));

    // The record interval is too coarse for the g and nu oscillations, so
    // each record interval is integrated in `substeps` midpoint steps.
    const double record_dt = p.at("record_dt_lambda") / lambda0;
    const int substeps = as_int(p, "substeps");
    if (substeps < 1) throw ConfigError("substeps must be >= 1");
    EvolveOptions opts;
    opts.dt = record_dt / substeps;
    opts.t_final = p.at("t_final_lambda") / lambda0;
    opts.record_stride = substeps;
    Trajectory traj = evolve(config, opts);
    rescale_times(traj, lambda0, "1/lambda0");

    const RwaResult rwa = rwa_local_effective(config);
    ScenarioResult r;
    add_files(r.files, write_trajectory_csv(traj, dir.string()));
    double left = 0.0;
    for (int j = 1; j <= std::min(k, L - 1); ++j) left = std::max(left, max_abs_correlation(traj, j));
    r.summary = {{"time_unit", "1/lambda0"},
                 {"epsilon", epsilon},
                 {"integration_dt", opts.dt},
                 {"max_abs_C_bonds_up_to_k", left},
                 {"max_abs_C_last_bond", max_abs_correlation(traj, L - 1)},
                 {"max_abs_C_per_bond", correlation_maxima(traj)},
                 {"rwa_renormalized_coupling", rwa.renormalized_coupling},
                 {"rwa_warnings", rwa.warnings},
                 {"checks", trajectory_checks(traj)}};
    r.summary["lattice"] = to_json(config);
    return r;
}

ScenarioResult run_control_function(const Params& p, const fs::path& dir) {
    const double g = p.at("g");
    const double T = std::numbers::pi / g;
    const int samples = as_int(p, "samples");
    ScenarioResult r;
    r.summary["period_T"] = T;
    for (const char* key : {"omega1", "omega2"}) {
        const ControlFunction cf{p.at("x1"), p.at("x2"), p.at(key)};
        const fs::path path = dir / ("control_" + std::string(key) + ".csv");
        write_control_trace(cf, p.at("periods") * T, samples, path);
        r.files.push_back(path);
        double defect = 0.0;
        const double own = cf.period();
        for (int i = 0; i < samples; ++i) {
            const double t = 2.0 * T * i / (samples - 1);
            defect = std::max(defect, std::abs(cf.value(t + own) - cf.value(t)));
        }
        r.summary[key] = {{"omega", cf.omega},
                          {"mean_J0_over_T", control_average(cf, as_int(p, "nodes"), g)},
                          {"own_period", own},
                          {"periodicity_defect", defect}};
    }
    return r;
}

nlohmann::json tolerances_for(const std::string& name) {
    nlohmann::json t = {{"integrator", "commutator-free 4th order"},
                        {"taylor_tolerance", EvolveOptions{}.taylor_tolerance},
                        {"renormalize_threshold", EvolveOptions{}.renormalize_threshold}};
    if (name == "stroboscopic") {
        t["integrator"] = "midpoint (one-period propagator)";
        t["propagator_taylor_tolerance"] = 1e-15;
    }
    if (name == "switch_sweep" || name == "switch_onoff" || name == "double_drive") t["switch_threshold"] = kSwitchThreshold;
    return t;
}

}  // namespace

std::vector<std::string> scenario_names() { return kOrder; }

std::map<std::string, double> scenario_defaults(const std::string& name) {
    const auto it = catalogue().find(name);
    if (it == catalogue().end()) throw ConfigError("unknown scenario: " + name);
    return it->second;
}

ScenarioResult run_scenario(const std::string& name, const std::vector<std::string>& overrides,
                            const fs::path& output_dir, const RunnerOptions& options) {
    const Params p = resolve(name, overrides);
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec || !fs::is_directory(output_dir)) throw ConfigError("cannot create output directory " + output_dir.string());

    const auto start = std::chrono::steady_clock::now();
    ScenarioResult r;
    try {
        if (name == "blocked") r = run_blocked(p, output_dir);
        else if (name == "unblocked") r = run_unblocked(p, output_dir);
        else if (name == "switch_sweep") r = run_switch_sweep(p, output_dir, options);
        else if (name == "switch_onoff") r = run_switch_onoff(p, output_dir);
        else if (name == "double_drive") r = run_double_drive(p, output_dir);
        else if (name == "stroboscopic") r = run_stroboscopic(p, output_dir);
        else if (name == "magnus") r = run_magnus(p, output_dir);
        else if (name == "local_drive") r = run_local_drive(p, output_dir);
        else r = run_control_function(p, output_dir);
    } catch (const NumericalError& e) {
        throw NumericalError("scenario " + name + ": " + e.what(), e.step());
    }
    r.name = name;
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const fs::path summary_path = output_dir / "summary.json";
    write_json(r.summary, summary_path);
    r.files.push_back(summary_path);
    r.files.push_back(write_manifest(output_dir, name, params_json(p), tolerances_for(name), r.wall_seconds, r.files));
    return r;
}

std::vector<double> sweep_grid(double omega_min, double omega_max, double d_omega) {
    if (!(d_omega > 0.0)) throw ConfigError("sweep spacing must be positive");
    if (!(omega_max >= omega_min)) throw ConfigError("sweep needs omega_max >= omega_min");
    std::vector<double> grid;
    for (long long k = 0;; ++k) {
        const double w = omega_min + static_cast<double>(k) * d_omega;
        if (w > omega_max + 1e-9) break;
        grid.push_back(w);
    }
    return grid;
}

SweepResult sweep_switch(const LatticeConfig& base, const SweepOptions& options) {
    base.validate();
    if (base.model != ModelKind::BondDriven || base.sites % 2 != 0) {
        throw ConfigError("switch sweep needs a bond-driven chain with even L");
    }
    const auto mid = static_cast<std::size_t>(base.sites / 2 - 1);
    double j0 = 0.0;
    const auto& v = base.bonds[mid].variant();
    if (const auto* c = std::get_if<ConstantDrive>(&v)) j0 = c->value;
    else if (const auto* cs = std::get_if<CosineDrive>(&v)) j0 = cs->amplitude;
    else throw ConfigError("switch sweep needs a constant or cosine bond at L/2");
    if (j0 == 0.0) throw ConfigError("switch sweep needs a nonzero J0 on bond L/2");

    const std::vector<double> grid = sweep_grid(options.omega_min, options.omega_max, options.d_omega);
    const double t_final = options.t_final > 0.0 ? options.t_final : 100.0 / std::abs(j0);
    const double dt = options.dt > 0.0 ? options.dt : kLabStepPeriods * std::numbers::pi / base.g;

    SweepResult result;
    result.bond = base.sites / 2;
    result.threshold = options.threshold;
    result.rows.resize(grid.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            SweepRow& row = result.rows[i];
            row.omega = grid[i];
            try {
                LatticeConfig c = base;
                c.bonds[mid] = DriveSchedule::cosine(j0, grid[i]);
                EvolveOptions opts;
                opts.t_final = t_final;
                opts.dt = aligned_step(t_final, dt);
                const Trajectory traj = evolve(c, opts);
                const SwitchVerdict verdict = classify_switch(traj, result.bond, options.threshold);
                row.max_abs_corr = verdict.max_abs_corr;
                row.mode = verdict.mode;
            } catch (const std::exception& e) {
                row.error = e.what();
                row.max_abs_corr = std::numeric_limits<double>::quiet_NaN();
            }
        }
    };
    const int n = std::min<int>(evaluate_workers(options.workers), static_cast<int>(std::max<std::size_t>(grid.size(), 1)));
    std::vector<std::thread> pool;
    for (int w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return result;
}

void write_sweep_csv(const SweepResult& sweep, const fs::path& path) {
    CsvWriter w(path, {"omega[g]", "max_abs_C", "mode", "error"});
    for (const SweepRow& row : sweep.rows) {
        w.cell(row.omega).cell(row.max_abs_corr).cell(row.error ? std::string("error") : to_string(row.mode));
        w.cell(row.error.value_or(""));
        w.end_row();
    }
}

fs::path write_manifest(const fs::path& dir, const std::string& scenario, const nlohmann::json& config,
                        const nlohmann::json& tolerances, double wall_seconds, const std::vector<fs::path>& files) {
    nlohmann::json list = nlohmann::json::array();
    for (const fs::path& f : files) {
        list.push_back({{"path", fs::relative(f, dir).generic_string()}, {"sha256", sha256_file(f)},
                        {"bytes", fs::file_size(f)}});
    }
    const nlohmann::json manifest = {{"scenario", scenario},
                                     {"config", config},
                                     {"tolerances", tolerances},
                                     {"wall_seconds", wall_seconds},
                                     {"files", list}};
    const fs::path path = dir / "manifest.json";
    write_json(manifest, path);
    return path;
}

void write_json(const nlohmann::json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace fswitch
