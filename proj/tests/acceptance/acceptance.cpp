// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
// Usage: fswitch_acceptance [output_dir] [criterion ...]
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fswitch/bessel.hpp"
#include "fswitch/evolution.hpp"
#include "fswitch/experiments.hpp"
#include "fswitch/observables.hpp"

using namespace fswitch;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

ScenarioResult run(const fs::path& root, const std::string& name, std::vector<std::string> overrides = {}) {
    return run_scenario(name, overrides, root / name);
}

double num(const nlohmann::json& j) { return j.get<double>(); }

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome blocking(const fs::path& root) {
    const ScenarioResult r = run(root, "blocked");
    const auto& s = r.summary;
    const double period = num(s.at("sz1_dominant_period"));
    const double bin_width = num(s.at("frequency_bin_width"));
    const int bin = s.at("sz1_dominant_bin").get<int>();
    // one frequency bin around 1/20 per T
    const double f_target = 1.0 / 20.0;
    const bool period_ok = std::abs(bin * bin_width - f_target) <= bin_width;
    const double floor = num(s.at("sz_floor_sites_3_up"));
    std::ostringstream d;
    d << "period " << period << " T (bin " << bin << "), floor " << floor << ", " << fmt("%.0f s", r.wall_seconds);
    return {period_ok && floor > 0.9, d.str()};
}

Outcome group_velocity(const fs::path& root) {
    const ScenarioResult r = run(root, "unblocked");
    const double v = num(r.summary.at("v_group"));
    const double target = 1.7934;
    const bool ok = std::abs(v - target) <= 0.05 * target && v <= kLiebRobinsonVelocity;
    return {ok, "v_group " + fmt("%.4f", v) + " J0 (target 1.7934 +- 5%, bound 2), " + fmt("%.0f s", r.wall_seconds)};
}

Outcome switch_sweep(const fs::path& root) {
    const ScenarioResult pts = run(root, "switch_onoff");
    const double on = num(pts.summary.at("on").at("verdict").at("max_abs_corr"));
    const double off = num(pts.summary.at("off").at("verdict").at("max_abs_corr"));
    const ScenarioResult sweep = run(root, "switch_sweep");
    const int failed = sweep.summary.at("failed").get<int>();
    const bool ok = off <= kSwitchThreshold + 0.01 && on >= 3.0 * kSwitchThreshold && failed == 0 &&
                    sweep.wall_seconds < 600.0;
    std::ostringstream d;
    d << "max|C34| " << on << " at 0.15g, " << off << " at 2g; sweep " << sweep.summary.at("points").get<int>()
      << " points in " << fmt("%.0f s", sweep.wall_seconds);
    return {ok, d.str()};
}

Outcome stroboscopic(const fs::path& root) {
    const ScenarioResult r = run(root, "stroboscopic");
    const double c = num(r.summary.at("max_abs_C_mid"));
    const double defect = num(r.summary.at("unitarity_defect"));
    std::ostringstream d;
    d << "max|C34(nT)| " << c << " over 1e4 periods, unitarity defect " << defect;
    return {c < 0.05 && defect < 1e-9, d.str()};
}

Outcome magnus_check(const fs::path& root) {
    const ScenarioResult r = run(root, "magnus");
    const double diff = num(r.summary.at("max_abs_diff_analytic"));
    const double ratio = num(r.summary.at("hf1_over_hf0"));
    std::ostringstream d;
    d << "max|H0 - analytic| " << diff << ", max|H1|/max|H0| " << ratio;
    return {diff < 1e-8 && ratio <= 0.2, d.str()};
}

Outcome local_drive(const fs::path& root) {
    const ScenarioResult r = run(root, "local_drive");
    const double left = num(r.summary.at("max_abs_C_bonds_up_to_k"));
    const double right = num(r.summary.at("max_abs_C_last_bond"));
    std::ostringstream d;
    d << "max|C| bonds 1..5 " << left << ", bond 8 " << right;
    return {left < 0.05 && right > 5.0 * 0.05, d.str()};
}

Outcome control(const fs::path& root) {
    const ScenarioResult r = run(root, "control_function");
    double worst_mean = 0.0, worst_defect = 0.0;
    for (const char* k : {"omega1", "omega2"}) {
        worst_mean = std::max(worst_mean, std::abs(num(r.summary.at(k).at("mean_J0_over_T"))));
        worst_defect = std::max(worst_defect, num(r.summary.at(k).at("periodicity_defect")));
    }
    std::ostringstream d;
    d << "max |mean J0(F)| " << worst_mean << ", periodicity defect " << worst_defect;
    return {worst_mean < 1e-7 && worst_defect < 1e-12, d.str()};
}

double max_series_diff(const Trajectory& a, const Trajectory& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.magnetizations[i].size(); ++j)
            m = std::max(m, std::abs(a.magnetizations[i][j] - b.magnetizations[i][j]));
        for (std::size_t j = 0; j < a.correlations[i].size(); ++j)
            m = std::max(m, std::abs(a.correlations[i][j] - b.correlations[i][j]));
    }
    return m;
}

Outcome properties(const fs::path&) {
    std::ostringstream d;
    bool ok = true;
    auto check = [&](const char* name, double value, double tol) {
        const bool pass = value < tol;
        ok = ok && pass;
        d << name << ' ' << value << (pass ? "" : " (FAIL)") << "; ";
    };

    // norm and parity on a driven L=8 chain
    {
        const LatticeConfig c = configs::edge_driven(8, 0.1, 4.0, 2.0);
        const Trajectory t = evolve(c, 5e-3 * kPi, 100.0 * kPi, 20);
        double dn = 0.0, dp = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            dn = std::max(dn, std::abs(t.norms[i] - 1.0));
            dp = std::max(dp, std::abs(t.parity[i] - t.parity.front()));
        }
        check("norm", dn, 1e-6);
        check("parity", dp, 1e-6);
    }
    // two-spin Rabi oscillation against the closed form
    {
        const double j0 = 0.1, g = 1.0;
        const Trajectory t = evolve(configs::uniform_chain(2, j0, g), 0.01, 40.0, 10);
        const double w = std::sqrt(j0 * j0 + 4.0 * g * g);
        double err = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double s = std::sin(w * t.times[i]);
            err = std::max(err, std::abs(0.5 * (1.0 - t.magnetizations[i][0]) - j0 * j0 / (w * w) * s * s));
        }
        check("rabi", err, 1e-6);
    }
    // step halving
    {
        const LatticeConfig c = configs::edge_driven(6, 0.1, 4.0, 2.0);
        const double dt = 5e-3 * kPi;
        const Trajectory a = evolve(c, dt, 50.0 * kPi, 4), b = evolve(c, dt / 2.0, 50.0 * kPi, 8);
        check("step-halving", max_series_diff(a, b), 1e-5);
    }
    // Bessel recurrence and Jacobi-Anger sums
    {
        std::mt19937 rng(1);
        std::uniform_real_distribution<double> ux(1e-3, 10.0), uz(0.0, 3.0), ut(0.0, 2.0 * kPi);
        double rec = 0.0, ja = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double x = ux(rng);
            for (int m = 1; m <= 5; ++m)
                rec = std::max(rec, std::abs(bessel_j(m - 1, x) + bessel_j(m + 1, x) - 2.0 * m / x * bessel_j(m, x)));
            const double z = uz(rng), th = ut(rng);
            std::complex<double> s = bessel_j(0, z);
            for (int m = 1; m <= 20; ++m) {
                const double jm = bessel_j(m, z);
                s += jm * (std::polar(1.0, m * th) + (m % 2 == 0 ? 1.0 : -1.0) * std::polar(1.0, -m * th));
            }
            ja = std::max(ja, std::abs(s - std::polar(1.0, z * std::sin(th))));
        }
        check("bessel-recurrence", rec, 1e-10);
        check("jacobi-anger", ja, 1e-10);
    }
    // lab vs rotating frame at L=2
    {
        const LatticeConfig c = configs::uniform_chain(2, 0.1);
        EvolveOptions o;
        o.dt = 1e-3;
        o.t_final = 30.0;
        o.record_stride = 100;
        const Trajectory lab = evolve(assemble_hamiltonian(c), c.initial_state(), o);
        const Trajectory rot = evolve(interaction_picture_terms(c), c.initial_state(), o);
        check("frame-equivalence", max_series_diff(lab, rot), 1e-6);
    }
    return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
    std::set<int> only;
    for (int i = 2; i < argc; ++i) only.insert(std::stoi(argv[i]));

    const std::vector<std::pair<std::string, std::function<Outcome(const fs::path&)>>> criteria = {
        {"blocking", blocking},         {"group-velocity", group_velocity}, {"switch-sweep", switch_sweep},
        {"stroboscopic", stroboscopic}, {"magnus", magnus_check},           {"local-drive", local_drive},
        {"control-function", control},  {"properties", properties},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second(root);
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("[%s] criterion %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
