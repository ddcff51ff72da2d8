#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "fswitch/errors.hpp"
#include "fswitch/evolution.hpp"
#include "fswitch/observables.hpp"

using namespace fswitch;

namespace {

constexpr double kPi = std::numbers::pi;

double max_series_diff(const Trajectory& a, const Trajectory& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.magnetizations[i].size(); ++j) {
            m = std::max(m, std::abs(a.magnetizations[i][j] - b.magnetizations[i][j]));
        }
        for (std::size_t j = 0; j < a.correlations[i].size(); ++j) {
            m = std::max(m, std::abs(a.correlations[i][j] - b.correlations[i][j]));
        }
    }
    return m;
}

LatticeConfig zero_bonds(int L) { return configs::uniform_chain(L, 0.0); }

}  // namespace

TEST_SUITE("time-evolution") {

TEST_CASE("Taylor degree") {
    CHECK(taylor_degree(0.0, 1e-14) == 0);
    const double x = 0.27;
    const int k = taylor_degree(x, 1e-14);
    double term = 1.0;
    for (int i = 1; i <= k + 1; ++i) term *= x / i;
    CHECK(term * std::exp(x) <= 1e-14);
    CHECK(term * (k + 1) / x * std::exp(x) > 1e-14);
}

TEST_CASE("all-up state is stationary without couplings") {
    const Trajectory t = evolve(zero_bonds(5), 0.05, 10.0, 5);
    for (const auto& m : t.magnetizations) {
        for (double v : m) CHECK(std::abs(v - 1.0) < 1e-12);
    }
}

TEST_CASE("two-spin Rabi oscillation") {
    const double j0 = 0.1, g = 1.0;
    const LatticeConfig c = configs::uniform_chain(2, j0, g);
    const Trajectory t = evolve(c, 0.01, 40.0, 10);
    const double omega_r = std::sqrt(j0 * j0 + 4.0 * g * g);
    double err = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double p_dd = 0.5 * (1.0 - t.magnetizations[i][0]);
        const double s = std::sin(omega_r * t.times[i]);
        err = std::max(err, std::abs(p_dd - j0 * j0 / (omega_r * omega_r) * s * s));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("norm and parity are conserved") {
    const LatticeConfig c = configs::mid_bond_switch(6, 0.1, 2.0);
    const Trajectory t = evolve(c, 5e-3 * kPi, 200.0, 10);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(t.norms[i] - 1.0) < 1e-6);
        CHECK(std::abs(t.parity[i] - t.parity.front()) < 1e-6);
        for (double m : t.magnetizations[i]) CHECK(std::abs(m) <= 1.0 + 1e-8);
        for (double v : t.correlations[i]) CHECK(std::abs(v) <= 1.0 + 1e-8);
    }
    CHECK(t.final_state->norm() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("step halving") {
    const LatticeConfig c = configs::edge_driven(6, 0.1, 4.0, 2.0);
    const double dt = 5e-3 * kPi;
    const Trajectory coarse = evolve(c, dt, 50.0 * kPi, 4);
    const Trajectory fine = evolve(c, dt / 2.0, 50.0 * kPi, 8);
    CHECK(max_series_diff(coarse, fine) < 1e-5);
}

TEST_CASE("convergence order of the integrators") {
    const LatticeConfig c = configs::edge_driven(4, 0.1, 4.0, 2.0);
    for (auto [scheme, order] : {std::pair{Integrator::Midpoint, 2.0}, std::pair{Integrator::CommutatorFree4, 4.0}}) {
        Trajectory t[3];
        for (int k = 0; k < 3; ++k) {
            EvolveOptions o;
            o.integrator = scheme;
            o.dt = 0.04 / (1 << k);
            o.t_final = 20.0;
            o.record_stride = 1 << k;
            t[k] = evolve(c, o);
        }
        const double ratio = max_series_diff(t[0], t[1]) / max_series_diff(t[1], t[2]);
        CHECK(std::log2(ratio) == doctest::Approx(order).epsilon(0.1));
    }
}

TEST_CASE("parity-sector kernel matches the full space") {
    const LatticeConfig c = configs::edge_driven(7, 0.1, 4.0, 2.0);
    EvolveOptions a;
    a.dt = 0.02;
    a.t_final = 20.0;
    a.record_stride = 5;
    EvolveOptions b = a;
    b.parity_sector = false;
    const Trajectory ta = evolve(c, a), tb = evolve(c, b);
    CHECK(max_series_diff(ta, tb) < 1e-12);
    CHECK(std::abs(inner(ta.final_state->amplitudes(), tb.final_state->amplitudes()) - 1.0) < 1e-11);

    // a state mixing both sectors falls back to the full space
    CVector mixed(std::size_t{1} << 7, cplx{});
    mixed[0] = mixed[1] = 1.0 / std::sqrt(2.0);
    const TermList terms = assemble_hamiltonian(c);
    const Trajectory tm = evolve(terms, QuantumState(c.space(), mixed), a);
    CHECK(std::abs(tm.final_state->norm() - 1.0) < 1e-10);
}

TEST_CASE("frame equivalence on two sites") {
    for (const LatticeConfig& c : {configs::uniform_chain(2, 0.1), configs::edge_driven(3, 0.1, 4.0, 2.0)}) {
        EvolveOptions opts;
        opts.dt = 1e-3;
        opts.t_final = 30.0;
        opts.record_stride = 100;
        const Trajectory lab = evolve(assemble_hamiltonian(c), c.initial_state(), opts);
        const Trajectory rot = evolve(interaction_picture_terms(c), c.initial_state(), opts);
        CHECK(max_series_diff(lab, rot) < 1e-6);
        const CVector u = rotating_frame_phases(c, opts.t_final);
        double err = 0.0;
        for (std::size_t b = 0; b < u.size(); ++b) {
            err = std::max(err, std::abs((*lab.final_state)[b] - u[b] * (*rot.final_state)[b]));
        }
        CHECK(err < 1e-6);
    }
}

TEST_CASE("time reversal returns the initial state") {
    const LatticeConfig c = configs::mid_bond_switch(6, 0.1, 0.15);
    const TermList terms = assemble_hamiltonian(c);
    EvolveOptions opts;
    opts.dt = 5e-3 * kPi;
    opts.t_final = 200.0;
    opts.record_stride = 1000;
    const Trajectory fwd = evolve(terms, c.initial_state(), opts);
    const QuantumState back = evolve_backward(terms, *fwd.final_state, opts);
    const double fidelity = std::norm(inner(c.initial_state().amplitudes(), back.amplitudes()));
    CHECK(fidelity > 1.0 - 1e-6);
}

TEST_CASE("invalid steps") {
    const LatticeConfig c = configs::uniform_chain(3, 0.1);
    CHECK_THROWS_AS(evolve(c, 0.0, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(evolve(c, 0.1, 0.01, 1), ConfigError);
    CHECK_THROWS_AS(evolve(c, 0.1, 1.0, 0), ConfigError);
}

TEST_CASE("non-finite Hamiltonians are reported") {
    const LatticeConfig c = configs::uniform_chain(2, 0.1);
    const HilbertSpace s = c.space();
    std::vector<Term> terms;
    terms.push_back({TimeFunction{DriveSchedule::constant(std::numeric_limits<double>::quiet_NaN()), 0.0, {}},
                     two_site_coupling(s, 1, CouplingKind::XX)});
    const TermList bad(s, SparseOperator(s), std::move(terms));
    EvolveOptions opts;
    opts.dt = 0.1;
    opts.t_final = 1.0;
    CHECK_THROWS_AS(evolve(bad, c.initial_state(), opts), NumericalError);
}

TEST_CASE("free propagator is a global phase") {
    for (int L : {2, 3, 4, 5}) {
        const Propagator p = one_period_propagator(zero_bonds(L), kPi, kPi / 200.0);
        const double sign = L % 2 == 0 ? 1.0 : -1.0;
        double err = 0.0;
        for (Eigen::Index r = 0; r < p.matrix.rows(); ++r) {
            for (Eigen::Index k = 0; k < p.matrix.cols(); ++k) {
                err = std::max(err, std::abs(p.matrix(r, k) - (r == k ? sign : 0.0)));
            }
        }
        CHECK(err < 1e-12);
    }
}

TEST_CASE("propagator unitarity and step halving") {
    const LatticeConfig c = configs::mid_bond_switch(4, 0.1, 2.0);
    const double T = kPi;
    const Propagator a = one_period_propagator(c, T, 1.25e-5 * T);
    const Propagator b = one_period_propagator(c, T, 0.625e-5 * T);
    CHECK(a.unitarity_defect() < kUnitarityTolerance);
    CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() < 1e-8);
    CHECK_THROWS_AS(one_period_propagator(c, T, 0.3), ConfigError);
    CHECK_THROWS_AS(one_period_propagator(configs::uniform_chain(12, 0.1), T, T / 10), UnsupportedConfiguration);
}

TEST_CASE("stroboscopic evolution") {
    const LatticeConfig c = configs::mid_bond_switch(4, 0.1, 2.0);
    const double T = kPi;
    const Propagator p = one_period_propagator(c, T, 1.25e-5 * T);

    const Trajectory none = stroboscopic_evolve(p, c.initial_state(), 0, 1);
    CHECK(none.size() == 1);
    CHECK(none.time_unit == "T");

    const Trajectory strobe = stroboscopic_evolve(p, c.initial_state(), 100, 5);
    const Trajectory direct = stroboscopic_direct(assemble_hamiltonian(c), c.initial_state(), T, 1e-3 * T, 100, 5);
    CHECK(strobe.size() == 21);
    CHECK(strobe.times.back() == doctest::Approx(100.0));
    CHECK(max_series_diff(strobe, direct) < 1e-6);
}

TEST_CASE("trajectory CSV output") {
    const auto dir = std::filesystem::temp_directory_path() / "fswitch_traj_csv";
    std::filesystem::create_directories(dir);
    EvolveOptions opts;
    opts.dt = 0.1;
    opts.t_final = 1.0;
    opts.record_amplitudes = true;
    const Trajectory t = evolve(configs::uniform_chain(3, 0.1), opts);
    const auto files = write_trajectory_csv(t, dir.string(), "x_");
    CHECK(files.size() == 3);
    std::ifstream in(dir / "x_magnetization.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "time[1/g],site_or_bond,observable,value");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 11 * 3);
}

}  // TEST_SUITE
