#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "fswitch/config_io.hpp"
#include "fswitch/errors.hpp"
#include "fswitch/model.hpp"

using namespace fswitch;

namespace {

double commutator_norm(const SparseOperator& a, const SparseOperator& b) { return (a * b - b * a).max_abs(); }

std::vector<double> sample_times(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    std::vector<double> t(static_cast<std::size_t>(n));
    for (double& x : t) x = u(rng);
    return t;
}

}  // namespace

TEST_SUITE("hamiltonian-model") {

TEST_CASE("two-site lab Hamiltonian") {
    LatticeConfig c = configs::uniform_chain(2, 0.1);
    const SparseOperator h = assemble_hamiltonian(c).hamiltonian_at(0.0);
    CHECK(h.at(0, 0) == cplx(2.0));
    CHECK(h.at(1, 1) == cplx(0.0));
    CHECK(h.at(2, 2) == cplx(0.0));
    CHECK(h.at(3, 3) == cplx(-2.0));
    CHECK(h.at(0, 3) == cplx(0.1));
    CHECK(h.at(3, 0) == cplx(0.1));
    CHECK(h.at(1, 2) == cplx(0.1));
    CHECK(h.at(2, 1) == cplx(0.1));
    CHECK(h.at(0, 1) == cplx(0.0));
}

TEST_CASE("term structure") {
    const LatticeConfig c = configs::edge_driven(8, 0.1, 4.0, 2.0);
    const TermList terms = assemble_hamiltonian(c);
    CHECK(terms.size() == 7);
    CHECK(terms.static_part().nnz() > 0);
    CHECK(terms.terms()[0].coefficient.value_at(0.0) == cplx(0.1));
}

TEST_CASE("undriven local model is time independent") {
    const LatticeConfig c = configs::local_switch(5, 3, 0.01, 0.0, 3.0);
    const TermList terms = assemble_hamiltonian(c);
    const SparseOperator h0 = terms.hamiltonian_at(0.0);
    for (double t : sample_times(8, 1)) CHECK(terms.hamiltonian_at(t).max_abs_diff(h0) == 0.0);
}

TEST_CASE("Hermitian and parity preserving at sampled times") {
    const std::vector<LatticeConfig> configs = {
        configs::edge_driven(6, 0.1, 4.0, 2.0),
        configs::mid_bond_switch(6, 0.1, 2.0),
        configs::local_switch(5, 3, 0.01, 3.6072, 3.0),
    };
    for (const auto& c : configs) {
        const SparseOperator p = parity_operator(c.space());
        const std::vector<TermList> frames = {assemble_hamiltonian(c), interaction_picture_terms(c)};
        for (const TermList& terms : frames) {
            for (double t : sample_times(32, 2)) {
                const SparseOperator h = terms.hamiltonian_at(t);
                CHECK(h.hermiticity_defect() < 1e-12);
                CHECK(commutator_norm(h, p) < 1e-12);
            }
        }
    }
}

TEST_CASE("interaction picture coefficients at t = 0") {
    const LatticeConfig c = configs::edge_driven(4, 0.1, 4.0, 2.0);
    const TermList ip = interaction_picture_terms(c);
    CHECK(ip.size() == 4 * 3);
    CHECK(ip.static_part().nnz() == 0);
    const SparseOperator h0 = ip.hamiltonian_at(0.0);
    for (int j = 1; j <= 3; ++j) {
        const SparseOperator dr = two_site_coupling(c.space(), j, CouplingKind::DoubleRaise);
        // the only entry of the double-raise block on bond j: |dd> -> |uu>
        const std::size_t col = c.space().site_mask(j) | c.space().site_mask(j + 1);
        CHECK(h0.at(0, col) == cplx(0.1));
        CHECK(dr.at(0, col) == cplx(1.0));
    }
}

TEST_CASE("interaction picture matches the rotated lab Hamiltonian") {
    // H_I(t) = U0^dagger H(t) U0 - (diagonal part), with U0 = diag(phases).
    for (const auto& c : {configs::edge_driven(4, 0.1, 4.0, 2.0), configs::local_switch(5, 3, 0.2, 0.9, 3.0)}) {
        const TermList lab = assemble_hamiltonian(c);
        const TermList ip = interaction_picture_terms(c);
        for (double t : sample_times(6, 4)) {
            const CVector u = rotating_frame_phases(c, t);
            const SparseOperator h = lab.hamiltonian_at(t);
            const SparseOperator hi = ip.hamiltonian_at(t);
            double err = 0.0;
            for (std::size_t r = 0; r < h.dim(); ++r) {
                for (std::size_t col = 0; col < h.dim(); ++col) {
                    if (r == col) continue;
                    const cplx rotated = std::conj(u[r]) * h.at(r, col) * u[col];
                    err = std::max(err, std::abs(rotated - hi.at(r, col)));
                }
                err = std::max(err, std::abs(hi.at(r, r)));
            }
            CHECK(err < 1e-12);
        }
    }
}

TEST_CASE("configuration validation") {
    LatticeConfig c = configs::uniform_chain(4, 0.1);
    c.bonds.pop_back();
    CHECK_THROWS_AS(c.validate(), ConfigError);
    LatticeConfig d = configs::uniform_chain(4, 0.1);
    d.initial.pop_back();
    CHECK_THROWS_AS(d.validate(), ConfigError);
    LatticeConfig e = configs::local_switch(5, 3, 0.01, 1.0, 3.0);
    e.local_drives[9] = LocalDrive{1.0, 3.0};
    CHECK_THROWS_AS(e.validate(), ConfigError);
    LatticeConfig f = configs::uniform_chain(3, 0.1);
    f.bonds[0] = DriveSchedule::cosine(0.1, -1.0);
    CHECK_THROWS_AS(f.validate(), ConfigError);
    CHECK_THROWS_AS(configs::mid_bond_switch(5, 0.1, 2.0), ConfigError);
}

TEST_CASE("scenario builders") {
    const LatticeConfig m = configs::mid_bond_switch(6, 0.1, 2.0);
    CHECK(m.initial_state()[32] == cplx(1.0));
    CHECK(std::holds_alternative<CosineDrive>(m.bonds[2].variant()));
    CHECK(std::holds_alternative<ConstantDrive>(m.bonds[1].variant()));
    const LatticeConfig e = configs::edge_driven(5, 0.1, 4.0, 0.0);
    CHECK(std::holds_alternative<ConstantDrive>(e.bonds[1].variant()));
    CHECK(e.initial_state()[0] == cplx(1.0));
}

}  // TEST_SUITE

TEST_SUITE("config-io") {

TEST_CASE("round trip") {
    RunConfig rc;
    rc.lattice = configs::edge_driven(5, 0.1, 4.0, 2.0);
    rc.lattice.bonds[3] = DriveSchedule::bessel_controlled(0.2, ControlFunction{2.0, 2.84787695, 4.0});
    rc.lattice.initial[4] = Spin::Down;
    rc.dt = 0.01;
    rc.t_final = 3.0;
    rc.record_stride = 2;
    const RunConfig back = run_config_from_json(to_json(rc));
    CHECK(to_json(back) == to_json(rc));

    RunConfig local;
    local.lattice = configs::local_switch(9, 5, 0.01, 3.6072, 3.0);
    CHECK(to_json(run_config_from_json(to_json(local))) == to_json(local));
}

TEST_CASE("unknown keys are rejected") {
    nlohmann::json j = to_json(RunConfig{configs::uniform_chain(3, 0.1), {}, {}, {}});
    j["colour"] = "blue";
    CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
    nlohmann::json k = to_json(RunConfig{configs::uniform_chain(3, 0.1), {}, {}, {}});
    k["bonds"][0]["speed"] = 1;
    CHECK_THROWS_AS(run_config_from_json(k), ConfigError);
}

TEST_CASE("malformed documents") {
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"L": 3})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(
                        R"({"L": 2, "bonds": [{"kind": "square", "amplitude": 1}]})")),
                    ConfigError);
    const auto path = std::filesystem::temp_directory_path() / "fswitch_bad.json";
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_run_config(path), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/fswitch.json"), ConfigError);
}

TEST_CASE("overrides") {
    RunConfig rc{configs::uniform_chain(4, 0.1), {}, {}, {}};
    apply_override(rc, "g=2");
    CHECK(rc.lattice.g == 2.0);
    apply_override(rc, "bonds.1.amplitude=0.3");
    CHECK(rc.lattice.bonds[1].value_at(0.0) == doctest::Approx(0.3));
    apply_override(rc, "t_final=5");
    CHECK(rc.t_final == 5.0);
    apply_override(rc, "L=6");
    CHECK(rc.lattice.sites == 6);
    CHECK(rc.lattice.bonds.size() == 5);
    CHECK(rc.lattice.initial.size() == 6);
    CHECK_NOTHROW(rc.lattice.validate());
    CHECK_THROWS_AS(apply_override(rc, "nonsense=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(rc, "g"), ConfigError);
}

}  // TEST_SUITE
