#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fswitch/bessel.hpp"
#include "fswitch/errors.hpp"
#include "fswitch/floquet.hpp"

using namespace fswitch;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("floquet-analysis") {

TEST_CASE("zero couplings give vanishing Magnus terms") {
    const MagnusResult r = magnus(configs::uniform_chain(4, 0.0), kPi, 256);
    CHECK(max_abs(r.order0) == 0.0);
    CHECK(max_abs(r.order1) == 0.0);
    CHECK(r.quadrature_points == 256);
}

TEST_CASE("a single operator with a scalar drive has no first order") {
    const HilbertSpace s(3);
    std::vector<Term> terms;
    terms.push_back({TimeFunction{DriveSchedule::cosine(0.3, 2.0), 0.0, {}}, two_site_coupling(s, 1, CouplingKind::XX)});
    const TermList list(s, SparseOperator(s), std::move(terms));
    const MagnusResult r = magnus(list, kPi, 512);
    CHECK(max_abs(r.order1) < 1e-14);
    CHECK(max_abs(r.order0) < 1e-14);  // cos averages to zero over its period
}

TEST_CASE("Magnus terms are Hermitian") {
    const MagnusResult r = magnus(configs::mid_bond_switch(6, 0.1, 2.0), kPi);
    CHECK(max_abs(r.order0 - r.order0.adjoint()) < 1e-12);
    CHECK(max_abs(r.order1 - r.order1.adjoint()) < 1e-12);
    CHECK(r.warnings.empty());
}

TEST_CASE("numerical zeroth order matches the closed form") {
    const LatticeConfig c = configs::mid_bond_switch(6, 0.1, 2.0);
    const Eigen::MatrixXcd numeric = magnus_order0(c, kPi);
    const Eigen::MatrixXcd analytic = to_dense(analytic_hf0(c));
    CHECK(max_abs(numeric - analytic) < 1e-8);

    // bond 3 is absent from the effective Hamiltonian
    const HilbertSpace s = c.space();
    CHECK(max_abs(to_dense(two_site_coupling(s, 3, CouplingKind::FlipFlop)).cwiseProduct(analytic)) == 0.0);
    CHECK(analytic_hf0(c).max_abs_diff(0.1 * (two_site_coupling(s, 1, CouplingKind::FlipFlop) +
                                              two_site_coupling(s, 2, CouplingKind::FlipFlop) +
                                              two_site_coupling(s, 4, CouplingKind::FlipFlop) +
                                              two_site_coupling(s, 5, CouplingKind::FlipFlop))) < 1e-15);
}

TEST_CASE("quadrature refinement") {
    const LatticeConfig c = configs::mid_bond_switch(6, 0.1, 2.0);
    const MagnusResult a = magnus(c, kPi, 4096), b = magnus(c, kPi, 8192), d = magnus(c, kPi, 16384);
    CHECK(max_abs(a.order0 - b.order0) < 1e-10);
    // the running prefix is a cumulative trapezoid: second-order convergence
    const double e1 = max_abs(a.order1 - b.order1), e2 = max_abs(b.order1 - d.order1);
    CHECK(e1 < 1e-8);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("first order has a symmetric spectrum") {
    const MagnusResult r = magnus(configs::mid_bond_switch(4, 0.1, 2.0), kPi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r.order1);
    const Eigen::VectorXd ev = es.eigenvalues();
    const Eigen::Index n = ev.size();
    for (Eigen::Index i = 0; i < n; ++i) CHECK(std::abs(ev(i) + ev(n - 1 - i)) < 1e-10);
}

TEST_CASE("Magnus expansion converges as the coupling shrinks") {
    double prev = 1.0;
    for (double j0 : {0.1, 0.05, 0.025}) {
        const LatticeConfig c = configs::mid_bond_switch(4, j0, 2.0);
        const MagnusResult r = magnus(c, kPi);
        const Eigen::MatrixXcd uf = floquet_unitary(r);
        const Propagator p = one_period_propagator(interaction_picture_terms(c), kPi, kPi / 4000.0);
        const double err = max_abs(uf - p.matrix);
        INFO("J0 = " << j0 << ", err = " << err);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("RWA effective Hamiltonian") {
    const RwaResult plain = rwa_local_effective(configs::local_switch(5, 3, 0.01, 0.0, 3.0));
    CHECK(plain.renormalized_coupling == doctest::Approx(0.01));
    const HilbertSpace s(5);
    SparseOperator chain(s);
    for (int j = 1; j <= 4; ++j) chain = chain + 0.01 * two_site_coupling(s, j, CouplingKind::FlipFlop);
    CHECK(plain.hamiltonian.max_abs_diff(chain) < 1e-15);
    CHECK(plain.warnings.empty());

    const double eps = kBesselJ0FirstRoot * 3.0 / 2.0;
    const RwaResult cdt = rwa_local_effective(configs::local_switch(9, 5, 0.01, eps, 3.0));
    CHECK(std::abs(cdt.renormalized_coupling) < 2e-4 * 0.01);
    CHECK(cdt.renormalized_coupling == doctest::Approx(0.01 * bessel_j(0, 2.0 * eps / 3.0)));

    CHECK(rwa_local_effective(configs::local_switch(5, 3, 0.1, 1.0, 3.0)).warnings.size() == 1);
    CHECK(rwa_local_effective(configs::local_switch(5, 3, 0.01, 1.0, 2.0)).warnings.size() == 1);
    CHECK_THROWS_AS(rwa_local_effective(configs::uniform_chain(4, 0.1)), UnsupportedConfiguration);
}

TEST_CASE("errors") {
    const LatticeConfig c = configs::mid_bond_switch(4, 0.1, 2.0);
    CHECK_THROWS_AS(magnus(c, kPi, 63), DomainError);
    CHECK_THROWS_AS(magnus(c, kPi, 65), DomainError);
    CHECK_THROWS_AS(magnus(c, 0.0), DomainError);
    CHECK_THROWS_AS(magnus(configs::uniform_chain(kMaxMagnusSites + 1, 0.1), kPi), UnsupportedConfiguration);
    CHECK_THROWS_AS(analytic_hf0(configs::mid_bond_switch(4, 0.1, 3.0)), UnsupportedConfiguration);
    CHECK_THROWS_AS(analytic_hf0(configs::uniform_chain(4, 0.1)), UnsupportedConfiguration);
    CHECK_THROWS_AS(write_control_trace(ControlFunction{2.0, 2.84787695, 2.0}, 1.0, 1, "/tmp/x.csv"), DomainError);
}

}  // TEST_SUITE
