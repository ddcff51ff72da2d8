#pragma once

// Time evolution of driven chains.
//
// Each step is a product of exponentials of Hermitian operators, either the
// midpoint rule
//     psi(t + dt) = exp(-i dt H(t + dt/2)) psi(t)
// or the fourth-order commutator-free rule with Gauss nodes t1, t2 and
// a1,2 = 1/4 +- sqrt(3)/6,
//     psi(t + dt) = exp(-i dt (a2 H1 + a1 H2)) exp(-i dt (a1 H1 + a2 H2)) psi(t).
// Exponentials act on the vector through a truncated Taylor series whose
// degree is picked from the bound x = dt * ||H||_1 so that the remainder
// x^{K+1} e^x / (K+1)! stays below EvolveOptions::taylor_tolerance.

#include <bit>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fswitch/hilbert.hpp"
#include "fswitch/model.hpp"
#include "fswitch/trajectory.hpp"

namespace fswitch {

// Matrix-free action of H(t) for a TermList.
//
// Every sparse operator is split by the XOR pattern b -> b ^ mask that its
// entries follow (every Pauli product does). Pieces sharing a mask are
// combined at set_time(); pieces with the same value on every row collapse
// to a scalar, so sigma^x sigma^x bonds cost one load per row.
//
// With sector = 0 or 1 the action is restricted to the basis states whose
// number of down spins has that parity. Row c of the reduced space is the
// basis index sector_basis_index(c, sector); every mask must flip an even
// number of sites.
class HamiltonianAction {
public:
    explicit HamiltonianAction(const TermList& terms, int sector = -1);

    std::size_t dim() const noexcept { return dim_; }

    void set_time(double t);
    // H = H_static + sum_k (w1 c_k(t1) + w2 c_k(t2)) A_k, i.e. the blend
    // w1 H(t1) + w2 H(t2) when w1 + w2 = 1. time() reports w1 t1 + w2 t2.
    void set_blend(double t1, double w1, double t2, double w2);
    double time() const noexcept { return time_; }
    // Upper bound on ||H(t)||_1 at the current time.
    double norm_bound() const noexcept { return norm_bound_; }

    // out = H(t) in; `in` and `out` must not alias.
    void apply(std::span<const cplx> in, std::span<cplx> out) const;

    std::size_t group_count() const noexcept { return uniform_masks_.size() + array_masks_.size(); }
    int sector() const noexcept { return sector_; }

private:
    struct Piece {
        int source;  // -1 for the static part, otherwise the term index
        bool uniform;
        cplx scalar;
        CVector values;
    };
    struct Group {
        std::uint32_t mask = 0;
        std::vector<Piece> pieces;
        bool uniform = true;
        bool time_dependent = false;
    };

    void fill_group(std::size_t index);
    void refresh_groups();

    std::size_t dim_;
    int sector_ = -1;
    std::vector<TimeFunction> coefficients_;
    std::vector<cplx> coefficient_values_;
    std::vector<Group> groups_;
    double time_ = 0.0;
    double norm_bound_ = 0.0;

    // Evaluated state for apply().
    std::vector<std::uint32_t> uniform_masks_;
    std::vector<cplx> uniform_scalars_;
    std::vector<std::size_t> uniform_group_;
    std::vector<std::uint32_t> array_masks_;
    std::vector<CVector> array_values_;
    std::vector<std::vector<double>> array_real_;  // filled when the group is real
    std::vector<char> array_is_real_;
    std::vector<std::size_t> array_group_;
    std::vector<double> group_bounds_;
};

// True if every term (and the static part) flips an even number of sites.
bool preserves_parity(const TermList& terms);

// Basis index of row c in the parity sector `sector`.
inline std::size_t sector_basis_index(std::size_t c, int sector) {
    const auto high = c << 1;
    return high | static_cast<std::size_t>((std::popcount(c) & 1) ^ sector);
}

// Parity of the number of down spins shared by all nonzero amplitudes, or
// -1 if the state mixes sectors.
int state_sector(std::span<const cplx> amplitudes);

enum class Integrator {
    // exp(-i dt H(t + dt/2)); second order.
    Midpoint,
    // exp(-i dt/2 B) exp(-i dt/2 A) with A, B blends of H at the two Gauss
    // points; fourth order, still a product of unitary exponentials.
    CommutatorFree4,
};

struct EvolveOptions {
    double dt = 0.0;
    Integrator integrator = Integrator::CommutatorFree4;
    double t_final = 0.0;
    int record_stride = 1;
    double t_start = 0.0;
    bool record_amplitudes = false;
    double taylor_tolerance = 1e-14;
    double renormalize_threshold = 1e-10;
    std::string time_unit = "1/g";
    // Run the Taylor kernel inside the parity sector of the initial state
    // when the Hamiltonian preserves parity. Recorded states stay 2^L long.
    bool parity_sector = true;
};

// Applies exp(-i tau H) to psi in place (tau may be negative), where H is
// the action's current Hamiltonian. Returns the Taylor degree used.
int taylor_exp_step(const HamiltonianAction& h, double tau, std::span<cplx> psi, std::span<cplx> work1,
                    std::span<cplx> work2, double tolerance);

// Smallest Taylor degree K with x^{K+1} e^x / (K+1)! <= tolerance.
int taylor_degree(double x, double tolerance);

Trajectory evolve(const LatticeConfig& config, double dt, double t_final, int record_stride);
Trajectory evolve(const LatticeConfig& config, const EvolveOptions& options);
Trajectory evolve(const TermList& terms, const QuantumState& initial, const EvolveOptions& options);

// Integrates from options.t_start + n dt back to options.t_start, traversing
// H(t) in reverse with conjugated steps exp(+i dt H(t - dt/2)).
QuantumState evolve_backward(const TermList& terms, const QuantumState& state, const EvolveOptions& options);

struct Propagator {
    HilbertSpace space;
    Eigen::MatrixXcd matrix;
    double period = 0.0;

    double unitarity_defect() const;  // max |U^dagger U - I|
};

inline constexpr int kMaxDensePropagatorSites = 10;
inline constexpr double kUnitarityTolerance = 1e-9;

// U(t0 + T, t0) built column by column with the midpoint rule. `dt` must
// divide the period to one part in 1e9.
Propagator one_period_propagator(const TermList& terms, double period, double dt, double t_start = 0.0,
                                 double taylor_tolerance = 1e-15);
Propagator one_period_propagator(const LatticeConfig& config, double period, double dt);

// psi(nT) = U(T)^n psi0, recorded every `record_stride` periods. Times are
// reported in periods.
Trajectory stroboscopic_evolve(const Propagator& propagator, const QuantumState& state0, int n_periods,
                               int record_stride);

// Same trajectory for chains too large for a dense propagator: each period is
// integrated directly.
Trajectory stroboscopic_direct(const TermList& terms, const QuantumState& state0, double period, double dt,
                               int n_periods, int record_stride);

// Records observables of `state` at time t into the trajectory.
void record_observables(Trajectory& traj, double t, const QuantumState& state, bool amplitudes);

// Writes one CSV per observable kind into `dir` (magnetization.csv,
// correlation.csv and, when present, amplitudes.csv). Columns:
// time, site_or_bond, observable, value. Returns the written paths.
std::vector<std::string> write_trajectory_csv(const Trajectory& traj, const std::string& dir,
                                              const std::string& prefix = "");

}  // namespace fswitch
