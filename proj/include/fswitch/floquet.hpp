#pragma once

// Effective (Floquet) Hamiltonians of the driven chains.
//
// The Magnus terms are integrals over the rotating-frame Hamiltonian
// H_I(t) = sum_k c_k(t) A_k:
//
//   H0 = (1/T) int_0^T H_I(t) dt
//   H1 = (1/(2iT)) int_0^T dt1 int_0^t1 dt2 [H_I(t1), H_I(t2)]
//
// Both use a composite trapezoid on N + 1 uniform nodes. For H1 the inner
// integral is the running prefix S(t1) = int_0^t1 H_I, accumulated with the
// same trapezoid, and the outer integrand is [H_I(t1), S(t1)]. Since H_I is
// linear in the fixed operators A_k this reduces to scalar quadratures
//   M_kl = sum_n w_n c_k(t_n) s_l(t_n),   H1 = (1/(2iT)) sum_kl M_kl [A_k, A_l],
// which is the same quadrature with O(N) scalar work per operator pair.

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fswitch/drive.hpp"
#include "fswitch/evolution.hpp"
#include "fswitch/model.hpp"

namespace fswitch {

inline constexpr int kMaxMagnusSites = 8;
inline constexpr int kDefaultQuadratureNodes = 4096;
inline constexpr double kMinRwaRatio = 100.0;

struct MagnusResult {
    Eigen::MatrixXcd order0;
    Eigen::MatrixXcd order1;
    int quadrature_points = 0;
    double period = 0.0;
    std::vector<std::string> warnings;
};

Eigen::MatrixXcd to_dense(const SparseOperator& op);

// Both Magnus orders for an arbitrary term list (already in the frame of
// interest). Requires nodes >= 64 and even.
MagnusResult magnus(const TermList& terms, double period, int nodes = kDefaultQuadratureNodes);

// Magnus orders of the rotating-frame Hamiltonian of `config`.
MagnusResult magnus(const LatticeConfig& config, double period, int nodes = kDefaultQuadratureNodes);
Eigen::MatrixXcd magnus_order0(const LatticeConfig& config, double period, int nodes = kDefaultQuadratureNodes);
Eigen::MatrixXcd magnus_order1(const LatticeConfig& config, double period, int nodes = kDefaultQuadratureNodes);

// exp(-i (H0 + H1) T) through the Hermitian eigendecomposition.
Eigen::MatrixXcd floquet_unitary(const MagnusResult& result);

// Closed-form zeroth order for a chain whose bond L/2 is J0 cos(Omega t) and
// every other bond a constant J0: flip-flop couplings J0 on all bonds except
// L/2 (two decoupled XY chains). Requires 4g/Omega to be an integer >= 2 so
// that every oscillating term averages to zero over T = 2 pi / Omega.
SparseOperator analytic_hf0(const LatticeConfig& config);

struct RwaResult {
    SparseOperator hamiltonian;
    double renormalized_coupling = 0.0;  // lambda0 * J_0(2 eps / nu)
    std::vector<std::string> warnings;
};

// Effective flip-flop chain for a single locally driven spin k: coupling
// lambda0 everywhere except on the two bonds touching k, which carry
// lambda0 * J_0(2 eps / nu). Warns when nu / lambda0 < 100 or nu / g is not
// an odd integer >= 3.
RwaResult rwa_local_effective(const LatticeConfig& config);

// Magnus matrices as (row, col, re, im, abs).
void write_matrix_csv(const Eigen::MatrixXcd& m, const std::filesystem::path& path);

// (t, F, J0(F)) samples of the control function on [0, t_end].
void write_control_trace(const ControlFunction& cf, double t_end, int samples, const std::filesystem::path& path);

}  // namespace fswitch
