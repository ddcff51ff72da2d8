#pragma once

// Driven transverse-field Ising chains and their assembly into term lists.
//
// Two models are supported, both with open boundaries:
//
//   BondDriven:  H(t) = g sum_j sz_j + sum_j J_j(t) sx_j sx_{j+1}
//   LocalDriven: H(t) = sum_j g_j(t) sz_j + lambda0 sum_j sx_j sx_{j+1},
//                g_j(t) = g + eps_j cos(nu_j t) on driven sites, g elsewhere.
//
// Rates are in units of g (hbar = 1).

#include <map>
#include <string>
#include <vector>

#include "fswitch/drive.hpp"
#include "fswitch/hilbert.hpp"

namespace fswitch {

enum class ModelKind { BondDriven, LocalDriven };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& text);

struct LocalDrive {
    double epsilon = 0.0;
    double nu = 0.0;
};

struct LatticeConfig {
    int sites = 2;
    double g = 1.0;
    ModelKind model = ModelKind::BondDriven;
    // BondDriven: one schedule per bond (L - 1 entries).
    std::vector<DriveSchedule> bonds;
    // LocalDriven: uniform coupling and driven sites (1-based).
    double lambda0 = 0.0;
    std::map<int, LocalDrive> local_drives;
    std::vector<Spin> initial;

    HilbertSpace space() const { return HilbertSpace(sites); }
    QuantumState initial_state() const;

    // Throws ConfigError when the invariants do not hold.
    void validate() const;
};

// Builders for the configurations used throughout the figures.
namespace configs {

// Uniform constant bonds J0, all spins up.
LatticeConfig uniform_chain(int sites, double j0, double g = 1.0);

// Bonds 1 and 2 modulated at omega1 and omega2 (omega2 = 0 gives a constant
// second bond), remaining bonds constant J0, all spins up.
LatticeConfig edge_driven(int sites, double j0, double omega1, double omega2, double g = 1.0);

// Bond L/2 modulated at omega, the rest constant; initial state up...up down.
LatticeConfig mid_bond_switch(int sites, double j0, double omega, double g = 1.0);

// Bond 1 at omega1 and bond L/2 at omega_mid, rest constant; all spins up.
LatticeConfig double_drive(int sites, double j0, double omega1, double omega_mid, double g = 1.0);

// Single spin k driven as g + eps cos(nu t); initial state up...up down.
LatticeConfig local_switch(int sites, int k, double lambda0, double epsilon, double nu, double g = 1.0);

}  // namespace configs

struct Term {
    TimeFunction coefficient;
    SparseOperator op;
};

// H(t) = static_part + sum_k coefficient_k(t) * op_k
class TermList {
public:
    TermList(HilbertSpace space, SparseOperator static_part, std::vector<Term> terms);

    const HilbertSpace& space() const noexcept { return space_; }
    const SparseOperator& static_part() const noexcept { return static_part_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }

    SparseOperator hamiltonian_at(double t) const;
    // True when every coefficient is time independent.
    bool time_independent() const;

private:
    HilbertSpace space_;
    SparseOperator static_part_;
    std::vector<Term> terms_;
};

// Lab-frame Hamiltonian.
TermList assemble_hamiltonian(const LatticeConfig& config);

// Hamiltonian in the frame rotating with the full sigma^z part, i.e. with
// U0(t) = exp(-i sum_j (g t + F_j(t)) sz_j), F_j = (eps_j/nu_j) sin(nu_j t).
// Each spin picks up sigma^+_j -> exp(2i(g t + F_j)) sigma^+_j.
TermList interaction_picture_terms(const LatticeConfig& config);

// Diagonal of U0(t): the phase taking an interaction-picture amplitude back
// to the lab frame, psi_lab = U0(t) psi_I.
CVector rotating_frame_phases(const LatticeConfig& config, double t);

}  // namespace fswitch
