#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "fswitch/hilbert.hpp"
#include "fswitch/trajectory.hpp"

namespace fswitch {

// Threshold on max |C_{L/2,L/2+1}| separating the blocking mode.
inline constexpr double kSwitchThreshold = 0.05;

// Lieb-Robinson velocity of the chain, in units of J0.
inline constexpr double kLiebRobinsonVelocity = 2.0;

// sigma^z moments of a state, all from the basis probabilities.
struct ZMoments {
    std::vector<double> sz;    // <sz_j>, index j - 1
    std::vector<double> szsz;  // <sz_j sz_{j+1}>, index j - 1
    double parity = 0.0;       // <prod_j sz_j>
    double norm2 = 0.0;
};

ZMoments z_moments(const QuantumState& state);
ZMoments z_moments(std::span<const cplx> amplitudes, int sites);

// <sz_j sz_{j+1}> - <sz_j><sz_{j+1}> for bond j (1-based).
double connected_correlation(const QuantumState& state, int bond);

AnsatzAmplitudes ansatz_amplitudes(const QuantumState& state);

struct BondMaximum {
    int bond = 0;
    double time = 0.0;       // in the trajectory's time unit divided by time_scale
    double value = 0.0;      // max |C|
};

struct FrontFit {
    std::vector<BondMaximum> maxima;
    double slope = 0.0;      // time per bond
    double intercept = 0.0;
    double v_group = 0.0;    // bonds per unit time = 1 / slope
    double rms_residual = 0.0;
    double slope_stderr = 0.0;
    double v_group_stderr = 0.0;
};

// Locates the global maximum of |C_bond| over the grid for each bond (the
// earliest time on ties) and fits time * time_scale = slope * bond + intercept
// by least squares. Pass time_scale = J0 to express times in 1/J0 when the
// trajectory is recorded in 1/g. Empty `bonds` selects 1..L-1.
// Throws FrontNotCaptured when a maximum sits on the final grid point.
FrontFit front_fit(const Trajectory& trajectory, std::vector<int> bonds = {}, double time_scale = 1.0);

// Plain least squares on (x, y) pairs; exposed for reuse and testing.
FrontFit fit_front_line(std::vector<BondMaximum> maxima);

enum class SwitchMode { On, Off };

struct SwitchVerdict {
    double max_abs_corr = 0.0;
    double threshold = kSwitchThreshold;
    SwitchMode mode = SwitchMode::Off;
};

SwitchVerdict classify_switch(const Trajectory& trajectory, int bond, double threshold = kSwitchThreshold);
SwitchVerdict classify_max(double max_abs_corr, double threshold = kSwitchThreshold);

// Largest |C_bond| over the recorded times.
double max_abs_correlation(const Trajectory& trajectory, int bond);

struct SpectralPeak {
    int bin = 0;             // k, frequency k / (N dt)
    double period = 0.0;     // N dt / k
    double bin_width = 0.0;  // 1 / (N dt)
    double power = 0.0;
};

// Dominant nonzero frequency of a uniformly sampled real series (mean
// removed, plain DFT).
SpectralPeak dominant_period(std::span<const double> series, double sample_spacing);

nlohmann::json to_json(const FrontFit& fit);
nlohmann::json to_json(const SwitchVerdict& verdict);
std::string to_string(SwitchMode mode);

}  // namespace fswitch
