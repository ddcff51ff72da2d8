#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "fswitch/hilbert.hpp"

namespace fswitch {

// Overlaps with the one- and two-flip sector reached from the all-up state:
// alpha with |up...up>, beta_j (j = 2..L) with the state that has sites 1
// and j down. residual is the weight outside that sector.
struct AnsatzAmplitudes {
    cplx alpha;
    std::vector<cplx> beta;  // beta[0] is site j = 2
    double residual = 0.0;
};

struct Trajectory {
    std::string time_unit = "1/g";
    std::vector<double> times;
    std::vector<std::vector<double>> magnetizations;  // [record][site - 1]
    std::vector<std::vector<double>> correlations;    // [record][bond - 1]
    std::vector<double> parity;                       // <prod_j sz_j>
    std::vector<double> norms;
    std::vector<AnsatzAmplitudes> amplitudes;         // only when requested
    std::optional<QuantumState> final_state;
    std::size_t renormalizations = 0;
    std::size_t steps = 0;

    std::size_t size() const noexcept { return times.size(); }
    int sites() const { return magnetizations.empty() ? 0 : static_cast<int>(magnetizations.front().size()); }

    // Series of one site (1-based) or one bond over all records.
    std::vector<double> magnetization_series(int site) const;
    std::vector<double> correlation_series(int bond) const;
};

}  // namespace fswitch
