#include "fswitch/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "fswitch/errors.hpp"

namespace fswitch {

ZMoments z_moments(std::span<const cplx> amplitudes, int sites) {
    ZMoments m;
    const auto L = static_cast<std::size_t>(sites);
    m.sz.assign(L, 0.0);
    m.szsz.assign(L - 1, 0.0);
    // Accumulate the probability of "down" per site and of "anti-aligned"
    // per bond; sz = P(up) - P(down) = norm2 - 2 P(down).
    std::vector<double> down(L, 0.0);
    std::vector<double> anti(L - 1, 0.0);
    double odd = 0.0;
    for (std::size_t b = 0; b < amplitudes.size(); ++b) {
        const double p = std::norm(amplitudes[b]);
        if (p == 0.0) continue;
        m.norm2 += p;
        const std::size_t flips = b ^ (b >> 1);
        for (std::size_t j = 0; j < L; ++j) {
            if ((b >> j) & 1U) down[j] += p;
        }
        for (std::size_t j = 0; j + 1 < L; ++j) {
            if ((flips >> j) & 1U) anti[j] += p;
        }
        if (std::popcount(b) & 1) odd += p;
    }
    for (std::size_t j = 0; j < L; ++j) m.sz[j] = m.norm2 - 2.0 * down[j];
    for (std::size_t j = 0; j + 1 < L; ++j) m.szsz[j] = m.norm2 - 2.0 * anti[j];
    m.parity = m.norm2 - 2.0 * odd;
    return m;
}

ZMoments z_moments(const QuantumState& state) { return z_moments(state.amplitudes(), state.space().sites()); }

double connected_correlation(const QuantumState& state, int bond) {
    const int L = state.space().sites();
    if (bond < 1 || bond > L - 1) {
        throw IndexError("bond " + std::to_string(bond) + " outside [1, " + std::to_string(L - 1) + "]");
    }
    const ZMoments m = z_moments(state);
    const auto j = static_cast<std::size_t>(bond - 1);
    return m.szsz[j] - m.sz[j] * m.sz[j + 1];
}

AnsatzAmplitudes ansatz_amplitudes(const QuantumState& state) {
    const int L = state.space().sites();
    AnsatzAmplitudes a;
    a.alpha = state[0];
    double weight = std::norm(a.alpha);
    for (int j = 2; j <= L; ++j) {
        const std::size_t b = 1U | (std::size_t{1} << (j - 1));
        a.beta.push_back(state[b]);
        weight += std::norm(state[b]);
    }
    a.residual = 1.0 - weight;
    return a;
}

double max_abs_correlation(const Trajectory& trajectory, int bond) {
    double m = 0.0;
    for (double c : trajectory.correlation_series(bond)) m = std::max(m, std::abs(c));
    return m;
}

FrontFit fit_front_line(std::vector<BondMaximum> maxima) {
    if (maxima.size() < 2) throw DomainError("front fit needs at least two bonds");
    const auto n = static_cast<double>(maxima.size());
    double sx = 0, sy = 0;
    for (const BondMaximum& m : maxima) {
        sx += m.bond;
        sy += m.time;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const BondMaximum& m : maxima) {
        sxx += (m.bond - mx) * (m.bond - mx);
        sxy += (m.bond - mx) * (m.time - my);
    }
    FrontFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (const BondMaximum& m : maxima) {
        const double r = m.time - (fit.slope * m.bond + fit.intercept);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    fit.slope_stderr = maxima.size() > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
    if (fit.slope > 0.0) {
        fit.v_group = 1.0 / fit.slope;
        fit.v_group_stderr = fit.slope_stderr / (fit.slope * fit.slope);
    }
    fit.maxima = std::move(maxima);
    return fit;
}

FrontFit front_fit(const Trajectory& trajectory, std::vector<int> bonds, double time_scale) {
    const int L = trajectory.sites();
    if (trajectory.size() < 2) throw DomainError("front fit needs a recorded trajectory");
    if (bonds.empty()) {
        for (int j = 1; j < L; ++j) bonds.push_back(j);
    }
    std::vector<BondMaximum> maxima;
    for (int bond : bonds) {
        if (bond < 1 || bond > L - 1) throw IndexError("front fit bond " + std::to_string(bond) + " out of range");
        const std::vector<double> series = trajectory.correlation_series(bond);
        std::size_t best = 0;
        for (std::size_t i = 1; i < series.size(); ++i) {
            if (std::abs(series[i]) > std::abs(series[best])) best = i;  // strict: earliest wins ties
        }
        if (best + 1 == series.size()) {
            throw FrontNotCaptured("correlation maximum of bond " + std::to_string(bond) +
                                       " is on the final grid point; extend t_final",
                                   bond);
        }
        maxima.push_back({bond, trajectory.times[best] * time_scale, std::abs(series[best])});
    }
    return fit_front_line(std::move(maxima));
}

SwitchVerdict classify_max(double max_abs_corr, double threshold) {
    SwitchVerdict v;
    v.max_abs_corr = max_abs_corr;
    v.threshold = threshold;
    v.mode = max_abs_corr <= threshold ? SwitchMode::Off : SwitchMode::On;
    return v;
}

SwitchVerdict classify_switch(const Trajectory& trajectory, int bond, double threshold) {
    const int L = trajectory.sites();
    if (L > 0 && (bond < 1 || bond > L - 1)) throw IndexError("switch bond " + std::to_string(bond) + " out of range");
    return classify_max(trajectory.size() == 0 ? 0.0 : max_abs_correlation(trajectory, bond), threshold);
}

SpectralPeak dominant_period(std::span<const double> series, double sample_spacing) {
    const std::size_t n = series.size();
    if (n < 4) throw DomainError("spectral peak needs at least 4 samples");
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    SpectralPeak peak;
    const double span = static_cast<double>(n) * sample_spacing;
    peak.bin_width = 1.0 / span;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        double re = 0.0, im = 0.0;
        const double w = -2.0 * std::numbers::pi / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = series[i] - mean;
            const double a = w * static_cast<double>((k * i) % n);
            re += x * std::cos(a);
            im += x * std::sin(a);
        }
        const double power = re * re + im * im;
        if (power > peak.power) {
            peak.power = power;
            peak.bin = static_cast<int>(k);
        }
    }
    peak.period = peak.bin > 0 ? span / peak.bin : 0.0;
    return peak;
}

std::string to_string(SwitchMode mode) { return mode == SwitchMode::On ? "on" : "off"; }

nlohmann::json to_json(const FrontFit& fit) {
    nlohmann::json maxima = nlohmann::json::array();
    for (const BondMaximum& m : fit.maxima) maxima.push_back({{"bond", m.bond}, {"time", m.time}, {"max_abs_corr", m.value}});
    return {{"maxima", maxima},
            {"slope", fit.slope},
            {"intercept", fit.intercept},
            {"v_group", fit.v_group},
            {"v_group_stderr", fit.v_group_stderr},
            {"slope_stderr", fit.slope_stderr},
            {"rms_residual", fit.rms_residual},
            {"v_lieb_robinson", kLiebRobinsonVelocity}};
}

nlohmann::json to_json(const SwitchVerdict& v) {
    return {{"max_abs_corr", v.max_abs_corr}, {"threshold", v.threshold}, {"mode", to_string(v.mode)}};
}

// Trajectory helpers live here since they only read recorded data.
std::vector<double> Trajectory::magnetization_series(int site) const {
    if (site < 1 || site > sites()) throw IndexError("site " + std::to_string(site) + " out of range");
    std::vector<double> s;
    s.reserve(size());
    for (const auto& row : magnetizations) s.push_back(row[static_cast<std::size_t>(site - 1)]);
    return s;
}

std::vector<double> Trajectory::correlation_series(int bond) const {
    if (bond < 1 || bond > sites() - 1) throw IndexError("bond " + std::to_string(bond) + " out of range");
    std::vector<double> s;
    s.reserve(size());
    for (const auto& row : correlations) s.push_back(row[static_cast<std::size_t>(bond - 1)]);
    return s;
}

}  // namespace fswitch
