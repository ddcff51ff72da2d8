#include "fswitch/evolution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <map>

#include "fswitch/csv.hpp"
#include "fswitch/errors.hpp"
#include "fswitch/observables.hpp"

namespace fswitch {

namespace {

// Splits an operator into XOR-mask pieces. Every entry (r, c) belongs to the
// piece with mask r ^ c; within one piece each row holds at most one entry.
std::map<std::uint32_t, CVector> split_by_mask(const SparseOperator& op) {
    std::map<std::uint32_t, CVector> pieces;
    const auto offsets = op.row_offsets();
    const auto cols = op.columns();
    const auto vals = op.values();
    for (std::size_t r = 0; r < op.dim(); ++r) {
        for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
            if (vals[k] == cplx{}) continue;
            const auto mask = static_cast<std::uint32_t>(r ^ cols[k]);
            auto [it, inserted] = pieces.try_emplace(mask);
            if (inserted) it->second.assign(op.dim(), cplx{});
            it->second[r] = vals[k];
        }
    }
    return pieces;
}

CVector compress(const CVector& full, int sector) {
    CVector out(full.size() / 2);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = full[sector_basis_index(c, sector)];
    return out;
}

}  // namespace

bool preserves_parity(const TermList& terms) {
    auto even = [](const SparseOperator& op) {
        for (const auto& [mask, values] : split_by_mask(op)) {
            if (std::popcount(mask) % 2 != 0) return false;
        }
        return true;
    };
    if (!even(terms.static_part())) return false;
    return std::all_of(terms.terms().begin(), terms.terms().end(), [&](const Term& t) { return even(t.op); });
}

int state_sector(std::span<const cplx> amplitudes) {
    int sector = -1;
    for (std::size_t b = 0; b < amplitudes.size(); ++b) {
        if (amplitudes[b] == cplx{}) continue;
        const int p = std::popcount(b) & 1;
        if (sector < 0) {
            sector = p;
        } else if (sector != p) {
            return -1;
        }
    }
    return sector;
}

HamiltonianAction::HamiltonianAction(const TermList& terms, int sector)
    : dim_(terms.space().dim()), sector_(sector) {
    if (sector != -1 && sector != 0 && sector != 1) throw DomainError("parity sector must be -1, 0 or 1");
    if (sector >= 0) {
        if (dim_ < 2) throw DomainError("parity sectors need at least one site");
        dim_ /= 2;
    }
    std::map<std::uint32_t, Group> by_mask;
    auto add = [&](const SparseOperator& op, int source, bool time_dependent) {
        for (auto& [full_mask, full_values] : split_by_mask(op)) {
            if (sector >= 0 && std::popcount(full_mask) % 2 != 0) {
                throw DomainError("operator does not preserve parity; cannot restrict to a sector");
            }
            const std::uint32_t mask = sector >= 0 ? full_mask >> 1 : full_mask;
            CVector values = sector >= 0 ? compress(full_values, sector) : std::move(full_values);
            Group& g = by_mask[mask];
            g.mask = mask;
            Piece p{source, true, values[0], {}};
            for (const cplx& v : values) {
                if (v != p.scalar) {
                    p.uniform = false;
                    break;
                }
            }
            if (!p.uniform) p.values = std::move(values);
            g.pieces.push_back(std::move(p));
            g.time_dependent = g.time_dependent || time_dependent;
        }
    };
    add(terms.static_part(), -1, false);
    for (std::size_t k = 0; k < terms.size(); ++k) {
        coefficients_.push_back(terms.terms()[k].coefficient);
        add(terms.terms()[k].op, static_cast<int>(k), true);
    }
    coefficient_values_.assign(coefficients_.size(), cplx{});

    for (auto& [mask, g] : by_mask) {
        g.uniform = std::all_of(g.pieces.begin(), g.pieces.end(), [](const Piece& p) { return p.uniform; });
        groups_.push_back(std::move(g));
    }
    group_bounds_.assign(groups_.size(), 0.0);
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        if (groups_[i].uniform) {
            uniform_masks_.push_back(groups_[i].mask);
            uniform_scalars_.push_back({});
            uniform_group_.push_back(i);
        } else {
            array_masks_.push_back(groups_[i].mask);
            array_values_.emplace_back(dim_);
            array_real_.emplace_back();
            array_is_real_.push_back(0);
            array_group_.push_back(i);
        }
    }
    // Static groups are filled once here; set_time only refreshes the rest.
    time_ = 0.0;
    for (std::size_t k = 0; k < coefficients_.size(); ++k) coefficient_values_[k] = coefficients_[k].value_at(0.0);
    for (std::size_t i = 0; i < groups_.size(); ++i) fill_group(i);
    norm_bound_ = 0.0;
    for (double b : group_bounds_) norm_bound_ += b;
}

void HamiltonianAction::fill_group(std::size_t index) {
    const Group& g = groups_[index];
    auto coefficient = [&](const Piece& p) { return p.source < 0 ? cplx{1.0} : coefficient_values_[static_cast<std::size_t>(p.source)]; };
    if (g.uniform) {
        cplx s{};
        for (const Piece& p : g.pieces) s += coefficient(p) * p.scalar;
        const auto pos = static_cast<std::size_t>(std::find(uniform_group_.begin(), uniform_group_.end(), index) - uniform_group_.begin());
        uniform_scalars_[pos] = s;
        group_bounds_[index] = std::abs(s);
        return;
    }
    const auto pos = static_cast<std::size_t>(std::find(array_group_.begin(), array_group_.end(), index) - array_group_.begin());
    CVector& out = array_values_[pos];
    std::fill(out.begin(), out.end(), cplx{});
    for (const Piece& p : g.pieces) {
        const cplx c = coefficient(p);
        if (p.uniform) {
            for (cplx& v : out) v += c * p.scalar;
        } else {
            for (std::size_t b = 0; b < dim_; ++b) out[b] += c * p.values[b];
        }
    }
    double m = 0.0;
    bool real = true;
    for (const cplx& v : out) {
        m = std::max(m, std::abs(v));
        real = real && v.imag() == 0.0;
    }
    group_bounds_[index] = m;
    array_is_real_[pos] = real ? 1 : 0;
    if (real) {
        array_real_[pos].resize(dim_);
        for (std::size_t b = 0; b < dim_; ++b) array_real_[pos][b] = out[b].real();
    }
}

void HamiltonianAction::set_time(double t) {
    time_ = t;
    for (std::size_t k = 0; k < coefficients_.size(); ++k) coefficient_values_[k] = coefficients_[k].value_at(t);
    refresh_groups();
}

void HamiltonianAction::set_blend(double t1, double w1, double t2, double w2) {
    time_ = w1 * t1 + w2 * t2;
    for (std::size_t k = 0; k < coefficients_.size(); ++k) {
        coefficient_values_[k] = w1 * coefficients_[k].value_at(t1) + w2 * coefficients_[k].value_at(t2);
    }
    refresh_groups();
}

void HamiltonianAction::refresh_groups() {
    norm_bound_ = 0.0;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        if (groups_[i].time_dependent) fill_group(i);
        norm_bound_ += group_bounds_[i];
    }
}

namespace {

// y[b] += w[b] * x[b ^ m] for b in [lo, hi). Within an aligned run of
// 2^ctz(m) rows the source indices are contiguous.
void accumulate_array(double* __restrict y, const double* __restrict x, const double* __restrict w, std::size_t lo,
                      std::size_t hi, std::size_t m) {
    const std::size_t run = m == 0 ? hi - lo : std::min(std::size_t{1} << std::countr_zero(m), hi - lo);
    for (std::size_t base = lo; base < hi; base += run) {
        const double* __restrict xs = x + 2 * (base ^ m);
        double* __restrict ys = y + 2 * base;
        const double* __restrict ws = w + 2 * base;
        for (std::size_t i = 0; i < run; ++i) {
            const double wr = ws[2 * i], wi = ws[2 * i + 1];
            const double xr = xs[2 * i], xi = xs[2 * i + 1];
            ys[2 * i] += wr * xr - wi * xi;
            ys[2 * i + 1] += wr * xi + wi * xr;
        }
    }
}

void accumulate_real_array(double* __restrict y, const double* __restrict x, const double* __restrict w,
                           std::size_t lo, std::size_t hi, std::size_t m) {
    const std::size_t run = m == 0 ? hi - lo : std::min(std::size_t{1} << std::countr_zero(m), hi - lo);
    for (std::size_t base = lo; base < hi; base += run) {
        const double* __restrict xs = x + 2 * (base ^ m);
        double* __restrict ys = y + 2 * base;
        const double* __restrict ws = w + base;
        for (std::size_t i = 0; i < run; ++i) {
            ys[2 * i] += ws[i] * xs[2 * i];
            ys[2 * i + 1] += ws[i] * xs[2 * i + 1];
        }
    }
}

void accumulate_uniform(double* __restrict y, const double* __restrict x, cplx w, std::size_t lo, std::size_t hi,
                        std::size_t m) {
    const std::size_t run = m == 0 ? hi - lo : std::min(std::size_t{1} << std::countr_zero(m), hi - lo);
    const double wr = w.real(), wi = w.imag();
    if (run == 1) {
        // m odd: rows pair up as (b, b ^ 1) with b even.
        for (std::size_t b = lo; b < hi; b += 2) {
            const std::size_t s = b ^ m;
            const double x0r = x[2 * s], x0i = x[2 * s + 1];
            const double x1r = x[2 * s - 2], x1i = x[2 * s - 1];
            y[2 * b] += wr * x0r - wi * x0i;
            y[2 * b + 1] += wr * x0i + wi * x0r;
            y[2 * b + 2] += wr * x1r - wi * x1i;
            y[2 * b + 3] += wr * x1i + wi * x1r;
        }
        return;
    }
    for (std::size_t base = lo; base < hi; base += run) {
        const double* __restrict xs = x + 2 * (base ^ m);
        double* __restrict ys = y + 2 * base;
        if (wi == 0.0) {
            for (std::size_t i = 0; i < 2 * run; ++i) ys[i] += wr * xs[i];
        } else {
            for (std::size_t i = 0; i < run; ++i) {
                const double xr = xs[2 * i], xi = xs[2 * i + 1];
                ys[2 * i] += wr * xr - wi * xi;
                ys[2 * i + 1] += wr * xi + wi * xr;
            }
        }
    }
}

}  // namespace

void HamiltonianAction::apply(std::span<const cplx> in, std::span<cplx> out) const {
    if (in.size() != dim_ || out.size() != dim_) throw DimensionError("HamiltonianAction::apply length mismatch");
    // std::complex is layout-compatible with double[2]. Rows are processed in
    // cache-sized chunks, one mask group at a time.
    const double* x = reinterpret_cast<const double*>(in.data());
    double* y = reinterpret_cast<double*>(out.data());
    constexpr std::size_t kChunk = 256;
    const std::size_t chunk = std::min(dim_, kChunk);

    for (std::size_t lo = 0; lo < dim_; lo += chunk) {
        const std::size_t hi = lo + chunk;
        std::fill(y + 2 * lo, y + 2 * hi, 0.0);
        for (std::size_t a = 0; a < array_masks_.size(); ++a) {
            if (array_is_real_[a] != 0) {
                accumulate_real_array(y, x, array_real_[a].data(), lo, hi, array_masks_[a]);
                continue;
            }
            accumulate_array(y, x, reinterpret_cast<const double*>(array_values_[a].data()), lo, hi, array_masks_[a]);
        }
        for (std::size_t u = 0; u < uniform_masks_.size(); ++u) {
            accumulate_uniform(y, x, uniform_scalars_[u], lo, hi, uniform_masks_[u]);
        }
    }
}

// ---------------------------------------------------------------------------

int taylor_degree(double x, double tolerance) {
    x = std::abs(x);
    if (x == 0.0) return 0;
    const double ex = std::exp(x);
    double term = x;  // x^{K+1}/(K+1)! for K = 0
    for (int k = 0; k < 200; ++k) {
        if (term * ex <= tolerance) return k;
        term *= x / (k + 2);
    }
    throw NumericalError("Taylor degree search did not converge for x = " + std::to_string(x));
}

int taylor_exp_step(const HamiltonianAction& h, double tau, std::span<cplx> psi, std::span<cplx> work1,
                    std::span<cplx> work2, double tolerance) {
    const double x_total = std::abs(tau) * h.norm_bound();
    // Keep each sub-exponential well inside the radius where the series
    // converges without cancellation.
    const int substeps = x_total > 1.0 ? static_cast<int>(std::ceil(x_total)) : 1;
    const double sub_tau = tau / substeps;
    const int degree = taylor_degree(std::abs(sub_tau) * h.norm_bound(), tolerance / substeps);
    const std::size_t n = psi.size();

    for (int s = 0; s < substeps; ++s) {
        std::copy(psi.begin(), psi.end(), work1.begin());
        for (int k = 1; k <= degree; ++k) {
            h.apply(work1, work2);
            // work1 <- (-i tau / k) H work1 ; psi += work1
            const double f = sub_tau / k;
            for (std::size_t b = 0; b < n; ++b) {
                const cplx v = work2[b];
                work1[b] = cplx(f * v.imag(), -f * v.real());
                psi[b] += work1[b];
            }
        }
    }
    return degree;
}

// ---------------------------------------------------------------------------

void record_observables(Trajectory& traj, double t, const QuantumState& state, bool amplitudes) {
    const ZMoments m = z_moments(state);
    traj.times.push_back(t);
    traj.magnetizations.push_back(m.sz);
    std::vector<double> corr(m.szsz.size());
    for (std::size_t j = 0; j < corr.size(); ++j) corr[j] = m.szsz[j] - m.sz[j] * m.sz[j + 1];
    traj.correlations.push_back(std::move(corr));
    traj.parity.push_back(m.parity);
    traj.norms.push_back(std::sqrt(m.norm2));
    if (amplitudes) traj.amplitudes.push_back(ansatz_amplitudes(state));
}

namespace {

std::size_t step_count(double t_final, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive and finite");
    if (!(t_final >= dt * (1.0 - 1e-12))) throw ConfigError("t_final must be >= dt");
    return static_cast<std::size_t>(std::floor(t_final / dt + 1e-9));
}

// Renormalizes when the drift exceeds the threshold; throws on non-finite
// amplitudes. Returns true if the state was rescaled.
bool check_norm(CVector& psi, double threshold, std::size_t step) {
    const double n = norm(psi);
    if (!std::isfinite(n)) {
        throw NumericalError("non-finite amplitudes at step " + std::to_string(step), static_cast<std::ptrdiff_t>(step));
    }
    if (std::abs(n - 1.0) > threshold) {
        for (cplx& z : psi) z /= n;
        return true;
    }
    return false;
}

// Gauss nodes and blend weights of the fourth-order commutator-free scheme.
constexpr double kGaussOffset = 0.28867513459481288225;  // sqrt(3) / 6
constexpr double kCf4Early = 0.5 + 2.0 * kGaussOffset;   // 2 a1
constexpr double kCf4Late = 0.5 - 2.0 * kGaussOffset;    // 2 a2

// Advances psi over [t0, t0 + dt]; a negative dt undoes the step over
// [t0 + dt, t0].
void advance(HamiltonianAction& h, Integrator scheme, double t0, double dt, std::span<cplx> psi, std::span<cplx> w1,
             std::span<cplx> w2, double tolerance) {
    if (scheme == Integrator::Midpoint) {
        h.set_time(t0 + 0.5 * dt);
        taylor_exp_step(h, dt, psi, w1, w2, tolerance);
        return;
    }
    const double lo = std::min(t0, t0 + dt), len = std::abs(dt);
    const double t1 = lo + (0.5 - kGaussOffset) * len, t2 = lo + (0.5 + kGaussOffset) * len;
    const bool forward = dt > 0.0;
    for (int stage = 0; stage < 2; ++stage) {
        const bool first = (stage == 0) == forward;
        if (first) h.set_blend(t1, kCf4Early, t2, kCf4Late);
        else h.set_blend(t1, kCf4Late, t2, kCf4Early);
        taylor_exp_step(h, 0.5 * dt, psi, w1, w2, tolerance);
    }
}

}  // namespace

Trajectory evolve(const TermList& terms, const QuantumState& initial, const EvolveOptions& options) {
    if (!(initial.space() == terms.space())) throw DimensionError("initial state and Hamiltonian differ in L");
    if (options.record_stride < 1) throw ConfigError("record_stride must be >= 1");
    const std::size_t n_steps = step_count(options.t_final, options.dt);

    // Product states and all built-in models stay in one parity sector;
    // evolving there halves the working dimension.
    const int sector =
        options.parity_sector && preserves_parity(terms) ? state_sector(initial.amplitudes()) : -1;
    HamiltonianAction h(terms, sector);
    const std::size_t full_dim = terms.space().dim();
    CVector psi(h.dim());
    if (sector >= 0) {
        for (std::size_t c = 0; c < psi.size(); ++c) psi[c] = initial[sector_basis_index(c, sector)];
    } else {
        psi = initial.amplitudes();
    }
    CVector w1(psi.size()), w2(psi.size());
    auto full_state = [&]() {
        if (sector < 0) return QuantumState(terms.space(), psi);
        CVector full(full_dim, cplx{});
        for (std::size_t c = 0; c < psi.size(); ++c) full[sector_basis_index(c, sector)] = psi[c];
        return QuantumState(terms.space(), std::move(full));
    };

    Trajectory traj;
    traj.time_unit = options.time_unit;
    record_observables(traj, options.t_start, initial, options.record_amplitudes);

    for (std::size_t s = 0; s < n_steps; ++s) {
        const double t0 = options.t_start + static_cast<double>(s) * options.dt;
        advance(h, options.integrator, t0, options.dt, psi, w1, w2, options.taylor_tolerance);
        if (check_norm(psi, options.renormalize_threshold, s + 1)) ++traj.renormalizations;
        if ((s + 1) % static_cast<std::size_t>(options.record_stride) == 0) {
            record_observables(traj, options.t_start + static_cast<double>(s + 1) * options.dt, full_state(),
                               options.record_amplitudes);
        }
    }
    traj.steps = n_steps;
    traj.final_state.emplace(full_state());
    return traj;
}

Trajectory evolve(const LatticeConfig& config, const EvolveOptions& options) {
    return evolve(assemble_hamiltonian(config), config.initial_state(), options);
}

Trajectory evolve(const LatticeConfig& config, double dt, double t_final, int record_stride) {
    EvolveOptions o;
    o.dt = dt;
    o.t_final = t_final;
    o.record_stride = record_stride;
    return evolve(config, o);
}

QuantumState evolve_backward(const TermList& terms, const QuantumState& state, const EvolveOptions& options) {
    const std::size_t n_steps = step_count(options.t_final, options.dt);
    HamiltonianAction h(terms);
    CVector psi = state.amplitudes();
    CVector w1(psi.size()), w2(psi.size());
    const double t_end = options.t_start + static_cast<double>(n_steps) * options.dt;
    for (std::size_t s = 0; s < n_steps; ++s) {
        const double t1 = t_end - static_cast<double>(s) * options.dt;
        advance(h, options.integrator, t1, -options.dt, psi, w1, w2, options.taylor_tolerance);
        check_norm(psi, options.renormalize_threshold, s + 1);
    }
    return QuantumState(terms.space(), std::move(psi));
}

// ---------------------------------------------------------------------------

double Propagator::unitarity_defect() const {
    const Eigen::MatrixXcd d = matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols());
    return d.cwiseAbs().maxCoeff();
}

Propagator one_period_propagator(const TermList& terms, double period, double dt, double t_start,
                                 double taylor_tolerance) {
    const HilbertSpace space = terms.space();
    if (space.sites() > kMaxDensePropagatorSites) {
        throw UnsupportedConfiguration("dense propagators are limited to L <= " +
                                       std::to_string(kMaxDensePropagatorSites));
    }
    if (!(period > 0.0) || !(dt > 0.0)) throw ConfigError("period and dt must be positive");
    const double ratio = period / dt;
    const double n_real = std::round(ratio);
    if (n_real < 1.0 || std::abs(n_real * dt - period) > 1e-9 * period) {
        throw ConfigError("dt does not divide the period to one part in 1e9");
    }
    const auto n_steps = static_cast<std::size_t>(n_real);
    const double step = period / n_real;
    const auto dim = static_cast<Eigen::Index>(space.dim());

    HamiltonianAction h(terms);
    Propagator u{space, Eigen::MatrixXcd::Identity(dim, dim), period};
    CVector w1(space.dim()), w2(space.dim());
    for (std::size_t s = 0; s < n_steps; ++s) {
        h.set_time(t_start + (static_cast<double>(s) + 0.5) * step);
        for (Eigen::Index c = 0; c < dim; ++c) {
            std::span<cplx> col(u.matrix.col(c).data(), space.dim());
            taylor_exp_step(h, step, col, w1, w2, taylor_tolerance);
        }
    }
    const double defect = u.unitarity_defect();
    if (!(defect < kUnitarityTolerance)) {
        throw NumericalError("one-period propagator violates unitarity by " + std::to_string(defect));
    }
    return u;
}

Propagator one_period_propagator(const LatticeConfig& config, double period, double dt) {
    return one_period_propagator(assemble_hamiltonian(config), period, dt);
}

Trajectory stroboscopic_evolve(const Propagator& propagator, const QuantumState& state0, int n_periods,
                               int record_stride) {
    if (n_periods < 0) throw ConfigError("n_periods must be >= 0");
    if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
    if (!(state0.space() == propagator.space)) throw DimensionError("state and propagator differ in L");
    const auto dim = static_cast<Eigen::Index>(state0.space().dim());
    Eigen::VectorXcd psi(dim), next(dim);
    for (Eigen::Index b = 0; b < dim; ++b) psi[b] = state0[static_cast<std::size_t>(b)];

    Trajectory traj;
    traj.time_unit = "T";
    record_observables(traj, 0.0, state0, false);
    auto as_state = [&](const Eigen::VectorXcd& v) {
        return QuantumState(state0.space(), CVector(v.data(), v.data() + v.size()));
    };
    for (int n = 1; n <= n_periods; ++n) {
        next.noalias() = propagator.matrix * psi;
        psi.swap(next);
        const double nrm = psi.norm();
        if (!std::isfinite(nrm)) throw NumericalError("non-finite amplitudes at period " + std::to_string(n), n);
        if (std::abs(nrm - 1.0) > 1e-10) {
            psi /= nrm;
            ++traj.renormalizations;
        }
        if (n % record_stride == 0) record_observables(traj, n, as_state(psi), false);
    }
    traj.steps = static_cast<std::size_t>(n_periods);
    traj.final_state.emplace(as_state(psi));
    return traj;
}

Trajectory stroboscopic_direct(const TermList& terms, const QuantumState& state0, double period, double dt,
                               int n_periods, int record_stride) {
    if (n_periods < 0) throw ConfigError("n_periods must be >= 0");
    if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
    const double n_real = std::round(period / dt);
    if (n_real < 1.0 || std::abs(n_real * dt - period) > 1e-9 * period) {
        throw ConfigError("dt does not divide the period to one part in 1e9");
    }
    const auto per_period = static_cast<std::size_t>(n_real);
    const double step = period / n_real;

    HamiltonianAction h(terms);
    CVector psi = state0.amplitudes();
    CVector w1(psi.size()), w2(psi.size());
    Trajectory traj;
    traj.time_unit = "T";
    record_observables(traj, 0.0, state0, false);
    for (int n = 1; n <= n_periods; ++n) {
        for (std::size_t s = 0; s < per_period; ++s) {
            const double t = (n - 1) * period + (static_cast<double>(s) + 0.5) * step;
            h.set_time(t);
            taylor_exp_step(h, step, psi, w1, w2, 1e-14);
        }
        if (check_norm(psi, 1e-10, static_cast<std::size_t>(n) * per_period)) ++traj.renormalizations;
        if (n % record_stride == 0) record_observables(traj, n, QuantumState(terms.space(), psi), false);
    }
    traj.steps = static_cast<std::size_t>(n_periods) * per_period;
    traj.final_state.emplace(terms.space(), std::move(psi));
    return traj;
}

// ---------------------------------------------------------------------------

std::vector<std::string> write_trajectory_csv(const Trajectory& traj, const std::string& dir, const std::string& prefix) {
    namespace fs = std::filesystem;
    std::vector<std::string> written;
    const std::string time_col = "time[" + traj.time_unit + "]";
    {
        CsvWriter w(fs::path(dir) / (prefix + "magnetization.csv"), {time_col, "site_or_bond", "observable", "value"});
        for (std::size_t i = 0; i < traj.size(); ++i) {
            for (std::size_t j = 0; j < traj.magnetizations[i].size(); ++j) {
                w.cell(traj.times[i]).cell(static_cast<long long>(j + 1)).cell(std::string("sz")).cell(traj.magnetizations[i][j]);
                w.end_row();
            }
        }
        written.push_back(w.path().string());
    }
    {
        CsvWriter w(fs::path(dir) / (prefix + "correlation.csv"), {time_col, "site_or_bond", "observable", "value"});
        for (std::size_t i = 0; i < traj.size(); ++i) {
            for (std::size_t j = 0; j < traj.correlations[i].size(); ++j) {
                w.cell(traj.times[i]).cell(static_cast<long long>(j + 1)).cell(std::string("C")).cell(traj.correlations[i][j]);
                w.end_row();
            }
        }
        written.push_back(w.path().string());
    }
    if (!traj.amplitudes.empty()) {
        CsvWriter w(fs::path(dir) / (prefix + "amplitudes.csv"), {time_col, "site_or_bond", "observable", "value"});
        for (std::size_t i = 0; i < traj.amplitudes.size(); ++i) {
            const AnsatzAmplitudes& a = traj.amplitudes[i];
            w.cell(traj.times[i]).cell(1).cell(std::string("alpha_abs2")).cell(std::norm(a.alpha));
            w.end_row();
            for (std::size_t j = 0; j < a.beta.size(); ++j) {
                w.cell(traj.times[i]).cell(static_cast<long long>(j + 2)).cell(std::string("beta_abs2")).cell(std::norm(a.beta[j]));
                w.end_row();
            }
            w.cell(traj.times[i]).cell(0).cell(std::string("residual")).cell(a.residual);
            w.end_row();
        }
        written.push_back(w.path().string());
    }
    return written;
}

}  // namespace fswitch
