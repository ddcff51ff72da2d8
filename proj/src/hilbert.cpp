#include "fswitch/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "fswitch/errors.hpp"

namespace fswitch {

namespace {

constexpr double kNormTolerance = 1e-8;
constexpr double kHermitianTolerance = 1e-12;

void require_same_space(const HilbertSpace& a, const HilbertSpace& b) {
    if (!(a == b)) {
        throw DimensionError("operator/state live on different Hilbert spaces (L=" +
                             std::to_string(a.sites()) + " vs L=" +
                             std::to_string(b.sites()) + ")");
    }
}

void require_site(const HilbertSpace& space, int j) {
    if (j < 1 || j > space.sites()) {
        throw IndexError("site index " + std::to_string(j) + " outside [1, " +
                         std::to_string(space.sites()) + "]");
    }
}

void require_bond(const HilbertSpace& space, int j) {
    if (j < 1 || j > space.sites() - 1) {
        throw IndexError("bond index " + std::to_string(j) + " outside [1, " +
                         std::to_string(space.sites() - 1) + "]");
    }
}

}  // namespace

HilbertSpace::HilbertSpace(int sites) : sites_(sites), dim_(0) {
    if (sites < 1 || sites > kMaxSites) {
        throw ConfigError("site count " + std::to_string(sites) + " outside [1, " +
                          std::to_string(kMaxSites) + "]");
    }
    dim_ = std::size_t{1} << sites;
}

std::uint32_t HilbertSpace::site_mask(int j) const {
    require_site(*this, j);
    return std::uint32_t{1} << (j - 1);
}

std::vector<Spin> parse_spins(const std::string& text) {
    std::vector<Spin> spins;
    for (std::size_t i = 0; i < text.size();) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == 'u' || c == 'U' || c == '0') {
            spins.push_back(Spin::Up);
            ++i;
        } else if (c == 'd' || c == 'D' || c == '1') {
            spins.push_back(Spin::Down);
            ++i;
        } else if (text.compare(i, 3, "↑") == 0) {
            spins.push_back(Spin::Up);
            i += 3;
        } else if (text.compare(i, 3, "↓") == 0) {
            spins.push_back(Spin::Down);
            i += 3;
        } else {
            throw ConfigError("unrecognized spin character in '" + text + "'");
        }
    }
    return spins;
}

std::string format_spins(std::span<const Spin> spins) {
    std::string out;
    out.reserve(spins.size());
    for (Spin s : spins) out.push_back(s == Spin::Up ? 'u' : 'd');
    return out;
}

std::size_t basis_index(std::span<const Spin> spins) {
    std::size_t b = 0;
    for (std::size_t j = 0; j < spins.size(); ++j) {
        if (spins[j] == Spin::Down) b |= std::size_t{1} << j;
    }
    return b;
}

double norm(std::span<const cplx> v) {
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return std::sqrt(s);
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw DimensionError("inner product of vectors of unequal length");
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// ---------------------------------------------------------------------------

QuantumState::QuantumState(HilbertSpace space, CVector amplitudes)
    : space_(space), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != space_.dim()) {
        throw DimensionError("amplitude vector length " + std::to_string(amplitudes_.size()) +
                             " != 2^L = " + std::to_string(space_.dim()));
    }
    const double n = fswitch::norm(amplitudes_);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance) {
        throw NumericalError("state is not normalized (norm = " + std::to_string(n) + ")");
    }
}

QuantumState QuantumState::normalized(HilbertSpace space, CVector amplitudes) {
    const double n = fswitch::norm(amplitudes);
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("cannot normalize a zero or non-finite vector");
    for (cplx& z : amplitudes) z /= n;
    return QuantumState(space, std::move(amplitudes));
}

double QuantumState::norm() const { return fswitch::norm(amplitudes_); }

// ---------------------------------------------------------------------------

SparseOperator::SparseOperator(HilbertSpace space)
    : space_(space), offsets_(space.dim() + 1, 0), hermitian_(true) {}

SparseOperator::SparseOperator(HilbertSpace space, std::vector<Triplet> triplets, bool hermitian)
    : space_(space), offsets_(space.dim() + 1, 0) {
    const std::size_t dim = space_.dim();
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    columns_.reserve(triplets.size());
    values_.reserve(triplets.size());
    std::size_t prev_row = dim, prev_col = dim;
    for (const Triplet& t : triplets) {
        if (t.row >= dim || t.col >= dim) throw IndexError("triplet outside operator dimension");
        if (t.row == prev_row && t.col == prev_col) {
            values_.back() += t.value;  // duplicates are summed
            continue;
        }
        columns_.push_back(static_cast<std::uint32_t>(t.col));
        values_.push_back(t.value);
        ++offsets_[t.row + 1];
        prev_row = t.row;
        prev_col = t.col;
    }
    for (std::size_t r = 0; r < dim; ++r) offsets_[r + 1] += offsets_[r];
    if (hermitian) mark_hermitian();
}

SparseOperator SparseOperator::identity(HilbertSpace space) {
    std::vector<Triplet> t;
    t.reserve(space.dim());
    for (std::size_t b = 0; b < space.dim(); ++b) t.push_back({b, b, 1.0});
    return SparseOperator(space, std::move(t), true);
}

SparseOperator& SparseOperator::mark_hermitian() {
    const double defect = hermiticity_defect();
    if (defect > kHermitianTolerance) {
        throw NumericalError("operator flagged Hermitian deviates by " + std::to_string(defect));
    }
    hermitian_ = true;
    return *this;
}

cplx SparseOperator::at(std::size_t row, std::size_t col) const {
    const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[row]);
    const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[row + 1]);
    const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(col));
    if (it == last || *it != col) return {};
    return values_[static_cast<std::size_t>(it - columns_.begin())];
}

void SparseOperator::multiply(std::span<const cplx> in, std::span<cplx> out) const {
    const std::size_t dim = space_.dim();
    if (in.size() != dim || out.size() != dim) throw DimensionError("matvec length mismatch");
    for (std::size_t r = 0; r < dim; ++r) {
        cplx acc{};
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) acc += values_[k] * in[columns_[k]];
        out[r] = acc;
    }
}

SparseOperator SparseOperator::adjoint() const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            t.push_back({columns_[k], r, std::conj(values_[k])});
        }
    }
    SparseOperator out(space_, std::move(t));
    out.hermitian_ = hermitian_;
    return out;
}

SparseOperator SparseOperator::scaled(cplx factor) const {
    SparseOperator out = *this;
    for (cplx& v : out.values_) v *= factor;
    out.hermitian_ = hermitian_ && factor.imag() == 0.0;
    return out;
}

double SparseOperator::hermiticity_defect() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
            worst = std::max(worst, std::abs(values_[k] - std::conj(at(columns_[k], r))));
        }
    }
    return worst;
}

double SparseOperator::max_abs_diff(const SparseOperator& other) const {
    require_same_space(space_, other.space_);
    return (*this - other).max_abs();
}

double SparseOperator::max_abs() const {
    double m = 0.0;
    for (const cplx& v : values_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<CVector> SparseOperator::to_dense_rows() const {
    std::vector<CVector> rows(dim(), CVector(dim()));
    for (std::size_t r = 0; r < dim(); ++r) {
        for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) rows[r][columns_[k]] = values_[k];
    }
    return rows;
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
    require_same_space(a.space_, b.space_);
    std::vector<SparseOperator::Triplet> t;
    t.reserve(a.nnz() + b.nnz());
    for (const SparseOperator* op : {&a, &b}) {
        for (std::size_t r = 0; r < op->dim(); ++r) {
            for (std::size_t k = op->offsets_[r]; k < op->offsets_[r + 1]; ++k) {
                t.push_back({r, op->columns_[k], op->values_[k]});
            }
        }
    }
    SparseOperator out(a.space_, std::move(t));
    out.hermitian_ = a.hermitian_ && b.hermitian_;
    return out;
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
    return a + b.scaled(-1.0);
}

SparseOperator operator*(cplx factor, const SparseOperator& a) { return a.scaled(factor); }

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
    require_same_space(a.space_, b.space_);
    std::vector<SparseOperator::Triplet> t;
    for (std::size_t r = 0; r < a.dim(); ++r) {
        std::map<std::uint32_t, cplx> row;
        for (std::size_t k = a.offsets_[r]; k < a.offsets_[r + 1]; ++k) {
            const std::uint32_t mid = a.columns_[k];
            for (std::size_t q = b.offsets_[mid]; q < b.offsets_[mid + 1]; ++q) {
                row[b.columns_[q]] += a.values_[k] * b.values_[q];
            }
        }
        for (const auto& [c, v] : row) {
            if (v != cplx{}) t.push_back({r, c, v});
        }
    }
    return SparseOperator(a.space_, std::move(t));
}

// ---------------------------------------------------------------------------

QuantumState product_state(const HilbertSpace& space, std::span<const Spin> spins) {
    if (spins.size() != static_cast<std::size_t>(space.sites())) {
        throw ConfigError("product state needs " + std::to_string(space.sites()) + " spins, got " +
                          std::to_string(spins.size()));
    }
    CVector amp(space.dim());
    amp[basis_index(spins)] = 1.0;
    return QuantumState(space, std::move(amp));
}

SparseOperator site_operator(const HilbertSpace& space, int j, Axis axis) {
    const std::uint32_t mask = space.site_mask(j);
    std::vector<SparseOperator::Triplet> t;
    t.reserve(space.dim());
    for (std::size_t b = 0; b < space.dim(); ++b) {
        const bool down = (b & mask) != 0;
        switch (axis) {
            case Axis::X:
                t.push_back({b ^ mask, b, 1.0});
                break;
            case Axis::Y:
                // sigma^y |up> = i|down>, sigma^y |down> = -i|up>
                t.push_back({b ^ mask, b, down ? cplx{0.0, -1.0} : cplx{0.0, 1.0}});
                break;
            case Axis::Z:
                t.push_back({b, b, down ? -1.0 : 1.0});
                break;
            case Axis::Plus:
                if (down) t.push_back({b ^ mask, b, 1.0});
                break;
            case Axis::Minus:
                if (!down) t.push_back({b ^ mask, b, 1.0});
                break;
        }
    }
    const bool herm = axis == Axis::X || axis == Axis::Y || axis == Axis::Z;
    return SparseOperator(space, std::move(t), herm);
}

SparseOperator two_site_coupling(const HilbertSpace& space, int j, CouplingKind kind) {
    require_bond(space, j);
    const std::uint32_t m1 = space.site_mask(j);
    const std::uint32_t m2 = space.site_mask(j + 1);
    const std::uint32_t pair = m1 | m2;
    std::vector<SparseOperator::Triplet> t;
    for (std::size_t b = 0; b < space.dim(); ++b) {
        const bool d1 = (b & m1) != 0;
        const bool d2 = (b & m2) != 0;
        bool hit = false;
        switch (kind) {
            case CouplingKind::XX: hit = true; break;
            case CouplingKind::FlipFlop: hit = d1 != d2; break;
            case CouplingKind::DoubleRaise: hit = d1 && d2; break;
            case CouplingKind::DoubleLower: hit = !d1 && !d2; break;
        }
        if (hit) t.push_back({b ^ pair, b, 1.0});
    }
    const bool herm = kind == CouplingKind::XX || kind == CouplingKind::FlipFlop;
    return SparseOperator(space, std::move(t), herm);
}

SparseOperator parity_operator(const HilbertSpace& space) {
    std::vector<SparseOperator::Triplet> t;
    t.reserve(space.dim());
    for (std::size_t b = 0; b < space.dim(); ++b) {
        t.push_back({b, b, (std::popcount(b) % 2 == 0) ? 1.0 : -1.0});
    }
    return SparseOperator(space, std::move(t), true);
}

CVector apply(const SparseOperator& op, const QuantumState& state) {
    require_same_space(op.space(), state.space());
    CVector out(op.dim());
    op.multiply(state.amplitudes(), out);
    return out;
}

cplx expectation(const SparseOperator& op, const QuantumState& state) {
    const CVector v = apply(op, state);
    return inner(state.amplitudes(), v);
}

std::vector<double> magnetizations(const QuantumState& state) {
    const int L = state.space().sites();
    std::vector<double> m(static_cast<std::size_t>(L), 0.0);
    const CVector& a = state.amplitudes();
    for (std::size_t b = 0; b < a.size(); ++b) {
        const double p = std::norm(a[b]);
        if (p == 0.0) continue;
        for (int j = 0; j < L; ++j) m[static_cast<std::size_t>(j)] += ((b >> j) & 1U) ? -p : p;
    }
    return m;
}

}  // namespace fswitch
