#pragma once

// Basis conventions and sparse operator algebra for an L-site spin-1/2 chain.
//
// Basis index b in [0, 2^L): bit (j-1) of b encodes site j, with bit 0 = up
// (sigma^z = +1) and bit 1 = down (sigma^z = -1). Sites are 1-based in the
// public API. The all-up product state therefore sits at index 0.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fswitch {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr int kMaxSites = 20;

class HilbertSpace {
public:
    explicit HilbertSpace(int sites);

    int sites() const noexcept { return sites_; }
    std::size_t dim() const noexcept { return dim_; }

    // Bit mask of site j (1-based).
    std::uint32_t site_mask(int j) const;

    friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

private:
    int sites_;
    std::size_t dim_;
};

enum class Spin : std::uint8_t { Up, Down };

// Parses "uuud" style strings (also accepts the arrows and 0/1).
std::vector<Spin> parse_spins(const std::string& text);
std::string format_spins(std::span<const Spin> spins);

std::size_t basis_index(std::span<const Spin> spins);

class QuantumState {
public:
    // Throws NumericalError if the amplitudes are not normalized to 1e-8.
    QuantumState(HilbertSpace space, CVector amplitudes);

    // Rescales to unit norm; throws NumericalError for a zero vector.
    static QuantumState normalized(HilbertSpace space, CVector amplitudes);

    const HilbertSpace& space() const noexcept { return space_; }
    const CVector& amplitudes() const noexcept { return amplitudes_; }
    cplx operator[](std::size_t b) const { return amplitudes_[b]; }
    double norm() const;

private:
    HilbertSpace space_;
    CVector amplitudes_;
};

// Row-compressed complex matrix over a HilbertSpace with sorted columns.
class SparseOperator {
public:
    struct Triplet {
        std::size_t row;
        std::size_t col;
        cplx value;
    };

    explicit SparseOperator(HilbertSpace space);  // zero operator
    SparseOperator(HilbertSpace space, std::vector<Triplet> triplets,
                   bool hermitian = false);

    static SparseOperator identity(HilbertSpace space);

    const HilbertSpace& space() const noexcept { return space_; }
    std::size_t dim() const noexcept { return space_.dim(); }
    std::size_t nnz() const noexcept { return values_.size(); }
    bool hermitian() const noexcept { return hermitian_; }

    std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
    std::span<const std::uint32_t> columns() const noexcept { return columns_; }
    std::span<const cplx> values() const noexcept { return values_; }

    // Entry lookup by binary search within the row; zero when absent.
    cplx at(std::size_t row, std::size_t col) const;

    // out = this * in, both of length dim.
    void multiply(std::span<const cplx> in, std::span<cplx> out) const;

    SparseOperator adjoint() const;
    SparseOperator scaled(cplx factor) const;

    // Largest |A - A^dagger| entry.
    double hermiticity_defect() const;
    // Largest entry magnitude of (this - other).
    double max_abs_diff(const SparseOperator& other) const;
    double max_abs() const;

    std::vector<CVector> to_dense_rows() const;

    friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
    friend SparseOperator operator*(cplx factor, const SparseOperator& a);

    // Sets the Hermitian flag after verifying it entrywise to 1e-12.
    SparseOperator& mark_hermitian();

private:
    HilbertSpace space_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> columns_;
    CVector values_;
    bool hermitian_ = false;
};

enum class Axis { X, Y, Z, Plus, Minus };
enum class CouplingKind { XX, FlipFlop, DoubleRaise, DoubleLower };

QuantumState product_state(const HilbertSpace& space, std::span<const Spin> spins);

// Pauli (or raising/lowering) operator on site j, identity elsewhere.
SparseOperator site_operator(const HilbertSpace& space, int j, Axis axis);

// Nearest-neighbour coupling on the bond (j, j+1).
SparseOperator two_site_coupling(const HilbertSpace& space, int j, CouplingKind kind);

// Product of sigma^z over all sites (global spin-flip parity).
SparseOperator parity_operator(const HilbertSpace& space);

CVector apply(const SparseOperator& op, const QuantumState& state);
cplx expectation(const SparseOperator& op, const QuantumState& state);

// Diagonal sigma^z expectations for every site, computed directly from
// probabilities. Index 0 is site 1.
std::vector<double> magnetizations(const QuantumState& state);

double norm(std::span<const cplx> v);
cplx inner(std::span<const cplx> a, std::span<const cplx> b);  // <a|b>

}  // namespace fswitch
