#include "fswitch/floquet.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fswitch/bessel.hpp"
#include "fswitch/csv.hpp"
#include "fswitch/errors.hpp"

namespace fswitch {

Eigen::MatrixXcd to_dense(const SparseOperator& op) {
    const auto dim = static_cast<Eigen::Index>(op.dim());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    const auto offsets = op.row_offsets();
    const auto cols = op.columns();
    const auto vals = op.values();
    for (std::size_t r = 0; r < op.dim(); ++r) {
        for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cols[k])) = vals[k];
        }
    }
    return m;
}

MagnusResult magnus(const TermList& terms, double period, int nodes) {
    if (nodes < 64 || nodes % 2 != 0) throw DomainError("Magnus quadrature needs an even node count >= 64");
    if (!(period > 0.0)) throw DomainError("Magnus period must be positive");
    if (terms.space().sites() > kMaxMagnusSites) {
        throw UnsupportedConfiguration("dense Magnus terms are limited to L <= " + std::to_string(kMaxMagnusSites));
    }

    // Operators A_k; the static part enters with coefficient 1.
    std::vector<Eigen::MatrixXcd> ops;
    std::vector<const TimeFunction*> coeffs;
    const bool has_static = terms.static_part().nnz() > 0;
    if (has_static) {
        ops.push_back(to_dense(terms.static_part()));
        coeffs.push_back(nullptr);
    }
    for (const Term& t : terms.terms()) {
        ops.push_back(to_dense(t.op));
        coeffs.push_back(&t.coefficient);
    }
    const std::size_t K = ops.size();
    const auto dim = static_cast<Eigen::Index>(terms.space().dim());

    MagnusResult result;
    result.period = period;
    result.quadrature_points = nodes;
    result.order0 = Eigen::MatrixXcd::Zero(dim, dim);
    result.order1 = Eigen::MatrixXcd::Zero(dim, dim);
    if (K == 0) return result;

    const double h = period / nodes;
    auto coefficient = [&](std::size_t k, double t) -> cplx {
        return coeffs[k] == nullptr ? cplx{1.0} : coeffs[k]->value_at(t);
    };

    // Trapezoid assumes H_I(0) == H_I(T).
    double mismatch = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        mismatch = std::max(mismatch, std::abs(coefficient(k, 0.0) - coefficient(k, period)) * ops[k].cwiseAbs().maxCoeff());
    }
    if (mismatch > 1e-8) {
        std::ostringstream msg;
        msg << "H_I(0) and H_I(T) differ by " << mismatch << "; trapezoid quadrature assumes periodicity";
        result.warnings.push_back(msg.str());
    }

    std::vector<cplx> mean(K, cplx{});
    std::vector<cplx> prefix(K, cplx{});      // s_l(t_n)
    std::vector<cplx> prev(K), cur(K);
    // M_kl = sum_n w_n c_k(t_n) s_l(t_n)
    std::vector<cplx> weights(K * K, cplx{});
    for (std::size_t k = 0; k < K; ++k) prev[k] = coefficient(k, 0.0);

    for (int n = 0; n <= nodes; ++n) {
        const double t = n * h;
        for (std::size_t k = 0; k < K; ++k) cur[k] = n == 0 ? prev[k] : coefficient(k, t);
        if (n > 0) {
            for (std::size_t k = 0; k < K; ++k) prefix[k] += 0.5 * h * (prev[k] + cur[k]);
        }
        const double w = (n == 0 || n == nodes) ? 0.5 * h : h;
        for (std::size_t k = 0; k < K; ++k) {
            mean[k] += w * cur[k];
            const cplx wc = w * cur[k];
            for (std::size_t l = 0; l < K; ++l) weights[k * K + l] += wc * prefix[l];
        }
        prev = cur;
    }

    for (std::size_t k = 0; k < K; ++k) result.order0 += (mean[k] / period) * ops[k];

    const cplx scale = 1.0 / (2.0 * cplx(0.0, 1.0) * period);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t l = k + 1; l < K; ++l) {
            // M_kl [A_k, A_l] + M_lk [A_l, A_k] = (M_kl - M_lk) [A_k, A_l]
            const cplx c = weights[k * K + l] - weights[l * K + k];
            if (c == cplx{}) continue;
            const Eigen::MatrixXcd comm = ops[k] * ops[l] - ops[l] * ops[k];
            if (comm.cwiseAbs().maxCoeff() == 0.0) continue;
            result.order1 += (scale * c) * comm;
        }
    }
    return result;
}

MagnusResult magnus(const LatticeConfig& config, double period, int nodes) {
    if (config.sites > kMaxMagnusSites) {
        throw UnsupportedConfiguration("dense Magnus terms are limited to L <= " + std::to_string(kMaxMagnusSites));
    }
    return magnus(interaction_picture_terms(config), period, nodes);
}

Eigen::MatrixXcd magnus_order0(const LatticeConfig& config, double period, int nodes) {
    return magnus(config, period, nodes).order0;
}

Eigen::MatrixXcd magnus_order1(const LatticeConfig& config, double period, int nodes) {
    return magnus(config, period, nodes).order1;
}

Eigen::MatrixXcd floquet_unitary(const MagnusResult& result) {
    const Eigen::MatrixXcd hf = result.order0 + result.order1;
    const Eigen::MatrixXcd herm = 0.5 * (hf + hf.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of the Floquet Hamiltonian failed");
    const Eigen::VectorXd& lambda = es.eigenvalues();
    Eigen::VectorXcd phases(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) phases[i] = std::exp(cplx(0.0, -lambda[i] * result.period));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

SparseOperator analytic_hf0(const LatticeConfig& config) {
    config.validate();
    if (config.model != ModelKind::BondDriven || config.sites % 2 != 0) {
        throw UnsupportedConfiguration("analytic H_F^(0) needs a bond-driven chain with even L");
    }
    const auto mid = static_cast<std::size_t>(config.sites / 2 - 1);
    const auto* drive = std::get_if<CosineDrive>(&config.bonds[mid].variant());
    if (drive == nullptr || drive->frequency <= 0.0) {
        throw UnsupportedConfiguration("analytic H_F^(0) needs a cosine drive on bond L/2");
    }
    double j0 = 0.0;
    bool have_j0 = false;
    for (std::size_t b = 0; b < config.bonds.size(); ++b) {
        if (b == mid) continue;
        const auto* c = std::get_if<ConstantDrive>(&config.bonds[b].variant());
        if (c == nullptr) throw UnsupportedConfiguration("analytic H_F^(0) needs constant bonds away from L/2");
        if (have_j0 && std::abs(c->value - j0) > 1e-15 * std::max(1.0, std::abs(j0))) {
            throw UnsupportedConfiguration("analytic H_F^(0) needs a uniform constant coupling J0");
        }
        j0 = c->value;
        have_j0 = true;
    }
    const double ratio = 4.0 * config.g / drive->frequency;
    if (std::abs(ratio - std::round(ratio)) > 1e-12 || std::round(ratio) < 2.0) {
        throw UnsupportedConfiguration("analytic H_F^(0) needs 4g/Omega to be an integer >= 2");
    }
    const HilbertSpace space = config.space();
    SparseOperator h(space);
    for (int j = 1; j < config.sites; ++j) {
        if (j == config.sites / 2) continue;
        h = h + two_site_coupling(space, j, CouplingKind::FlipFlop).scaled(j0);
    }
    h.mark_hermitian();
    return h;
}

RwaResult rwa_local_effective(const LatticeConfig& config) {
    config.validate();
    if (config.model != ModelKind::LocalDriven || config.local_drives.size() != 1) {
        throw UnsupportedConfiguration("RWA effective Hamiltonian needs exactly one locally driven spin");
    }
    const auto& [k, drive] = *config.local_drives.begin();
    RwaResult r{SparseOperator(config.space()), 0.0, {}};

    const double x = drive.nu > 0.0 ? 2.0 * drive.epsilon / drive.nu : 0.0;
    r.renormalized_coupling = config.lambda0 * bessel_j(0, x);

    if (config.lambda0 != 0.0 && drive.nu / std::abs(config.lambda0) < kMinRwaRatio) {
        r.warnings.push_back("RWA validity: nu / lambda0 = " + std::to_string(drive.nu / std::abs(config.lambda0)) +
                             " < " + std::to_string(kMinRwaRatio));
    }
    const double m = drive.nu / config.g;
    const double mr = std::round(m);
    if (std::abs(m - mr) > 1e-9 || static_cast<long long>(mr) % 2 == 0 || mr < 3.0) {
        r.warnings.push_back("RWA validity: nu / g = " + std::to_string(m) + " is not an odd integer >= 3");
    }

    const HilbertSpace space = config.space();
    for (int j = 1; j < config.sites; ++j) {
        const bool touches = j == k - 1 || j == k;
        const double c = touches ? r.renormalized_coupling : config.lambda0;
        r.hamiltonian = r.hamiltonian + two_site_coupling(space, j, CouplingKind::FlipFlop).scaled(c);
    }
    r.hamiltonian.mark_hermitian();
    return r;
}

void write_matrix_csv(const Eigen::MatrixXcd& m, const std::filesystem::path& path) {
    CsvWriter w(path, {"row", "col", "re", "im", "abs"});
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const cplx z = m(r, c);
            w.cell(static_cast<long long>(r)).cell(static_cast<long long>(c)).cell(z.real()).cell(z.imag()).cell(std::abs(z));
            w.end_row();
        }
    }
}

void write_control_trace(const ControlFunction& cf, double t_end, int samples, const std::filesystem::path& path) {
    if (samples < 2) throw DomainError("control trace needs at least two samples");
    CsvWriter w(path, {"t[1/g]", "F", "J0(F)"});
    for (int i = 0; i < samples; ++i) {
        const double t = t_end * i / (samples - 1);
        const double f = cf.value(t);
        w.cell(t).cell(f).cell(bessel_j(0, f));
        w.end_row();
    }
}

}  // namespace fswitch
