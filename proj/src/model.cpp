#include "fswitch/model.hpp"

#include <bit>
#include <cmath>

#include "fswitch/errors.hpp"

namespace fswitch {

std::string to_string(ModelKind kind) {
    return kind == ModelKind::BondDriven ? "bond_driven" : "local_driven";
}

ModelKind parse_model_kind(const std::string& text) {
    if (text == "bond_driven" || text == "BondDriven") return ModelKind::BondDriven;
    if (text == "local_driven" || text == "LocalDriven") return ModelKind::LocalDriven;
    throw ConfigError("unknown model '" + text + "' (expected bond_driven or local_driven)");
}

QuantumState LatticeConfig::initial_state() const {
    const HilbertSpace hs = space();
    if (initial.empty()) return product_state(hs, std::vector<Spin>(static_cast<std::size_t>(sites), Spin::Up));
    return product_state(hs, initial);
}

void LatticeConfig::validate() const {
    if (sites < 2 || sites > kMaxSites) {
        throw ConfigError("L must lie in [2, " + std::to_string(kMaxSites) + "], got " + std::to_string(sites));
    }
    if (!std::isfinite(g)) throw ConfigError("transverse field g must be finite");
    if (!initial.empty() && initial.size() != static_cast<std::size_t>(sites)) {
        throw ConfigError("initial state has " + std::to_string(initial.size()) + " spins, expected " +
                          std::to_string(sites));
    }
    if (model == ModelKind::BondDriven) {
        if (bonds.size() != static_cast<std::size_t>(sites - 1)) {
            throw ConfigError("bond_driven model needs " + std::to_string(sites - 1) + " bond schedules, got " +
                              std::to_string(bonds.size()));
        }
        for (const DriveSchedule& s : bonds) {
            if (const auto* c = std::get_if<CosineDrive>(&s.variant()); c && c->frequency < 0.0) {
                throw ConfigError("drive frequencies must be nonnegative");
            }
            if (const auto* b = std::get_if<BesselControlledDrive>(&s.variant()); b && b->control.omega <= 0.0) {
                throw ConfigError("control-function frequency must be positive");
            }
        }
        if (!local_drives.empty()) throw ConfigError("local drives are only valid for the local_driven model");
    } else {
        if (!bonds.empty()) throw ConfigError("local_driven model takes a uniform lambda0, not bond schedules");
        for (const auto& [site, drive] : local_drives) {
            if (site < 1 || site > sites) throw ConfigError("local drive site " + std::to_string(site) + " out of range");
            if (drive.nu < 0.0) throw ConfigError("local drive frequency must be nonnegative");
            if (drive.epsilon != 0.0 && drive.nu == 0.0) {
                throw ConfigError("local drive with nonzero epsilon needs nu > 0");
            }
        }
    }
}

namespace configs {

LatticeConfig uniform_chain(int sites, double j0, double g) {
    LatticeConfig c;
    c.sites = sites;
    c.g = g;
    c.bonds.assign(static_cast<std::size_t>(sites - 1), DriveSchedule::constant(j0));
    c.initial.assign(static_cast<std::size_t>(sites), Spin::Up);
    return c;
}

namespace {
DriveSchedule modulated(double j0, double omega) {
    return omega == 0.0 ? DriveSchedule::constant(j0) : DriveSchedule::cosine(j0, omega);
}
}  // namespace

LatticeConfig edge_driven(int sites, double j0, double omega1, double omega2, double g) {
    if (sites < 3) throw ConfigError("edge-driven configuration needs L >= 3");
    LatticeConfig c = uniform_chain(sites, j0, g);
    c.bonds[0] = modulated(j0, omega1);
    c.bonds[1] = modulated(j0, omega2);
    return c;
}

LatticeConfig mid_bond_switch(int sites, double j0, double omega, double g) {
    if (sites < 2 || sites % 2 != 0) throw ConfigError("mid-bond switch needs an even L");
    LatticeConfig c = uniform_chain(sites, j0, g);
    c.bonds[static_cast<std::size_t>(sites / 2 - 1)] = DriveSchedule::cosine(j0, omega);
    c.initial.back() = Spin::Down;
    return c;
}

LatticeConfig double_drive(int sites, double j0, double omega1, double omega_mid, double g) {
    if (sites < 4 || sites % 2 != 0) throw ConfigError("double-drive configuration needs an even L >= 4");
    LatticeConfig c = uniform_chain(sites, j0, g);
    c.bonds[0] = DriveSchedule::cosine(j0, omega1);
    c.bonds[static_cast<std::size_t>(sites / 2 - 1)] = DriveSchedule::cosine(j0, omega_mid);
    return c;
}

LatticeConfig local_switch(int sites, int k, double lambda0, double epsilon, double nu, double g) {
    LatticeConfig c;
    c.sites = sites;
    c.g = g;
    c.model = ModelKind::LocalDriven;
    c.lambda0 = lambda0;
    c.local_drives[k] = LocalDrive{epsilon, nu};
    c.initial.assign(static_cast<std::size_t>(sites), Spin::Up);
    c.initial.back() = Spin::Down;
    return c;
}

}  // namespace configs

// ---------------------------------------------------------------------------

TermList::TermList(HilbertSpace space, SparseOperator static_part, std::vector<Term> terms)
    : space_(space), static_part_(std::move(static_part)), terms_(std::move(terms)) {}

SparseOperator TermList::hamiltonian_at(double t) const {
    SparseOperator h = static_part_;
    for (const Term& term : terms_) h = h + term.op.scaled(term.coefficient.value_at(t));
    return h;
}

bool TermList::time_independent() const {
    for (const Term& term : terms_) {
        if (!term.coefficient.envelope.is_constant()) return false;
        if (term.coefficient.carrier != 0.0) return false;
        for (const SineTerm& s : term.coefficient.sines) {
            if (s.amplitude != 0.0 && s.frequency != 0.0) return false;
        }
    }
    return true;
}

namespace {

// sum_j g_j sz_j with the constant part of the field.
SparseOperator uniform_field(const HilbertSpace& space, double g) {
    std::vector<SparseOperator::Triplet> t;
    t.reserve(space.dim());
    for (std::size_t b = 0; b < space.dim(); ++b) {
        const int down = std::popcount(b);
        t.push_back({b, b, g * (space.sites() - 2 * down)});
    }
    return SparseOperator(space, std::move(t), true);
}

}  // namespace

TermList assemble_hamiltonian(const LatticeConfig& config) {
    config.validate();
    const HilbertSpace space = config.space();
    SparseOperator static_part = uniform_field(space, config.g);
    std::vector<Term> terms;

    if (config.model == ModelKind::BondDriven) {
        for (int j = 1; j < config.sites; ++j) {
            terms.push_back({TimeFunction{config.bonds[static_cast<std::size_t>(j - 1)], 0.0, {}},
                             two_site_coupling(space, j, CouplingKind::XX)});
        }
    } else {
        for (int j = 1; j < config.sites; ++j) {
            static_part = static_part + two_site_coupling(space, j, CouplingKind::XX).scaled(config.lambda0);
        }
        static_part.mark_hermitian();
        for (const auto& [site, drive] : config.local_drives) {
            terms.push_back({TimeFunction{DriveSchedule::cosine(drive.epsilon, drive.nu), 0.0, {}},
                             site_operator(space, site, Axis::Z)});
        }
    }
    return TermList(space, std::move(static_part), std::move(terms));
}

namespace {

// Phase contributed by sigma^+ on `site`: 2 F_site(t) with F = (eps/nu) sin(nu t).
std::vector<SineTerm> site_sines(const LatticeConfig& config, int site, double sign) {
    std::vector<SineTerm> s;
    if (config.model != ModelKind::LocalDriven) return s;
    const auto it = config.local_drives.find(site);
    if (it == config.local_drives.end() || it->second.epsilon == 0.0) return s;
    s.push_back({sign * 2.0 * it->second.epsilon / it->second.nu, it->second.nu});
    return s;
}

std::vector<SineTerm> concat(std::vector<SineTerm> a, const std::vector<SineTerm>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TermList interaction_picture_terms(const LatticeConfig& config) {
    config.validate();
    const HilbertSpace space = config.space();
    const double carrier = 4.0 * config.g;
    std::vector<Term> terms;

    for (int j = 1; j < config.sites; ++j) {
        const DriveSchedule envelope = config.model == ModelKind::BondDriven
                                           ? config.bonds[static_cast<std::size_t>(j - 1)]
                                           : DriveSchedule::constant(config.lambda0);
        const SparseOperator up_j = site_operator(space, j, Axis::Plus);
        const SparseOperator dn_j = site_operator(space, j, Axis::Minus);
        const SparseOperator up_k = site_operator(space, j + 1, Axis::Plus);
        const SparseOperator dn_k = site_operator(space, j + 1, Axis::Minus);

        const auto plus_j = site_sines(config, j, +1.0);
        const auto minus_j = site_sines(config, j, -1.0);
        const auto plus_k = site_sines(config, j + 1, +1.0);
        const auto minus_k = site_sines(config, j + 1, -1.0);

        // s+_j s+_{j+1}: exp(+4igt) exp(2i(F_j + F_{j+1}))
        terms.push_back({TimeFunction{envelope, carrier, concat(plus_j, plus_k)},
                         two_site_coupling(space, j, CouplingKind::DoubleRaise)});
        // s+_j s-_{j+1}: exp(2i(F_j - F_{j+1}))
        terms.push_back({TimeFunction{envelope, 0.0, concat(plus_j, minus_k)}, up_j * dn_k});
        // s-_j s+_{j+1}: exp(-2i(F_j - F_{j+1}))
        terms.push_back({TimeFunction{envelope, 0.0, concat(minus_j, plus_k)}, dn_j * up_k});
        // s-_j s-_{j+1}: exp(-4igt) exp(-2i(F_j + F_{j+1}))
        terms.push_back({TimeFunction{envelope, -carrier, concat(minus_j, minus_k)},
                         two_site_coupling(space, j, CouplingKind::DoubleLower)});
    }
    return TermList(space, SparseOperator(space), std::move(terms));
}

CVector rotating_frame_phases(const LatticeConfig& config, double t) {
    const HilbertSpace space = config.space();
    std::vector<double> theta(static_cast<std::size_t>(config.sites), config.g * t);
    if (config.model == ModelKind::LocalDriven) {
        for (const auto& [site, drive] : config.local_drives) {
            if (drive.epsilon != 0.0) {
                theta[static_cast<std::size_t>(site - 1)] += drive.epsilon / drive.nu * std::sin(drive.nu * t);
            }
        }
    }
    CVector phases(space.dim());
    for (std::size_t b = 0; b < space.dim(); ++b) {
        double angle = 0.0;
        for (int j = 0; j < config.sites; ++j) {
            angle += ((b >> j) & 1U) ? theta[static_cast<std::size_t>(j)] : -theta[static_cast<std::size_t>(j)];
        }
        // exp(-i theta sz): sz = +1 on up (bit 0) gives exp(-i theta)
        phases[b] = cplx(std::cos(angle), std::sin(angle));
    }
    return phases;
}

}  // namespace fswitch
