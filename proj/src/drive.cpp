#include "fswitch/drive.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fswitch/bessel.hpp"
#include "fswitch/errors.hpp"

namespace fswitch {

double ControlFunction::value(double t) const {
    const double c = std::cos(omega * t);
    return x1 * c + 0.5 * (x1 + x2) * (1.0 - c);
}

double ControlFunction::period() const { return 2.0 * std::numbers::pi / omega; }

double control_value(const ControlFunction& cf, double t) { return cf.value(t); }

double control_average(const ControlFunction& cf, int nodes, double g) {
    if (nodes < 1024) throw DomainError("control_average needs at least 1024 nodes");
    const double window = std::numbers::pi / g;
    const double h = window / nodes;
    double sum = 0.5 * (bessel_j(0, cf.value(0.0)) + bessel_j(0, cf.value(window)));
    for (int n = 1; n < nodes; ++n) sum += bessel_j(0, cf.value(n * h));
    return sum * h / window;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

double DriveSchedule::value_at(double t) const {
    return std::visit(
        overloaded{
            [](const ConstantDrive& d) { return d.value; },
            [t](const CosineDrive& d) { return d.amplitude * std::cos(d.frequency * t + d.phase); },
            [t](const BesselControlledDrive& d) { return d.base * bessel_j(0, d.control.value(t)); },
        },
        v_);
}

double DriveSchedule::bound() const {
    return std::visit(overloaded{
                          [](const ConstantDrive& d) { return std::abs(d.value); },
                          [](const CosineDrive& d) { return std::abs(d.amplitude); },
                          [](const BesselControlledDrive& d) { return std::abs(d.base); },
                      },
                      v_);
}

bool DriveSchedule::is_constant() const {
    return std::visit(overloaded{
                          [](const ConstantDrive&) { return true; },
                          [](const CosineDrive& d) { return d.frequency == 0.0 || d.amplitude == 0.0; },
                          [](const BesselControlledDrive& d) { return d.base == 0.0; },
                      },
                      v_);
}

std::string DriveSchedule::kind() const {
    return std::visit(overloaded{
                          [](const ConstantDrive&) { return std::string("constant"); },
                          [](const CosineDrive&) { return std::string("cosine"); },
                          [](const BesselControlledDrive&) { return std::string("bessel"); },
                      },
                      v_);
}

std::complex<double> TimeFunction::value_at(double t) const {
    const double amp = envelope.value_at(t);
    if (is_real()) return amp;
    double phase = carrier * t;
    for (const SineTerm& s : sines) phase += s.amplitude * std::sin(s.frequency * t);
    return amp * std::complex<double>(std::cos(phase), std::sin(phase));
}

}  // namespace fswitch
