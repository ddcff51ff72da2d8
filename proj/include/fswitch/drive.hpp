#pragma once

// Time-dependent scalar coefficients: the real drive schedules that multiply
// bond or field operators, and the closed-form complex phase factors that
// appear after moving to a rotating frame.

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace fswitch {

// Zero-average control of a Bessel-renormalized coupling:
//   F(t) = x1 cos(wt) + ((x1 + x2)/2) (1 - cos(wt)),
// so that F(0) = x1 and F(pi/w) = x2.
struct ControlFunction {
    static constexpr double kDefaultX1 = 2.0;
    static constexpr double kDefaultX2 = 2.84787695;

    double x1 = kDefaultX1;
    double x2 = kDefaultX2;
    double omega = 2.0;

    double value(double t) const;
    double period() const;
};

double control_value(const ControlFunction& cf, double t);

// (1/T) * integral_0^T J_0(F(t)) dt over the window T = pi/g (composite
// trapezoid, `nodes` subintervals). Requires nodes >= 1024.
double control_average(const ControlFunction& cf, int nodes, double g = 1.0);

struct ConstantDrive {
    double value = 0.0;
};

struct CosineDrive {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
};

// base * J_0(F(t, omega)).
struct BesselControlledDrive {
    double base = 0.0;
    ControlFunction control;
};

class DriveSchedule {
public:
    using Variant = std::variant<ConstantDrive, CosineDrive, BesselControlledDrive>;

    DriveSchedule() : v_(ConstantDrive{}) {}
    DriveSchedule(Variant v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

    static DriveSchedule constant(double value) { return {ConstantDrive{value}}; }
    static DriveSchedule cosine(double amplitude, double frequency, double phase = 0.0) {
        return {CosineDrive{amplitude, frequency, phase}};
    }
    static DriveSchedule bessel_controlled(double base, ControlFunction cf) {
        return {BesselControlledDrive{base, cf}};
    }

    double value_at(double t) const;
    // Upper bound on |value_at(t)| over all t.
    double bound() const;
    bool is_constant() const;
    std::string kind() const;

    const Variant& variant() const noexcept { return v_; }

private:
    Variant v_;
};

inline double drive_value(const DriveSchedule& s, double t) { return s.value_at(t); }

// amplitude(t) * exp(i (carrier * t + sum_k a_k sin(nu_k t)))
//
// The sine terms carry the phases picked up by spins whose field is
// modulated as eps cos(nu t): each such spin contributes a_k = +-2 eps/nu.
struct SineTerm {
    double amplitude = 0.0;
    double frequency = 0.0;
};

struct TimeFunction {
    DriveSchedule envelope = DriveSchedule::constant(1.0);
    double carrier = 0.0;
    std::vector<SineTerm> sines;

    std::complex<double> value_at(double t) const;
    double bound() const { return envelope.bound(); }
    bool is_real() const { return carrier == 0.0 && sines.empty(); }
};

}  // namespace fswitch
