#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "fswitch/bessel.hpp"
#include "fswitch/drive.hpp"
#include "fswitch/errors.hpp"

using namespace fswitch;

TEST_SUITE("bessel") {

TEST_CASE("values at the origin") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    for (int m = 1; m <= 6; ++m) CHECK(bessel_j(m, 0.0) == 0.0);
}

TEST_CASE("reference values") {
    CHECK(std::abs(bessel_j(0, 2.0) - 0.2238907791412357) < 1e-12);
    CHECK(std::abs(bessel_j(0, kBesselJ0FirstRoot)) < 2e-4);
}

TEST_CASE("agrees with the standard library") {
    for (int m = 0; m <= 8; ++m) {
        for (double x = 0.0; x <= 30.0; x += 0.173) {
            INFO("m = " << m << ", x = " << x);
            CHECK(std::abs(bessel_j(m, x) - std::cyl_bessel_j(static_cast<double>(m), x)) < 1e-12);
        }
    }
}

TEST_CASE("odd and even symmetry in x") {
    for (int m = 0; m <= 5; ++m) {
        const double sign = m % 2 == 0 ? 1.0 : -1.0;
        CHECK(bessel_j(m, -1.7) == doctest::Approx(sign * bessel_j(m, 1.7)).epsilon(1e-14));
    }
}

TEST_CASE("three-term recurrence") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(1e-3, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double x = u(rng);
        for (int m = 1; m <= 5; ++m) {
            const double lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
            const double rhs = 2.0 * m / x * bessel_j(m, x);
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    }
}

TEST_CASE("Jacobi-Anger partial sums") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> zd(0.0, 3.0), th(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 100; ++trial) {
        const double z = zd(rng), theta = th(rng);
        std::complex<double> sum = bessel_j(0, z);
        for (int m = 1; m <= 20; ++m) {
            const double jm = bessel_j(m, z);
            const double sign = m % 2 == 0 ? 1.0 : -1.0;  // J_{-m} = (-1)^m J_m
            sum += jm * std::polar(1.0, m * theta) + sign * jm * std::polar(1.0, -m * theta);
        }
        CHECK(std::abs(sum - std::polar(1.0, z * std::sin(theta))) < 1e-10);
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(bessel_j(-1, 1.0), DomainError);
    CHECK_THROWS_AS(bessel_j(0, 31.0), DomainError);
    CHECK_THROWS_AS(bessel_j(0, std::nan("")), DomainError);
}

}  // TEST_SUITE

TEST_SUITE("drive") {

TEST_CASE("schedule values") {
    const DriveSchedule c = DriveSchedule::cosine(0.1, 4.0);
    CHECK(drive_value(c, 0.0) == doctest::Approx(0.1));
    CHECK(std::abs(drive_value(c, std::numbers::pi / 8.0)) < 1e-15);
    CHECK(drive_value(DriveSchedule::constant(0.3), 17.0) == 0.3);

    const DriveSchedule b = DriveSchedule::bessel_controlled(1.0, ControlFunction{2.0, 2.84787695, 2.0});
    CHECK(std::abs(drive_value(b, 0.0) - 0.2238907791412357) < 1e-12);
    CHECK(b.bound() == 1.0);
    CHECK(c.bound() == doctest::Approx(0.1));
}

TEST_CASE("cosine schedules are periodic") {
    const double omega = 2.7;
    const DriveSchedule c = DriveSchedule::cosine(0.4, omega, 0.3);
    for (double t = 0.0; t < 20.0; t += 0.37) {
        CHECK(std::abs(c.value_at(t) - c.value_at(t + 2.0 * std::numbers::pi / omega)) < 1e-12);
    }
}

TEST_CASE("control function endpoints") {
    const ControlFunction cf{2.0, 2.84787695, 2.0};
    CHECK(control_value(cf, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(std::abs(control_value(cf, std::numbers::pi / cf.omega) - 2.84787695) < 1e-14);
    CHECK(cf.period() == doctest::Approx(std::numbers::pi));
}

TEST_CASE("control function averages to zero over pi/g") {
    for (double omega : {2.0, 4.0}) {
        const ControlFunction cf{2.0, 2.84787695, omega};
        CHECK(std::abs(control_average(cf, 1 << 14)) < 1e-7);
    }
    // an independent Simpson quadrature with the library Bessel function
    const ControlFunction cf{2.0, 2.84787695, 2.0};
    const int n = 1 << 14;
    const double h = std::numbers::pi / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        s += w * std::cyl_bessel_j(0.0, cf.value(i * h));
    }
    const double simpson = s * h / 3.0 / std::numbers::pi;
    CHECK(std::abs(simpson - control_average(cf, n)) < 1e-12);
    CHECK_THROWS_AS(control_average(cf, 16), DomainError);
}

TEST_CASE("time functions") {
    TimeFunction f{DriveSchedule::constant(-0.5), 4.0, {SineTerm{0.3, 3.0}}};
    const double t = 0.71;
    const std::complex<double> expected = -0.5 * std::polar(1.0, 4.0 * t + 0.3 * std::sin(3.0 * t));
    CHECK(std::abs(f.value_at(t) - expected) < 1e-15);
    CHECK_FALSE(f.is_real());
    CHECK(TimeFunction{}.is_real());
}

}  // TEST_SUITE
