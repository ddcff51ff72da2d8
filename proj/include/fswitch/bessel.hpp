#pragma once

namespace fswitch {

inline constexpr double kBesselDomain = 30.0;

// First zero of J_0, as used for coherent destruction of tunneling.
inline constexpr double kBesselJ0FirstRoot = 2.4048;

// Bessel function of the first kind J_m(x) for integer m >= 0 and |x| <= 30.
// Ascending power series for |x| <= 8; normalized Miller backward recurrence
// beyond that, where the series loses digits to cancellation.
// Throws DomainError outside the supported range.
double bessel_j(int m, double x);

}  // namespace fswitch
