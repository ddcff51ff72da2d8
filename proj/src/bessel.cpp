#include "fswitch/bessel.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fswitch/errors.hpp"

namespace fswitch {

namespace {

constexpr double kSeriesLimit = 8.0;
constexpr double kTermRatioStop = 1e-16;

double series(int m, double x) {
    const double half = 0.5 * x;
    // Leading term (x/2)^m / m!
    double term = 1.0;
    for (int i = 1; i <= m; ++i) term *= half / i;
    double sum = term;
    const double q = -half * half;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + m));
        sum += term;
        if (std::abs(term) <= kTermRatioStop * std::abs(sum)) break;
    }
    return sum;
}

// Miller's algorithm: recur J_{n-1} = (2n/x) J_n - J_{n+1} downward from a
// start order well above max(m, x), then normalize with
// J_0 + 2 sum_k J_{2k} = 1.
double miller(int m, double x) {
    const double ax = std::abs(x);
    const int start = 2 * ((std::max(m, static_cast<int>(ax)) + 30 + static_cast<int>(std::sqrt(40.0 * std::max(m, static_cast<int>(ax))))) / 2);
    double next = 0.0;  // J_{n+1}
    double cur = 1e-300;  // J_n
    double result = 0.0;
    double norm = 0.0;
    for (int n = start; n > 0; --n) {
        const double prev = (2.0 * n / ax) * cur - next;
        next = cur;
        cur = prev;  // now J_{n-1}
        if (std::abs(cur) > 1e250) {
            cur *= 1e-250;
            next *= 1e-250;
            result *= 1e-250;
            norm *= 1e-250;
        }
        if (n - 1 == m) result = cur;
        if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * cur;
    }
    norm += cur;  // J_0 term
    double value = result / norm;
    if (x < 0.0 && (m % 2 == 1)) value = -value;
    return value;
}

}  // namespace

double bessel_j(int m, double x) {
    if (m < 0) throw DomainError("bessel_j: negative order " + std::to_string(m));
    if (!std::isfinite(x) || std::abs(x) > kBesselDomain) {
        throw DomainError("bessel_j: argument " + std::to_string(x) + " outside |x| <= 30");
    }
    if (x == 0.0) return m == 0 ? 1.0 : 0.0;
    if (std::abs(x) <= kSeriesLimit) return series(m, x);
    return miller(m, x);
}

}  // namespace fswitch
