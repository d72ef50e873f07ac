#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lsp/roots.hpp"

namespace lsp {

namespace detail {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_over_sqrt_pi = 1.1283791670955125739;  // 2/sqrt(pi)

/// Taylor series of erf, adequate on |x| <= 2 (worst-case cancellation there
/// loses about one digit).
inline double erf_series(double x)
{
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 120; ++n) {
        term *= -x2 / n;
        double add = term / (2.0 * n + 1.0);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return two_over_sqrt_pi * sum;
}

/// Continued fraction for erfc, x >= 2: erfc(x) = e^{-x^2}/sqrt(pi) * K where
/// K = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), evaluated by modified
/// Lentz.
inline double erfc_cf(double x)
{
    const double tiny = 1e-300;
    double f = x, c = x, d = 0.0;
    for (int n = 1; n <= 300; ++n) {
        double a = 0.5 * n;
        d = x + a * d;
        if (d == 0.0) d = tiny;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-x * x) / std::sqrt(pi) / f;
}

}  // namespace detail

/// Complementary error function, |relative error| below 1e-13 over the real
/// line (series on [-2,2], continued fraction beyond, reflection for x < 0).
inline double erfc(double x)
{
    if (std::isnan(x)) return x;
    if (x < 0.0) return 2.0 - erfc(-x);
    if (x <= 2.0) return 1.0 - detail::erf_series(x);
    if (x > 27.0) return 0.0;  // below double underflow
    return detail::erfc_cf(x);
}

inline double erf(double x) { return 1.0 - erfc(x); }

/// Inverse of erfc on (0, 2): safeguarded Newton on erfc with the analytic
/// derivative -2/sqrt(pi) e^{-x^2}.
inline double erfcinv(double p)
{
    if (!(p > 0.0 && p < 2.0))
        throw std::domain_error("erfcinv: argument must lie in (0, 2)");
    if (p == 1.0) return 0.0;
    const double q = (p < 1.0) ? p : 2.0 - p;  // q in (0,1), answer >= 0
    double hi = 1.0;
    while (erfc(hi) > q) hi *= 2.0;
    auto f = [q](double x) { return erfc(x) - q; };
    auto df = [](double x) { return -detail::two_over_sqrt_pi * std::exp(-x * x); };
    double x = newton_bisect(f, df, 0.0, hi, 1e-15).x;
    return (p < 1.0) ? x : -x;
}

/// Standard normal density and tail used by the two-sided (Beck) map.
struct BeckNormal {
    static double pdf(double t)
    {
        return std::exp(-0.5 * t * t) / std::sqrt(2.0 * detail::pi);
    }
    static double tail(double x)  // G(x) = P(N > x) = erfc(x/sqrt(2))/2
    {
        return 0.5 * lsp::erfc(x / std::sqrt(2.0));
    }
};

}  // namespace lsp
