#pragma once

// Test-only oracles, independent of the library's evaluation paths.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

/// Adaptive Simpson quadrature.
inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double b, double fa, double fm, double fb, double whole,
                          double tol, int depth)
{
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12)
{
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// Improper integral over [a, inf) via the substitution x = a + t/(1-t).
inline double integrate_to_inf(const std::function<double(double)>& f, double a,
                               double tol = 1e-12)
{
    auto g = [&](double t) {
        double om = 1.0 - t;
        return f(a + t / om) / (om * om);
    };
    return integrate(g, 0.0, 1.0 - 1e-9, tol);
}

/// Maclaurin series for erf; independent of the library's implementation.
inline double erf_series(double x)
{
    double term = x, sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -x * x / n;
        sum += term / (2.0 * n + 1.0);
        if (std::abs(term) < 1e-20 * std::abs(sum)) break;
    }
    return 1.1283791670955125739 * sum;
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h)
{
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Plain bisection root solver.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-13)
{
    double flo = f(lo);
    if (flo == 0.0) return lo;
    if (flo * f(hi) > 0.0) throw std::runtime_error("oracle::bisect: not bracketed");
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) == 0.0) return mid;
        (f(mid) * flo > 0.0 ? lo : hi) = mid;
        if (lo == 0.5 * (lo + hi)) break;
    }
    return 0.5 * (lo + hi);
}

/// Least-squares slope of y against equally spaced indices.
inline double regression_slope(const std::vector<double>& ys)
{
    double n = static_cast<double>(ys.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        double x = static_cast<double>(i);
        sx += x; sy += ys[i]; sxx += x * x; sxy += x * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
