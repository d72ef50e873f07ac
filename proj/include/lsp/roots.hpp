#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace lsp {

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

/// Safeguarded Newton on a bracketed root: Newton steps are accepted only
/// while they stay inside the current bracket, otherwise the step falls back
/// to bisection. The bracket must satisfy f(lo) <= 0 <= f(hi) or the reverse.
/// Stops when |f| drops below f_tol (if positive) or the step falls below
/// step_tol relative to |x|.
template <typename F, typename DF>
RootResult newton_bisect(F&& f, DF&& df, double lo, double hi, double step_tol,
                         int max_iter = 100, double f_tol = 0.0)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if (std::signbit(flo) == std::signbit(fhi))
        throw std::invalid_argument("newton_bisect: root not bracketed");
    if (flo > 0.0) std::swap(lo, hi);  // keep f(lo) < 0 < f(hi)

    double x = 0.5 * (lo + hi);
    for (int it = 1; it <= max_iter; ++it) {
        double fx = f(x);
        if (fx == 0.0 || std::abs(fx) <= f_tol) return {x, fx, it};
        if (fx < 0.0) lo = x; else hi = x;
        double d = df(x);
        double step = (d != 0.0) ? fx / d : std::numeric_limits<double>::infinity();
        double cand = x - step;
        bool inside = std::isfinite(cand) &&
                      ((lo < hi) ? (cand > lo && cand < hi) : (cand > hi && cand < lo));
        double next = inside ? cand : 0.5 * (lo + hi);
        if (std::abs(next - x) <= step_tol * (1.0 + std::abs(x)))
            return {next, f(next), it};
        x = next;
    }
    throw std::runtime_error("newton_bisect: no convergence after " +
                             std::to_string(max_iter) + " iterations");
}

/// Plain bisection; decides by the sign of f(lo).
template <typename F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 200)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi))
        throw std::invalid_argument("bisect: root not bracketed");
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        if (std::signbit(f(mid)) == std::signbit(flo)) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace lsp
