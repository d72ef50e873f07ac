#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsp/distributions.hpp"
#include "lsp/special.hpp"

namespace lsp {

/// Coordinate beyond which an orbit counts as escaped to infinity.
inline constexpr double kOverflowGuard = 1e300;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

enum class Chart { XY, SY, YZ };

/// A point of the variational-recursion phase space in one of three charts:
/// raw successor pairs (x,y) = (x_k, x_{k+1}), standard (s,y) with s = f(x),
/// or shifted (y,z) with z = y - x measuring monotonicity.
struct PhasePoint {
    Chart chart = Chart::XY;
    double a = 0.0;
    double b = 0.0;
};

// ---- chart conversions --------------------------------------------------

inline PhasePoint sy_from_xy(const TailDistribution& d, const PhasePoint& p)
{
    if (p.chart != Chart::XY) throw std::invalid_argument("sy_from_xy: expected XY");
    return {Chart::SY, d.tail(p.a), p.b};
}

inline PhasePoint xy_from_sy(const TailDistribution& d, const PhasePoint& p)
{
    if (p.chart != Chart::SY) throw std::invalid_argument("xy_from_sy: expected SY");
    return {Chart::XY, d.quantile(p.a), p.b};
}

inline PhasePoint yz_from_xy(const PhasePoint& p)
{
    if (p.chart != Chart::XY) throw std::invalid_argument("yz_from_xy: expected XY");
    return {Chart::YZ, p.b, p.b - p.a};
}

inline PhasePoint xy_from_yz(const PhasePoint& p)
{
    if (p.chart != Chart::YZ) throw std::invalid_argument("xy_from_yz: expected YZ");
    return {Chart::XY, p.a - p.b, p.a};
}

// ---- one step of the variational recursion ------------------------------

/// (x,y) -> (y, -f(x)/f'(y)); throws on f'(y) = 0.
inline std::pair<double, double> step_xy(const TailDistribution& d, double x,
                                         double y)
{
    double fp = d.tail_derivative(y);
    if (fp == 0.0)
        throw std::runtime_error("step_xy: singular step, f'(y) = 0");
    return {y, -d.tail(x) / fp};
}

/// Standard-coordinates map for the exponential instance:
/// (s,y) -> (e^{-y}, s e^{y}); preserves Lebesgue area.
inline std::pair<double, double> step_standard_exp(double s, double y)
{
    return {std::exp(-y), s * std::exp(y)};
}

/// (y,z) chart of the exponential map: (y,z) -> (e^z, e^z - y).
inline std::pair<double, double> step_yz_exp(double y, double z)
{
    double Y = std::exp(z);
    return {Y, Y - y};
}

/// Inverse of step_yz_exp: (Y,Z) -> (Y-Z, ln Y); requires Y > 0.
inline std::pair<double, double> inv_yz_exp(double Y, double Z)
{
    if (!(Y > 0.0)) throw std::domain_error("inv_yz_exp: Y must be positive");
    return {Y - Z, std::log(Y)};
}

/// Differential of step_yz_exp.
inline Mat2 jacobian_yz_exp(double /*y*/, double z)
{
    double ez = std::exp(z);
    return {{{0.0, ez}, {-1.0, ez}}};
}

/// One-sided Gaussian map in its (x, y) chart, y_{n+1} = x_{n+1}^2 - x_n^2:
/// (x,y) -> (e^y / (2x), X^2 - x^2).
inline std::pair<double, double> step_gauss1(double x, double y)
{
    if (!(x > 0.0)) throw std::domain_error("step_gauss1: x must be positive");
    double X = std::exp(y) / (2.0 * x);
    return {X, X * X - x * x};
}

/// Inverse of step_gauss1: (X,Y) -> (sqrt(X^2 - Y), ln(2 x X)).
inline std::pair<double, double> inv_gauss1(double X, double Y)
{
    double x2 = X * X - Y;
    if (!(x2 > 0.0)) throw std::domain_error("inv_gauss1: X^2 - Y must be positive");
    double x = std::sqrt(x2);
    return {x, std::log(2.0 * x * X)};
}

// ---- orbits --------------------------------------------------------------

enum class OrbitStop { Horizon, Break, Escape, Singular, DomainExit };

/// Recursion orbit from (x_0 = 0, x_1). `xs` holds x_0..x_n. The prefix
/// length is the largest k with x_0 < x_1 < ... < x_k.
struct Orbit {
    std::vector<double> xs;
    std::size_t monotone_prefix_length = 0;
    bool escaped = false;
    OrbitStop stop = OrbitStop::Horizon;
    std::optional<std::size_t> break_step;
};

namespace detail {

/// Monotone-forever certificate for a phase point of each instance. For the
/// exponential and Gaussian cases this is z >= ln-curve + 1, which lies
/// above the separatrix by the papers' certified C0 bounds; for Pareto the
/// invariant ray r = alpha^{1/(alpha-1)} is exact.
inline bool escaped_state(const TailDistribution& d, double x_prev, double x)
{
    if (x > kOverflowGuard) return true;
    switch (d.kind()) {
        case Kind::Exponential:
            return x >= 4.0 && (x - x_prev) >= std::log(x) + 1.0;
        case Kind::GaussianOneSided:
            return x >= 1.0 && (x * x - x_prev * x_prev) >= std::log(2.0 * x * x) + 1.0;
        case Kind::Pareto:
            return x_prev > 0.0 &&
                   x / x_prev >= std::pow(d.alpha(), 1.0 / (d.alpha() - 1.0));
        case Kind::SqrtSingular:
            return false;
    }
    return false;
}

}  // namespace detail

/// Iterates the recursion from (0, x1) until the horizon, a monotonicity
/// break, a singular step, or the escape certificate fires.
inline Orbit orbit(const TailDistribution& d, double x1, std::size_t n_max)
{
    if (!(x1 > 0.0)) throw std::domain_error("orbit: x1 must be positive");
    Orbit o;
    o.xs = {0.0, x1};
    o.monotone_prefix_length = 1;
    for (std::size_t k = 2; k <= n_max; ++k) {
        double xp = o.xs[k - 2], xc = o.xs[k - 1];
        double xn;
        try {
            xn = step_xy(d, xp, xc).second;
        } catch (const std::exception&) {
            o.stop = OrbitStop::Singular;
            o.break_step = k;
            return o;
        }
        if (d.kind() == Kind::SqrtSingular && xn > 1.0) {
            o.stop = OrbitStop::DomainExit;
            return o;
        }
        o.xs.push_back(xn);
        if (xn <= xc) {
            o.stop = OrbitStop::Break;
            o.break_step = k;
            return o;
        }
        o.monotone_prefix_length = k;
        if (detail::escaped_state(d, xc, xn)) {
            o.escaped = true;
            o.stop = OrbitStop::Escape;
            return o;
        }
    }
    return o;
}

/// Max relative residual of f(x_{k-1}) + x_{k+1} f'(x_k) = 0 along an orbit.
inline double orbit_residual(const TailDistribution& d, const Orbit& o)
{
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < o.xs.size(); ++k) {
        double lhs = d.tail(o.xs[k - 1]) + o.xs[k + 1] * d.tail_derivative(o.xs[k]);
        worst = std::max(worst, std::abs(lhs) / d.tail(o.xs[k - 1]));
    }
    return worst;
}

// ---- fixed points --------------------------------------------------------

struct FixedPointReport {
    std::optional<PhasePoint> xy_point;
    std::optional<PhasePoint> sy_point;
    std::optional<PhasePoint> yz_point;
    std::optional<std::array<std::complex<double>, 2>> eigenvalues;
    std::optional<double> invariant_ray;  // Pareto: r* = alpha^{1/(alpha-1)}
};

namespace detail {
inline std::array<std::complex<double>, 2> eigs_2x2(const Mat2& m)
{
    std::complex<double> tr = m[0][0] + m[1][1];
    std::complex<double> det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    std::complex<double> disc = std::sqrt(tr * tr - 4.0 * det);
    return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}
}  // namespace detail

/// Stationary point(s) of the recursion. The exponential case reports the
/// standard-coordinates point (e^{-1}, 1) with the eigenvalues of its SY
/// Jacobian and asserts ellipticity; Pareto has no stationary point, only
/// the invariant ray.
inline FixedPointReport fixed_points(const TailDistribution& d)
{
    FixedPointReport r;
    switch (d.kind()) {
        case Kind::Exponential: {
            double e = std::exp(1.0);
            r.xy_point = PhasePoint{Chart::XY, 1.0, 1.0};
            r.sy_point = PhasePoint{Chart::SY, 1.0 / e, 1.0};
            r.yz_point = PhasePoint{Chart::YZ, 1.0, 0.0};
            // SY Jacobian at the stationary point: [[0, -1/e], [e, 1]]
            Mat2 j = {{{0.0, -1.0 / e}, {e, 1.0}}};
            r.eigenvalues = detail::eigs_2x2(j);
            break;
        }
        case Kind::Pareto:
            r.invariant_ray = std::pow(d.alpha(), 1.0 / (d.alpha() - 1.0));
            return r;
        case Kind::GaussianOneSided: {
            double c = 1.0 / std::sqrt(2.0);
            r.xy_point = PhasePoint{Chart::XY, c, c};
            break;
        }
        case Kind::SqrtSingular: {
            double c = 4.0 / 9.0;
            r.xy_point = PhasePoint{Chart::XY, c, c};
            break;
        }
    }
    if (r.xy_point && !r.eigenvalues) {
        double c = r.xy_point->a;
        double fp = d.tail_derivative(c);
        Mat2 j = {{{0.0, 1.0},
                   {-1.0, d.tail(c) * d.tail_second_derivative(c) / (fp * fp)}}};
        r.eigenvalues = detail::eigs_2x2(j);
    }
    if (r.eigenvalues) {
        for (const auto& lam : *r.eigenvalues) {
            if (std::abs(std::abs(lam) - 1.0) > 1e-9 || lam.imag() == 0.0)
                throw std::logic_error("fixed_points: stationary point not elliptic");
        }
    }
    return r;
}

// ---- Pareto ratio dynamics ------------------------------------------------

struct RatioOrbit {
    std::vector<double> ratios;
    bool overflowed = false;
};

/// r_{k+1} = r_k^alpha / alpha with r_1 = x_1 (the section-4 bookkeeping
/// x_0 = 1 applies here and only here).
inline RatioOrbit pareto_ratio_orbit(double alpha, double r1, std::size_t n)
{
    if (!(alpha > 1.0) || !(r1 > 0.0))
        throw std::domain_error("pareto_ratio_orbit: need alpha > 1, r1 > 0");
    RatioOrbit out;
    out.ratios.push_back(r1);
    for (std::size_t k = 1; k < n; ++k) {
        double r = out.ratios.back();
        double next = std::pow(r, alpha) / alpha;
        if (next > kOverflowGuard) {
            out.overflowed = true;
            break;
        }
        out.ratios.push_back(next);
    }
    return out;
}

struct ParetoOptimum {
    double x1;      // alpha^{1/(alpha-1)}
    double cost;    // alpha^{alpha/(alpha-1)} / (alpha-1)
    double growth;  // optimal plan ratio: x_k = alpha^{k/(alpha-1)}
};

inline ParetoOptimum pareto_optimum(double alpha)
{
    if (!(alpha > 1.0)) throw std::domain_error("pareto_optimum: alpha must exceed 1");
    double g = std::pow(alpha, 1.0 / (alpha - 1.0));
    return {g, std::pow(alpha, alpha / (alpha - 1.0)) / (alpha - 1.0), g};
}

/// Cost of the Pareto recursion orbit started at x_1 = x (monotone side):
/// E(x) = x * alpha/(alpha-1).
inline double pareto_recursion_cost(double alpha, double x1)
{
    return x1 * alpha / (alpha - 1.0);
}

// ---- Beck two-sided Gaussian map ------------------------------------------

/// Forward Beck map on (x_n, y_n) with y_n = x_n - x_{n-1}; the actual
/// turning points are (-1)^n x_n.
inline std::pair<double, double> beck_forward(double x, double y)
{
    double num = lsp::erfc(x / std::sqrt(2.0)) + lsp::erfc((x - y) / std::sqrt(2.0));
    double xn = num / (2.0 * BeckNormal::pdf(x)) - x;
    return {xn, xn - x};
}

/// Inverse Beck map; the erfcinv argument leaving (0,2) signals departure
/// from the manifold's validity region and throws.
inline std::pair<double, double> beck_inverse(double x, double y)
{
    double xp = x - y;
    double arg = 2.0 * BeckNormal::pdf(xp) * (x + xp) - lsp::erfc(xp / std::sqrt(2.0));
    double yp = xp - std::sqrt(2.0) * lsp::erfcinv(arg);
    return {xp, yp};
}

/// Residual of the defining relation (x_n + x_{n+1}) phi(x_n) = G(x_n) + G(x_{n-1}).
inline double beck_defining_residual(double x_prev, double x, double x_next)
{
    return (x + x_next) * BeckNormal::pdf(x) - BeckNormal::tail(x) -
           BeckNormal::tail(x_prev);
}

}  // namespace lsp
