#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsp/distributions.hpp"
#include "lsp/interpolation.hpp"
#include "lsp/recursion.hpp"
#include "lsp/roots.hpp"

namespace lsp {

/// Solves x = t - ln t for t > 1 (Appendix-A lemma; t(x) = x + ln x + o(1)).
inline double t_solve(double x)
{
    if (!(x > 1.0)) throw std::domain_error("t_solve: need x > 1");
    auto g = [x](double t) { return t - std::log(t) - x; };
    auto dg = [](double t) { return 1.0 - 1.0 / t; };
    return newton_bisect(g, dg, x, x + std::log(x) + 2.0, 1e-14, 100, 1e-15).x;
}

/// Three-term logarithmic series of the exponential separatrix near infinity:
/// phi(y) = ln y + ln y / y + (1/2 + (3/4) ln y - (1/3) ln^2 y)/y^2, with
/// error O(ln^3 y / y^3). Tail regime only.
inline double asymptotic_phi_exp(double y)
{
    if (!(y >= 100.0))
        throw std::domain_error("asymptotic_phi_exp: series valid for y >= 100");
    double L = std::log(y);
    return L + L / y + (0.5 + 0.75 * L - L * L / 3.0) / (y * y);
}

/// Invariant curve z = phi(y) dividing the monotone and chaotic regions,
/// sampled on a geometric grid with a C1 interpolant in u = ln y. For the
/// exponential instance values beyond the grid blend into the logarithmic
/// series over one decade.
struct SeparatrixCurve {
    Kind kind = Kind::Exponential;
    std::vector<double> grid;    // y nodes, ascending (includes build margin)
    std::vector<double> values;  // phi(y_i)
    std::vector<double> slopes;  // d phi / d y at nodes
    double nominal_max = 0.0;    // requested Y_max; grid extends a bit past it
    double certified_lo = 0.0;   // start of the residual-certified range
    double residual_sup = 0.0;   // sup equation residual on [certified_lo, nominal_max]
    int iterations = 0;
    std::vector<double> sup_changes;  // per-sweep sup-norm change history
    CubicHermite interp;              // over u = ln y

    double grid_min() const { return grid.front(); }
    double grid_max() const { return grid.back(); }

    double phi(double y) const
    {
        if (y < grid.front() - 1e-12)
            throw std::domain_error("SeparatrixCurve::phi: below the sampled range");
        if (y <= grid.back()) return interp.value(std::log(y));
        if (kind != Kind::Exponential)
            throw std::domain_error("SeparatrixCurve::phi: beyond the sampled range");
        double series = asymptotic_phi_exp(y);
        double t = grid.back();
        if (y >= 10.0 * t) return series;
        double mismatch = values.back() - asymptotic_phi_exp(t);
        double w = 1.0 - (std::log(y) - std::log(t)) / std::log(10.0);
        return series + mismatch * w;
    }

    double slope_at(double y) const
    {
        if (y < grid.front() - 1e-12 || y > grid.back())
            throw std::domain_error("SeparatrixCurve::slope_at: outside the grid");
        return interp.derivative(std::log(y)) / y;
    }

    /// Functional-equation defect: exponential |phi(y - phi(y)) - ln y|;
    /// Gaussian measures invariance under its map instead.
    double equation_residual(double y) const
    {
        if (kind == Kind::Exponential) {
            return std::abs(phi(y - phi(y)) - std::log(y));
        }
        double X = std::exp(phi(y)) / (2.0 * y);
        return std::abs(phi(X) - (X * X - y * y));
    }
};

namespace detail {

struct SweepGrid {
    std::vector<double> ys;  // nodes ascending
    std::vector<double> us;  // ln of nodes
    std::size_t n_requested; // nodes with y <= requested max
};

inline SweepGrid log_grid(double lo, double hi_requested, double hi_margin,
                          std::size_t nodes)
{
    if (nodes < 16) throw std::invalid_argument("separatrix grid: too few nodes");
    SweepGrid g;
    double ulo = std::log(lo), uhi = std::log(hi_requested);
    double du = (uhi - ulo) / static_cast<double>(nodes - 1);
    double utop = std::log(hi_margin);
    std::size_t total = nodes + static_cast<std::size_t>(std::ceil((utop - uhi) / du));
    g.ys.reserve(total);
    g.us.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        double u = ulo + du * static_cast<double>(i);
        g.us.push_back(u);
        g.ys.push_back(std::exp(u));
    }
    g.n_requested = nodes;
    return g;
}

/// Interpolant-backed evaluation of the current iterate, valid on
/// [ys[0], ys[top-1]].
class CurveEval {
public:
    CurveEval(const std::vector<double>& us, const std::vector<double>& phi,
              std::size_t lo, std::size_t top, const std::vector<double>* slopes)
    {
        std::vector<double> u(us.begin() + lo, us.begin() + top);
        std::vector<double> v(phi.begin() + lo, phi.begin() + top);
        if (slopes) {
            std::vector<double> m;
            m.reserve(top - lo);
            for (std::size_t i = lo; i < top; ++i)
                m.push_back((*slopes)[i] * std::exp(us[i]));  // dg/du = y phi'
            interp_ = CubicHermite::with_slopes(std::move(u), std::move(v), std::move(m));
        } else {
            interp_ = CubicHermite::pchip(std::move(u), std::move(v));
        }
    }

    double value(double y) const { return interp_.value(std::log(y)); }
    double deriv(double y) const { return interp_.derivative(std::log(y)) / y; }
    double lo() const { return std::exp(interp_.x_min()); }
    double hi() const { return std::exp(interp_.x_max()); }

private:
    CubicHermite interp_;
};

/// One contraction sweep shared by both instances. Solves the node equation
/// against `cur` and writes updated values into `phi[lo..)`. Returns the new
/// number of valid nodes (nodes whose solve stayed inside cur's domain).
template <typename SolveNode>
std::size_t sweep(const std::vector<double>& ys, std::size_t lo, std::size_t top,
                  SolveNode&& solve_node, std::vector<double>& phi)
{
    for (std::size_t i = lo; i < top; ++i) {
        double w;
        if (!solve_node(ys[i], w)) return i;
        phi[i] = w;
    }
    return top;
}

}  // namespace detail

/// Exponential-case contraction map applied to one sampled curve:
/// Phi(phi)(y) = ln w where w - phi(w) = y, solved per node by safeguarded
/// Newton on the bracket [y, y + phi(y) + 2] (extended if the proof's margin
/// is short). Inputs are (grid, values); returns updated values where the
/// solve stays inside the input's span, and shrinks the valid node count.
inline std::vector<double> contraction_step_exp(const std::vector<double>& ys,
                                                const std::vector<double>& phi,
                                                std::size_t* valid = nullptr)
{
    if (ys.size() < 4 || ys.size() != phi.size())
        throw std::invalid_argument("contraction_step_exp: bad curve sampling");
    std::vector<double> us(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) us[i] = std::log(ys[i]);
    detail::CurveEval cur(us, phi, 0, ys.size(), nullptr);
    std::vector<double> out = phi;
    auto solve_node = [&](double y, double& val) {
        double hi = y + cur.value(y) + 2.0;
        auto g = [&](double w) { return w - cur.value(w) - y; };
        auto dg = [&](double w) { return 1.0 - cur.deriv(w); };
        while (hi <= cur.hi() && g(hi) < 0.0) hi += 2.0;
        if (hi > cur.hi()) {
            if (g(cur.hi()) < 0.0) return false;  // solution beyond the data
            hi = cur.hi();
        }
        double w = newton_bisect(g, dg, y, hi, 1e-13, 100, 1e-13).x;
        val = std::log(w);
        return true;
    };
    std::size_t top = detail::sweep(ys, 0, ys.size(), solve_node, out);
    if (valid) *valid = top;
    out.resize(top);
    return out;
}

namespace detail {

struct BuildCore {
    std::vector<double> ys, us, phi, slopes;
    std::size_t top = 0;
    int iterations = 0;
    std::vector<double> sup_changes;
};

/// Fixed-point iteration driver. `node_solver(cur, y, w_out)` solves the
/// instance's node equation, returning false when the solution leaves cur's
/// span; `to_value(y, w)` maps the solve result to the new curve value.
template <typename NodeSolver, typename ToValue>
void iterate_to_fixed_point(BuildCore& b, std::size_t measure_count, double tol,
                            int max_iter, NodeSolver&& node_solver, ToValue&& to_value,
                            const char* what)
{
    double prev_sup = std::numeric_limits<double>::infinity();
    int rising = 0;
    for (int it = 1; it <= max_iter; ++it) {
        CurveEval cur(b.us, b.phi, 0, b.top, nullptr);
        std::vector<double> next = b.phi;
        auto solve_node = [&](double y, double& val) {
            double w;
            if (!node_solver(cur, y, w)) return false;
            val = to_value(y, w);
            return true;
        };
        std::size_t new_top = sweep(b.ys, 0, b.top, solve_node, next);
        double sup = 0.0;
        std::size_t m = std::min(new_top, measure_count);
        for (std::size_t i = 0; i < m; ++i)
            sup = std::max(sup, std::abs(next[i] - b.phi[i]));
        b.phi = std::move(next);
        b.top = new_top;
        b.iterations = it;
        b.sup_changes.push_back(sup);
        if (new_top < measure_count)
            throw std::runtime_error(std::string(what) +
                                     ": build margin exhausted; enlarge Y_max margin");
        if (sup < tol) return;
        rising = (sup > prev_sup) ? rising + 1 : 0;
        if (rising >= 2)
            throw std::runtime_error(std::string(what) +
                                     ": sup-norm change increased twice in a row");
        prev_sup = sup;
    }
    throw std::runtime_error(std::string(what) + ": no convergence within " +
                             std::to_string(max_iter) + " sweeps");
}

}  // namespace detail

/// Constructs the separatrix by the contraction mapping. Exponential: fixed
/// point of phi -> ln w_phi on [y0 >= 4, Y_max]; one-sided Gaussian: fixed
/// point of h -> ln(2 z_h x) on [x0 >= 1, X_max]. After value convergence the
/// node slopes are bootstrapped from the differentiated equation and two
/// Hermite refinement sweeps polish the nodes.
inline SeparatrixCurve compute_separatrix(const TailDistribution& d, double y0,
                                          double y_max, double tol,
                                          std::size_t nodes = 2000)
{
    if (!(tol > 0.0) || !(y_max > y0))
        throw std::invalid_argument("compute_separatrix: bad range or tolerance");

    detail::BuildCore b;
    const bool expo = d.kind() == Kind::Exponential;
    if (expo) {
        if (!(y0 >= 4.0))
            throw std::domain_error("compute_separatrix: exponential needs y0 >= 4");
    } else if (d.kind() == Kind::GaussianOneSided) {
        if (!(y0 >= 1.0))
            throw std::domain_error("compute_separatrix: Gaussian needs x0 >= 1");
    } else {
        throw std::domain_error("compute_separatrix: no contraction construction "
                                "for this instance");
    }

    double q = expo ? std::min(2.0 / y0, 0.5) : 1.0 / 3.0;  // contraction factor
    int max_iter =
        static_cast<int>(std::ceil(std::log(tol) / std::log(q))) + 12;
    double shrink = expo ? (std::log(y_max) + 2.0)
                         : (std::log(2.0 * y_max * y_max) + 2.0) / (2.0 * y_max);
    double margin_hi = y_max + (max_iter + 6) * shrink;

    auto g = detail::log_grid(y0, y_max, margin_hi, nodes);
    b.ys = g.ys;
    b.us = g.us;
    b.top = b.ys.size();
    b.phi.resize(b.ys.size());
    for (std::size_t i = 0; i < b.ys.size(); ++i)
        b.phi[i] = expo ? std::log(b.ys[i]) : std::log(2.0 * b.ys[i] * b.ys[i]);

    auto solve_exp = [](const detail::CurveEval& cur, double y, double& w) {
        auto gfun = [&](double t) { return t - cur.value(t) - y; };
        auto dgfun = [&](double t) { return 1.0 - cur.deriv(t); };
        double hi = y + cur.value(y) + 2.0;
        while (hi <= cur.hi() && gfun(hi) < 0.0) hi += 2.0;
        if (hi > cur.hi()) {
            if (gfun(cur.hi()) < 0.0) return false;
            hi = cur.hi();
        }
        w = newton_bisect(gfun, dgfun, y, hi, 1e-13, 100, 1e-13).x;
        return true;
    };
    auto solve_gauss = [](const detail::CurveEval& cur, double x, double& z) {
        auto gfun = [&](double t) { return t * t - cur.value(t) - x * x; };
        auto dgfun = [&](double t) { return 2.0 * t - cur.deriv(t); };
        double hi = x + (cur.value(x) + 2.0) / std::max(2.0 * x - 0.5, 0.5);
        while (hi <= cur.hi() && gfun(hi) < 0.0) hi += 1.0;
        if (hi > cur.hi()) {
            if (gfun(cur.hi()) < 0.0) return false;
            hi = cur.hi();
        }
        z = newton_bisect(gfun, dgfun, x, hi, 1e-13, 100, 1e-13).x;
        return true;
    };
    auto value_exp = [](double, double w) { return std::log(w); };
    auto value_gauss = [](double x, double z) { return std::log(2.0 * z * x); };

    if (expo)
        detail::iterate_to_fixed_point(b, g.n_requested, tol, max_iter, solve_exp,
                                       value_exp, "compute_separatrix[exp]");
    else
        detail::iterate_to_fixed_point(b, g.n_requested, tol, max_iter, solve_gauss,
                                       value_gauss, "compute_separatrix[gauss1]");

    // Slope bootstrap from the differentiated node equation, then Hermite
    // refinement sweeps so off-node evaluation tracks the equation too.
    auto bootstrap_slopes = [&]() {
        std::size_t n = b.top;
        std::vector<double> m(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t a = (i == 0) ? 0 : i - 1;
            std::size_t c = (i + 1 >= n) ? n - 1 : i + 1;
            m[i] = (b.phi[c] - b.phi[a]) / (b.ys[c] - b.ys[a]);
        }
        auto slope_at = [&](double y) {
            double u = std::log(y);
            auto it = std::upper_bound(b.us.begin(), b.us.begin() + n, u);
            std::size_t j = (it == b.us.begin()) ? 1 : static_cast<std::size_t>(it - b.us.begin());
            j = std::clamp<std::size_t>(j, 1, n - 1);
            double t = (u - b.us[j - 1]) / (b.us[j] - b.us[j - 1]);
            return m[j - 1] * (1.0 - t) + m[j] * t;
        };
        detail::CurveEval cur(b.us, b.phi, 0, b.top, nullptr);
        for (int pass = 0; pass < 50; ++pass) {
            double change = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double y = b.ys[i], w;
                bool ok = expo ? solve_exp(cur, y, w) : solve_gauss(cur, y, w);
                if (!ok) { w = std::min(y + cur.value(y), cur.hi()); }
                double s = slope_at(std::min(w, b.ys[n - 1]));
                double next;
                if (expo)
                    next = 1.0 / (w * (1.0 - s));
                else {
                    double zp = 2.0 * y / (2.0 * w - s);
                    next = zp / w + 1.0 / y;
                }
                change = std::max(change, std::abs(next - m[i]));
                m[i] = next;
            }
            if (change < 1e-14) break;
        }
        b.slopes.assign(m.begin(), m.end());
    };

    bootstrap_slopes();
    for (int refine = 0; refine < 2; ++refine) {
        detail::CurveEval cur(b.us, b.phi, 0, b.top, &b.slopes);
        std::vector<double> next = b.phi;
        auto solve_node = [&](double y, double& val) {
            double w;
            bool ok = expo ? solve_exp(cur, y, w) : solve_gauss(cur, y, w);
            if (!ok) return false;
            val = expo ? value_exp(y, w) : value_gauss(y, w);
            return true;
        };
        b.top = detail::sweep(b.ys, 0, b.top, solve_node, next);
        b.phi = std::move(next);
        bootstrap_slopes();
    }

    SeparatrixCurve curve;
    curve.kind = d.kind();
    curve.grid.assign(b.ys.begin(), b.ys.begin() + b.top);
    curve.values.assign(b.phi.begin(), b.phi.begin() + b.top);
    curve.slopes.assign(b.slopes.begin(), b.slopes.begin() + b.top);
    curve.nominal_max = y_max;
    curve.certified_lo = y0;
    curve.iterations = b.iterations;
    curve.sup_changes = b.sup_changes;
    std::vector<double> u(curve.grid.size()), mg(curve.grid.size());
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        u[i] = std::log(curve.grid[i]);
        mg[i] = curve.slopes[i] * curve.grid[i];
    }
    curve.interp = CubicHermite::with_slopes(u, curve.values, mg);

    double sup = 0.0;
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        double y = curve.grid[i];
        if (y > y_max) break;
        double lo_arg = expo ? 4.0 : curve.grid.front();
        if (expo && y - curve.phi(y) < lo_arg) continue;
        sup = std::max(sup, curve.equation_residual(y));
        if (i + 1 < curve.grid.size()) {
            double ym = std::sqrt(y * curve.grid[i + 1]);
            if (!(expo && ym - curve.phi(ym) < lo_arg) && ym <= y_max)
                sup = std::max(sup, curve.equation_residual(ym));
        }
    }
    curve.residual_sup = sup;
    return curve;
}

/// The shipped exponential curve: built with y0 = 13 (the C1-certified
/// contraction), then the [4, 13) piece is filled by backward extension of
/// the graph — each pass solves the same node equation against the already
/// converged suffix, which is exactly the pointwise inverse map.
inline SeparatrixCurve separatrix_exponential(double y_max = 1e4, double tol = 1e-12,
                                              std::size_t nodes = 2000)
{
    SeparatrixCurve base =
        compute_separatrix(TailDistribution::exponential(), 13.0, y_max, tol, nodes);

    double du = std::log(base.grid[1]) - std::log(base.grid[0]);
    std::size_t n_pre =
        static_cast<std::size_t>(std::ceil((std::log(13.0) - std::log(4.0)) / du));
    std::vector<double> ys, phi, slopes;
    ys.reserve(n_pre + base.grid.size());
    for (std::size_t i = n_pre; i >= 1; --i)
        ys.push_back(std::exp(std::log(13.0) - du * static_cast<double>(i)));
    std::size_t filled_lo = ys.size();
    ys.insert(ys.end(), base.grid.begin(), base.grid.end());
    phi.assign(ys.size(), std::numeric_limits<double>::quiet_NaN());
    slopes.assign(ys.size(), 0.0);
    std::copy(base.values.begin(), base.values.end(), phi.begin() + filled_lo);
    std::copy(base.slopes.begin(), base.slopes.end(), slopes.begin() + filled_lo);

    std::vector<double> us(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) us[i] = std::log(ys[i]);

    while (filled_lo > 0) {
        detail::CurveEval cur(us, phi, filled_lo, ys.size(), &slopes);
        std::size_t before = filled_lo;
        for (std::size_t i = filled_lo; i-- > 0;) {
            double y = ys[i];
            auto gfun = [&](double w) { return w - cur.value(w) - y; };
            auto dgfun = [&](double w) { return 1.0 - cur.deriv(w); };
            if (gfun(cur.lo()) > 0.0) break;  // needs values not yet filled
            double hi = cur.lo() + cur.value(cur.lo()) + 4.0;
            while (hi <= cur.hi() && gfun(hi) < 0.0) hi += 2.0;
            double w = newton_bisect(gfun, dgfun, cur.lo(), std::min(hi, cur.hi()), 1e-13, 100, 1e-13).x;
            phi[i] = std::log(w);
            // slope of the extension from the differentiated equation
            double s = cur.deriv(w);
            slopes[i] = 1.0 / (w * (1.0 - s));
            filled_lo = i;
        }
        if (filled_lo == before)
            throw std::runtime_error("separatrix_exponential: downward fill stalled");
    }

    SeparatrixCurve out;
    out.kind = Kind::Exponential;
    out.grid = std::move(ys);
    out.values = std::move(phi);
    out.slopes = std::move(slopes);
    out.nominal_max = y_max;
    out.certified_lo = 13.0;
    out.iterations = base.iterations;
    out.sup_changes = base.sup_changes;
    std::vector<double> mg(out.grid.size());
    for (std::size_t i = 0; i < out.grid.size(); ++i)
        mg[i] = out.slopes[i] * out.grid[i];
    std::vector<double> uu(out.grid.size());
    for (std::size_t i = 0; i < out.grid.size(); ++i) uu[i] = std::log(out.grid[i]);
    out.interp = CubicHermite::with_slopes(uu, out.values, mg);

    double sup = 0.0;
    for (std::size_t i = 0; i < out.grid.size() && out.grid[i] <= y_max; ++i) {
        double y = out.grid[i];
        if (y < 13.0 || y - out.phi(y) < 4.0) continue;
        sup = std::max(sup, out.equation_residual(y));
        if (i + 1 < out.grid.size()) {
            double ym = std::sqrt(y * out.grid[i + 1]);
            if (ym <= y_max) sup = std::max(sup, out.equation_residual(ym));
        }
    }
    out.residual_sup = sup;
    return out;
}

// ---- backward extension ----------------------------------------------------

/// Parametric backward extension of a curve under the inverse map. Points
/// where the inverse becomes undefined (Y <= 0) truncate their polyline;
/// such entries are NaN and crossing scans skip the affected segments.
struct BackwardExtension {
    std::vector<std::vector<Vec2>> polylines;  // polylines[0] = curve samples

    /// Parameter-interpolated intersections with the diagonal z = y (the ray
    /// of initial conditions), deduplicated and sorted.
    std::vector<double> diagonal_crossings(double y_cap = 2.0) const
    {
        return crossings([](const Vec2& p) { return p.y - p.x; }, y_cap);
    }

    /// Intersections with the axis z = 0 (the point (y*, 0) bounding the
    /// R-stable segment).
    std::vector<double> axis_crossings(double y_cap = 4.0) const
    {
        return crossings([](const Vec2& p) { return p.y; }, y_cap);
    }

private:
    template <typename F>
    std::vector<double> crossings(F&& f, double y_cap) const
    {
        std::vector<double> hits;
        for (std::size_t s = 1; s < polylines.size(); ++s) {
            const auto& pl = polylines[s];
            for (std::size_t i = 1; i < pl.size(); ++i) {
                const Vec2 &a = pl[i - 1], &b = pl[i];
                if (!std::isfinite(a.x) || !std::isfinite(b.x)) continue;
                if (a.x <= 0.0 || b.x <= 0.0 || std::min(a.x, b.x) > y_cap) continue;
                double fa = f(a), fb = f(b);
                if (fa == 0.0) { hits.push_back(a.x); continue; }
                if (fa * fb < 0.0) {
                    double t = fa / (fa - fb);
                    hits.push_back(a.x + t * (b.x - a.x));
                }
            }
        }
        std::sort(hits.begin(), hits.end());
        std::vector<double> out;
        for (double h : hits)
            if (out.empty() || h - out.back() > 1e-4) out.push_back(h);
        return out;
    }
};

/// Applies the inverse map `steps` times to a dense sampling of the curve.
/// Exponential: (Y,Z) -> (Y-Z, ln Y); Gaussian: its Appendix-C inverse.
inline BackwardExtension extend_backward(const SeparatrixCurve& curve,
                                         std::size_t steps,
                                         std::size_t samples = 20000,
                                         double sample_hi = 60.0)
{
    BackwardExtension ext;
    const bool expo = curve.kind == Kind::Exponential;
    double lo = curve.grid_min();
    double hi = std::min(sample_hi, curve.grid_max());
    std::vector<Vec2> cur(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        double u = std::log(lo) +
                   (std::log(hi) - std::log(lo)) * static_cast<double>(i) /
                       static_cast<double>(samples - 1);
        double y = std::exp(u);
        cur[i] = {y, curve.phi(y)};
    }
    ext.polylines.push_back(cur);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t s = 0; s < steps; ++s) {
        std::vector<Vec2> next(cur.size(), Vec2{nan, nan});
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (!std::isfinite(cur[i].x) || cur[i].x <= 0.0) continue;
            if (expo) {
                auto [y, z] = inv_yz_exp(cur[i].x, cur[i].y);
                next[i] = {y, z};
            } else {
                if (cur[i].x * cur[i].x - cur[i].y <= 0.0) continue;
                auto [x, y] = inv_gauss1(cur[i].x, cur[i].y);
                next[i] = {x, y};
            }
        }
        ext.polylines.push_back(next);
        cur = std::move(next);
    }
    return ext;
}

// ---- restricted map growth ---------------------------------------------------

/// Iterates the map restricted to the separatrix, x_{n+1} = exp(phi(x_n)),
/// and reports how tightly x_{n+1} = x_n + ln x_n + O(ln x_n / x_n) holds
/// plus the increments of x_n - n(ln n + ln ln n).
struct GrowthReport {
    std::vector<double> xs;                   // x_1 = start
    double c_observed = 0.0;                  // max |x_{n+1}-x_n-ln x_n| x_n/ln x_n
    std::vector<double> residual_increments;  // r_{n+1}-r_n over n in [50, 200]
    double increment_slope = 0.0;             // least-squares trend of increments
    double max_abs_increment = 0.0;
};

inline GrowthReport restricted_map_growth(const SeparatrixCurve& curve,
                                          double x_start, std::size_t n)
{
    if (curve.kind != Kind::Exponential)
        throw std::domain_error("restricted_map_growth: exponential curves only");
    if (!(x_start >= curve.grid_min()))
        throw std::domain_error("restricted_map_growth: start below the curve range");
    GrowthReport rep;
    rep.xs.reserve(n + 1);
    rep.xs.push_back(x_start);
    double prev_r = 0.0;
    bool have_prev = false;
    for (std::size_t m = 1; m <= n; ++m) {
        double x = rep.xs.back();
        double xn = std::exp(curve.phi(x));
        double dev = std::abs(xn - x - std::log(x));
        rep.c_observed = std::max(rep.c_observed, dev * x / std::log(x));
        rep.xs.push_back(xn);
        std::size_t idx = m + 1;  // xn = x_{m+1}
        double fidx = static_cast<double>(idx);
        double r = xn - fidx * (std::log(fidx) + std::log(std::log(fidx)));
        if (have_prev && idx >= 50 && idx <= 200)
            rep.residual_increments.push_back(r - prev_r);
        prev_r = r;
        have_prev = true;
    }
    if (rep.residual_increments.size() >= 2) {
        double n_ = static_cast<double>(rep.residual_increments.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < rep.residual_increments.size(); ++i) {
            double xi = static_cast<double>(i), yi = rep.residual_increments[i];
            sx += xi; sy += yi; sxx += xi * xi; sxy += xi * yi;
            rep.max_abs_increment = std::max(rep.max_abs_increment, std::abs(yi));
        }
        rep.increment_slope = (n_ * sxy - sx * sy) / (n_ * sxx - sx * sx);
    }
    return rep;
}

}  // namespace lsp
