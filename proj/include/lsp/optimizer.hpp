#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsp/classification.hpp"
#include "lsp/plan_cost.hpp"
#include "lsp/recursion.hpp"
#include "lsp/separatrix.hpp"

namespace lsp {

struct BoundaryPair {
    double x_minus = 0.0;  // left edge of the chaotic window
    double x_plus = 0.0;   // right edge
    double width = 0.0;    // certified bracket width
    // monotone-side bracket endpoints, where candidate orbits are evaluated
    double x_minus_mono = 0.0;
    double x_plus_mono = 0.0;
};

namespace detail {

template <typename Classify>
double bisect_boundary(Classify&& mono, double lo, double hi, bool lo_mono,
                       double tol)
{
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mono(mid) == lo_mono) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Locates the two intersections of the separatrix with the curve of initial
/// conditions by bisection on the monotone/chaotic indicator. The bracket
/// ends must classify monotone with a chaotic witness between them (scanned
/// at step 1e-2). Pareto is the degenerate single-boundary case: the exact
/// invariant ray, cross-checked by bisection. When a curve is supplied, the
/// candidates are cross-validated against its backward extension's diagonal
/// crossings to 1e-4.
inline BoundaryPair boundary_candidates(const TailDistribution& d, double lo,
                                        double hi, double tol = 1e-9,
                                        const SeparatrixCurve* cross_check = nullptr,
                                        std::size_t horizon = 500)
{
    if (!(lo > 0.0 && hi > lo))
        throw std::invalid_argument("boundary_candidates: bad bracket");

    auto mono = [&](double t) {
        return classify(d, t, horizon).region == Region::Monotone;
    };

    if (d.kind() == Kind::Pareto) {
        double ray = std::pow(d.alpha(), 1.0 / (d.alpha() - 1.0));
        double blo = std::max(lo, 1.0 + 1e-9);
        if (!(blo < ray && ray < hi))
            throw std::invalid_argument(
                "boundary_candidates: bracket must straddle the invariant ray");
        double b = detail::bisect_boundary(mono, blo, hi, false, tol);
        if (std::abs(b - ray) > std::max(tol * 4.0, 1e-9) * std::max(1.0, ray))
            throw std::logic_error(
                "boundary_candidates: bisection disagrees with the invariant ray");
        return {ray, ray, tol, ray - tol, ray + tol};
    }

    if (!mono(lo) || !mono(hi))
        throw std::invalid_argument(
            "boundary_candidates: bracket ends must be monotone");
    std::optional<double> witness;
    for (double t = lo; t <= hi; t += 1e-2) {
        if (!mono(t)) {
            witness = t;
            break;
        }
    }
    if (!witness)
        throw std::runtime_error(
            "boundary_candidates: no chaotic window found in the bracket");

    BoundaryPair out;
    out.width = tol;
    {
        double a = lo, b = *witness;
        while (b - a > tol) {
            double mid = 0.5 * (a + b);
            if (mono(mid)) a = mid; else b = mid;
        }
        out.x_minus = 0.5 * (a + b);
        out.x_minus_mono = a;
    }
    {
        double a = *witness, b = hi;
        while (b - a > tol) {
            double mid = 0.5 * (a + b);
            if (mono(mid)) b = mid; else a = mid;
        }
        out.x_plus = 0.5 * (a + b);
        out.x_plus_mono = b;
    }

    if (cross_check) {
        auto ext = extend_backward(*cross_check, 6);
        std::vector<double> hits;
        if (d.kind() == Kind::Exponential) {
            hits = ext.diagonal_crossings();
        } else {
            // Gaussian initial data is the quadratic curve y = x^2.
            struct Quad {
                static double defect(const Vec2& p) { return p.y - p.x * p.x; }
            };
            for (std::size_t s = 1; s < ext.polylines.size(); ++s) {
                const auto& pl = ext.polylines[s];
                for (std::size_t i = 1; i < pl.size(); ++i) {
                    const Vec2 &a = pl[i - 1], &b = pl[i];
                    if (!std::isfinite(a.x) || !std::isfinite(b.x)) continue;
                    if (a.x <= 0.0 || b.x <= 0.0 || std::min(a.x, b.x) > 2.0) continue;
                    double fa = Quad::defect(a), fb = Quad::defect(b);
                    if (fa * fb < 0.0) {
                        double t = fa / (fa - fb);
                        hits.push_back(a.x + t * (b.x - a.x));
                    }
                }
            }
            std::sort(hits.begin(), hits.end());
        }
        auto near = [&](double v) {
            for (double h : hits)
                if (std::abs(h - v) <= 1e-4) return true;
            return false;
        };
        if (!near(out.x_minus) || !near(out.x_plus))
            throw std::logic_error(
                "boundary_candidates: separatrix cross-validation failed");
    }
    return out;
}

// ---- optimal plan -------------------------------------------------------------

struct Candidate {
    double x1 = 0.0;
    CostEstimate cost;
    char side = 'l';  // 'l' or 'r'
    RegionLabel label;
};

struct CostReport {
    std::string dist;
    std::vector<Candidate> candidates;
    std::size_t chosen = 0;
    double lower = 0.0;  // L
    double upper = 0.0;  // 4L + eps
    SearchPlan chosen_plan;
};

namespace detail {

inline CostEstimate candidate_cost(const TailDistribution& d, double x1)
{
    return expected_cost(SearchPlan::recursion_from(d, x1), d, 10000);
}

}  // namespace detail

/// Evaluates the cost at the two boundary candidates (on their monotone
/// sides) and reports the argmin. Pareto uses the closed forms of its
/// self-similar solution, cross-checked against the truncated sum.
inline CostReport optimal_plan(const TailDistribution& d,
                               const SeparatrixCurve* cross_check = nullptr)
{
    CostReport rep;
    rep.dist = d.selector();
    CostBounds bounds = cost_bounds(d);
    rep.lower = bounds.lower;
    rep.upper = bounds.upper;

    if (d.kind() == Kind::Pareto) {
        ParetoOptimum opt = pareto_optimum(d.alpha());
        BoundaryPair b = boundary_candidates(d, 1.0 + 1e-6, opt.x1 * 4.0, 1e-10);
        CostEstimate numeric = detail::candidate_cost(d, b.x_plus_mono);
        if (std::abs(numeric.value + numeric.truncation_bound / 2.0 - opt.cost) >
            numeric.truncation_bound + 1e-9)
            throw std::logic_error("optimal_plan: Pareto closed form disagrees "
                                   "with the truncated sum");
        Candidate c{opt.x1, CostEstimate{opt.cost, 0.0, 0}, 'r',
                    RegionLabel{Region::Boundary, std::nullopt, b.width}};
        rep.candidates.push_back(c);
        rep.chosen = 0;
        rep.chosen_plan = SearchPlan::recursion_from(d, opt.x1);
        return rep;
    }

    double lo = 0.01, hi = 1.5;
    if (d.kind() == Kind::GaussianOneSided) { lo = 0.05; hi = 2.0; }
    BoundaryPair b = boundary_candidates(d, lo, hi, 1e-9, cross_check);

    auto eval_side = [&](double mono_pt, double boundary, char side) {
        CostEstimate c;
        try {
            c = detail::candidate_cost(d, mono_pt);
        } catch (const std::exception&) {
            // candidate uncertainty too large: refine the bracket once
            BoundaryPair rb = boundary_candidates(d, lo, hi, 1e-12, nullptr);
            double pt = (side == 'l') ? rb.x_minus_mono : rb.x_plus_mono;
            c = detail::candidate_cost(d, pt);
            boundary = (side == 'l') ? rb.x_minus : rb.x_plus;
        }
        rep.candidates.push_back(
            Candidate{boundary, c, side,
                      RegionLabel{Region::Boundary, std::nullopt, b.width}});
    };
    eval_side(b.x_minus_mono, b.x_minus, 'l');
    eval_side(b.x_plus_mono, b.x_plus, 'r');

    rep.chosen = rep.candidates[0].cost.value <= rep.candidates[1].cost.value ? 0 : 1;
    double mono_pt = rep.chosen == 0 ? b.x_minus_mono : b.x_plus_mono;
    rep.chosen_plan = SearchPlan::recursion_from(d, mono_pt);

    double chosen_cost = rep.candidates[rep.chosen].cost.value;
    if (!(rep.lower <= chosen_cost + 1e-12 && chosen_cost <= rep.upper + 1e-12))
        throw std::logic_error("optimal_plan: chosen cost violates the L / 4L+eps bounds");
    return rep;
}

// ---- cost sweep ----------------------------------------------------------------

struct SweepRow {
    double x1 = 0.0;
    double cost = 0.0;  // E^N
    Region label = Region::Chaotic;
    std::optional<std::size_t> break_step;
    std::size_t terms = 0;
};

/// Cost of the recursion orbit from each x1 in the range. Monotone points
/// sum to convergence (figure's blow-up trigger); chaotic points sum a fixed
/// number of terms regardless of monotonicity (figure's iteration cap).
inline std::vector<SweepRow> cost_sweep(const TailDistribution& d, double x_lo,
                                        double x_hi, std::size_t n_points,
                                        std::size_t chaotic_terms = 30,
                                        std::size_t horizon = 500)
{
    if (!(x_hi > x_lo) || n_points < 2)
        throw std::invalid_argument("cost_sweep: bad range");
    std::vector<SweepRow> rows;
    rows.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        double x = x_lo + (x_hi - x_lo) * static_cast<double>(i) /
                              static_cast<double>(n_points - 1);
        SweepRow row;
        row.x1 = x;
        RegionLabel lab = classify(d, x, horizon);
        row.label = lab.region;
        row.break_step = lab.break_step;
        if (lab.region == Region::Monotone) {
            CostEstimate c = detail::candidate_cost(d, x);
            row.cost = c.value;
            row.terms = c.terms_used;
        } else {
            // fixed-iteration stopping rule: follow the recursion through
            // non-monotone points
            double xp = 0.0, xc = x, sum = 0.0;
            std::size_t k = 0;
            for (; k < chaotic_terms; ++k) {
                sum += xc * d.tail_or_zero(xp);
                double xn;
                try {
                    xn = step_xy(d, xp, xc).second;
                } catch (const std::exception&) {
                    ++k;
                    break;
                }
                xp = xc;
                xc = xn;
            }
            row.cost = sum;
            row.terms = k;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace lsp
