#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <thread>
#include <variant>
#include <vector>

#include "lsp/distributions.hpp"
#include "lsp/recursion.hpp"
#include "lsp/rng.hpp"

namespace lsp {

// ---- search plans ----------------------------------------------------------

struct NoExtension {};
struct DoublingExtension {
    double first = 1.0;  // x_k = first * 2^{k-1}
};
struct RecursionExtension {
    TailDistribution dist;  // continue by the variational recursion
};
using PlanExtension = std::variant<NoExtension, DoublingExtension, RecursionExtension>;

/// A search plan: finite strictly-increasing turning points x_1 < x_2 < ...
/// (x_0 = 0 implicit) plus an optional rule extending it indefinitely.
/// Construction does not validate, so pre-monotonization plans can be held;
/// cost evaluation rejects non-monotone prefixes.
struct SearchPlan {
    std::vector<double> points;
    PlanExtension extension = NoExtension{};

    bool strictly_monotone() const
    {
        double prev = 0.0;
        for (double p : points) {
            if (!(p > prev)) return false;
            prev = p;
        }
        return true;
    }

    static SearchPlan doubling(double first)
    {
        if (!(first > 0.0)) throw std::domain_error("doubling plan: first must be > 0");
        return {{}, DoublingExtension{first}};
    }

    static SearchPlan recursion_from(const TailDistribution& d, double x1)
    {
        if (!(x1 > 0.0)) throw std::domain_error("recursion plan: x1 must be > 0");
        return {{x1}, RecursionExtension{d}};
    }
};

/// Lazily materialized view of a plan's points (1-based index), applying the
/// extension rule past the stored prefix.
class PlanSequence {
public:
    explicit PlanSequence(const SearchPlan& plan) : plan_(plan), cache_(plan.points) {}

    /// x_k for k >= 1; throws if the plan cannot produce that many points.
    double at(std::size_t k)
    {
        if (k == 0) return 0.0;
        while (cache_.size() < k) extend_one();
        return cache_[k - 1];
    }

    /// Number of points produceable without extension, or SIZE_MAX.
    std::size_t hard_limit() const
    {
        return std::holds_alternative<NoExtension>(plan_.extension)
                   ? plan_.points.size()
                   : static_cast<std::size_t>(-1);
    }

private:
    void extend_one()
    {
        std::size_t k = cache_.size() + 1;  // index being generated
        if (std::holds_alternative<NoExtension>(plan_.extension))
            throw std::runtime_error("plan: point " + std::to_string(k) +
                                     " requested beyond an unextended plan");
        if (auto* dbl = std::get_if<DoublingExtension>(&plan_.extension)) {
            cache_.push_back(dbl->first * std::ldexp(1.0, static_cast<int>(k) - 1));
            return;
        }
        const auto& rec = std::get<RecursionExtension>(plan_.extension);
        double xp = (k >= 2) ? at_cached(k - 2) : 0.0;
        double xc = at_cached(k - 1);
        double xn = step_xy(rec.dist, xp, xc).second;
        if (!(xn > xc))
            throw std::runtime_error("plan: recursion extension lost monotonicity at k=" +
                                     std::to_string(k));
        cache_.push_back(xn);
    }

    double at_cached(std::size_t k) const { return k == 0 ? 0.0 : cache_[k - 1]; }

    const SearchPlan& plan_;
    std::vector<double> cache_;
};

// ---- expected cost ---------------------------------------------------------

struct CostEstimate {
    double value = 0.0;             // sum_{k=1}^{K} x_k f(x_{k-1})
    double truncation_bound = 0.0;  // 4 * integral_{x_{K-1}}^inf f
    std::size_t terms_used = 0;
};

/// Partial sum of the cost functional over at most K terms. Summation stops
/// early once f(x_{K-1}) < 1e-14 and the term is below 1e-13 relative, or at
/// the support end. The reported bound covers the remainder whenever the
/// extension rule keeps the tail decaying.
inline CostEstimate expected_cost(const SearchPlan& plan, const TailDistribution& d,
                                  std::size_t K)
{
    if (K < 1) throw std::invalid_argument("expected_cost: K must be >= 1");
    if (!plan.strictly_monotone())
        throw std::invalid_argument("expected_cost: plan is not strictly monotone");
    PlanSequence seq(plan);
    std::size_t limit = std::min<std::size_t>(K, seq.hard_limit());
    double sum = 0.0;
    double x_prev = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 1; k <= limit; ++k) {
        double f = d.tail_or_zero(x_prev);
        if (f == 0.0) break;
        double xk = seq.at(k);
        double term = xk * f;
        sum += term;
        ++used;
        x_prev = xk;
        if (f < 1e-14 && term < 1e-13 * (1.0 + std::abs(sum))) break;
    }
    std::size_t back = used >= 2 ? used - 1 : 0;
    double anchor = back == 0 ? 0.0 : seq.at(back);
    return {sum, 4.0 * d.tail_integral(std::min(anchor, d.support_upper())), used};
}

struct CostBounds {
    double lower = 0.0;  // L = E[H]
    double upper = 0.0;  // 4L + A
    SearchPlan witness;
};

/// Prop-basic2 bounds with the doubling witness, A = 1e-3; verifies the
/// witness actually meets the upper bound.
inline CostBounds cost_bounds(const TailDistribution& d)
{
    const double A = 1e-3;
    CostBounds b{d.mean(), 4.0 * d.mean() + A, SearchPlan::doubling(A)};
    CostEstimate c = expected_cost(b.witness, d, 20000);
    if (c.value + c.truncation_bound > b.upper + 1e-9)
        throw std::logic_error("cost_bounds: doubling witness exceeded 4L + A");
    return b;
}

// ---- approximants and their derivative --------------------------------------

/// E^N(x) = sum_{k=0}^{N} x_{k+1} f(x_k) along the recursion orbit from
/// (0, x). Throws if the orbit hits a singular step.
inline double approximant_value(const TailDistribution& d, double x1, std::size_t N)
{
    double xp = 0.0, xc = x1, sum = 0.0;
    for (std::size_t k = 0; k <= N; ++k) {
        sum += xc * d.tail_or_zero(xp);
        double xn = step_xy(d, xp, xc).second;
        xp = xc;
        xc = xn;
    }
    return sum;
}

/// dE^N/dx = f(x_N) dx_{N+1}/dx, with the orbit tangent propagated through
/// x_{n+1} = -f(x_{n-1})/f'(x_n).
inline double approximant_derivative(const TailDistribution& d, double x1,
                                     std::size_t N)
{
    double xp = 0.0, xc = x1;
    double tp = 0.0, tc = 1.0;  // d x_n / d x_1
    for (std::size_t n = 1; n <= N; ++n) {
        double fp = d.tail_derivative(xc);
        if (fp == 0.0)
            throw std::runtime_error("approximant_derivative: singular step, f'(x)=0");
        double xn = -d.tail(xp) / fp;
        double tn = -d.tail_derivative(xp) * tp / fp +
                    d.tail(xp) * d.tail_second_derivative(xc) * tc / (fp * fp);
        xp = xc; xc = xn;
        tp = tc; tc = tn;
    }
    return d.tail_or_zero(xp) * tc;
}

/// Central-difference cross-check of dE^N/dx.
inline double approximant_derivative_fd(const TailDistribution& d, double x1,
                                        std::size_t N, double h = 1e-6)
{
    return (approximant_value(d, x1 + h, N) - approximant_value(d, x1 - h, N)) /
           (2.0 * h);
}

// ---- bounding sequence -------------------------------------------------------

struct BoundingSequence {
    std::vector<double> values;
    bool diverged = false;  // exceeded the overflow guard before reaching k terms
};

/// b_1 = 2 E_0, b_{k+1} = 2 E_0 / f(b_k); strictly increasing while finite.
inline BoundingSequence upper_bounding_sequence(const TailDistribution& d, double E0,
                                                std::size_t k)
{
    if (!(E0 > 0.0) || k < 1)
        throw std::invalid_argument("upper_bounding_sequence: need E0 > 0, k >= 1");
    BoundingSequence out;
    out.values.push_back(2.0 * E0);
    while (out.values.size() < k) {
        double f = d.tail_or_zero(std::min(out.values.back(), d.support_upper()));
        if (f == 0.0) {
            out.diverged = true;
            break;
        }
        double next = 2.0 * E0 / f;
        if (next > kOverflowGuard) {
            out.diverged = true;
            break;
        }
        out.values.push_back(next);
    }
    return out;
}

// ---- pruning -------------------------------------------------------------

namespace detail {
/// Full finite sum over the stored prefix (no truncation); used to compare
/// plans before/after pruning.
inline double prefix_cost(const std::vector<double>& pts, const TailDistribution& d)
{
    double sum = 0.0, xp = 0.0;
    for (double x : pts) {
        sum += x * d.tail_or_zero(xp);
        xp = x;
    }
    return sum;
}
}  // namespace detail

/// Removes the points preventing strict monotonicity, then drops every
/// leading point below delta = 1/(2 C_L) except the last one. Distributions
/// without a Lipschitz bound only get the monotonicity pass. Verifies the
/// cost strictly decreased whenever something was removed.
inline SearchPlan prune_plan(const SearchPlan& plan, const TailDistribution& d)
{
    std::vector<double> kept;
    for (double p : plan.points) {
        if (!(p > 0.0)) continue;
        if (kept.empty() || p > kept.back()) kept.push_back(p);
    }
    if (auto cl = d.lipschitz_bound()) {
        double delta = 1.0 / (2.0 * *cl);
        std::size_t last_small = 0, n_small = 0;
        for (std::size_t i = 0; i < kept.size(); ++i)
            if (kept[i] < delta) { last_small = i; ++n_small; }
        if (n_small > 1)
            kept.erase(kept.begin(), kept.begin() + static_cast<long>(last_small));
    }
    SearchPlan out{kept, plan.extension};
    if (kept.size() < plan.points.size()) {
        double before = detail::prefix_cost(plan.points, d);
        double after = detail::prefix_cost(kept, d);
        if (!(after < before))
            throw std::logic_error("prune_plan: pruning failed to lower the cost");
    }
    return out;
}

// ---- Monte Carlo oracle -----------------------------------------------------

struct MonteCarloResult {
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Simulates n searches: draw H, walk the plan to the first x_k >= H, pay
/// sum of x_j up to there. Draw i is a pure function of (seed, i), so the
/// sample set is independent of the partitioning; partial sums are merged in
/// partition order, making the result bitwise deterministic for a fixed
/// thread count.
inline MonteCarloResult monte_carlo_cost(const SearchPlan& plan,
                                         const TailDistribution& d, std::size_t n,
                                         std::uint64_t seed, unsigned threads = 1)
{
    if (n == 0) throw std::invalid_argument("monte_carlo_cost: n must be positive");
    if (!plan.strictly_monotone())
        throw std::invalid_argument("monte_carlo_cost: plan is not strictly monotone");
    unsigned parts = std::max(1u, threads);

    struct Partial {
        double sum = 0.0, sumsq = 0.0;
        std::string error;
    };
    std::vector<Partial> partials(parts);

    auto worker = [&](unsigned p) {
        Partial& acc = partials[p];
        try {
            PlanSequence seq(plan);
            std::vector<double> pts;      // materialized points
            std::vector<double> prefix;   // prefix sums of pts
            auto ensure = [&](double H) {
                while (pts.empty() || pts.back() < H) {
                    double x = seq.at(pts.size() + 1);
                    pts.push_back(x);
                    prefix.push_back((prefix.empty() ? 0.0 : prefix.back()) + x);
                }
            };
            CounterRng rng(seed);
            std::uint64_t lo = n * static_cast<std::uint64_t>(p) / parts;
            std::uint64_t hi = n * static_cast<std::uint64_t>(p + 1) / parts;
            for (std::uint64_t i = lo; i < hi; ++i) {
                double H = d.quantile(rng.at(i));
                ensure(H);
                auto it = std::lower_bound(pts.begin(), pts.end(), H);
                double cost = prefix[static_cast<std::size_t>(it - pts.begin())];
                acc.sum += cost;
                acc.sumsq += cost * cost;
            }
        } catch (const std::exception& e) {
            acc.error = e.what();
        }
    };

    if (parts == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(parts);
        for (unsigned p = 0; p < parts; ++p) pool.emplace_back(worker, p);
        for (auto& t : pool) t.join();
    }

    double sum = 0.0, sumsq = 0.0;
    for (const auto& part : partials) {
        if (!part.error.empty())
            throw std::runtime_error("monte_carlo_cost: " + part.error);
        sum += part.sum;
        sumsq += part.sumsq;
    }
    double mean = sum / static_cast<double>(n);
    double var = (sumsq / static_cast<double>(n) - mean * mean) *
                 static_cast<double>(n) / static_cast<double>(n - 1);
    return {mean, std::sqrt(std::max(0.0, var) / static_cast<double>(n))};
}

}  // namespace lsp
