#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lsp/plan_cost.hpp"
#include "oracles.hpp"

using Catch::Approx;
using lsp::CostEstimate;
using lsp::SearchPlan;
using lsp::TailDistribution;

TEST_CASE("expected cost of the Pareto doubling plan")
{
    // x_k = 2^k is doubling with first = 2; section-4's bookkeeping x_0 = 1
    // changes nothing because f(0) = f(1) = 1
    auto d = TailDistribution::pareto(2.0);
    auto c = lsp::expected_cost(SearchPlan::doubling(2.0), d, 40);
    CHECK(c.value + 0.5 * c.truncation_bound == Approx(4.0).margin(1e-9));
    CHECK(c.value == Approx(4.0).margin(1e-9));
}

TEST_CASE("single-point plan costs its first excursion")
{
    auto d = TailDistribution::exponential();
    SearchPlan p{{1.7}, lsp::NoExtension{}};
    auto c = lsp::expected_cost(p, d, 1);
    CHECK(c.value == 1.7);
    CHECK(c.terms_used == 1);
}

TEST_CASE("exponential doubling plan sits inside the basic bounds")
{
    auto d = TailDistribution::exponential();
    auto c = lsp::expected_cost(SearchPlan::doubling(1.0), d, 60);
    CHECK(c.value >= 1.0);
    CHECK(c.value + c.truncation_bound <= 5.0);
    // direct summation oracle
    double direct = 0.0, xp = 0.0;
    for (int k = 1; k <= 60; ++k) {
        double xk = std::ldexp(1.0, k - 1);
        direct += xk * std::exp(-xp);
        xp = xk;
        if (xk > 100) break;
    }
    CHECK(c.value == Approx(direct).epsilon(1e-12));
}

TEST_CASE("non-monotone plans are rejected")
{
    auto d = TailDistribution::exponential();
    SearchPlan bad{{1.0, 0.5}, lsp::NoExtension{}};
    CHECK_THROWS_AS(lsp::expected_cost(bad, d, 10), std::invalid_argument);
    CHECK_THROWS_AS(lsp::monte_carlo_cost(bad, d, 10, 1), std::invalid_argument);
}

TEST_CASE("cost bounds with the doubling witness")
{
    auto e = lsp::cost_bounds(TailDistribution::exponential());
    CHECK(e.lower == 1.0);
    CHECK(e.upper == Approx(4.001));
    auto p = lsp::cost_bounds(TailDistribution::pareto(2.0));
    CHECK(p.lower == Approx(2.0));
    CHECK(p.upper == Approx(8.001));
    auto g = lsp::cost_bounds(TailDistribution::gaussian_one_sided());
    CHECK(g.lower == Approx(0.8862269254527580));
    CHECK(g.upper == Approx(4.0 * 0.8862269254527580 + 1e-3));
    // bounded support: witness must also satisfy the bound
    auto s = lsp::cost_bounds(TailDistribution::sqrt_singular());
    auto sc = lsp::expected_cost(s.witness, TailDistribution::sqrt_singular(), 10000);
    CHECK(sc.value <= s.upper);
    CHECK(s.lower == Approx(1.0 / 3.0));
}

TEST_CASE("approximant derivative telescopes")
{
    auto d = TailDistribution::exponential();
    // N=1: x_2 f(x_1) with x_2 = e^{x}, so exactly 1 for the exponential
    CHECK(lsp::approximant_derivative(d, 0.9, 1) == Approx(1.0).epsilon(1e-12));
    CHECK(lsp::approximant_derivative(d, 0.9, 3) ==
          Approx(lsp::approximant_derivative_fd(d, 0.9, 3)).margin(1e-5));
    auto p = TailDistribution::pareto(2.0);
    CHECK(lsp::approximant_derivative(p, 2.0, 5) ==
          Approx(lsp::approximant_derivative_fd(p, 2.0, 5)).margin(1e-5));
    // closed form: dE^N/dx for Pareto recursion orbits is sum_{k<=N} alpha^{-k}
    double expect = 0.0;
    for (int k = 0; k <= 5; ++k) expect += std::pow(2.0, -k);
    CHECK(lsp::approximant_derivative(p, 2.0, 5) == Approx(expect).epsilon(1e-12));
}

TEST_CASE("approximant derivative matches finite differences on [0.75, 1.2]")
{
    auto d = TailDistribution::exponential();
    for (double x = 0.75; x <= 1.2 + 1e-9; x += 0.05) {
        for (std::size_t N : {1u, 2u, 3u, 4u}) {
            REQUIRE(lsp::approximant_derivative(d, x, N) ==
                    Approx(lsp::approximant_derivative_fd(d, x, N)).margin(1e-5));
        }
    }
}

TEST_CASE("upper bounding sequence")
{
    auto d = TailDistribution::exponential();
    auto b = lsp::upper_bounding_sequence(d, 2.4, 2);
    REQUIRE(b.values.size() == 2);
    CHECK(b.values[0] == Approx(4.8));
    CHECK(b.values[1] == Approx(4.8 * std::exp(4.8)).epsilon(1e-12));

    auto one = lsp::upper_bounding_sequence(TailDistribution::gaussian_one_sided(),
                                            3.0, 1);
    REQUIRE(one.values.size() == 1);
    CHECK(one.values[0] == 6.0);

    auto p = lsp::upper_bounding_sequence(TailDistribution::pareto(2.0), 4.0, 2);
    REQUIRE(p.values.size() == 2);
    CHECK(p.values[0] == 8.0);
    CHECK(p.values[1] == Approx(512.0));

    // strictly increasing until the overflow guard fires
    auto big = lsp::upper_bounding_sequence(d, 10.0, 12);
    for (std::size_t i = 1; i < big.values.size(); ++i)
        CHECK(big.values[i] > big.values[i - 1]);
    CHECK(big.diverged);
}

TEST_CASE("prune_plan drops sub-delta and non-monotone points")
{
    auto d = TailDistribution::exponential();  // delta = 1/2
    SearchPlan messy{{0.1, 0.2, 3.0, 2.0, 5.0}, lsp::NoExtension{}};
    auto pruned = lsp::prune_plan(messy, d);
    CHECK(pruned.points == std::vector<double>{0.2, 3.0, 5.0});
    double before = 0.0, after = 0.0, xp = 0.0;
    for (double x : std::vector<double>{0.1, 0.2, 3.0, 2.0, 5.0}) {
        before += x * d.tail(std::min(xp, 700.0));
        xp = std::max(xp, x);
    }
    xp = 0.0;
    for (double x : pruned.points) { after += x * d.tail(xp); xp = x; }
    CHECK(after < before);

    SearchPlan fine{{0.6, 1.0, 2.0}, lsp::NoExtension{}};
    CHECK(lsp::prune_plan(fine, d).points == fine.points);
}

TEST_CASE("pruning never raises the cost (random perturbed plans)")
{
    auto d = TailDistribution::exponential();
    lsp::CounterRng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> pts;
        double x = 0.02 + rng.next();
        for (int k = 0; k < 12; ++k) {
            pts.push_back(x);
            if (rng.next() < 0.3) x *= 0.4 + rng.next();  // inject non-monotone dips
            else x *= 1.3 + rng.next();
        }
        SearchPlan plan{pts, lsp::NoExtension{}};
        auto pruned = lsp::prune_plan(plan, d);
        REQUIRE(pruned.strictly_monotone());
        if (pruned.points.size() == pts.size()) continue;
        double before = 0.0, after = 0.0, xp = 0.0;
        for (double p : pts) { before += p * d.tail(xp); xp = p; }
        xp = 0.0;
        for (double p : pruned.points) { after += p * d.tail(xp); xp = p; }
        REQUIRE(after < before);
    }
}

TEST_CASE("sqrt-singular insertion property")
{
    auto d = TailDistribution::sqrt_singular();
    auto cost_of = [&](std::vector<double> pts) {
        SearchPlan p{std::move(pts), lsp::NoExtension{}};
        return lsp::expected_cost(p, d, 10).value;
    };
    // x_0 < x_1^2 lowers the cost; x_0 > x_1^2 raises it
    CHECK(cost_of({0.05, 0.25}) < cost_of({0.25}));
    for (double x1 : {0.25, 0.5, 0.9}) {
        CHECK(cost_of({x1 * x1 / 2.0, x1}) < cost_of({x1}));
        CHECK(cost_of({(x1 * x1 + x1) / 2.0, x1}) > cost_of({x1}));
    }
    lsp::CounterRng rng(3);
    for (int t = 0; t < 50; ++t) {
        double x1 = 0.05 + 0.9 * rng.next();
        double below = x1 * x1 * rng.next();
        double above = x1 * x1 + (x1 - x1 * x1) * rng.next();
        if (below <= 0.0 || above >= x1) continue;
        REQUIRE(cost_of({below, x1}) < cost_of({x1}));
        REQUIRE(cost_of({above, x1}) > cost_of({x1}));
    }
}

TEST_CASE("monte carlo agrees with the deterministic cost")
{
    auto d = TailDistribution::pareto(2.0);
    auto plan = SearchPlan::doubling(2.0);
    auto mc = lsp::monte_carlo_cost(plan, d, 1'000'000, 20260810);
    CHECK(std::abs(mc.mean - 4.0) <= 4.0 * mc.stderr_);

    auto e = TailDistribution::exponential();
    auto eplan = SearchPlan::doubling(1.0);
    auto det = lsp::expected_cost(eplan, e, 100);
    auto emc = lsp::monte_carlo_cost(eplan, e, 400'000, 99);
    CHECK(std::abs(emc.mean - det.value) <= 4.0 * emc.stderr_);

    // degenerate case: huge first point always suffices
    SearchPlan huge{{1000.0}, lsp::NoExtension{}};
    auto hm = lsp::monte_carlo_cost(huge, e, 10'000, 5);
    CHECK(hm.mean == 1000.0);
    CHECK(hm.stderr_ == 0.0);
}

TEST_CASE("monte carlo is deterministic and partition-stable in distribution")
{
    auto d = TailDistribution::exponential();
    auto plan = SearchPlan::doubling(0.5);
    auto a = lsp::monte_carlo_cost(plan, d, 100'000, 123, 1);
    auto b = lsp::monte_carlo_cost(plan, d, 100'000, 123, 1);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    // same samples regardless of partition count; only summation order moves
    auto c = lsp::monte_carlo_cost(plan, d, 100'000, 123, 4);
    CHECK(c.mean == Approx(a.mean).epsilon(1e-12));
}

TEST_CASE("monte carlo rejects unextendable plans when H escapes them")
{
    auto d = TailDistribution::exponential();
    SearchPlan stub{{0.001}, lsp::NoExtension{}};
    CHECK_THROWS_AS(lsp::monte_carlo_cost(stub, d, 1000, 7), std::runtime_error);
}

TEST_CASE("every instance satisfies L <= cost within the truncation bound")
{
    for (auto d : {TailDistribution::exponential(), TailDistribution::pareto(2.0),
                   TailDistribution::pareto(1.5),
                   TailDistribution::gaussian_one_sided(),
                   TailDistribution::sqrt_singular()}) {
        for (double first : {0.001, 0.1, 0.9}) {
            auto c = lsp::expected_cost(SearchPlan::doubling(first), d, 20000);
            REQUIRE(d.mean() <= c.value + c.truncation_bound + 1e-12);
        }
    }
}
