#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lsp/distributions.hpp"
#include "oracles.hpp"

using Catch::Approx;
using lsp::TailDistribution;

namespace {
std::vector<TailDistribution> all_instances()
{
    return {TailDistribution::exponential(), TailDistribution::pareto(2.0),
            TailDistribution::pareto(1.5), TailDistribution::gaussian_one_sided(),
            TailDistribution::sqrt_singular()};
}
}  // namespace

TEST_CASE("tail values at anchor points")
{
    auto expd = TailDistribution::exponential();
    CHECK(expd.tail(0.0) == 1.0);
    CHECK(TailDistribution::pareto(2.0).tail(0.5) == 1.0);
    // e^{-1} frozen from the alternating series sum_k (-1)^k / k!
    double e_inv = 0.0, term = 1.0;
    for (int k = 1; k <= 30; ++k) { term *= -1.0 / k; e_inv += term; }
    e_inv += 1.0;
    CHECK(expd.tail(1.0) == Approx(e_inv).epsilon(1e-14));
    CHECK(expd.tail(1.0) == Approx(0.36787944117144233).epsilon(1e-14));

    CHECK(TailDistribution::sqrt_singular().tail(0.0) == 1.0);
    CHECK(TailDistribution::sqrt_singular().tail(1.0) == 0.0);
    CHECK_THROWS_AS(expd.tail(-0.1), std::domain_error);
    CHECK_THROWS_AS(TailDistribution::sqrt_singular().tail(1.5), std::domain_error);
}

TEST_CASE("tail derivative anchors and finite-difference agreement")
{
    CHECK(TailDistribution::exponential().tail_derivative(0.0) == -1.0);
    CHECK(TailDistribution::pareto(2.0).tail_derivative(2.0) == Approx(-0.25));
    // -2x e^{-x^2} at x=1, cross-checked by central difference
    auto g = TailDistribution::gaussian_one_sided();
    CHECK(g.tail_derivative(1.0) == Approx(-2.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(g.tail_derivative(1.0) ==
          Approx(oracle::central_difference([&](double t) { return g.tail(t); }, 1.0,
                                            1e-6))
              .margin(1e-6));

    for (const auto& d : all_instances()) {
        double lo = 0.05, hi = d.support_upper() == 1.0 ? 0.95 : 5.0;
        for (double x = lo; x <= hi; x += 0.12) {
            if (d.kind() == lsp::Kind::Pareto && std::abs(x - 1.0) < 0.05) continue;
            double fd = oracle::central_difference(
                [&](double t) { return d.tail(t); }, x, 1e-6);
            REQUIRE(d.tail_derivative(x) == Approx(fd).margin(1e-6));
        }
    }

    CHECK_THROWS_AS(TailDistribution::pareto(2.0).tail_derivative(1.0),
                    std::domain_error);
    CHECK_THROWS_AS(TailDistribution::sqrt_singular().tail_derivative(0.0),
                    std::domain_error);
}

TEST_CASE("means match tail quadrature to 1e-8")
{
    CHECK(TailDistribution::exponential().mean() == 1.0);
    // Pareto(2): quadrature of 1 on [0,1] plus x^{-2} beyond
    auto p2 = TailDistribution::pareto(2.0);
    double q = oracle::integrate([](double) { return 1.0; }, 0.0, 1.0) +
               oracle::integrate_to_inf([](double x) { return 1.0 / (x * x); }, 1.0);
    CHECK(p2.mean() == Approx(q).margin(1e-8));
    auto g = TailDistribution::gaussian_one_sided();
    CHECK(g.mean() ==
          Approx(oracle::integrate_to_inf([](double x) { return std::exp(-x * x); },
                                          0.0))
              .margin(1e-8));
    CHECK(g.mean() == Approx(0.8862269254527580).epsilon(1e-10));

    for (const auto& d : all_instances()) {
        double quad = d.support_upper() == 1.0
                          ? oracle::integrate([&](double x) { return d.tail(x); },
                                              0.0, 1.0, 1e-12)
                          : oracle::integrate_to_inf(
                                [&](double x) { return d.tail(x); }, 0.0, 1e-12);
        REQUIRE(d.mean() == Approx(quad).margin(1e-8));
    }
}

TEST_CASE("tail integral matches quadrature")
{
    for (const auto& d : all_instances()) {
        for (double x : {0.0, 0.3, 0.8, 1.7, 3.0}) {
            if (x >= d.support_upper()) {
                CHECK(d.tail_integral(x) == 0.0);
                continue;
            }
            double quad = d.support_upper() == 1.0
                              ? oracle::integrate([&](double t) { return d.tail(t); },
                                                  x, 1.0, 1e-12)
                              : oracle::integrate_to_inf(
                                    [&](double t) { return d.tail(t); }, x, 1e-12);
            REQUIRE(d.tail_integral(x) == Approx(quad).margin(1e-8));
        }
    }
}

TEST_CASE("inverse-transform sampler anchors")
{
    auto expd = TailDistribution::exponential();
    CHECK(expd.quantile(0.5) == Approx(-std::log(0.5)).epsilon(1e-14));
    CHECK(TailDistribution::pareto(2.0).quantile(0.25) == Approx(2.0).epsilon(1e-14));
}

TEST_CASE("sampler mean over 1e6 draws within 3 sigma")
{
    auto expd = TailDistribution::exponential();
    lsp::CounterRng rng(20260810);
    const std::size_t n = 1'000'000;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += expd.sample(rng);
    CHECK(sum / static_cast<double>(n) == Approx(1.0).margin(0.003));
}

TEST_CASE("sampler passes a one-sample KS test at the 1% level")
{
    const std::size_t n = 100'000;
    // critical value of the one-sample KS statistic at alpha = 0.01
    const double critical = 1.6276 / std::sqrt(static_cast<double>(n));
    for (const auto& d : all_instances()) {
        lsp::CounterRng rng(7);
        std::vector<double> xs(n);
        for (auto& x : xs) x = d.sample(rng);
        std::sort(xs.begin(), xs.end());
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double cdf = 1.0 - d.tail(std::min(xs[i], d.support_upper()));
            double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
            worst = std::max({worst, std::abs(cdf - lo), std::abs(cdf - hi)});
        }
        REQUIRE(worst < critical);
    }
}

TEST_CASE("lipschitz bounds")
{
    CHECK(TailDistribution::exponential().lipschitz_bound().value() == 1.0);
    CHECK(TailDistribution::pareto(3.0).lipschitz_bound().value() == 3.0);
    CHECK(TailDistribution::gaussian_one_sided().lipschitz_bound().value() ==
          Approx(std::sqrt(2.0 / std::exp(1.0))).epsilon(1e-14));
    CHECK_FALSE(TailDistribution::sqrt_singular().lipschitz_bound().has_value());
}

TEST_CASE("selector grammar round trip")
{
    for (const char* s : {"exp", "pareto:2", "pareto:1.5", "gauss1", "sqrt"}) {
        auto d = lsp::parse_distribution(s);
        CHECK(d.selector() == s);
    }
    CHECK_THROWS_AS(lsp::parse_distribution("cauchy"), std::invalid_argument);
    CHECK_THROWS_AS(lsp::parse_distribution("pareto:0.5"), std::domain_error);
    CHECK_THROWS_AS(lsp::parse_distribution("pareto:2x"), std::invalid_argument);
}
