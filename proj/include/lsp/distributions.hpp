#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "lsp/rng.hpp"
#include "lsp/special.hpp"

namespace lsp {

enum class Kind { Exponential, Pareto, GaussianOneSided, SqrtSingular };

/// Tail distribution f(x) = P(H > x) of the hidden object's position.
/// Four concrete instances; all closed-form. Pareto carries its exponent.
class TailDistribution {
public:
    static TailDistribution exponential() { return {Kind::Exponential, 0.0}; }
    static TailDistribution pareto(double alpha)
    {
        if (!(alpha > 1.0))
            throw std::domain_error("pareto: alpha must exceed 1 for a finite mean");
        return {Kind::Pareto, alpha};
    }
    static TailDistribution gaussian_one_sided() { return {Kind::GaussianOneSided, 0.0}; }
    static TailDistribution sqrt_singular() { return {Kind::SqrtSingular, 0.0}; }

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }

    /// Upper end of the support: +inf except for the unit-interval instance.
    double support_upper() const
    {
        return kind_ == Kind::SqrtSingular ? 1.0
                                           : std::numeric_limits<double>::infinity();
    }

    double tail(double x) const
    {
        check_domain(x);
        return tail_unchecked(x);
    }

    /// f'(x); throws at points where the derivative does not exist
    /// (Pareto kink at 1, the sqrt instance at 0).
    double tail_derivative(double x) const
    {
        check_domain(x);
        switch (kind_) {
            case Kind::Exponential: return -std::exp(-x);
            case Kind::Pareto:
                if (x == 1.0)
                    throw std::domain_error("tail_derivative: Pareto kink at x=1");
                return x < 1.0 ? 0.0 : -alpha_ * std::pow(x, -alpha_ - 1.0);
            case Kind::GaussianOneSided: return -2.0 * x * std::exp(-x * x);
            case Kind::SqrtSingular:
                if (x == 0.0)
                    throw std::domain_error("tail_derivative: sqrt tail singular at 0");
                return -0.5 / std::sqrt(x);
        }
        return 0.0;
    }

    /// f''(x), needed by the tangent recursion behind dE^N/dx.
    double tail_second_derivative(double x) const
    {
        check_domain(x);
        switch (kind_) {
            case Kind::Exponential: return std::exp(-x);
            case Kind::Pareto:
                if (x == 1.0)
                    throw std::domain_error("tail_second_derivative: Pareto kink at x=1");
                return x < 1.0 ? 0.0
                               : alpha_ * (alpha_ + 1.0) * std::pow(x, -alpha_ - 2.0);
            case Kind::GaussianOneSided:
                return (4.0 * x * x - 2.0) * std::exp(-x * x);
            case Kind::SqrtSingular:
                if (x == 0.0)
                    throw std::domain_error("tail_second_derivative: singular at 0");
                return 0.25 * std::pow(x, -1.5);
        }
        return 0.0;
    }

    /// E[H] = integral of the tail; closed forms.
    double mean() const
    {
        switch (kind_) {
            case Kind::Exponential: return 1.0;
            case Kind::Pareto: return alpha_ / (alpha_ - 1.0);  // 1 + 1/(alpha-1)
            case Kind::GaussianOneSided: return 0.5 * std::sqrt(detail::pi);
            case Kind::SqrtSingular: return 1.0 / 3.0;
        }
        return 0.0;
    }

    /// Lipschitz constant of f where one exists (the pruning radius is
    /// 1/(2 C_L)); absent for the sqrt instance.
    std::optional<double> lipschitz_bound() const
    {
        switch (kind_) {
            case Kind::Exponential: return 1.0;
            case Kind::Pareto: return alpha_;
            case Kind::GaussianOneSided: return std::sqrt(2.0 / std::exp(1.0));
            case Kind::SqrtSingular: return std::nullopt;
        }
        return std::nullopt;
    }

    /// Integral of the tail over [x, support_upper].
    double tail_integral(double x) const
    {
        if (x < 0.0) throw std::domain_error("tail_integral: x must be >= 0");
        switch (kind_) {
            case Kind::Exponential: return std::exp(-x);
            case Kind::Pareto:
                if (x < 1.0) return (1.0 - x) + 1.0 / (alpha_ - 1.0);
                return std::pow(x, 1.0 - alpha_) / (alpha_ - 1.0);
            case Kind::GaussianOneSided:
                return 0.5 * std::sqrt(detail::pi) * lsp::erfc(x);
            case Kind::SqrtSingular:
                if (x >= 1.0) return 0.0;
                return 1.0 / 3.0 - x + (2.0 / 3.0) * std::pow(x, 1.5);
        }
        return 0.0;
    }

    /// Solution of f(x) = u for u in (0,1); the inverse-transform sampler.
    double quantile(double u) const
    {
        if (!(u > 0.0 && u < 1.0))
            throw std::domain_error("quantile: u must lie in (0,1)");
        switch (kind_) {
            case Kind::Exponential: return -std::log(u);
            case Kind::Pareto: return std::pow(u, -1.0 / alpha_);
            case Kind::GaussianOneSided: return std::sqrt(-std::log(u));
            case Kind::SqrtSingular: return (1.0 - u) * (1.0 - u);
        }
        return 0.0;
    }

    double sample(CounterRng& rng) const { return quantile(rng.next()); }

    /// Like tail() but returns 0 beyond the support end instead of throwing;
    /// used when walking plans whose points may overshoot a bounded support.
    double tail_or_zero(double x) const
    {
        if (x >= support_upper()) return 0.0;
        return tail_unchecked(x);
    }

    std::string selector() const
    {
        switch (kind_) {
            case Kind::Exponential: return "exp";
            case Kind::Pareto: return "pareto:" + format_alpha();
            case Kind::GaussianOneSided: return "gauss1";
            case Kind::SqrtSingular: return "sqrt";
        }
        return "";
    }

    friend bool operator==(const TailDistribution& a, const TailDistribution& b)
    {
        return a.kind_ == b.kind_ && a.alpha_ == b.alpha_;
    }

private:
    TailDistribution(Kind k, double a) : kind_(k), alpha_(a) {}

    void check_domain(double x) const
    {
        if (x < 0.0) throw std::domain_error("tail distribution: x must be >= 0");
        if (kind_ == Kind::SqrtSingular && x > 1.0)
            throw std::domain_error("tail distribution: sqrt instance lives on [0,1]");
    }

    double tail_unchecked(double x) const
    {
        switch (kind_) {
            case Kind::Exponential: return std::exp(-x);
            case Kind::Pareto: return x < 1.0 ? 1.0 : std::pow(x, -alpha_);
            case Kind::GaussianOneSided: return std::exp(-x * x);
            case Kind::SqrtSingular: return 1.0 - std::sqrt(x);
        }
        return 0.0;
    }

    std::string format_alpha() const
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", alpha_);
        return buf;
    }

    Kind kind_;
    double alpha_;
};

/// Parses the CLI selector grammar: exp | pareto:<alpha> | gauss1 | sqrt.
inline TailDistribution parse_distribution(const std::string& s)
{
    if (s == "exp") return TailDistribution::exponential();
    if (s == "gauss1") return TailDistribution::gaussian_one_sided();
    if (s == "sqrt") return TailDistribution::sqrt_singular();
    if (s.rfind("pareto:", 0) == 0) {
        std::size_t pos = 0;
        double a = std::stod(s.substr(7), &pos);
        if (pos != s.size() - 7)
            throw std::invalid_argument("parse_distribution: bad alpha in '" + s + "'");
        return TailDistribution::pareto(a);
    }
    throw std::invalid_argument("parse_distribution: unknown selector '" + s + "'");
}

// Free-function spellings of the per-instance operations.
inline double tail(const TailDistribution& d, double x) { return d.tail(x); }
inline double tail_derivative(const TailDistribution& d, double x)
{
    return d.tail_derivative(x);
}
inline double mean(const TailDistribution& d) { return d.mean(); }
inline double sample(const TailDistribution& d, CounterRng& rng)
{
    return d.sample(rng);
}

}  // namespace lsp
