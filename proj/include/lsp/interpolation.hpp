#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lsp {

/// Piecewise-cubic Hermite interpolant on strictly increasing nodes. Slopes
/// either come from the data (Fritsch-Carlson, shape preserving) or are
/// supplied exactly; supplied slopes are clamped by the Fritsch-Carlson
/// limiter so a monotone data set always yields a monotone interpolant.
class CubicHermite {
public:
    CubicHermite() = default;

    static CubicHermite pchip(std::vector<double> xs, std::vector<double> ys)
    {
        CubicHermite h(std::move(xs), std::move(ys));
        h.ms_ = fritsch_carlson(h.xs_, h.ys_);
        return h;
    }

    static CubicHermite with_slopes(std::vector<double> xs, std::vector<double> ys,
                                    std::vector<double> ms)
    {
        CubicHermite h(std::move(xs), std::move(ys));
        if (ms.size() != h.xs_.size())
            throw std::invalid_argument("CubicHermite: slope count mismatch");
        h.ms_ = std::move(ms);
        h.limit_slopes();
        return h;
    }

    double x_min() const { return xs_.front(); }
    double x_max() const { return xs_.back(); }

    double value(double x) const
    {
        auto [i, t, hcell] = locate(x);
        double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        double h10 = t * (1 - t) * (1 - t);
        double h01 = t * t * (3 - 2 * t);
        double h11 = t * t * (t - 1);
        return h00 * ys_[i] + h10 * hcell * ms_[i] + h01 * ys_[i + 1] +
               h11 * hcell * ms_[i + 1];
    }

    double derivative(double x) const
    {
        auto [i, t, hcell] = locate(x);
        double d00 = 6 * t * (t - 1) / hcell;
        double d10 = (1 - t) * (1 - 3 * t);
        double d01 = -d00;
        double d11 = t * (3 * t - 2);
        return d00 * ys_[i] + d10 * ms_[i] + d01 * ys_[i + 1] + d11 * ms_[i + 1];
    }

private:
    CubicHermite(std::vector<double> xs, std::vector<double> ys)
        : xs_(std::move(xs)), ys_(std::move(ys))
    {
        if (xs_.size() < 2 || xs_.size() != ys_.size())
            throw std::invalid_argument("CubicHermite: need >= 2 matching nodes");
        for (std::size_t i = 1; i < xs_.size(); ++i)
            if (!(xs_[i] > xs_[i - 1]))
                throw std::invalid_argument("CubicHermite: nodes must increase");
    }

    struct Cell { std::size_t i; double t; double h; };

    Cell locate(double x) const
    {
        if (x < xs_.front() - 1e-12 * (1.0 + std::abs(xs_.front())) ||
            x > xs_.back() + 1e-12 * (1.0 + std::abs(xs_.back())))
            throw std::domain_error("CubicHermite: argument outside the grid");
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t i = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
        i = std::min(i, xs_.size() - 2);
        double h = xs_[i + 1] - xs_[i];
        return {i, std::clamp((x - xs_[i]) / h, 0.0, 1.0), h};
    }

    static std::vector<double> fritsch_carlson(const std::vector<double>& xs,
                                               const std::vector<double>& ys)
    {
        std::size_t n = xs.size();
        std::vector<double> d(n - 1), m(n);
        for (std::size_t i = 0; i + 1 < n; ++i)
            d[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m[i] = 0.0;
            } else {
                double h0 = xs[i] - xs[i - 1], h1 = xs[i + 1] - xs[i];
                double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        clamp(m, d);
        return m;
    }

    void limit_slopes()
    {
        std::vector<double> d(xs_.size() - 1);
        for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
            d[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
        clamp(ms_, d);
    }

    static void clamp(std::vector<double>& m, const std::vector<double>& d)
    {
        std::size_t n = m.size();
        for (std::size_t i = 0; i < n; ++i) {
            double lo = (i > 0) ? d[i - 1] : d[0];
            double hi = (i + 1 < n) ? d[i] : d[n - 2];
            if (lo * hi <= 0.0) continue;  // local extremum in the data, leave it
            double cap = 3.0 * std::min(std::abs(lo), std::abs(hi));
            if (std::abs(m[i]) > cap || m[i] * lo < 0.0)
                m[i] = std::copysign(cap, lo);
        }
    }

    std::vector<double> xs_, ys_, ms_;
};

}  // namespace lsp
