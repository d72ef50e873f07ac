#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lsp/recursion.hpp"
#include "lsp/rng.hpp"
#include "lsp/separatrix.hpp"

namespace lsp {

// ---- cone field -------------------------------------------------------------

/// Constant cone field spanned by eta = (1,2) and xi = (2,1): the closed set
/// of directions (a,b) with a > 0 and b/a in [1/2, 2].
struct ConeField {
    static constexpr Vec2 eta{1.0, 2.0};
    static constexpr Vec2 xi{2.0, 1.0};

    static bool contains(const Vec2& v)
    {
        if (!(v.x > 0.0)) return false;
        double r = v.y / v.x;
        return r >= 0.5 && r <= 2.0;
    }
};

inline Vec2 apply(const Mat2& m, const Vec2& v)
{
    return {m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y};
}

struct ConeCheck {
    Vec2 eta_image;
    Vec2 xi_image;
    bool eta_ok = false;
    bool xi_ok = false;
    bool consistent() const { return eta_ok && xi_ok; }
};

inline ConeCheck cone_check(double y, double z)
{
    Mat2 dr = jacobian_yz_exp(y, z);
    ConeCheck c;
    c.eta_image = apply(dr, ConeField::eta);
    c.xi_image = apply(dr, ConeField::xi);
    c.eta_ok = ConeField::contains(c.eta_image);
    c.xi_ok = ConeField::contains(c.xi_image);
    return c;
}

/// True iff DR at (y,z) maps the cone into itself; analytically equivalent
/// to z >= ln 4.
inline bool cone_consistent(double y, double z) { return cone_check(y, z).consistent(); }

// ---- region classification ----------------------------------------------------

enum class Region { Monotone, Chaotic, Boundary };

struct RegionLabel {
    Region region = Region::Chaotic;
    std::optional<std::size_t> break_step;
    double tolerance = 0.0;  // bisection bracket width for Boundary labels
};

/// Largest k <= horizon with the orbit strictly increasing through step k;
/// returns the horizon when the escape certificate fires first.
inline std::size_t monotone_steps(const TailDistribution& d, double x1,
                                  std::size_t horizon)
{
    Orbit o = orbit(d, x1, horizon);
    if (o.escaped) return horizon;
    return o.monotone_prefix_length;
}

/// Monotone iff the orbit escapes; Chaotic on a break (or a singular step).
/// Orbits still undecided at the horizon count as chaotic-side; a single
/// orbit never yields Boundary.
inline RegionLabel classify(const TailDistribution& d, double x1,
                            std::size_t horizon = 500)
{
    Orbit o = orbit(d, x1, horizon);
    if (o.escaped) return {Region::Monotone, std::nullopt, 0.0};
    return {Region::Chaotic, o.break_step, 0.0};
}

/// Same decision applied to a phase point (y,z) of the exponential map.
inline RegionLabel classify_phase_exp(double y, double z, std::size_t horizon = 500)
{
    for (std::size_t k = 0; k < horizon; ++k) {
        if (!(z > 0.0)) return {Region::Chaotic, k, 0.0};
        if (y > kOverflowGuard || (y >= 4.0 && z >= std::log(y) + 1.0))
            return {Region::Monotone, std::nullopt, 0.0};
        auto [Y, Z] = step_yz_exp(y, z);
        y = Y;
        z = Z;
    }
    return {Region::Chaotic, std::nullopt, 0.0};
}

/// Gaussian variant in its (x, y) chart.
inline RegionLabel classify_phase_gauss(double x, double y, std::size_t horizon = 500)
{
    for (std::size_t k = 0; k < horizon; ++k) {
        if (!(y > 0.0)) return {Region::Chaotic, k, 0.0};
        if (x > kOverflowGuard ||
            (x >= 1.0 && y >= std::log(2.0 * x * x) + 1.0))
            return {Region::Monotone, std::nullopt, 0.0};
        auto [X, Y] = step_gauss1(x, y);
        x = X;
        y = Y;
    }
    return {Region::Chaotic, std::nullopt, 0.0};
}

// ---- R-stable set check ---------------------------------------------------------

/// Lower boundary of the R-stable set A = {y >= 0, z >= max(0, phi(y))}: the
/// shipped graph on [4, Y_max] joined with the backward-extended piece below
/// 4, and zero left of the axis crossing y*.
class StableRegionBoundary {
public:
    StableRegionBoundary(const SeparatrixCurve& curve, const BackwardExtension& ext)
        : curve_(&curve)
    {
        std::vector<Vec2> pts;
        for (const auto& pl : ext.polylines)
            for (const Vec2& p : pl)
                if (std::isfinite(p.x) && std::isfinite(p.y) && p.x > 0.0 &&
                    p.x <= curve.grid_min() * 1.05 && p.y > 0.0)
                    pts.push_back(p);
        std::sort(pts.begin(), pts.end(),
                  [](const Vec2& a, const Vec2& b) { return a.x < b.x; });
        for (const Vec2& p : pts) {
            if (!low_y_.empty() && p.x - low_y_.back() < 1e-9) continue;
            low_y_.push_back(p.x);
            low_z_.push_back(p.y);
        }
        auto axis = ext.axis_crossings();
        y_star_ = axis.empty() ? (low_y_.empty() ? 0.0 : low_y_.front())
                               : axis.front();
    }

    double y_star() const { return y_star_; }

    double value(double y) const
    {
        if (y <= y_star_) return 0.0;
        if (y >= curve_->grid_min()) return curve_->phi(y);
        auto it = std::lower_bound(low_y_.begin(), low_y_.end(), y);
        if (it == low_y_.begin() || it == low_y_.end()) return 0.0;
        std::size_t j = static_cast<std::size_t>(it - low_y_.begin());
        double t = (y - low_y_[j - 1]) / (low_y_[j] - low_y_[j - 1]);
        return std::max(0.0, low_z_[j - 1] * (1.0 - t) + low_z_[j] * t);
    }

private:
    const SeparatrixCurve* curve_;
    std::vector<double> low_y_, low_z_;
    double y_star_ = 0.0;
};

struct StableSetReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_slack = std::numeric_limits<double>::infinity();  // min(z' - B(y'))
    double y_star = 0.0;
};

/// Samples points of A and verifies their images stay in A up to the stated
/// interpolation tolerance near the curve.
inline StableSetReport r_stable_check(const SeparatrixCurve& curve,
                                      const BackwardExtension& ext,
                                      std::size_t n_points, std::uint64_t seed,
                                      double tolerance = 1e-6)
{
    if (curve.kind != Kind::Exponential)
        throw std::domain_error("r_stable_check: exponential curves only");
    StableRegionBoundary boundary(curve, ext);
    StableSetReport rep;
    rep.y_star = boundary.y_star();
    CounterRng rng(seed);
    double z_cap = std::log(curve.grid_max() * 0.9);
    for (std::size_t i = 0; i < n_points; ++i) {
        double y = rng.next() * 20.0;
        double z = boundary.value(y) + std::pow(10.0, -3.0 + 4.0 * rng.next());
        if (z > z_cap) z = z_cap;
        auto [Y, Z] = step_yz_exp(y, z);
        double slack = Z - boundary.value(Y);
        rep.worst_slack = std::min(rep.worst_slack, slack);
        if (slack < -tolerance) ++rep.violations;
        ++rep.checked;
    }
    return rep;
}

}  // namespace lsp
