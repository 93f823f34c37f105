#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "bipspec/error.hpp"

namespace bipspec {

/// Closed interval [lo, hi]. Endpoints may be infinite (half-lines), never NaN.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_)
    {
        if (std::isnan(lo) || std::isnan(hi) || lo > hi)
            throw DomainError("interval requires lo <= hi");
    }

    double length() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool avoids_zero() const { return !contains(0.0); }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Limit of the bipartite spectral measure for aspect ratio alpha = m/n >= 1:
/// the Marchenko-Pastur law pushed through x -> +-sqrt(x), plus an atom at 0.
class LimitLaw {
public:
    explicit LimitLaw(double alpha)
    {
        if (!(alpha >= 1.0) || !std::isfinite(alpha))
            throw DomainError("limit law requires finite alpha >= 1");
        alpha_ = alpha;
        const double r = 1.0 / std::sqrt(alpha);
        a_ = 1.0 - r;
        b_ = 1.0 + r;
        atom0_ = (alpha - 1.0) / (alpha + 1.0);
    }

    double alpha() const { return alpha_; }
    /// Inner edge of the continuous support, 1 - alpha^{-1/2}.
    double a() const { return a_; }
    /// Outer edge of the continuous support, 1 + alpha^{-1/2}.
    double b() const { return b_; }
    /// Point mass at zero, (alpha - 1) / (alpha + 1).
    double atom0() const { return atom0_; }
    /// Total mass of the continuous part, 2 / (1 + alpha).
    double continuous_mass() const { return 2.0 / (1.0 + alpha_); }

private:
    double alpha_ = 1.0;
    double a_ = 0.0;
    double b_ = 2.0;
    double atom0_ = 0.0;
};

/// Marchenko-Pastur density of ratio 1/alpha, supported on [a^2, b^2].
template <typename Scalar>
Scalar mp_density(Scalar x, Scalar alpha)
{
    if (!(alpha >= Scalar(1)) || !std::isfinite(alpha))
        throw DomainError("mp_density requires finite alpha >= 1");
    const Scalar r = Scalar(1) / std::sqrt(alpha);
    const Scalar a2 = (Scalar(1) - r) * (Scalar(1) - r);
    const Scalar b2 = (Scalar(1) + r) * (Scalar(1) + r);
    if (!(x >= a2 && x <= b2) || x == Scalar(0))
        return Scalar(0);
    const Scalar radicand = (b2 - x) * (x - a2);
    return radicand > Scalar(0) ? alpha / (Scalar(2) * std::numbers::pi_v<Scalar> * x) * std::sqrt(radicand) : Scalar(0);
}

/// Density of the continuous part of the symmetrized law; the atom at 0 is
/// not included. Depends on |x| only.
template <typename Scalar>
Scalar sym_density(Scalar x, const LimitLaw& law)
{
    const Scalar ax = std::abs(x);
    const Scalar a = law.a();
    const Scalar b = law.b();
    if (!(ax >= a && ax <= b))
        return Scalar(0);
    const Scalar alpha = law.alpha();
    const Scalar scale = alpha / ((Scalar(1) + alpha) * std::numbers::pi_v<Scalar>);
    // (b^2 - x^2)(x^2 - a^2) factored to keep precision near the edges.
    const Scalar outer = (b - ax) * (b + ax);
    if (!(outer > Scalar(0)))
        return Scalar(0);
    // alpha = 1: sqrt(x^2)/|x| cancels and the density is finite at 0.
    if (a == Scalar(0))
        return scale * std::sqrt(outer);
    const Scalar inner = (ax - a) * (ax + a);
    if (!(inner > Scalar(0)))
        return Scalar(0);
    return scale / ax * std::sqrt(outer * inner);
}

/// Absolute error target used by measure() and cdf().
inline constexpr double kMeasureTolerance = 1e-10;

/// Mass of the continuous part over [lo, hi] (no atom).
double continuous_measure(const Interval& interval, const LimitLaw& law, double abs_tol = kMeasureTolerance);

/// mu(I): continuous mass over I plus the atom when 0 lies in the closed interval.
double measure(const Interval& interval, const LimitLaw& law, double abs_tol = kMeasureTolerance);

/// mu((-inf, x]).
double cdf(double x, const LimitLaw& law);

/// Supremum of sym_density over the continuous support (grid plus golden-section refine).
double max_density(const LimitLaw& law);

} // namespace bipspec
