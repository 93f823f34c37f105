#include "bipspec/mplaw.hpp"

#include <algorithm>
#include <sstream>

#include "bipspec/quadrature.hpp"

namespace bipspec {

namespace {

// Mass of the continuous density over [lo, hi] intersected with [a, b].
// Each half of the support is integrated in a variable that absorbs the
// square-root edge: x = a + t^2 near a and x = b - t^2 near b.
double positive_side_mass(double lo, double hi, const LimitLaw& law, double abs_tol)
{
    const double a = law.a();
    const double b = law.b();
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    if (!(hi > lo))
        return 0.0;

    const double alpha = law.alpha();
    const double scale = alpha / ((1.0 + alpha) * std::numbers::pi);
    const double mid = 0.5 * (a + b);
    const double piece_tol = 0.25 * abs_tol;
    double total = 0.0;

    auto check = [&](const QuadratureResult& r, const char* side) {
        if (!r.converged) {
            std::ostringstream msg;
            msg << "quadrature did not converge on the " << side << " edge piece: achieved " << r.abs_error
                << ", requested " << piece_tol;
            throw NumericError(msg.str(), r.abs_error);
        }
        return r.value;
    };

    if (lo < mid) {
        const double x1 = std::min(hi, mid);
        auto near_inner = [&](double t) {
            const double x = a + t * t;
            const double outer = (b - x) * (b + x);
            if (!(outer > 0.0))
                return 0.0;
            if (a == 0.0)
                return 2.0 * scale * t * std::sqrt(outer);
            return 2.0 * t * t * scale * std::sqrt(outer * (x + a)) / x;
        };
        total += check(integrate(near_inner, std::sqrt(lo - a), std::sqrt(x1 - a), piece_tol), "inner");
    }
    if (hi > mid) {
        const double x0 = std::max(lo, mid);
        auto near_outer = [&](double t) {
            const double x = b - t * t;
            const double inner = (x - a) * (x + a);
            if (!(inner > 0.0))
                return 0.0;
            return 2.0 * t * t * scale * std::sqrt((b + x) * inner) / x;
        };
        total += check(integrate(near_outer, std::sqrt(b - hi), std::sqrt(b - x0), piece_tol), "outer");
    }
    return total;
}

} // namespace

double continuous_measure(const Interval& interval, const LimitLaw& law, double abs_tol)
{
    // The density is even: the negative half maps onto [-hi, -lo].
    const double pos = positive_side_mass(interval.lo, interval.hi, law, 0.5 * abs_tol);
    const double neg = positive_side_mass(-interval.hi, -interval.lo, law, 0.5 * abs_tol);
    return pos + neg;
}

double measure(const Interval& interval, const LimitLaw& law, double abs_tol)
{
    double mass = continuous_measure(interval, law, abs_tol);
    if (interval.contains(0.0))
        mass += law.atom0();
    return std::clamp(mass, 0.0, 1.0);
}

double cdf(double x, const LimitLaw& law)
{
    if (std::isnan(x))
        throw DomainError("cdf of NaN");
    return measure(Interval(-std::numeric_limits<double>::infinity(), x), law);
}

double max_density(const LimitLaw& law)
{
    const double a = law.a();
    const double b = law.b();
    constexpr int kGrid = 4000;
    double best_x = a;
    double best = sym_density(a, law);
    for (int i = 1; i <= kGrid; ++i) {
        const double x = a + (b - a) * i / kGrid;
        const double v = sym_density(x, law);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    // Golden-section refinement on the bracketing cell; the density is unimodal on [a, b].
    double lo = std::max(a, best_x - (b - a) / kGrid);
    double hi = std::min(b, best_x + (b - a) / kGrid);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
        const double x1 = hi - phi * (hi - lo);
        const double x2 = lo + phi * (hi - lo);
        if (sym_density(x1, law) < sym_density(x2, law))
            lo = x1;
        else
            hi = x2;
    }
    return std::max(best, sym_density(0.5 * (lo + hi), law));
}

} // namespace bipspec
