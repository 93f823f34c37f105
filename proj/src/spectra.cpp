#include "bipspec/spectra.hpp"

#include <cstdio>
#include <limits>
#include <ostream>

namespace bipspec {

Index count_in_interval(const Spectrum& s, const Interval& interval)
{
    const double* begin = s.values.data();
    const double* end = begin + s.values.size();
    const double scale = s.scale;
    // Scaling by a positive factor preserves order, so binary search applies.
    const auto first = std::partition_point(begin, end, [&](double v) { return scale * v < interval.lo; });
    const auto last = std::partition_point(first, end, [&](double v) { return scale * v <= interval.hi; });
    return static_cast<Index>(last - first);
}

WindowPair::WindowPair(const Interval& interval, double c, WindowKind kind)
    : interval_(interval), c_(c), kind_(kind)
{
    const double length = interval.length();
    if (!(length > 0.0) || !std::isfinite(length))
        throw DomainError("window pair needs a finite interval of positive length");
    if (!(c > 0.0) || !std::isfinite(c))
        throw DomainError("window pair needs C > 0");
    if (kind == WindowKind::lower && !(c > 2.0))
        throw DomainError("lower window pair needs C > 2 so that the inner plateau is non-empty");
    flank_ = length / c;
    slope_ = c / length;
}

Interval WindowPair::support() const
{
    if (kind_ == WindowKind::upper)
        return {interval_.lo - flank_, interval_.hi + flank_};
    return interval_;
}

Interval WindowPair::plateau() const
{
    if (kind_ == WindowKind::upper)
        return interval_;
    return {interval_.lo + flank_, interval_.hi - flank_};
}

// The outer linear pieces are written identically in first() and second()
// so their difference cancels to exactly 0; the transition pieces are
// clamped to [-1, 0] so the difference stays inside [0, 1].
double WindowPair::first(double x) const
{
    const double a = interval_.lo;
    const double b = interval_.hi;
    if (kind_ == WindowKind::upper) {
        const Interval outer = support();
        if (x < outer.lo)
            return slope_ * (a - x) - 1.0;
        if (x > outer.hi)
            return slope_ * (x - b) - 1.0;
        return 0.0;
    }
    if (x < a)
        return slope_ * (a - x);
    if (x > b)
        return slope_ * (x - b);
    return 0.0;
}

double WindowPair::second(double x) const
{
    const double a = interval_.lo;
    const double b = interval_.hi;
    if (kind_ == WindowKind::upper) {
        const Interval outer = support();
        if (x < outer.lo)
            return slope_ * (a - x) - 1.0;
        if (x > outer.hi)
            return slope_ * (x - b) - 1.0;
        if (x < a)
            return std::min(0.0, slope_ * (a - x) - 1.0);
        if (x > b)
            return std::min(0.0, slope_ * (x - b) - 1.0);
        return -1.0;
    }
    const Interval inner = plateau();
    if (x < a)
        return slope_ * (a - x);
    if (x > b)
        return slope_ * (x - b);
    if (x < inner.lo)
        return std::max(-1.0, slope_ * (a - x));
    if (x > inner.hi)
        return std::max(-1.0, slope_ * (x - b));
    return -1.0;
}

WindowPair window_pair(const Interval& interval, double c, WindowKind kind)
{
    return WindowPair(interval, c, kind);
}

double kolmogorov_distance(const Spectrum& s, const LimitLaw& law)
{
    const Index total = s.size();
    if (total == 0)
        throw DomainError("kolmogorov_distance of an empty spectrum");
    const Eigen::VectorXd x = s.scaled();
    const double atom = law.atom0();
    const double inf = std::numeric_limits<double>::infinity();

    double worst = 0.0;
    double continuous = 0.0; // continuous mass of (-inf, previous]
    double previous = -inf;
    Index i = 0;
    while (i < total) {
        const double v = x[i];
        Index j = i;
        while (j < total && x[j] == v)
            ++j;
        continuous += continuous_measure(Interval(previous, v), law);
        previous = v;
        const double below = continuous + (v > 0.0 ? atom : 0.0);
        const double at = continuous + (v >= 0.0 ? atom : 0.0);
        const double esd_below = static_cast<double>(i) / total;
        const double esd_at = static_cast<double>(j) / total;
        worst = std::max({worst, std::abs(esd_below - below), std::abs(esd_at - at)});
        i = j;
    }
    return worst;
}

std::vector<Index> histogram(const Spectrum& s, double lo, double hi, int bins)
{
    if (bins < 1)
        throw DomainError("histogram needs at least one bin");
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw DomainError("histogram needs a finite range lo < hi");
    std::vector<Index> counts(bins, 0);
    const double width = (hi - lo) / bins;
    for (Index i = 0; i < s.size(); ++i) {
        const double v = s.scale * s.values[i];
        if (v < lo || v > hi)
            continue;
        auto bin = static_cast<int>((v - lo) / width);
        counts[std::clamp(bin, 0, bins - 1)] += 1;
    }
    return counts;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s)
{
    out << "index,eigenvalue\n";
    char buffer[64];
    for (Index i = 0; i < s.size(); ++i) {
        std::snprintf(buffer, sizeof buffer, "%.17g", s.scale * s.values[i]);
        out << i << ',' << buffer << '\n';
    }
}

} // namespace bipspec
