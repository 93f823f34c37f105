#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace bipspec {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
    bool converged = true;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo, hi, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename F>
Segment gauss_kronrod_15(F& f, double lo, double hi)
{
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int k = 0; k < 7; ++k) {
        const double dx = half * kKronrodNodes[k];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[k] * sum;
        if (k % 2 == 1)
            gauss += kGaussWeights[k / 2] * sum;
    }
    return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod integration of `f` over [lo, hi].
///
/// The segment with the largest error estimate is bisected until the summed
/// estimate drops below `abs_tol` or `max_intervals` is reached; in the latter
/// case `converged` is false and `abs_error` holds the tolerance achieved.
template <typename F>
QuadratureResult integrate(F&& f, double lo, double hi, double abs_tol, int max_intervals = 500)
{
    if (!(hi > lo))
        return {};

    std::priority_queue<detail::Segment> heap;
    auto first = detail::gauss_kronrod_15(f, lo, hi);
    double value = first.value;
    double error = first.error;
    heap.push(first);

    // Error estimates below what rounding can resolve are not worth chasing.
    const auto floor_of = [](double v) { return 50.0 * std::numeric_limits<double>::epsilon() * std::abs(v); };

    while (error > std::max(abs_tol, floor_of(value)) && static_cast<int>(heap.size()) < max_intervals) {
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const auto left = detail::gauss_kronrod_15(f, worst.lo, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Recompute the sums from the leaves so cancellation drift does not leak.
    QuadratureResult result;
    result.intervals = static_cast<int>(heap.size());
    std::vector<detail::Segment> leaves;
    leaves.reserve(heap.size());
    while (!heap.empty()) {
        leaves.push_back(heap.top());
        heap.pop();
    }
    std::sort(leaves.begin(), leaves.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
    for (const auto& s : leaves) {
        result.value += s.value;
        result.abs_error += s.error;
    }
    result.converged = result.abs_error <= std::max(abs_tol, floor_of(result.value));
    return result;
}

} // namespace bipspec
