#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "bipspec/error.hpp"
#include "bipspec/graphs.hpp"
#include "bipspec/mplaw.hpp"

namespace bipspec {

/// Ascending eigenvalues of a block matrix (0 X; X^T 0). `values` are raw;
/// counts and statistics are taken over `scale * values`.
struct Spectrum {
    Eigen::VectorXd values;
    double scale = 1.0;

    Index size() const { return values.size(); }
    Eigen::VectorXd scaled() const { return scale * values; }
};

/// Singular values of X in ascending order, min(m, n) of them. Uses a
/// divide-and-conquer bidiagonal SVD, so small singular values keep
/// relative accuracy.
template <typename Derived>
Eigen::VectorXd singular_values(const Eigen::MatrixBase<Derived>& x)
{
    if (x.size() == 0)
        return {};
    if (!x.allFinite())
        throw DomainError("singular_values: matrix has non-finite entries");
    const Eigen::MatrixXd dense = x.template cast<double>();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
    Eigen::VectorXd s = svd.singularValues();
    std::sort(s.data(), s.data() + s.size());
    return s;
}

/// Spectrum of (0 X; X^T 0): {-sigma} u {0 x |m - n|} u {+sigma}. The
/// pairing values[i] == -values[size-1-i] holds exactly.
template <typename Derived>
Spectrum bipartite_spectrum(const Eigen::MatrixBase<Derived>& x, double scale = 1.0)
{
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw DomainError("spectrum scale must be positive and finite");
    const Eigen::VectorXd sigma = singular_values(x);
    const Index k = sigma.size();
    const Index total = x.rows() + x.cols();
    Spectrum s;
    s.scale = scale;
    s.values = Eigen::VectorXd::Zero(total);
    for (Index i = 0; i < k; ++i) {
        s.values[i] = -sigma[k - 1 - i];
        s.values[total - k + i] = sigma[i];
    }
    return s;
}

/// Reference path: all eigenvalues of a dense symmetric matrix, ascending.
template <typename Derived>
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixBase<Derived>& a)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.template cast<double>(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericError("symmetric eigensolver failed", 0.0);
    return solver.eigenvalues();
}

/// N_I: number of scaled eigenvalues in the closed interval.
Index count_in_interval(const Spectrum& s, const Interval& interval);

/// sum_i f(scale * values[i]), accumulated in ascending order.
template <typename F>
double trace_statistic(const Spectrum& s, F&& f)
{
    double total = 0.0;
    for (Index i = 0; i < s.size(); ++i)
        total += f(s.scale * s.values[i]);
    return total;
}

enum class WindowKind { upper, lower };

/// Piecewise-linear convex functions with slopes +-C/|I| around I = [a, b].
///
/// upper: first = f1 (0 on [a - w, b + w]), second = f2 (-1 on I);
///        first - second is 1 on I, 0 outside [a - w, b + w].
/// lower: first = g1 (0 on I), second = g2 (-1 on I' = [a + w, b - w]);
///        first - second is 1 on I', 0 outside I.
/// Here w = |I| / C. Both members agree outside the transition zones, so the
/// difference is exactly 0 there and exactly 1 on the plateau.
class WindowPair {
public:
    WindowPair(const Interval& interval, double c, WindowKind kind);

    const Interval& interval() const { return interval_; }
    double c() const { return c_; }
    WindowKind kind() const { return kind_; }
    double flank() const { return flank_; }
    double slope() const { return slope_; }

    /// [a - w, b + w] for upper windows, I itself for lower.
    Interval support() const;
    /// I for upper windows, [a + w, b - w] for lower.
    Interval plateau() const;

    double first(double x) const;
    double second(double x) const;
    double difference(double x) const { return first(x) - second(x); }

private:
    Interval interval_;
    double c_;
    WindowKind kind_;
    double flank_;
    double slope_;
};

WindowPair window_pair(const Interval& interval, double c, WindowKind kind);

/// sup_x |F_n(x) - F_mu(x)| between the ESD of the scaled spectrum and mu.
double kolmogorov_distance(const Spectrum& s, const LimitLaw& law);

/// Bin counts on [lo, hi] with `bins` equal bins; the last bin is closed.
/// Values outside [lo, hi] are ignored.
std::vector<Index> histogram(const Spectrum& s, double lo, double hi, int bins);

/// CSV with header `index,eigenvalue`, scaled values at 17 significant digits.
void write_spectrum_csv(std::ostream& out, const Spectrum& s);

} // namespace bipspec
