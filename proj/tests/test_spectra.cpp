#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "bipspec/rng.hpp"
#include "bipspec/spectra.hpp"

using namespace bipspec;

namespace {

double semicircle_cdf(double x)
{
    if (x <= -2.0)
        return 0.0;
    if (x >= 2.0)
        return 1.0;
    return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) + std::asin(0.5 * x) / std::numbers::pi;
}

double semicircle_quantile(double u)
{
    double lo = -2.0, hi = 2.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (semicircle_cdf(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Window members written straight from their piecewise definitions.
double f1_formula(double x, double a, double b, double c)
{
    const double len = b - a;
    if (x < a - len / c)
        return -c / len * (x - a) - 1.0;
    if (x > b + len / c)
        return c / len * (x - b) - 1.0;
    return 0.0;
}

double f2_formula(double x, double a, double b, double c)
{
    const double len = b - a;
    if (x < a)
        return -c / len * (x - a) - 1.0;
    if (x > b)
        return c / len * (x - b) - 1.0;
    return -1.0;
}

double g1_formula(double x, double a, double b, double c)
{
    const double len = b - a;
    if (x < a)
        return -c / len * (x - a);
    if (x > b)
        return c / len * (x - b);
    return 0.0;
}

double g2_formula(double x, double a, double b, double c)
{
    const double len = b - a;
    if (x < a + len / c)
        return -c / len * (x - a);
    if (x > b - len / c)
        return c / len * (x - b);
    return -1.0;
}

Spectrum from_values(std::vector<double> values, double scale = 1.0)
{
    Spectrum s;
    s.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
    s.scale = scale;
    return s;
}

} // namespace

TEST_CASE("singular values of small matrices")
{
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(2, 3);
    const auto s = singular_values(ones);
    REQUIRE(s.size() == 2);
    CHECK(std::abs(s[0]) < 1e-14);
    CHECK(s[1] == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 3);
    d(0, 0) = 3.0;
    d(1, 1) = -2.0;
    d(2, 2) = 1.0;
    const auto t = singular_values(d);
    CHECK(t[0] == doctest::Approx(1.0));
    CHECK(t[1] == doctest::Approx(2.0));
    CHECK(t[2] == doctest::Approx(3.0));

    CHECK(singular_values(Eigen::MatrixXd::Zero(3, 2)).isZero(0.0));
    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
    bad(0, 1) = NAN;
    CHECK_THROWS_AS(singular_values(bad), DomainError);
}

TEST_CASE("spectrum of K_{3,2}")
{
    const auto g = BipartiteGraph::complete(3, 2);
    const auto s = bipartite_spectrum(g.biadjacency().cast<double>());
    REQUIRE(s.size() == 5);
    CHECK(s.values[0] == doctest::Approx(-std::sqrt(6.0)).epsilon(1e-15));
    CHECK(s.values[4] == doctest::Approx(std::sqrt(6.0)).epsilon(1e-15));
    for (int i = 1; i <= 3; ++i)
        CHECK(std::abs(s.values[i]) < 1e-14);
    CHECK(count_in_interval(s, {-1e-12, 1e-12}) == 3);

    const auto empty = bipartite_spectrum(BipartiteGraph(3, 2).biadjacency().cast<double>());
    CHECK(empty.values.isZero(0.0));
    CHECK_THROWS_AS(bipartite_spectrum(Eigen::MatrixXd::Ones(2, 2), 0.0), DomainError);
}

TEST_CASE("spectrum structure: pairing and zero block")
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng = make_rng(seed);
        const Index n = 1 + static_cast<Index>(uniform_index(rng, 20));
        const Index m = n + static_cast<Index>(uniform_index(rng, 20));
        const auto g = sample_er(m, n, 0.4, seed);
        const auto s = bipartite_spectrum(g.biadjacency().cast<double>());
        REQUIRE(s.size() == m + n);
        for (Index i = 0; i < s.size(); ++i)
            REQUIRE(s.values[i] == -s.values[s.size() - 1 - i]);
        for (Index i = 1; i < s.size(); ++i)
            REQUIRE(s.values[i - 1] <= s.values[i]);
        CHECK(count_in_interval(s, {0.0, 0.0}) >= m - n);
        // Trace of A^2 is twice the edge count.
        CHECK(s.values.squaredNorm() == doctest::Approx(2.0 * g.edge_count()).epsilon(1e-10));
    }
}

TEST_CASE("singular-value path agrees with a full symmetric eigensolve")
{
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Rng rng = make_rng(1000 + seed);
        const Index n = 1 + static_cast<Index>(uniform_index(rng, 30));
        const Index m = n + static_cast<Index>(uniform_index(rng, 31 - n));
        const double p = 0.1 + 0.8 * uniform01(rng);
        const auto g = sample_er(m, n, p, seed);
        const auto x = normalized_er_block(g, p);
        const auto fast = bipartite_spectrum(x);
        const auto reference = symmetric_eigenvalues(block_form(x));
        REQUIRE(reference.size() == fast.size());
        CHECK((reference - fast.values).cwiseAbs().maxCoeff() <= 1e-7);
    }
}

TEST_CASE("count_in_interval uses closed intervals on scaled values")
{
    const auto s = from_values({-2.0, -1.0, 0.0, 1.0, 2.0}, 0.5);
    CHECK(count_in_interval(s, {0.5, 1.0}) == 2);
    CHECK(count_in_interval(s, {0.51, 1.0}) == 1);
    CHECK(count_in_interval(s, {-0.5, 0.5}) == 3);
    CHECK(count_in_interval(s, {2.0, 3.0}) == 0);
    CHECK(count_in_interval(s, {-INFINITY, INFINITY}) == 5);
}

TEST_CASE("trace statistics")
{
    const auto s = from_values({-2.0, -1.0, 1.0, 2.0}, 0.5);
    CHECK(trace_statistic(s, [](double x) { return x * x; }) == doctest::Approx(2.5));
    CHECK(trace_statistic(s, [](double) { return 1.0; }) == 4.0);
    CHECK(trace_statistic(s, [](double x) { return x; }) == 0.0);
}

TEST_CASE("window pair shapes")
{
    const Interval interval{0.5, 1.0};
    const double c = 4.0;
    const auto up = window_pair(interval, c, WindowKind::upper);
    const auto low = window_pair(interval, c, WindowKind::lower);
    const double w = 0.5 / c;
    CHECK(up.flank() == doctest::Approx(w));
    CHECK(up.slope() == doctest::Approx(c / 0.5));

    CHECK(up.first(0.5 - 2.0 * w) == doctest::Approx(1.0));
    CHECK(up.first(0.75) == 0.0);
    CHECK(up.first(0.5 - w) == 0.0);
    CHECK(up.first(1.0 + w) == 0.0);
    for (double x : {0.5, 0.6, 0.75, 1.0})
        CHECK(up.second(x) == -1.0);
    CHECK(up.second(0.5 - w) == doctest::Approx(0.0).epsilon(1e-15));

    for (double x : {0.5, 0.7, 1.0})
        CHECK(low.first(x) == 0.0);
    for (double x : {0.5 + w, 0.75, 1.0 - w})
        CHECK(low.second(x) == doctest::Approx(-1.0));
    CHECK(low.second(0.5) == 0.0);

    CHECK_THROWS_AS(window_pair({1.0, 1.0}, c, WindowKind::upper), DomainError);
    CHECK_THROWS_AS(window_pair(interval, 0.0, WindowKind::upper), DomainError);
    CHECK_THROWS_AS(window_pair(interval, 2.0, WindowKind::lower), DomainError);
}

TEST_CASE("window pairs match their piecewise definitions")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        double a = u(rng), b = u(rng);
        if (a > b)
            std::swap(a, b);
        if (b - a < 1e-3)
            continue;
        const double c = 2.5 + 10.0 * std::abs(u(rng));
        const auto up = window_pair({a, b}, c, WindowKind::upper);
        const auto low = window_pair({a, b}, c, WindowKind::lower);
        for (int i = 0; i < 400; ++i) {
            const double x = u(rng) * 2.0;
            const double tol = 1e-12 * (1.0 + c / (b - a));
            CHECK(std::abs(up.first(x) - f1_formula(x, a, b, c)) <= tol);
            CHECK(std::abs(up.second(x) - f2_formula(x, a, b, c)) <= tol);
            CHECK(std::abs(low.first(x) - g1_formula(x, a, b, c)) <= tol);
            CHECK(std::abs(low.second(x) - g2_formula(x, a, b, c)) <= tol);
        }
    }
}

TEST_CASE("window pairs sandwich the indicator")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        double a = u(rng), b = u(rng);
        if (a > b)
            std::swap(a, b);
        if (b - a < 1e-3)
            continue;
        const double c = 2.5 + 10.0 * std::abs(u(rng));
        const auto up = window_pair({a, b}, c, WindowKind::upper);
        const auto low = window_pair({a, b}, c, WindowKind::lower);
        for (int i = 0; i < 1000; ++i) {
            const double x = 2.0 * u(rng);
            const double indicator = (a <= x && x <= b) ? 1.0 : 0.0;
            const double du = up.difference(x);
            const double dl = low.difference(x);
            REQUIRE(du >= indicator);
            REQUIRE(dl <= indicator);
            REQUIRE(du >= 0.0);
            REQUIRE(du <= 1.0);
            REQUIRE(dl >= 0.0);
            REQUIRE(dl <= 1.0);
            if (!up.support().contains(x))
                REQUIRE(du == 0.0);
            if (low.plateau().contains(x))
                REQUIRE(dl == 1.0);
        }
        // Trace versions of the same inequalities on a random spectrum.
        std::vector<double> values(40);
        for (auto& v : values)
            v = u(rng);
        std::sort(values.begin(), values.end());
        const auto s = from_values(values);
        const auto count = static_cast<double>(count_in_interval(s, {a, b}));
        const double upper = trace_statistic(s, [&](double x) { return up.first(x); }) -
                             trace_statistic(s, [&](double x) { return up.second(x); });
        const double lower = trace_statistic(s, [&](double x) { return low.first(x); }) -
                             trace_statistic(s, [&](double x) { return low.second(x); });
        CHECK(upper >= count - 1e-9);
        CHECK(lower <= count + 1e-9);
    }
}

TEST_CASE("window members are convex and Lipschitz")
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const Interval interval{0.4, 0.9};
    for (auto kind : {WindowKind::upper, WindowKind::lower}) {
        const auto pair = window_pair(interval, 5.0, kind);
        const double lip = pair.slope();
        for (int i = 0; i < 5000; ++i) {
            const double x = u(rng), y = u(rng);
            const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            const double z = t * x + (1 - t) * y;
            for (int member = 0; member < 2; ++member) {
                auto f = [&](double v) { return member == 0 ? pair.first(v) : pair.second(v); };
                REQUIRE(std::abs(f(x) - f(y)) <= lip * std::abs(x - y) + 1e-12);
                REQUIRE(f(z) <= t * f(x) + (1 - t) * f(y) + 1e-12);
            }
        }
    }
}

TEST_CASE("Kolmogorov distance")
{
    const LimitLaw one(1.0);
    // A single eigenvalue at 0 against a law with median 0.
    CHECK(kolmogorov_distance(from_values({0.0}), one) == doctest::Approx(0.5).epsilon(1e-9));

    // Mid-quantile placement puts every jump exactly 1/(2N) away from the CDF.
    const int count = 1000;
    std::vector<double> quantiles(count);
    for (int i = 0; i < count; ++i)
        quantiles[i] = semicircle_quantile((i + 0.5) / count);
    CHECK(kolmogorov_distance(from_values(quantiles), one) == doctest::Approx(0.5 / count).epsilon(1e-6));

    // Atom: alpha = 3 puts mass 1/2 at 0; spectrum of zeros only sees the continuous part.
    const LimitLaw three(3.0);
    std::vector<double> zeros(10, 0.0);
    CHECK(kolmogorov_distance(from_values(zeros), three) == doctest::Approx(0.25).epsilon(1e-9));

    // Scale matters: doubling the values of a well-placed spectrum moves it off the law.
    CHECK(kolmogorov_distance(from_values(quantiles, 2.0), one) > 0.1);
}

TEST_CASE("histogram and CSV")
{
    const auto s = from_values({-1.0, -0.5, 0.0, 0.5, 1.0});
    const auto h = histogram(s, -1.0, 1.0, 4);
    CHECK(h == std::vector<Index>{1, 1, 1, 2});
    CHECK(histogram(s, -0.25, 0.25, 1) == std::vector<Index>{1});
    CHECK_THROWS_AS(histogram(s, 0.0, 0.0, 3), DomainError);
    CHECK_THROWS_AS(histogram(s, 0.0, 1.0, 0), DomainError);

    std::ostringstream out;
    write_spectrum_csv(out, from_values({-std::sqrt(2.0), 0.1}));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,eigenvalue");
    std::getline(in, line);
    CHECK(std::stod(line.substr(line.find(',') + 1)) == -std::sqrt(2.0));
    std::getline(in, line);
    CHECK(line == "1,0.10000000000000001");
}
