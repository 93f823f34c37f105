#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "bipspec/factors.hpp"
#include "bipspec/rng.hpp"

using namespace bipspec;

namespace {

BipartiteGraph graph_from_mask(Index m, Index n, std::uint64_t mask)
{
    Biadjacency x(m, n);
    for (Index c = 0; c < m * n; ++c)
        x(c / n, c % n) = (mask >> c) & 1U;
    return BipartiteGraph(x);
}

// Every degree sequence realized by some spanning subgraph, by enumerating
// edge subsets. Only for tiny graphs.
std::set<std::vector<int>> realizable_degrees(const BipartiteGraph& g)
{
    const auto edges = g.edges();
    std::set<std::vector<int>> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << edges.size()); ++mask) {
        std::vector<int> degrees(g.m() + g.n(), 0);
        for (std::size_t e = 0; e < edges.size(); ++e)
            if ((mask >> e) & 1U) {
                ++degrees[edges[e].left];
                ++degrees[g.m() + edges[e].right];
            }
        out.insert(degrees);
    }
    return out;
}

std::vector<int> concat(const FactorSpec& spec)
{
    std::vector<int> all = spec.left;
    all.insert(all.end(), spec.right.begin(), spec.right.end());
    return all;
}

void check_is_factor(const BipartiteGraph& g, const FactorSpec& spec, const BipartiteGraph& h)
{
    REQUIRE(h.m() == g.m());
    REQUIRE(h.n() == g.n());
    for (const auto& e : h.edges())
        REQUIRE(g.has_edge(e.left, e.right));
    for (Index u = 0; u < g.m(); ++u)
        REQUIRE(h.left_degrees()[u] == spec.left[u]);
    for (Index v = 0; v < g.n(); ++v)
        REQUIRE(h.right_degrees()[v] == spec.right[v]);
}

} // namespace

TEST_CASE("small factor examples")
{
    const auto c4 = BipartiteGraph::from_edges(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(ore_ryser_check(c4, FactorSpec::constant(2, 2, 1, 1)));
    CHECK(find_f_factor(c4, FactorSpec::constant(2, 2, 1, 1)));
    CHECK(regular_factor_check(BipartiteGraph::complete(2, 2), 2, 2));

    const auto k23 = BipartiteGraph::complete(2, 3);
    const auto found = find_f_factor(k23, FactorSpec::constant(2, 3, 3, 2));
    REQUIRE(found);
    CHECK(*found.factor == k23);

    const auto path = BipartiteGraph::from_edges(2, 2, {{0, 0}, {1, 0}, {1, 1}});
    CHECK_FALSE(ore_ryser_check(path, FactorSpec::constant(2, 2, 2, 2)));
    CHECK(find_f_factor(path, FactorSpec::constant(2, 2, 2, 2)).reason == FactorReason::infeasible);
    CHECK(find_f_factor(path, FactorSpec::constant(2, 2, 1, 1)));
}

TEST_CASE("unbalanced demands: subset condition holds but no factor exists")
{
    const auto star = BipartiteGraph::complete(1, 3);
    const auto spec = FactorSpec::constant(1, 3, 1, 1);
    CHECK_FALSE(spec.balanced());
    CHECK(ore_ryser_condition(star, spec));
    CHECK_FALSE(ore_ryser_check(star, spec));
    const auto result = find_f_factor(star, spec);
    CHECK_FALSE(result);
    CHECK(result.reason == FactorReason::unbalanced);
    CHECK(to_string(result.reason) == "unbalanced");
    try {
        regular_factor_check(star, 1, 1);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.reason() == "unbalanced");
    }
}

TEST_CASE("argument validation")
{
    const auto g = BipartiteGraph::complete(2, 2);
    CHECK_THROWS_AS(ore_ryser_check(g, FactorSpec::constant(3, 2, 1, 1)), DomainError);
    CHECK_THROWS_AS(find_f_factor(g, FactorSpec::constant(2, 1, 1, 1)), DomainError);
    CHECK_THROWS_AS(find_f_factor(g, {{-1, 1}, {0, 0}}), DomainError);
    CHECK_THROWS_AS(regular_factor_check(g, -1, -1), DomainError);
    const auto big = BipartiteGraph::complete(23, 2);
    CHECK_THROWS_AS(ore_ryser_condition(big, FactorSpec::constant(23, 2, 0, 0)), CapacityError);
    CHECK_NOTHROW(find_f_factor(big, FactorSpec::constant(23, 2, 0, 0)));
}

TEST_CASE("exhaustive agreement on graphs up to 3+3 vertices")
{
    long long compared = 0;
    for (Index m = 1; m <= 3; ++m)
        for (Index n = 1; n <= 3; ++n)
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (m * n)); ++mask) {
                const auto g = graph_from_mask(m, n, mask);
                const auto realizable = realizable_degrees(g);
                // Demands range over 0..(other side size).
                const int slots = static_cast<int>(m + n);
                std::vector<int> bounds(slots);
                for (int k = 0; k < slots; ++k)
                    bounds[k] = static_cast<int>(k < m ? n : m);
                std::vector<int> f(slots, 0);
                while (true) {
                    FactorSpec spec{{f.begin(), f.begin() + m}, {f.begin() + m, f.end()}};
                    const bool truth = realizable.contains(f);
                    const auto result = find_f_factor(g, spec);
                    REQUIRE(static_cast<bool>(result) == truth);
                    REQUIRE(ore_ryser_check(g, spec) == truth);
                    if (result)
                        check_is_factor(g, spec, *result.factor);
                    else
                        REQUIRE(result.reason == (spec.balanced() ? FactorReason::infeasible : FactorReason::unbalanced));
                    ++compared;
                    int k = 0;
                    while (k < slots && ++f[k] > bounds[k])
                        f[k++] = 0;
                    if (k == slots)
                        break;
                }
            }
    CHECK(compared > 1000000);
}

TEST_CASE("flow and subset condition agree on every 4+4 graph")
{
    std::mt19937_64 rng(31);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << 16); ++mask) {
        const auto g = graph_from_mask(4, 4, mask);
        for (int x = 0; x <= 4; ++x) {
            const auto spec = FactorSpec::constant(4, 4, x, x);
            REQUIRE(static_cast<bool>(find_f_factor(g, spec)) == ore_ryser_check(g, spec));
        }
        // A random balanced demand: right side is a random split of the left total.
        std::uniform_int_distribution<int> demand(0, 4);
        FactorSpec spec{std::vector<int>(4), std::vector<int>(4, 0)};
        for (auto& d : spec.left)
            d = demand(rng);
        long long remaining = spec.left_total();
        std::uniform_int_distribution<int> slot(0, 3);
        while (remaining > 0) {
            auto& d = spec.right[slot(rng)];
            if (d < 4) {
                ++d;
                --remaining;
            }
        }
        const auto result = find_f_factor(g, spec);
        REQUIRE(static_cast<bool>(result) == ore_ryser_check(g, spec));
        if (result)
            check_is_factor(g, spec, *result.factor);
    }
}

TEST_CASE("adding an edge never destroys a factor")
{
    Rng rng = make_rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const Index m = 2 + static_cast<Index>(uniform_index(rng, 5));
        const Index n = 2 + static_cast<Index>(uniform_index(rng, 5));
        auto g = sample_er(m, n, 0.5, derive_seed(77, trial));
        const int x = static_cast<int>(uniform_index(rng, n + 1));
        if ((m * x) % n != 0)
            continue;
        const int y = static_cast<int>(m * x / n);
        bool had = regular_factor_check(g, x, y);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < n; ++j) {
                g = g.with_edge(i, j);
                const bool has = regular_factor_check(g, x, y);
                REQUIRE((!had || has));
                had = has;
            }
        CHECK(had == (x <= static_cast<int>(n)));
    }
}

TEST_CASE("regular graphs contain their own degrees as a factor")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const DegreeSpec spec{4, 8};
        const auto g = sample_regular(20, 10, spec, seed);
        CHECK(regular_factor_check(g, 4, 8));
        CHECK(regular_factor_check(g, 0, 0));
        CHECK_FALSE(regular_factor_check(g, 5, 10));
        const auto found = find_f_factor(g, FactorSpec::constant(20, 10, 2, 4));
        REQUIRE(found);
        check_is_factor(g, FactorSpec::constant(20, 10, 2, 4), *found.factor);
    }
}

TEST_CASE("flow agrees with the subset condition on induced subgraphs of G(40, 40, 1/2)")
{
    const auto g = sample_er(40, 40, 0.5, 2024);
    Rng rng = make_rng(2025);
    std::vector<Index> left(40), right(40);
    std::iota(left.begin(), left.end(), 0);
    std::iota(right.begin(), right.end(), 0);
    int with_factor = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::shuffle(left.begin(), left.end(), rng);
        std::shuffle(right.begin(), right.end(), rng);
        Biadjacency x(6, 6);
        for (Index i = 0; i < 6; ++i)
            for (Index j = 0; j < 6; ++j)
                x(i, j) = g.biadjacency()(left[i], right[j]);
        const BipartiteGraph sub(x);
        for (int d = 1; d <= 4; ++d) {
            const bool flow = regular_factor_check(sub, d, d);
            REQUIRE(flow == ore_ryser_check(sub, FactorSpec::constant(6, 6, d, d)));
            with_factor += flow;
        }
    }
    CHECK(with_factor > 0);
    CHECK(with_factor < 800);
    CHECK(regular_factor_check(g, 10, 10));
}

TEST_CASE("max-flow on a textbook network")
{
    // Classic 6-node network with max flow 23.
    MaxFlow flow(6);
    flow.add_arc(0, 1, 16);
    flow.add_arc(0, 2, 13);
    flow.add_arc(1, 2, 10);
    flow.add_arc(2, 1, 4);
    const int a13 = flow.add_arc(1, 3, 12);
    flow.add_arc(3, 2, 9);
    flow.add_arc(2, 4, 14);
    flow.add_arc(4, 3, 7);
    flow.add_arc(3, 5, 20);
    flow.add_arc(4, 5, 4);
    CHECK(flow.run(0, 5) == 23);
    CHECK(flow.flow_on(a13) == 12);
}
