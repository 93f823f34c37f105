#include "bipspec/factors.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

namespace bipspec {

long long FactorSpec::left_total() const
{
    return std::accumulate(left.begin(), left.end(), 0LL);
}

long long FactorSpec::right_total() const
{
    return std::accumulate(right.begin(), right.end(), 0LL);
}

std::string_view to_string(FactorReason reason)
{
    switch (reason) {
    case FactorReason::found:
        return "found";
    case FactorReason::unbalanced:
        return "unbalanced";
    case FactorReason::infeasible:
        return "infeasible";
    }
    return "unknown";
}

namespace {

void require_shape(const BipartiteGraph& g, const FactorSpec& spec)
{
    if (static_cast<Index>(spec.left.size()) != g.m() || static_cast<Index>(spec.right.size()) != g.n())
        throw DomainError("factor spec sizes must match the graph (" + std::to_string(g.m()) + " left, " +
                          std::to_string(g.n()) + " right)");
    auto negative = [](int f) { return f < 0; };
    if (std::ranges::any_of(spec.left, negative) || std::ranges::any_of(spec.right, negative))
        throw DomainError("factor demands must be non-negative");
}

} // namespace

bool ore_ryser_condition(const BipartiteGraph& g, const FactorSpec& spec)
{
    require_shape(g, spec);
    const Index m = g.m();
    const Index n = g.n();
    if (m > kOreRyserMaxLeft)
        throw CapacityError("ore_ryser_check enumerates 2^m subsets; m = " + std::to_string(m) + " exceeds " +
                            std::to_string(kOreRyserMaxLeft) + ", use find_f_factor instead");

    // Gray-code walk over subsets: d_S(v) and f(S) are updated one vertex at a time.
    std::vector<int> d_s(n, 0);
    long long demand = 0;
    const std::uint64_t subsets = std::uint64_t{1} << m;
    std::uint64_t previous = 0;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        const std::uint64_t gray = k ^ (k >> 1);
        const std::uint64_t flipped = gray ^ previous;
        const Index u = std::countr_zero(flipped);
        const int sign = (gray & flipped) ? 1 : -1;
        demand += sign * spec.left[u];
        for (Index v = 0; v < n; ++v)
            if (g.has_edge(u, v))
                d_s[v] += sign;
        previous = gray;

        long long supply = 0;
        for (Index v = 0; v < n; ++v)
            supply += std::min(spec.right[v], d_s[v]);
        if (supply < demand)
            return false;
    }
    return true;
}

bool ore_ryser_check(const BipartiteGraph& g, const FactorSpec& spec)
{
    require_shape(g, spec);
    return spec.balanced() && ore_ryser_condition(g, spec);
}

FactorResult find_f_factor(const BipartiteGraph& g, const FactorSpec& spec)
{
    require_shape(g, spec);
    if (!spec.balanced())
        return {std::nullopt, FactorReason::unbalanced};

    const Index m = g.m();
    const Index n = g.n();
    const int source = 0;
    const int sink = static_cast<int>(m + n + 1);
    auto left_node = [](Index u) { return static_cast<int>(1 + u); };
    auto right_node = [m](Index v) { return static_cast<int>(1 + m + v); };

    MaxFlow flow(static_cast<int>(m + n + 2));
    for (Index u = 0; u < m; ++u)
        flow.add_arc(source, left_node(u), spec.left[u]);
    std::vector<std::pair<Edge, int>> edge_arcs;
    for (const auto& e : g.edges())
        edge_arcs.emplace_back(e, flow.add_arc(left_node(e.left), right_node(e.right), 1));
    for (Index v = 0; v < n; ++v)
        flow.add_arc(right_node(v), sink, spec.right[v]);

    if (flow.run(source, sink) != spec.left_total())
        return {std::nullopt, FactorReason::infeasible};

    std::vector<Edge> chosen;
    for (const auto& [e, arc] : edge_arcs)
        if (flow.flow_on(arc) > 0)
            chosen.push_back(e);
    return {BipartiteGraph::from_edges(m, n, chosen), FactorReason::found};
}

bool regular_factor_check(const BipartiteGraph& g, int x, int y)
{
    if (g.m() * x != g.n() * y)
        throw InfeasibleError("unbalanced", "(x, y)-regular factor needs m*x == n*y; got " + std::to_string(g.m()) +
                                                "*" + std::to_string(x) + " != " + std::to_string(g.n()) + "*" +
                                                std::to_string(y));
    if (x < 0 || y < 0)
        throw DomainError("factor demands must be non-negative");
    return find_f_factor(g, FactorSpec::constant(g.m(), g.n(), x, y)).factor.has_value();
}

MaxFlow::MaxFlow(int nodes) : out_(nodes), level_(nodes), cursor_(nodes) {}

int MaxFlow::add_arc(int from, int to, long long capacity)
{
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, capacity, 0});
    out_[from].push_back(id);
    arcs_.push_back({from, 0, 0});
    out_[to].push_back(id + 1);
    return id;
}

bool MaxFlow::build_levels(int source, int sink)
{
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> frontier;
    level_[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
        const int node = frontier.front();
        frontier.pop();
        for (int id : out_[node]) {
            const Arc& arc = arcs_[id];
            if (arc.flow < arc.capacity && level_[arc.to] < 0) {
                level_[arc.to] = level_[node] + 1;
                frontier.push(arc.to);
            }
        }
    }
    return level_[sink] >= 0;
}

long long MaxFlow::push(int node, int sink, long long limit)
{
    if (node == sink)
        return limit;
    for (auto& i = cursor_[node]; i < out_[node].size(); ++i) {
        const int id = out_[node][i];
        Arc& arc = arcs_[id];
        if (arc.flow >= arc.capacity || level_[arc.to] != level_[node] + 1)
            continue;
        const long long pushed = push(arc.to, sink, std::min(limit, arc.capacity - arc.flow));
        if (pushed > 0) {
            arc.flow += pushed;
            arcs_[id ^ 1].flow -= pushed;
            return pushed;
        }
    }
    return 0;
}

long long MaxFlow::run(int source, int sink)
{
    long long total = 0;
    while (build_levels(source, sink)) {
        std::fill(cursor_.begin(), cursor_.end(), 0);
        while (const long long pushed = push(source, sink, std::numeric_limits<long long>::max()))
            total += pushed;
    }
    return total;
}

} // namespace bipspec
