#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "bipspec/graphs.hpp"

namespace bipspec {

/// Degree demands for an f-factor: one entry per left vertex, one per right vertex.
struct FactorSpec {
    std::vector<int> left;
    std::vector<int> right;

    static FactorSpec constant(Index m, Index n, int x, int y)
    {
        return {std::vector<int>(m, x), std::vector<int>(n, y)};
    }

    long long left_total() const;
    long long right_total() const;
    bool balanced() const { return left_total() == right_total(); }
};

enum class FactorReason { found, unbalanced, infeasible };

std::string_view to_string(FactorReason reason);

struct FactorResult {
    std::optional<BipartiteGraph> factor;
    FactorReason reason = FactorReason::infeasible;

    explicit operator bool() const { return factor.has_value(); }
};

/// Largest left side accepted by the exhaustive subset enumeration.
inline constexpr Index kOreRyserMaxLeft = 22;

/// The subset condition alone: for every S of the left side,
/// sum_{v in B} min(f(v), d_S(v)) >= sum_{u in S} f(u).
/// Throws CapacityError when m exceeds kOreRyserMaxLeft.
bool ore_ryser_condition(const BipartiteGraph& g, const FactorSpec& spec);

/// Balance plus the subset condition: equivalent to the existence of an f-factor.
bool ore_ryser_check(const BipartiteGraph& g, const FactorSpec& spec);

/// f-factor by max-flow: source -> u (capacity f(u)), u -> v per edge
/// (capacity 1), v -> sink (capacity f(v)). Deterministic: augmenting paths
/// prefer lower vertex indices.
FactorResult find_f_factor(const BipartiteGraph& g, const FactorSpec& spec);

/// (x, y)-regular factor existence. Throws InfeasibleError("unbalanced") unless m*x == n*y.
bool regular_factor_check(const BipartiteGraph& g, int x, int y);

/// Dinic's blocking-flow max-flow over integer capacities.
class MaxFlow {
public:
    explicit MaxFlow(int nodes);

    /// Returns the arc id, usable with flow_on().
    int add_arc(int from, int to, long long capacity);
    long long run(int source, int sink);
    long long flow_on(int arc) const { return arcs_[arc].flow; }

private:
    struct Arc {
        int to;
        long long capacity;
        long long flow;
    };

    bool build_levels(int source, int sink);
    long long push(int node, int sink, long long limit);

    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> out_;
    std::vector<int> level_;
    std::vector<std::size_t> cursor_;
};

} // namespace bipspec
