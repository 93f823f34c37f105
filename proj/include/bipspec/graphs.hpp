#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bipspec/error.hpp"

namespace bipspec {

using Index = Eigen::Index;
using Biadjacency = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// (m+n) x (m+n) real symmetric matrix; every producer here emits the block
/// form (0 X; X^T 0).
template <typename Scalar = double>
using DenseSymmetric = DenseMatrix<Scalar>;

struct Edge {
    Index left;
    Index right;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Bipartite graph on m left and n right vertices stored as its 0/1
/// biadjacency matrix X (rows are left vertices). Immutable once built.
class BipartiteGraph {
public:
    BipartiteGraph(Index m, Index n);
    explicit BipartiteGraph(Biadjacency biadjacency);

    static BipartiteGraph from_edges(Index m, Index n, const std::vector<Edge>& edges);
    static BipartiteGraph complete(Index m, Index n);

    Index m() const { return x_.rows(); }
    Index n() const { return x_.cols(); }
    const Biadjacency& biadjacency() const { return x_; }
    bool has_edge(Index i, Index j) const { return x_(i, j) != 0; }
    Index edge_count() const;

    Eigen::VectorXi left_degrees() const;
    Eigen::VectorXi right_degrees() const;

    /// Edges in row-major order.
    std::vector<Edge> edges() const;

    BipartiteGraph with_edge(Index i, Index j) const;
    BipartiteGraph without_edge(Index i, Index j) const;

    friend bool operator==(const BipartiteGraph& x, const BipartiteGraph& y)
    {
        return x.x_.rows() == y.x_.rows() && x.x_.cols() == y.x_.cols() && x.x_ == y.x_;
    }

private:
    Biadjacency x_;
};

/// Left degree dL and right degree dR of a biregular graph.
struct DegreeSpec {
    Index dL = 0;
    Index dR = 0;
    friend bool operator==(const DegreeSpec&, const DegreeSpec&) = default;
};

/// Throws InfeasibleError unless m*dL == n*dR, 0 <= dL <= n, 0 <= dR <= m.
void require_feasible(Index m, Index n, const DegreeSpec& spec);

/// Default switch-chain length 10 * m * dL * ln(m * dL).
std::uint64_t default_mixing_steps(Index m, const DegreeSpec& spec);

BipartiteGraph sample_er(Index m, Index n, double p, std::uint64_t seed);

/// Deterministic (dL, dR)-regular witness: left vertex i is joined to right
/// vertices (i*dL + k) mod n for 0 <= k < dL.
BipartiteGraph circulant_regular(Index m, Index n, const DegreeSpec& spec);

/// Approximately uniform (dL, dR)-regular graph: circulant start followed by
/// `mixing_steps` proposals of the alternating-rectangle switch chain.
BipartiteGraph sample_regular(Index m, Index n, const DegreeSpec& spec, std::uint64_t seed,
                              std::optional<std::uint64_t> mixing_steps = std::nullopt);

bool is_regular(const BipartiteGraph& g, const DegreeSpec& spec);

/// Block form (0 X; X^T 0) of an m x n block.
template <typename Derived>
DenseSymmetric<typename Derived::Scalar> block_form(const Eigen::MatrixBase<Derived>& x)
{
    using Scalar = typename Derived::Scalar;
    const Index m = x.rows();
    const Index n = x.cols();
    DenseSymmetric<Scalar> full = DenseSymmetric<Scalar>::Zero(m + n, m + n);
    full.topRightCorner(m, n) = x;
    full.bottomLeftCorner(n, m) = x.transpose();
    return full;
}

/// Upper-right block of the normalized adjacency of a regular graph:
/// (X - (dL/n) J) / sqrt((dL/n)(1 - dL/n)).
template <typename Scalar = double>
DenseMatrix<Scalar> normalized_regular_block(const BipartiteGraph& g, const DegreeSpec& spec)
{
    if (!is_regular(g, spec))
        throw DomainError("normalized_regular requires a (dL, dR)-regular graph");
    if (spec.dL <= 0 || spec.dL >= g.n())
        throw DomainError("normalized_regular requires 0 < dL < n");
    const Scalar density = Scalar(spec.dL) / Scalar(g.n());
    const Scalar inv = Scalar(1) / std::sqrt(density * (Scalar(1) - density));
    const Scalar one_value = (Scalar(1) - density) * inv;
    const Scalar zero_value = -density * inv;
    return g.biadjacency().unaryExpr([=](std::uint8_t e) { return e ? one_value : zero_value; });
}

template <typename Scalar = double>
DenseSymmetric<Scalar> normalized_regular(const BipartiteGraph& g, const DegreeSpec& spec)
{
    return block_form(normalized_regular_block<Scalar>(g, spec));
}

/// Upper-right block of the standardized Erdos-Renyi adjacency:
/// (X - p J) / sqrt(p(1 - p)).
template <typename Scalar = double>
DenseMatrix<Scalar> normalized_er_block(const BipartiteGraph& g, double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("normalized_er requires 0 < p < 1");
    const Scalar inv = Scalar(1) / std::sqrt(Scalar(p) * (Scalar(1) - Scalar(p)));
    const Scalar one_value = (Scalar(1) - Scalar(p)) * inv;
    const Scalar zero_value = -Scalar(p) * inv;
    return g.biadjacency().unaryExpr([=](std::uint8_t e) { return e ? one_value : zero_value; });
}

template <typename Scalar = double>
DenseSymmetric<Scalar> normalized_er(const BipartiteGraph& g, double p)
{
    return block_form(normalized_er_block<Scalar>(g, p));
}

/// Entry bound K of the standardized ER matrix, max(p, 1-p) / sqrt(p(1-p)).
double er_entry_bound(double p);

// Edge-list text format: "m n" header, then one "i j" line per edge
// (0-based, left index first), LF-terminated.
void write_edge_list(std::ostream& out, const BipartiteGraph& g);
void write_edge_list(const std::string& path, const BipartiteGraph& g);
BipartiteGraph read_edge_list(std::istream& in);
BipartiteGraph read_edge_list(const std::string& path);

} // namespace bipspec
