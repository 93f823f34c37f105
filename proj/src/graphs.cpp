#include "bipspec/graphs.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bipspec/rng.hpp"

namespace bipspec {

BipartiteGraph::BipartiteGraph(Index m, Index n)
{
    if (m < 1 || n < 1)
        throw DomainError("bipartite graph needs m >= 1 and n >= 1");
    x_ = Biadjacency::Zero(m, n);
}

BipartiteGraph::BipartiteGraph(Biadjacency biadjacency) : x_(std::move(biadjacency))
{
    if (x_.rows() < 1 || x_.cols() < 1)
        throw DomainError("bipartite graph needs m >= 1 and n >= 1");
    if ((x_.array() > 1).any())
        throw DomainError("biadjacency entries must be 0 or 1");
}

BipartiteGraph BipartiteGraph::from_edges(Index m, Index n, const std::vector<Edge>& edges)
{
    BipartiteGraph g(m, n);
    for (const auto& e : edges) {
        if (e.left < 0 || e.left >= m || e.right < 0 || e.right >= n)
            throw DomainError("edge endpoint out of range");
        g.x_(e.left, e.right) = 1;
    }
    return g;
}

BipartiteGraph BipartiteGraph::complete(Index m, Index n)
{
    BipartiteGraph g(m, n);
    g.x_.setOnes();
    return g;
}

Index BipartiteGraph::edge_count() const
{
    return x_.cast<Index>().sum();
}

Eigen::VectorXi BipartiteGraph::left_degrees() const
{
    return x_.cast<int>().rowwise().sum();
}

Eigen::VectorXi BipartiteGraph::right_degrees() const
{
    return x_.cast<int>().colwise().sum().transpose();
}

std::vector<Edge> BipartiteGraph::edges() const
{
    std::vector<Edge> out;
    for (Index i = 0; i < m(); ++i)
        for (Index j = 0; j < n(); ++j)
            if (x_(i, j))
                out.push_back({i, j});
    return out;
}

BipartiteGraph BipartiteGraph::with_edge(Index i, Index j) const
{
    BipartiteGraph g = *this;
    g.x_(i, j) = 1;
    return g;
}

BipartiteGraph BipartiteGraph::without_edge(Index i, Index j) const
{
    BipartiteGraph g = *this;
    g.x_(i, j) = 0;
    return g;
}

void require_feasible(Index m, Index n, const DegreeSpec& spec)
{
    if (m < 1 || n < 1)
        throw InfeasibleError("infeasible", "degree spec needs m >= 1 and n >= 1");
    if (spec.dL < 0 || spec.dL > n || spec.dR < 0 || spec.dR > m) {
        std::ostringstream msg;
        msg << "degree spec (" << spec.dL << ", " << spec.dR << ") out of range for m=" << m << ", n=" << n;
        throw InfeasibleError("infeasible", msg.str());
    }
    if (m * spec.dL != n * spec.dR) {
        std::ostringstream msg;
        msg << "degree spec violates m*dL == n*dR: " << m << "*" << spec.dL << " != " << n << "*" << spec.dR;
        throw InfeasibleError("infeasible", msg.str());
    }
}

std::uint64_t default_mixing_steps(Index m, const DegreeSpec& spec)
{
    const double edges = static_cast<double>(m) * static_cast<double>(spec.dL);
    if (edges < 2.0)
        return 0;
    return static_cast<std::uint64_t>(std::ceil(10.0 * edges * std::log(edges)));
}

BipartiteGraph sample_er(Index m, Index n, double p, std::uint64_t seed)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("edge probability must lie in [0, 1]");
    Rng rng = make_rng(seed);
    Biadjacency x(m, n);
    // Row-major fill so the edge stream does not depend on storage order.
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j)
            x(i, j) = bernoulli(rng, p) ? 1 : 0;
    return BipartiteGraph(std::move(x));
}

BipartiteGraph circulant_regular(Index m, Index n, const DegreeSpec& spec)
{
    require_feasible(m, n, spec);
    Biadjacency x = Biadjacency::Zero(m, n);
    // Positions 0 .. m*dL-1 taken mod n hit every column exactly dR times,
    // and any dL consecutive positions are distinct because dL <= n.
    for (Index i = 0; i < m; ++i)
        for (Index k = 0; k < spec.dL; ++k)
            x(i, (i * spec.dL + k) % n) = 1;
    return BipartiteGraph(std::move(x));
}

namespace {

#ifndef NDEBUG
void assert_switch_preserved(const Biadjacency& x, Index u1, Index u2, Index v1, Index v2, const DegreeSpec& spec)
{
    for (Index u : {u1, u2})
        if (x.row(u).cast<Index>().sum() != spec.dL)
            throw std::logic_error("switch changed a left degree");
    for (Index v : {v1, v2})
        if (x.col(v).cast<Index>().sum() != spec.dR)
            throw std::logic_error("switch changed a right degree");
}
#endif

} // namespace

BipartiteGraph sample_regular(Index m, Index n, const DegreeSpec& spec, std::uint64_t seed,
                              std::optional<std::uint64_t> mixing_steps)
{
    BipartiteGraph start = circulant_regular(m, n, spec);
    const std::uint64_t steps = mixing_steps.value_or(default_mixing_steps(m, spec));
    std::vector<Edge> edges = start.edges();
    if (edges.size() < 2 || steps == 0)
        return start;

    Biadjacency x = start.biadjacency();
    Rng rng = make_rng(seed);
    const std::uint64_t count = edges.size();
    // Pick an ordered pair of edges (u1,v1), (u2,v2); if (u1,v2) and (u2,v1)
    // are both absent, rewire to them. Rejected proposals are lazy steps, so
    // the chain is symmetric and its stationary law is uniform.
    for (std::uint64_t step = 0; step < steps; ++step) {
        const auto e1 = uniform_index(rng, count);
        const auto e2 = uniform_index(rng, count);
        const auto [u1, v1] = edges[e1];
        const auto [u2, v2] = edges[e2];
        if (u1 == u2 || v1 == v2 || x(u1, v2) || x(u2, v1))
            continue;
        x(u1, v1) = 0;
        x(u2, v2) = 0;
        x(u1, v2) = 1;
        x(u2, v1) = 1;
        edges[e1] = {u1, v2};
        edges[e2] = {u2, v1};
#ifndef NDEBUG
        assert_switch_preserved(x, u1, u2, v1, v2, spec);
#endif
    }
    return BipartiteGraph(std::move(x));
}

bool is_regular(const BipartiteGraph& g, const DegreeSpec& spec)
{
    return (g.left_degrees().array() == spec.dL).all() && (g.right_degrees().array() == spec.dR).all();
}

double er_entry_bound(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("entry bound requires 0 < p < 1");
    return std::max(p, 1.0 - p) / std::sqrt(p * (1.0 - p));
}

void write_edge_list(std::ostream& out, const BipartiteGraph& g)
{
    out << g.m() << ' ' << g.n() << '\n';
    for (const auto& e : g.edges())
        out << e.left << ' ' << e.right << '\n';
}

void write_edge_list(const std::string& path, const BipartiteGraph& g)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    write_edge_list(out, g);
    if (!out)
        throw std::runtime_error("write to " + path + " failed");
}

namespace {

// Parses two non-negative decimal integers separated by a single space;
// signs, blanks and trailing text are rejected.
bool parse_pair(const std::string& line, long long& first, long long& second)
{
    std::size_t pos = 0;
    auto number = [&](long long& out) {
        const std::size_t start = pos;
        out = 0;
        while (pos < line.size() && line[pos] >= '0' && line[pos] <= '9') {
            if (out > (std::numeric_limits<long long>::max() - 9) / 10)
                return false;
            out = out * 10 + (line[pos] - '0');
            ++pos;
        }
        return pos > start;
    };
    if (!number(first) || pos >= line.size() || line[pos] != ' ')
        return false;
    ++pos;
    return number(second) && pos == line.size();
}

} // namespace

BipartiteGraph read_edge_list(std::istream& in)
{
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line))
        throw ParseError("missing 'm n' header", 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r')
        throw ParseError("CR line endings are not accepted", lineno);
    long long m = 0;
    long long n = 0;
    if (!parse_pair(line, m, n))
        throw ParseError("expected header 'm n', got '" + line + "'", lineno);
    if (m < 1 || n < 1)
        throw ParseError("header requires m >= 1 and n >= 1", lineno);

    Biadjacency x = Biadjacency::Zero(m, n);
    while (std::getline(in, line)) {
        ++lineno;
        long long i = 0;
        long long j = 0;
        if (!parse_pair(line, i, j))
            throw ParseError("expected edge 'i j', got '" + line + "'", lineno);
        if (i >= m || j >= n)
            throw ParseError("edge (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range", lineno);
        if (x(i, j))
            throw ParseError("duplicate edge (" + std::to_string(i) + ", " + std::to_string(j) + ")", lineno);
        x(i, j) = 1;
    }
    return BipartiteGraph(std::move(x));
}

BipartiteGraph read_edge_list(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return read_edge_list(in);
}

} // namespace bipspec
