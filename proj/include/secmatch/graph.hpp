#pragma once

// Weighted general graphs and the matching primitives every arrival model
// builds on. Absent pairs weigh 0, so any even vertex set has a perfect
// maximum-weight matching obtained by completing with zero-weight pairs.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace secmatch {

using Vertex = std::uint32_t;

/// Unordered vertex pair, stored with u < v.
struct Edge {
    Vertex u = 0;
    Vertex v = 0;

    Edge() = default;
    Edge(Vertex a, Vertex b) : u(a < b ? a : b), v(a < b ? b : a) {}

    bool touches(Vertex x) const noexcept { return u == x || v == x; }
    Vertex other(Vertex x) const noexcept { return x == u ? v : u; }
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct WeightedEdge {
    Edge edge;
    double weight = 0.0;
};

class WeightedGraph {
public:
    WeightedGraph() = default;
    explicit WeightedGraph(std::size_t n);

    /// Rejects self-loops, duplicates, out-of-range ids and negative or
    /// non-finite weights.
    static WeightedGraph from_edges(std::size_t n, std::span<const WeightedEdge> edges);

    std::size_t size() const noexcept { return n_; }
    double weight(Vertex u, Vertex v) const;
    double weight(Edge e) const { return weight(e.u, e.v); }
    void set_weight(Vertex u, Vertex v, double w);

    /// Neighbours joined by a strictly positive weight, ascending.
    std::span<const Vertex> positive_neighbors(Vertex v) const { return nbrs_.at(v); }
    /// All strictly positive edges in lexicographic order.
    std::vector<WeightedEdge> positive_edges() const;

    /// Same graph plus `extra` isolated vertices appended after the originals.
    WeightedGraph with_isolated(std::size_t extra) const;

private:
    std::size_t n_ = 0;
    std::vector<double> w_;
    std::vector<std::vector<Vertex>> nbrs_;
};

/// A set of vertex-disjoint pairs with partner lookup.
class Matching {
public:
    Matching() = default;
    /// Throws InputError when two edges share a vertex.
    explicit Matching(std::vector<Edge> edges);

    std::span<const Edge> edges() const noexcept { return edges_; }
    std::size_t size() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return edges_.empty(); }
    bool contains(Edge e) const;
    std::optional<Vertex> partner(Vertex v) const;
    bool covers(Vertex v) const { return partner(v).has_value(); }

    friend bool operator==(const Matching&, const Matching&) = default;

private:
    std::vector<Edge> edges_;                     // sorted
    std::vector<std::pair<Vertex, Vertex>> mate_; // sorted by first
};

/// Distinct vertex ids; order is preserved but never affects results.
class VertexSubset {
public:
    VertexSubset() = default;
    explicit VertexSubset(std::vector<Vertex> ids);
    static VertexSubset all(std::size_t n);

    std::span<const Vertex> ids() const noexcept { return ids_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool contains(Vertex v) const;
    /// Throws InputError if any id is >= n.
    void check_against(std::size_t n) const;
    std::vector<Vertex> sorted() const;

private:
    std::vector<Vertex> ids_;
};

/// Exact maximum-weight matching of the subgraph induced by T. The solver
/// works on the strictly positive edges; leftover vertices are then paired
/// in ascending id order with zero-weight edges, so the result is perfect on
/// T whenever |T| is even and depends only on the set T.
Matching max_weight_matching(const WeightedGraph& g, const VertexSubset& t);

/// Repeatedly takes the heaviest remaining positive edge (ties: smaller
/// pair first), then completes with zero-weight pairs like the exact solver.
Matching greedy_matching(const WeightedGraph& g, const VertexSubset& t);

/// Edges of mu with both endpoints in T.
Matching restrict_matching(const Matching& mu, const VertexSubset& t);

double matching_weight(const Matching& mu, const WeightedGraph& g);

/// Maximum-weight matching over an explicit edge list (edge-arrival use: no
/// completion, zero-weight pairs never selected). Vertex ids may be sparse.
Matching max_weight_matching_of_edges(std::span<const WeightedEdge> edges);

// {"n": int, "edges": [[u, v, w], ...]}
WeightedGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const WeightedGraph& g);
WeightedGraph read_graph_file(const std::string& path);
nlohmann::json matching_to_json(const Matching& mu);

}  // namespace secmatch
