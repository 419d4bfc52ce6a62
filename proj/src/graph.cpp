#include "secmatch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "secmatch/blossom.hpp"
#include "secmatch/errors.hpp"
#include "secmatch/positive_matching.hpp"

namespace secmatch {

WeightedGraph::WeightedGraph(std::size_t n) : n_(n), w_(n * n, 0.0), nbrs_(n) {}

WeightedGraph WeightedGraph::from_edges(std::size_t n, std::span<const WeightedEdge> edges) {
    WeightedGraph g(n);
    std::vector<bool> seen(n * n, false);
    for (const auto& e : edges) {
        if (e.edge.u == e.edge.v) throw InputError("self-loop at vertex " + std::to_string(e.edge.u));
        if (e.edge.v >= n) throw InputError("vertex id " + std::to_string(e.edge.v) + " out of range");
        const std::size_t idx = static_cast<std::size_t>(e.edge.u) * n + e.edge.v;
        if (seen[idx])
            throw InputError("duplicate edge " + std::to_string(e.edge.u) + "-" + std::to_string(e.edge.v));
        seen[idx] = true;
        g.set_weight(e.edge.u, e.edge.v, e.weight);
    }
    return g;
}

double WeightedGraph::weight(Vertex u, Vertex v) const {
    if (u >= n_ || v >= n_) throw InputError("vertex id out of range");
    return w_[static_cast<std::size_t>(u) * n_ + v];
}

void WeightedGraph::set_weight(Vertex u, Vertex v, double w) {
    if (u >= n_ || v >= n_) throw InputError("vertex id out of range");
    if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
    if (!std::isfinite(w) || w < 0.0) throw InputError("edge weights must be finite and nonnegative");
    const double old = w_[static_cast<std::size_t>(u) * n_ + v];
    w_[static_cast<std::size_t>(u) * n_ + v] = w;
    w_[static_cast<std::size_t>(v) * n_ + u] = w;
    auto link = [&](Vertex a, Vertex b) {
        auto& list = nbrs_[a];
        auto it = std::lower_bound(list.begin(), list.end(), b);
        if (w > 0.0 && (it == list.end() || *it != b)) list.insert(it, b);
        if (w == 0.0 && it != list.end() && *it == b) list.erase(it);
    };
    if ((old > 0.0) != (w > 0.0)) {
        link(u, v);
        link(v, u);
    }
}

std::vector<WeightedEdge> WeightedGraph::positive_edges() const {
    std::vector<WeightedEdge> out;
    for (Vertex u = 0; u < n_; ++u)
        for (Vertex v : nbrs_[u])
            if (u < v) out.push_back({Edge(u, v), weight(u, v)});
    return out;
}

WeightedGraph WeightedGraph::with_isolated(std::size_t extra) const {
    WeightedGraph g(n_ + extra);
    for (const auto& e : positive_edges()) g.set_weight(e.edge.u, e.edge.v, e.weight);
    return g;
}

Matching::Matching(std::vector<Edge> edges) : edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    mate_.reserve(2 * edges_.size());
    for (const auto& e : edges_) {
        mate_.emplace_back(e.u, e.v);
        mate_.emplace_back(e.v, e.u);
    }
    std::sort(mate_.begin(), mate_.end());
    for (std::size_t i = 1; i < mate_.size(); ++i)
        if (mate_[i].first == mate_[i - 1].first)
            throw InputError("matching edges share vertex " + std::to_string(mate_[i].first));
}

bool Matching::contains(Edge e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }

std::optional<Vertex> Matching::partner(Vertex v) const {
    auto it = std::lower_bound(mate_.begin(), mate_.end(), std::pair<Vertex, Vertex>(v, 0));
    if (it == mate_.end() || it->first != v) return std::nullopt;
    return it->second;
}

VertexSubset::VertexSubset(std::vector<Vertex> ids) : ids_(std::move(ids)) {
    auto s = sorted();
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw InputError("vertex subset has duplicate ids");
}

VertexSubset VertexSubset::all(std::size_t n) {
    std::vector<Vertex> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<Vertex>(i);
    VertexSubset s;
    s.ids_ = std::move(ids);
    return s;
}

bool VertexSubset::contains(Vertex v) const { return std::find(ids_.begin(), ids_.end(), v) != ids_.end(); }

void VertexSubset::check_against(std::size_t n) const {
    for (Vertex v : ids_)
        if (v >= n) throw InputError("vertex id " + std::to_string(v) + " out of range for n=" + std::to_string(n));
}

std::vector<Vertex> VertexSubset::sorted() const {
    std::vector<Vertex> s = ids_;
    std::sort(s.begin(), s.end());
    return s;
}

namespace {

// Pairs the vertices of `sorted_ids` not covered by `pairs` in ascending order.
void complete_with_zero_pairs(std::span<const Vertex> sorted_ids, std::vector<Edge>& pairs) {
    std::vector<Vertex> covered;
    covered.reserve(2 * pairs.size());
    for (const auto& e : pairs) {
        covered.push_back(e.u);
        covered.push_back(e.v);
    }
    std::sort(covered.begin(), covered.end());
    std::optional<Vertex> pending;
    for (Vertex v : sorted_ids) {
        if (std::binary_search(covered.begin(), covered.end(), v)) continue;
        if (pending) {
            pairs.emplace_back(*pending, v);
            pending.reset();
        } else {
            pending = v;
        }
    }
}

}  // namespace

Matching max_weight_matching(const WeightedGraph& g, const VertexSubset& t) {
    t.check_against(g.size());
    const auto ids = t.sorted();
    auto pairs = detail::positive_max_matching(g, ids);
    complete_with_zero_pairs(ids, pairs);
    return Matching(std::move(pairs));
}

Matching greedy_matching(const WeightedGraph& g, const VertexSubset& t) {
    t.check_against(g.size());
    const auto ids = t.sorted();
    auto pairs = detail::positive_greedy_matching(g, ids);
    complete_with_zero_pairs(ids, pairs);
    return Matching(std::move(pairs));
}

namespace detail {

std::vector<Edge> positive_greedy_matching(const WeightedGraph& g, std::span<const Vertex> sorted_ids) {
    std::vector<WeightedEdge> candidates;
    std::vector<bool> in_set(g.size(), false);
    for (Vertex v : sorted_ids) in_set[v] = true;
    for (Vertex u : sorted_ids)
        for (Vertex v : g.positive_neighbors(u))
            if (u < v && in_set[v]) candidates.push_back({Edge(u, v), g.weight(u, v)});
    std::sort(candidates.begin(), candidates.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.edge < b.edge;
    });
    std::vector<bool> used(g.size(), false);
    std::vector<Edge> pairs;
    for (const auto& c : candidates) {
        if (used[c.edge.u] || used[c.edge.v]) continue;
        used[c.edge.u] = used[c.edge.v] = true;
        pairs.push_back(c.edge);
    }
    return pairs;
}

}  // namespace detail

Matching restrict_matching(const Matching& mu, const VertexSubset& t) {
    std::vector<Edge> kept;
    for (const auto& e : mu.edges())
        if (t.contains(e.u) && t.contains(e.v)) kept.push_back(e);
    return Matching(std::move(kept));
}

double matching_weight(const Matching& mu, const WeightedGraph& g) {
    double total = 0.0;
    for (const auto& e : mu.edges()) total += g.weight(e);
    return total;
}

Matching max_weight_matching_of_edges(std::span<const WeightedEdge> edges) {
    std::vector<Vertex> ids;
    for (const auto& e : edges) {
        ids.push_back(e.edge.u);
        ids.push_back(e.edge.v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    auto local = [&](Vertex v) {
        return static_cast<int>(std::lower_bound(ids.begin(), ids.end(), v) - ids.begin());
    };
    std::vector<blossom::WeightedPair> pairs;
    for (const auto& e : edges) {
        if (e.edge.u == e.edge.v) throw InputError("self-loop in edge list");
        if (e.weight > 0.0) pairs.push_back({local(e.edge.u), local(e.edge.v), e.weight});
    }
    const auto sol = blossom::solve(static_cast<int>(ids.size()), pairs);
    std::vector<Edge> out;
    for (std::size_t i = 0; i < sol.mate.size(); ++i)
        if (sol.mate[i] > static_cast<int>(i)) out.emplace_back(ids[i], ids[sol.mate[i]]);
    return Matching(std::move(out));
}

WeightedGraph graph_from_json(const nlohmann::json& j) {
    try {
        const auto n = j.at("n").get<std::int64_t>();
        if (n <= 0) throw InputError("graph n must be positive");
        std::vector<WeightedEdge> edges;
        for (const auto& row : j.at("edges")) {
            if (!row.is_array() || row.size() != 3) throw InputError("edge entries must be [u, v, w]");
            const auto u = row[0].get<std::int64_t>();
            const auto v = row[1].get<std::int64_t>();
            if (u < 0 || v < 0 || u >= n || v >= n) throw InputError("edge endpoint out of range");
            edges.push_back({Edge(static_cast<Vertex>(u), static_cast<Vertex>(v)), row[2].get<double>()});
            if (u == v) throw InputError("self-loop at vertex " + std::to_string(u));
        }
        return WeightedGraph::from_edges(static_cast<std::size_t>(n), edges);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed graph JSON: ") + e.what());
    }
}

nlohmann::json graph_to_json(const WeightedGraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.positive_edges()) edges.push_back({e.edge.u, e.edge.v, e.weight});
    return {{"n", g.size()}, {"edges", edges}};
}

WeightedGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open graph file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    return graph_from_json(j);
}

nlohmann::json matching_to_json(const Matching& mu) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : mu.edges()) out.push_back({e.u, e.v});
    return out;
}

}  // namespace secmatch
