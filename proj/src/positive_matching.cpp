#include "secmatch/positive_matching.hpp"

#include <algorithm>

#include "secmatch/blossom.hpp"

namespace secmatch::detail {

namespace {

constexpr std::size_t kCandidatesPerVertex = 6;

struct LocalProblem {
    std::vector<Vertex> vertices;             // local index -> global id
    std::vector<blossom::WeightedPair> edges; // lexicographic in local ids
};

LocalProblem induce(const WeightedGraph& g, std::span<const Vertex> sorted_ids) {
    thread_local std::vector<int> local;
    if (local.size() < g.size()) local.assign(g.size(), -1);
    LocalProblem p;
    for (Vertex v : sorted_ids) {
        if (g.positive_neighbors(v).empty()) continue;
        local[v] = static_cast<int>(p.vertices.size());
        p.vertices.push_back(v);
    }
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        const Vertex u = p.vertices[i];
        for (Vertex v : g.positive_neighbors(u)) {
            if (v <= u || local[v] < 0) continue;
            p.edges.push_back({static_cast<int>(i), local[v], g.weight(u, v)});
        }
    }
    for (Vertex v : p.vertices) local[v] = -1;
    // Vertices that only touch edges outside the subset never matter.
    return p;
}

std::vector<Edge> to_edges(const LocalProblem& p, const blossom::Solution& s) {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < s.mate.size(); ++i)
        if (s.mate[i] > static_cast<int>(i)) out.emplace_back(p.vertices[i], p.vertices[s.mate[i]]);
    return out;
}

}  // namespace

std::vector<Edge> positive_max_matching_dense(const WeightedGraph& g, std::span<const Vertex> sorted_ids) {
    const auto p = induce(g, sorted_ids);
    if (p.edges.empty()) return {};
    return to_edges(p, blossom::solve(static_cast<int>(p.vertices.size()), p.edges));
}

std::vector<Edge> positive_max_matching(const WeightedGraph& g, std::span<const Vertex> sorted_ids) {
    const auto p = induce(g, sorted_ids);
    if (p.edges.empty()) return {};
    const int nv = static_cast<int>(p.vertices.size());
    if (p.edges.size() <= kCandidatesPerVertex * p.vertices.size())
        return to_edges(p, blossom::solve(nv, p.edges));

    // Candidate set: the heaviest few edges at every vertex.
    std::vector<std::vector<std::size_t>> incident(nv);
    for (std::size_t k = 0; k < p.edges.size(); ++k) {
        incident[p.edges[k].u].push_back(k);
        incident[p.edges[k].v].push_back(k);
    }
    std::vector<bool> chosen(p.edges.size(), false);
    for (auto& list : incident) {
        const std::size_t keep = std::min(kCandidatesPerVertex, list.size());
        std::partial_sort(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(keep), list.end(),
                          [&](std::size_t a, std::size_t b) {
                              if (p.edges[a].weight != p.edges[b].weight)
                                  return p.edges[a].weight > p.edges[b].weight;
                              return a < b;
                          });
        for (std::size_t i = 0; i < keep; ++i) chosen[list[i]] = true;
    }

    double scale = 0.0;
    for (const auto& e : p.edges) scale = std::max(scale, e.weight);
    const double tol = 1e-12 * scale;

    for (;;) {
        std::vector<blossom::WeightedPair> sparse;
        for (std::size_t k = 0; k < p.edges.size(); ++k)
            if (chosen[k]) sparse.push_back(p.edges[k]);
        const auto sol = blossom::solve(nv, sparse);
        bool violated = false;
        for (std::size_t k = 0; k < p.edges.size(); ++k) {
            if (chosen[k]) continue;
            const auto& e = p.edges[k];
            if (blossom::reduced_cost(sol, e.u, e.v, e.weight) < -tol) {
                chosen[k] = true;
                violated = true;
            }
        }
        if (!violated) return to_edges(p, sol);
    }
}

}  // namespace secmatch::detail
