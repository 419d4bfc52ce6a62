#pragma once

// Online bipartite hypergraph matching: online vertices L arrive in random
// order, each revealing hyperedges (v, S) with S a set of at most d offline
// vertices. Same contention rule as edge arrival with cutoff floor(f_d m),
// f_d = d^(-1/(d-1)), and alpha_t = 1 - d sum_{i<t} alpha_i / i.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "secmatch/contention.hpp"
#include "secmatch/edge_secretary.hpp"

namespace secmatch {

struct HyperEdge {
    std::uint32_t v = 0;             // online vertex
    std::vector<std::uint32_t> s;    // offline vertices, sorted
    double w = 0.0;
};

struct BipartiteHypergraph {
    std::size_t m = 0;  // online vertices
    std::size_t r = 0;  // offline vertices
    std::size_t d = 2;
    std::vector<HyperEdge> edges;

    /// Throws InputError on out-of-range ids, |S| outside [1, d], repeated
    /// offline ids, duplicate edges, or non-positive weights.
    void validate() const;
};

struct HyperMatching {
    std::vector<std::size_t> edges;  // indices into the hypergraph's edge list, ascending
    double weight = 0.0;
};

double f_d(std::size_t d);
/// floor(f_d * m); the tie t = f_d * m counts as exploration.
std::size_t hyper_cutoff(std::size_t m, std::size_t d);

AlphaSchedule hyper_alpha_recursive(std::size_t m, std::size_t d);
/// prod_{i=1..d} (c + 1 - i) / (t - i) with c = floor(f_d m); 1 at t = c + 1.
/// When c < d the schedule is 0 after the first exploitation step.
double hyper_alpha_closed(std::size_t m, std::size_t d, std::size_t t);

inline constexpr std::size_t kHyperOfflineLimit = 20;

/// Exact maximum-weight matching of H(L_t + R) by dynamic programming over
/// used offline subsets. Online vertices are decided in ascending order,
/// preferring the lowest-index optimal edge over leaving the vertex out.
HyperMatching max_weight_hyper_matching(const BipartiteHypergraph& h, std::span<const std::uint32_t> online,
                                        std::size_t offline_limit = kHyperOfflineLimit);
HyperMatching max_weight_hyper_matching(const BipartiteHypergraph& h, ItemSet online,
                                        std::size_t offline_limit = kHyperOfflineLimit);

std::vector<Designation> hyper_designations(const BipartiteHypergraph& h, ItemSet arrived);
ContentionModel hyper_model(const BipartiteHypergraph& h);

struct HyperRunTrace {
    HyperMatching matching;
    ContentionTrace detail;
};

HyperRunTrace run_hypergraph_algorithm(const BipartiteHypergraph& h, std::span<const std::size_t> order,
                                       AvailabilityOracle& oracle, Rng& coins);

/// (1/m) prod_{i=1..d}(c+1-i) (1/(d-1)) (prod_{i<d} 1/(c-i) - prod_{i<d} 1/(m-i)); needs c > d.
double hyper_coefficient(std::size_t m, std::size_t d);

/// Each edge becomes an online vertex whose single hyperedge is its endpoint pair.
BipartiteHypergraph embed_edge_instance(const EdgeInstance& inst);
/// Appends `extra` online vertices without edges.
BipartiteHypergraph pad_hypergraph(const BipartiteHypergraph& h, std::size_t extra);

double hyper_optimum_weight(const BipartiteHypergraph& h);
ExactEvaluation exact_hyper_evaluation(const BipartiteHypergraph& h);

// {"m": int, "r": int, "d": int, "edges": [{"v": int, "s": [ids], "w": real}, ...]}
BipartiteHypergraph hypergraph_from_json(const nlohmann::json& j);
nlohmann::json hypergraph_to_json(const BipartiteHypergraph& h);
BipartiteHypergraph read_hypergraph_file(const std::string& path);
nlohmann::json hyper_trace_to_json(const HyperRunTrace& trace);

}  // namespace secmatch
