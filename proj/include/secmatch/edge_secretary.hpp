#pragma once

// Edge-arrival secretary matching: after the first floor(m/2) edges, an
// arriving edge that belongs to the optimum of the arrived edges is taken
// with probability alpha_t / x_t when both endpoints are free.

#include <cstddef>
#include <span>
#include <vector>

#include "secmatch/contention.hpp"
#include "secmatch/graph.hpp"

namespace secmatch {

/// The positive-weight edges of a graph, indexed 0..m-1 in lexicographic
/// order. Endpoints are compacted into resource ids for availability masks.
class EdgeInstance {
public:
    EdgeInstance() = default;
    static EdgeInstance from_graph(const WeightedGraph& g);

    const WeightedGraph& graph() const noexcept { return graph_; }
    std::span<const WeightedEdge> edges() const noexcept { return edges_; }
    std::size_t m() const noexcept { return edges_.size(); }
    /// Sorted distinct endpoints; resource r stands for touched()[r].
    std::span<const Vertex> touched() const noexcept { return touched_; }
    std::size_t resource_of(Vertex v) const;
    /// Throws CapacityError beyond 64 touched vertices.
    ResourceSet endpoint_mask(std::size_t e) const;
    double optimum_weight() const;

private:
    WeightedGraph graph_;
    std::vector<WeightedEdge> edges_;
    std::vector<Vertex> touched_;
};

/// alpha_t = 0 for t <= floor(m/2), else 1 - 2 sum_{i<t} alpha_i / i.
AlphaSchedule alpha_recursive(std::size_t m);
/// floor(m/2) floor((m-2)/2) / ((t-1)(t-2)) for t > floor(m/2); the first
/// exploitation step is 1 (the formula reads 0/0 there when m <= 3).
double alpha_closed(std::size_t m, std::size_t t);

/// Items are edge indices; an edge is designated when it lies in the
/// maximum-weight matching of the arrived edges.
ContentionModel edge_model(const EdgeInstance& inst);
std::vector<Designation> edge_designations(const EdgeInstance& inst, ItemSet arrived);

ContentionDP exact_edge_oracle(const EdgeInstance& inst, std::size_t limit = ContentionDP::kDefaultLimit);

/// Exact x for edge e arriving after the edge set Q.
double exact_availability(const EdgeInstance& inst, ItemSet q, std::size_t e,
                          std::size_t limit = ContentionDP::kDefaultLimit);
NestedEstimate mc_availability(const EdgeInstance& inst, ItemSet q, std::size_t e, std::size_t trials,
                               std::size_t inner_trials, std::uint64_t seed, double wide_threshold = 0.05);

struct EdgeRunTrace {
    Matching matching;
    double weight = 0.0;
    ContentionTrace detail;
};

EdgeRunTrace run_edge_algorithm(const EdgeInstance& inst, std::span<const std::size_t> order,
                                AvailabilityOracle& oracle, Rng& coins);

double exact_expected_value(const EdgeInstance& inst);
ExactEvaluation exact_edge_evaluation(const EdgeInstance& inst);

/// sum over edges e in Q at u of P[e in mu*_i | e arrives at i], with the
/// arrived set uniformly random among size-i subsets of Q containing e.
double edge_in_optimum_mass(const EdgeInstance& inst, ItemSet q, Vertex u, std::size_t i);

/// floor(m/2) floor((m-2)/2) (1/(floor(m/2)-1) - 1/(m-1)) / m, for m >= 4.
double edge_telescoping_coefficient(std::size_t m);

nlohmann::json edge_trace_to_json(const EdgeInstance& inst, const EdgeRunTrace& trace);

}  // namespace secmatch
