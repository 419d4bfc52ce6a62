#pragma once

// Vertex-arrival secretary matching: explore the first k arrivals, then at
// every step match the newcomer to its partner in a maximum-weight perfect
// matching of the arrived set (with one random earlier vertex removed at odd
// steps) whenever that partner is still free.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "secmatch/graph.hpp"
#include "secmatch/rng.hpp"
#include "secmatch/stats.hpp"
#include "secmatch/parallel.hpp"

namespace secmatch {

struct VertexInstance {
    WeightedGraph graph;

    std::size_t n() const noexcept { return graph.size(); }
};

/// How the per-step matching mu_t is formed.
enum class MatchingRule { exact, greedy };

/// Returns the 1-based drop index r in {1, ..., t-1} for odd step t.
using DropPolicy = std::function<std::size_t(std::size_t t)>;

struct VertexStep {
    std::size_t t = 0;
    Vertex arrival = 0;
    std::optional<std::size_t> dropped_index;  // r_t, odd steps only
    std::optional<Vertex> dropped;
    std::optional<Vertex> partner;  // mu_t(v_t)
    bool matched = false;
};

struct VertexRunTrace {
    Matching matching;
    double weight = 0.0;
    std::vector<VertexStep> steps;  // t = k+1 .. horizon
};

/// Throws InputError unless `order` is a permutation of [n].
void check_order(std::span<const Vertex> order, std::size_t n);

inline std::size_t default_exploration(std::size_t n) { return n / 2; }

VertexRunTrace run_vertex_algorithm(const VertexInstance& inst, std::span<const Vertex> order,
                                    std::size_t k, Rng& rng);
VertexRunTrace run_vertex_algorithm(const VertexInstance& inst, std::span<const Vertex> order,
                                    std::size_t k, const DropPolicy& drop);
VertexRunTrace run_vertex_ordinal_greedy(const VertexInstance& inst, std::span<const Vertex> order,
                                         std::size_t k, Rng& rng);
VertexRunTrace run_vertex_ordinal_greedy(const VertexInstance& inst, std::span<const Vertex> order,
                                         std::size_t k, const DropPolicy& drop);

/// Runs steps k+1 .. horizon only; the general entry point behind the above.
VertexRunTrace run_vertex_steps(const VertexInstance& inst, std::span<const Vertex> order,
                                std::size_t k, std::size_t horizon, MatchingRule rule,
                                const DropPolicy& drop);

/// p(k,k) = 0, p(k,t) = 2/t + (t-3)/t * p(k,t-1). Requires t >= k.
double p_recursive(std::size_t k, std::size_t t);
/// (2/3)(1 - k(k-1)(k-2) / (t(t-1)(t-2))). Requires t >= k >= 3.
double p_closed(std::size_t k, std::size_t t);

/// Appends m_aux vertices joined to everything by weight 0.
VertexInstance pad_with_auxiliary(const VertexInstance& inst, std::size_t m_aux);

/// Frequency of "u is matched after step t" over random orders conditioned
/// (by rejection) on u arriving among the first t.
Estimate estimate_match_probability(const VertexInstance& inst, std::size_t k, std::size_t t,
                                    Vertex u, std::size_t trials, std::uint64_t seed,
                                    Execution exec = Execution::parallel);

/// Exact expected weight over all n! orders and all drop choices (n <= 8).
double exact_vertex_expected_value(const VertexInstance& inst, std::size_t k,
                                   MatchingRule rule = MatchingRule::exact);

nlohmann::json vertex_trace_to_json(const VertexRunTrace& trace);

}  // namespace secmatch
