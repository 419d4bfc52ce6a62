#pragma once

#include <span>
#include <vector>

#include "secmatch/graph.hpp"

namespace secmatch::detail {

/// Maximum-weight matching using only the strictly positive edges induced by
/// `sorted_ids`. Dense inputs are solved on a sparse candidate set first and
/// certified against every remaining edge with the solver's dual; violated
/// edges are added and the solve repeated.
std::vector<Edge> positive_max_matching(const WeightedGraph& g, std::span<const Vertex> sorted_ids);

/// Same, without the sparse first pass. Reference path for tests.
std::vector<Edge> positive_max_matching_dense(const WeightedGraph& g, std::span<const Vertex> sorted_ids);

/// Greedy pass over the strictly positive induced edges: heaviest first,
/// equal weights in lexicographic pair order.
std::vector<Edge> positive_greedy_matching(const WeightedGraph& g, std::span<const Vertex> sorted_ids);

}  // namespace secmatch::detail
