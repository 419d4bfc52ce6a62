#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace secmatch::blossom {

struct WeightedPair {
    int u;
    int v;
    double weight;
};

/// Primal-dual state at termination. Vertex duals are stored doubled, as in
/// the classic Edmonds/Gabow formulation: slack(uv) = dual[u] + dual[v] - 2w
/// plus twice the dual of every blossom containing both endpoints.
struct Solution {
    std::vector<int> mate;           // partner vertex or -1
    std::vector<double> dual;        // size 2n; [n, 2n) are blossom duals
    std::vector<int> blossom_parent; // size 2n
};

/// Maximum-weight (not necessarily maximum-cardinality) matching on a general
/// graph with vertices 0..n-1. O(n^3). Parallel edges and self-loops are not
/// allowed. The result depends only on the edge list order.
Solution solve(int n, std::span<const WeightedPair> edges);

/// Reduced cost of edge uv under a terminal solution (>= 0 up to rounding
/// for an optimal dual). Used to certify optimality for edges the solver
/// never saw.
double reduced_cost(const Solution& s, int u, int v, double weight);

}  // namespace secmatch::blossom
