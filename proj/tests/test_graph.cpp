#include "doctest.h"
#include "oracles.hpp"
#include "secmatch/errors.hpp"
#include "secmatch/graph.hpp"
#include "secmatch/rng.hpp"

using namespace secmatch;

namespace {

WeightedGraph k4() {
    WeightedGraph g(4);
    g.set_weight(0, 1, 10);
    g.set_weight(2, 3, 10);
    g.set_weight(0, 2, 1);
    g.set_weight(0, 3, 2);
    g.set_weight(1, 2, 3);
    g.set_weight(1, 3, 4);
    return g;
}

WeightedGraph random_graph(std::size_t n, double density, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0, Stream::instance);
    WeightedGraph g(n);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (uniform01(rng) < density) g.set_weight(u, v, 1.0 - uniform01(rng));
    return g;
}

}  // namespace

TEST_CASE("K4 optimum pairs the two heavy edges") {
    const auto g = k4();
    const auto mu = max_weight_matching(g, VertexSubset::all(4));
    CHECK(mu == Matching({Edge(0, 1), Edge(2, 3)}));
    CHECK(matching_weight(mu, g) == 20.0);
}

TEST_CASE("single pair and empty set") {
    WeightedGraph g(2);
    g.set_weight(0, 1, 5);
    const auto mu = max_weight_matching(g, VertexSubset::all(2));
    CHECK(mu == Matching({Edge(0, 1)}));
    CHECK(matching_weight(mu, g) == 5.0);
    const auto none = max_weight_matching(g, VertexSubset());
    CHECK(none.empty());
    CHECK(matching_weight(none, g) == 0.0);
}

TEST_CASE("restriction keeps only edges inside T") {
    const Matching mu({Edge(0, 1), Edge(2, 3)});
    CHECK(restrict_matching(mu, VertexSubset({0, 1, 2})) == Matching({Edge(0, 1)}));
    CHECK(restrict_matching(mu, VertexSubset({0, 2})).empty());
    CHECK(restrict_matching(Matching(), VertexSubset({0, 1})).empty());
}

TEST_CASE("greedy examples") {
    WeightedGraph path(4);
    path.set_weight(0, 1, 3);
    path.set_weight(1, 2, 2);
    path.set_weight(2, 3, 3);
    const auto gp = greedy_matching(path, VertexSubset::all(4));
    CHECK(gp == Matching({Edge(0, 1), Edge(2, 3)}));
    CHECK(matching_weight(gp, path) == 6.0);

    WeightedGraph tri(3);
    tri.set_weight(0, 1, 2);
    tri.set_weight(1, 2, 1);
    tri.set_weight(0, 2, 1);
    const auto gt = greedy_matching(tri, VertexSubset::all(3));
    CHECK(gt.contains(Edge(0, 1)));
    CHECK(matching_weight(gt, tri) == 2.0);
    CHECK(greedy_matching(tri, VertexSubset()).empty());
}

TEST_CASE("exact matcher equals brute force on |T| <= 10") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng pick = make_rng(s, 1, Stream::order);
        const std::size_t n = 12;
        const auto g = random_graph(n, s % 2 ? 1.0 : 0.4, s);
        const std::size_t size = uniform_index(pick, 0, 10);
        auto perm = random_permutation<Vertex>(n, pick);
        std::vector<Vertex> t(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(size));
        const auto mu = max_weight_matching(g, VertexSubset(t));
        const auto [best, edges] = oracle::max_matching(g, t);
        std::vector<Edge> positive;
        for (auto e : mu.edges())
            if (g.weight(e) > 0) positive.push_back(e);
        CHECK(positive == edges);
        CHECK(matching_weight(mu, g) == doctest::Approx(best).epsilon(1e-12));
        if (size % 2 == 0) {
            for (auto v : t) CHECK(mu.covers(v));
        }
        const auto greedy = greedy_matching(g, VertexSubset(t));
        CHECK(matching_weight(greedy, g) >= 0.5 * best - 1e-12);
        CHECK(max_weight_matching(g, VertexSubset(t)) == mu);
    }
}

TEST_CASE("result depends only on the set T") {
    const auto g = random_graph(9, 0.5, 3);
    const auto a = max_weight_matching(g, VertexSubset({0, 3, 5, 7, 8, 1}));
    const auto b = max_weight_matching(g, VertexSubset({8, 7, 1, 5, 3, 0}));
    CHECK(a == b);
}

TEST_CASE("zero completion pairs leftovers in ascending order") {
    WeightedGraph g(6);
    g.set_weight(2, 5, 1.0);
    const auto mu = max_weight_matching(g, VertexSubset::all(6));
    CHECK(mu == Matching({Edge(0, 1), Edge(2, 5), Edge(3, 4)}));
}

TEST_CASE("invalid graphs are rejected") {
    WeightedGraph g(3);
    CHECK_THROWS_AS(g.set_weight(1, 1, 1.0), InputError);
    CHECK_THROWS_AS(g.set_weight(0, 1, -1.0), InputError);
    CHECK_THROWS_AS(g.set_weight(0, 5, 1.0), InputError);
    const std::vector<WeightedEdge> dup{{Edge(0, 1), 1.0}, {Edge(1, 0), 2.0}};
    CHECK_THROWS_AS(WeightedGraph::from_edges(3, dup), InputError);
    CHECK_THROWS_AS(max_weight_matching(g, VertexSubset({0, 4})), InputError);
    CHECK_THROWS_AS(VertexSubset({1, 1}), InputError);
    CHECK_THROWS_AS(Matching({Edge(0, 1), Edge(1, 2)}), InputError);
}

TEST_CASE("matching partner lookup is symmetric") {
    const Matching mu({Edge(4, 1), Edge(0, 3)});
    CHECK(mu.partner(1) == 4u);
    CHECK(mu.partner(4) == 1u);
    CHECK(mu.partner(3) == 0u);
    CHECK_FALSE(mu.partner(2).has_value());
}

TEST_CASE("graph json round trip") {
    const auto g = k4();
    const auto back = graph_from_json(graph_to_json(g));
    CHECK(back.size() == 4);
    for (Vertex u = 0; u < 4; ++u)
        for (Vertex v = u + 1; v < 4; ++v) CHECK(back.weight(u, v) == g.weight(u, v));
    CHECK_THROWS_AS(graph_from_json(nlohmann::json{{"n", 2}, {"edges", {{0, 0, 1.0}}}}), InputError);
    CHECK_THROWS_AS(graph_from_json(nlohmann::json{{"n", 2}, {"edges", {{0, 1, 1.0}, {1, 0, 1.0}}}}), InputError);
    CHECK_THROWS_AS(graph_from_json(nlohmann::json{{"edges", nlohmann::json::array()}}), InputError);
}
