#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "secmatch/errors.hpp"
#include "secmatch/harness.hpp"
#include "secmatch/hypergraph_secretary.hpp"

using namespace secmatch;

namespace {

BipartiteHypergraph make(std::size_t m, std::size_t r, std::size_t d, std::vector<HyperEdge> edges) {
    BipartiteHypergraph h;
    h.m = m;
    h.r = r;
    h.d = d;
    h.edges = std::move(edges);
    h.validate();
    return h;
}

}  // namespace

TEST_CASE("hypergraph alpha schedule examples") {
    const auto a = hyper_alpha_recursive(10, 2);
    CHECK(f_d(2) == 0.5);
    for (std::size_t t = 1; t <= 5; ++t) CHECK(a.at(t) == 0.0);
    CHECK(a.at(6) == 1.0);
    CHECK(a.at(7) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(a.at(7) == alpha_recursive(10).at(7));

    CHECK(f_d(3) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(hyper_cutoff(100, 3) == 57);
    const auto b = hyper_alpha_recursive(100, 3);
    CHECK(b.at(57) == 0.0);
    CHECK(b.at(58) == 1.0);
    CHECK(hyper_alpha_closed(10, 2, 7) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(hyper_alpha_closed(10, 2, 6) == 1.0);
    const double direct = (57.0 * 56.0 * 55.0) / (59.0 * 58.0 * 57.0);
    CHECK(std::abs(hyper_alpha_closed(100, 3, 60) - direct) <= 1e-15);
    CHECK(std::abs(b.at(60) - direct) <= 1e-12);
    CHECK_THROWS_AS(hyper_alpha_recursive(10, 1), InputError);
    CHECK_THROWS_AS(hyper_alpha_closed(100, 3, 57), InputError);
}

TEST_CASE("hypergraph schedule is monotone after the cutoff") {
    for (std::size_t d = 2; d <= 6; ++d)
        for (std::size_t m = 1; m <= 200; ++m) {
            const auto a = hyper_alpha_recursive(m, d);
            if (a.cutoff + 1 <= m) CHECK(a.at(a.cutoff + 1) == 1.0);
            for (std::size_t t = a.cutoff + 2; t <= m; ++t) CHECK(a.at(t) <= a.at(t - 1));
            for (std::size_t t = 1; t <= m; ++t) CHECK(a.at(t) >= 0.0);
        }
}

TEST_CASE("hypergraph matching examples") {
    const auto one = make(1, 2, 2, {{0, {0, 1}, 5.0}});
    CHECK(max_weight_hyper_matching(one, std::vector<std::uint32_t>{0}).edges == std::vector<std::size_t>{0});
    const auto clash = make(2, 2, 2, {{0, {0}, 3.0}, {1, {0, 1}, 2.0}});
    const auto mu = max_weight_hyper_matching(clash, std::vector<std::uint32_t>{0, 1});
    CHECK(mu.edges == std::vector<std::size_t>{0});
    CHECK(mu.weight == 3.0);
}

TEST_CASE("hypergraph matching equals brute force") {
    for (std::uint64_t s = 0; s < 40; ++s) {
        const auto h = random_hypergraph(4, 6, 2 + s % 2, 3, 500 + s);
        CHECK(hyper_optimum_weight(h) == doctest::Approx(oracle::hyper_matching_weight(h)).epsilon(1e-12));
    }
    BipartiteHypergraph big;
    big.m = 1;
    big.r = 21;
    big.d = 1;
    big.edges = {{0, {20}, 1.0}};
    CHECK_THROWS_AS(hyper_optimum_weight(big), CapacityError);
}

TEST_CASE("invalid hypergraphs are rejected") {
    CHECK_THROWS_AS(make(1, 2, 1, {{0, {0, 1}, 1.0}}), InputError);
    CHECK_THROWS_AS(make(1, 2, 2, {{0, {0, 0}, 1.0}}), InputError);
    CHECK_THROWS_AS(make(1, 2, 2, {{1, {0}, 1.0}}), InputError);
    CHECK_THROWS_AS(make(1, 2, 2, {{0, {0}, 0.0}}), InputError);
    CHECK_THROWS_AS(make(1, 2, 2, {{0, {5}, 1.0}}), InputError);
}

TEST_CASE("a single online vertex takes its best edge") {
    const auto h = make(1, 3, 2, {{0, {0, 1}, 2.0}, {0, {2}, 5.0}});
    CHECK(exact_hyper_evaluation(h).expected_value == 5.0);
}

TEST_CASE("edge embedding reproduces edge arrival step for step") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto inst = random_edge_instance(3 + s % 6, 40 + s);
        const auto h = embed_edge_instance(inst);
        CHECK(hyper_alpha_recursive(h.m, 2).alpha == alpha_recursive(inst.m()).alpha);
        CHECK(exact_hyper_evaluation(h).expected_value == exact_edge_evaluation(inst).expected_value);
        auto edp = exact_edge_oracle(inst);
        ContentionDP hdp(hyper_model(h));
        for (std::uint64_t k = 0; k < 10; ++k) {
            Rng o = make_rng(k, s, Stream::order);
            const auto order = random_permutation<std::size_t>(inst.m(), o);
            Rng c1 = make_rng(k, s, Stream::coins), c2 = make_rng(k, s, Stream::coins);
            const auto a = run_edge_algorithm(inst, order, edp, c1);
            const auto b = run_hypergraph_algorithm(h, order, hdp, c2);
            REQUIRE(a.detail.steps.size() == b.detail.steps.size());
            for (std::size_t i = 0; i < a.detail.steps.size(); ++i) {
                const auto& x = a.detail.steps[i];
                const auto& y = b.detail.steps[i];
                CHECK(x.item == y.item);
                CHECK(x.designated == y.designated);
                CHECK(x.x == y.x);
                CHECK(x.probability == y.probability);
                CHECK(x.accepted == y.accepted);
            }
            CHECK(a.weight == b.matching.weight);
        }
    }
}

TEST_CASE("unmatched online vertices change nothing") {
    const auto h = random_hypergraph(8, 4, 2, 2, 12);
    ContentionDP dp(hyper_model(h));
    for (std::uint64_t k = 0; k < 50; ++k) {
        Rng o = make_rng(k, 0, Stream::order), c = make_rng(k, 0, Stream::coins);
        const auto order = random_permutation<std::size_t>(8, o);
        const auto trace = run_hypergraph_algorithm(h, order, dp, c);
        for (const auto& st : trace.detail.steps) {
            if (!st.designated) {
                CHECK_FALSE(st.accepted);
                CHECK(st.x == 1.0);
            }
        }
    }
}

TEST_CASE("coefficient values") {
    CHECK(hyper_coefficient(10, 2) == doctest::Approx(0.5 - 0.5 * 4.0 / 9.0).epsilon(1e-12));
    CHECK(hyper_coefficient(1000000, 2) == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(hyper_coefficient(1000000, 3) == doctest::Approx(std::pow(3.0, -1.5)).epsilon(1e-5));
    CHECK_THROWS_AS(hyper_coefficient(4, 2), InputError);
    for (std::size_t d = 2; d <= 6; ++d)
        for (std::size_t m = 20; m <= 2000; ++m)
            CHECK(hyper_coefficient(m, d) >= std::pow(double(d), -double(d) / double(d - 1)));
}

TEST_CASE("availability stays above alpha on small hypergraphs") {
    for (std::uint64_t s = 0; s < 40; ++s) {
        const std::size_t d = 2 + s % 2;
        const auto h = random_hypergraph(2 + s % 5, 2 + s % 5, d, 2, 80 + s);
        CHECK(ContentionDP(hyper_model(h)).availability_margin().min_margin >= -1e-12);
        const auto ev = exact_hyper_evaluation(h);
        CHECK(ev.acceptance_error <= 1e-12);
        CHECK(ev.availability_error <= 1e-12);
    }
}

TEST_CASE("exact value clears the coefficient where it is defined") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const std::size_t m = 6 + s % 3;
        const auto h = random_hypergraph(m, 5, 2, 2, 700 + s);
        const double value = exact_hyper_evaluation(h).expected_value;
        CHECK(value >= hyper_coefficient(m, 2) * hyper_optimum_weight(h) - 1e-12);
    }
}

TEST_CASE("padding adds edgeless online vertices") {
    const auto h = random_hypergraph(5, 4, 2, 2, 3);
    const auto p = pad_hypergraph(h, 15);
    CHECK(p.m == 20);
    CHECK(p.edges.size() == h.edges.size());
    CHECK(hyper_optimum_weight(p) == hyper_optimum_weight(h));
    CHECK(hyper_cutoff(p.m, 2) == 10);
}

TEST_CASE("hypergraph json round trip") {
    const auto h = random_hypergraph(5, 4, 3, 2, 9);
    const auto back = hypergraph_from_json(hypergraph_to_json(h));
    CHECK(back.m == h.m);
    CHECK(back.r == h.r);
    CHECK(back.d == h.d);
    REQUIRE(back.edges.size() == h.edges.size());
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
        CHECK(back.edges[i].v == h.edges[i].v);
        CHECK(back.edges[i].s == h.edges[i].s);
        CHECK(back.edges[i].w == h.edges[i].w);
    }
    CHECK_THROWS_AS(hypergraph_from_json(nlohmann::json{{"m", 1}}), InputError);
}
