#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "secmatch/errors.hpp"
#include "secmatch/harness.hpp"
#include "secmatch/ordinal.hpp"

using namespace secmatch;

namespace {

bool same_graph(const WeightedGraph& a, const WeightedGraph& b) {
    if (a.size() != b.size()) return false;
    for (Vertex u = 0; u < a.size(); ++u)
        for (Vertex v = u + 1; v < a.size(); ++v)
            if (a.weight(u, v) != b.weight(u, v)) return false;
    return true;
}

std::vector<Vertex> all_vertices(std::size_t n) {
    std::vector<Vertex> t(n);
    std::iota(t.begin(), t.end(), Vertex(0));
    return t;
}

std::size_t count_fields(const std::string& line) { return std::count(line.begin(), line.end(), ',') + 1; }

ExperimentConfig small_config(Algorithm a, FamilyKind f, std::size_t n) {
    ExperimentConfig cfg;
    cfg.algorithm = a;
    cfg.family.kind = f;
    cfg.family.n = n;
    cfg.trials = 300;
    cfg.instances = 3;
    cfg.seed = 17;
    return cfg;
}

}  // namespace

TEST_CASE("instance generation is deterministic per seed") {
    for (auto kind : {FamilyKind::uniform_complete, FamilyKind::sparse_random, FamilyKind::star,
                      FamilyKind::disjoint_pairs, FamilyKind::hard_ordinal, FamilyKind::triangle}) {
        InstanceFamily f;
        f.kind = kind;
        f.n = 8;
        f.aux = 2;
        const auto a = generate_instance(f, 5);
        const auto b = generate_instance(f, 5);
        CHECK(same_graph(a.graph, b.graph));
        CHECK(a.values == b.values);
        CHECK(a.jitter == b.jitter);
    }
    InstanceFamily f;
    f.n = 8;
    CHECK_FALSE(same_graph(generate_instance(f, 5).graph, generate_instance(f, 6).graph));
    for (const auto& e : generate_instance(f, 9).graph.positive_edges()) CHECK((e.weight > 0.0 && e.weight <= 1.0));
}

TEST_CASE("disjoint pairs: n/2 edges whose sum is the optimum") {
    InstanceFamily f;
    f.kind = FamilyKind::disjoint_pairs;
    f.n = 6;
    const auto inst = generate_instance(f, 3);
    const auto edges = inst.graph.positive_edges();
    REQUIRE(edges.size() == 3);
    double sum = 0.0;
    for (const auto& e : edges) {
        sum += e.weight;
        CHECK(std::abs(e.weight - 1.0) < 1e-9);
    }
    CHECK(inst.jitter < 1e-9);
    CHECK(inst.jitter > 0.0);
    CHECK(oracle::max_matching(inst.graph, all_vertices(6)).first == doctest::Approx(sum).epsilon(1e-15));
}

TEST_CASE("star and triangle shapes") {
    InstanceFamily star;
    star.kind = FamilyKind::star;
    star.n = 7;
    const auto s = generate_instance(star, 1).graph.positive_edges();
    CHECK(s.size() == 6);
    for (const auto& e : s) CHECK(e.edge.u == 0);

    InstanceFamily tri;
    tri.kind = FamilyKind::triangle;
    tri.aux = 4;
    const auto t = generate_instance(tri, 1).graph;
    CHECK(t.size() == 7);
    REQUIRE(t.positive_edges().size() == 1);
    CHECK(t.positive_edges()[0].edge == Edge(0, 1));
}

TEST_CASE("hard ordinal family holds a permutation and literal weights") {
    InstanceFamily f;
    f.kind = FamilyKind::hard_ordinal;
    f.n = 6;
    const auto inst = generate_instance(f, 11);
    auto sorted = inst.values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::uint32_t> expect(6);
    std::iota(expect.begin(), expect.end(), 1u);
    CHECK(sorted == expect);
    for (Vertex u = 0; u < 6; ++u)
        for (Vertex v = u + 1; v < 6; ++v)
            CHECK(inst.graph.weight(u, v) ==
                  doctest::Approx(std::pow(216.0, double(inst.values[u] + inst.values[v]))).epsilon(1e-12));
    f.n = 200;
    const auto big = generate_instance(f, 11);
    CHECK(big.values.size() == 200);
    CHECK(big.graph.positive_edges().empty());
}

TEST_CASE("random edge instances have exactly m edges") {
    for (std::size_t m = 1; m <= 40; ++m) {
        const auto inst = random_edge_instance(m, m * 7);
        CHECK(inst.m() == m);
        CHECK(inst.graph().size() == std::min<std::size_t>(2 * m, 64));
    }
}

TEST_CASE("random hypergraphs respect their shape") {
    const auto h = random_hypergraph(6, 5, 3, 2, 4);
    const auto again = random_hypergraph(6, 5, 3, 2, 4);
    CHECK(hypergraph_to_json(h) == hypergraph_to_json(again));
    CHECK(h.m == 6);
    CHECK(h.r == 5);
    std::vector<int> per_vertex(6, 0);
    for (const auto& e : h.edges) {
        ++per_vertex.at(e.v);
        CHECK(e.s.size() >= 1);
        CHECK(e.s.size() <= 3);
        CHECK(e.w > 0.0);
    }
    for (int c : per_vertex) CHECK(c >= 1);
}

TEST_CASE("a single edge is always taken") {
    auto cfg = small_config(Algorithm::edge, FamilyKind::disjoint_pairs, 2);
    const auto r = run_experiment(cfg);
    CHECK(r.estimate.ratio.mean == 1.0);
    CHECK(r.row.m == 1);
    cfg.algorithm = Algorithm::vertex;
    CHECK(run_experiment(cfg).estimate.ratio.mean == 1.0);
}

TEST_CASE("ordinal experiment at n = 2000 matches the threshold value") {
    ExperimentConfig cfg;
    cfg.algorithm = Algorithm::ordinal;
    cfg.family.kind = FamilyKind::hard_ordinal;
    cfg.family.n = 2000;
    cfg.trials = 100000;
    cfg.seed = 2024;
    const auto best = optimal_threshold(2000);
    cfg.k_or_l = best.l;
    const auto r = run_experiment(cfg);
    CHECK(r.estimate.ratio.sigmas_from(best.value) <= 4.0);
    CHECK(r.row.k_or_l == best.l);
}

TEST_CASE("experiments are reproducible and execution independent") {
    for (auto a : {Algorithm::vertex, Algorithm::vertex_ordinal_greedy, Algorithm::edge}) {
        auto cfg = small_config(a, FamilyKind::sparse_random, 7);
        cfg.family.density = 0.5;  // at most 21 edges; exact edge oracle needs m <= 14
        if (a == Algorithm::edge) cfg.family.n = 5;
        cfg.exec = Execution::serial;
        const auto s = run_experiment(cfg);
        cfg.exec = Execution::parallel;
        const auto p = run_experiment(cfg);
        const auto p2 = run_experiment(cfg);
        CHECK(s.estimate.ratio.mean == p.estimate.ratio.mean);
        CHECK(s.estimate.ratio.stderr == p.estimate.ratio.stderr);
        CHECK(render_report({p.row}, ReportFormat::csv) == render_report({p2.row}, ReportFormat::csv));
        CHECK(p.estimate.ratio.mean <= 1.0);
        CHECK(p.estimate.min_instance_ratio <= p.estimate.ratio.mean + 1e-12);
    }
    auto cfg = small_config(Algorithm::hypergraph, FamilyKind::hypergraph_random, 5);
    cfg.family.r = 4;
    cfg.family.d = 2;
    const auto h1 = run_experiment(cfg);
    cfg.exec = Execution::serial;
    CHECK(run_experiment(cfg).estimate.ratio.mean == h1.estimate.ratio.mean);
    cfg.oracle = OracleMode::mc;
    cfg.inner_trials = 50;
    cfg.trials = 50;
    const auto m1 = run_experiment(cfg);
    cfg.exec = Execution::parallel;
    CHECK(run_experiment(cfg).estimate.ratio.mean == m1.estimate.ratio.mean);
}

TEST_CASE("experiment configs are validated") {
    auto cfg = small_config(Algorithm::hypergraph, FamilyKind::uniform_complete, 5);
    CHECK_THROWS_AS(run_experiment(cfg), InputError);
    cfg = small_config(Algorithm::ordinal, FamilyKind::star, 5);
    CHECK_THROWS_AS(run_experiment(cfg), InputError);
    cfg = small_config(Algorithm::vertex, FamilyKind::uniform_complete, 5);
    cfg.trials = 0;
    CHECK_THROWS_AS(run_experiment(cfg), InputError);
    cfg.trials = 10;
    cfg.instance_path = "/nonexistent/graph.json";
    CHECK_THROWS_AS(run_experiment(cfg), InputError);
    CHECK_THROWS_AS(parse_algorithm("bogus"), InputError);
    CHECK_THROWS_AS(parse_family("bogus"), InputError);
    CHECK_THROWS_AS(parse_oracle("bogus"), InputError);
    CHECK_THROWS_AS(parse_suite("bogus"), InputError);
    CHECK_THROWS_AS(parse_format("xml"), InputError);
}

TEST_CASE("names round trip") {
    for (auto a : {Algorithm::vertex, Algorithm::vertex_ordinal_greedy, Algorithm::edge, Algorithm::hypergraph,
                   Algorithm::ordinal})
        CHECK(parse_algorithm(to_string(a)) == a);
    for (auto f : {FamilyKind::uniform_complete, FamilyKind::sparse_random, FamilyKind::star,
                   FamilyKind::disjoint_pairs, FamilyKind::hard_ordinal, FamilyKind::hypergraph_random,
                   FamilyKind::triangle})
        CHECK(parse_family(to_string(f)) == f);
    for (auto o : {OracleMode::exact, OracleMode::mc}) CHECK(parse_oracle(to_string(o)) == o);
}

TEST_CASE("config json round trip") {
    auto cfg = small_config(Algorithm::edge, FamilyKind::sparse_random, 9);
    cfg.family.density = 0.35;
    cfg.k_or_l = 4;
    cfg.oracle = OracleMode::mc;
    cfg.inner_trials = 77;
    const auto back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
    CHECK(back.k_or_l == std::optional<std::size_t>(4));
    CHECK(back.family.density == 0.35);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"algorithm", "nope"}}), InputError);
}

TEST_CASE("report rendering") {
    CHECK(render_report({}, ReportFormat::csv) == std::string(kReportHeader) + "\n");
    CHECK(nlohmann::json::parse(render_report({}, ReportFormat::json)) == nlohmann::json::array());
    const auto r = run_experiment(small_config(Algorithm::vertex, FamilyKind::uniform_complete, 6)).row;
    const auto csv = render_report({r, r}, ReportFormat::csv);
    std::istringstream in(csv);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        CHECK(count_fields(line) == 12);
        ++lines;
    }
    CHECK(lines == 3);
    CHECK((r.ci_lo >= 0.0 && r.ci_lo <= r.mean_ratio && r.mean_ratio <= r.ci_hi && r.ci_hi <= 1.0));
    const auto j = nlohmann::json::parse(render_report({r}, ReportFormat::json));
    REQUIRE(j.size() == 1);
    CHECK(j[0].size() == 12);
    CHECK(j[0]["algorithm"] == "vertex");
    CHECK(j[0]["mean_ratio"].get<double>() == r.mean_ratio);
}

TEST_CASE("report files and I/O errors") {
    const auto dir = std::filesystem::temp_directory_path() / "secmatch_report_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "r.csv").string();
    const auto r = run_experiment(small_config(Algorithm::edge, FamilyKind::star, 5)).row;
    write_report({r}, ReportFormat::csv, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == render_report({r}, ReportFormat::csv));
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(write_report({r}, ReportFormat::csv, "/nonexistent-dir/r.csv"), InputError);
}

TEST_CASE("format_double is shortest round trip") {
    for (double x : {0.1, 1.0 / 3.0, 0.0, 1e-300, 123456.789})
        CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("trial errors carry the failing index") {
    for (auto exec : {Execution::serial, Execution::parallel}) {
        try {
            for_each_trial(exec, 100, [](std::size_t i) {
                if (i == 37) throw std::runtime_error("boom");
            });
            FAIL("expected a trial error");
        } catch (const TrialError& e) {
            CHECK(e.trial() == 37);
            CHECK(std::string(e.what()).find("boom") != std::string::npos);
        }
    }
}

TEST_CASE("tables") {
    const auto p = vertex_probability_table(20, 5);
    CHECK(p.rows.size() == 16);
    CHECK(p.to_csv().rfind(p.header[0], 0) == 0);
    CHECK(alpha_table(10, 2).rows.size() == 10);
    CHECK(threshold_table(12).rows.size() == 12);
    const auto o = ordinal_table({10, 1000});
    REQUIRE(o.rows.size() == 2);
    CHECK(o.rows[1][1] == std::to_string(optimal_threshold(1000).l));
}

TEST_CASE("closed forms suite passes") {
    for (const auto& c : run_suite(Suite::closed_forms, 1)) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
}
