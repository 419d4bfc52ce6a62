#include "secmatch/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>

#include "secmatch/contention.hpp"
#include "secmatch/ordinal.hpp"
#include "secmatch/rng.hpp"
#include "secmatch/vertex_secretary.hpp"

namespace secmatch {

namespace {

template <class E>
struct Names {
    E value;
    const char* name;
};

constexpr Names<Algorithm> kAlgorithms[] = {
    {Algorithm::vertex, "vertex"},
    {Algorithm::vertex_ordinal_greedy, "vertex-ordinal-greedy"},
    {Algorithm::edge, "edge"},
    {Algorithm::hypergraph, "hypergraph"},
    {Algorithm::ordinal, "ordinal"},
};
constexpr Names<FamilyKind> kFamilies[] = {
    {FamilyKind::uniform_complete, "uniform-complete"},
    {FamilyKind::sparse_random, "sparse-random"},
    {FamilyKind::star, "star"},
    {FamilyKind::disjoint_pairs, "disjoint-pairs"},
    {FamilyKind::hard_ordinal, "hard-ordinal"},
    {FamilyKind::hypergraph_random, "hypergraph-random"},
    {FamilyKind::triangle, "triangle"},
};
constexpr Names<OracleMode> kOracles[] = {{OracleMode::exact, "exact"}, {OracleMode::mc, "mc"}};
constexpr Names<Suite> kSuites[] = {
    {Suite::closed_forms, "closed-forms"}, {Suite::vertex, "vertex"},   {Suite::edge, "edge"},
    {Suite::hypergraph, "hypergraph"},     {Suite::ordinal, "ordinal"}, {Suite::all, "all"},
};

template <class E, std::size_t N>
std::string name_of(const Names<E> (&table)[N], E v) {
    for (const auto& e : table)
        if (e.value == v) return e.name;
    return "?";
}

template <class E, std::size_t N>
E parse_name(const Names<E> (&table)[N], const std::string& s, const char* what) {
    for (const auto& e : table)
        if (s == e.name) return e.value;
    std::string known;
    for (const auto& e : table) known += std::string(known.empty() ? "" : ", ") + e.name;
    throw InputError(std::string("unknown ") + what + " '" + s + "' (known: " + known + ")");
}

/// Weight in (0, 1]; 0 would mean "no edge".
double positive_weight(Rng& rng) { return 1.0 - uniform01(rng); }

constexpr double kJitterScale = 1e-10;

}  // namespace

std::string to_string(Algorithm a) { return name_of(kAlgorithms, a); }
std::string to_string(FamilyKind f) { return name_of(kFamilies, f); }
std::string to_string(OracleMode o) { return name_of(kOracles, o); }
Algorithm parse_algorithm(const std::string& s) { return parse_name(kAlgorithms, s, "algorithm"); }
FamilyKind parse_family(const std::string& s) { return parse_name(kFamilies, s, "family"); }
OracleMode parse_oracle(const std::string& s) { return parse_name(kOracles, s, "oracle"); }
Suite parse_suite(const std::string& s) { return parse_name(kSuites, s, "suite"); }

ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    throw InputError("unknown format '" + s + "' (known: csv, json)");
}

void InstanceFamily::validate() const {
    switch (kind) {
        case FamilyKind::uniform_complete:
        case FamilyKind::sparse_random:
        case FamilyKind::star:
            if (n < 2) throw InputError("family needs n >= 2");
            break;
        case FamilyKind::disjoint_pairs:
            if (n < 2 || n % 2 != 0) throw InputError("disjoint-pairs needs an even n >= 2");
            break;
        case FamilyKind::hard_ordinal:
            if (n < 3) throw InputError("hard-ordinal needs n >= 3");
            break;
        case FamilyKind::triangle:
            break;
        case FamilyKind::hypergraph_random:
            if (n < 1 || n > 64) throw InputError("hypergraph-random needs 1 <= n <= 64 online vertices");
            if (r < 1 || r > kHyperOfflineLimit) throw InputError("hypergraph-random needs 1 <= r <= 20");
            if (d < 1) throw InputError("hypergraph-random needs d >= 1");
            if (edges_per_vertex < 1) throw InputError("hypergraph-random needs at least one edge per vertex");
            break;
    }
    if (!(density >= 0.0 && density <= 1.0)) throw InputError("density must lie in [0, 1]");
}

EdgeInstance random_edge_instance(std::size_t m, std::uint64_t seed) {
    if (m < 1 || m > 64) throw InputError("random edge instance needs 1 <= m <= 64");
    const std::size_t nv = std::min<std::size_t>(std::max<std::size_t>(2 * m, 2), 64);
    Rng rng = make_rng(seed, 0, Stream::instance);
    WeightedGraph g(nv);
    std::size_t placed = 0;
    while (placed < m) {
        const auto u = static_cast<Vertex>(uniform_index(rng, 0, nv - 1));
        const auto v = static_cast<Vertex>(uniform_index(rng, 0, nv - 1));
        if (u == v || g.weight(u, v) > 0.0) continue;
        g.set_weight(u, v, positive_weight(rng));
        ++placed;
    }
    return EdgeInstance::from_graph(g);
}

BipartiteHypergraph random_hypergraph(std::size_t m, std::size_t r, std::size_t d, std::size_t edges_per_vertex,
                                      std::uint64_t seed) {
    if (m < 1 || r < 1 || d < 1 || edges_per_vertex < 1) throw InputError("random hypergraph needs positive sizes");
    Rng rng = make_rng(seed, 0, Stream::instance);
    BipartiteHypergraph h;
    h.m = m;
    h.r = r;
    h.d = d;
    std::vector<std::uint32_t> pool(r);
    for (std::size_t v = 0; v < m; ++v) {
        const std::size_t count = uniform_index(rng, 1, edges_per_vertex);
        std::vector<std::vector<std::uint32_t>> seen;
        for (std::size_t e = 0; e < count; ++e) {
            const std::size_t size = uniform_index(rng, 1, std::min(d, r));
            for (std::size_t i = 0; i < r; ++i) pool[i] = static_cast<std::uint32_t>(i);
            for (std::size_t i = 0; i < size; ++i) std::swap(pool[i], pool[uniform_index(rng, i, r - 1)]);
            std::vector<std::uint32_t> s(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
            std::sort(s.begin(), s.end());
            const double w = positive_weight(rng);
            if (std::find(seen.begin(), seen.end(), s) != seen.end()) continue;
            seen.push_back(s);
            h.edges.push_back(HyperEdge{static_cast<std::uint32_t>(v), std::move(s), w});
        }
    }
    h.validate();
    return h;
}

GeneratedInstance generate_instance(const InstanceFamily& family, std::uint64_t seed) {
    family.validate();
    GeneratedInstance out;
    out.kind = family.kind;
    Rng rng = make_rng(seed, 0, Stream::instance);
    const std::size_t n = family.n;
    auto jittered = [&](double base) {
        const double j = kJitterScale * uniform01(rng);
        out.jitter = std::max(out.jitter, j);
        return base + j;
    };
    switch (family.kind) {
        case FamilyKind::uniform_complete:
            out.graph = WeightedGraph(n);
            for (Vertex u = 0; u < n; ++u)
                for (Vertex v = u + 1; v < n; ++v) out.graph.set_weight(u, v, positive_weight(rng));
            break;
        case FamilyKind::sparse_random:
            out.graph = WeightedGraph(n);
            for (Vertex u = 0; u < n; ++u)
                for (Vertex v = u + 1; v < n; ++v) {
                    const bool present = uniform01(rng) < family.density;
                    const double w = positive_weight(rng);
                    if (present) out.graph.set_weight(u, v, w);
                }
            break;
        case FamilyKind::star:
            out.graph = WeightedGraph(n);
            for (Vertex v = 1; v < n; ++v) out.graph.set_weight(0, v, positive_weight(rng));
            break;
        case FamilyKind::disjoint_pairs:
            out.graph = WeightedGraph(n);
            for (Vertex u = 0; u + 1 < n; u += 2) out.graph.set_weight(u, u + 1, jittered(1.0));
            break;
        case FamilyKind::triangle:
            // One unit edge among three vertices, then zero-weight padding.
            out.graph = WeightedGraph(3);
            out.graph.set_weight(0, 1, jittered(1.0));
            out.graph = out.graph.with_isolated(family.aux);
            break;
        case FamilyKind::hard_ordinal: {
            const auto perm = random_permutation<std::uint32_t>(n, rng);
            out.values.resize(n);
            for (std::size_t v = 0; v < n; ++v) out.values[v] = perm[v] + 1;
            // Literal weights n^(3(i+j)) only while they fit in a double.
            const double log_top = 3.0 * static_cast<double>(2 * n - 1) * std::log(static_cast<double>(n));
            if (log_top < std::log(std::numeric_limits<double>::max())) {
                out.graph = WeightedGraph(n);
                const double base = std::pow(static_cast<double>(n), 3.0);
                for (Vertex u = 0; u < n; ++u)
                    for (Vertex v = u + 1; v < n; ++v)
                        out.graph.set_weight(u, v, std::pow(base, static_cast<double>(out.values[u] + out.values[v])));
            }
            break;
        }
        case FamilyKind::hypergraph_random:
            out.hyper = random_hypergraph(n, family.r, family.d, family.edges_per_vertex, seed);
            break;
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw InputError("trials must be >= 1");
    if (instances < 1) throw InputError("instances must be >= 1");
    if (inner_trials < 1) throw InputError("inner trials must be >= 1");
    if (!instance_path.empty()) {
        if (algorithm == Algorithm::ordinal) throw InputError("the ordinal algorithm takes no instance file");
        if (instances != 1) throw InputError("an instance file gives exactly one instance");
        return;
    }
    family.validate();
    const bool hyper_family = family.kind == FamilyKind::hypergraph_random;
    if ((algorithm == Algorithm::hypergraph) != hyper_family)
        throw InputError("the hypergraph algorithm runs exactly on the hypergraph-random family");
    if (algorithm == Algorithm::ordinal && family.kind != FamilyKind::hard_ordinal)
        throw InputError("the ordinal algorithm runs on the hard-ordinal family");
}

namespace {

struct Prepared {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t d = 0;
    std::size_t k_or_l = 0;
    double opt = 0.0;
    double jitter = 0.0;
    VertexInstance vertex;
    EdgeInstance edge;
    BipartiteHypergraph hyper;
    std::shared_ptr<ContentionModel> model;
    std::shared_ptr<ContentionDP> dp;
};

std::size_t count_positive(const WeightedGraph& g) { return g.positive_edges().size(); }

Prepared prepare(const ExperimentConfig& cfg, const GeneratedInstance& gi) {
    Prepared p;
    p.jitter = gi.jitter;
    switch (cfg.algorithm) {
        case Algorithm::vertex:
        case Algorithm::vertex_ordinal_greedy: {
            if (gi.kind == FamilyKind::hard_ordinal && gi.graph.size() == 0)
                throw InputError("hard-ordinal weights overflow at this n; use the ordinal algorithm");
            p.vertex = VertexInstance{gi.graph};
            p.n = gi.graph.size();
            p.m = count_positive(gi.graph);
            p.d = 2;
            p.k_or_l = cfg.k_or_l.value_or(default_exploration(p.n));
            if (p.k_or_l > p.n) throw InputError("k must not exceed n");
            p.opt = matching_weight(max_weight_matching(gi.graph, VertexSubset::all(p.n)), gi.graph);
            break;
        }
        case Algorithm::edge: {
            if (gi.kind == FamilyKind::hard_ordinal && gi.graph.size() == 0)
                throw InputError("hard-ordinal weights overflow at this n; use the ordinal algorithm");
            p.edge = EdgeInstance::from_graph(gi.graph);
            p.n = gi.graph.size();
            p.m = p.edge.m();
            p.d = 2;
            p.k_or_l = p.m / 2;
            if (p.m > 64) throw CapacityError("edge arrival supports at most 64 edges");
            p.opt = p.m == 0 ? 0.0 : p.edge.optimum_weight();
            if (p.m > 0) {
                p.model = std::make_shared<ContentionModel>(edge_model(p.edge));
                if (cfg.oracle == OracleMode::exact) p.dp = std::make_shared<ContentionDP>(*p.model);
            }
            break;
        }
        case Algorithm::hypergraph: {
            p.hyper = gi.hyper;
            p.n = gi.hyper.m;
            p.m = gi.hyper.edges.size();
            p.d = gi.hyper.d;
            p.k_or_l = hyper_cutoff(gi.hyper.m, gi.hyper.d);
            p.opt = hyper_optimum_weight(gi.hyper);
            p.model = std::make_shared<ContentionModel>(hyper_model(gi.hyper));
            if (cfg.oracle == OracleMode::exact) p.dp = std::make_shared<ContentionDP>(*p.model);
            break;
        }
        case Algorithm::ordinal: {
            p.n = gi.values.size();
            p.k_or_l = cfg.k_or_l.value_or(p.n / 2);
            if (p.k_or_l < 1 || p.k_or_l > p.n) throw InputError("threshold l must satisfy 1 <= l <= n");
            p.opt = 1.0;
            break;
        }
    }
    return p;
}

double bounded_ratio(double alg, double opt) {
    if (opt <= 0.0) return 1.0;  // nothing to gain: ALG = OPT = 0
    const double r = alg / opt;
    if (r > 1.0 + 1e-9) throw InvariantError("online weight exceeds the offline optimum");
    return std::min(r, 1.0);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Prepared> prepared;
    prepared.reserve(cfg.instances);
    if (!cfg.instance_path.empty()) {
        GeneratedInstance gi;
        if (cfg.algorithm == Algorithm::hypergraph) {
            gi.kind = FamilyKind::hypergraph_random;
            gi.hyper = read_hypergraph_file(cfg.instance_path);
        } else {
            gi.graph = read_graph_file(cfg.instance_path);
        }
        prepared.push_back(prepare(cfg, gi));
    }
    for (std::size_t i = 0; cfg.instance_path.empty() && i < cfg.instances; ++i)
        prepared.push_back(prepare(cfg, generate_instance(cfg.family, derive_seed(cfg.seed, i, Stream::instance))));

    const std::size_t total = cfg.trials * cfg.instances;
    std::vector<double> ratio(total, 0.0);
    std::vector<std::size_t> clamped(total, 0);

    if (cfg.algorithm == Algorithm::ordinal) {
        for (std::size_t i = 0; i < cfg.instances; ++i) {
            const auto& p = prepared[i];
            const auto sim = simulate_ordinal(OrdinalPolicy::threshold(p.n, p.k_or_l), cfg.trials,
                                              derive_seed(cfg.seed, i, Stream::order), cfg.exec);
            const auto hits = static_cast<std::size_t>(std::llround(sim.success.mean * static_cast<double>(cfg.trials)));
            for (std::size_t j = 0; j < hits; ++j) ratio[i * cfg.trials + j] = 1.0;
        }
    } else {
        for_each_trial(cfg.exec, total, [&](std::size_t g) {
            const Prepared& p = prepared[g / cfg.trials];
            Rng order_rng = make_rng(cfg.seed, g, Stream::order);
            Rng coins = make_rng(cfg.seed, g, Stream::coins);
            double alg = 0.0;
            switch (cfg.algorithm) {
                case Algorithm::vertex: {
                    const auto order = random_permutation<Vertex>(p.n, order_rng);
                    alg = run_vertex_algorithm(p.vertex, order, p.k_or_l, coins).weight;
                    break;
                }
                case Algorithm::vertex_ordinal_greedy: {
                    const auto order = random_permutation<Vertex>(p.n, order_rng);
                    alg = run_vertex_ordinal_greedy(p.vertex, order, p.k_or_l, coins).weight;
                    break;
                }
                case Algorithm::edge:
                case Algorithm::hypergraph: {
                    if (!p.model) break;
                    const auto order = random_permutation<std::size_t>(p.model->items, order_rng);
                    std::unique_ptr<NestedMonteCarloOracle> nested;
                    AvailabilityOracle* oracle = p.dp.get();
                    if (!oracle) {
                        nested = std::make_unique<NestedMonteCarloOracle>(*p.model, cfg.inner_trials,
                                                                          derive_seed(cfg.seed, g, Stream::inner));
                        oracle = nested.get();
                    }
                    const ContentionTrace trace = run_contention(*p.model, order, *oracle, coins);
                    alg = trace.weight;
                    clamped[g] = trace.clamped_steps;
                    break;
                }
                case Algorithm::ordinal:
                    break;
            }
            ratio[g] = bounded_ratio(alg, p.opt);
        });
    }

    ExperimentResult out;
    out.estimate.ratio = mean_estimate(ratio);
    for (std::size_t i = 0; i < cfg.instances; ++i) {
        CompensatedSum s;
        for (std::size_t j = 0; j < cfg.trials; ++j) s.add(ratio[i * cfg.trials + j]);
        out.estimate.min_instance_ratio =
            std::min(out.estimate.min_instance_ratio, s.value() / static_cast<double>(cfg.trials));
        out.estimate.max_jitter = std::max(out.estimate.max_jitter, prepared[i].jitter);
    }
    for (auto c : clamped) out.estimate.clamped_steps += c;

    ReportRow& row = out.row;
    row.algorithm = to_string(cfg.algorithm);
    row.family = cfg.instance_path.empty() ? to_string(cfg.family.kind) : "file";
    for (const auto& p : prepared) {
        row.n = std::max(row.n, p.n);
        row.m = std::max(row.m, p.m);
        row.d = std::max(row.d, p.d);
        row.k_or_l = std::max(row.k_or_l, p.k_or_l);
    }
    row.trials = total;
    row.seed = cfg.seed;
    row.mean_ratio = out.estimate.ratio.mean;
    row.stderr = out.estimate.ratio.stderr;
    row.ci_lo = std::max(0.0, out.estimate.ratio.ci_lo());
    row.ci_hi = std::min(1.0, out.estimate.ratio.ci_hi());
    return out;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig cfg;
        cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        const auto& f = j.at("family");
        cfg.family.kind = parse_family(f.at("kind").get<std::string>());
        cfg.family.n = f.value("n", cfg.family.n);
        cfg.family.r = f.value("r", cfg.family.r);
        cfg.family.d = f.value("d", cfg.family.d);
        cfg.family.density = f.value("density", cfg.family.density);
        cfg.family.edges_per_vertex = f.value("edges_per_vertex", cfg.family.edges_per_vertex);
        cfg.family.aux = f.value("aux", cfg.family.aux);
        cfg.trials = j.value("trials", cfg.trials);
        cfg.instances = j.value("instances", cfg.instances);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.oracle = parse_oracle(j.value("oracle", std::string("exact")));
        cfg.inner_trials = j.value("inner_trials", cfg.inner_trials);
        if (j.contains("k_or_l") && !j.at("k_or_l").is_null()) cfg.k_or_l = j.at("k_or_l").get<std::size_t>();
        cfg.instance_path = j.value("instance", std::string());
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad experiment config: ") + e.what());
    }
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j = {
        {"algorithm", to_string(cfg.algorithm)},
        {"family",
         {{"kind", to_string(cfg.family.kind)},
          {"n", cfg.family.n},
          {"r", cfg.family.r},
          {"d", cfg.family.d},
          {"density", cfg.family.density},
          {"edges_per_vertex", cfg.family.edges_per_vertex},
          {"aux", cfg.family.aux}}},
        {"trials", cfg.trials},
        {"instances", cfg.instances},
        {"seed", cfg.seed},
        {"oracle", to_string(cfg.oracle)},
        {"inner_trials", cfg.inner_trials},
        {"k_or_l", nullptr},
    };
    if (cfg.k_or_l) j["k_or_l"] = *cfg.k_or_l;
    if (!cfg.instance_path.empty()) j["instance"] = cfg.instance_path;
    return j;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format) {
    if (format == ReportFormat::csv) {
        std::string out = std::string(kReportHeader) + "\n";
        for (const auto& r : rows) {
            out += r.algorithm + "," + r.family + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," +
                   std::to_string(r.d) + "," + std::to_string(r.k_or_l) + "," + std::to_string(r.trials) + "," +
                   std::to_string(r.seed) + "," + format_double(r.mean_ratio) + "," + format_double(r.stderr) +
                   "," + format_double(r.ci_lo) + "," + format_double(r.ci_hi) + "\n";
        }
        return out;
    }
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"algorithm", r.algorithm},
                       {"family", r.family},
                       {"n", r.n},
                       {"m", r.m},
                       {"d", r.d},
                       {"k_or_l", r.k_or_l},
                       {"trials", r.trials},
                       {"seed", r.seed},
                       {"mean_ratio", r.mean_ratio},
                       {"stderr", r.stderr},
                       {"ci_lo", r.ci_lo},
                       {"ci_hi", r.ci_hi}});
    }
    return arr.dump(2) + "\n";
}

void write_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path) {
    const std::string text = render_report(rows, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open report for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw InputError("failed writing report: " + path);
}

std::string Table::to_csv() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
        out += "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
}

Table vertex_probability_table(std::size_t n, std::size_t k) {
    if (k > n) throw InputError("need k <= n");
    Table t{{"t", "p_recursive", "p_closed"}, {}};
    for (std::size_t s = std::max<std::size_t>(k, 1); s <= n; ++s) {
        const std::string closed = (k >= 3) ? format_double(p_closed(k, s)) : "";
        t.rows.push_back({std::to_string(s), format_double(p_recursive(k, s)), closed});
    }
    return t;
}

Table alpha_table(std::size_t m, std::size_t d) {
    if (m < 1) throw InputError("need m >= 1");
    if (d < 2) throw InputError("need d >= 2");
    const AlphaSchedule rec = d == 2 ? alpha_recursive(m) : hyper_alpha_recursive(m, d);
    Table t{{"t", "alpha_recursive", "alpha_closed"}, {}};
    for (std::size_t s = 1; s <= m; ++s) {
        std::string closed = "0";
        if (s > rec.cutoff) closed = format_double(d == 2 ? alpha_closed(m, s) : hyper_alpha_closed(m, d, s));
        t.rows.push_back({std::to_string(s), format_double(rec.at(s)), closed});
    }
    return t;
}

Table ordinal_table(const std::vector<std::size_t>& ns) {
    Table t{{"n", "l_star", "alg_l_star", "gap_to_5_12"}, {}};
    for (std::size_t n : ns) {
        const auto best = optimal_threshold(n);
        t.rows.push_back({std::to_string(n), std::to_string(best.l), format_double(best.value),
                          format_double(best.value - 5.0 / 12.0)});
    }
    return t;
}

Table threshold_table(std::size_t n) {
    Table t{{"l", "alg"}, {}};
    for (std::size_t l = 1; l <= n; ++l) t.rows.push_back({std::to_string(l), format_double(threshold_value(n, l))});
    return t;
}

namespace {

using Checks = std::vector<CheckResult>;

void add(Checks& out, std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
}

std::string sci(double x) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << x;
    return s.str();
}

void closed_form_checks(Checks& out) {
    double worst = 0.0;
    for (std::size_t k = 3; k <= 500; ++k)
        for (std::size_t t = k; t <= 500; ++t) worst = std::max(worst, std::abs(p_recursive(k, t) - p_closed(k, t)));
    add(out, "p(k,t) recursion equals closed form, 3 <= k <= t <= 500", worst <= 1e-12, "max error " + sci(worst));

    worst = 0.0;
    for (std::size_t m = 1; m <= 10000; ++m) {
        const auto a = alpha_recursive(m);
        for (std::size_t t = m / 2 + 1; t <= m; ++t) worst = std::max(worst, std::abs(a.at(t) - alpha_closed(m, t)));
    }
    add(out, "edge alpha recursion equals closed form, m <= 10^4", worst <= 1e-12, "max error " + sci(worst));

    worst = 0.0;
    for (std::size_t d = 2; d <= 6; ++d)
        for (std::size_t m = 1; m <= 10000; ++m) {
            const auto a = hyper_alpha_recursive(m, d);
            for (std::size_t t = a.cutoff + 1; t <= m; ++t)
                worst = std::max(worst, std::abs(a.at(t) - hyper_alpha_closed(m, d, t)));
        }
    add(out, "hypergraph alpha recursion equals product form, d = 2..6, m <= 10^4", worst <= 1e-12,
        "max error " + sci(worst));
}

void vertex_checks(Checks& out, std::uint64_t seed, Execution exec) {
    InstanceFamily fam;
    fam.kind = FamilyKind::uniform_complete;
    fam.n = 20;
    const auto gi = generate_instance(fam, seed);
    const VertexInstance inst{gi.graph};
    const double target = p_closed(10, 15);
    for (Vertex u : {Vertex{0}, Vertex{7}}) {
        const auto est = estimate_match_probability(inst, 10, 15, u, 20000, derive_seed(seed, u, Stream::order), exec);
        add(out, "match probability at n=20, k=10, t=15 for vertex " + std::to_string(u), est.sigmas_from(target) <= 4.0,
            "estimate " + format_double(est.mean) + " vs " + format_double(target) + " (" +
                format_double(est.sigmas_from(target)) + " sigma)");
    }
    const auto padded = pad_with_auxiliary(inst, 7);
    const double opt = matching_weight(max_weight_matching(inst.graph, VertexSubset::all(inst.n())), inst.graph);
    const double opt_padded =
        matching_weight(max_weight_matching(padded.graph, VertexSubset::all(padded.n())), padded.graph);
    add(out, "zero-weight padding preserves the optimum", opt == opt_padded,
        format_double(opt) + " vs " + format_double(opt_padded));
}

void edge_checks(Checks& out, std::uint64_t seed) {
    double margin = 1.0, acc = 0.0, ratio = 1.0;
    for (std::size_t i = 0; i < 100; ++i) {
        const std::size_t m = 2 + i % 7;
        const auto inst = random_edge_instance(m, derive_seed(seed, i, Stream::instance));
        margin = std::min(margin, exact_edge_oracle(inst).availability_margin().min_margin);
        const auto ev = exact_edge_evaluation(inst);
        if (m <= 6) acc = std::max(acc, ev.acceptance_error);
        if (m >= 4) ratio = std::min(ratio, ev.expected_value / inst.optimum_weight());
    }
    add(out, "availability >= alpha on every reachable state (100 instances, m = 2..8)", margin >= -1e-12,
        "min x - alpha " + sci(margin));
    add(out, "acceptance given designation equals alpha, m <= 6", acc <= 1e-12, "max error " + sci(acc));
    add(out, "exact expected value >= OPT/4, 4 <= m <= 8", ratio >= 0.25, "min ratio " + format_double(ratio));
    double coef = 1.0;
    for (std::size_t m = 4; m <= 1000000; ++m) coef = std::min(coef, edge_telescoping_coefficient(m));
    add(out, "telescoping coefficient > 1/4 for 4 <= m <= 10^6", coef > 0.25, "min " + format_double(coef));
}

void hypergraph_checks(Checks& out, std::uint64_t seed) {
    double slack = 1.0;
    for (std::size_t d = 2; d <= 6; ++d) {
        const double bound = std::pow(static_cast<double>(d), -static_cast<double>(d) / static_cast<double>(d - 1));
        for (std::size_t m = 20; m <= 10000; ++m) slack = std::min(slack, hyper_coefficient(m, d) - bound);
    }
    add(out, "hypergraph coefficient >= d^(-d/(d-1)), d = 2..6, m = 20..10^4", slack >= 0.0, "min slack " + sci(slack));

    bool same = true;
    for (std::size_t i = 0; i < 30; ++i) {
        const auto inst = random_edge_instance(2 + i % 7, derive_seed(seed, i, Stream::instance));
        same = same && exact_edge_evaluation(inst).expected_value ==
                           exact_hyper_evaluation(embed_edge_instance(inst)).expected_value;
    }
    add(out, "d = 2 embedding reproduces edge values bit for bit", same, "30 instances");

    double margin = 1.0;
    for (std::size_t i = 0; i < 30; ++i) {
        const auto h = random_hypergraph(4 + i % 7, 6, 3, 2, derive_seed(seed, i, Stream::inner));
        margin = std::min(margin, ContentionDP(hyper_model(h)).availability_margin().min_margin);
    }
    add(out, "hypergraph availability >= alpha on every state (30 instances)", margin >= -1e-12,
        "min x - alpha " + sci(margin));
}

OrdinalPolicy random_policy(std::size_t n, std::uint64_t seed, std::size_t index) {
    Rng rng = make_rng(seed, index, Stream::instance);
    OrdinalPolicy p = OrdinalPolicy::zeros(n);
    for (std::size_t i = 2; i <= n; ++i) p.c[i] = uniform01(rng);
    return p;
}

void ordinal_checks(Checks& out, std::uint64_t seed) {
    double worst = -1.0;
    std::size_t at = 0;
    for (std::size_t n = 10; n <= 10000; ++n) {
        const double gap = optimal_threshold(n).value - (5.0 / 12.0 + 5.0 / static_cast<double>(n));
        if (gap > worst || at == 0) {
            worst = gap;
            at = n;
        }
    }
    add(out, "optimal threshold value <= 5/12 + 5/n, n = 10..10^4", worst <= 0.0,
        "largest excess " + sci(worst) + " at n=" + std::to_string(at));

    const auto best = optimal_threshold(1000);
    add(out, "n = 1000 optimum inside the window", best.l >= 470 && best.l <= 530 && best.value >= 0.4125 &&
                                                       best.value <= 0.4175,
        "l*=" + std::to_string(best.l) + " value " + format_double(best.value));

    bool shaped = true;
    for (std::size_t n = 2; n <= 8; ++n) shaped = shaped && exhaustive_policy_search(n).threshold_maximizer;
    add(out, "some threshold policy maximizes among all 0/1 policies, n <= 8", shaped, "n = 2..8");

    double fd = 0.0;
    for (std::size_t k = 0; k < 100; ++k) {
        auto p = random_policy(30, seed, k);
        const auto g = gradient(p);
        for (std::size_t i = 2; i <= 30; ++i) {
            const double h = 1e-4, keep = p.c[i];
            p.c[i] = keep + h;
            // Affine in c_i, so stepping past [0, 1] is harmless.
            const double up = objective_sum_t<double>(p.n, p.c);
            p.c[i] = keep - h;
            const double down = objective_sum_t<double>(p.n, p.c);
            p.c[i] = keep;
            fd = std::max(fd, std::abs((up - down) / (2 * h) - g[i]));
        }
    }
    add(out, "gradient matches central differences (100 policies, n = 30)", fd <= 1e-6, "max error " + sci(fd));

    std::size_t violations = 0;
    for (std::size_t k = 0; k < 1000; ++k) {
        const auto g = gradient(random_policy(50, seed, 1000 + k));
        for (std::size_t i = 3; i <= 50; ++i)
            if (g[i] <= 0.0 && !(g[i - 1] < 0.0)) ++violations;
    }
    add(out, "nonpositive derivative propagates to the previous step (1000 policies, n = 50)", violations == 0,
        std::to_string(violations) + " violations");
}

}  // namespace

std::vector<CheckResult> run_suite(Suite suite, std::uint64_t seed, Execution exec) {
    Checks out;
    const bool all = suite == Suite::all;
    if (all || suite == Suite::closed_forms) closed_form_checks(out);
    if (all || suite == Suite::vertex) vertex_checks(out, seed, exec);
    if (all || suite == Suite::edge) edge_checks(out, seed);
    if (all || suite == Suite::hypergraph) hypergraph_checks(out, seed);
    if (all || suite == Suite::ordinal) ordinal_checks(out, seed);
    return out;
}

}  // namespace secmatch
