#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "secmatch/edge_secretary.hpp"
#include "secmatch/harness.hpp"
#include "secmatch/hypergraph_secretary.hpp"
#include "secmatch/ordinal.hpp"
#include "secmatch/rng.hpp"
#include "secmatch/vertex_secretary.hpp"

using namespace secmatch;

namespace {

constexpr int kOk = 0;
constexpr int kInputFailure = 1;
constexpr int kInvariantFailure = 2;

struct CommonOptions {
    std::string algorithm = "vertex";
    std::string family = "uniform-complete";
    std::size_t n = 10;
    std::size_t m = 0;  // online vertices (hypergraph); overrides n when set
    std::size_t r = 8;
    std::size_t d = 2;
    double density = 0.2;
    std::size_t edges_per_vertex = 2;
    std::size_t aux = 0;
    std::size_t k = 0;
    std::size_t l = 0;
    std::size_t trials = 1000;
    std::size_t instances = 1;
    std::uint64_t seed = 1;
    std::string oracle = "exact";
    std::size_t inner_trials = 200;
    std::string instance;
    std::string exec = "parallel";
    std::string out;
    std::string format = "csv";
    std::string trace_out;
};

Execution parse_exec(const std::string& s) {
    if (s == "serial") return Execution::serial;
    if (s == "parallel") return Execution::parallel;
    throw InputError("unknown execution mode '" + s + "' (known: serial, parallel)");
}

void add_experiment_options(CLI::App* app, CommonOptions& o) {
    app->add_option("--algorithm,-a", o.algorithm, "vertex | vertex-ordinal-greedy | edge | hypergraph | ordinal");
    app->add_option("--family,-f", o.family,
                    "uniform-complete | sparse-random | star | disjoint-pairs | hard-ordinal | hypergraph-random | triangle");
    app->add_option("--n", o.n, "vertices (online vertices for hypergraphs)");
    app->add_option("--m", o.m, "online vertices of a hypergraph family (overrides --n)");
    app->add_option("--r", o.r, "offline vertices of a hypergraph family");
    app->add_option("--d", o.d, "largest offline set of a hypergraph family");
    app->add_option("--density", o.density, "edge probability of sparse-random");
    app->add_option("--edges-per-vertex", o.edges_per_vertex, "hyperedges per online vertex");
    app->add_option("--aux", o.aux, "zero-weight padding vertices for the triangle family");
    app->add_option("--k", o.k, "exploration length of the vertex algorithm (default floor(n/2))");
    app->add_option("--l", o.l, "threshold of the ordinal policy (default floor(n/2))");
    app->add_option("--trials,-t", o.trials, "trials per instance");
    app->add_option("--instances", o.instances, "instances drawn from the family");
    app->add_option("--seed,-s", o.seed, "master seed");
    app->add_option("--oracle", o.oracle, "availability oracle: exact | mc");
    app->add_option("--inner-trials", o.inner_trials, "inner runs per state of the mc oracle");
    app->add_option("--instance", o.instance, "graph or hypergraph JSON file instead of a family");
    app->add_option("--exec", o.exec, "serial | parallel");
    app->add_option("--out,-o", o.out, "output path (default stdout)");
    app->add_option("--format", o.format, "csv | json");
}

ExperimentConfig to_config(const CommonOptions& o) {
    ExperimentConfig cfg;
    cfg.algorithm = parse_algorithm(o.algorithm);
    cfg.family.kind = parse_family(o.family);
    cfg.family.n = o.m ? o.m : o.n;
    cfg.family.r = o.r;
    cfg.family.d = o.d;
    cfg.family.density = o.density;
    cfg.family.edges_per_vertex = o.edges_per_vertex;
    cfg.family.aux = o.aux;
    cfg.trials = o.trials;
    cfg.instances = o.instances;
    cfg.seed = o.seed;
    cfg.oracle = parse_oracle(o.oracle);
    cfg.inner_trials = o.inner_trials;
    cfg.exec = parse_exec(o.exec);
    cfg.instance_path = o.instance;
    if (cfg.algorithm == Algorithm::ordinal && o.l) cfg.k_or_l = o.l;
    if (cfg.algorithm != Algorithm::ordinal && o.k) cfg.k_or_l = o.k;
    cfg.validate();
    return cfg;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open output file: " + path);
    out << text;
    if (!out) throw InputError("failed writing output file: " + path);
}

/// One run on instance 0 with the streams of trial 0.
nlohmann::json single_trace(const ExperimentConfig& cfg) {
    GeneratedInstance gi;
    if (!cfg.instance_path.empty()) {
        if (cfg.algorithm == Algorithm::hypergraph)
            gi.hyper = read_hypergraph_file(cfg.instance_path);
        else
            gi.graph = read_graph_file(cfg.instance_path);
    } else {
        gi = generate_instance(cfg.family, derive_seed(cfg.seed, 0, Stream::instance));
    }
    Rng order_rng = make_rng(cfg.seed, 0, Stream::order);
    Rng coins = make_rng(cfg.seed, 0, Stream::coins);
    switch (cfg.algorithm) {
        case Algorithm::vertex:
        case Algorithm::vertex_ordinal_greedy: {
            const VertexInstance inst{gi.graph};
            const auto order = random_permutation<Vertex>(inst.n(), order_rng);
            const std::size_t k = cfg.k_or_l.value_or(default_exploration(inst.n()));
            const auto trace = cfg.algorithm == Algorithm::vertex ? run_vertex_algorithm(inst, order, k, coins)
                                                                  : run_vertex_ordinal_greedy(inst, order, k, coins);
            return vertex_trace_to_json(trace);
        }
        case Algorithm::edge: {
            const auto inst = EdgeInstance::from_graph(gi.graph);
            const auto order = random_permutation<std::size_t>(inst.m(), order_rng);
            if (cfg.oracle == OracleMode::exact) {
                auto dp = exact_edge_oracle(inst);
                return edge_trace_to_json(inst, run_edge_algorithm(inst, order, dp, coins));
            }
            const auto model = edge_model(inst);
            NestedMonteCarloOracle oracle(model, cfg.inner_trials, derive_seed(cfg.seed, 0, Stream::inner));
            return edge_trace_to_json(inst, run_edge_algorithm(inst, order, oracle, coins));
        }
        case Algorithm::hypergraph: {
            const auto model = hyper_model(gi.hyper);
            const auto order = random_permutation<std::size_t>(gi.hyper.m, order_rng);
            if (cfg.oracle == OracleMode::exact) {
                ContentionDP dp(model);
                return hyper_trace_to_json(run_hypergraph_algorithm(gi.hyper, order, dp, coins));
            }
            NestedMonteCarloOracle oracle(model, cfg.inner_trials, derive_seed(cfg.seed, 0, Stream::inner));
            return hyper_trace_to_json(run_hypergraph_algorithm(gi.hyper, order, oracle, coins));
        }
        case Algorithm::ordinal:
            break;
    }
    throw InputError("traces are available for the vertex, edge and hypergraph algorithms");
}

std::vector<ExperimentConfig> read_configs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("cannot parse " + path + ": " + e.what());
    }
    const nlohmann::json list = j.is_object() && j.contains("experiments") ? j.at("experiments") : j;
    if (!list.is_array()) throw InputError("config must be an array or {\"experiments\": [...]}");
    std::vector<ExperimentConfig> out;
    for (const auto& e : list) out.push_back(config_from_json(e));
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    // "a:b:s" sweeps a..b step s; otherwise a comma separated list.
    std::vector<std::size_t> out;
    if (text.find(':') != std::string::npos) {
        std::size_t a = 0, b = 0, s = 1;
        char c1 = 0, c2 = 0;
        std::istringstream in(text);
        if (!(in >> a >> c1 >> b) || c1 != ':') throw InputError("bad sweep '" + text + "'");
        if (in >> c2 >> s && c2 != ':') throw InputError("bad sweep '" + text + "'");
        if (s == 0 || a > b) throw InputError("bad sweep '" + text + "'");
        for (std::size_t x = a; x <= b; x += s) out.push_back(x);
        return out;
    }
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stoul(item));
        } catch (const std::exception&) {
            throw InputError("bad size '" + item + "'");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online secretary matching: simulation, closed forms and invariant checks"};
    app.require_subcommand(1);

    CommonOptions sim;
    auto* simulate = app.add_subcommand("simulate", "run one experiment and write a report row");
    add_experiment_options(simulate, sim);
    simulate->add_option("--trace-out", sim.trace_out, "also write the JSON trace of a single run");

    std::string table = "ordinal";
    std::size_t an_n = 1000, an_k = 0, an_m = 100, an_d = 2;
    std::string sizes = "10,100,1000,10000";
    std::string an_out;
    auto* analyze = app.add_subcommand("analyze", "closed-form tables");
    analyze->add_option("--table", table, "p | alpha | ordinal | threshold");
    analyze->add_option("--n", an_n, "horizon for p and threshold tables");
    analyze->add_option("--k", an_k, "exploration length for the p table (default floor(n/2))");
    analyze->add_option("--m", an_m, "horizon for the alpha table");
    analyze->add_option("--d", an_d, "set size for the alpha table (2: edge arrival)");
    analyze->add_option("--sizes", sizes, "n values for the ordinal table: list a,b,c or sweep a:b:step");
    analyze->add_option("--out,-o", an_out, "output path (default stdout)");

    std::string suite = "all";
    std::uint64_t verify_seed = 1;
    std::string verify_exec = "parallel";
    auto* verify = app.add_subcommand("verify", "run invariant suites");
    verify->add_option("--suite", suite, "closed-forms | vertex | edge | hypergraph | ordinal | all");
    verify->add_option("--seed,-s", verify_seed, "master seed");
    verify->add_option("--exec", verify_exec, "serial | parallel");

    std::string config_path, rep_out, rep_format = "csv";
    auto* report = app.add_subcommand("report", "run a list of experiments from a JSON file");
    report->add_option("--config,-c", config_path, "JSON array of experiment configs")->required();
    report->add_option("--out,-o", rep_out, "output path (default stdout)");
    report->add_option("--format", rep_format, "csv | json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputFailure;
    }

    try {
        if (*simulate) {
            const auto cfg = to_config(sim);
            const auto format = parse_format(sim.format);
            const auto result = run_experiment(cfg);
            emit(render_report({result.row}, format), sim.out);
            std::cerr << "min instance ratio " << format_double(result.estimate.min_instance_ratio)
                      << ", clamped steps " << result.estimate.clamped_steps << ", max jitter "
                      << format_double(result.estimate.max_jitter) << "\n";
            if (!sim.trace_out.empty()) emit(single_trace(cfg).dump(2) + "\n", sim.trace_out);
        } else if (*analyze) {
            Table t;
            if (table == "p")
                t = vertex_probability_table(an_n, an_k ? an_k : an_n / 2);
            else if (table == "alpha")
                t = alpha_table(an_m, an_d);
            else if (table == "ordinal")
                t = ordinal_table(parse_sizes(sizes));
            else if (table == "threshold")
                t = threshold_table(an_n);
            else
                throw InputError("unknown table '" + table + "' (known: p, alpha, ordinal, threshold)");
            emit(t.to_csv(), an_out);
        } else if (*verify) {
            const auto results = run_suite(parse_suite(suite), verify_seed, parse_exec(verify_exec));
            bool ok = true;
            for (const auto& r : results) {
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
                ok = ok && r.passed;
            }
            return ok ? kOk : kInvariantFailure;
        } else if (*report) {
            const auto format = parse_format(rep_format);
            std::vector<ReportRow> rows;
            for (const auto& cfg : read_configs(config_path)) rows.push_back(run_experiment(cfg).row);
            emit(render_report(rows, format), rep_out);
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputFailure;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kInputFailure;
    } catch (const InvariantError& e) {
        std::cerr << "invariant failure: " << e.what() << "\n";
        return kInvariantFailure;
    } catch (const TrialError& e) {
        std::cerr << "trial failure: " << e.what() << "\n";
        return kInvariantFailure;
    }
    return kOk;
}
