#pragma once

// Experiment orchestration: seeded instance families, trial loops for every
// algorithm, CSV/JSON reports, closed-form tables and invariant suites.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "secmatch/edge_secretary.hpp"
#include "secmatch/graph.hpp"
#include "secmatch/hypergraph_secretary.hpp"
#include "secmatch/parallel.hpp"
#include "secmatch/stats.hpp"

namespace secmatch {

enum class Algorithm { vertex, vertex_ordinal_greedy, edge, hypergraph, ordinal };
enum class FamilyKind { uniform_complete, sparse_random, star, disjoint_pairs, hard_ordinal, hypergraph_random, triangle };
enum class OracleMode { exact, mc };

std::string to_string(Algorithm a);
std::string to_string(FamilyKind f);
std::string to_string(OracleMode o);
Algorithm parse_algorithm(const std::string& s);
FamilyKind parse_family(const std::string& s);
OracleMode parse_oracle(const std::string& s);

struct InstanceFamily {
    FamilyKind kind = FamilyKind::uniform_complete;
    std::size_t n = 10;         // vertices, or online vertices for hypergraphs
    std::size_t r = 8;          // offline vertices (hypergraph-random)
    std::size_t d = 2;          // max offline set size (hypergraph-random)
    double density = 0.2;       // edge probability (sparse-random)
    std::size_t edges_per_vertex = 2;  // hyperedges per online vertex (hypergraph-random)
    std::size_t aux = 0;        // zero-weight padding vertices (triangle)

    void validate() const;
};

struct GeneratedInstance {
    FamilyKind kind = FamilyKind::uniform_complete;
    WeightedGraph graph;                       // graph families
    BipartiteHypergraph hyper;                 // hypergraph-random
    std::vector<std::uint32_t> values;         // hard-ordinal: value of each vertex, 1..n
    double jitter = 0.0;                       // largest tie-breaking perturbation added
};

/// Deterministic in (family, seed).
GeneratedInstance generate_instance(const InstanceFamily& family, std::uint64_t seed);

/// Exactly m positive edges with U(0,1) weights on min(2m, 64) vertices.
EdgeInstance random_edge_instance(std::size_t m, std::uint64_t seed);
/// m online vertices, r offline, sets of size 1..d, at least one hyperedge each.
BipartiteHypergraph random_hypergraph(std::size_t m, std::size_t r, std::size_t d, std::size_t edges_per_vertex,
                                      std::uint64_t seed);

struct ExperimentConfig {
    Algorithm algorithm = Algorithm::vertex;
    InstanceFamily family;
    std::size_t trials = 1000;       // per instance
    std::size_t instances = 1;       // >1 sweeps the family
    std::uint64_t seed = 1;
    OracleMode oracle = OracleMode::exact;
    std::size_t inner_trials = 200;
    std::optional<std::size_t> k_or_l;  // exploration length (vertex) or threshold (ordinal)
    Execution exec = Execution::parallel;
    /// Graph or hypergraph JSON file used instead of the family (one instance).
    std::string instance_path;

    void validate() const;
};

struct ReportRow {
    std::string algorithm;
    std::string family;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t d = 0;
    std::size_t k_or_l = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double mean_ratio = 0.0;
    double stderr = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

struct RatioEstimate {
    Estimate ratio;                    // E[w(ALG)] / w(OPT), averaged over instances
    double min_instance_ratio = 1.0;   // worst instance
    double max_jitter = 0.0;
    std::size_t clamped_steps = 0;     // nested oracle only
};

struct ExperimentResult {
    RatioEstimate estimate;
    ReportRow row;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

enum class ReportFormat { csv, json };
ReportFormat parse_format(const std::string& s);
inline constexpr const char* kReportHeader =
    "algorithm,family,n,m,d,k_or_l,trials,seed,mean_ratio,stderr,ci_lo,ci_hi";
std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format);
/// Throws InputError naming the path on I/O failure.
void write_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path);

/// Shortest round-trip decimal form; locale independent.
std::string format_double(double x);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string to_csv() const;
};

/// p(k,t) recursion and closed form for t = k..n.
Table vertex_probability_table(std::size_t n, std::size_t k);
/// alpha_t recursion and closed form for t = 1..m (d = 2 is edge arrival).
Table alpha_table(std::size_t m, std::size_t d);
/// n, l*, ALG(l*), ALG(l*) - 5/12 for each n.
Table ordinal_table(const std::vector<std::size_t>& ns);
/// l, ALG(l) for l = 1..n.
Table threshold_table(std::size_t n);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

enum class Suite { closed_forms, vertex, edge, hypergraph, ordinal, all };
Suite parse_suite(const std::string& s);
std::vector<CheckResult> run_suite(Suite suite, std::uint64_t seed, Execution exec = Execution::parallel);

}  // namespace secmatch
