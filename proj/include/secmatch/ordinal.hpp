#pragma once

// Ordinal matching: vertices arrive in random order revealing only relative
// ranks; the goal is to match the overall top two together. A policy c gives,
// for each step i, the probability of matching the current top two when the
// arriving vertex is one of them and both are free.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "secmatch/errors.hpp"
#include "secmatch/graph.hpp"
#include "secmatch/parallel.hpp"
#include "secmatch/stats.hpp"

namespace secmatch {

/// c[i] for i = 1..n (c[0] unused, c[1] never read).
struct OrdinalPolicy {
    std::size_t n = 0;
    std::vector<double> c;

    static OrdinalPolicy zeros(std::size_t n);
    /// c_i = 0 for i <= l, 1 for i > l.
    static OrdinalPolicy threshold(std::size_t n, std::size_t l);
    void validate() const;
};

template <class T>
struct PolicyStateT {
    std::vector<T> p;  // p[i], i = 1..n
    std::vector<T> q;  // q[i] = i p[i]
};
using PolicyState = PolicyStateT<double>;

/// p_1 = 1, p_i = (1 + (i-1) p_{i-1} - 2 p_{i-1} c_i) / i.
template <class T>
PolicyStateT<T> policy_state_t(std::size_t n, std::span<const T> c) {
    if (n < 1 || c.size() != n + 1) throw InputError("policy needs entries c[0..n]");
    PolicyStateT<T> s;
    s.p.assign(n + 1, T(0));
    s.q.assign(n + 1, T(0));
    s.p[1] = T(1);
    s.q[1] = T(1);
    for (std::size_t i = 2; i <= n; ++i) {
        const T im1 = T(static_cast<long long>(i - 1));
        s.p[i] = (T(1) + im1 * s.p[i - 1] - T(2) * s.p[i - 1] * c[i]) / T(static_cast<long long>(i));
        s.q[i] = T(static_cast<long long>(i)) * s.p[i];
    }
    return s;
}

/// f(c) = sum_{i=2..n} (i-1) p_{i-1} c_i, i.e. C(n,2) times the objective.
template <class T>
T objective_sum_t(std::size_t n, std::span<const T> c) {
    const auto s = policy_state_t<T>(n, c);
    T f(0);
    for (std::size_t i = 2; i <= n; ++i) f += T(static_cast<long long>(i - 1)) * s.p[i - 1] * c[i];
    return f;
}

template <class T>
T objective_t(std::size_t n, std::span<const T> c) {
    if (n < 2) throw InputError("objective needs n >= 2");
    const T pairs = T(static_cast<long long>(n * (n - 1) / 2));
    return objective_sum_t<T>(n, c) / pairs;
}

PolicyState policy_state(const OrdinalPolicy& policy);
/// Probability that the final top two end matched together.
double objective(const OrdinalPolicy& policy);
double objective_sum(const OrdinalPolicy& policy);

/// df/dc_i for f = objective_sum: q_{i-1} (1 - 2 x_i / (i-1)) with
/// x_n = 0, x_{i-1} = x_i (1 - 2 c_i / (i-1)) + c_i. Entry 1 is 0.
std::vector<double> gradient(const OrdinalPolicy& policy);

/// Objective of the threshold policy l in closed form:
/// [(n^2 - n - l^2 + l)/6 + (2/3) l (l-1) (1 - (l-2)/(n-2))] / C(n,2), n >= 3.
double threshold_value(std::size_t n, std::size_t l);
/// Same value summed term by term from the closed forms of q_i.
double threshold_value_by_terms(std::size_t n, std::size_t l);

struct ThresholdOptimum {
    std::size_t l = 0;               // smallest maximizer
    double value = 0.0;
    std::vector<std::size_t> ties;   // every maximizer (relative tolerance 1e-12)
};
ThresholdOptimum optimal_threshold(std::size_t n);

/// 1/6 + x^2/2 - 2x^3/3.
double ordinal_g(double x);

struct OrdinalSimulation {
    Estimate success;
    std::vector<Estimate> unmatched_top;  // index i: frequency of "top of first i is free after step i"
};
OrdinalSimulation simulate_ordinal(const OrdinalPolicy& policy, std::size_t trials, std::uint64_t seed,
                                   Execution exec = Execution::parallel, bool track_unmatched = false);

/// Pairs the subset by descending value: (1st, 2nd), (3rd, 4th), ...
/// `values[v]` is vertex v's value in 1..n.
Matching hard_instance_matching(std::span<const std::uint32_t> values, std::span<const Vertex> subset);

struct PolicySearch {
    std::string best_value;                       // exact rational
    double best_value_approx = 0.0;
    std::vector<std::vector<int>> maximizers;     // c_2..c_n
    bool threshold_maximizer = false;
    std::size_t threshold_l = 0;
};
/// Every 0/1 policy for n <= 8 in exact rational arithmetic.
PolicySearch exhaustive_policy_search(std::size_t n);

OrdinalPolicy policy_from_json(const nlohmann::json& j);
nlohmann::json policy_to_json(const OrdinalPolicy& policy);
OrdinalPolicy read_policy_file(const std::string& path);

}  // namespace secmatch
