#include "secmatch/ordinal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "secmatch/rng.hpp"

namespace secmatch {

OrdinalPolicy OrdinalPolicy::zeros(std::size_t n) {
    if (n < 1) throw InputError("policy needs n >= 1");
    return OrdinalPolicy{n, std::vector<double>(n + 1, 0.0)};
}

OrdinalPolicy OrdinalPolicy::threshold(std::size_t n, std::size_t l) {
    if (l < 1 || l > n) throw InputError("threshold needs 1 <= l <= n");
    OrdinalPolicy p = zeros(n);
    for (std::size_t i = l + 1; i <= n; ++i) p.c[i] = 1.0;
    return p;
}

void OrdinalPolicy::validate() const {
    if (n < 1) throw InputError("policy needs n >= 1");
    if (c.size() != n + 1) throw InputError("policy vector must hold c[0..n]");
    for (double v : c)
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw InputError("policy entries must lie in [0, 1]");
}

PolicyState policy_state(const OrdinalPolicy& policy) {
    policy.validate();
    return policy_state_t<double>(policy.n, policy.c);
}

double objective_sum(const OrdinalPolicy& policy) {
    policy.validate();
    return objective_sum_t<double>(policy.n, policy.c);
}

double objective(const OrdinalPolicy& policy) {
    policy.validate();
    return objective_t<double>(policy.n, policy.c);
}

std::vector<double> gradient(const OrdinalPolicy& policy) {
    policy.validate();
    const std::size_t n = policy.n;
    const auto s = policy_state_t<double>(n, policy.c);
    std::vector<double> g(n + 1, 0.0);
    double x = 0.0;  // x_i
    for (std::size_t i = n; i >= 2; --i) {
        const double im1 = static_cast<double>(i - 1);
        g[i] = s.q[i - 1] * (1.0 - 2.0 * x / im1);
        x = x * (1.0 - 2.0 * policy.c[i] / im1) + policy.c[i];
    }
    return g;
}

double threshold_value(std::size_t n, std::size_t l) {
    if (n < 3) throw InputError("threshold value needs n >= 3");
    if (l < 1 || l > n) throw InputError("threshold needs 1 <= l <= n");
    const double nn = static_cast<double>(n);
    const double ll = static_cast<double>(l);
    const double f = (nn * nn - nn - ll * ll + ll) / 6.0 +
                     (2.0 / 3.0) * ll * (ll - 1.0) * (1.0 - (ll - 2.0) / (nn - 2.0));
    return f / (nn * (nn - 1.0) / 2.0);
}

double threshold_value_by_terms(std::size_t n, std::size_t l) {
    if (n < 3) throw InputError("threshold value needs n >= 3");
    if (l < 1 || l > n) throw InputError("threshold needs 1 <= l <= n");
    const double ll = static_cast<double>(l);
    const double cube = 2.0 * ll * (ll - 1.0) * (ll - 2.0) / 3.0;
    CompensatedSum f;
    for (std::size_t i = l; i + 1 <= n; ++i) {
        const double ii = static_cast<double>(i);
        if (i == l)
            f.add(ii);  // q_i = i while nothing has been matched
        else if (i == 2)
            f.add(0.0);  // l = 1: the first two arrivals are always matched
        else
            f.add(ii / 3.0 + cube / ((ii - 1.0) * (ii - 2.0)));
    }
    const double nn = static_cast<double>(n);
    return f.value() / (nn * (nn - 1.0) / 2.0);
}

ThresholdOptimum optimal_threshold(std::size_t n) {
    if (n < 3) throw InputError("optimal threshold needs n >= 3");
    std::vector<double> values(n + 1, 0.0);
    ThresholdOptimum best;
    best.value = -1.0;
    for (std::size_t l = 1; l <= n; ++l) {
        values[l] = threshold_value(n, l);
        if (values[l] > best.value) {
            best.value = values[l];
            best.l = l;
        }
    }
    const double tol = 1e-12 * std::abs(best.value);
    for (std::size_t l = 1; l <= n; ++l)
        if (values[l] >= best.value - tol) best.ties.push_back(l);
    return best;
}

double ordinal_g(double x) { return 1.0 / 6.0 + x * x / 2.0 - 2.0 * x * x * x / 3.0; }

OrdinalSimulation simulate_ordinal(const OrdinalPolicy& policy, std::size_t trials, std::uint64_t seed,
                                   Execution exec, bool track_unmatched) {
    policy.validate();
    if (trials < 1) throw InputError("trials must be >= 1");
    const std::size_t n = policy.n;
    std::vector<std::uint8_t> success(trials, 0);
    std::vector<std::uint8_t> free_top(track_unmatched ? trials * n : 0, 0);

    for_each_trial(exec, trials, [&](std::size_t trial) {
        Rng order_rng = make_rng(seed, trial, Stream::order);
        Rng coin_rng = make_rng(seed, trial, Stream::coins);
        const auto values = random_permutation<std::uint32_t>(n, order_rng);
        // Current top two by value, their matched flags, and whether they are matched to each other.
        long long top1 = -1, top2 = -1;
        bool m1 = false, m2 = false, together = false;
        for (std::size_t t = 1; t <= n; ++t) {
            const long long x = values[t - 1];
            bool in_top = true;
            if (x > top1) {
                top2 = top1;
                m2 = m1;
                top1 = x;
                m1 = false;
                together = false;
            } else if (x > top2) {
                top2 = x;
                m2 = false;
                together = false;
            } else {
                in_top = false;
            }
            if (in_top && t >= 2 && !m1 && !m2) {
                const double c = policy.c[t];
                const bool take = c >= 1.0 || (c > 0.0 && uniform01(coin_rng) < c);
                if (take) m1 = m2 = together = true;
            }
            if (track_unmatched) free_top[trial * n + (t - 1)] = m1 ? 0 : 1;
        }
        success[trial] = together ? 1 : 0;
    });

    OrdinalSimulation out;
    std::size_t hits = 0;
    for (auto s : success) hits += s;
    out.success = bernoulli_estimate(hits, trials);
    if (track_unmatched) {
        out.unmatched_top.assign(n + 1, Estimate{});
        for (std::size_t i = 1; i <= n; ++i) {
            std::size_t count = 0;
            for (std::size_t trial = 0; trial < trials; ++trial) count += free_top[trial * n + (i - 1)];
            out.unmatched_top[i] = bernoulli_estimate(count, trials);
        }
    }
    return out;
}

Matching hard_instance_matching(std::span<const std::uint32_t> values, std::span<const Vertex> subset) {
    const std::size_t n = values.size();
    std::vector<char> seen(n + 1, 0);
    for (auto v : values) {
        if (v < 1 || v > n || seen[v]) throw InputError("values must be a permutation of 1..n");
        seen[v] = 1;
    }
    if (subset.size() % 2 != 0) throw InputError("hard instance matching needs an even subset");
    std::vector<Vertex> ids(subset.begin(), subset.end());
    std::vector<char> used(n, 0);
    for (auto v : ids) {
        if (v >= n || used[v]) throw InputError("subset ids must be distinct and in range");
        used[v] = 1;
    }
    std::sort(ids.begin(), ids.end(), [&](Vertex a, Vertex b) { return values[a] > values[b]; });
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < ids.size(); i += 2) edges.emplace_back(ids[i], ids[i + 1]);
    return Matching(std::move(edges));
}

PolicySearch exhaustive_policy_search(std::size_t n) {
    using boost::multiprecision::cpp_rational;
    if (n < 2) throw InputError("policy search needs n >= 2");
    if (n > 8) throw CapacityError("exhaustive policy search is limited to n <= 8");
    const std::size_t bits = n - 1;  // c_2..c_n
    PolicySearch out;
    cpp_rational best(-1);
    std::vector<std::uint32_t> best_masks;
    std::vector<cpp_rational> c(n + 1, cpp_rational(0));
    for (std::uint32_t mask = 0; mask < (1u << bits); ++mask) {
        for (std::size_t i = 2; i <= n; ++i) c[i] = cpp_rational((mask >> (i - 2)) & 1u);
        const cpp_rational v = objective_t<cpp_rational>(n, std::span<const cpp_rational>(c));
        if (v > best) {
            best = v;
            best_masks.clear();
        }
        if (v == best) best_masks.push_back(mask);
    }
    out.best_value = best.str();
    out.best_value_approx = static_cast<double>(best);
    for (auto mask : best_masks) {
        std::vector<int> bitsv(bits);
        for (std::size_t j = 0; j < bits; ++j) bitsv[j] = static_cast<int>((mask >> j) & 1u);
        // Threshold shape: zeros then ones.
        const bool shaped = std::is_sorted(bitsv.begin(), bitsv.end());
        if (shaped && !out.threshold_maximizer) {
            out.threshold_maximizer = true;
            out.threshold_l = 1 + static_cast<std::size_t>(std::count(bitsv.begin(), bitsv.end(), 0));
        }
        out.maximizers.push_back(std::move(bitsv));
    }
    return out;
}

OrdinalPolicy policy_from_json(const nlohmann::json& j) {
    try {
        OrdinalPolicy p;
        p.n = j.at("n").get<std::size_t>();
        const auto c = j.at("c").get<std::vector<double>>();
        if (c.size() != p.n) throw InputError("policy \"c\" must list c_1..c_n");
        p.c.assign(1, 0.0);
        p.c.insert(p.c.end(), c.begin(), c.end());
        p.validate();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad policy json: ") + e.what());
    }
}

nlohmann::json policy_to_json(const OrdinalPolicy& policy) {
    policy.validate();
    return {{"n", policy.n}, {"c", std::vector<double>(policy.c.begin() + 1, policy.c.end())}};
}

OrdinalPolicy read_policy_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open policy file: " + path);
    try {
        return policy_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("cannot parse " + path + ": " + e.what());
    }
}

}  // namespace secmatch
