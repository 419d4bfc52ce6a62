#include "secmatch/vertex_secretary.hpp"

#include <algorithm>
#include <numeric>

#include "secmatch/errors.hpp"
#include "secmatch/incremental_matching.hpp"
#include "secmatch/positive_matching.hpp"

namespace secmatch {

namespace {

class Fenwick {
public:
    explicit Fenwick(std::size_t n) : n_(n), tree_(n + 1, 0) {
        while ((std::size_t{1} << (log_ + 1)) <= n_) ++log_;
    }

    void add(std::size_t i, int delta) {
        for (++i; i <= n_; i += i & (~i + 1)) tree_[i] += delta;
    }

    /// Number of marked positions in [0, i].
    int prefix(std::size_t i) const {
        int s = 0;
        for (++i; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }

    /// Position of the rank-th marked entry (rank >= 1).
    std::size_t select(int rank) const {
        std::size_t pos = 0;
        for (int b = log_; b >= 0; --b) {
            const std::size_t next = pos + (std::size_t{1} << b);
            if (next <= n_ && tree_[next] < rank) {
                pos = next;
                rank -= tree_[next];
            }
        }
        return pos;
    }

private:
    std::size_t n_;
    int log_ = 0;
    std::vector<int> tree_;
};

constexpr std::size_t kIncrementalLimit = 1024;

bool all_pairs_positive(const WeightedGraph& g) {
    for (Vertex v = 0; v < g.size(); ++v)
        if (g.positive_neighbors(v).size() + 1 != g.size()) return false;
    return true;
}

// Answers mu_t(v) for the current vertex set, where mu_t is the matching the
// rule prescribes (positive part, then ascending zero-weight completion).
class PartnerSolver {
public:
    PartnerSolver(const WeightedGraph& g, MatchingRule rule)
        : g_(g), rule_(rule), member_(g.size(), 0), fenwick_(g.size()) {
        if (rule == MatchingRule::exact && g.size() >= 2 && g.size() <= kIncrementalLimit &&
            all_pairs_positive(g)) {
            incremental_.emplace(g);
        } else {
            for (Vertex v = 0; v < g.size(); ++v)
                if (!g.positive_neighbors(v).empty()) support_.push_back(v);
        }
    }

    void insert(Vertex v) {
        if (incremental_) {
            incremental_->insert(v);
            return;
        }
        member_[v] = 1;
        fenwick_.add(v, 1);
        ++count_;
    }

    void erase(Vertex v) {
        if (incremental_) {
            incremental_->erase(v);
            return;
        }
        member_[v] = 0;
        fenwick_.add(v, -1);
        --count_;
    }

    std::optional<Vertex> partner(Vertex v) {
        if (incremental_) {
            incremental_->solve();
            return incremental_->partner(v);
        }
        active_.clear();
        for (Vertex s : support_)
            if (member_[s]) active_.push_back(s);
        if (!cached_ || active_ != cached_active_) {
            cached_pairs_ = rule_ == MatchingRule::exact ? detail::positive_max_matching(g_, active_)
                                                         : detail::positive_greedy_matching(g_, active_);
            cached_active_ = active_;
            cached_ = true;
        }
        const auto& pairs = cached_pairs_;
        for (const auto& e : pairs)
            if (e.touches(v)) return e.other(v);
        for (const auto& e : pairs) {
            fenwick_.add(e.u, -1);
            fenwick_.add(e.v, -1);
        }
        const int left = static_cast<int>(count_ - 2 * pairs.size());
        const int rank = fenwick_.prefix(v);
        std::optional<Vertex> out;
        if (rank % 2 == 1) {
            if (rank + 1 <= left) out = static_cast<Vertex>(fenwick_.select(rank + 1));
        } else {
            out = static_cast<Vertex>(fenwick_.select(rank - 1));
        }
        for (const auto& e : pairs) {
            fenwick_.add(e.u, 1);
            fenwick_.add(e.v, 1);
        }
        return out;
    }

private:
    const WeightedGraph& g_;
    MatchingRule rule_;
    std::optional<detail::IncrementalPerfectMatcher> incremental_;
    std::vector<char> member_;
    Fenwick fenwick_;
    std::size_t count_ = 0;
    std::vector<Vertex> support_;
    std::vector<Vertex> active_;
    bool cached_ = false;
    std::vector<Vertex> cached_active_;
    std::vector<Edge> cached_pairs_;
};

DropPolicy uniform_drop(Rng& rng) {
    return [&rng](std::size_t t) { return uniform_index(rng, 1, t - 1); };
}

}  // namespace

void check_order(std::span<const Vertex> order, std::size_t n) {
    if (order.size() != n) throw InputError("arrival order length differs from vertex count");
    std::vector<char> seen(n, 0);
    for (Vertex v : order) {
        if (v >= n || seen[v]) throw InputError("arrival order is not a permutation");
        seen[v] = 1;
    }
}

VertexRunTrace run_vertex_steps(const VertexInstance& inst, std::span<const Vertex> order,
                                std::size_t k, std::size_t horizon, MatchingRule rule,
                                const DropPolicy& drop) {
    const std::size_t n = inst.n();
    check_order(order, n);
    if (k > n) throw InputError("exploration length exceeds vertex count");
    if (horizon < k || horizon > n) throw InputError("horizon must lie in [k, n]");

    PartnerSolver solver(inst.graph, rule);
    for (std::size_t i = 0; i < k; ++i) solver.insert(order[i]);
    std::vector<char> matched(n, 0);
    std::vector<Edge> edges;
    VertexRunTrace trace;
    std::optional<Vertex> pending;
    for (std::size_t t = k + 1; t <= horizon; ++t) {
        VertexStep step;
        step.t = t;
        const Vertex v = order[t - 1];
        step.arrival = v;
        if (pending) {
            solver.insert(*pending);
            pending.reset();
        }
        solver.insert(v);
        if (t % 2 == 1 && t >= 3) {
            const std::size_t r = drop(t);
            if (r < 1 || r > t - 1) throw InputError("drop index outside {1, ..., t-1}");
            pending = order[r - 1];
            solver.erase(*pending);
            step.dropped_index = r;
            step.dropped = pending;
        }
        if (t >= 2) {
            step.partner = solver.partner(v);
            if (step.partner && !matched[*step.partner]) {
                matched[v] = matched[*step.partner] = 1;
                edges.emplace_back(v, *step.partner);
                trace.weight += inst.graph.weight(v, *step.partner);
                step.matched = true;
            }
        }
        trace.steps.push_back(step);
    }
    trace.matching = Matching(std::move(edges));
    return trace;
}

VertexRunTrace run_vertex_algorithm(const VertexInstance& inst, std::span<const Vertex> order,
                                    std::size_t k, const DropPolicy& drop) {
    return run_vertex_steps(inst, order, k, inst.n(), MatchingRule::exact, drop);
}

VertexRunTrace run_vertex_algorithm(const VertexInstance& inst, std::span<const Vertex> order,
                                    std::size_t k, Rng& rng) {
    return run_vertex_algorithm(inst, order, k, uniform_drop(rng));
}

VertexRunTrace run_vertex_ordinal_greedy(const VertexInstance& inst, std::span<const Vertex> order,
                                         std::size_t k, const DropPolicy& drop) {
    return run_vertex_steps(inst, order, k, inst.n(), MatchingRule::greedy, drop);
}

VertexRunTrace run_vertex_ordinal_greedy(const VertexInstance& inst, std::span<const Vertex> order,
                                         std::size_t k, Rng& rng) {
    return run_vertex_ordinal_greedy(inst, order, k, uniform_drop(rng));
}

double p_recursive(std::size_t k, std::size_t t) {
    if (t < k) throw InputError("p(k,t) requires t >= k");
    double p = 0.0;
    for (std::size_t s = k + 1; s <= t; ++s) {
        const double ds = static_cast<double>(s);
        p = 2.0 / ds + ((ds - 3.0) / ds) * p;
    }
    return p;
}

double p_closed(std::size_t k, std::size_t t) {
    if (k < 3) throw InputError("closed form requires k >= 3");
    if (t < k) throw InputError("p(k,t) requires t >= k");
    const double kk = static_cast<double>(k);
    const double tt = static_cast<double>(t);
    const double ratio = (kk / tt) * ((kk - 1.0) / (tt - 1.0)) * ((kk - 2.0) / (tt - 2.0));
    return (2.0 / 3.0) * (1.0 - ratio);
}

VertexInstance pad_with_auxiliary(const VertexInstance& inst, std::size_t m_aux) {
    return VertexInstance{inst.graph.with_isolated(m_aux)};
}

Estimate estimate_match_probability(const VertexInstance& inst, std::size_t k, std::size_t t,
                                    Vertex u, std::size_t trials, std::uint64_t seed,
                                    Execution exec) {
    const std::size_t n = inst.n();
    if (k > t || t > n) throw InputError("need k <= t <= n");
    if (u >= n) throw InputError("probed vertex out of range");
    if (trials == 0) throw InputError("trials must be positive");
    std::vector<char> hit(trials, 0);
    for_each_trial(exec, trials, [&](std::size_t i) {
        Rng order_rng = make_rng(seed, i, Stream::order);
        Rng coins = make_rng(seed, i, Stream::coins);
        std::vector<Vertex> order;
        for (;;) {
            order = random_permutation(n, order_rng);
            if (std::find(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(t), u) !=
                order.begin() + static_cast<std::ptrdiff_t>(t))
                break;
        }
        const auto trace = run_vertex_steps(inst, order, k, t, MatchingRule::exact, uniform_drop(coins));
        hit[i] = trace.matching.covers(u) ? 1 : 0;
    });
    const auto successes = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    return bernoulli_estimate(successes, trials);
}

double exact_vertex_expected_value(const VertexInstance& inst, std::size_t k, MatchingRule rule) {
    const std::size_t n = inst.n();
    if (n > 8) throw CapacityError("exact vertex enumeration is limited to n <= 8");
    if (k > n) throw InputError("exploration length exceeds vertex count");
    std::vector<std::size_t> odd_steps;
    for (std::size_t t = k + 1; t <= n; ++t)
        if (t % 2 == 1 && t >= 3) odd_steps.push_back(t);
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    CompensatedSum total;
    std::size_t runs = 0;
    do {
        std::vector<std::size_t> choice(odd_steps.size(), 1);
        for (;;) {
            const DropPolicy drop = [&](std::size_t t) {
                const auto idx = std::find(odd_steps.begin(), odd_steps.end(), t) - odd_steps.begin();
                return choice[static_cast<std::size_t>(idx)];
            };
            total.add(run_vertex_steps(inst, order, k, n, rule, drop).weight);
            ++runs;
            std::size_t j = 0;
            while (j < choice.size() && choice[j] == odd_steps[j] - 1) choice[j++] = 1;
            if (j == choice.size()) break;
            ++choice[j];
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return total.value() / static_cast<double>(runs);
}

nlohmann::json vertex_trace_to_json(const VertexRunTrace& trace) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : trace.steps) {
        nlohmann::json j = {{"t", s.t}, {"arrival", s.arrival}, {"matched", s.matched}};
        j["dropped_index"] = s.dropped_index ? nlohmann::json(*s.dropped_index) : nlohmann::json(nullptr);
        j["dropped"] = s.dropped ? nlohmann::json(*s.dropped) : nlohmann::json(nullptr);
        j["partner"] = s.partner ? nlohmann::json(*s.partner) : nlohmann::json(nullptr);
        steps.push_back(std::move(j));
    }
    return {{"matching", matching_to_json(trace.matching)}, {"weight", trace.weight}, {"steps", steps}};
}

}  // namespace secmatch
