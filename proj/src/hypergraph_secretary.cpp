#include "secmatch/hypergraph_secretary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "secmatch/errors.hpp"

namespace secmatch {

void BipartiteHypergraph::validate() const {
    if (d < 1) throw InputError("d must be positive");
    std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> seen;
    for (const auto& e : edges) {
        if (e.v >= m) throw InputError("online vertex out of range");
        if (e.s.empty() || e.s.size() > d) throw InputError("hyperedge must have between 1 and d offline vertices");
        for (std::size_t i = 0; i < e.s.size(); ++i) {
            if (e.s[i] >= r) throw InputError("offline vertex out of range");
            if (i > 0 && e.s[i - 1] >= e.s[i]) throw InputError("offline set must be sorted and distinct");
        }
        if (!(e.w > 0.0) || !std::isfinite(e.w)) throw InputError("hyperedge weight must be positive and finite");
        seen.emplace_back(e.v, e.s);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) throw InputError("duplicate hyperedge");
}

double f_d(std::size_t d) {
    if (d < 2) throw InputError("f_d needs d >= 2");
    return std::pow(static_cast<double>(d), -1.0 / static_cast<double>(d - 1));
}

std::size_t hyper_cutoff(std::size_t m, std::size_t d) {
    return static_cast<std::size_t>(std::floor(f_d(d) * static_cast<double>(m)));
}

AlphaSchedule hyper_alpha_recursive(std::size_t m, std::size_t d) {
    if (d < 2) throw InputError("schedule needs d >= 2");
    if (m == 0) throw InputError("horizon must be positive");
    return contention_schedule(m, hyper_cutoff(m, d), static_cast<double>(d));
}

double hyper_alpha_closed(std::size_t m, std::size_t d, std::size_t t) {
    const std::size_t c = hyper_cutoff(m, d);
    if (t <= c) throw InputError("closed form holds only after the exploration phase");
    if (t > m) throw InputError("t exceeds the horizon");
    if (t == c + 1) return 1.0;
    if (c < d) return 0.0;
    double p = 1.0;
    for (std::size_t i = 1; i <= d; ++i)
        p *= static_cast<double>(c + 1 - i) / static_cast<double>(t - i);
    return p;
}

namespace {

std::uint32_t offline_mask(const HyperEdge& e) {
    std::uint32_t mask = 0;
    for (auto u : e.s) mask |= std::uint32_t{1} << u;
    return mask;
}

}  // namespace

HyperMatching max_weight_hyper_matching(const BipartiteHypergraph& h, std::span<const std::uint32_t> online,
                                        std::size_t offline_limit) {
    if (h.r > std::min<std::size_t>(offline_limit, 32))
        throw CapacityError("exact hypergraph matching supports at most " + std::to_string(offline_limit) +
                            " offline vertices");
    std::vector<std::uint32_t> verts(online.begin(), online.end());
    std::sort(verts.begin(), verts.end());
    if (std::adjacent_find(verts.begin(), verts.end()) != verts.end()) throw InputError("duplicate online vertex");
    for (auto v : verts)
        if (v >= h.m) throw InputError("online vertex out of range");
    std::vector<std::vector<std::size_t>> incident(verts.size());
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
        const auto it = std::lower_bound(verts.begin(), verts.end(), h.edges[e].v);
        if (it != verts.end() && *it == h.edges[e].v) incident[static_cast<std::size_t>(it - verts.begin())].push_back(e);
    }
    std::vector<std::uint32_t> masks(h.edges.size());
    for (std::size_t e = 0; e < h.edges.size(); ++e) masks[e] = offline_mask(h.edges[e]);

    const std::size_t k = verts.size();
    std::vector<std::unordered_map<std::uint32_t, double>> memo(k + 1);
    auto best = [&](auto&& self, std::size_t i, std::uint32_t used) -> double {
        if (i == k) return 0.0;
        if (auto it = memo[i].find(used); it != memo[i].end()) return it->second;
        double v = self(self, i + 1, used);
        for (std::size_t e : incident[i])
            if ((used & masks[e]) == 0) v = std::max(v, h.edges[e].w + self(self, i + 1, used | masks[e]));
        memo[i].emplace(used, v);
        return v;
    };
    HyperMatching out;
    std::uint32_t used = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double target = best(best, i, used);
        for (std::size_t e : incident[i]) {
            if ((used & masks[e]) == 0 && h.edges[e].w + best(best, i + 1, used | masks[e]) == target) {
                out.edges.push_back(e);
                out.weight += h.edges[e].w;
                used |= masks[e];
                break;
            }
        }
    }
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

HyperMatching max_weight_hyper_matching(const BipartiteHypergraph& h, ItemSet online, std::size_t offline_limit) {
    std::vector<std::uint32_t> verts;
    for (std::uint32_t v = 0; v < 64 && v < h.m; ++v)
        if (online & item_bit(v)) verts.push_back(v);
    return max_weight_hyper_matching(h, verts, offline_limit);
}

std::vector<Designation> hyper_designations(const BipartiteHypergraph& h, ItemSet arrived) {
    const HyperMatching mu = max_weight_hyper_matching(h, arrived);
    std::vector<Designation> out(h.m);
    for (std::size_t e : mu.edges) out[h.edges[e].v] = Designation{offline_mask(h.edges[e]), h.edges[e].w, e};
    return out;
}

ContentionModel hyper_model(const BipartiteHypergraph& h) {
    h.validate();
    if (h.m > 64) throw CapacityError("the contention engine supports at most 64 online vertices");
    if (h.r > kHyperOfflineLimit) throw CapacityError("at most 20 offline vertices are supported");
    ContentionModel model;
    model.items = h.m;
    model.resources = h.r;
    model.schedule = h.m == 0 ? contention_schedule(0, 0, static_cast<double>(h.d))
                              : hyper_alpha_recursive(h.m, h.d);
    model.own_mask.assign(h.m, 0);
    model.designate = [h](ItemSet arrived) { return hyper_designations(h, arrived); };
    return model;
}

HyperRunTrace run_hypergraph_algorithm(const BipartiteHypergraph& h, std::span<const std::size_t> order,
                                       AvailabilityOracle& oracle, Rng& coins) {
    const ContentionModel model = hyper_model(h);
    HyperRunTrace out;
    out.detail = run_contention(model, order, oracle, coins);
    out.matching.edges = out.detail.accepted_tags;
    std::sort(out.matching.edges.begin(), out.matching.edges.end());
    out.matching.weight = out.detail.weight;
    return out;
}

double hyper_coefficient(std::size_t m, std::size_t d) {
    if (d < 2) throw InputError("coefficient needs d >= 2");
    const std::size_t c = hyper_cutoff(m, d);
    if (c <= d) throw InputError("coefficient needs floor(f_d m) > d");
    double head = 1.0;
    for (std::size_t i = 1; i <= d; ++i) head *= static_cast<double>(c + 1 - i);
    double a = 1.0;
    double b = 1.0;
    for (std::size_t i = 1; i < d; ++i) {
        a /= static_cast<double>(c - i);
        b /= static_cast<double>(m - i);
    }
    return head / static_cast<double>(m) / static_cast<double>(d - 1) * (a - b);
}

BipartiteHypergraph embed_edge_instance(const EdgeInstance& inst) {
    BipartiteHypergraph h;
    h.m = inst.m();
    h.r = inst.touched().size();
    h.d = 2;
    for (std::size_t e = 0; e < inst.m(); ++e) {
        const auto& we = inst.edges()[e];
        h.edges.push_back(HyperEdge{static_cast<std::uint32_t>(e),
                                    {static_cast<std::uint32_t>(inst.resource_of(we.edge.u)),
                                     static_cast<std::uint32_t>(inst.resource_of(we.edge.v))},
                                    we.weight});
    }
    return h;
}

BipartiteHypergraph pad_hypergraph(const BipartiteHypergraph& h, std::size_t extra) {
    BipartiteHypergraph out = h;
    out.m += extra;
    return out;
}

double hyper_optimum_weight(const BipartiteHypergraph& h) {
    std::vector<std::uint32_t> all(h.m);
    for (std::size_t v = 0; v < h.m; ++v) all[v] = static_cast<std::uint32_t>(v);
    return max_weight_hyper_matching(h, all).weight;
}

ExactEvaluation exact_hyper_evaluation(const BipartiteHypergraph& h) {
    if (h.m > 8) throw CapacityError("exact expected value needs m <= 8");
    const ContentionModel model = hyper_model(h);
    const ContentionDP dp(model);
    return exact_contention_evaluation(model, dp);
}

BipartiteHypergraph hypergraph_from_json(const nlohmann::json& j) {
    try {
        BipartiteHypergraph h;
        h.m = j.at("m").get<std::size_t>();
        h.r = j.at("r").get<std::size_t>();
        h.d = j.at("d").get<std::size_t>();
        for (const auto& e : j.at("edges")) {
            HyperEdge he;
            he.v = e.at("v").get<std::uint32_t>();
            he.s = e.at("s").get<std::vector<std::uint32_t>>();
            std::sort(he.s.begin(), he.s.end());
            he.w = e.at("w").get<double>();
            h.edges.push_back(std::move(he));
        }
        h.validate();
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("hypergraph json: ") + e.what());
    }
}

nlohmann::json hypergraph_to_json(const BipartiteHypergraph& h) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : h.edges) edges.push_back({{"v", e.v}, {"s", e.s}, {"w", e.w}});
    return {{"m", h.m}, {"r", h.r}, {"d", h.d}, {"edges", edges}};
}

BipartiteHypergraph read_hypergraph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open hypergraph file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    return hypergraph_from_json(j);
}

nlohmann::json hyper_trace_to_json(const HyperRunTrace& trace) {
    nlohmann::json j = contention_trace_to_json(trace.detail);
    j["matching"] = trace.matching.edges;
    return j;
}

}  // namespace secmatch
