#include "secmatch/edge_secretary.hpp"

#include <algorithm>

#include "secmatch/errors.hpp"

namespace secmatch {

EdgeInstance EdgeInstance::from_graph(const WeightedGraph& g) {
    EdgeInstance inst;
    inst.graph_ = g;
    inst.edges_ = g.positive_edges();
    for (const auto& e : inst.edges_) {
        inst.touched_.push_back(e.edge.u);
        inst.touched_.push_back(e.edge.v);
    }
    std::sort(inst.touched_.begin(), inst.touched_.end());
    inst.touched_.erase(std::unique(inst.touched_.begin(), inst.touched_.end()), inst.touched_.end());
    return inst;
}

std::size_t EdgeInstance::resource_of(Vertex v) const {
    const auto it = std::lower_bound(touched_.begin(), touched_.end(), v);
    if (it == touched_.end() || *it != v) throw InputError("vertex has no positive edge");
    return static_cast<std::size_t>(it - touched_.begin());
}

ResourceSet EdgeInstance::endpoint_mask(std::size_t e) const {
    if (touched_.size() > 64) throw CapacityError("availability masks support at most 64 endpoints");
    const auto& edge = edges_.at(e).edge;
    return (ResourceSet{1} << resource_of(edge.u)) | (ResourceSet{1} << resource_of(edge.v));
}

double EdgeInstance::optimum_weight() const {
    return matching_weight(max_weight_matching_of_edges(edges_), graph_);
}

AlphaSchedule alpha_recursive(std::size_t m) {
    if (m == 0) throw InputError("horizon must be positive");
    return contention_schedule(m, m / 2, 2.0);
}

double alpha_closed(std::size_t m, std::size_t t) {
    const std::size_t half = m / 2;
    if (t <= half) throw InputError("closed form holds only after the exploration phase");
    if (t > m) throw InputError("t exceeds the horizon");
    if (t == half + 1) return 1.0;
    const double a = static_cast<double>(half);
    const double b = static_cast<double>((m - 2) / 2);
    const double tt = static_cast<double>(t);
    return a * b / ((tt - 1.0) * (tt - 2.0));
}

std::vector<Designation> edge_designations(const EdgeInstance& inst, ItemSet arrived) {
    std::vector<WeightedEdge> sub;
    std::vector<std::size_t> ids;
    for (std::size_t e = 0; e < inst.m(); ++e) {
        if (arrived & item_bit(e)) {
            sub.push_back(inst.edges()[e]);
            ids.push_back(e);
        }
    }
    const Matching mu = max_weight_matching_of_edges(sub);
    std::vector<Designation> out(inst.m());
    for (std::size_t e : ids) {
        const auto& we = inst.edges()[e];
        if (mu.contains(we.edge)) out[e] = Designation{inst.endpoint_mask(e), we.weight, e};
    }
    return out;
}

ContentionModel edge_model(const EdgeInstance& inst) {
    if (inst.m() > 64) throw CapacityError("the contention engine supports at most 64 edges");
    ContentionModel model;
    model.items = inst.m();
    model.resources = inst.touched().size();
    model.schedule = inst.m() == 0 ? contention_schedule(0, 0, 2.0) : alpha_recursive(inst.m());
    for (std::size_t e = 0; e < inst.m(); ++e) model.own_mask.push_back(inst.endpoint_mask(e));
    model.designate = [inst](ItemSet arrived) { return edge_designations(inst, arrived); };
    return model;
}

ContentionDP exact_edge_oracle(const EdgeInstance& inst, std::size_t limit) {
    return ContentionDP(edge_model(inst), limit);
}

double exact_availability(const EdgeInstance& inst, ItemSet q, std::size_t e, std::size_t limit) {
    if (e >= inst.m() || (q & item_bit(e))) throw InputError("edge must lie outside Q");
    if (q >> inst.m()) throw InputError("Q references unknown edges");
    const ContentionDP dp = exact_edge_oracle(inst, limit);
    return dp.x(q | item_bit(e), e);
}

NestedEstimate mc_availability(const EdgeInstance& inst, ItemSet q, std::size_t e, std::size_t trials,
                               std::size_t inner_trials, std::uint64_t seed, double wide_threshold) {
    const ContentionModel model = edge_model(inst);
    return nested_availability(model, q, e, trials, inner_trials, seed, wide_threshold);
}

EdgeRunTrace run_edge_algorithm(const EdgeInstance& inst, std::span<const std::size_t> order,
                                AvailabilityOracle& oracle, Rng& coins) {
    const ContentionModel model = edge_model(inst);
    EdgeRunTrace out;
    out.detail = run_contention(model, order, oracle, coins);
    std::vector<Edge> taken;
    for (std::size_t e : out.detail.accepted) taken.push_back(inst.edges()[e].edge);
    out.matching = Matching(std::move(taken));
    out.weight = out.detail.weight;
    return out;
}

ExactEvaluation exact_edge_evaluation(const EdgeInstance& inst) {
    if (inst.m() > 8) throw CapacityError("exact expected value needs m <= 8");
    const ContentionModel model = edge_model(inst);
    const ContentionDP dp(model);
    return exact_contention_evaluation(model, dp);
}

double exact_expected_value(const EdgeInstance& inst) { return exact_edge_evaluation(inst).expected_value; }

double edge_in_optimum_mass(const EdgeInstance& inst, ItemSet q, Vertex u, std::size_t i) {
    if (inst.m() > ContentionDP::kDefaultLimit) throw CapacityError("exhaustive mass needs m <= 14");
    if (q >> inst.m()) throw InputError("Q references unknown edges");
    const std::size_t t = set_size(q) + 1;
    if (i < 1 || i >= t) throw InputError("need 1 <= i < t");
    std::vector<std::size_t> members;
    for (std::size_t e = 0; e < inst.m(); ++e)
        if (q & item_bit(e)) members.push_back(e);
    const std::size_t n = members.size();
    // Each S with |S| = i is weighted 1 / C(t-2, i-1) for every e in S.
    double combos = 1.0;
    for (std::size_t j = 1; j <= i - 1; ++j)
        combos = combos * static_cast<double>(t - 2 - (i - 1) + j) / static_cast<double>(j);
    double total = 0.0;
    for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << n); ++pick) {
        if (set_size(pick) != i) continue;
        ItemSet s = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (pick & (std::uint64_t{1} << j)) s |= item_bit(members[j]);
        const auto des = edge_designations(inst, s);
        for (std::size_t e = 0; e < inst.m(); ++e)
            if ((s & item_bit(e)) && des[e].mask != 0 && inst.edges()[e].edge.touches(u)) total += 1.0;
    }
    return total / combos;
}

double edge_telescoping_coefficient(std::size_t m) {
    if (m < 4) throw InputError("coefficient is defined for m >= 4");
    const double half = static_cast<double>(m / 2);
    const double lower = static_cast<double>((m - 2) / 2);
    const double mm = static_cast<double>(m);
    return half * lower * (1.0 / (half - 1.0) - 1.0 / (mm - 1.0)) / mm;
}

nlohmann::json edge_trace_to_json(const EdgeInstance& inst, const EdgeRunTrace& trace) {
    nlohmann::json j = contention_trace_to_json(trace.detail);
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t e = 0; e < inst.m(); ++e) {
        const auto& we = inst.edges()[e];
        edges.push_back({we.edge.u, we.edge.v, we.weight});
    }
    j["edges"] = edges;
    j["matching"] = matching_to_json(trace.matching);
    return j;
}

}  // namespace secmatch
