#pragma once

// Shared machinery for the edge- and hypergraph-arrival algorithms. Items
// (edges, or online vertices) arrive in random order; after the exploration
// cutoff, the arriving item's designated resource set (its edge in the
// current optimum, if any) is claimed with probability alpha_t / x_t, where
// x_t is the probability that the set is still free given the arrived set.
// Items and resources are indexed by bit positions of 64-bit masks.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "secmatch/rng.hpp"
#include "secmatch/stats.hpp"

namespace secmatch {

using ItemSet = std::uint64_t;
using ResourceSet = std::uint64_t;

inline ItemSet item_bit(std::size_t i) { return ItemSet{1} << i; }
inline std::size_t set_size(std::uint64_t s) { return static_cast<std::size_t>(__builtin_popcountll(s)); }

/// alpha[t] for t = 1..m (alpha[0] unused). Zero through the cutoff.
struct AlphaSchedule {
    std::size_t m = 0;
    std::size_t cutoff = 0;
    double d = 2.0;
    std::vector<double> alpha;

    double at(std::size_t t) const { return alpha.at(t); }
};

/// alpha_t = max(0, 1 - d * sum_{i<t} alpha_i / i) after the cutoff.
AlphaSchedule contention_schedule(std::size_t m, std::size_t cutoff, double d);

struct Designation {
    ResourceSet mask = 0;  // 0: the item is not in the current optimum
    double weight = 0.0;
    std::size_t tag = 0;   // caller's id for the designated edge
};

struct ContentionModel {
    std::size_t items = 0;
    std::size_t resources = 0;
    AlphaSchedule schedule;
    /// Designations for every item of the arrived set (index = item).
    std::function<std::vector<Designation>(ItemSet)> designate;
    /// Resources an item would claim regardless of the optimum (edges), or 0.
    std::vector<ResourceSet> own_mask;
};

/// Resource mask whose availability defines x for (arrived set, item).
inline ResourceSet probed_mask(const ContentionModel& model, const Designation& d, std::size_t item) {
    return d.mask != 0 ? d.mask : model.own_mask.at(item);
}

/// min(1, alpha / x). Clamped means x falls below alpha beyond rounding.
inline double acceptance_probability(double alpha, double x, bool& clamped) {
    clamped = x < alpha * (1.0 - 1e-12);
    return x > alpha ? alpha / x : 1.0;
}

using MaskDistribution = std::vector<std::pair<ResourceSet, double>>;  // sorted by mask

class AvailabilityOracle {
public:
    virtual ~AvailabilityOracle() = default;
    /// x for item `item` arriving last among `arrived` (which contains it).
    virtual double availability(ItemSet arrived, std::size_t item, ResourceSet mask) = 0;
};

/// Exact availabilities by dynamic programming over arrived subsets: D(S) is
/// the distribution of used resources after a uniformly random order of S.
/// Built eagerly; read-only afterwards and safe to share across threads.
class ContentionDP : public AvailabilityOracle {
public:
    static constexpr std::size_t kDefaultLimit = 14;

    explicit ContentionDP(const ContentionModel& model, std::size_t limit = kDefaultLimit);

    std::size_t items() const noexcept { return m_; }
    const AlphaSchedule& schedule() const noexcept { return schedule_; }
    const MaskDistribution& distribution(ItemSet s) const { return dist_.at(s); }
    /// Designation of `item` in the optimum of `arrived` (after the cutoff only).
    const Designation& designation(ItemSet arrived, std::size_t item) const;
    /// Exact x for the item's probed mask.
    double x(ItemSet arrived, std::size_t item) const;
    double availability(ItemSet arrived, std::size_t item, ResourceSet mask) override;
    /// Probability that `mask` is free after a random order of `s`.
    double free_probability(ItemSet s, ResourceSet mask) const;

    struct Margin {
        double min_margin = 1.0;  // min over states of x - alpha_t
        ItemSet subset = 0;
        std::size_t item = 0;
        std::size_t states = 0;
    };
    /// x - alpha_t over every (arrived set, item) past the cutoff.
    Margin availability_margin() const;

private:
    std::size_t m_;
    AlphaSchedule schedule_;
    std::vector<ResourceSet> own_;
    std::vector<MaskDistribution> dist_;
    std::vector<Designation> des_;  // index s * m + item
    std::vector<double> x_;         // index s * m + item
};

/// Nested Monte Carlo availabilities: x(S, f) is estimated from inner runs
/// over random orders of S minus f whose own decisions use memoized nested
/// estimates. Estimates below alpha are clamped (probability 1) and counted.
class NestedMonteCarloOracle : public AvailabilityOracle {
public:
    NestedMonteCarloOracle(const ContentionModel& model, std::size_t inner_trials, std::uint64_t seed);

    double availability(ItemSet arrived, std::size_t item, ResourceSet mask) override;
    const std::vector<Designation>& designations(ItemSet arrived);
    /// Acceptance probability alpha/x with clamping; flags clamped steps.
    double acceptance(ItemSet arrived, std::size_t item, ResourceSet mask, bool& clamped);
    std::size_t clamped_count() const noexcept { return clamped_; }

private:
    double estimate(ItemSet arrived, std::size_t item, ResourceSet mask);

    const ContentionModel* model_;
    std::size_t inner_trials_;
    Rng rng_;
    std::unordered_map<ItemSet, std::vector<Designation>> des_memo_;
    std::unordered_map<ItemSet, std::unordered_map<std::size_t, std::pair<ResourceSet, double>>> x_memo_;
    std::size_t clamped_ = 0;
};

struct ContentionStep {
    std::size_t t = 0;
    std::size_t item = 0;
    bool designated = false;
    ResourceSet mask = 0;
    double alpha = 0.0;
    double x = 1.0;
    double probability = 0.0;
    bool available = false;
    bool accepted = false;
    bool clamped = false;
};

struct ContentionTrace {
    std::vector<std::size_t> accepted;  // items, in acceptance order
    std::vector<ResourceSet> accepted_masks;
    std::vector<std::size_t> accepted_tags;
    double weight = 0.0;
    std::vector<ContentionStep> steps;  // t = cutoff+1 .. m
    std::size_t clamped_steps = 0;
};

/// One run. `order` is a permutation of the items.
ContentionTrace run_contention(const ContentionModel& model, std::span<const std::size_t> order,
                               AvailabilityOracle& oracle, Rng& coins);

struct ExactEvaluation {
    double expected_value = 0.0;
    /// max over t of |P[accept at t | designated at t] - alpha_t|.
    double acceptance_error = 0.0;
    /// max over (arrived set, item) of |enumerated availability - DP x|.
    double availability_error = 0.0;
    std::vector<double> acceptance_given_designated;  // index t
};

/// Enumerates all m! orders (m <= 8) driving decisions with the DP's x.
ExactEvaluation exact_contention_evaluation(const ContentionModel& model, const ContentionDP& dp);

/// Estimate of x(Q + e, e) from `trials` simulated orders of Q whose
/// decisions use a nested oracle with `inner_trials` per state.
struct NestedEstimate {
    Estimate estimate;
    std::size_t clamped_steps = 0;
    bool wide = false;
};
NestedEstimate nested_availability(const ContentionModel& model, ItemSet q, std::size_t item,
                                   std::size_t trials, std::size_t inner_trials, std::uint64_t seed,
                                   double wide_threshold = 0.05);

nlohmann::json contention_trace_to_json(const ContentionTrace& trace);

}  // namespace secmatch
