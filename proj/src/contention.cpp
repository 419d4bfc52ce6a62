#include "secmatch/contention.hpp"

#include <algorithm>
#include <numeric>

#include "secmatch/errors.hpp"

namespace secmatch {

namespace {

constexpr std::size_t kHardLimit = 20;

void normalize(MaskDistribution& d) {
    std::stable_sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    MaskDistribution out;
    out.reserve(d.size());
    for (const auto& [mask, p] : d) {
        if (!out.empty() && out.back().first == mask)
            out.back().second += p;
        else
            out.emplace_back(mask, p);
    }
    d = std::move(out);
}

double free_mass(const MaskDistribution& d, ResourceSet mask) {
    if (mask == 0) return 1.0;
    double s = 0.0;
    for (const auto& [used, p] : d)
        if ((used & mask) == 0) s += p;
    return s;
}

std::vector<std::size_t> members(ItemSet s) {
    std::vector<std::size_t> out;
    while (s != 0) {
        out.push_back(static_cast<std::size_t>(__builtin_ctzll(s)));
        s &= s - 1;
    }
    return out;
}

void check_model(const ContentionModel& model) {
    if (model.items > 64) throw CapacityError("at most 64 arriving items are supported");
    if (model.resources > 64) throw CapacityError("at most 64 resources are supported");
    if (model.schedule.m != model.items || model.schedule.alpha.size() != model.items + 1)
        throw InputError("schedule horizon differs from item count");
    if (model.own_mask.size() != model.items) throw InputError("own_mask size differs from item count");
    if (!model.designate) throw InputError("model has no designation rule");
}

}  // namespace

AlphaSchedule contention_schedule(std::size_t m, std::size_t cutoff, double d) {
    if (cutoff > m) throw InputError("cutoff exceeds horizon");
    AlphaSchedule s;
    s.m = m;
    s.cutoff = cutoff;
    s.d = d;
    s.alpha.assign(m + 1, 0.0);
    double sum = 0.0;
    for (std::size_t t = 1; t <= m; ++t) {
        const double a = t <= cutoff ? 0.0 : std::max(0.0, 1.0 - d * sum);
        s.alpha[t] = a;
        sum += a / static_cast<double>(t);
    }
    return s;
}

ContentionDP::ContentionDP(const ContentionModel& model, std::size_t limit)
    : m_(model.items), schedule_(model.schedule), own_(model.own_mask) {
    check_model(model);
    if (limit > kHardLimit) throw InputError("exact oracle limit cannot exceed 20 items");
    if (m_ > limit)
        throw CapacityError("exact availability needs m <= " + std::to_string(limit) +
                            "; use the Monte Carlo oracle");
    const std::size_t n_sets = std::size_t{1} << m_;
    dist_.assign(n_sets, MaskDistribution{{0, 1.0}});
    des_.assign(n_sets * m_, Designation{});
    x_.assign(n_sets * m_, 1.0);
    MaskDistribution acc;
    for (ItemSet s = 1; s < n_sets; ++s) {
        const std::size_t size = set_size(s);
        if (size <= schedule_.cutoff) continue;
        const auto des = model.designate(s);
        const double alpha = schedule_.at(size);
        const double share = 1.0 / static_cast<double>(size);
        acc.clear();
        for (std::size_t f : members(s)) {
            const ItemSet q = s & ~item_bit(f);
            const Designation& d = des.at(f);
            des_[s * m_ + f] = d;
            const double x = free_mass(dist_[q], probed_mask(model, d, f));
            x_[s * m_ + f] = x;
            const double accept = (d.mask != 0 && alpha > 0.0) ? (x > alpha ? alpha / x : 1.0) : 0.0;
            for (const auto& [used, p] : dist_[q]) {
                const double pp = p * share;
                if (accept > 0.0 && (used & d.mask) == 0) {
                    acc.emplace_back(used | d.mask, pp * accept);
                    if (accept < 1.0) acc.emplace_back(used, pp * (1.0 - accept));
                } else {
                    acc.emplace_back(used, pp);
                }
            }
        }
        normalize(acc);
        dist_[s] = acc;
    }
}

const Designation& ContentionDP::designation(ItemSet arrived, std::size_t item) const {
    return des_.at(arrived * m_ + item);
}

double ContentionDP::x(ItemSet arrived, std::size_t item) const { return x_.at(arrived * m_ + item); }

double ContentionDP::availability(ItemSet arrived, std::size_t item, ResourceSet mask) {
    const ItemSet q = arrived & ~item_bit(item);
    const Designation& d = designation(arrived, item);
    if (mask == (d.mask != 0 ? d.mask : own_.at(item))) return x(arrived, item);
    return free_probability(q, mask);
}

double ContentionDP::free_probability(ItemSet s, ResourceSet mask) const { return free_mass(dist_.at(s), mask); }

ContentionDP::Margin ContentionDP::availability_margin() const {
    Margin out;
    const std::size_t n_sets = std::size_t{1} << m_;
    for (ItemSet s = 1; s < n_sets; ++s) {
        const std::size_t size = set_size(s);
        if (size <= schedule_.cutoff) continue;
        for (std::size_t f : members(s)) {
            const Designation& d = des_[s * m_ + f];
            if ((d.mask != 0 ? d.mask : own_[f]) == 0) continue;
            ++out.states;
            const double margin = x_[s * m_ + f] - schedule_.at(size);
            if (margin < out.min_margin) {
                out.min_margin = margin;
                out.subset = s;
                out.item = f;
            }
        }
    }
    return out;
}

NestedMonteCarloOracle::NestedMonteCarloOracle(const ContentionModel& model, std::size_t inner_trials,
                                               std::uint64_t seed)
    : model_(&model), inner_trials_(inner_trials), rng_(seed) {
    check_model(model);
    if (inner_trials == 0) throw InputError("inner trials must be positive");
}

const std::vector<Designation>& NestedMonteCarloOracle::designations(ItemSet arrived) {
    auto it = des_memo_.find(arrived);
    if (it == des_memo_.end()) it = des_memo_.emplace(arrived, model_->designate(arrived)).first;
    return it->second;
}

double NestedMonteCarloOracle::availability(ItemSet arrived, std::size_t item, ResourceSet mask) {
    const ItemSet q = arrived & ~item_bit(item);
    if (mask == 0 || set_size(q) <= model_->schedule.cutoff) return 1.0;
    auto& inner = x_memo_[arrived];
    if (auto it = inner.find(item); it != inner.end() && it->second.first == mask) return it->second.second;
    const double x = estimate(arrived, item, mask);
    x_memo_[arrived][item] = {mask, x};
    return x;
}

double NestedMonteCarloOracle::acceptance(ItemSet arrived, std::size_t item, ResourceSet mask, bool& clamped) {
    const double alpha = model_->schedule.at(set_size(arrived));
    const double x = availability(arrived, item, mask);
    const double q = acceptance_probability(alpha, x, clamped);
    if (clamped) ++clamped_;
    return q;
}

double NestedMonteCarloOracle::estimate(ItemSet arrived, std::size_t item, ResourceSet mask) {
    const auto items = members(arrived & ~item_bit(item));
    std::size_t free_count = 0;
    std::vector<std::size_t> order(items);
    for (std::size_t trial = 0; trial < inner_trials_; ++trial) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng_, 0, i - 1)]);
        ResourceSet used = 0;
        ItemSet prefix = 0;
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const std::size_t g = order[pos];
            prefix |= item_bit(g);
            const std::size_t t = pos + 1;
            if (t <= model_->schedule.cutoff || model_->schedule.at(t) == 0.0) continue;
            const ResourceSet want = designations(prefix).at(g).mask;
            if (want == 0 || (used & want) != 0) continue;
            bool clamped = false;
            const double q = acceptance(prefix, g, want, clamped);
            if (uniform01(rng_) < q) used |= want;
        }
        if ((used & mask) == 0) ++free_count;
    }
    return static_cast<double>(free_count) / static_cast<double>(inner_trials_);
}

ContentionTrace run_contention(const ContentionModel& model, std::span<const std::size_t> order,
                               AvailabilityOracle& oracle, Rng& coins) {
    check_model(model);
    const std::size_t m = model.items;
    if (order.size() != m) throw InputError("order length differs from item count");
    ItemSet seen = 0;
    for (std::size_t f : order) {
        if (f >= m || (seen & item_bit(f))) throw InputError("order is not a permutation of the items");
        seen |= item_bit(f);
    }
    ContentionTrace trace;
    ResourceSet used = 0;
    ItemSet arrived = 0;
    for (std::size_t t = 1; t <= m; ++t) {
        const std::size_t f = order[t - 1];
        arrived |= item_bit(f);
        if (t <= model.schedule.cutoff) continue;
        ContentionStep step;
        step.t = t;
        step.item = f;
        step.alpha = model.schedule.at(t);
        const Designation d = model.designate(arrived).at(f);
        step.designated = d.mask != 0;
        step.mask = d.mask;
        if (step.designated) {
            step.x = oracle.availability(arrived, f, d.mask);
            step.available = (used & d.mask) == 0;
            if (step.available && step.alpha > 0.0) {
                step.probability = acceptance_probability(step.alpha, step.x, step.clamped);
                step.accepted = uniform01(coins) < step.probability;
            }
            if (step.clamped) ++trace.clamped_steps;
            if (step.accepted) {
                used |= d.mask;
                trace.accepted.push_back(f);
                trace.accepted_masks.push_back(d.mask);
                trace.accepted_tags.push_back(d.tag);
                trace.weight += d.weight;
            }
        }
        trace.steps.push_back(step);
    }
    return trace;
}

ExactEvaluation exact_contention_evaluation(const ContentionModel& model, const ContentionDP& dp) {
    check_model(model);
    const std::size_t m = model.items;
    if (m > 8) throw CapacityError("exact order enumeration needs m <= 8");
    if (dp.items() != m) throw InputError("oracle built for a different model");
    const auto& sched = model.schedule;
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> accept_sum(m + 1, 0.0);
    std::vector<std::size_t> designated_count(m + 1, 0);
    std::unordered_map<std::uint64_t, std::pair<double, std::size_t>> seen;
    CompensatedSum total;
    std::size_t orders = 0;
    MaskDistribution dist;
    MaskDistribution next;
    do {
        dist.assign(1, {0, 1.0});
        ItemSet arrived = 0;
        double value = 0.0;
        for (std::size_t t = 1; t <= m; ++t) {
            const std::size_t f = order[t - 1];
            arrived |= item_bit(f);
            if (t <= sched.cutoff) continue;
            const Designation& d = dp.designation(arrived, f);
            const ResourceSet probe = probed_mask(model, d, f);
            auto& rec = seen[arrived * 64 + f];
            rec.first += free_mass(dist, probe);
            rec.second += 1;
            const double alpha = sched.at(t);
            if (d.mask == 0 || alpha <= 0.0) continue;
            const double x = dp.x(arrived, f);
            bool clamped = false;
            const double q = acceptance_probability(alpha, x, clamped);
            double accepted = 0.0;
            next.clear();
            for (const auto& [used, p] : dist) {
                if ((used & d.mask) == 0) {
                    accepted += p * q;
                    next.emplace_back(used | d.mask, p * q);
                    if (q < 1.0) next.emplace_back(used, p * (1.0 - q));
                } else {
                    next.emplace_back(used, p);
                }
            }
            normalize(next);
            std::swap(dist, next);
            value += d.weight * accepted;
            accept_sum[t] += accepted;
            designated_count[t] += 1;
        }
        total.add(value);
        ++orders;
    } while (std::next_permutation(order.begin(), order.end()));

    ExactEvaluation out;
    out.expected_value = total.value() / static_cast<double>(orders);
    out.acceptance_given_designated.assign(m + 1, 0.0);
    for (std::size_t t = sched.cutoff + 1; t <= m; ++t) {
        if (designated_count[t] == 0) continue;
        const double rate = accept_sum[t] / static_cast<double>(designated_count[t]);
        out.acceptance_given_designated[t] = rate;
        out.acceptance_error = std::max(out.acceptance_error, std::abs(rate - sched.at(t)));
    }
    for (const auto& [key, rec] : seen) {
        const ItemSet s = key / 64;
        const std::size_t f = key % 64;
        const double avg = rec.first / static_cast<double>(rec.second);
        out.availability_error = std::max(out.availability_error, std::abs(avg - dp.x(s, f)));
    }
    return out;
}

NestedEstimate nested_availability(const ContentionModel& model, ItemSet q, std::size_t item,
                                   std::size_t trials, std::size_t inner_trials, std::uint64_t seed,
                                   double wide_threshold) {
    check_model(model);
    if (trials == 0) throw InputError("trials must be positive");
    if (item >= model.items || (q & item_bit(item))) throw InputError("item must lie outside Q");
    if (q >> model.items) throw InputError("Q references unknown items");
    NestedMonteCarloOracle oracle(model, inner_trials, derive_seed(seed, 0, Stream::inner));
    Rng order_rng = make_rng(seed, 0, Stream::order);
    Rng coins = make_rng(seed, 0, Stream::coins);
    const ItemSet s = q | item_bit(item);
    const ResourceSet probe = probed_mask(model, oracle.designations(s).at(item), item);
    const auto items = members(q);
    std::vector<std::size_t> order(items);
    std::size_t free_count = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(order_rng, 0, i - 1)]);
        ResourceSet used = 0;
        ItemSet prefix = 0;
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const std::size_t g = order[pos];
            prefix |= item_bit(g);
            const std::size_t t = pos + 1;
            if (t <= model.schedule.cutoff || model.schedule.at(t) == 0.0) continue;
            const ResourceSet want = oracle.designations(prefix).at(g).mask;
            if (want == 0 || (used & want) != 0) continue;
            bool clamped = false;
            const double p = oracle.acceptance(prefix, g, want, clamped);
            if (uniform01(coins) < p) used |= want;
        }
        if ((used & probe) == 0) ++free_count;
    }
    NestedEstimate out;
    out.estimate = bernoulli_estimate(free_count, trials);
    out.clamped_steps = oracle.clamped_count();
    out.wide = out.estimate.stderr > wide_threshold;
    return out;
}

nlohmann::json contention_trace_to_json(const ContentionTrace& trace) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : trace.steps) {
        steps.push_back({{"t", s.t},
                         {"item", s.item},
                         {"in_optimum", s.designated},
                         {"alpha", s.alpha},
                         {"x", s.x},
                         {"probability", s.probability},
                         {"available", s.available},
                         {"accepted", s.accepted},
                         {"clamped", s.clamped}});
    }
    return {{"accepted", trace.accepted},
            {"weight", trace.weight},
            {"clamped_steps", trace.clamped_steps},
            {"steps", steps}};
}

}  // namespace secmatch
