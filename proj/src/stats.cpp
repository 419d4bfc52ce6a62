#include "secmatch/stats.hpp"

#include <limits>

namespace secmatch {

double Estimate::sigmas_from(double target) const noexcept {
    const double diff = std::abs(mean - target);
    if (stderr > 0.0) return diff / stderr;
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

Estimate mean_estimate(std::span<const double> samples) {
    Estimate e;
    e.trials = samples.size();
    if (samples.empty()) return e;
    CompensatedSum sum;
    for (double x : samples) sum.add(x);
    e.mean = sum.value() / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        CompensatedSum sq;
        for (double x : samples) sq.add((x - e.mean) * (x - e.mean));
        const double var = sq.value() / static_cast<double>(samples.size() - 1);
        e.stderr = std::sqrt(var / static_cast<double>(samples.size()));
    }
    return e;
}

Estimate bernoulli_estimate(std::size_t successes, std::size_t trials) {
    Estimate e;
    e.trials = trials;
    if (trials == 0) return e;
    const double n = static_cast<double>(trials);
    e.mean = static_cast<double>(successes) / n;
    e.stderr = std::sqrt(e.mean * (1.0 - e.mean) / n);
    return e;
}

}  // namespace secmatch
