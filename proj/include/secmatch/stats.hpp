#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace secmatch {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct Estimate {
    double mean = 0.0;
    double stderr = 0.0;
    std::size_t trials = 0;

    double ci_lo() const noexcept { return mean - 1.959963984540054 * stderr; }
    double ci_hi() const noexcept { return mean + 1.959963984540054 * stderr; }
    /// |mean - target| in units of stderr; infinite when stderr is 0 and the values differ.
    double sigmas_from(double target) const noexcept;
};

/// Sample mean and standard error of the mean (n-1 variance).
Estimate mean_estimate(std::span<const double> samples);

/// Binomial frequency with stderr sqrt(p(1-p)/n).
Estimate bernoulli_estimate(std::size_t successes, std::size_t trials);

}  // namespace secmatch
