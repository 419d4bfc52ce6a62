#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace secmatch {

/// Malformed arguments or instance data.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A request exceeds the state-space limit of an exact (exponential) routine.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant of an algorithm or certificate was violated.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Wraps an error raised inside a Monte Carlo trial with the trial index.
class TrialError : public std::runtime_error {
public:
    TrialError(std::size_t trial, const std::string& what)
        : std::runtime_error("trial " + std::to_string(trial) + ": " + what), trial_(trial) {}

    std::size_t trial() const noexcept { return trial_; }

private:
    std::size_t trial_;
};

}  // namespace secmatch
