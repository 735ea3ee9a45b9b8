#pragma once

#include <stdexcept>
#include <string>

namespace catspread {

/// Structurally invalid input: bad probability vectors, malformed descriptors,
/// out-of-range parameters, unreadable files. Raised before any computation.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input passed validation but the requested evaluation is undefined there
/// (zero probabilities where logs are needed, boundary points for derivative
/// probes, numerically inconsistent distance moments).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The log-ratio distance is undefined for a category pair whose probabilities
/// sum to one: the shared denominator log(pi_k + pi_l) vanishes. Indices are
/// stored zero-based and reported one-based.
class DegenerateDenominatorError : public DomainError {
public:
    DegenerateDenominatorError(int first, int second)
        : DomainError("log-ratio distance undefined for category pair (" +
                      std::to_string(first + 1) + ", " + std::to_string(second + 1) +
                      "): probabilities sum to 1, so the denominator log vanishes"),
          first_(first),
          second_(second) {}

    [[nodiscard]] int first() const noexcept { return first_; }
    [[nodiscard]] int second() const noexcept { return second_; }

private:
    int first_;
    int second_;
};

}  // namespace catspread
