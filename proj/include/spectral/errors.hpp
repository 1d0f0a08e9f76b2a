#pragma once

#include <stdexcept>
#include <string>

namespace spectral {

// Base class so callers can catch everything from this library at once.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Malformed call or configuration (bad grid, empty input, oversized step...).
class UsageError : public Error {
public:
    explicit UsageError(const std::string& msg) : Error(msg) {}
};

// A result left the representable range.
class OverflowError : public Error {
public:
    explicit OverflowError(const std::string& msg) : Error(msg) {}
};

// A series or integral was detected to diverge.
class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

// Least-squares system could not be solved.
class FitError : public Error {
public:
    explicit FitError(const std::string& msg) : Error(msg) {}
};

// Term or memory budget exhausted before the tail could be certified.
// Carries the best tail bound reached so far.
class BudgetError : public Error {
public:
    BudgetError(const std::string& msg, double best_bound)
        : Error(msg), best_tail_bound(best_bound) {}
    double best_tail_bound;
};

} // namespace spectral
