#pragma once

#include <stdexcept>
#include <string>

namespace dome {

// Bad input: violated precondition, malformed config. CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure: recurrence breakdown, solver step failure, infeasible
// budget. CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, int where = -1)
        : std::runtime_error(what), where_(where) {}

    // Failing polynomial degree, segment index, ... (-1 when not applicable).
    int where() const noexcept { return where_; }

private:
    int where_;
};

}  // namespace dome
