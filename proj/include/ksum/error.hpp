#pragma once

#include <stdexcept>
#include <string>

namespace ksum {

// Bad user input: rejected preconditions, malformed files, out-of-range args.
class invalid_input : public std::invalid_argument {
public:
    explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure: non-finite values, rank deficiency, failed convergence.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ksum
