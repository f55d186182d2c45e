#pragma once

#include <stdexcept>
#include <string>

namespace orct {

// Error taxonomy mirrored by the C API status codes: file-system problems,
// malformed or inconsistent data, structurally infeasible configurations,
// and numerical breakdown during optimization.

struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

struct data_error : std::runtime_error {
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

struct infeasible_error : std::invalid_argument {
    explicit infeasible_error(const std::string& what) : std::invalid_argument(what) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace orct
