#pragma once

#include <stdexcept>
#include <string>

namespace hardylab {

// Precondition / argument-domain violations. Message names the admissible range.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure of an iterative solver (reported with context, maps to CLI exit 3).
class SolverFailure : public std::runtime_error {
public:
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hardylab
