#pragma once

#include <stdexcept>
#include <string>

namespace pgl {

/// Shapes or sizes of the arguments do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input files, non-finite values, invalid indices.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SolverFailure {
    ZeroCurvature,   // a diagonal Hessian entry is zero
    NotConverged,    // iteration budget exhausted
    UnboundedLevel,  // an equality row cannot be met by any multiplier
    NonFinite,       // objective or iterate became NaN/inf
    Infeasible       // no point satisfies the constraints
};

const char* to_string(SolverFailure kind);

class SolverError : public std::runtime_error {
public:
    SolverError(SolverFailure kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    SolverFailure kind() const noexcept { return kind_; }

private:
    SolverFailure kind_;
};

}  // namespace pgl
