#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ramp {

/// No sign change on the supplied interval / scan grid.
struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Matrix does not have full column rank.
struct RankError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Iterative scheme exhausted its iteration budget.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The empirical-slope equation for b has no root in the searched range.
struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The coupled (tau, b) system could not be solved; carries the iterates seen.
struct FixedPointError : std::runtime_error {
    FixedPointError(const std::string& msg, std::vector<double> traj)
        : std::runtime_error(msg), trajectory(std::move(traj)) {}
    std::vector<double> trajectory;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fisher information requested for a distribution without a density.
struct UndefinedFisherError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ramp
