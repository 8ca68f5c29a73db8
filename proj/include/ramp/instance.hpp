#pragma once

#include <cstdint>

#include "ramp/numerics.hpp"

namespace ramp {

/// One realization of the linear model y = x theta0 + w with a standard
/// Gaussian design (entries N(0, 1/n), columns of near-unit norm).
struct ProblemInstance {
    Matrix x;
    Vector theta0;
    Vector w;
    Vector y;
    double delta = 0.0;  // n / p
    std::uint64_t seed = 0;

    int n() const { return static_cast<int>(x.rows()); }
    int p() const { return static_cast<int>(x.cols()); }
};

}  // namespace ramp
