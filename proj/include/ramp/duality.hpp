#pragma once

#include "ramp/instance.hpp"
#include "ramp/loss.hpp"

namespace ramp {

/// Underdetermined companion of an M-estimation instance: x_tilde has
/// orthonormal rows spanning image(x)^perp and y_tilde = x_tilde y.
struct DualInstance {
    Vector y_tilde;
    Matrix x_tilde;
    double lambda = 0.0;
};

struct LassoSolution {
    Vector beta;
    double kkt_residual = 0.0;
    int iterations = 0;  // coordinate-descent sweeps
    double objective = 0.0;
};

DualInstance build_dual(const ProblemInstance& instance, double lambda);

/// Cyclic coordinate descent with exact soft-threshold updates; stops when the
/// largest coordinate change in a sweep is <= tol.
LassoSolution lasso_solve(const DualInstance& dual, double tol = 1e-12, int max_iters = 100000);

/// theta = argmin ||(y - beta) - x theta||_2: a least-squares fit on the data
/// with the selected outliers removed.
Vector huber_from_lasso(const ProblemInstance& instance, const Vector& beta_hat);

/// beta = y - x theta - psi(y - x theta) for a huber minimizer theta_hat;
/// requires the stationarity residual of theta_hat to be <= 1e-8.
Vector lasso_from_huber(const ProblemInstance& instance, const Vector& theta_hat,
                        const LossFunction& loss);

double huber_objective(const ProblemInstance& instance, const LossFunction& loss,
                       const Vector& theta);
double lasso_objective(const DualInstance& dual, const Vector& beta);
double lasso_kkt_residual(const DualInstance& dual, const Vector& beta);

}  // namespace ramp
