#pragma once

#include "ramp/instance.hpp"
#include "ramp/loss.hpp"
#include "ramp/noise.hpp"

namespace ramp {

struct MEstimate {
    Vector theta;
    double gradient_norm = 0.0;  // ||grad L||_2 / sqrt(p)
    int iterations = 0;
    double loss_value = 0.0;
};

/// Damped Newton / IRLS minimization of sum_i rho(y_i - <x_i, theta>) with a
/// backtracking line search; the Hessian is ridge-floored when the loss is
/// not strongly convex.
MEstimate m_estimate(const ProblemInstance& instance, const LossFunction& loss,
                     double tol = 1e-10, int max_iters = 100);

/// Classical asymptotic variance (E psi^2) / (E psi')^2 under W ~ model.
double classical_variance(const LossFunction& loss, const NoiseModel& model,
                          const QuadratureRule& rule = default_gauss_hermite());

/// Change of variables reducing a general Gaussian design (rows N(0, Sigma/n))
/// to a standard one: x_std = x Sigma^{-1/2}, theta <-> Sigma^{1/2} theta.
struct WhitenedDesign {
    Matrix x_std;
    Matrix sigma_sqrt;
    Matrix sigma_inv_sqrt;

    Vector theta_to_whitened(const Vector& theta) const { return sigma_sqrt * theta; }
    Vector theta_from_whitened(const Vector& theta_w) const { return sigma_inv_sqrt * theta_w; }
};

WhitenedDesign whiten_design(const Matrix& x, const Matrix& sigma);

}  // namespace ramp
