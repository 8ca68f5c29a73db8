#pragma once

#include <string>
#include <vector>

#include "ramp/errors.hpp"

namespace ramp {

enum class LossKind { Squared, Huber, LogCosh, HuberSquaredHybrid };

/// Smooth convex loss rho with score psi = rho' and a.e. derivative psi'.
/// psi' is bounded: 0 <= psi'(z) <= psi_prime_sup() < inf, and
/// curvature_inf() = inf rho'' (zero for losses that are not strongly convex).
class LossFunction {
public:
    static LossFunction squared();
    static LossFunction huber(double lambda);
    static LossFunction log_cosh(double scale);
    /// huber(lambda) + quad_weight * z^2/2; strongly convex for quad_weight > 0.
    static LossFunction huber_squared_hybrid(double lambda, double quad_weight);

    LossKind kind() const { return kind_; }
    const std::string& name() const { return name_; }

    double rho(double z) const;
    double psi(double z) const;
    double psi_prime(double z) const;

    double psi_prime_sup() const { return psi_prime_sup_; }
    double curvature_inf() const { return curvature_inf_; }
    bool strongly_convex() const { return curvature_inf_ > 0.0; }

    /// Huber/hybrid threshold; NaN for losses without one.
    double lambda() const { return lambda_; }
    double quad_weight() const { return quad_weight_; }
    double scale() const { return scale_; }

    /// Points where psi' jumps (empty for C^2 losses).
    std::vector<double> psi_kinks() const;
    /// Points where z -> Psi(z; b) loses smoothness.
    std::vector<double> score_kinks(double b) const;

private:
    LossFunction() = default;

    LossKind kind_ = LossKind::Squared;
    std::string name_;
    double lambda_ = 0.0;
    double scale_ = 1.0;
    double quad_weight_ = 0.0;
    double psi_prime_sup_ = 1.0;
    double curvature_inf_ = 0.0;
};

/// "squared", "huber:3.0", "logcosh:1.0", "hybrid:3.0,0.05"
LossFunction parse_loss(const std::string& spec);

/// Unique solution of x + b psi(x) = z. Closed form for squared/huber/hybrid,
/// safeguarded Newton otherwise (residual <= 1e-13 * (1 + |z|)).
double prox(const LossFunction& loss, double z, double b);

/// Effective score Psi(z; b) = z - prox(z; b) = b psi(prox(z; b)).
double psi_eff(const LossFunction& loss, double z, double b);

/// dPsi/dz = b rho''(x) / (1 + b rho''(x)) at x = prox(z; b); lies in [0, 1).
double psi_eff_prime(const LossFunction& loss, double z, double b);

/// eta(z; b) = z - Psi(z; b), the predicted ordinary-residual transform.
double eta_residual(const LossFunction& loss, double z, double b);

}  // namespace ramp
