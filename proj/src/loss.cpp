#include "ramp/loss.hpp"

#include <algorithm>
#include <cmath>

namespace ramp {

namespace {

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// log cosh(u) without overflow for large |u|.
double log_cosh_stable(double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace

LossFunction LossFunction::squared() {
    LossFunction l;
    l.kind_ = LossKind::Squared;
    l.name_ = "squared";
    l.psi_prime_sup_ = 1.0;
    l.curvature_inf_ = 1.0;
    l.lambda_ = std::nan("");
    return l;
}

LossFunction LossFunction::huber(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("huber: lambda must be positive");
    LossFunction l;
    l.kind_ = LossKind::Huber;
    l.name_ = "huber:" + std::to_string(lambda);
    l.lambda_ = lambda;
    l.psi_prime_sup_ = 1.0;
    l.curvature_inf_ = 0.0;
    return l;
}

LossFunction LossFunction::log_cosh(double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("log_cosh: scale must be positive");
    LossFunction l;
    l.kind_ = LossKind::LogCosh;
    l.name_ = "logcosh:" + std::to_string(scale);
    l.scale_ = scale;
    l.psi_prime_sup_ = 1.0;
    l.curvature_inf_ = 0.0;
    l.lambda_ = std::nan("");
    return l;
}

LossFunction LossFunction::huber_squared_hybrid(double lambda, double quad_weight) {
    if (!(lambda > 0.0)) throw std::invalid_argument("hybrid: lambda must be positive");
    if (!(quad_weight > 0.0)) throw std::invalid_argument("hybrid: quad_weight must be positive");
    LossFunction l;
    l.kind_ = LossKind::HuberSquaredHybrid;
    l.name_ = "hybrid:" + std::to_string(lambda) + "," + std::to_string(quad_weight);
    l.lambda_ = lambda;
    l.quad_weight_ = quad_weight;
    l.psi_prime_sup_ = 1.0 + quad_weight;
    l.curvature_inf_ = quad_weight;
    return l;
}

double LossFunction::rho(double z) const {
    switch (kind_) {
        case LossKind::Squared:
            return 0.5 * z * z;
        case LossKind::Huber:
            return std::abs(z) <= lambda_ ? 0.5 * z * z
                                          : lambda_ * std::abs(z) - 0.5 * lambda_ * lambda_;
        case LossKind::LogCosh:
            return scale_ * scale_ * log_cosh_stable(z / scale_);
        case LossKind::HuberSquaredHybrid: {
            const double h = std::abs(z) <= lambda_
                                 ? 0.5 * z * z
                                 : lambda_ * std::abs(z) - 0.5 * lambda_ * lambda_;
            return h + 0.5 * quad_weight_ * z * z;
        }
    }
    return 0.0;
}

double LossFunction::psi(double z) const {
    switch (kind_) {
        case LossKind::Squared:
            return z;
        case LossKind::Huber:
            return std::clamp(z, -lambda_, lambda_);
        case LossKind::LogCosh:
            return scale_ * std::tanh(z / scale_);
        case LossKind::HuberSquaredHybrid:
            return std::clamp(z, -lambda_, lambda_) + quad_weight_ * z;
    }
    return 0.0;
}

double LossFunction::psi_prime(double z) const {
    switch (kind_) {
        case LossKind::Squared:
            return 1.0;
        case LossKind::Huber:
            // value 1 at the kinks |z| = lambda (closure of the interior branch)
            return std::abs(z) <= lambda_ ? 1.0 : 0.0;
        case LossKind::LogCosh: {
            const double t = std::tanh(z / scale_);
            return 1.0 - t * t;
        }
        case LossKind::HuberSquaredHybrid:
            return (std::abs(z) <= lambda_ ? 1.0 : 0.0) + quad_weight_;
    }
    return 0.0;
}


std::vector<double> LossFunction::psi_kinks() const {
    if (kind_ == LossKind::Huber || kind_ == LossKind::HuberSquaredHybrid)
        return {-lambda_, lambda_};
    return {};
}

std::vector<double> LossFunction::score_kinks(double b) const {
    if (kind_ == LossKind::Huber || kind_ == LossKind::HuberSquaredHybrid) {
        const double knot = lambda_ * (1.0 + b * (1.0 + quad_weight_));
        return {-knot, knot};
    }
    return {};
}

LossFunction parse_loss(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto parse_two = [&](double& a, double& b) {
        const auto comma = args.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("parse_loss: expected two parameters in '" + spec + "'");
        a = std::stod(args.substr(0, comma));
        b = std::stod(args.substr(comma + 1));
    };
    if (head == "squared") return LossFunction::squared();
    if (head == "huber") return LossFunction::huber(std::stod(args));
    if (head == "logcosh") return LossFunction::log_cosh(std::stod(args));
    if (head == "hybrid") {
        double lambda = 0.0, qw = 0.0;
        parse_two(lambda, qw);
        return LossFunction::huber_squared_hybrid(lambda, qw);
    }
    throw std::invalid_argument("parse_loss: unknown loss spec '" + spec + "'");
}

namespace {

// Newton on g(x) = x + b psi(x) - z with the exact bracket
// [min(z, z - b psi(z)), max(z, z - b psi(z))]; g is increasing with slope >= 1.
double prox_newton(const LossFunction& loss, double z, double b) {
    const double fz = b * loss.psi(z);  // g(z)
    if (fz == 0.0) return z;
    double lo = std::min(z, z - fz), hi = std::max(z, z - fz);
    const double tol = 1e-13 * (1.0 + std::abs(z));
    double x = z - fz / (1.0 + b * loss.psi_prime(z));
    x = std::clamp(x, lo, hi);
    for (int it = 0; it < 100; ++it) {
        const double g = x + b * loss.psi(x) - z;
        if (std::abs(g) <= tol) return x;
        if (g > 0.0)
            hi = x;
        else
            lo = x;
        const double step = g / (1.0 + b * loss.psi_prime(x));
        double next = x - step;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    throw ConvergenceError("prox: Newton failed to converge");
}

}  // namespace

double prox(const LossFunction& loss, double z, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("prox: b must be positive");
    switch (loss.kind()) {
        case LossKind::Squared:
            return z / (1.0 + b);
        case LossKind::Huber: {
            const double lam = loss.lambda();
            if (std::abs(z) <= lam * (1.0 + b)) return z / (1.0 + b);
            return z - lam * b * sign_of(z);
        }
        case LossKind::HuberSquaredHybrid: {
            const double lam = loss.lambda();
            const double c = loss.quad_weight();
            if (std::abs(z) <= lam * (1.0 + b * (1.0 + c))) return z / (1.0 + b * (1.0 + c));
            return (z - lam * b * sign_of(z)) / (1.0 + b * c);
        }
        case LossKind::LogCosh:
            return prox_newton(loss, z, b);
    }
    return z;
}

double psi_eff(const LossFunction& loss, double z, double b) {
    return z - prox(loss, z, b);
}

double psi_eff_prime(const LossFunction& loss, double z, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("psi_eff_prime: b must be positive");
    const double curv = loss.psi_prime(prox(loss, z, b));
    return b * curv / (1.0 + b * curv);
}

double eta_residual(const LossFunction& loss, double z, double b) {
    return prox(loss, z, b);
}

}  // namespace ramp
