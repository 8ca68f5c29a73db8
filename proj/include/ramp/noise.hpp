#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ramp/numerics.hpp"

namespace ramp {

struct GaussianComponent {
    double weight;
    double mean;
    double sd;
};

struct PointAtom {
    double weight;
    double location;
};

/// Finite mixture of Gaussian components and point atoms; weights sum to 1.
class NoiseModel {
public:
    static NoiseModel normal(double mean, double sd);
    /// (1-eps) N(0,1) + eps * atom(location).
    static NoiseModel contaminated_normal(double eps, double location);
    static NoiseModel mixture(std::vector<GaussianComponent> gaussians,
                              std::vector<PointAtom> atoms = {}, std::string name = "");
    static NoiseModel atom(double location);

    const std::vector<GaussianComponent>& gaussian_components() const { return gaussians_; }
    const std::vector<PointAtom>& atoms() const { return atoms_; }
    const std::string& name() const { return name_; }
    bool has_atoms() const { return !atoms_.empty(); }

    double mean() const;
    double second_moment() const;
    double variance() const;

    /// n i.i.d. draws, deterministic given the stream.
    Vector sample(int n, RngStream& rng) const;

private:
    NoiseModel() = default;
    void validate() const;

    std::vector<GaussianComponent> gaussians_;
    std::vector<PointAtom> atoms_;
    std::string name_;
};

/// "normal:0,1", "cn:0.05,10", "mix:w,mean,sd;w,mean,sd;...", "atom:w,loc;..."
NoiseModel parse_noise(const std::string& spec);

/// E f(W + tau Z) with W ~ model and Z ~ N(0,1) independent. Gaussian components
/// fold tau into an effective scale; atoms are smoothed by tau alone (handled
/// exactly when tau == 0).
template <class F>
double smoothed_expectation(const NoiseModel& model, double tau, F&& f,
                            const QuadratureRule& rule = default_gauss_hermite()) {
    double acc = 0.0;
    for (const auto& g : model.gaussian_components()) {
        const double s_eff = std::hypot(g.sd, tau);
        acc += g.weight * rule.expect([&](double x) { return f(g.mean + s_eff * x); });
    }
    for (const auto& a : model.atoms()) {
        if (tau == 0.0)
            acc += a.weight * f(a.location);
        else
            acc += a.weight * rule.expect([&](double x) { return f(a.location + tau * x); });
    }
    return acc;
}

/// E f(W + tau Z1, W + tau Z2) with (Z1, Z2) standard bivariate normal of
/// correlation `corr`, independent of W. Tensor grid of the supplied 1-D rule.
template <class F>
double smoothed_expectation_2d(const NoiseModel& model, double tau, double corr, F&& f,
                               const QuadratureRule& rule = default_gauss_hermite()) {
    const int m = rule.order();
    double acc = 0.0;
    auto tensor = [&](double mean, double var, double r) {
        const double s = std::sqrt(var);
        const double root = std::sqrt(std::max(0.0, 1.0 - r * r));
        double sum = 0.0;
        for (int i = 0; i < m; ++i) {
            const double x1 = mean + s * rule.nodes[i];
            double inner = 0.0;
            for (int j = 0; j < m; ++j) {
                const double x2 = mean + s * (r * rule.nodes[i] + root * rule.nodes[j]);
                inner += rule.weights[j] * f(x1, x2);
            }
            sum += rule.weights[i] * inner;
        }
        return sum;
    };
    const double tau_sq = tau * tau;
    for (const auto& g : model.gaussian_components()) {
        const double var = g.sd * g.sd + tau_sq;
        const double r = var > 0.0 ? (g.sd * g.sd + corr * tau_sq) / var : 1.0;
        if (var == 0.0)
            acc += g.weight * f(g.mean, g.mean);
        else
            acc += g.weight * tensor(g.mean, var, r);
    }
    for (const auto& a : model.atoms()) {
        if (tau == 0.0)
            acc += a.weight * f(a.location, a.location);
        else
            acc += a.weight * tensor(a.location, tau_sq, corr);
    }
    return acc;
}

/// Fisher information I(G) of the smoothed law G = F_W * N(0, tau^2), by
/// trapezoid quadrature of (g'/g)^2 g on a grid covering the 10-sigma support
/// envelope. Requires tau > 0 when the model has atoms.
double fisher_information_smoothed(const NoiseModel& model, double tau);

/// Panel layout for kink-aligned composite Gauss-Legendre integration against
/// the standard normal density. Panels are split at the (transformed) kink
/// locations and capped at max_width, so piecewise-smooth integrands are
/// integrated to near machine precision.
struct PanelSpec {
    double half_range = 12.0;
    double max_width = 0.5;
    int gl_order = 16;
};

namespace detail {

const QuadratureRule& panel_rule(int order);

/// integral of f(x) phi(x) dx over [-half_range, half_range] with panel
/// boundaries at `breaks` (x-space, unsorted ok).
template <class F>
double gauss_panels(F&& f, std::vector<double> breaks, const PanelSpec& spec) {
    const QuadratureRule& gl = panel_rule(spec.gl_order);
    const double lim = spec.half_range;
    std::vector<double> edges{-lim, lim};
    for (double b : breaks)
        if (b > -lim && b < lim) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i], hi = edges[i + 1];
        const int chunks = std::max(1, static_cast<int>(std::ceil((hi - lo) / spec.max_width)));
        const double h = (hi - lo) / chunks;
        for (int c = 0; c < chunks; ++c) {
            const double a = lo + c * h;
            const double mid = a + 0.5 * h, half = 0.5 * h;
            for (int k = 0; k < gl.order(); ++k) {
                const double x = mid + half * gl.nodes[k];
                acc += half * gl.weights[k] * inv_sqrt_2pi * std::exp(-0.5 * x * x) * f(x);
            }
        }
    }
    return acc;
}

}  // namespace detail

/// E f(W + tau Z) for integrands that are smooth except at the given
/// z-locations; each mixture component is integrated with kink-aligned
/// Gauss-Legendre panels. Falls back to exact atom evaluation at tau == 0.
template <class F>
double smoothed_expectation_piecewise(const NoiseModel& model, double tau, F&& f,
                                      const std::vector<double>& kinks_z,
                                      const PanelSpec& spec = {}) {
    double acc = 0.0;
    auto component = [&](double weight, double mean, double scale) {
        std::vector<double> breaks;
        breaks.reserve(kinks_z.size());
        for (double k : kinks_z) breaks.push_back((k - mean) / scale);
        acc += weight *
               detail::gauss_panels([&](double x) { return f(mean + scale * x); }, breaks, spec);
    };
    for (const auto& g : model.gaussian_components())
        component(g.weight, g.mean, std::hypot(g.sd, tau));
    for (const auto& a : model.atoms()) {
        if (tau == 0.0)
            acc += a.weight * f(a.location);
        else
            component(a.weight, a.location, tau);
    }
    return acc;
}

/// Bivariate version of smoothed_expectation_piecewise: E f(W + tau Z1,
/// W + tau Z2) with corr(Z1, Z2) = corr, kinks of f in either argument at the
/// given z-locations.
template <class F>
double smoothed_expectation_2d_piecewise(const NoiseModel& model, double tau, double corr,
                                         F&& f, const std::vector<double>& kinks_z,
                                         const PanelSpec& spec = {}) {
    double acc = 0.0;
    auto component = [&](double weight, double mean, double var, double r) {
        const double s = std::sqrt(var);
        std::vector<double> breaks1;
        for (double k : kinks_z) breaks1.push_back((k - mean) / s);
        const double rho = std::sqrt(std::max(0.0, 1.0 - r * r));
        if (rho == 0.0) {
            // degenerate correlation: x2 follows x1 along the diagonal
            acc += weight * detail::gauss_panels(
                                [&](double x) {
                                    const double v = mean + s * x;
                                    return f(v, mean + s * r * x);
                                },
                                breaks1, spec);
            return;
        }
        acc += weight * detail::gauss_panels(
                            [&](double x1) {
                                const double v1 = mean + s * x1;
                                std::vector<double> breaks2;
                                for (double k : kinks_z)
                                    breaks2.push_back(((k - mean) / s - r * x1) / rho);
                                return detail::gauss_panels(
                                    [&](double x2) {
                                        return f(v1, mean + s * (r * x1 + rho * x2));
                                    },
                                    breaks2, spec);
                            },
                            breaks1, spec);
    };
    const double tau_sq = tau * tau;
    for (const auto& g : model.gaussian_components()) {
        const double var = g.sd * g.sd + tau_sq;
        const double r = var > 0.0 ? (g.sd * g.sd + corr * tau_sq) / var : 1.0;
        component(g.weight, g.mean, var, r);
    }
    for (const auto& a : model.atoms()) {
        if (tau == 0.0)
            acc += a.weight * f(a.location, a.location);
        else
            component(a.weight, a.location, tau_sq, corr);
    }
    return acc;
}

}  // namespace ramp
