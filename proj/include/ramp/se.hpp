#pragma once

#include <vector>

#include "ramp/loss.hpp"
#include "ramp/noise.hpp"
#include "ramp/numerics.hpp"

namespace ramp {

/// One state of the deterministic recursion: extra-Gaussian variance tau_sq,
/// the effective-score parameter b calibrated at this tau, the aspect ratio
/// delta = n/p, and the iteration index.
struct SEState {
    double tau_sq = 0.0;
    double b = 1.0;
    double delta = 0.0;
    int t = 0;
};

struct FixedPoint {
    double tau_star_sq = 0.0;
    double b_star = 0.0;
    double asymptotic_variance = 0.0;  // delta * tau_star_sq
    int iterations = 0;
    double residual = 0.0;  // worst residual of the two coupled equations
};

struct ResidualLawDescriptor {
    std::string noise;  // noise spec of W
    double tau = 0.0;   // extra-noise scale
    double b = 0.0;     // effective-score parameter
};

struct PredictionRecord {
    int t = 0;
    double tau_sq = 0.0;
    double b = 0.0;
    double mse = 0.0;
    double mae = 0.0;
};

struct PredictionReport {
    double mse = 0.0;
    double mae = 0.0;
    std::vector<PredictionRecord> trajectory;
    ResidualLawDescriptor residual_law;
};

struct LowerBounds {
    double fisher_information = 0.0;
    bool degenerate = false;            // atoms make I infinite, all bounds 0
    std::vector<double> per_iteration;  // entry k-1 bounds tau_k^2, k = 1..
    double accumulation = 0.0;          // bounds every limit point tau_*^2
};

/// delta * E Psi(W + tau Z; b)^2.
double variance_map(const LossFunction& loss, const NoiseModel& model, double tau_sq, double b,
                    double delta, const QuadratureRule& rule = default_gauss_hermite());

/// Smallest b >= 0 with E Psi'(W + tau Z; b) = 1/delta. Requires delta > 1.
double calibrate_b(const LossFunction& loss, const NoiseModel& model, double tau, double delta,
                   const QuadratureRule& rule = default_gauss_hermite(), double xtol = 1e-10,
                   double ftol = 1e-12);

/// State at tau0_sq with b calibrated.
SEState make_se_state(double tau0_sq, const LossFunction& loss, const NoiseModel& model,
                      double delta, const QuadratureRule& rule = default_gauss_hermite());

/// One recursion step: tau_{t+1}^2 = V(tau_t^2, b(tau_t)); the returned state
/// carries the freshly calibrated b at the new tau.
SEState se_step(const SEState& state, const LossFunction& loss, const NoiseModel& model,
                const QuadratureRule& rule = default_gauss_hermite());

/// Iterates se_step from tau0_sq until |tau_{t+1}^2 - tau_t^2| <= tol * (1 +
/// tau_t^2) or max_iters; returns the full trajectory including the start.
std::vector<SEState> se_run(double tau0_sq, const LossFunction& loss, const NoiseModel& model,
                            double delta, int max_iters = 200, double tol = 1e-10,
                            const QuadratureRule& rule = default_gauss_hermite());

/// Solves the coupled equations tau^2 = delta E Psi(W+tau Z; b)^2 and
/// 1/delta = E Psi'(W+tau Z; b) by damped iteration plus a bracketed polish.
FixedPoint fixed_point(const LossFunction& loss, const NoiseModel& model, double delta,
                       double tol = 1e-10, int max_iters = 200,
                       const QuadratureRule& rule = default_gauss_hermite());

PredictionReport predict(const SEState& state, const NoiseModel& model);
PredictionReport predict(const std::vector<SEState>& trajectory, const NoiseModel& model);
PredictionReport predict(const FixedPoint& fp, double delta, const NoiseModel& model);

/// Fisher-information floor under the recursion: tau_t^2 >= (sum_{j<t}
/// delta^-j) / (delta I) and tau_*^2 >= 1/((delta-1) I). t_max sets how many
/// per-iteration entries are produced.
LowerBounds lower_bounds(const NoiseModel& model, double delta, int t_max = 10);

/// Two-time correlation matrix of size (T+1)x(T+1): diagonal tau_*^2,
/// first row/column zero beyond (0,0), interior filled by the bivariate
/// recursion at the fixed point.
Matrix gamma_recursion(const FixedPoint& fp, const LossFunction& loss, const NoiseModel& model,
                       int T, const QuadratureRule& rule = default_gauss_hermite());

/// H(q) = (delta/tau_*^2) E_q{Psi(W+tau_* Z1; b_*) Psi(W+tau_* Z2; b_*)} with
/// corr(Z1, Z2) = q; H(1) = 1 at the fixed point.
double h_map(const FixedPoint& fp, const LossFunction& loss, const NoiseModel& model, double q,
             const QuadratureRule& rule = default_gauss_hermite());

}  // namespace ramp
