#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ramp/instance.hpp"
#include "ramp/loss.hpp"

namespace ramp {

enum class CalibrationMode { Empirical, Analytic };

struct AmpOptions {
    CalibrationMode mode = CalibrationMode::Empirical;
    /// b_t by iteration for Analytic mode (last entry reused past the end).
    std::vector<double> analytic_b;
    int max_iters = 200;
    double tol = 1e-8;  // on ||theta_{t+1} - theta_t||_2 / sqrt(p)
    double calib_xtol = 1e-10;
    double calib_ftol = 1e-12;
};

/// Snapshot at iteration t: estimate theta^t, adjusted residuals R^t with
/// their calibrated b_t, and R^{t-1} feeding the next memory term.
struct AmpState {
    Vector theta;
    Vector resid_adj;
    Vector prev_resid_adj;
    double b = 1.0;
    int t = 0;
};

struct AmpTrajectoryPoint {
    int t = 0;
    double b = 0.0;
    double rmse_truth = 0.0;      // ||theta^t - theta0||_2 / sqrt(p)
    double rmse_mest = 0.0;       // vs a reference minimizer (NaN if none)
    double gradient_norm = 0.0;   // ||X^T psi(y - X theta^t)||_2 / sqrt(p)
};

struct AmpReport {
    std::vector<AmpTrajectoryPoint> trajectory;
    bool converged = false;
    int iterations = 0;
    AmpState final_state;
};

/// State at t = 0: theta = theta_init, R^0 = y - X theta_init (the memory
/// term vanishes because R^{-1} = 0), b_0 calibrated on R^0.
AmpState amp_initial_state(const ProblemInstance& instance, const LossFunction& loss,
                           const Vector& theta_init, const AmpOptions& options = {});

/// One iteration: scoring update of theta, new adjusted residuals with the
/// memory term, then recalibration of b.
AmpState amp_step(const AmpState& state, const ProblemInstance& instance,
                  const LossFunction& loss, const AmpOptions& options = {});

/// Runs until the per-coordinate step norm drops below options.tol or the
/// iteration budget is spent. `reference` supplies the column for rmse_mest;
/// `observer` is invoked on every visited state (t = 0, 1, ...).
AmpReport amp_run(const ProblemInstance& instance, const LossFunction& loss,
                  const Vector& theta_init, const AmpOptions& options = {},
                  const Vector* reference = nullptr,
                  const std::function<void(const AmpState&)>& observer = nullptr);

/// ||X^T psi(y - X theta)||_2 / sqrt(p); near zero certifies a minimizer.
double fixed_point_check(const Vector& theta, const ProblemInstance& instance,
                         const LossFunction& loss);
double fixed_point_check(const AmpState& state, const ProblemInstance& instance,
                         const LossFunction& loss);

}  // namespace ramp
