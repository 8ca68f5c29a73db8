#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ramp/amp.hpp"
#include "ramp/baseline.hpp"
#include "ramp/instance.hpp"
#include "ramp/se.hpp"

namespace ramp {

struct ExperimentConfig {
    int n = 1000;
    int p = 200;
    std::string loss = "huber:3.0";
    std::string noise = "cn:0.05,10";
    double theta0_norm = 6.0;  // ||theta0||_2 / sqrt(p)
    int replications = 10;
    std::uint64_t seed = 1;
    CalibrationMode mode = CalibrationMode::Empirical;
    double amp_tol = 1e-8;
    int amp_max_iters = 200;
    double newton_tol = 1e-10;
    int newton_max_iters = 100;
    int se_max_iters = 200;
    double se_tol = 1e-12;
    bool run_duality = false;
    double duality_lambda = 3.0;
    int vmap_points = 64;  // variance-map grid emitted with the plot data
    std::string out_dir;

    double delta() const { return static_cast<double>(n) / p; }
    /// Extra variance seen by the first residuals when starting from zero.
    double tau0_sq() const { return theta0_norm * theta0_norm / delta(); }
};

/// Flat `key = value` file, '#' comments. Unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);

/// Design with i.i.d. N(0,1/n) entries, theta0 uniform on the sphere of
/// radius theta0_norm * sqrt(p), noise from the configured model.
ProblemInstance generate(const ExperimentConfig& config, RngStream& rng);

struct IterationObservable {
    int t = 0;
    double tau_hat = 0.0;  // ||theta^t - theta0||_2 / sqrt(n)
    double b_hat = 0.0;
    double mse = 0.0;  // ||theta^t - theta0||_2^2 / p
    double mae = 0.0;  // ||theta^t - theta0||_1 / p
};

struct ReplicationRecord {
    std::uint64_t seed = 0;
    int rep = 0;
    std::vector<IterationObservable> iterations;
    std::vector<AmpTrajectoryPoint> amp_trajectory;
    bool amp_converged = false;
    double final_rmse_truth = 0.0;
    double newton_rmse_truth = 0.0;
    double amp_vs_newton_rmse = 0.0;
    double amp_gradient_norm = 0.0;
    double newton_gradient_norm = 0.0;
    double duality_objective_gap = 0.0;
    double duality_roundtrip_error = 0.0;
    double duality_kkt_residual = 0.0;
    bool failed = false;
    std::string error;
};

struct AggregateRow {
    int t = 0;
    double mse_mean = 0.0, mse_se = 0.0;
    double mae_mean = 0.0, mae_se = 0.0;
    double tau_hat_mean = 0.0, tau_hat_se = 0.0;
    double b_mean = 0.0, b_se = 0.0;
    double pred_mse = 0.0, pred_mae = 0.0, pred_tau_sq = 0.0, pred_b = 0.0;
};

struct ExperimentSummary {
    std::vector<AggregateRow> per_iteration;
    double amp_rmse_mean = 0.0, amp_rmse_se = 0.0;
    double newton_rmse_mean = 0.0, newton_rmse_se = 0.0;
    double se_rmse_prediction = 0.0;  // sqrt(delta * tau_*^2)
    FixedPoint fp;
};

struct ExperimentResult {
    std::vector<ReplicationRecord> records;
    std::vector<SEState> se_trajectory;
    ExperimentSummary summary;
};

/// Runs `replications` independent draws (one substream each), solves every
/// instance by AMP and damped Newton, and aggregates the observables against
/// the deterministic recursion started at tau0_sq(). Individual replication
/// failures are recorded; only total failure throws.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes the per-figure CSV files (amp-rmse-vs-iteration, b-vs-iteration,
/// se-variance-map, se-trajectory, empirical-vs-predicted) into `dir`.
void emit_plotdata(const ExperimentResult& result, const ExperimentConfig& config,
                   const std::string& dir);

}  // namespace ramp
