#pragma once

#include <string>

#include <json.hpp>

#include "ramp/amp.hpp"
#include "ramp/baseline.hpp"
#include "ramp/harness.hpp"
#include "ramp/se.hpp"

namespace ramp {

nlohmann::json to_json(const FixedPoint& fp);
nlohmann::json to_json(const PredictionReport& report);
nlohmann::json to_json(const LowerBounds& lb);
nlohmann::json to_json(const MEstimate& est);
nlohmann::json to_json(const AmpReport& report);
nlohmann::json to_json(const ReplicationRecord& rec);
nlohmann::json to_json(const ExperimentSummary& summary);

/// AMP trajectory as CSV with columns t,b,rmse_truth,rmse_mest,grad_norm.
void write_amp_trajectory_csv(const AmpReport& report, const std::string& path);

/// Trajectory of the deterministic recursion as CSV (t,tau_sq,b).
void write_se_trajectory_csv(const std::vector<SEState>& traj, const std::string& path);

}  // namespace ramp
