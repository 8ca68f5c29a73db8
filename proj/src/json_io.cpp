#include "ramp/json_io.hpp"

#include <cstdio>
#include <fstream>

namespace ramp {

using nlohmann::json;

json to_json(const FixedPoint& fp) {
    return json{{"tau_star_sq", fp.tau_star_sq},
                {"b_star", fp.b_star},
                {"asymptotic_variance", fp.asymptotic_variance},
                {"iterations", fp.iterations},
                {"residual", fp.residual}};
}

json to_json(const PredictionReport& report) {
    json traj = json::array();
    for (const auto& r : report.trajectory)
        traj.push_back(json{{"t", r.t},
                            {"tau_sq", r.tau_sq},
                            {"b", r.b},
                            {"mse", r.mse},
                            {"mae", r.mae}});
    return json{{"mse", report.mse},
                {"mae", report.mae},
                {"trajectory", traj},
                {"residual_law",
                 json{{"noise", report.residual_law.noise},
                      {"tau", report.residual_law.tau},
                      {"b", report.residual_law.b}}}};
}

json to_json(const LowerBounds& lb) {
    return json{{"fisher_information", lb.degenerate ? json("infinity")
                                                     : json(lb.fisher_information)},
                {"degenerate", lb.degenerate},
                {"per_iteration", lb.per_iteration},
                {"accumulation", lb.accumulation}};
}

json to_json(const MEstimate& est) {
    return json{{"theta", std::vector<double>(est.theta.begin(), est.theta.end())},
                {"gradient_norm", est.gradient_norm},
                {"iterations", est.iterations},
                {"loss_value", est.loss_value}};
}

json to_json(const AmpReport& report) {
    json traj = json::array();
    for (const auto& pt : report.trajectory)
        traj.push_back(json{{"t", pt.t},
                            {"b", pt.b},
                            {"rmse_truth", pt.rmse_truth},
                            {"rmse_mest", pt.rmse_mest},
                            {"grad_norm", pt.gradient_norm}});
    return json{{"converged", report.converged},
                {"iterations", report.iterations},
                {"b_final", report.final_state.b},
                {"trajectory", traj},
                {"theta", std::vector<double>(report.final_state.theta.begin(),
                                              report.final_state.theta.end())}};
}

json to_json(const ReplicationRecord& rec) {
    json iters = json::array();
    for (const auto& it : rec.iterations)
        iters.push_back(json{{"t", it.t},
                             {"tau_hat", it.tau_hat},
                             {"b_hat", it.b_hat},
                             {"mse", it.mse},
                             {"mae", it.mae}});
    json j{{"seed", rec.seed},
           {"rep", rec.rep},
           {"failed", rec.failed},
           {"iterations", iters},
           {"amp_converged", rec.amp_converged},
           {"final_rmse_truth", rec.final_rmse_truth},
           {"newton_rmse_truth", rec.newton_rmse_truth},
           {"amp_vs_newton_rmse", rec.amp_vs_newton_rmse},
           {"amp_gradient_norm", rec.amp_gradient_norm},
           {"newton_gradient_norm", rec.newton_gradient_norm},
           {"duality_objective_gap", rec.duality_objective_gap},
           {"duality_roundtrip_error", rec.duality_roundtrip_error},
           {"duality_kkt_residual", rec.duality_kkt_residual}};
    if (rec.failed) j["error"] = rec.error;
    return j;
}

json to_json(const ExperimentSummary& summary) {
    json rows = json::array();
    for (const auto& r : summary.per_iteration)
        rows.push_back(json{{"t", r.t},
                            {"mse_mean", r.mse_mean},
                            {"mse_se", r.mse_se},
                            {"mae_mean", r.mae_mean},
                            {"mae_se", r.mae_se},
                            {"tau_hat_mean", r.tau_hat_mean},
                            {"tau_hat_se", r.tau_hat_se},
                            {"b_mean", r.b_mean},
                            {"b_se", r.b_se},
                            {"pred_mse", r.pred_mse},
                            {"pred_mae", r.pred_mae},
                            {"pred_tau_sq", r.pred_tau_sq},
                            {"pred_b", r.pred_b}});
    return json{{"per_iteration", rows},
                {"amp_rmse_mean", summary.amp_rmse_mean},
                {"amp_rmse_se", summary.amp_rmse_se},
                {"newton_rmse_mean", summary.newton_rmse_mean},
                {"newton_rmse_se", summary.newton_rmse_se},
                {"se_rmse_prediction", summary.se_rmse_prediction},
                {"fixed_point", to_json(summary.fp)}};
}

namespace {

void write_cell(std::ofstream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

}  // namespace

void write_amp_trajectory_csv(const AmpReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("write_amp_trajectory_csv: cannot write '" + path + "'");
    os << "t,b,rmse_truth,rmse_mest,grad_norm\n";
    for (const auto& pt : report.trajectory) {
        os << pt.t << ",";
        write_cell(os, pt.b);
        os << ",";
        write_cell(os, pt.rmse_truth);
        os << ",";
        write_cell(os, pt.rmse_mest);
        os << ",";
        write_cell(os, pt.gradient_norm);
        os << "\n";
    }
}

void write_se_trajectory_csv(const std::vector<SEState>& traj, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("write_se_trajectory_csv: cannot write '" + path + "'");
    os << "t,tau_sq,b\n";
    for (const auto& s : traj) {
        os << s.t << ",";
        write_cell(os, s.tau_sq);
        os << ",";
        write_cell(os, s.b);
        os << "\n";
    }
}

}  // namespace ramp
