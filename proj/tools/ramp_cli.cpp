// Command-line front end: deterministic-recursion solvers, AMP and Newton
// M-estimation, replication experiments, duality checks, and noise bounds.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ramp/duality.hpp"
#include "ramp/harness.hpp"
#include "ramp/json_io.hpp"

namespace {

struct InstanceFlags {
    int n = 1000;
    int p = 200;
    std::string loss = "huber:3.0";
    std::string noise = "cn:0.05,10";
    double theta0_norm = 6.0;
    std::uint64_t seed = 1;
};

void add_instance_flags(CLI::App* cmd, InstanceFlags& flags) {
    cmd->add_option("--n", flags.n, "number of observations");
    cmd->add_option("--p", flags.p, "number of parameters");
    cmd->add_option("--loss", flags.loss, "loss spec, e.g. huber:3.0");
    cmd->add_option("--noise", flags.noise, "noise spec, e.g. cn:0.05,10");
    cmd->add_option("--theta0-norm", flags.theta0_norm, "||theta0||_2 / sqrt(p)");
    cmd->add_option("--seed", flags.seed, "rng seed");
}

ramp::ExperimentConfig config_from(const InstanceFlags& flags) {
    ramp::ExperimentConfig cfg;
    cfg.n = flags.n;
    cfg.p = flags.p;
    cfg.loss = flags.loss;
    cfg.noise = flags.noise;
    cfg.theta0_norm = flags.theta0_norm;
    cfg.seed = flags.seed;
    cfg.replications = 1;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AMP-based robust regression in the n/p -> delta > 1 regime"};
    app.require_subcommand(1);

    // se-fixed-point
    std::string fp_loss = "huber:3.0", fp_noise = "cn:0.05,10";
    double fp_delta = 5.0, fp_tol = 1e-10;
    auto* fp_cmd = app.add_subcommand("se-fixed-point", "solve the coupled (tau, b) equations");
    fp_cmd->add_option("--loss", fp_loss)->required();
    fp_cmd->add_option("--noise", fp_noise)->required();
    fp_cmd->add_option("--delta", fp_delta)->required();
    fp_cmd->add_option("--tol", fp_tol);

    // se-run
    std::string run_loss = "huber:3.0", run_noise = "cn:0.05,10", run_csv;
    double run_delta = 5.0, run_tau0_sq = 1.0;
    int run_iters = 50;
    auto* run_cmd = app.add_subcommand("se-run", "iterate the variance recursion");
    run_cmd->add_option("--loss", run_loss)->required();
    run_cmd->add_option("--noise", run_noise)->required();
    run_cmd->add_option("--delta", run_delta)->required();
    run_cmd->add_option("--tau0-sq", run_tau0_sq)->required();
    run_cmd->add_option("--iters", run_iters)->required();
    run_cmd->add_option("--csv", run_csv, "also write the trajectory as CSV");

    // amp-solve
    InstanceFlags amp_flags;
    std::string amp_config_path, amp_csv;
    auto* amp_cmd = app.add_subcommand("amp-solve", "run AMP on a generated instance");
    amp_cmd->add_option("--config", amp_config_path, "config file (overrides flags)");
    add_instance_flags(amp_cmd, amp_flags);
    amp_cmd->add_option("--csv", amp_csv, "write the per-iteration trajectory as CSV");

    // m-estimate
    InstanceFlags mest_flags;
    auto* mest_cmd = app.add_subcommand("m-estimate", "damped-Newton M-estimation");
    add_instance_flags(mest_cmd, mest_flags);

    // simulate
    std::string sim_config_path, sim_out;
    int sim_reps = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "replication experiment with summaries");
    sim_cmd->add_option("--config", sim_config_path)->required();
    sim_cmd->add_option("--reps", sim_reps, "override replications");
    sim_cmd->add_option("--out", sim_out, "override output directory");

    // duality-check
    int dc_n = 60, dc_p = 12;
    double dc_lambda = 1.0;
    std::uint64_t dc_seed = 1;
    std::string dc_noise = "cn:0.05,10";
    auto* dc_cmd = app.add_subcommand("duality-check", "penalized-least-squares cross check");
    dc_cmd->add_option("--n", dc_n);
    dc_cmd->add_option("--p", dc_p);
    dc_cmd->add_option("--lambda", dc_lambda)->required();
    dc_cmd->add_option("--seed", dc_seed);
    dc_cmd->add_option("--noise", dc_noise);

    // bounds
    std::string bd_noise = "normal:0,1";
    double bd_delta = 5.0;
    int bd_t = 10;
    auto* bd_cmd = app.add_subcommand("bounds", "Fisher-information floors on tau^2");
    bd_cmd->add_option("--noise", bd_noise)->required();
    bd_cmd->add_option("--delta", bd_delta)->required();
    bd_cmd->add_option("--t", bd_t, "iterations to bound");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fp_cmd) {
            const auto fp = ramp::fixed_point(ramp::parse_loss(fp_loss),
                                              ramp::parse_noise(fp_noise), fp_delta, fp_tol);
            std::cout << ramp::to_json(fp).dump(2) << "\n";
        } else if (*run_cmd) {
            const auto loss = ramp::parse_loss(run_loss);
            const auto model = ramp::parse_noise(run_noise);
            const auto traj = ramp::se_run(run_tau0_sq, loss, model, run_delta, run_iters);
            if (!run_csv.empty()) ramp::write_se_trajectory_csv(traj, run_csv);
            std::cout << ramp::to_json(ramp::predict(traj, model)).dump(2) << "\n";
        } else if (*amp_cmd) {
            ramp::ExperimentConfig cfg = amp_config_path.empty()
                                             ? config_from(amp_flags)
                                             : ramp::load_config(amp_config_path);
            ramp::RngStream rng = ramp::RngStream(cfg.seed, 0).substream(0);
            const auto inst = ramp::generate(cfg, rng);
            const auto loss = ramp::parse_loss(cfg.loss);
            ramp::AmpOptions opts;
            opts.mode = cfg.mode;
            opts.max_iters = cfg.amp_max_iters;
            opts.tol = cfg.amp_tol;
            if (cfg.mode == ramp::CalibrationMode::Analytic) {
                const auto traj = ramp::se_run(cfg.tau0_sq(), loss, ramp::parse_noise(cfg.noise),
                                               cfg.delta(), cfg.se_max_iters, cfg.se_tol);
                for (const auto& s : traj) opts.analytic_b.push_back(s.b);
            }
            const auto report =
                ramp::amp_run(inst, loss, ramp::Vector::Zero(cfg.p), opts);
            if (!amp_csv.empty()) ramp::write_amp_trajectory_csv(report, amp_csv);
            std::cout << ramp::to_json(report).dump(2) << "\n";
        } else if (*mest_cmd) {
            const ramp::ExperimentConfig cfg = config_from(mest_flags);
            ramp::RngStream rng = ramp::RngStream(cfg.seed, 0).substream(0);
            const auto inst = ramp::generate(cfg, rng);
            const auto est = ramp::m_estimate(inst, ramp::parse_loss(cfg.loss));
            auto j = ramp::to_json(est);
            j["rmse_truth"] = (est.theta - inst.theta0).norm() / std::sqrt(cfg.p);
            std::cout << j.dump(2) << "\n";
        } else if (*sim_cmd) {
            ramp::ExperimentConfig cfg = ramp::load_config(sim_config_path);
            if (sim_reps > 0) cfg.replications = sim_reps;
            if (!sim_out.empty()) cfg.out_dir = sim_out;
            if (cfg.out_dir.empty()) cfg.out_dir = ".";
            const auto result = ramp::run_experiment(cfg);
            ramp::emit_plotdata(result, cfg, cfg.out_dir);
            nlohmann::json records = nlohmann::json::array();
            for (const auto& rec : result.records) records.push_back(ramp::to_json(rec));
            std::ofstream rf(cfg.out_dir + "/records.json");
            if (!rf) throw ramp::IoError("simulate: cannot write records.json");
            rf << records.dump(2) << "\n";
            std::ofstream sf(cfg.out_dir + "/summary.json");
            if (!sf) throw ramp::IoError("simulate: cannot write summary.json");
            sf << ramp::to_json(result.summary).dump(2) << "\n";
            std::cout << ramp::to_json(result.summary).dump(2) << "\n";
        } else if (*dc_cmd) {
            ramp::ExperimentConfig cfg;
            cfg.n = dc_n;
            cfg.p = dc_p;
            cfg.loss = "huber:" + std::to_string(dc_lambda);
            cfg.noise = dc_noise;
            cfg.seed = dc_seed;
            ramp::RngStream rng = ramp::RngStream(cfg.seed, 0).substream(0);
            const auto inst = ramp::generate(cfg, rng);
            const auto loss = ramp::parse_loss(cfg.loss);
            const auto est = ramp::m_estimate(inst, loss, 1e-12);
            const auto dual = ramp::build_dual(inst, dc_lambda);
            const auto lasso = ramp::lasso_solve(dual);
            const ramp::Vector beta_mapped = ramp::lasso_from_huber(inst, est.theta, loss);
            const ramp::Vector theta_back = ramp::huber_from_lasso(inst, beta_mapped);
            nlohmann::json j{
                {"huber_objective", ramp::huber_objective(inst, loss, est.theta)},
                {"lasso_objective", lasso.objective},
                {"roundtrip_error",
                 (theta_back - est.theta).lpNorm<Eigen::Infinity>()},
                {"kkt_residual", ramp::lasso_kkt_residual(dual, beta_mapped)}};
            std::cout << j.dump(2) << "\n";
        } else if (*bd_cmd) {
            const auto lb = ramp::lower_bounds(ramp::parse_noise(bd_noise), bd_delta, bd_t);
            std::cout << ramp::to_json(lb).dump(2) << "\n";
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
