#include "ramp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ramp/duality.hpp"

namespace ramp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / xs.size();
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / (xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
    }
    return out;
}

void write_csv_cell(std::ofstream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_config: cannot open '" + path + "'");
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("load_config: expected 'key = value' at line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "n")
            cfg.n = std::stoi(value);
        else if (key == "p")
            cfg.p = std::stoi(value);
        else if (key == "loss")
            cfg.loss = value;
        else if (key == "noise")
            cfg.noise = value;
        else if (key == "theta0_norm")
            cfg.theta0_norm = std::stod(value);
        else if (key == "replications")
            cfg.replications = std::stoi(value);
        else if (key == "seed")
            cfg.seed = std::stoull(value);
        else if (key == "mode") {
            if (value == "empirical")
                cfg.mode = CalibrationMode::Empirical;
            else if (value == "analytic")
                cfg.mode = CalibrationMode::Analytic;
            else
                throw std::invalid_argument("load_config: mode must be empirical|analytic");
        } else if (key == "amp_tol")
            cfg.amp_tol = std::stod(value);
        else if (key == "amp_max_iters")
            cfg.amp_max_iters = std::stoi(value);
        else if (key == "newton_tol")
            cfg.newton_tol = std::stod(value);
        else if (key == "newton_max_iters")
            cfg.newton_max_iters = std::stoi(value);
        else if (key == "se_max_iters")
            cfg.se_max_iters = std::stoi(value);
        else if (key == "se_tol")
            cfg.se_tol = std::stod(value);
        else if (key == "duality")
            cfg.run_duality = (value == "1" || value == "true" || value == "on");
        else if (key == "duality_lambda")
            cfg.duality_lambda = std::stod(value);
        else if (key == "vmap_points")
            cfg.vmap_points = std::stoi(value);
        else if (key == "out_dir")
            cfg.out_dir = value;
        else
            throw std::invalid_argument("load_config: unknown key '" + key + "'");
    }
    if (cfg.n <= cfg.p || cfg.p < 1)
        throw std::invalid_argument("load_config: need n > p >= 1");
    if (cfg.replications < 1)
        throw std::invalid_argument("load_config: replications must be >= 1");
    return cfg;
}

ProblemInstance generate(const ExperimentConfig& config, RngStream& rng) {
    const int n = config.n;
    const int p = config.p;
    if (n <= p || p < 1) throw std::invalid_argument("generate: need n > p >= 1");
    const NoiseModel model = parse_noise(config.noise);

    ProblemInstance inst;
    inst.seed = rng.seed();
    inst.delta = config.delta();
    inst.x.resize(n, p);
    const double sd = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) inst.x(i, j) = sd * rng.normal();

    inst.theta0.resize(p);
    for (int j = 0; j < p; ++j) inst.theta0[j] = rng.normal();
    const double radius = config.theta0_norm * std::sqrt(static_cast<double>(p));
    const double norm = inst.theta0.norm();
    if (radius == 0.0 || norm == 0.0)
        inst.theta0.setZero();
    else
        inst.theta0 *= radius / norm;

    inst.w = model.sample(n, rng);
    inst.y = inst.x * inst.theta0 + inst.w;
    return inst;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    const LossFunction loss = parse_loss(config.loss);
    const NoiseModel model = parse_noise(config.noise);
    const double delta = config.delta();
    const double sqrt_p = std::sqrt(static_cast<double>(config.p));
    const double sqrt_n = std::sqrt(static_cast<double>(config.n));

    ExperimentResult result;
    result.se_trajectory =
        se_run(config.tau0_sq(), loss, model, delta, config.se_max_iters, config.se_tol);
    result.summary.fp = fixed_point(loss, model, delta);
    result.summary.se_rmse_prediction = std::sqrt(result.summary.fp.asymptotic_variance);

    AmpOptions amp_opts;
    amp_opts.mode = config.mode;
    amp_opts.max_iters = config.amp_max_iters;
    amp_opts.tol = config.amp_tol;
    if (config.mode == CalibrationMode::Analytic)
        for (const auto& s : result.se_trajectory) amp_opts.analytic_b.push_back(s.b);

    int failures = 0;
    for (int rep = 0; rep < config.replications; ++rep) {
        ReplicationRecord rec;
        rec.seed = config.seed;
        rec.rep = rep;
        try {
            RngStream rng = RngStream(config.seed, 0).substream(static_cast<std::uint64_t>(rep));
            const ProblemInstance inst = generate(config, rng);

            const MEstimate newton =
                m_estimate(inst, loss, config.newton_tol, config.newton_max_iters);

            auto observer = [&](const AmpState& s) {
                IterationObservable obs;
                obs.t = s.t;
                obs.b_hat = s.b;
                const Vector err = s.theta - inst.theta0;
                obs.tau_hat = err.norm() / sqrt_n;
                obs.mse = err.squaredNorm() / config.p;
                obs.mae = err.lpNorm<1>() / config.p;
                rec.iterations.push_back(obs);
            };
            const AmpReport amp = amp_run(inst, loss, Vector::Zero(config.p), amp_opts,
                                          &newton.theta, observer);

            rec.amp_trajectory = amp.trajectory;
            rec.amp_converged = amp.converged;
            rec.final_rmse_truth = (amp.final_state.theta - inst.theta0).norm() / sqrt_p;
            rec.newton_rmse_truth = (newton.theta - inst.theta0).norm() / sqrt_p;
            rec.amp_vs_newton_rmse = (amp.final_state.theta - newton.theta).norm() / sqrt_p;
            rec.amp_gradient_norm = fixed_point_check(amp.final_state.theta, inst, loss);
            rec.newton_gradient_norm = newton.gradient_norm;

            if (config.run_duality && loss.kind() == LossKind::Huber) {
                const DualInstance dual = build_dual(inst, loss.lambda());
                const LassoSolution lasso = lasso_solve(dual);
                rec.duality_objective_gap =
                    std::abs(huber_objective(inst, loss, newton.theta) - lasso.objective);
                const Vector beta_mapped = lasso_from_huber(inst, newton.theta, loss);
                const Vector theta_back = huber_from_lasso(inst, beta_mapped);
                rec.duality_roundtrip_error =
                    (theta_back - newton.theta).lpNorm<Eigen::Infinity>();
                rec.duality_kkt_residual = lasso_kkt_residual(dual, beta_mapped);
            }
        } catch (const std::exception& ex) {
            rec.failed = true;
            rec.error = ex.what();
            ++failures;
        }
        result.records.push_back(std::move(rec));
    }
    if (failures == config.replications)
        throw SolverError("run_experiment: every replication failed");

    // Aggregate over the iteration range shared by all successful replications.
    std::size_t t_common = std::string::npos;
    for (const auto& rec : result.records)
        if (!rec.failed) t_common = std::min(t_common, rec.iterations.size());
    std::vector<double> amp_rmse, newton_rmse;
    for (const auto& rec : result.records) {
        if (rec.failed) continue;
        amp_rmse.push_back(rec.final_rmse_truth);
        newton_rmse.push_back(rec.newton_rmse_truth);
    }
    const MeanSe amp_ms = mean_se(amp_rmse);
    const MeanSe newton_ms = mean_se(newton_rmse);
    result.summary.amp_rmse_mean = amp_ms.mean;
    result.summary.amp_rmse_se = amp_ms.se;
    result.summary.newton_rmse_mean = newton_ms.mean;
    result.summary.newton_rmse_se = newton_ms.se;

    for (std::size_t t = 0; t < t_common; ++t) {
        AggregateRow row;
        row.t = static_cast<int>(t);
        std::vector<double> mse, mae, tau_hat, b_hat;
        for (const auto& rec : result.records) {
            if (rec.failed) continue;
            mse.push_back(rec.iterations[t].mse);
            mae.push_back(rec.iterations[t].mae);
            tau_hat.push_back(rec.iterations[t].tau_hat);
            b_hat.push_back(rec.iterations[t].b_hat);
        }
        const MeanSe m1 = mean_se(mse), m2 = mean_se(mae), m3 = mean_se(tau_hat),
                     m4 = mean_se(b_hat);
        row.mse_mean = m1.mean;
        row.mse_se = m1.se;
        row.mae_mean = m2.mean;
        row.mae_se = m2.se;
        row.tau_hat_mean = m3.mean;
        row.tau_hat_se = m3.se;
        row.b_mean = m4.mean;
        row.b_se = m4.se;
        const std::size_t se_idx = std::min(t, result.se_trajectory.size() - 1);
        const SEState& s = result.se_trajectory[se_idx];
        row.pred_tau_sq = s.tau_sq;
        row.pred_b = s.b;
        row.pred_mse = delta * s.tau_sq;
        row.pred_mae = std::sqrt(2.0 * delta * s.tau_sq / M_PI);
        result.summary.per_iteration.push_back(row);
    }
    return result;
}

void emit_plotdata(const ExperimentResult& result, const ExperimentConfig& config,
                   const std::string& dir) {
    if (result.records.empty()) throw std::invalid_argument("emit_plotdata: no records");
    if (config.vmap_points < 1)
        throw std::invalid_argument("emit_plotdata: vmap_points must be >= 1");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    auto open = [&](const std::string& name) {
        std::ofstream os(dir + "/" + name);
        if (!os) throw IoError("emit_plotdata: cannot write " + dir + "/" + name);
        return os;
    };
    auto row = [&](std::ofstream& os, std::initializer_list<double> vs) {
        bool first = true;
        for (double v : vs) {
            if (!first) os << ",";
            write_csv_cell(os, v);
            first = false;
        }
        os << "\n";
    };

    {
        auto os = open("amp-rmse-vs-iteration.csv");
        os << "rep,t,rmse_truth,rmse_mest,grad_norm\n";
        for (std::size_t r = 0; r < result.records.size(); ++r) {
            if (result.records[r].failed) continue;
            for (const auto& pt : result.records[r].amp_trajectory)
                row(os, {static_cast<double>(r), static_cast<double>(pt.t), pt.rmse_truth,
                         pt.rmse_mest, pt.gradient_norm});
        }
    }
    {
        auto os = open("b-vs-iteration.csv");
        os << "rep,t,b\n";
        for (std::size_t r = 0; r < result.records.size(); ++r) {
            if (result.records[r].failed) continue;
            for (const auto& pt : result.records[r].amp_trajectory)
                row(os, {static_cast<double>(r), static_cast<double>(pt.t), pt.b});
        }
    }
    {
        const LossFunction loss = parse_loss(config.loss);
        const NoiseModel model = parse_noise(config.noise);
        const double delta = config.delta();
        const double hi = std::max(config.tau0_sq() * 1.1,
                                   2.0 * result.summary.fp.tau_star_sq);
        auto os = open("se-variance-map.csv");
        os << "tau_sq,v_tilde,diagonal\n";
        for (int i = 1; i <= config.vmap_points; ++i) {
            const double tau_sq = hi * i / config.vmap_points;
            const double b = calibrate_b(loss, model, std::sqrt(tau_sq), delta);
            const double v = variance_map(loss, model, tau_sq, b, delta);
            row(os, {tau_sq, v, tau_sq});
        }
    }
    {
        auto os = open("se-trajectory.csv");
        os << "t,tau_sq,b,pred_mse,pred_mae\n";
        const double delta = config.delta();
        for (const auto& s : result.se_trajectory)
            row(os, {static_cast<double>(s.t), s.tau_sq, s.b, delta * s.tau_sq,
                     std::sqrt(2.0 * delta * s.tau_sq / M_PI)});
    }
    {
        auto os = open("empirical-vs-predicted.csv");
        os << "t,mse_mean,mse_se,pred_mse,mae_mean,mae_se,pred_mae,"
              "tau_hat_mean,tau_hat_se,pred_tau,b_mean,b_se,pred_b\n";
        for (const auto& r0 : result.summary.per_iteration)
            row(os, {static_cast<double>(r0.t), r0.mse_mean, r0.mse_se, r0.pred_mse,
                     r0.mae_mean, r0.mae_se, r0.pred_mae, r0.tau_hat_mean, r0.tau_hat_se,
                     std::sqrt(r0.pred_tau_sq), r0.b_mean, r0.b_se, r0.pred_b});
    }
}

}  // namespace ramp
