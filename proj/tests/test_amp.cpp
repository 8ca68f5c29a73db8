#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ramp/amp.hpp"
#include "ramp/baseline.hpp"
#include "ramp/harness.hpp"
#include "ramp/se.hpp"

using namespace ramp;

namespace {

ProblemInstance make_instance(int n, int p, const std::string& loss, const std::string& noise,
                              double theta0_norm, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.n = n;
    cfg.p = p;
    cfg.loss = loss;
    cfg.noise = noise;
    cfg.theta0_norm = theta0_norm;
    cfg.seed = seed;
    RngStream rng = RngStream(seed, 0).substream(0);
    return generate(cfg, rng);
}

double empirical_slope(const LossFunction& loss, const Vector& r, double b) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) acc += psi_eff_prime(loss, r[i], b);
    return acc / r.size();
}

}  // namespace

TEST_CASE("squared loss calibrates to the constant 1/(delta-1)") {
    const auto inst = make_instance(200, 40, "squared", "normal:0,1", 2.0, 7);
    const auto loss = LossFunction::squared();
    AmpState s = amp_initial_state(inst, loss, Vector::Zero(40));
    for (int t = 0; t < 12; ++t) {
        CHECK(std::abs(s.b - 0.25) < 1e-8);
        s = amp_step(s, inst, loss);
    }
}

TEST_CASE("noiseless truth is a fixed point") {
    auto inst = make_instance(150, 30, "squared", "atom:1,0", 1.5, 11);
    REQUIRE(inst.w.cwiseAbs().maxCoeff() == 0.0);
    const auto loss = LossFunction::squared();
    AmpState s = amp_initial_state(inst, loss, inst.theta0);
    CHECK(s.resid_adj.cwiseAbs().maxCoeff() < 1e-12);
    const AmpState next = amp_step(s, inst, loss);
    CHECK((next.theta - inst.theta0).norm() / std::sqrt(30.0) < 1e-12);
}

TEST_CASE("squared-loss limit is ordinary least squares") {
    const auto inst = make_instance(200, 40, "squared", "normal:0,1", 2.0, 13);
    const auto loss = LossFunction::squared();
    const auto report = amp_run(inst, loss, Vector::Zero(40));
    REQUIRE(report.converged);
    const Vector ols = least_squares_solve(inst.x, inst.y);
    CHECK((report.final_state.theta - ols).norm() / std::sqrt(40.0) < 1e-6);
}

TEST_CASE("running example: b settles near the equilibrium value") {
    const auto inst = make_instance(1000, 200, "huber:3.0", "cn:0.05,10", 6.0, 1);
    const auto loss = LossFunction::huber(3.0);
    AmpOptions opt;
    opt.max_iters = 25;
    opt.tol = 0.0;  // run all 25
    const auto report = amp_run(inst, loss, Vector::Zero(200), opt);
    const double b20 = report.trajectory[20].b;
    CHECK(std::abs(b20 - 0.2710) < 0.02);
    // empirical slope matches 1/delta at the jump-bounded granularity
    const FixedPoint fp = fixed_point(loss, NoiseModel::contaminated_normal(0.05, 10), 5.0);
    CHECK(std::abs(report.final_state.b - fp.b_star) < 0.02);
}

TEST_CASE("empirical calibration holds at every iteration") {
    // continuous-in-b empirical slope: exact root
    const auto inst_sq = make_instance(300, 60, "squared", "cn:0.05,10", 3.0, 17);
    const auto sq = LossFunction::squared();
    AmpState s = amp_initial_state(inst_sq, sq, Vector::Zero(60));
    for (int t = 0; t < 8; ++t) {
        CHECK(std::abs(empirical_slope(sq, s.resid_adj, s.b) - 0.2) < 1e-8);
        s = amp_step(s, inst_sq, sq);
    }
    const auto inst_lc = make_instance(300, 60, "logcosh:1.0", "normal:0,1", 3.0, 19);
    const auto lc = LossFunction::log_cosh(1.0);
    AmpState sh = amp_initial_state(inst_lc, lc, Vector::Zero(60));
    for (int t = 0; t < 8; ++t) {
        CHECK(std::abs(empirical_slope(lc, sh.resid_adj, sh.b) - 0.2) < 1e-8);
        sh = amp_step(sh, inst_lc, lc);
    }
    // huber-family losses: the empirical slope jumps by ~Psi'_sup/n when a
    // residual crosses the saturation knot, so the attainable gap is 1/n
    const auto inst_hu = make_instance(500, 100, "huber:3.0", "cn:0.05,10", 6.0, 23);
    const auto hu = LossFunction::huber(3.0);
    AmpState su = amp_initial_state(inst_hu, hu, Vector::Zero(100));
    for (int t = 0; t < 8; ++t) {
        CHECK(std::abs(empirical_slope(hu, su.resid_adj, su.b) - 0.2) <= 1.0 / 500 + 1e-10);
        su = amp_step(su, inst_hu, hu);
    }
    const auto inst_hy = make_instance(300, 60, "hybrid:3.0,0.05", "cn:0.05,10", 3.0, 25);
    const auto hy = LossFunction::huber_squared_hybrid(3.0, 0.05);
    AmpState sy = amp_initial_state(inst_hy, hy, Vector::Zero(60));
    for (int t = 0; t < 8; ++t) {
        CHECK(std::abs(empirical_slope(hy, sy.resid_adj, sy.b) - 0.2) <= 1.0 / 300 + 1e-10);
        sy = amp_step(sy, inst_hy, hy);
    }
}

TEST_CASE("fixed_point_check certifies minimizers and decreases along the run") {
    const auto inst = make_instance(400, 80, "huber:3.0", "cn:0.05,10", 6.0, 29);
    const auto loss = LossFunction::huber(3.0);
    const MEstimate est = m_estimate(inst, loss, 1e-11);
    CHECK(fixed_point_check(est.theta, inst, loss) < 1e-8);

    const auto report = amp_run(inst, loss, Vector::Zero(80));
    CHECK(report.trajectory.back().gradient_norm < report.trajectory.front().gradient_norm);

    // squared loss: zero iff the normal equations hold
    const auto sq = LossFunction::squared();
    const Vector ols = least_squares_solve(inst.x, inst.y);
    CHECK(fixed_point_check(ols, inst, sq) < 1e-10);
}

TEST_CASE("converged runs satisfy the stationarity certificate") {
    for (std::uint64_t seed : {31ull, 37ull}) {
        const auto inst = make_instance(300, 60, "hybrid:3.0,0.05", "cn:0.05,10", 3.0, seed);
        const auto loss = LossFunction::huber_squared_hybrid(3.0, 0.05);
        AmpOptions opt;
        opt.tol = 1e-9;
        opt.max_iters = 400;
        const auto report = amp_run(inst, loss, Vector::Zero(60), opt);
        REQUIRE(report.converged);
        CHECK(fixed_point_check(report.final_state, inst, loss) <= 10.0 * opt.tol * 100);
    }
}

TEST_CASE("analytic mode follows the deterministic b sequence") {
    const auto inst = make_instance(1000, 200, "huber:3.0", "cn:0.05,10", 6.0, 41);
    const auto loss = LossFunction::huber(3.0);
    const auto model = NoiseModel::contaminated_normal(0.05, 10);
    const auto se_traj = se_run(36.0 / 5.0, loss, model, 5.0, 60, 1e-12);

    AmpOptions opt;
    opt.mode = CalibrationMode::Analytic;
    for (const auto& s : se_traj) opt.analytic_b.push_back(s.b);
    opt.max_iters = 30;
    opt.tol = 0.0;
    const auto analytic = amp_run(inst, loss, Vector::Zero(200), opt);
    for (int t : {0, 1, 2, 5, 10})
        CHECK(analytic.trajectory[t].b ==
              doctest::Approx(se_traj[std::min<std::size_t>(t, se_traj.size() - 1)].b));

    AmpOptions emp;
    emp.max_iters = 30;
    emp.tol = 0.0;
    const auto empirical = amp_run(inst, loss, Vector::Zero(200), emp);
    // the two calibrations stay close along the whole trajectory
    for (int t : {1, 3, 6, 12, 20})
        CHECK(std::abs(analytic.trajectory[t].b - empirical.trajectory[t].b) < 0.02);
    CHECK(std::abs(analytic.trajectory[20].rmse_truth - empirical.trajectory[20].rmse_truth) <
          0.05);
}

TEST_CASE("analytic mode requires a b sequence") {
    const auto inst = make_instance(100, 20, "squared", "normal:0,1", 1.0, 43);
    AmpOptions opt;
    opt.mode = CalibrationMode::Analytic;
    CHECK_THROWS_AS(amp_initial_state(inst, LossFunction::squared(), Vector::Zero(20), opt),
                    std::invalid_argument);
}

TEST_CASE("adjusted residuals behave as noise plus extra gaussian") {
    // pooled across replications, the first four moments of R^t match
    // W + tau_t Z within four standard errors
    const int reps = 10, n = 400, p = 80, t_probe = 3;
    const auto loss = LossFunction::huber(3.0);
    const auto model = NoiseModel::contaminated_normal(0.05, 10);
    const auto se_traj = se_run(36.0 / 5.0, loss, model, 5.0, 20, 1e-12);
    const double tau_t = std::sqrt(se_traj[t_probe].tau_sq);

    std::vector<std::array<double, 4>> rep_moments;
    for (int rep = 0; rep < reps; ++rep) {
        const auto inst = make_instance(n, p, "huber:3.0", "cn:0.05,10", 6.0, 100 + rep);
        AmpOptions opt;
        opt.max_iters = t_probe;
        opt.tol = 0.0;
        const auto report = amp_run(inst, loss, Vector::Zero(p), opt);
        const Vector& r = report.final_state.resid_adj;
        std::array<double, 4> m{0, 0, 0, 0};
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < 4; ++k) m[k] += std::pow(r[i], k + 1) / n;
        rep_moments.push_back(m);
    }
    for (int k = 0; k < 4; ++k) {
        double mean = 0.0;
        for (const auto& m : rep_moments) mean += m[k] / reps;
        double var = 0.0;
        for (const auto& m : rep_moments) var += (m[k] - mean) * (m[k] - mean) / (reps - 1);
        const double se = std::sqrt(var / reps);
        const double pred = smoothed_expectation(
            model, tau_t, [k](double x) { return std::pow(x, k + 1); });
        CHECK(std::abs(mean - pred) <= 4.0 * se);
    }
}

TEST_CASE("amp rejects fat designs and mismatched shapes") {
    auto inst = make_instance(100, 20, "squared", "normal:0,1", 1.0, 47);
    CHECK_THROWS_AS(amp_initial_state(inst, LossFunction::squared(), Vector::Zero(7)),
                    std::invalid_argument);
    inst.delta = 0.8;
    CHECK_THROWS_AS(amp_initial_state(inst, LossFunction::squared(), Vector::Zero(20)),
                    std::invalid_argument);
}
