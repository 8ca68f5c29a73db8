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

}  // namespace

TEST_CASE("squared loss solves in one newton step to least squares") {
    const auto inst = make_instance(120, 24, "squared", "normal:0,1", 2.0, 3);
    const MEstimate est = m_estimate(inst, LossFunction::squared());
    CHECK(est.iterations <= 2);
    const Vector ols = least_squares_solve(inst.x, inst.y);
    CHECK((est.theta - ols).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(est.gradient_norm < 1e-10);
}

TEST_CASE("noiseless data recovers the truth exactly") {
    for (const char* loss_spec : {"squared", "huber:3.0"}) {
        const auto inst = make_instance(150, 30, loss_spec, "atom:1,0", 1.5, 5);
        const MEstimate est = m_estimate(inst, parse_loss(loss_spec));
        CHECK((est.theta - inst.theta0).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("objective at the solution beats the zero start") {
    const auto inst = make_instance(400, 80, "huber:3.0", "cn:0.05,10", 6.0, 7);
    const auto loss = LossFunction::huber(3.0);
    const MEstimate est = m_estimate(inst, loss, 1e-10);
    double at_zero = 0.0;
    for (int i = 0; i < inst.n(); ++i) at_zero += loss.rho(inst.y[i]);
    CHECK(est.loss_value < at_zero);
    CHECK(est.gradient_norm <= 1e-10);
}

TEST_CASE("classical_variance closed forms") {
    CHECK(classical_variance(LossFunction::squared(), NoiseModel::normal(0, 1)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(classical_variance(LossFunction::squared(), NoiseModel::normal(0, 2)) ==
          doctest::Approx(4.0).epsilon(1e-10));
    // a huge huber threshold reduces to least squares
    CHECK(classical_variance(LossFunction::huber(30.0), NoiseModel::normal(0, 1)) ==
          doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("classical_variance against a monte carlo oracle") {
    const auto loss = LossFunction::huber(3.0);
    const auto model = NoiseModel::normal(0, 1);
    const double v = classical_variance(loss, model);

    RngStream rng(11);
    const int n = 10000000;
    double s_num = 0.0, s_num2 = 0.0, s_den = 0.0, s_den2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = rng.normal();
        const double ps = loss.psi(w);
        const double pp = loss.psi_prime(w);
        s_num += ps * ps;
        s_num2 += ps * ps * ps * ps;
        s_den += pp;
        s_den2 += pp * pp;
    }
    const double num = s_num / n, den = s_den / n;
    const double se_num = std::sqrt((s_num2 / n - num * num) / n);
    const double se_den = std::sqrt((s_den2 / n - den * den) / n);
    const double mc = num / (den * den);
    // first-order error propagation for the ratio
    const double se_mc =
        mc * std::sqrt(std::pow(se_num / num, 2) + std::pow(2.0 * se_den / den, 2));
    CHECK(std::abs(v - mc) <= 3.0 * se_mc);
}

TEST_CASE("whiten_design identity and diagonal cases") {
    const auto inst = make_instance(60, 10, "huber:3.0", "normal:0,1", 2.0, 13);
    const WhitenedDesign wid = whiten_design(inst.x, Matrix::Identity(10, 10));
    CHECK((wid.x_std - inst.x).cwiseAbs().maxCoeff() < 1e-12);

    const Matrix sigma = 4.0 * Matrix::Identity(10, 10);
    const WhitenedDesign wd = whiten_design(inst.x, sigma);
    CHECK((wd.x_std - inst.x / 2.0).cwiseAbs().maxCoeff() < 1e-12);

    // m-estimation in whitened coordinates maps back to the direct solution
    ProblemInstance gen = inst;
    gen.x = inst.x * wd.sigma_sqrt;  // general design with covariance sigma/n
    gen.y = gen.x * inst.theta0 + inst.w;
    const MEstimate direct = m_estimate(gen, LossFunction::huber(3.0), 1e-12);

    ProblemInstance white = gen;
    white.x = whiten_design(gen.x, sigma).x_std;
    white.y = gen.y;
    const MEstimate ww = m_estimate(white, LossFunction::huber(3.0), 1e-12);
    CHECK((wd.theta_from_whitened(ww.theta) - direct.theta).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("whiten_design roundtrip on a random spd matrix") {
    RngStream rng(17);
    const int p = 10;
    Matrix a(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
    const Matrix sigma = a * a.transpose() + 0.5 * Matrix::Identity(p, p);
    const auto inst = make_instance(50, p, "squared", "normal:0,1", 1.0, 19);
    const WhitenedDesign wd = whiten_design(inst.x, sigma);
    CHECK((wd.sigma_sqrt * wd.sigma_inv_sqrt - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() <
          1e-10);
    Vector theta(p);
    for (int j = 0; j < p; ++j) theta[j] = rng.normal();
    CHECK((wd.theta_from_whitened(wd.theta_to_whitened(theta)) - theta).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK((wd.x_std * wd.sigma_sqrt - inst.x).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("whiten_design rejects non-spd inputs") {
    Matrix sigma = Matrix::Identity(4, 4);
    sigma(2, 2) = 0.0;
    const auto inst = make_instance(20, 4, "squared", "normal:0,1", 1.0, 23);
    CHECK_THROWS_AS(whiten_design(inst.x, sigma), MatrixError);
    CHECK_THROWS_AS(whiten_design(inst.x, Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("amp converges to the newton solution on strongly convex losses") {
    for (std::uint64_t seed : {29ull, 31ull}) {
        const auto inst = make_instance(300, 60, "hybrid:3.0,0.05", "cn:0.05,10", 3.0, seed);
        const auto loss = LossFunction::huber_squared_hybrid(3.0, 0.05);
        const MEstimate newton = m_estimate(inst, loss, 1e-12);
        AmpOptions opt;
        opt.tol = 1e-10;
        opt.max_iters = 500;
        const auto amp = amp_run(inst, loss, Vector::Zero(60), opt);
        REQUIRE(amp.converged);
        CHECK((amp.final_state.theta - newton.theta).norm() / std::sqrt(60.0) <= 1e-4);
    }
}

TEST_CASE("risk gap across iterations tracks the deterministic prediction") {
    // paired comparison over replications: MSE(theta^t) - MSE(limit) vs
    // delta * (tau_t^2 - tau_*^2)
    const int reps = 8, n = 500, p = 100;
    const auto loss = LossFunction::huber(3.0);
    const auto model = NoiseModel::contaminated_normal(0.05, 10);
    const double delta = 5.0;
    const auto traj = se_run(36.0 / delta, loss, model, delta, 40, 1e-12);
    const FixedPoint fp = fixed_point(loss, model, delta);

    std::vector<std::vector<double>> gaps(3);  // t = 1, 2, 3
    for (int rep = 0; rep < reps; ++rep) {
        const auto inst = make_instance(n, p, "huber:3.0", "cn:0.05,10", 6.0, 200 + rep);
        AmpOptions opt;
        opt.max_iters = 60;
        opt.tol = 1e-9;
        std::vector<double> mse_at;
        auto observer = [&](const AmpState& s) {
            mse_at.push_back((s.theta - inst.theta0).squaredNorm() / p);
        };
        const auto report = amp_run(inst, loss, Vector::Zero(p), opt, nullptr, observer);
        REQUIRE(report.converged);
        for (int t = 1; t <= 3; ++t) gaps[t - 1].push_back(mse_at[t] - mse_at.back());
    }
    for (int t = 1; t <= 3; ++t) {
        double mean = 0.0;
        for (double g : gaps[t - 1]) mean += g / reps;
        double var = 0.0;
        for (double g : gaps[t - 1]) var += (g - mean) * (g - mean) / (reps - 1);
        const double se = std::sqrt(var / reps);
        const double pred = delta * (traj[t].tau_sq - fp.tau_star_sq);
        CHECK(std::abs(mean - pred) <= 3.0 * se);
    }
}
