#include "ramp/se.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ramp {

namespace {

constexpr double kBScanHi0 = 8.0;
constexpr double kBScanHiMax = 1e6;
constexpr int kBScanGrid = 256;

// panels for the bivariate correlation integrals; coarser than the 1-D
// default but still exact to ~1e-9 on the score family
const PanelSpec kPanels2d{10.0, 1.25, 12};

// E Psi(W + tau Z; b)^2. Kinked losses go through the kink-aligned panels so
// that information-theoretic inequalities with margins of order 1e-5 are
// resolved correctly; the plain rule keeps its role for smooth losses.
double expect_score_sq(const LossFunction& loss, const NoiseModel& model, double tau, double b,
                       const QuadratureRule& rule) {
    auto f = [&](double z) {
        const double v = psi_eff(loss, z, b);
        return v * v;
    };
    const auto kinks = loss.score_kinks(b);
    if (kinks.empty()) return smoothed_expectation(model, tau, f, rule);
    return smoothed_expectation_piecewise(model, tau, f, kinks);
}

// E Psi'(W + tau Z; b), same dispatch.
double expect_score_slope(const LossFunction& loss, const NoiseModel& model, double tau,
                          double b, const QuadratureRule& rule) {
    auto f = [&](double z) { return psi_eff_prime(loss, z, b); };
    const auto kinks = loss.score_kinks(b);
    if (kinks.empty()) return smoothed_expectation(model, tau, f, rule);
    return smoothed_expectation_piecewise(model, tau, f, kinks);
}

double expect_score_pair(const LossFunction& loss, const NoiseModel& model, double tau,
                         double b, double q, const QuadratureRule& rule) {
    auto f = [&](double z1, double z2) { return psi_eff(loss, z1, b) * psi_eff(loss, z2, b); };
    const auto kinks = loss.score_kinks(b);
    if (kinks.empty()) return smoothed_expectation_2d(model, tau, q, f, rule);
    return smoothed_expectation_2d_piecewise(model, tau, q, f, kinks, kPanels2d);
}

}  // namespace

double variance_map(const LossFunction& loss, const NoiseModel& model, double tau_sq, double b,
                    double delta, const QuadratureRule& rule) {
    if (!(b > 0.0)) throw std::invalid_argument("variance_map: b must be positive");
    if (tau_sq < 0.0) throw std::invalid_argument("variance_map: tau_sq must be >= 0");
    const double tau = std::sqrt(tau_sq);
    return delta * expect_score_sq(loss, model, tau, b, rule);
}

double calibrate_b(const LossFunction& loss, const NoiseModel& model, double tau, double delta,
                   const QuadratureRule& rule, double xtol, double ftol) {
    if (!(delta > 1.0)) throw std::invalid_argument("calibrate_b: requires delta > 1");
    const double target = 1.0 / delta;
    auto gap = [&](double b) {
        if (b <= 0.0) return -target;  // Psi(.; 0) vanishes identically
        return expect_score_slope(loss, model, tau, b, rule) - target;
    };
    for (double b_hi = kBScanHi0; b_hi <= kBScanHiMax; b_hi *= 2.0) {
        try {
            return smallest_root_scan(gap, 0.0, b_hi, kBScanGrid, xtol, ftol);
        } catch (const BracketError&) {
            // widen and rescan
        }
    }
    throw CalibrationError("calibrate_b: no root up to b = 1e6");
}

SEState make_se_state(double tau0_sq, const LossFunction& loss, const NoiseModel& model,
                      double delta, const QuadratureRule& rule) {
    SEState s;
    s.tau_sq = tau0_sq;
    s.delta = delta;
    s.t = 0;
    s.b = calibrate_b(loss, model, std::sqrt(tau0_sq), delta, rule);
    return s;
}

SEState se_step(const SEState& state, const LossFunction& loss, const NoiseModel& model,
                const QuadratureRule& rule) {
    SEState next;
    next.delta = state.delta;
    next.t = state.t + 1;
    next.tau_sq = variance_map(loss, model, state.tau_sq, state.b, state.delta, rule);
    next.b = calibrate_b(loss, model, std::sqrt(next.tau_sq), state.delta, rule);
    return next;
}

std::vector<SEState> se_run(double tau0_sq, const LossFunction& loss, const NoiseModel& model,
                            double delta, int max_iters, double tol,
                            const QuadratureRule& rule) {
    if (max_iters < 1) throw std::invalid_argument("se_run: max_iters must be >= 1");
    std::vector<SEState> traj;
    traj.push_back(make_se_state(tau0_sq, loss, model, delta, rule));
    for (int t = 0; t < max_iters; ++t) {
        const SEState next = se_step(traj.back(), loss, model, rule);
        const double change = std::abs(next.tau_sq - traj.back().tau_sq);
        traj.push_back(next);
        if (change <= tol * (1.0 + traj[traj.size() - 2].tau_sq)) break;
    }
    return traj;
}

FixedPoint fixed_point(const LossFunction& loss, const NoiseModel& model, double delta,
                       double tol, int max_iters, const QuadratureRule& rule) {
    if (!(delta > 1.0)) throw std::invalid_argument("fixed_point: requires delta > 1");

    auto v_tilde = [&](double tau_sq) {
        const double b = calibrate_b(loss, model, std::sqrt(tau_sq), delta, rule);
        return variance_map(loss, model, tau_sq, b, delta, rule);
    };

    // Damped iteration to get near the fixed point.
    std::vector<double> iterates;
    double x = model.variance() + 1.0;
    double prev_diff = 0.0;
    bool damped = false;
    int it = 0;
    for (; it < max_iters; ++it) {
        const double vx = v_tilde(x);
        double next = damped ? 0.5 * (vx + x) : vx;
        const double diff = next - x;
        if (it > 0 && diff * prev_diff < 0.0) damped = true;
        iterates.push_back(next);
        const double change = std::abs(diff);
        x = next;
        prev_diff = diff;
        if (change <= std::max(tol, 1e-12) * (1.0 + x)) break;
    }
    if (it == max_iters)
        throw FixedPointError("fixed_point: damped iteration did not settle", iterates);

    // Bracketed polish of g(tau^2) = V~(tau^2) - tau^2 around the iterate.
    auto gap = [&](double tau_sq) { return v_tilde(tau_sq) - tau_sq; };
    double lo = std::max(1e-12, x * 0.9);
    double hi = x * 1.1 + 1e-12;
    for (int k = 0; k < 80 && gap(lo) < 0.0; ++k) lo = std::max(1e-15, lo * 0.5);
    for (int k = 0; k < 80 && gap(hi) > 0.0; ++k) hi *= 2.0;
    if (gap(lo) < 0.0 || gap(hi) > 0.0)
        throw FixedPointError("fixed_point: failed to bracket the crossing", iterates);

    const double ftol = std::min(1e-12, tol * 1e-2);
    const double tau_star_sq = find_root_bracketed(gap, lo, hi, ftol, ftol);
    const double b_star = calibrate_b(loss, model, std::sqrt(tau_star_sq), delta, rule);

    FixedPoint fp;
    fp.tau_star_sq = tau_star_sq;
    fp.b_star = b_star;
    fp.asymptotic_variance = delta * tau_star_sq;
    fp.iterations = it + 1;
    const double r1 =
        std::abs(variance_map(loss, model, tau_star_sq, b_star, delta, rule) - tau_star_sq);
    const double r2 =
        std::abs(expect_score_slope(loss, model, std::sqrt(tau_star_sq), b_star, rule) -
                 1.0 / delta);
    fp.residual = std::max(r1, r2);
    return fp;
}

namespace {

PredictionRecord record_for(const SEState& s) {
    PredictionRecord r;
    r.t = s.t;
    r.tau_sq = s.tau_sq;
    r.b = s.b;
    r.mse = s.delta * s.tau_sq;
    r.mae = std::sqrt(2.0 * s.delta * s.tau_sq / M_PI);
    return r;
}

}  // namespace

PredictionReport predict(const SEState& state, const NoiseModel& model) {
    PredictionReport rep;
    const PredictionRecord r = record_for(state);
    rep.mse = r.mse;
    rep.mae = r.mae;
    rep.trajectory = {r};
    rep.residual_law = {model.name(), std::sqrt(state.tau_sq), state.b};
    return rep;
}

PredictionReport predict(const std::vector<SEState>& trajectory, const NoiseModel& model) {
    if (trajectory.empty()) throw std::invalid_argument("predict: empty trajectory");
    PredictionReport rep;
    rep.trajectory.reserve(trajectory.size());
    for (const auto& s : trajectory) rep.trajectory.push_back(record_for(s));
    rep.mse = rep.trajectory.back().mse;
    rep.mae = rep.trajectory.back().mae;
    const SEState& last = trajectory.back();
    rep.residual_law = {model.name(), std::sqrt(last.tau_sq), last.b};
    return rep;
}

PredictionReport predict(const FixedPoint& fp, double delta, const NoiseModel& model) {
    SEState s;
    s.tau_sq = fp.tau_star_sq;
    s.b = fp.b_star;
    s.delta = delta;
    s.t = fp.iterations;
    return predict(s, model);
}

LowerBounds lower_bounds(const NoiseModel& model, double delta, int t_max) {
    if (!(delta > 1.0)) throw std::invalid_argument("lower_bounds: requires delta > 1");
    if (t_max < 1) throw std::invalid_argument("lower_bounds: t_max must be >= 1");
    LowerBounds lb;
    if (model.has_atoms()) {
        lb.fisher_information = std::numeric_limits<double>::infinity();
        lb.degenerate = true;
        lb.per_iteration.assign(t_max, 0.0);
        lb.accumulation = 0.0;
        return lb;
    }
    const double info = fisher_information_smoothed(model, 0.0);
    lb.fisher_information = info;
    lb.per_iteration.reserve(t_max);
    double geo = 0.0;
    double term = 1.0;
    for (int t = 1; t <= t_max; ++t) {
        geo += term;  // 1 + 1/delta + ... + delta^{-(t-1)} bounds tau_t^2
        term /= delta;
        lb.per_iteration.push_back(geo / (delta * info));
    }
    lb.accumulation = 1.0 / ((delta - 1.0) * info);
    return lb;
}

Matrix gamma_recursion(const FixedPoint& fp, const LossFunction& loss, const NoiseModel& model,
                       int T, const QuadratureRule& rule) {
    if (T < 1) throw std::invalid_argument("gamma_recursion: T must be >= 1");
    const double tau_star_sq = fp.tau_star_sq;
    const double tau = std::sqrt(tau_star_sq);
    const double delta = fp.asymptotic_variance / fp.tau_star_sq;
    Matrix gamma = Matrix::Zero(T + 1, T + 1);
    gamma(0, 0) = tau_star_sq;

    auto pair_expectation = [&](double cov) {
        const double q = std::clamp(cov / tau_star_sq, -1.0, 1.0);
        return delta * expect_score_pair(loss, model, tau, fp.b_star, q, rule);
    };

    for (int t = 1; t <= T; ++t) {
        for (int s = 1; s <= t; ++s) {
            const double value = pair_expectation(gamma(t - 1, s - 1));
            gamma(t, s) = value;
            gamma(s, t) = value;
        }
    }
    return gamma;
}

double h_map(const FixedPoint& fp, const LossFunction& loss, const NoiseModel& model, double q,
             const QuadratureRule& rule) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("h_map: q must lie in [0,1]");
    const double tau = std::sqrt(fp.tau_star_sq);
    const double delta = fp.asymptotic_variance / fp.tau_star_sq;
    const double e = expect_score_pair(loss, model, tau, fp.b_star, q, rule);
    return delta * e / fp.tau_star_sq;
}

}  // namespace ramp
