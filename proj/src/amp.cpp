#include "ramp/amp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ramp/numerics.hpp"

namespace ramp {

namespace {

constexpr double kScanHi0 = 8.0;
constexpr double kScanHiMax = 1e6;

Vector apply_psi_eff(const LossFunction& loss, const Vector& r, double b) {
    Vector out(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) out[i] = psi_eff(loss, r[i], b);
    return out;
}

// Smallest b with mean_i Psi'(r_i; b) = 1/delta. A warm window around the
// previous b is tried first; b varies slowly between iterations.
double empirical_calibrate(const LossFunction& loss, const Vector& r, double delta,
                           double b_prev, const AmpOptions& opt) {
    const double target = 1.0 / delta;
    auto gap = [&](double b) {
        if (b <= 0.0) return -target;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < r.size(); ++i) acc += psi_eff_prime(loss, r[i], b);
        return acc / static_cast<double>(r.size()) - target;
    };
    if (b_prev > 0.0) {
        try {
            return smallest_root_scan(gap, std::max(0.0, 0.25 * b_prev), 4.0 * b_prev, 128,
                                      opt.calib_xtol, opt.calib_ftol);
        } catch (const BracketError&) {
            // fall through to the full scan
        }
    }
    for (double hi = kScanHi0; hi <= kScanHiMax; hi *= 2.0) {
        try {
            return smallest_root_scan(gap, 0.0, hi, 256, opt.calib_xtol, opt.calib_ftol);
        } catch (const BracketError&) {
        }
    }
    throw CalibrationError("amp: empirical slope equation has no root up to b = 1e6");
}

double pick_b(const AmpOptions& opt, const LossFunction& loss, const Vector& r, double delta,
              double b_prev, int t) {
    if (opt.mode == CalibrationMode::Analytic) {
        if (opt.analytic_b.empty())
            throw std::invalid_argument("amp: analytic mode needs a b sequence");
        const std::size_t idx =
            std::min<std::size_t>(static_cast<std::size_t>(t), opt.analytic_b.size() - 1);
        return opt.analytic_b[idx];
    }
    return empirical_calibrate(loss, r, delta, b_prev, opt);
}

}  // namespace

AmpState amp_initial_state(const ProblemInstance& instance, const LossFunction& loss,
                           const Vector& theta_init, const AmpOptions& options) {
    if (!(instance.delta > 1.0)) throw std::invalid_argument("amp: requires n/p > 1");
    if (theta_init.size() != instance.p())
        throw std::invalid_argument("amp: theta_init has wrong length");
    AmpState s;
    s.theta = theta_init;
    s.prev_resid_adj = Vector::Zero(instance.n());
    s.resid_adj = instance.y - instance.x * theta_init;
    s.b = pick_b(options, loss, s.resid_adj, instance.delta, -1.0, 0);
    s.t = 0;
    return s;
}

AmpState amp_step(const AmpState& state, const ProblemInstance& instance,
                  const LossFunction& loss, const AmpOptions& options) {
    if (state.theta.size() != instance.p() || state.resid_adj.size() != instance.n())
        throw std::invalid_argument("amp_step: state does not match instance");
    const Vector scored = apply_psi_eff(loss, state.resid_adj, state.b);

    AmpState next;
    next.theta = state.theta + instance.delta * (instance.x.transpose() * scored);
    next.resid_adj = instance.y - instance.x * next.theta + scored;
    next.prev_resid_adj = state.resid_adj;
    next.t = state.t + 1;
    next.b = pick_b(options, loss, next.resid_adj, instance.delta, state.b, next.t);
    return next;
}

double fixed_point_check(const Vector& theta, const ProblemInstance& instance,
                         const LossFunction& loss) {
    const Vector r = instance.y - instance.x * theta;
    Vector score(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) score[i] = loss.psi(r[i]);
    return (instance.x.transpose() * score).norm() / std::sqrt(instance.p());
}

double fixed_point_check(const AmpState& state, const ProblemInstance& instance,
                         const LossFunction& loss) {
    return fixed_point_check(state.theta, instance, loss);
}

AmpReport amp_run(const ProblemInstance& instance, const LossFunction& loss,
                  const Vector& theta_init, const AmpOptions& options, const Vector* reference,
                  const std::function<void(const AmpState&)>& observer) {
    const double sqrt_p = std::sqrt(instance.p());
    AmpReport report;
    AmpState state = amp_initial_state(instance, loss, theta_init, options);

    auto record = [&](const AmpState& s) {
        AmpTrajectoryPoint pt;
        pt.t = s.t;
        pt.b = s.b;
        pt.rmse_truth = (s.theta - instance.theta0).norm() / sqrt_p;
        pt.rmse_mest = reference ? (s.theta - *reference).norm() / sqrt_p
                                 : std::numeric_limits<double>::quiet_NaN();
        pt.gradient_norm = fixed_point_check(s.theta, instance, loss);
        report.trajectory.push_back(pt);
        if (observer) observer(s);
    };

    record(state);
    for (int t = 0; t < options.max_iters; ++t) {
        AmpState next = amp_step(state, instance, loss, options);
        const double step_norm = (next.theta - state.theta).norm() / sqrt_p;
        state = std::move(next);
        record(state);
        if (step_norm <= options.tol) {
            report.converged = true;
            break;
        }
    }
    report.iterations = state.t;
    report.final_state = std::move(state);
    return report;
}

}  // namespace ramp
