#include "ramp/baseline.hpp"

#include <cmath>
#include <limits>

namespace ramp {

namespace {

double objective(const ProblemInstance& inst, const LossFunction& loss, const Vector& theta) {
    const Vector r = inst.y - inst.x * theta;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) acc += loss.rho(r[i]);
    return acc;
}

}  // namespace

MEstimate m_estimate(const ProblemInstance& inst, const LossFunction& loss, double tol,
                     int max_iters) {
    const int n = inst.n();
    const int p = inst.p();
    if (n <= p) throw std::invalid_argument("m_estimate: requires n > p");
    const double sqrt_p = std::sqrt(p);
    const double ridge = loss.strongly_convex() ? 0.0 : 1e-10;

    Vector theta = Vector::Zero(p);
    double f = objective(inst, loss, theta);
    for (int it = 0; it < max_iters; ++it) {
        const Vector r = inst.y - inst.x * theta;
        Vector score(n), weight(n);
        for (int i = 0; i < n; ++i) {
            score[i] = loss.psi(r[i]);
            weight[i] = loss.psi_prime(r[i]);
        }
        const Vector grad = -(inst.x.transpose() * score);
        const double grad_norm = grad.norm() / sqrt_p;
        if (grad_norm <= tol) return {theta, grad_norm, it, f};

        Matrix hess = inst.x.transpose() * weight.asDiagonal() * inst.x;
        if (ridge > 0.0) hess.diagonal().array() += ridge;
        const Vector dir = -hess.ldlt().solve(grad);

        const double slope = grad.dot(dir);
        // sufficient decrease with an ulp allowance so the search does not
        // stall once the decrease drops below the objective's rounding floor
        const double f_slack = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(f);
        double step = 1.0;
        double f_next = objective(inst, loss, theta + step * dir);
        int backtracks = 0;
        while (f_next > f + 1e-4 * step * slope + f_slack && backtracks < 60) {
            step *= 0.5;
            f_next = objective(inst, loss, theta + step * dir);
            ++backtracks;
        }
        theta += step * dir;
        f = f_next;
    }
    throw SolverError("m_estimate: no convergence within the iteration budget");
}

double classical_variance(const LossFunction& loss, const NoiseModel& model,
                          const QuadratureRule& rule) {
    const double num = smoothed_expectation(
        model, 0.0,
        [&](double w) {
            const double s = loss.psi(w);
            return s * s;
        },
        rule);
    const double den =
        smoothed_expectation(model, 0.0, [&](double w) { return loss.psi_prime(w); }, rule);
    return num / (den * den);
}

WhitenedDesign whiten_design(const Matrix& x, const Matrix& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() != x.cols())
        throw std::invalid_argument("whiten_design: sigma must be p x p");
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
    if (es.info() != Eigen::Success)
        throw MatrixError("whiten_design: eigendecomposition failed");
    const Vector evals = es.eigenvalues();
    const double max_ev = evals.maxCoeff();
    if (evals.minCoeff() <= 1e-12 * std::max(1.0, max_ev))
        throw MatrixError("whiten_design: sigma is not strictly positive definite");

    const Matrix& q = es.eigenvectors();
    WhitenedDesign wd;
    wd.sigma_sqrt = q * evals.cwiseSqrt().asDiagonal() * q.transpose();
    wd.sigma_inv_sqrt = q * evals.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();
    wd.x_std = x * wd.sigma_inv_sqrt;
    return wd;
}

}  // namespace ramp
