#include "ramp/duality.hpp"

#include <cmath>

namespace ramp {

namespace {

double soft_threshold(double u, double a) {
    if (u > a) return u - a;
    if (u < -a) return u + a;
    return 0.0;
}

}  // namespace

DualInstance build_dual(const ProblemInstance& instance, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("build_dual: lambda must be positive");
    DualInstance dual;
    dual.x_tilde = qr_orthocomplement(instance.x);
    dual.y_tilde = dual.x_tilde * instance.y;
    dual.lambda = lambda;
    return dual;
}

double lasso_objective(const DualInstance& dual, const Vector& beta) {
    return 0.5 * (dual.y_tilde - dual.x_tilde * beta).squaredNorm() +
           dual.lambda * beta.lpNorm<1>();
}

double lasso_kkt_residual(const DualInstance& dual, const Vector& beta) {
    const Vector g = dual.x_tilde.transpose() * (dual.y_tilde - dual.x_tilde * beta);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0)
            worst = std::max(worst, std::abs(g[j] - dual.lambda * (beta[j] > 0 ? 1.0 : -1.0)));
        else
            worst = std::max(worst, std::max(0.0, std::abs(g[j]) - dual.lambda));
    }
    return worst;
}

LassoSolution lasso_solve(const DualInstance& dual, double tol, int max_iters) {
    const Eigen::Index m = dual.x_tilde.cols();
    Vector beta = Vector::Zero(m);
    Vector resid = dual.y_tilde;  // y_tilde - x_tilde beta
    Vector col_sq(m);
    for (Eigen::Index j = 0; j < m; ++j) col_sq[j] = dual.x_tilde.col(j).squaredNorm();

    for (int sweep = 0; sweep < max_iters; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (col_sq[j] <= 1e-30) {
                beta[j] = 0.0;
                continue;
            }
            const double u = dual.x_tilde.col(j).dot(resid) + col_sq[j] * beta[j];
            const double updated = soft_threshold(u, dual.lambda) / col_sq[j];
            const double change = updated - beta[j];
            if (change != 0.0) {
                resid -= change * dual.x_tilde.col(j);
                beta[j] = updated;
                max_change = std::max(max_change, std::abs(change));
            }
        }
        if (max_change <= tol) {
            LassoSolution sol;
            sol.beta = std::move(beta);
            sol.kkt_residual = lasso_kkt_residual(dual, sol.beta);
            sol.iterations = sweep + 1;
            sol.objective = lasso_objective(dual, sol.beta);
            return sol;
        }
    }
    throw SolverError("lasso_solve: coordinate descent did not converge");
}

Vector huber_from_lasso(const ProblemInstance& instance, const Vector& beta_hat) {
    if (beta_hat.size() != instance.n())
        throw std::invalid_argument("huber_from_lasso: beta has wrong length");
    return least_squares_solve(instance.x, instance.y - beta_hat);
}

Vector lasso_from_huber(const ProblemInstance& instance, const Vector& theta_hat,
                        const LossFunction& loss) {
    if (theta_hat.size() != instance.p())
        throw std::invalid_argument("lasso_from_huber: theta has wrong length");
    const Vector r = instance.y - instance.x * theta_hat;
    Vector u(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) u[i] = loss.psi(r[i]);
    const double stat = (instance.x.transpose() * u).norm() / std::sqrt(instance.p());
    if (stat > 1e-8)
        throw PreconditionError("lasso_from_huber: theta_hat is not stationary (||X^T u|| = " +
                                std::to_string(stat) + ")");
    return r - u;
}

double huber_objective(const ProblemInstance& instance, const LossFunction& loss,
                       const Vector& theta) {
    const Vector r = instance.y - instance.x * theta;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) acc += loss.rho(r[i]);
    return acc;
}

}  // namespace ramp
