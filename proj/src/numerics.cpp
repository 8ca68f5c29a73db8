#include "ramp/numerics.hpp"

#include <cmath>
#include <limits>

namespace ramp {

QuadratureRule gauss_hermite(int order) {
    if (order < 1 || order > 512)
        throw std::invalid_argument("gauss_hermite: order must be in [1, 512]");

    QuadratureRule rule;
    rule.kind = QuadratureKind::GaussHermite;
    if (order == 1) {
        rule.nodes = {0.0};
        rule.weights = {1.0};
        return rule;
    }

    // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite
    // recurrence He_{k+1}(x) = x He_k(x) - k He_{k-1}(x).
    Vector diag = Vector::Zero(order);
    Vector sub(order - 1);
    for (int k = 1; k < order; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));

    Eigen::SelfAdjointEigenSolver<Matrix> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("gauss_hermite: eigen decomposition failed");

    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = v0 * v0;  // total mass 1 under N(0,1)
    }
    return rule;
}

QuadratureRule trapezoid_on_grid(double lo, double hi, int points) {
    if (points < 2) throw std::invalid_argument("trapezoid_on_grid: need at least 2 points");
    if (!(hi > lo)) throw std::invalid_argument("trapezoid_on_grid: hi must exceed lo");
    QuadratureRule rule;
    rule.kind = QuadratureKind::TrapezoidOnGrid;
    const double h = (hi - lo) / (points - 1);
    rule.nodes.resize(points);
    rule.weights.resize(points);
    for (int i = 0; i < points; ++i) {
        rule.nodes[i] = lo + i * h;
        rule.weights[i] = (i == 0 || i == points - 1) ? 0.5 * h : h;
    }
    return rule;
}

QuadratureRule gauss_legendre(int order) {
    if (order < 1 || order > 512)
        throw std::invalid_argument("gauss_legendre: order must be in [1, 512]");
    QuadratureRule rule;
    rule.kind = QuadratureKind::TrapezoidOnGrid;  // plain-dx weights
    if (order == 1) {
        rule.nodes = {0.0};
        rule.weights = {2.0};
        return rule;
    }
    Vector diag = Vector::Zero(order);
    Vector sub(order - 1);
    for (int k = 1; k < order; ++k)
        sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("gauss_legendre: eigen decomposition failed");
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = 2.0 * v0 * v0;
    }
    return rule;
}

const QuadratureRule& default_gauss_hermite() {
    static const QuadratureRule rule = gauss_hermite(kDefaultQuadOrder);
    return rule;
}

double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double xtol, double ftol) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw BracketError("find_root_bracketed: no sign change on [lo, hi]");

    // Brent: inverse quadratic / secant with bisection safeguard.
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 =
            2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || std::abs(fb) <= ftol) return b;

        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

double smallest_root_scan(const std::function<double(double)>& f, double lo, double hi,
                          int grid, double xtol, double ftol) {
    if (grid < 2) throw std::invalid_argument("smallest_root_scan: grid must be >= 2");
    const double h = (hi - lo) / (grid - 1);
    double x_prev = lo;
    double f_prev = f(lo);
    if (f_prev == 0.0) return lo;
    for (int i = 1; i < grid; ++i) {
        const double x = (i == grid - 1) ? hi : lo + i * h;
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((f_prev > 0.0) != (fx > 0.0))
            return find_root_bracketed(f, x_prev, x, xtol, ftol);
        x_prev = x;
        f_prev = fx;
    }
    throw BracketError("smallest_root_scan: no sign change on the grid");
}

Matrix qr_orthocomplement(const Matrix& x) {
    const auto n = x.rows();
    const auto p = x.cols();
    if (n <= p) throw std::invalid_argument("qr_orthocomplement: need n > p");

    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    if (qr.rank() < p) throw RankError("qr_orthocomplement: rank-deficient design");

    // Column pivoting permutes columns only, so image(x) is unchanged and the
    // trailing n-p columns of Q span its orthogonal complement.
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    return q.rightCols(n - p).transpose();
}

Vector least_squares_solve(const Matrix& x, const Vector& v) {
    if (x.rows() != v.size())
        throw std::invalid_argument("least_squares_solve: dimension mismatch");
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    if (qr.rank() < x.cols()) throw RankError("least_squares_solve: rank-deficient design");
    return qr.solve(v);
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix64(std::uint64_t& s) {
    s += kGolden;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t mix_pair(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a;
    std::uint64_t h = splitmix64(s);
    s = h ^ (b + kGolden);
    return splitmix64(s);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), gen_(mix_pair(seed, stream)) {}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

RngStream RngStream::substream(std::uint64_t id) const {
    return RngStream(seed_, mix_pair(stream_, id));
}

}  // namespace ramp
