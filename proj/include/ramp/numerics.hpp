#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ramp/errors.hpp"

namespace ramp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class QuadratureKind { GaussHermite, TrapezoidOnGrid };

/// Nodes/weights pair. For GaussHermite the weights are normalized so that
/// sum_i w_i f(x_i) approximates E f(Z) with Z ~ N(0,1); for TrapezoidOnGrid
/// they integrate f dx over the grid span.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    QuadratureKind kind = QuadratureKind::GaussHermite;

    int order() const { return static_cast<int>(nodes.size()); }

    template <class F>
    double expect(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

inline constexpr int kDefaultQuadOrder = 61;

/// Gauss-Hermite rule (probabilists' convention), exact for polynomials of
/// degree <= 2*order - 1 under the standard normal measure. 1 <= order <= 512.
QuadratureRule gauss_hermite(int order);

/// Composite trapezoid weights on a uniform grid of `points` >= 2 nodes.
QuadratureRule trapezoid_on_grid(double lo, double hi, int points);

/// Gauss-Legendre rule on [-1, 1] (weights sum to 2).
QuadratureRule gauss_legendre(int order);

/// Shared order-61 Gauss-Hermite rule.
const QuadratureRule& default_gauss_hermite();

/// Brent root solve on a bracketing interval. Returns x with |f(x)| <= ftol
/// or bracket width <= xtol. Throws BracketError if f(lo)*f(hi) > 0.
double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           double xtol = 1e-10, double ftol = 1e-12);

/// Scans [lo, hi] on a uniform grid of `grid` >= 2 points for the first sign
/// change and refines it, so the smallest root in the interval is returned.
double smallest_root_scan(const std::function<double(double)>& f, double lo, double hi,
                          int grid, double xtol = 1e-10, double ftol = 1e-12);

/// Rows form an orthonormal basis of image(x)^perp: the result g has shape
/// (n-p) x n with g g^T = I and g x = 0. Throws RankError if x is column-rank
/// deficient.
Matrix qr_orthocomplement(const Matrix& x);

/// argmin_theta ||v - x theta||_2 via column-pivoted QR.
Vector least_squares_solve(const Matrix& x, const Vector& v);

/// Deterministic stream of uniforms/normals. Equal (seed, stream) pairs give
/// bit-identical sequences; distinct streams are statistically independent.
/// Instances must not be shared across threads.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1).
    double uniform();

    /// Standard normal (Marsaglia polar, cached spare).
    double normal();

    /// Independent child stream; deterministic in (seed, stream, id).
    RngStream substream(std::uint64_t id) const;

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ramp
