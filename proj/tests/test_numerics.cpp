#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ramp/numerics.hpp"

using namespace ramp;

TEST_CASE("gauss_hermite rejects out-of-range orders") {
    CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_hermite(513), std::invalid_argument);
}

TEST_CASE("gauss_hermite order 1 is the mean rule") {
    const auto rule = gauss_hermite(1);
    REQUIRE(rule.order() == 1);
    CHECK(rule.nodes[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(rule.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gauss_hermite integrates gaussian moments") {
    const auto rule = gauss_hermite(20);
    CHECK(rule.expect([](double z) { return z * z; }) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(rule.expect([](double z) { return z * z * z * z; }) - 3.0) < 1e-10);
    // E Z^8 = 105, within the rule's polynomial exactness
    const auto rule5 = gauss_hermite(5);
    CHECK(rule5.expect([](double z) { return std::pow(z, 8); }) ==
          doctest::Approx(105.0).epsilon(1e-9));
}

TEST_CASE("gauss_hermite weights sum to one") {
    for (int order : {1, 7, 20, 61, 128, 512}) {
        const auto rule = gauss_hermite(order);
        double total = 0.0;
        for (double w : rule.weights) {
            CHECK(w > 0.0);
            total += w;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("trapezoid_on_grid integrates a quadratic") {
    const auto rule = trapezoid_on_grid(0.0, 1.0, 2001);
    CHECK(rule.expect([](double x) { return x * x; }) == doctest::Approx(1.0 / 3).epsilon(1e-6));
    CHECK_THROWS_AS(trapezoid_on_grid(0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("find_root_bracketed solves simple equations") {
    CHECK(find_root_bracketed([](double x) { return x - 1.0; }, 0.0, 2.0, 1e-10) ==
          doctest::Approx(1.0).epsilon(1e-12));
    const double r = find_root_bracketed([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-12);
    CHECK(std::abs(r - std::sqrt(2.0)) < 1e-10);
    const double b = find_root_bracketed([](double x) { return x / (1.0 + x) - 0.2; }, 0.0, 10.0);
    CHECK(std::abs(b - 0.25) < 1e-9);
}

TEST_CASE("find_root_bracketed residual obeys the tolerance") {
    auto f = [](double x) { return std::cos(x) - x; };
    const double r = find_root_bracketed(f, 0.0, 1.0, 1e-12, 1e-13);
    CHECK(std::abs(f(r)) < 1e-10);
}

TEST_CASE("find_root_bracketed requires a sign change") {
    CHECK_THROWS_AS(find_root_bracketed([](double x) { return x * x + 1.0; }, -1.0, 1.0),
                    BracketError);
}

TEST_CASE("smallest_root_scan picks the smallest root") {
    auto f = [](double x) { return (x - 1.0) * (x - 3.0); };
    CHECK(smallest_root_scan(f, 0.0, 4.0, 40) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(smallest_root_scan([](double x) { return std::sin(x); }, 1.0, 7.0, 100) -
                   M_PI) < 1e-8);
}

TEST_CASE("smallest_root_scan agrees with the plain solver on monotone functions") {
    auto f = [](double x) { return std::tanh(x - 2.0); };
    const double a = smallest_root_scan(f, 0.0, 5.0, 64);
    const double b = find_root_bracketed(f, 0.0, 5.0);
    CHECK(std::abs(a - b) < 1e-9);
}

TEST_CASE("smallest_root_scan errors without a crossing") {
    CHECK_THROWS_AS(smallest_root_scan([](double x) { return 1.0 + x * x; }, 0.0, 1.0, 16),
                    BracketError);
    CHECK_THROWS_AS(smallest_root_scan([](double) { return 1.0; }, 0.0, 1.0, 1),
                    std::invalid_argument);
}

TEST_CASE("qr_orthocomplement on a coordinate subspace") {
    const int n = 6, p = 2;
    Matrix x = Matrix::Zero(n, p);
    x(0, 0) = 1.0;
    x(1, 1) = 1.0;
    const Matrix g = qr_orthocomplement(x);
    REQUIRE(g.rows() == n - p);
    REQUIRE(g.cols() == n);
    CHECK((g * x).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((g * g.transpose() - Matrix::Identity(n - p, n - p)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("qr_orthocomplement defining identities on a random design") {
    RngStream rng(7);
    const int n = 20, p = 5;
    Matrix x(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
    const Matrix g = qr_orthocomplement(x);
    CHECK((g * x).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((g * g.transpose() - Matrix::Identity(n - p, n - p)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("qr_orthocomplement 2x1 case") {
    Matrix x(2, 1);
    x << 1.0, 0.0;
    const Matrix g = qr_orthocomplement(x);
    CHECK(std::abs(g(0, 0)) < 1e-12);
    CHECK(std::abs(std::abs(g(0, 1)) - 1.0) < 1e-12);
}

TEST_CASE("qr_orthocomplement rejects rank deficiency") {
    Matrix x(5, 2);
    for (int i = 0; i < 5; ++i) {
        x(i, 0) = i + 1.0;
        x(i, 1) = 2.0 * (i + 1.0);
    }
    CHECK_THROWS_AS(qr_orthocomplement(x), RankError);
    CHECK_THROWS_AS(qr_orthocomplement(Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("least_squares_solve recovers consistent systems") {
    RngStream rng(11);
    Matrix a(8, 3);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = rng.normal();
    const Matrix q = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(8, 3);
    Vector c(3);
    c << 1.5, -2.0, 0.25;
    const Vector sol = least_squares_solve(q, q * c);
    CHECK((sol - c).cwiseAbs().maxCoeff() < 1e-12);

    // right-hand side orthogonal to the column span maps to zero
    const Matrix g = qr_orthocomplement(q);
    const Vector v_perp = g.row(0).transpose();
    CHECK(least_squares_solve(q, v_perp).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("least_squares_solve matches the normal equations") {
    RngStream rng(13);
    Matrix x(12, 4);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 4; ++j) x(i, j) = rng.normal();
    Vector v(12);
    for (int i = 0; i < 12; ++i) v[i] = rng.normal();
    const Vector qr_sol = least_squares_solve(x, v);
    const Vector ne_sol = (x.transpose() * x).ldlt().solve(x.transpose() * v);
    CHECK((qr_sol - ne_sol).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("rng streams are reproducible") {
    RngStream a(42, 3), b(42, 3);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    RngStream c(42, 3), d(42, 3);
    for (int i = 0; i < 100; ++i) {
        CHECK(c.uniform() == d.uniform());
        CHECK(c.normal() == d.normal());
    }
}

TEST_CASE("distinct streams differ") {
    RngStream a(42, 0), b(42, 1), c(43, 0);
    int same_ab = 0, same_ac = 0;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        if (va == b.next_u64()) ++same_ab;
        if (va == c.next_u64()) ++same_ac;
    }
    CHECK(same_ab == 0);
    CHECK(same_ac == 0);
}

TEST_CASE("substreams are deterministic and independent") {
    RngStream root(9, 0);
    RngStream s1 = root.substream(5);
    RngStream s2 = RngStream(9, 0).substream(5);
    for (int i = 0; i < 32; ++i) CHECK(s1.next_u64() == s2.next_u64());
    RngStream s3 = root.substream(6);
    CHECK(s3.next_u64() != RngStream(9, 0).substream(5).next_u64());
}

TEST_CASE("rng normals have the right first moments") {
    RngStream rng(2024);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum_sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
}
