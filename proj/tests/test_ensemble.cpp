#include <catch2/catch_amalgamated.hpp>

#include "skewlab/ensemble.hpp"

using namespace skewlab;

namespace {
const double kPi2 = kTwoPi * kTwoPi / 4.0;  // pi^2
}

TEST_CASE("eigenbasis dimensions follow the lattice count", "[ensemble]") {
    CHECK(build_eigenbasis(2 * kPi2).dim() == 1);   // only the constant
    CHECK(build_eigenbasis(4 * kPi2).dim() == 5);   // + (1,0), (0,1) pairs
    CHECK(build_eigenbasis(8 * kPi2).dim() == 9);   // + (1,1), (1,-1) pairs
    CHECK_THROWS_AS(build_eigenbasis(-1.0), ConfigError);
}

TEST_CASE("eigenbasis carries eigenvalues 4 pi^2 |alpha|^2 in order", "[ensemble]") {
    const LaplaceEigenbasis basis(8 * kPi2);
    REQUIRE(basis.dim() == 9);
    CHECK(basis.modes()[0].eigenvalue == 0.0);
    for (int j = 1; j <= 4; ++j) CHECK(basis.modes()[j].eigenvalue == Catch::Approx(4 * kPi2));
    for (int j = 5; j <= 8; ++j) CHECK(basis.modes()[j].eigenvalue == Catch::Approx(8 * kPi2));
    for (const auto& m : basis.modes()) CHECK(m.poly.is_real_valued(1e-12));
}

TEST_CASE("fixed seeds give bit-identical samples", "[ensemble]") {
    const LaplaceEigenbasis basis(8 * kPi2);
    const std::vector<double> a = sample_coefficients(basis, 42, 7);
    const std::vector<double> b = sample_coefficients(basis, 42, 7);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    const std::vector<double> c = sample_coefficients(basis, 43, 7);
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i) identical = identical && a[i] == c[i];
    CHECK_FALSE(identical);
}

TEST_CASE("pointwise Gaussian law of samples", "[ensemble]") {
    const LaplaceEigenbasis basis(4 * kPi2);
    const Vec2 x{0.17, 0.62};
    const std::vector<double> phi = basis.values_at(x);
    double want_var = 0;
    for (const double v : phi) want_var += v * v;

    const int S = 10000;
    double mean = 0, second = 0;
    for (int s = 0; s < S; ++s) {
        const std::vector<double> X = sample_coefficients(basis, 5, s);
        double val = 0;
        for (int j = 0; j < basis.dim(); ++j) val += X[j] * phi[j];
        mean += val;
        second += val * val;
    }
    mean /= S;
    second /= S;
    CHECK(std::abs(mean) < 4.0 * std::sqrt(want_var / S));
    CHECK(std::abs(second - mean * mean - want_var) < 0.05 * want_var);
}

TEST_CASE("sigma2_pair basics and Monte Carlo oracle", "[ensemble]") {
    const LaplaceEigenbasis basis(4 * kPi2);
    const AnosovMap A = AnosovMap::cat();
    const Vec2 x{0.2, 0.4}, y{0.8, 0.1};
    const int n = 2;

    CHECK(sigma2_pair(basis, A, x, x, n) == 0.0);
    CHECK(sigma2_pair(basis, A, x, y, n) == Catch::Approx(sigma2_pair(basis, A, y, x, n)));

    const double want = sigma2_pair(basis, A, x, y, n);
    const std::vector<double> bx = basis_birkhoff(basis, A, x, n);
    const std::vector<double> by = basis_birkhoff(basis, A, y, n);
    const int S = 10000;
    double mean = 0, second = 0;
    for (int s = 0; s < S; ++s) {
        const std::vector<double> X = sample_coefficients(basis, 9, s);
        double val = 0;
        for (int j = 0; j < basis.dim(); ++j) val += X[j] * (bx[j] - by[j]);
        mean += val;
        second += val * val;
    }
    mean /= S;
    second /= S;
    CHECK(std::abs(second - mean * mean - want) < 0.05 * want);
}

TEST_CASE("expected trace square: limits and monotonicity", "[ensemble]") {
    const LaplaceEigenbasis basis(4 * kPi2);
    const AnosovMap A = AnosovMap::cat();

    // q = 0: phases collapse, the expectation is the squared trace sum.
    CHECK(expected_trace_sq(basis, A, 0, 2) == Catch::Approx(1.0).margin(1e-12));
    CHECK(expected_trace_sq(basis, A, 0, 3) == Catch::Approx(1.0).margin(1e-12));

    // Large q: only the diagonal survives; cat map n=2 gives 5/25.
    const double diag = diagonal_weight_sum(A, 2);
    CHECK(diag == Catch::Approx(0.2).margin(1e-14));
    CHECK(std::abs(expected_trace_sq(basis, A, 50, 2) - 0.2) < 1e-6);

    // Bounds and monotonicity in q^2.
    double prev = expected_trace_sq(basis, A, 0, 2);
    for (int q = 1; q <= 4; ++q) {
        const double cur = expected_trace_sq(basis, A, q, 2);
        CHECK(cur <= prev + 1e-12);
        CHECK(cur >= diag - 1e-12);
        prev = cur;
    }
}

TEST_CASE("Monte Carlo agrees with the closed form", "[ensemble]") {
    const AnosovMap A = AnosovMap::cat();
    EnsembleConfig cfg;
    cfg.N = 4 * kPi2;
    cfg.q = 1;
    cfg.n = 2;
    cfg.samples = 5000;
    cfg.seed = 1;

    const LaplaceEigenbasis basis(cfg.N);
    const double closed = expected_trace_sq(basis, A, cfg.q, cfg.n);
    const MonteCarloResult mc = monte_carlo_trace_sq(cfg, A);
    CHECK(std::abs(mc.mean - closed) <= 3.0 * mc.std_error);

    // q = 0 is exact with zero variance.
    cfg.q = 0;
    cfg.samples = 100;
    const MonteCarloResult zero = monte_carlo_trace_sq(cfg, A);
    CHECK(zero.mean == 1.0);
    CHECK(zero.std_error == 0.0);
}

TEST_CASE("standard error shrinks like the CLT", "[ensemble]") {
    const AnosovMap A = AnosovMap::cat();
    EnsembleConfig cfg;
    cfg.N = 4 * kPi2;
    cfg.q = 1;
    cfg.n = 2;
    cfg.seed = 3;
    cfg.samples = 4000;
    const MonteCarloResult a = monte_carlo_trace_sq(cfg, A);
    cfg.samples = 8000;
    const MonteCarloResult b = monte_carlo_trace_sq(cfg, A);
    const double ratio = b.std_error / a.std_error;
    CHECK(std::abs(ratio - 1.0 / std::sqrt(2.0)) < 0.2 * (1.0 / std::sqrt(2.0)));
}

TEST_CASE("moment check", "[ensemble]") {
    const LaplaceEigenbasis basis(4 * kPi2);
    const MomentReport rep = moment_check(basis, 0.02, 4, 2000, 11);
    REQUIRE(rep.orders.size() == 3);  // p = 0, 2, 4
    CHECK(rep.moments[0] == 1.0);
    CHECK(rep.moments[1] > 0);
    CHECK(std::isfinite(rep.moments[2]));
    CHECK(rep.stable);
    // Jensen: E[X^4] >= (E[X^2])^2.
    CHECK(rep.moments[2] >= rep.moments[1] * rep.moments[1] - 1e-9);
}

TEST_CASE("diophantine scan", "[ensemble]") {
    // Rational dependence: alpha = (1, -1) annihilates (1, 1).
    const DiophantineScore a = diophantine_check({1.0, 1.0}, 2.0, 50);
    CHECK(a.score == 0.0);
    CHECK_FALSE(a.pass);

    // Golden ratio is badly approximable.
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const DiophantineScore b = diophantine_check({1.0, phi}, 1.0, 100);
    CHECK(b.score > 0.3);

    const DiophantineScore c = diophantine_check({0.5, 0.25}, 3.0, 50);
    CHECK(c.score == 0.0);

    CHECK_THROWS_AS(diophantine_check({1.0, phi}, 1.0, 1), ConfigError);
}

TEST_CASE("variance lower bound over integer directions", "[ensemble]") {
    const LaplaceEigenbasis basis(8 * kPi2);
    const AnosovMap A = AnosovMap::cat();
    PeriodicOrbitSet set = periodic_points(A, 2);
    REQUIRE(set.size() == 5);
    const Vec2 x = set.points[0];  // the fixed point (0,0): its own orbit
    const Vec2 y = set.points[1];  // lies on a genuine period-2 orbit

    const VarianceBound vb = variance_bound_check(basis, A, x, y, 2, 50);
    CHECK(vb.min_ratio > 0);

    // alpha = (1, 0) direction reduces to the plain Birkhoff norm; sign flip
    // leaves sigma^2 unchanged.
    const std::vector<double> u = basis_birkhoff(basis, A, x, 2);
    const std::vector<double> v = basis_birkhoff(basis, A, y, 2);
    double s_plus = 0, s_minus = 0, norm_u = 0;
    for (int j = 0; j < basis.dim(); ++j) {
        norm_u += u[j] * u[j];
        const double t = 2 * u[j] + 3 * v[j];
        s_plus += t * t;
        const double tm = -2 * u[j] - 3 * v[j];
        s_minus += tm * tm;
    }
    CHECK(s_plus == Catch::Approx(s_minus));
    CHECK(norm_u > 0);
}

TEST_CASE("nondiophantine failure rate decays in m0", "[ensemble]") {
    const LaplaceEigenbasis basis(8 * kPi2);
    const AnosovMap A = AnosovMap::cat();
    PeriodicOrbitSet set = periodic_points(A, 2);
    const std::vector<double> m0s{1.0, 2.0, 3.0, 5.0, 8.0};
    const auto rows =
        nondiophantine_rate(basis, A, set.points[0], set.points[1], 2, m0s, 200, 17, 50);
    REQUIRE(rows.size() == m0s.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].fail_probability >= 0.0);
        CHECK(rows[i].fail_probability <= 1.0);
        CHECK(rows[i].reference == Catch::Approx(std::pow(2.0, -m0s[i])));
        if (i > 0) CHECK(rows[i].fail_probability <= rows[i - 1].fail_probability + 1e-12);
    }
    CHECK(rows.back().fail_probability == 0.0);  // large m0: scan cannot fail
}
