#include <catch2/catch_amalgamated.hpp>

#include "skewlab/transfer_operator.hpp"

using namespace skewlab;

namespace {

const IMat2 kCat{2, 1, 1, 1};

const TrigPoly kHalfCos = TrigPoly::cosine({1, 0}, 0.5);

/// Cat map forced through the generic per-column FFT path: a shear of zero
/// amplitude leaves the dynamics linear but defeats the is_linear dispatch.
AnosovMap cat_generic_path() { return AnosovMap(kCat, {Shear{0, TrigPoly::sine({0, 1}, 0.0)}}); }

}  // namespace

TEST_CASE("linear, untwisted operator is a weighted permutation", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    const int K = 6;
    const TruncatedOperator T = assemble(A, TrigPoly::zero(), 0, scheme, K, 64);

    CHECK(std::abs(T.entry({0, 0}, {0, 0}) - cpx(1, 0)) < 1e-12);
    const IMat2 Mt = kCat.transpose();
    for (int a1 = -K; a1 <= K; ++a1)
        for (int a2 = -K; a2 <= K; ++a2) {
            const IVec2 img = Mt.apply({a1, a2});
            for (int b1 = -K; b1 <= K; ++b1)
                for (int b2 = -K; b2 <= K; ++b2) {
                    const cpx v = T.entry({b1, b2}, {a1, a2});
                    if (b1 == img[0] && b2 == img[1]) {
                        const double want =
                            scheme.weight({a1, a2}) / scheme.weight({b1, b2});
                        CHECK(std::abs(v - cpx(want, 0)) < 1e-12);
                    } else {
                        CHECK(std::abs(v) < 1e-12);
                    }
                }
        }
    CHECK(T.meta().aliasing_tail < 1e-12);
}

TEST_CASE("generic FFT path agrees with the linear fast path", "[transfer-operator]") {
    const WeightScheme scheme(kCat, 0.02);
    const int K = 5, G = 128;
    const TruncatedOperator fast = assemble(AnosovMap::cat(), kHalfCos, 2, scheme, K, G);
    const TruncatedOperator slow = assemble(cat_generic_path(), kHalfCos, 2, scheme, K, G);
    REQUIRE(fast.dim() == slow.dim());
    CHECK(fast.meta().linear_path);
    CHECK_FALSE(slow.meta().linear_path);
    const double diff = (fast.matrix() - slow.matrix()).cwiseAbs().maxCoeff();
    CHECK(diff < 1e-12);
}

TEST_CASE("constant roof functions contribute a scalar phase", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    const int K = 4, G = 128, q = 3;
    const double c = 0.37;
    const TruncatedOperator T0 = assemble(A, TrigPoly::zero(), 0, scheme, K, G);
    const TruncatedOperator Tc = assemble(A, TrigPoly::constant(c), q, scheme, K, G);
    const cpx phase = std::exp(cpx(0, kTwoPi * q * c));
    const double diff = (Tc.matrix() - phase * T0.matrix()).cwiseAbs().maxCoeff();
    CHECK(diff < 1e-12);
}

TEST_CASE("untwisted spectrum has the constants as leading eigenpair", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    const TruncatedOperator T = assemble(A, TrigPoly::zero(), 0, scheme, 6, 64);
    const SpectralReport rep = spectrum(T);
    CHECK(std::abs(rep.eigenvalues.front() - cpx(1, 0)) < 1e-12);
    CHECK(rep.spectral_radius == Catch::Approx(1.0).margin(1e-12));

    const EigResult full = eig_dense(T.matrix(), true);
    const Eigen::VectorXcd v = full.vectors.col(0);
    CHECK(std::abs(v(T.index({0, 0}))) == Catch::Approx(v.norm()).margin(1e-10));
}

TEST_CASE("matrix traces of the untwisted cat operator are exactly one", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    const TruncatedOperator T = assemble(A, TrigPoly::zero(), 0, scheme, 12, 128);
    for (int n = 1; n <= 6; ++n) {
        const cpx tr = matrix_trace(T, n);
        CHECK(std::abs(tr - cpx(1, 0)) < 1e-8);
    }
}

TEST_CASE("singular values of the weighted permutation are the weight ratios",
          "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    const int K = 6;
    const TruncatedOperator T = assemble(A, TrigPoly::zero(), 0, scheme, K, 64);

    std::vector<double> expected;
    const IMat2 Mt = kCat.transpose();
    for (int a1 = -K; a1 <= K; ++a1)
        for (int a2 = -K; a2 <= K; ++a2) {
            const IVec2 img = Mt.apply({a1, a2});
            if (std::max(std::llabs(img[0]), std::llabs(img[1])) <= K)
                expected.push_back(scheme.weight({a1, a2}) /
                                   scheme.weight({int(img[0]), int(img[1])}));
            else
                expected.push_back(0.0);
        }
    std::sort(expected.rbegin(), expected.rend());

    const std::vector<double> mu = singular_values(T);
    REQUIRE(mu.size() == expected.size());
    for (std::size_t i = 0; i < mu.size(); ++i) CHECK(std::abs(mu[i] - expected[i]) < 1e-10);

    const SpectralReport rep = spectrum(T);
    CHECK(mu.front() >= rep.spectral_radius - 1e-12);
}

TEST_CASE("Weyl inequality: eigenvalue products below singular products", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    const TruncatedOperator T = assemble(A, kHalfCos, 1, scheme, 8, 256);
    const std::vector<cpx> lam = T.eigenvalues();
    const std::vector<double> mu = singular_values(T);
    double sum_lam = 0, sum_mu = 0;
    for (std::size_t n = 0; n < mu.size(); ++n) {
        if (std::abs(lam[n]) < 1e-14 || mu[n] < 1e-14) break;
        sum_lam += std::log(std::abs(lam[n]));
        sum_mu += std::log(mu[n]);
        CHECK(sum_lam <= sum_mu + 1e-8);
    }
}

TEST_CASE("singular values decay like exp(-beta sqrt(n))", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    for (int q : {1, 3}) {
        const TruncatedOperator T = assemble(A, kHalfCos, q, scheme, 12, 256);
        const LineFit fit = fit_sqrt_decay(singular_values(T));
        CHECK(fit.slope < 0);
        CHECK(fit.r2 > 0.9);
        CHECK(fit.points > 20);
    }
}

TEST_CASE("Fredholm determinant of the untwisted operator is 1 - z", "[transfer-operator]") {
    std::vector<cpx> traces(10, cpx(1, 0));
    const std::vector<cpx> c = fredholm(traces, 10);
    CHECK(std::abs(c[0] - cpx(1, 0)) < 1e-15);
    CHECK(std::abs(c[1] + cpx(1, 0)) < 1e-10);
    for (int m = 2; m <= 10; ++m) CHECK(std::abs(c[m]) < 1e-10);

    const std::vector<cpx> roots = polynomial_roots({cpx(1, 0), cpx(-1, 0)});
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0] - cpx(1, 0)) < 1e-12);
}

TEST_CASE("Fredholm zeros match inverse eigenvalues", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    const TruncatedOperator T = assemble(A, kHalfCos, 1, scheme, 10, 256);
    std::vector<cpx> traces;
    for (int n = 1; n <= 12; ++n) traces.push_back(matrix_trace(T, n));
    const std::vector<cpx> c = fredholm(traces, 12);
    const std::vector<cpx> roots = polynomial_roots(c);
    const std::vector<cpx>& lam = T.eigenvalues();

    // Spectral radius below one: no Fredholm zero inside the unit disc.
    CHECK(std::abs(lam.front()) < 1.0);
    for (const cpx& z : roots) CHECK(std::abs(z) > 1.0 - 1e-6);

    // The top eigenvalue corresponds to the smallest-modulus zero.
    std::vector<cpx> sorted = roots;
    std::sort(sorted.begin(), sorted.end(),
              [](const cpx& a, const cpx& b) { return std::abs(a) < std::abs(b); });
    CHECK(std::abs(cpx(1, 0) / sorted[0] - lam[0]) < 1e-6);
}

TEST_CASE("spectral radius stays below one on test configurations", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    for (int q : {1, 3, 7}) {
        const TruncatedOperator T = assemble(A, kHalfCos, q, scheme, 8, 256);
        const SpectralReport rep = spectrum(T);
        CHECK(rep.spectral_radius <= 1.0 + 1e-8);
    }
}

TEST_CASE("trace growth check", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);

    const TruncatedOperator T0 = assemble(A, TrigPoly::zero(), 0, scheme, 8, 128);
    const TraceGrowthReport r0 = trace_growth_check(T0, 8);
    CHECK(r0.pass);
    CHECK(r0.spectral_radius == Catch::Approx(1.0).margin(1e-10));
    for (const double m : r0.root_moduli) CHECK(m == Catch::Approx(1.0).margin(1e-8));

    const TruncatedOperator T3 = assemble(A, kHalfCos, 3, scheme, 10, 256);
    CHECK(trace_growth_check(T3, 12).pass);

    // A constant roof leaves |Tr| unchanged.
    const TruncatedOperator Tc = assemble(A, TrigPoly::constant(0.21), 5, scheme, 8, 128);
    const TruncatedOperator Tz = assemble(A, TrigPoly::zero(), 0, scheme, 8, 128);
    for (int n = 1; n <= 6; ++n)
        CHECK(std::abs(matrix_trace(Tc, n)) == Catch::Approx(std::abs(matrix_trace(Tz, n))).margin(1e-9));
}

TEST_CASE("matrix traces cross-validate against orbit sums", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat_with_shear(0.01);
    const WeightScheme scheme(kCat, 0.02);
    const TruncatedOperator T = assemble(A, kHalfCos, 1, scheme, 12, 256);
    for (int n = 1; n <= 3; ++n) {
        const cpx orbit = orbit_trace_sum(A, kHalfCos, 1, n);
        const cpx mat = matrix_trace(T, n);
        CHECK(std::abs(orbit - mat) < 1e-5);
    }
    // Conjugation symmetry of the matrix trace in q.
    const TruncatedOperator Tm = assemble(A, kHalfCos, -1, scheme, 12, 256);
    for (int n = 1; n <= 3; ++n)
        CHECK(std::abs(matrix_trace(Tm, n) - std::conj(matrix_trace(T, n))) < 1e-9);
}

TEST_CASE("entry decay rate is positive", "[transfer-operator]") {
    const WeightScheme scheme(kCat, 0.02);
    const TruncatedOperator lin = assemble(AnosovMap::cat(), kHalfCos, 1, scheme, 8, 256);
    CHECK(entry_decay_rate(lin) > 0);

    const AnosovMap pert = AnosovMap::cat_with_shear(0.02);
    const TruncatedOperator per = assemble(pert, kHalfCos, 1, scheme, 8, 256);
    CHECK(entry_decay_rate(per) > 0);
}

TEST_CASE("truncation stability of the leading moduli", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    const TruncatedOperator T1 = assemble(A, kHalfCos, 1, scheme, 8, 256);
    const TruncatedOperator T2 = assemble(A, kHalfCos, 1, scheme, 12, 256);
    CHECK(top_moduli_gap(T1, T2, 5) < 1e-4);
}

TEST_CASE("assembly gates", "[transfer-operator]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);

    // Oversampling rule violation names the required grid.
    CHECK_THROWS_AS(assemble(A, kHalfCos, 40, scheme, 8, 128), NumericalGateError);

    // Window does not fit: K too large for the grid.
    CHECK_THROWS_AS(assemble(A, TrigPoly::zero(), 0, scheme, 16, 64), NumericalGateError);

    // Weight dynamic range blows past double precision.
    const WeightScheme wild(kCat, 3.0);
    CHECK_THROWS_AS(assemble(A, TrigPoly::zero(), 0, wild, 16, 256), NumericalGateError);

    // assemble_auto picks a grid that passes the audit.
    const TruncatedOperator T = assemble_auto(A, kHalfCos, 4, scheme, 6);
    CHECK(T.meta().aliasing_tail < 1e-10);
}
