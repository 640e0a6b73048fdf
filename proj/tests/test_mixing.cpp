#include <catch2/catch_amalgamated.hpp>

#include "skewlab/mixing.hpp"

using namespace skewlab;

namespace {
const IMat2 kCat{2, 1, 1, 1};
const TrigPoly kHalfCos = TrigPoly::cosine({1, 0}, 0.5);
}  // namespace

TEST_CASE("direct correlations of the linear map are Fourier orthogonality", "[mixing]") {
    const AnosovMap A = AnosovMap::cat();
    const TrigPoly zero = TrigPoly::zero();

    // (M^T)^2 (1,0) = (5,3), so g = e_{-(5,3)} correlates exactly at N = 2.
    const TrigPoly f = TrigPoly::mode({1, 0}, 1.0);
    const auto series =
        correlation_direct_series(A, zero, 0, f, TrigPoly::mode({-5, -3}, 1.0), 3, 256);
    CHECK(std::abs(series[0]) < 1e-12);
    CHECK(std::abs(series[1]) < 1e-12);
    CHECK(std::abs(series[2] - cpx(1, 0)) < 1e-12);
    CHECK(std::abs(series[3]) < 1e-12);

    // Mean-zero g against constant f: zero for all N.
    const auto flat = correlation_direct_series(A, zero, 0, TrigPoly::constant(1.0),
                                                TrigPoly::mode({1, 0}, 1.0), 4, 256);
    for (const cpx& c : flat) CHECK(std::abs(c) < 1e-12);

    CHECK_THROWS_AS(correlation_direct(A, zero, 0, f, f, 2, 128), ConfigError);
}

TEST_CASE("spectral correlations: N = 0 and constants", "[mixing]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    const TruncatedOperator T = assemble(A, kHalfCos, 1, scheme, 6, 256);

    // N = 0 is the plain pairing integral: int e_a e_{-a} = 1.
    const TrigPoly f = TrigPoly::mode({1, 0}, 1.0);
    const TrigPoly g = TrigPoly::mode({-1, 0}, 1.0);
    CHECK(std::abs(correlation_spectral(T, f, g, 0).value - cpx(1, 0)) < 1e-12);
    CHECK(std::abs(correlation_spectral(T, f, TrigPoly::mode({0, 1}, 1.0), 0).value) < 1e-12);

    // Constants are invariant for the untwisted operator.
    const TruncatedOperator T0 = assemble(A, TrigPoly::zero(), 0, scheme, 6, 256);
    const TrigPoly one = TrigPoly::constant(1.0);
    for (int N : {0, 1, 5, 9})
        CHECK(std::abs(correlation_spectral(T0, one, one, N).value - cpx(1, 0)) < 1e-10);
}

TEST_CASE("direct and spectral routes agree", "[mixing]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    const int N_max = 6, G = 1024;
    const TrigPoly f = TrigPoly::mode({1, 0}, 1.0);
    const TrigPoly g = TrigPoly::mode({-1, 0}, 1.0);

    for (int q : {0, 1, 3}) {
        const TruncatedOperator T = assemble_auto(A, kHalfCos, q, scheme, 12);
        const auto spec = correlation_spectral_series(T, f, g, N_max);
        const auto direct = correlation_direct_series(A, kHalfCos, q, f, g, N_max, G);
        for (int N = 0; N <= N_max; ++N) CHECK(std::abs(spec[N] - direct[N]) < 1e-6);
    }
}

TEST_CASE("decay fit on synthetic sequences", "[mixing]") {
    std::vector<cpx> plain, wobble;
    for (int N = 0; N < 24; ++N) {
        plain.push_back(std::pow(0.5, N));
        wobble.push_back(std::pow(0.5, N) * std::cos(double(N)));
    }
    const DecayFit a = decay_rate_fit(plain);
    CHECK_FALSE(a.oscillatory);
    CHECK(a.base == Catch::Approx(0.5).margin(1e-6));

    const DecayFit b = decay_rate_fit(wobble);
    CHECK(b.oscillatory);
    CHECK(std::abs(b.base - 0.5) < 0.05);

    // Scale invariance.
    std::vector<cpx> scaled = wobble;
    for (cpx& c : scaled) c *= cpx(7.3, -1.2);
    CHECK(std::abs(decay_rate_fit(scaled).base - b.base) < 1e-9);

    // Noise floor and the short-input precondition.
    std::vector<cpx> tiny(15, cpx(1e-14, 0));
    CHECK(decay_rate_fit(tiny).below_noise);
    CHECK_THROWS_AS(decay_rate_fit(std::vector<cpx>(5, cpx(1, 0))), ConfigError);
}

TEST_CASE("fitted base tracks the spectral radius under a gap", "[mixing]") {
    const AnosovMap A = AnosovMap::cat();
    const WeightScheme scheme(kCat, 0.02);
    const TruncatedOperator T = assemble(A, kHalfCos, 1, scheme, 10, 256);
    const std::vector<cpx>& eig = T.eigenvalues();
    const double rho = std::abs(eig[0]);
    const double gap = rho - std::abs(eig[1]);
    const auto series = correlation_spectral_series(T, TrigPoly::mode({1, 0}, 1.0),
                                                    TrigPoly::mode({-1, 0}, 1.0), 24);
    const DecayFit fit = decay_rate_fit(series);
    if (gap >= 0.1 && !fit.below_noise) {
        CHECK(std::abs(fit.base - rho) < 0.05);
    } else {
        WARN("spectral gap " << gap << " too small for the tracking assertion");
    }
}

TEST_CASE("Dirichlet box search", "[mixing]") {
    CHECK(dirichlet_box_search({0.5}, 1, 2) == 2);
    CHECK(dirichlet_box_search({0.3}, 1, 10) == 10);

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const long long n = dirichlet_box_search({phi - 1.0, std::sqrt(2.0) - 1.0}, 1, 5);
    CHECK(n <= 25);
    CHECK(std::abs(wrap_pm(n * (phi - 1.0))) <= 0.2 + 1e-12);
    CHECK(std::abs(wrap_pm(n * (std::sqrt(2.0) - 1.0))) <= 0.2 + 1e-12);

    CHECK_THROWS_AS(dirichlet_box_search({0.5}, 1, 1), ConfigError);
    CHECK_THROWS_AS(dirichlet_box_search(std::vector<double>(9, 0.123), 1, 10), ConfigError);
}

TEST_CASE("bump function and its transform", "[mixing]") {
    const BumpPsi bump;
    CHECK(bump.phi0_integral() == Catch::Approx(0.4440).margin(1e-3));
    CHECK(bump.psi_hat(0.0) == Catch::Approx(0.1971).margin(1e-4));
    CHECK(bump.psi_hat(0.0) == Catch::Approx(bump.phi0_integral() * bump.phi0_integral()));

    CHECK(bump.psi(0.0) > 0);
    CHECK(bump.psi(2.5) == 0.0);
    CHECK(bump.psi(-2.0) == 0.0);
    for (double t = -1.9; t < 2.0; t += 0.37) CHECK(bump.psi(t) >= 0.0);
    for (double xi : {0.3, 2.0, 11.0}) CHECK(bump.psi_hat(xi) >= 0.0);

    CHECK_THROWS_AS(BumpPsi(8), ConfigError);
}

TEST_CASE("frequency-averaged lower bound holds", "[mixing]") {
    const AnosovMap A = AnosovMap::cat();
    for (const TrigPoly& tau : {kHalfCos, TrigPoly::zero()}) {
        for (int n : {2, 3}) {
            const FrequencyAverageReport rep = frequency_average(A, tau, n, 8);
            CHECK(rep.holds);
            CHECK(rep.rhs == Catch::Approx(rep.psi_hat0 * rep.diag_sum - rep.tail));
        }
    }
    const FrequencyAverageReport rep = frequency_average(A, kHalfCos, 2, 8);
    CHECK(rep.diag_sum == Catch::Approx(0.2).margin(1e-12));
    CHECK_THROWS_AS(frequency_average(A, kHalfCos, 2, 3), ConfigError);
}
