#include <catch2/catch_amalgamated.hpp>

#include "skewlab/torus_map.hpp"

using namespace skewlab;

TEST_CASE("cat map evaluation", "[torus-map]") {
    const AnosovMap A = AnosovMap::cat();
    const Vec2 o = eval_map(A, {0.0, 0.0});
    CHECK(o[0] == 0.0);
    CHECK(o[1] == 0.0);

    const Vec2 p = eval_map(A, {0.5, 0.5});
    CHECK(p[0] == Catch::Approx(0.5));
    CHECK(p[1] == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("sine shears fix the origin", "[torus-map]") {
    const AnosovMap A = AnosovMap::cat_with_shear(0.01);
    const Vec2 o = eval_map(A, {0.0, 0.0});
    CHECK(std::abs(o[0]) < 1e-15);
    CHECK(std::abs(o[1]) < 1e-15);
}

TEST_CASE("linear map commutes with lattice shifts", "[torus-map]") {
    const AnosovMap A = AnosovMap::cat();
    for (const Vec2 x : {Vec2{0.2, 0.7}, Vec2{0.93, 0.08}}) {
        const Vec2 a = A.eval(x);
        const Vec2 b = A.eval({x[0] + 2.0, x[1] - 1.0});
        CHECK(torus_dist(a, b) < 1e-12);
    }
}

TEST_CASE("shear Jacobian determinant equals det M exactly on a grid", "[torus-map]") {
    const AnosovMap A = AnosovMap::cat_with_shear(0.05);
    for (int i = 0; i < 7; ++i) {
        const Vec2 x{i / 7.0, (i * i % 7) / 7.0};
        CHECK(std::abs(A.jacobian(x).det() - 1.0) < 1e-12);
    }
}

TEST_CASE("invalid shears are rejected", "[torus-map]") {
    // Profile depending on the sheared coordinate breaks volume preservation.
    CHECK_THROWS_AS(AnosovMap({2, 1, 1, 1}, {Shear{0, TrigPoly::sine({1, 0}, 0.1)}}), ConfigError);
    // Non-hyperbolic matrix.
    CHECK_THROWS_AS(AnosovMap({1, 1, 0, 1}), ConfigError);
    // Determinant != +-1.
    CHECK_THROWS_AS(AnosovMap({3, 1, 1, 1}), ConfigError);
}

TEST_CASE("Birkhoff sums", "[torus-map]") {
    const AnosovMap A = AnosovMap::cat();
    CHECK(birkhoff_sum(A, TrigPoly::zero(), {0.3, 0.4}, 7) == 0.0);
    CHECK(birkhoff_sum(A, TrigPoly::constant(1.7), {0.1, 0.9}, 5) == Catch::Approx(5 * 1.7));
    CHECK(birkhoff_sum(A, TrigPoly::cosine({1, 0}), {0.0, 0.0}, 3) == Catch::Approx(3.0));
    CHECK_THROWS_AS(birkhoff_sum(A, TrigPoly::zero(), {0, 0}, 0), ConfigError);
}

TEST_CASE("Birkhoff cocycle identity", "[torus-map]") {
    const AnosovMap A = AnosovMap::cat_with_shear(0.01);
    const TrigPoly tau = TrigPoly::cosine({1, 0}, 0.5) + TrigPoly::sine({1, 1}, 0.25);
    for (const Vec2 x : {Vec2{0.11, 0.57}, Vec2{0.83, 0.29}}) {
        for (const auto [m, n] : {std::pair<int, int>{3, 4}, {5, 2}, {1, 9}}) {
            const double whole = birkhoff_sum(A, tau, x, m + n);
            const double split = birkhoff_sum(A, tau, x, n) + birkhoff_sum(A, tau, A.iterate(x, n), m);
            CHECK(std::abs(whole - split) < 1e-12);
        }
    }
}

TEST_CASE("extension step", "[torus-map]") {
    const AnosovMap A = AnosovMap::cat();
    const TrigPoly zero = TrigPoly::zero();
    CircleExtensionState s{{0.2, 0.6}, 0.37};
    CHECK(extension_step(A, zero, s).omega == Catch::Approx(0.37));

    // Quarter rotation over the fixed point returns after 4 steps.
    const TrigPoly quarter = TrigPoly::constant(0.25);
    CircleExtensionState t{{0.0, 0.0}, 0.125};
    for (int k = 0; k < 4; ++k) t = extension_step(A, quarter, t);
    CHECK(t.omega == Catch::Approx(0.125));
    CHECK(torus_dist(t.x, {0.0, 0.0}) < 1e-12);

    const TrigPoly halfcos = TrigPoly::cosine({1, 0}, 0.5);
    const CircleExtensionState u = extension_step(A, halfcos, {{0.0, 0.0}, 0.0});
    CHECK(u.omega == Catch::Approx(0.5));
}

TEST_CASE("uniform grid mass is preserved", "[torus-map]") {
    TrigPoly f = TrigPoly::cosine({1, 0});
    f += TrigPoly::sine({1, 1}, 0.3);
    f += TrigPoly::constant(0.2);
    const int G = 64;

    auto grid_mean = [&](const AnosovMap& A, bool push) {
        double s = 0;
        for (int i = 0; i < G; ++i)
            for (int j = 0; j < G; ++j) {
                Vec2 x{double(i) / G, double(j) / G};
                if (push) x = A.eval(x);
                s += f.eval_real(x);
            }
        return s / (G * G);
    };

    const AnosovMap lin = AnosovMap::cat();
    CHECK(std::abs(grid_mean(lin, true) - grid_mean(lin, false)) < 1e-12);

    const AnosovMap pert = AnosovMap::cat_with_shear(0.01);
    CHECK(std::abs(grid_mean(pert, true) - grid_mean(pert, false)) < 1.0 / G);
}

TEST_CASE("complexified sup norm rejects negative radius", "[torus-map]") {
    CHECK_THROWS_AS(complexified_sup_norm(TrigPoly::constant(1.0), -0.1), ConfigError);
    CHECK(complexified_sup_norm(TrigPoly::constant(1.0), 0.7) == Catch::Approx(1.0));
}
