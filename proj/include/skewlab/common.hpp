#pragma once

// Shared basics: torus points, 2x2 matrices, error types, deterministic
// Gaussian streams and a small parallel-for helper.

#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace skewlab {

using cpx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Raised when user-facing configuration is invalid (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a numerical quality gate fails, e.g. aliasing audit or
/// truncation-stability check (CLI exit code 3).
struct NumericalGateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Torus points and 2x2 linear algebra
// ---------------------------------------------------------------------------

using Vec2 = std::array<double, 2>;
using IVec2 = std::array<long long, 2>;

/// Reduce to [0,1) with a snap-to-zero guard so that values within 1e-15 of
/// the upper endpoint do not survive as 0.99999999999999989.
inline double wrap01(double t) {
    t -= std::floor(t);
    if (t >= 1.0 - 1e-15) t = 0.0;
    return t;
}

inline Vec2 wrap01(Vec2 x) { return {wrap01(x[0]), wrap01(x[1])}; }

/// Reduce to [-1/2, 1/2): signed representative of t mod 1.
inline double wrap_pm(double t) {
    t -= std::floor(t + 0.5);
    return t;
}

/// Torus distance between points (sup metric over nearest representatives).
inline double torus_dist(const Vec2& a, const Vec2& b) {
    return std::max(std::abs(wrap_pm(a[0] - b[0])), std::abs(wrap_pm(a[1] - b[1])));
}

struct Mat2 {
    // Row-major: [[a, b], [c, d]].
    double a = 0, b = 0, c = 0, d = 0;

    static Mat2 identity() { return {1, 0, 0, 1}; }

    Vec2 apply(const Vec2& x) const { return {a * x[0] + b * x[1], c * x[0] + d * x[1]}; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }

    Mat2 inverse() const {
        const double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    Mat2 transpose() const { return {a, c, b, d}; }
};

struct IMat2 {
    long long a = 0, b = 0, c = 0, d = 0;

    static IMat2 identity() { return {1, 0, 0, 1}; }

    IVec2 apply(const IVec2& x) const { return {a * x[0] + b * x[1], c * x[0] + d * x[1]}; }

    long long det() const { return a * d - b * c; }
    long long trace() const { return a + d; }
    IMat2 transpose() const { return {a, c, b, d}; }

    Mat2 to_real() const {
        return {double(a), double(b), double(c), double(d)};
    }

    bool operator==(const IMat2& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
};

/// Integer matrix product with overflow detection.
inline bool checked_mul(const IMat2& x, const IMat2& y, IMat2& out) {
    auto mul_add = [](long long p, long long q, long long r, long long s, long long& res) {
        long long t1, t2;
        if (__builtin_mul_overflow(p, q, &t1)) return false;
        if (__builtin_mul_overflow(r, s, &t2)) return false;
        if (__builtin_add_overflow(t1, t2, &res)) return false;
        return true;
    };
    return mul_add(x.a, y.a, x.b, y.c, out.a) && mul_add(x.a, y.b, x.b, y.d, out.b) &&
           mul_add(x.c, y.a, x.d, y.c, out.c) && mul_add(x.c, y.b, x.d, y.d, out.d);
}

/// M^n over the integers; throws naming the largest safe exponent on overflow.
inline IMat2 integer_power(const IMat2& M, int n) {
    IMat2 acc = IMat2::identity();
    for (int k = 1; k <= n; ++k) {
        IMat2 next;
        if (!checked_mul(acc, M, next)) {
            throw std::overflow_error("integer_power: M^" + std::to_string(n) +
                                      " overflows 64-bit integers; max safe exponent is " +
                                      std::to_string(k - 1));
        }
        acc = next;
    }
    return acc;
}

/// Eigen-data of a hyperbolic integer matrix: (lambda, mu) with |lambda| > 1,
/// and unit eigenvectors. Throws for non-hyperbolic input.
struct Hyperbolic2x2 {
    double lambda = 0;  // |lambda| > 1
    double mu = 0;      // |mu| < 1
    Vec2 v_unstable{};  // unit eigenvector for lambda
    Vec2 v_stable{};    // unit eigenvector for mu
};

inline Vec2 unit_eigenvector(const Mat2& m, double eig) {
    // (m - eig I) v = 0; pick the more stable row.
    double r1[2] = {m.a - eig, m.b};
    double r2[2] = {m.c, m.d - eig};
    double n1 = std::hypot(r1[0], r1[1]);
    double n2 = std::hypot(r2[0], r2[1]);
    Vec2 v{};
    if (n1 >= n2) {
        v = {-r1[1], r1[0]};
    } else {
        v = {-r2[1], r2[0]};
    }
    double n = std::hypot(v[0], v[1]);
    return {v[0] / n, v[1] / n};
}

inline Hyperbolic2x2 hyperbolic_eigen(const IMat2& M) {
    if (std::llabs(M.det()) != 1)
        throw ConfigError("matrix must have determinant +-1");
    const double t = double(M.trace());
    const double d = double(M.det());
    const double disc = t * t - 4.0 * d;
    if (disc <= 0) throw ConfigError("matrix is not hyperbolic (complex eigenvalues)");
    const double s = std::sqrt(disc);
    double e1 = (t + s) / 2.0, e2 = (t - s) / 2.0;
    if (std::abs(e1) < std::abs(e2)) std::swap(e1, e2);
    if (std::abs(e1) <= 1.0 + 1e-12)
        throw ConfigError("matrix is not hyperbolic (|eigenvalue| <= 1)");
    Hyperbolic2x2 h;
    h.lambda = e1;
    h.mu = e2;
    const Mat2 m = M.to_real();
    h.v_unstable = unit_eigenvector(m, e1);
    h.v_stable = unit_eigenvector(m, e2);
    return h;
}

// ---------------------------------------------------------------------------
// Deterministic Gaussian streams
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded N(0,1) stream. Streams for distinct (seed, index) pairs are
/// independent, so per-sample draws do not depend on thread scheduling.
/// Box-Muller on top of mt19937_64 keeps the byte stream fully specified
/// by the standard (std::normal_distribution is implementation-defined).
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t index)
        : rng_(splitmix64(seed ^ splitmix64(index + 0x51ab5fULL))) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        spare_ = rad * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return rad * std::cos(kTwoPi * u2);
    }

private:
    double uniform01() {
        // (0,1]: avoids log(0).
        return (double(rng_() >> 11) + 1.0) * 0x1p-53;
    }

    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Parallel helpers
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n). Results must be written to per-index slots so
/// the outcome does not depend on the thread count.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const unsigned count = std::min<std::size_t>(threads, n);
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace skewlab
