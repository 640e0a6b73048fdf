#pragma once

// Period-n points of A: exact lattice enumeration for the linear part via an
// integer Smith reduction of M^n - I, Newton continuation for perturbed maps,
// unstable-direction cocycle data, and the periodic-orbit trace sums.

#include <algorithm>
#include <sstream>

#include "skewlab/torus_map.hpp"

namespace skewlab {

struct PeriodicOrbitSet {
    int n = 0;
    std::vector<Vec2> points;
    std::vector<double> weights;   // |det(I - D_x A^n)| per point
    std::vector<double> jac_u;     // product J^u(x) ... J^u(A^{n-1} x), filled by unstable_frame
    std::vector<double> birkhoff;  // tau^{(n)}(x) cache, filled on demand

    std::size_t size() const { return points.size(); }
};

struct UnstableFrame {
    std::vector<Vec2> direction;   // unit vector spanning E^u at each stored point
    std::vector<double> jac;       // J^u(x) = |D_x A u(x)| at each stored point
};

namespace detail {

struct I128Mat2 {
    __int128 a = 0, b = 0, c = 0, d = 0;
};

/// Diagonalize B over Z: returns diag (s1, s2) with s1, s2 > 0 and the
/// accumulated column transform C so that solutions of Bx in Z^2 are
/// x = C (i/s1, j/s2) mod 1.
inline void smith_diagonalize(I128Mat2 B, long long& s1, long long& s2, IMat2& C) {
    I128Mat2 S = B;
    __int128 Ca = 1, Cb = 0, Cc = 0, Cd = 1;

    auto row_op = [&](int dst, int src, __int128 q) {
        // row_dst -= q * row_src
        if (dst == 0) {
            S.a -= q * S.c;
            S.b -= q * S.d;
        } else {
            S.c -= q * S.a;
            S.d -= q * S.b;
        }
    };
    auto col_op = [&](int dst, int src, __int128 q) {
        // col_dst -= q * col_src (and mirror into C)
        if (dst == 0) {
            S.a -= q * S.b;
            S.c -= q * S.d;
            Ca -= q * Cb;
            Cc -= q * Cd;
        } else {
            S.b -= q * S.a;
            S.d -= q * S.c;
            Cb -= q * Ca;
            Cd -= q * Cc;
        }
    };
    auto swap_rows = [&] { std::swap(S.a, S.c); std::swap(S.b, S.d); };
    auto swap_cols = [&] {
        std::swap(S.a, S.b);
        std::swap(S.c, S.d);
        std::swap(Ca, Cb);
        std::swap(Cc, Cd);
    };

    for (int guard = 0; guard < 4096; ++guard) {
        if (S.c == 0 && S.b == 0) break;
        if (S.a == 0) {
            if (S.c != 0)
                swap_rows();
            else
                swap_cols();
            continue;
        }
        if (S.c != 0) {
            row_op(1, 0, S.c / S.a);
            if (S.c != 0) swap_rows();
            continue;
        }
        if (S.b != 0) {
            col_op(1, 0, S.b / S.a);
            if (S.b != 0) swap_cols();
            continue;
        }
    }
    if (S.b != 0 || S.c != 0) throw std::logic_error("smith_diagonalize did not converge");

    auto fits = [](__int128 v) {
        return v <= __int128(INT64_MAX) && v >= __int128(INT64_MIN);
    };
    __int128 d1 = S.a < 0 ? -S.a : S.a;
    __int128 d2 = S.d < 0 ? -S.d : S.d;
    if (!fits(d1) || !fits(d2) || !fits(Ca) || !fits(Cb) || !fits(Cc) || !fits(Cd))
        throw std::overflow_error("smith_diagonalize: entries exceed 64-bit range");
    s1 = (long long)d1;
    s2 = (long long)d2;
    C = {(long long)Ca, (long long)Cb, (long long)Cc, (long long)Cd};
}

inline double exact_fraction_mod1(long long inum, long long iden, long long jnum, long long jden) {
    auto m = [](long long v, long long s) { return double(((v % s) + s) % s) / double(s); };
    return wrap01(m(inum, iden) + m(jnum, jden));
}

}  // namespace detail

/// All period-n points of the linear map M, by exact integer arithmetic:
/// solutions of (M^n - I) x in Z^2. Count and common weight are both
/// |det(M^n - I)|.
inline PeriodicOrbitSet enumerate_linear(const IMat2& M, int n) {
    if (n < 1) throw ConfigError("enumerate_linear requires n >= 1");
    const IMat2 Mn = integer_power(M, n);
    detail::I128Mat2 B{__int128(Mn.a) - 1, __int128(Mn.b), __int128(Mn.c), __int128(Mn.d) - 1};
    const __int128 det = B.a * B.d - B.b * B.c;
    if (det == 0) throw ConfigError("M^n - I is singular; map is not hyperbolic");

    long long s1 = 0, s2 = 0;
    IMat2 C;
    detail::smith_diagonalize(B, s1, s2, C);

    PeriodicOrbitSet set;
    set.n = n;
    const long long count = s1 * s2;
    set.points.reserve(count);
    for (long long i = 0; i < s1; ++i) {
        for (long long j = 0; j < s2; ++j) {
            const double x1 = detail::exact_fraction_mod1(C.a * i, s1, C.b * j, s2);
            const double x2 = detail::exact_fraction_mod1(C.c * i, s1, C.d * j, s2);
            set.points.push_back({x1, x2});
        }
    }
    std::sort(set.points.begin(), set.points.end());
    set.weights.assign(set.points.size(), double(count));
    return set;
}

/// Newton refinement of linear-map seeds to period-n points of the perturbed
/// map. Point count is preserved; divergence or collisions signal that the
/// perturbation left the structural-stability continuation regime.
inline PeriodicOrbitSet refine_newton(const AnosovMap& A, const PeriodicOrbitSet& seeds, int n,
                                      double tol = 1e-12) {
    if (n != seeds.n) throw ConfigError("refine_newton: seed set has wrong period");
    PeriodicOrbitSet out;
    out.n = n;
    out.points.resize(seeds.size());
    out.weights.resize(seeds.size());

    for (std::size_t idx = 0; idx < seeds.size(); ++idx) {
        Vec2 x = seeds.points[idx];
        bool done = false;
        for (int it = 0; it < 50; ++it) {
            const Vec2 fx = A.iterate(x, n);
            const Vec2 F{wrap_pm(fx[0] - x[0]), wrap_pm(fx[1] - x[1])};
            if (std::max(std::abs(F[0]), std::abs(F[1])) < tol) {
                done = true;
                break;
            }
            Mat2 J = A.jacobian_n(x, n);
            J.a -= 1.0;
            J.d -= 1.0;
            const Vec2 step = J.inverse().apply(F);
            x = wrap01({x[0] - step[0], x[1] - step[1]});
        }
        if (!done) {
            std::ostringstream msg;
            msg << "refine_newton: no convergence from seed (" << seeds.points[idx][0] << ", "
                << seeds.points[idx][1] << ") at n=" << n
                << "; perturbation too large for continuation";
            throw NumericalGateError(msg.str());
        }
        Mat2 J = A.jacobian_n(x, n);
        J.a -= 1.0;
        J.d -= 1.0;
        out.points[idx] = x;
        out.weights[idx] = std::abs(J.det());
    }

    // Deterministic ordering, then collision audit.
    std::vector<std::size_t> perm(out.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t i, std::size_t j) { return out.points[i] < out.points[j]; });
    PeriodicOrbitSet sorted;
    sorted.n = n;
    for (std::size_t i : perm) {
        sorted.points.push_back(out.points[i]);
        sorted.weights.push_back(out.weights[i]);
    }
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        if (torus_dist(sorted.points[i], sorted.points[i + 1]) < 1e-8) {
            std::ostringstream msg;
            msg << "refine_newton: points collided near (" << sorted.points[i][0] << ", "
                << sorted.points[i][1] << "); perturbation too large";
            throw NumericalGateError(msg.str());
        }
    }
    return sorted;
}

/// Period-n points of A: exact enumeration for the linear part, Newton
/// refinement on top of it otherwise.
inline PeriodicOrbitSet periodic_points(const AnosovMap& A, int n, double tol = 1e-12) {
    PeriodicOrbitSet seeds = enumerate_linear(A.linear_part(), n);
    if (A.is_linear()) return seeds;
    return refine_newton(A, seeds, n, tol);
}

/// Forward cocycle power iteration for the unstable direction at each stored
/// point; fills set.jac_u with the orbit products.
inline UnstableFrame unstable_frame(const AnosovMap& A, PeriodicOrbitSet& set) {
    UnstableFrame frame;
    frame.direction.resize(set.size());
    frame.jac.resize(set.size());
    set.jac_u.assign(set.size(), 0.0);

    for (std::size_t i = 0; i < set.size(); ++i) {
        Vec2 u = A.eigen_data().v_unstable;
        bool converged = false;
        for (int loop = 0; loop < 200 && !converged; ++loop) {
            Vec2 v = u;
            Vec2 x = set.points[i];
            for (int k = 0; k < set.n; ++k) {
                v = A.jacobian(x).apply(v);
                const double nv = std::hypot(v[0], v[1]);
                v = {v[0] / nv, v[1] / nv};
                x = A.eval(x);
            }
            const double dplus = std::hypot(v[0] - u[0], v[1] - u[1]);
            const double dminus = std::hypot(v[0] + u[0], v[1] + u[1]);
            converged = std::min(dplus, dminus) < 1e-10;
            u = v;
        }
        if (!converged)
            throw NumericalGateError("unstable_frame: cocycle iteration did not converge; "
                                     "map outside the hyperbolic continuation regime");

        double product = 1.0;
        Vec2 v = u;
        Vec2 x = set.points[i];
        for (int k = 0; k < set.n; ++k) {
            v = A.jacobian(x).apply(v);
            const double factor = std::hypot(v[0], v[1]);
            if (k == 0) {
                frame.direction[i] = u;
                frame.jac[i] = factor;
            }
            product *= factor;
            v = {v[0] / factor, v[1] / factor};
            x = A.eval(x);
        }
        if (frame.jac[i] <= 1.0)
            throw NumericalGateError("unstable_frame: J^u <= 1; map not uniformly expanding "
                                     "along the computed direction");
        set.jac_u[i] = product;
    }
    return frame;
}

/// Fills set.birkhoff with tau^{(n)} at each stored point.
inline void fill_birkhoff(const AnosovMap& A, const TrigPoly& tau, PeriodicOrbitSet& set) {
    set.birkhoff.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        set.birkhoff[i] = birkhoff_sum(A, tau, set.points[i], set.n);
}

/// S(n, q) = sum over period-n points of e^{2 pi i q tau^{(n)}(x)} / weight.
/// The phase-free case is summed by weight groups so that the linear-map
/// identity sum = count/|det(M^n - I)| = 1 comes out exact.
inline cpx orbit_trace_sum(const AnosovMap& A, const TrigPoly& tau, int q, PeriodicOrbitSet& set) {
    const bool no_phase = (q == 0) || tau.empty();
    if (no_phase) {
        bool uniform = true;
        for (const double w : set.weights)
            if (w != set.weights[0]) uniform = false;
        if (uniform && !set.weights.empty())
            return cpx(double(set.size()) / set.weights[0], 0.0);
        double s = 0;
        for (const double w : set.weights) s += 1.0 / w;
        return cpx(s, 0.0);
    }
    if (set.birkhoff.size() != set.size()) fill_birkhoff(A, tau, set);
    cpx s(0, 0);
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double phase = kTwoPi * q * set.birkhoff[i];
        s += cpx(std::cos(phase), std::sin(phase)) / set.weights[i];
    }
    return s;
}

inline cpx orbit_trace_sum(const AnosovMap& A, const TrigPoly& tau, int q, int n) {
    PeriodicOrbitSet set = periodic_points(A, n);
    return orbit_trace_sum(A, tau, q, set);
}

/// CSV export: n, x1, x2, weight, jac_u, birkhoff.
inline std::string orbit_set_csv(const PeriodicOrbitSet& set) {
    std::ostringstream os;
    os.precision(17);
    os << "n,x1,x2,weight,jac_u,birkhoff\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        os << set.n << ',' << set.points[i][0] << ',' << set.points[i][1] << ','
           << set.weights[i] << ',' << (i < set.jac_u.size() ? set.jac_u[i] : 0.0) << ','
           << (i < set.birkhoff.size() ? set.birkhoff[i] : 0.0) << '\n';
    }
    return os.str();
}

}  // namespace skewlab
