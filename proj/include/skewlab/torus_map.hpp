#pragma once

// T^2 dynamics: the hyperbolic map A = M o (shear composition), Birkhoff
// sums and the circle-extension step.
//
// Perturbations are volume-preserving analytic shears
//   (x1, x2) -> (x1 + eps g1(x2), x2)   or   (x1, x2) -> (x1, x2 + eps g2(x1))
// with trigonometric profiles, so det DA == det M holds exactly and the
// structural-stability continuation from the linear model applies.

#include <optional>
#include <utility>

#include "skewlab/trig_poly.hpp"

namespace skewlab {

struct Shear {
    int axis = 0;       // 0: shifts x1 by profile(x2); 1: shifts x2 by profile(x1)
    TrigPoly profile;   // one-variable trig poly in the transverse coordinate
};

struct CircleExtensionState {
    Vec2 x{};
    double omega = 0;
};

class AnosovMap {
public:
    explicit AnosovMap(IMat2 M, std::vector<Shear> shears = {})
        : M_(M), shears_(std::move(shears)), eig_(hyperbolic_eigen(M)) {
        validate_shears();
        if (!shears_.empty()) check_jacobian_on_grid();
    }

    static AnosovMap cat() { return AnosovMap({2, 1, 1, 1}); }

    /// Cat map composed with the shear (x1 + eps sin(2 pi x2), x2). The
    /// perturbation vanishes at the origin, so (0,0) stays a fixed point.
    static AnosovMap cat_with_shear(double eps) {
        Shear s{0, TrigPoly::sine({0, 1}, eps)};
        return AnosovMap({2, 1, 1, 1}, {s});
    }

    const IMat2& linear_part() const { return M_; }
    const std::vector<Shear>& shears() const { return shears_; }
    bool is_linear() const { return shears_.empty(); }
    bool volume_preserving() const { return true; }  // |det M| = 1 and shears are unimodular
    double lambda() const { return eig_.lambda; }
    const Hyperbolic2x2& eigen_data() const { return eig_; }

    /// Max degree of the shear profiles (0 for the linear map).
    int perturbation_degree() const {
        int d = 0;
        for (const auto& s : shears_) d = std::max(d, s.profile.degree());
        return d;
    }

    Vec2 eval(const Vec2& x) const {
        Vec2 y = x;
        for (const auto& s : shears_) {
            if (s.axis == 0)
                y[0] += s.profile.eval_real({0.0, y[1]});
            else
                y[1] += s.profile.eval_real({y[0], 0.0});
        }
        return wrap01(M_.to_real().apply(y));
    }

    Mat2 jacobian(const Vec2& x) const {
        Vec2 y = x;
        Mat2 J = Mat2::identity();
        for (const auto& s : shears_) {
            Mat2 DS = Mat2::identity();
            if (s.axis == 0) {
                DS.b = profile_derivative(s, y[1]);
                y[0] += s.profile.eval_real({0.0, y[1]});
            } else {
                DS.c = profile_derivative(s, y[0]);
                y[1] += s.profile.eval_real({y[0], 0.0});
            }
            J = DS * J;
        }
        return M_.to_real() * J;
    }

    Vec2 iterate(const Vec2& x, int n) const {
        Vec2 y = x;
        for (int k = 0; k < n; ++k) y = eval(y);
        return y;
    }

    /// D_x A^n by the chain rule along the orbit.
    Mat2 jacobian_n(const Vec2& x, int n) const {
        Vec2 y = x;
        Mat2 J = Mat2::identity();
        for (int k = 0; k < n; ++k) {
            J = jacobian(y) * J;
            y = eval(y);
        }
        return J;
    }

private:
    void validate_shears() const {
        for (const auto& s : shears_) {
            if (s.axis != 0 && s.axis != 1) throw ConfigError("shear axis must be 0 or 1");
            if (!s.profile.is_real_valued(1e-12))
                throw ConfigError("shear profile must be real-valued");
            const int dep = (s.axis == 0) ? 0 : 1;  // forbidden variable index
            for (const auto& [a, c] : s.profile.terms())
                if (a[dep] != 0)
                    throw ConfigError("shear profile must depend only on the transverse coordinate");
        }
    }

    // d/dt profile(t) where t is the transverse coordinate.
    double profile_derivative(const Shear& s, double t) const {
        double d = 0;
        for (const auto& [a, c] : s.profile.terms()) {
            const int k = (s.axis == 0) ? a[1] : a[0];
            const double phase = kTwoPi * k * t;
            // d/dt Re(c e^{i phase}) with c's contribution kept complex and
            // summed; profiles are real-valued so the imaginary parts cancel.
            d += (c * cpx(0, kTwoPi * k) * cpx(std::cos(phase), std::sin(phase))).real();
        }
        return d;
    }

    void check_jacobian_on_grid() const {
        const int G = 16;
        const double want = double(M_.det());
        for (int i = 0; i < G; ++i)
            for (int j = 0; j < G; ++j) {
                const Vec2 x{double(i) / G, double(j) / G};
                if (std::abs(jacobian(x).det() - want) > 1e-10)
                    throw ConfigError("perturbation is not volume preserving");
            }
    }

    IMat2 M_;
    std::vector<Shear> shears_;
    Hyperbolic2x2 eig_;
};

inline Vec2 eval_map(const AnosovMap& A, const Vec2& x) { return A.eval(x); }

/// tau^{(n)}(x) = tau(x) + tau(Ax) + ... + tau(A^{n-1} x).
inline double birkhoff_sum(const AnosovMap& A, const TrigPoly& tau, const Vec2& x, int n) {
    if (n < 1) throw ConfigError("birkhoff_sum requires n >= 1");
    double s = 0;
    Vec2 y = x;
    for (int k = 0; k < n; ++k) {
        s += tau.eval_real(y);
        y = A.eval(y);
    }
    return s;
}

/// Coefficient majorant for the sup of |f| over T^2 + i[-r,r]^2.
inline double complexified_sup_norm(const TrigPoly& f, double r) {
    if (r < 0) throw ConfigError("complexified_sup_norm requires r >= 0");
    return f.sup_norm_upper(r);
}

/// One step of the circle extension (x, w) -> (A x, w + tau(x)).
inline CircleExtensionState extension_step(const AnosovMap& A, const TrigPoly& tau,
                                           const CircleExtensionState& s) {
    CircleExtensionState out;
    out.x = A.eval(s.x);
    out.omega = wrap01(s.omega + tau.eval_real(s.x));
    return out;
}

}  // namespace skewlab
