#pragma once

// The anisotropic Hilbert space machinery: frequency splitting along the
// expanding/contracting directions of the transpose action, exponential
// weights, the weighted basis rho_alpha = w_alpha e_alpha, inner products,
// multiplication (coefficient convolution) and the Lebesgue functional.
//
// Frequencies split through the spectral projectors of M^T because
// composition acts on Fourier indices by alpha -> M^T alpha; "plus" is the
// expanding direction of that action.

#include <vector>

#include "skewlab/trig_poly.hpp"

namespace skewlab {

struct FrequencyIndex {
    FreqPair alpha{};
    double plus_norm = 0;   // |alpha^+|_1
    double minus_norm = 0;  // |alpha^-|_1
};

/// Spectral splitting of R^2 under M^T. P+ projects onto the eigendirection
/// with |eigenvalue| > 1, P- onto the complementary one.
class FreqSplit {
public:
    explicit FreqSplit(const IMat2& M) : M_(M) {
        const Hyperbolic2x2 h = hyperbolic_eigen({M.a, M.c, M.b, M.d});  // eigen of M^T
        vp_ = h.v_unstable;
        vm_ = h.v_stable;
        // Dual basis: rows of [vp vm]^{-1}.
        const double det = vp_[0] * vm_[1] - vp_[1] * vm_[0];
        lp_ = {vm_[1] / det, -vm_[0] / det};
        lm_ = {-vp_[1] / det, vp_[0] / det};
        // |x^+|_1 + |x^-|_1 <= C |x|_1, attained at a unit vector e1 or e2.
        C_ = std::max(split_l1_sum({1, 0}), split_l1_sum({0, 1}));
    }

    const IMat2& matrix() const { return M_; }

    /// Components (x^+, x^-) of a real vector.
    std::pair<Vec2, Vec2> project(const Vec2& x) const {
        const double cp = lp_[0] * x[0] + lp_[1] * x[1];
        const double cm = lm_[0] * x[0] + lm_[1] * x[1];
        return {{cp * vp_[0], cp * vp_[1]}, {cm * vm_[0], cm * vm_[1]}};
    }

    FrequencyIndex split(const FreqPair& a) const {
        const auto [p, m] = project({double(a[0]), double(a[1])});
        return {a, std::abs(p[0]) + std::abs(p[1]), std::abs(m[0]) + std::abs(m[1])};
    }

    /// The norm-comparison constant C(M) with |x|_1 <= |x^+|_1 + |x^-|_1 <= C(M) |x|_1.
    double comparison_constant() const { return C_; }

private:
    double split_l1_sum(const Vec2& x) const {
        const auto [p, m] = project(x);
        return std::abs(p[0]) + std::abs(p[1]) + std::abs(m[0]) + std::abs(m[1]);
    }

    IMat2 M_;
    Vec2 vp_{}, vm_{};  // eigenvectors of M^T
    Vec2 lp_{}, lm_{};  // dual functionals
    double C_ = 1;
};

inline FrequencyIndex split_frequency(const FreqSplit& split, const FreqPair& a) {
    return split.split(a);
}

/// Weight map alpha -> e^{2 pi r (|alpha^+|_1 - |alpha^-|_1)} together with
/// the splitting it derives from.
class WeightScheme {
public:
    WeightScheme(const IMat2& M, double r) : split_(M), r_(r) {
        if (r <= 0) throw ConfigError("WeightScheme requires r > 0");
    }

    double r() const { return r_; }
    const FreqSplit& split() const { return split_; }

    double log_weight(const FreqPair& a) const {
        const FrequencyIndex fi = split_.split(a);
        return kTwoPi * r_ * (fi.plus_norm - fi.minus_norm);
    }

    double weight(const FreqPair& a) const { return std::exp(log_weight(a)); }

private:
    FreqSplit split_;
    double r_;
};

/// Finite element of the weighted space: rho-basis coefficients over the
/// box |alpha|_inf <= K, stored row-major in alpha1 then alpha2.
struct SpaceElement {
    int K = 0;
    std::vector<cpx> b;  // size (2K+1)^2

    explicit SpaceElement(int K_) : K(K_), b((2 * K_ + 1) * (2 * K_ + 1), cpx(0, 0)) {}

    int side() const { return 2 * K + 1; }
    bool in_box(const FreqPair& a) const { return linf_norm(a) <= K; }

    std::size_t index(const FreqPair& a) const {
        return std::size_t(a[0] + K) * side() + std::size_t(a[1] + K);
    }

    FreqPair freq_at(std::size_t idx) const {
        const int s = side();
        return {int(idx) / s - K, int(idx) % s - K};
    }

    cpx& at(const FreqPair& a) { return b[index(a)]; }
    cpx at(const FreqPair& a) const { return b[index(a)]; }

    double l2_norm() const {
        double s = 0;
        for (const cpx& c : b) s += std::norm(c);
        return std::sqrt(s);
    }

    /// f = sum fhat(alpha) e_alpha = sum (fhat(alpha)/w_alpha) rho_alpha.
    static SpaceElement from_trig_poly(const TrigPoly& f, const WeightScheme& scheme, int K) {
        SpaceElement out(K);
        for (const auto& [a, c] : f.terms()) {
            if (!out.in_box(a))
                throw ConfigError("from_trig_poly: coefficient outside the truncation box");
            out.at(a) = c / scheme.weight(a);
        }
        return out;
    }

    TrigPoly to_trig_poly(const WeightScheme& scheme, double drop_below = 0.0) const {
        TrigPoly f;
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (std::abs(b[i]) <= drop_below) continue;
            const FreqPair a = freq_at(i);
            f.add(a, b[i] * scheme.weight(a));
        }
        return f;
    }
};

/// <f, g> = sum fhat(alpha) conj(ghat(alpha)) w_alpha^{-2}; makes {rho_alpha}
/// orthonormal.
inline cpx aniso_inner(const TrigPoly& f, const TrigPoly& g, const WeightScheme& scheme) {
    cpx s(0, 0);
    for (const auto& [a, cf] : f.terms()) {
        const cpx cg = g.coeff(a);
        if (cg == cpx(0, 0)) continue;
        const double w = scheme.weight(a);
        s += cf * std::conj(cg) / (w * w);
    }
    return s;
}

inline double aniso_norm(const TrigPoly& f, const WeightScheme& scheme) {
    return std::sqrt(std::abs(aniso_inner(f, f, scheme)));
}

struct MultiplyResult {
    SpaceElement element;
    double discarded_fraction = 0;  // l2 mass pushed outside the box / total
};

/// Multiplication by the trig poly F in rho coordinates: coefficient-space
/// convolution, truncated to the ambient box with the lost mass reported.
inline MultiplyResult multiply(const TrigPoly& F, const SpaceElement& phi,
                               const WeightScheme& scheme) {
    MultiplyResult res{SpaceElement(phi.K), 0.0};
    double kept = 0, lost = 0;
    for (std::size_t i = 0; i < phi.b.size(); ++i) {
        if (phi.b[i] == cpx(0, 0)) continue;
        const FreqPair a = phi.freq_at(i);
        const cpx e_coeff = phi.b[i] * scheme.weight(a);  // coefficient of e_a
        for (const auto& [be, cF] : F.terms()) {
            const FreqPair g{a[0] + be[0], a[1] + be[1]};
            const cpx contrib = cF * e_coeff;
            if (res.element.in_box(g)) {
                res.element.at(g) += contrib / scheme.weight(g);
            } else {
                lost += std::norm(contrib / std::exp(scheme.log_weight(g)));
            }
        }
    }
    for (const cpx& c : res.element.b) kept += std::norm(c);
    const double total = kept + lost;
    res.discarded_fraction = total > 0 ? lost / total : 0.0;
    return res;
}

/// Operator-norm bound for multiplication by F in H^2_{r~}: L = sqrt(sum_a
/// e^{-4 pi eps |a|_1}) with eps = r~/C(M) - r, the geometric-series constant.
/// Throws when r~ is not strictly above C(M) r, naming the required radius.
inline double mult_norm_bound(const WeightScheme& scheme, double r_tilde) {
    const double C = scheme.split().comparison_constant();
    const double eps = r_tilde / C - scheme.r();
    if (eps <= 0) {
        std::ostringstream msg;
        msg << "multiplier radius " << r_tilde << " too small; need r~ > C(M)*r = "
            << C * scheme.r();
        throw ConfigError(msg.str());
    }
    const double u = std::exp(-2.0 * kTwoPi * eps);  // e^{-4 pi eps}
    return (1.0 + u) / (1.0 - u);
}

/// L_m(G) = <G, rho_0> = b_0; equals the integral over T^2 for trig polys.
inline cpx lebesgue_functional(const SpaceElement& G) { return G.at({0, 0}); }

}  // namespace skewlab
