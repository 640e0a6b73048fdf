#pragma once

// Correlation functions of the circle extension by two routes (grid
// quadrature and the truncated-operator calculus), exponential decay-rate
// fits with a limsup-style peak mode, the Dirichlet box search and the
// frequency-averaged lower-bound inequality.

#include "skewlab/ensemble.hpp"
#include "skewlab/transfer_operator.hpp"

namespace skewlab {

// ---------------------------------------------------------------------------
// Direct route: grid quadrature of C(N) = int f(A^N x) e^{2 pi i q tau^(N)} g
// ---------------------------------------------------------------------------

/// C(N) for N = 0..N_max in one sweep over a G x G quadrature grid. Positions
/// and Birkhoff sums are advanced incrementally. Observables on the circle
/// factor are the single Fourier modes e^{+-2 pi i q theta}, which reduce the
/// T^2 x S^1 integral to this torus integral.
inline std::vector<cpx> correlation_direct_series(const AnosovMap& A, const TrigPoly& tau, int q,
                                                  const TrigPoly& f, const TrigPoly& g, int N_max,
                                                  int G) {
    if (G < 256) throw ConfigError("correlation_direct requires G >= 256");
    if (!A.volume_preserving())
        throw ConfigError("correlation_direct requires a volume-preserving map");
    const std::size_t total = std::size_t(G) * G;
    std::vector<double> x1(total), x2(total), birk(total, 0.0);
    std::vector<cpx> gv(total);
    for (int j = 0; j < G; ++j)
        for (int k = 0; k < G; ++k) {
            const std::size_t i = std::size_t(j) * G + k;
            x1[i] = double(j) / G;
            x2[i] = double(k) / G;
            gv[i] = g.eval({x1[i], x2[i]});
        }
    std::vector<cpx> out(N_max + 1);
    for (int N = 0;; ++N) {
        cpx acc(0, 0);
        for (std::size_t i = 0; i < total; ++i) {
            const cpx fv = f.eval({x1[i], x2[i]});
            const double phase = kTwoPi * q * birk[i];
            acc += fv * cpx(std::cos(phase), std::sin(phase)) * gv[i];
        }
        out[N] = acc / double(total);
        if (N == N_max) break;
        for (std::size_t i = 0; i < total; ++i) {
            const Vec2 x{x1[i], x2[i]};
            if (q != 0) birk[i] += tau.eval_real(x);
            const Vec2 y = A.eval(x);
            x1[i] = y[0];
            x2[i] = y[1];
        }
    }
    return out;
}

inline cpx correlation_direct(const AnosovMap& A, const TrigPoly& tau, int q, const TrigPoly& f,
                              const TrigPoly& g, int N, int G) {
    return correlation_direct_series(A, tau, q, f, g, N, G).back();
}

// ---------------------------------------------------------------------------
// Spectral route: L_m(g . T^N f) through the truncated operator
// ---------------------------------------------------------------------------

struct SpectralCorrelation {
    cpx value{};
    double truncation_tail = 0;  // discarded-mass fraction of the final multiply
};

inline SpectralCorrelation correlation_spectral(const TruncatedOperator& T, const TrigPoly& f,
                                                const TrigPoly& g, int N) {
    SpaceElement v = SpaceElement::from_trig_poly(f, T.scheme(), T.K());
    Eigen::VectorXcd vec = Eigen::Map<const Eigen::VectorXcd>(v.b.data(), v.b.size());
    for (int k = 0; k < N; ++k) vec = T.matrix() * vec;
    SpaceElement w(T.K());
    Eigen::Map<Eigen::VectorXcd>(w.b.data(), w.b.size()) = vec;
    const MultiplyResult prod = multiply(g, w, T.scheme());
    return {lebesgue_functional(prod.element), prod.discarded_fraction};
}

/// The whole series C(0..N_max) with one matrix-vector pass.
inline std::vector<cpx> correlation_spectral_series(const TruncatedOperator& T, const TrigPoly& f,
                                                    const TrigPoly& g, int N_max) {
    SpaceElement v = SpaceElement::from_trig_poly(f, T.scheme(), T.K());
    Eigen::VectorXcd vec = Eigen::Map<const Eigen::VectorXcd>(v.b.data(), v.b.size());
    std::vector<cpx> out;
    out.reserve(N_max + 1);
    SpaceElement w(T.K());
    for (int N = 0; N <= N_max; ++N) {
        Eigen::Map<Eigen::VectorXcd>(w.b.data(), w.b.size()) = vec;
        out.push_back(multiply(g, w, T.scheme()).element.at({0, 0}));
        if (N < N_max) vec = T.matrix() * vec;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decay-rate extraction
// ---------------------------------------------------------------------------

struct DecayFit {
    double base = 0;        // fitted exponential base e^{slope}
    int points_used = 0;
    bool oscillatory = false;
    bool below_noise = false;
};

/// Fitted exponential base of |C(N)|. Monotone windows are fit directly;
/// sign-oscillating windows are fit through their running peaks, emulating a
/// limsup. Values at or below 1e-12 are excluded.
inline DecayFit decay_rate_fit(const std::vector<cpx>& values) {
    if (values.size() < 12) throw ConfigError("decay_rate_fit requires at least 12 values");
    DecayFit fit;
    std::vector<int> idx;
    std::vector<double> mag;
    for (int i = 0; i < int(values.size()); ++i) {
        const double m = std::abs(values[i]);
        if (m > 1e-12) {
            idx.push_back(i);
            mag.push_back(m);
        }
    }
    double maxmag = 0;
    for (const double m : mag) maxmag = std::max(maxmag, m);
    if (idx.size() < 4 || maxmag < 1e-13) {
        fit.below_noise = true;
        return fit;
    }
    for (std::size_t i = 0; i + 1 < idx.size(); ++i)
        if (idx[i + 1] != idx[i] + 1 || mag[i + 1] > mag[i] * (1.0 + 1e-9)) fit.oscillatory = true;

    std::vector<double> xs, ys;
    if (!fit.oscillatory) {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            xs.push_back(double(idx[i]));
            ys.push_back(std::log(mag[i]));
        }
    } else {
        // Local peaks of |C| within the retained window.
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const bool up_ok = (i == 0) || mag[i] >= mag[i - 1];
            const bool down_ok = (i + 1 == idx.size()) || mag[i] >= mag[i + 1];
            if (up_ok && down_ok) {
                xs.push_back(double(idx[i]));
                ys.push_back(std::log(mag[i]));
            }
        }
    }
    if (xs.size() < 2) {
        fit.below_noise = true;
        return fit;
    }
    const LineFit lf = least_squares_line(xs, ys);
    fit.base = std::exp(lf.slope);
    fit.points_used = lf.points;
    return fit;
}

// ---------------------------------------------------------------------------
// Dirichlet box search
// ---------------------------------------------------------------------------

/// Smallest n in {D, ..., D Q^P} with dist(n a_j, Z) <= 1/Q for every angle
/// (angles in units of full turns). Existence is the box principle; running
/// out of range indicates a broken invariant.
inline long long dirichlet_box_search(const std::vector<double>& angles, long long D, long long Q) {
    if (Q < 2 || D < 1) throw ConfigError("dirichlet_box_search requires Q >= 2 and D >= 1");
    double range = double(D);
    for (std::size_t j = 0; j < angles.size(); ++j) {
        range *= double(Q);
        if (range > 1e8) throw ConfigError("dirichlet_box_search range D*Q^P exceeds 1e8");
    }
    const long long hi = (long long)(range);
    for (long long n = D; n <= hi; ++n) {
        bool ok = true;
        for (const double a : angles)
            ok = ok && std::abs(wrap_pm(n * a)) <= 1.0 / double(Q) + 1e-12;
        if (ok) return n;
    }
    throw std::logic_error("dirichlet_box_search: no hit in {D..DQ^P}; box principle violated");
}

// ---------------------------------------------------------------------------
// Frequency averaging
// ---------------------------------------------------------------------------

/// The smooth bump psi = phi0 * phi0 with phi0(x) = e^{-1/(1-x^2)} on [-1,1]:
/// psi >= 0, supp psi in [-2,2] and psi_hat = (phi0_hat)^2 >= 0. Evaluated by
/// trapezoid quadrature on a configurable grid.
class BumpPsi {
public:
    explicit BumpPsi(int grid_points = 2001) : n_(grid_points) {
        if (n_ < 32) throw ConfigError("bump grid too coarse");
        h_ = 2.0 / (n_ - 1);
        vals_.resize(n_);
        for (int i = 0; i < n_; ++i) vals_[i] = phi0(-1.0 + i * h_);
        integral_ = trapezoid(vals_, h_);
        // Grid-coarseness gate: the integral must be stable under refinement.
        std::vector<double> fine(2 * n_ - 1);
        const double h2 = 2.0 / (2 * n_ - 2);
        for (int i = 0; i < 2 * n_ - 1; ++i) fine[i] = phi0(-1.0 + i * h2);
        if (std::abs(trapezoid(fine, h2) - integral_) > 1e-12 * std::max(1.0, integral_))
            throw NumericalGateError("bump grid too coarse; increase bump_grid");
    }

    static double phi0(double x) {
        const double s = 1.0 - x * x;
        return s > 0 ? std::exp(-1.0 / s) : 0.0;
    }

    double phi0_integral() const { return integral_; }

    /// psi(t) = int phi0(s) phi0(t - s) ds, supported on [-2, 2].
    double psi(double t) const {
        if (std::abs(t) >= 2.0) return 0.0;
        double s = 0;
        for (int i = 0; i < n_; ++i) {
            const double x = -1.0 + i * h_;
            const double w = (i == 0 || i == n_ - 1) ? 0.5 : 1.0;
            s += w * vals_[i] * phi0(t - x);
        }
        return s * h_;
    }

    /// psi_hat(xi) = (phi0_hat(xi))^2 with phi0_hat(xi) = int phi0 e^{-i xi x} dx;
    /// nonnegative by construction.
    double psi_hat(double xi) const {
        double c = 0;
        for (int i = 0; i < n_; ++i) {
            const double x = -1.0 + i * h_;
            const double w = (i == 0 || i == n_ - 1) ? 0.5 : 1.0;
            c += w * vals_[i] * std::cos(xi * x);
        }
        c *= h_;
        return c * c;
    }

private:
    static double trapezoid(const std::vector<double>& v, double h) {
        double s = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += ((i == 0 || i + 1 == v.size()) ? 0.5 : 1.0) * v[i];
        return s * h;
    }

    int n_;
    double h_;
    std::vector<double> vals_;
    double integral_ = 0;
};

struct FrequencyAverageReport {
    int n = 0;
    int T = 0;
    double lhs = 0;       // (1/T) sum_{|q| <= 2T} psi(q/T) |S(n,q)|^2
    double rhs = 0;       // psi_hat(0) * diag_sum - tail
    double diag_sum = 0;  // sum_x 1/w_x^2
    double psi_hat0 = 0;
    double tail = 0;      // diag_sum * sum_{0<|p|<=3} psi_hat(2 pi T p)
    bool holds = false;
};

/// Poisson-summation lower bound: averaging |S(n,q)|^2 against the dilated
/// bump dominates the diagonal orbit sum up to a rapidly decaying tail.
inline FrequencyAverageReport frequency_average(const AnosovMap& A, const TrigPoly& tau, int n,
                                                int T, int bump_grid = 2001) {
    if (T < 4) throw ConfigError("frequency_average requires T >= 4");
    const BumpPsi bump(bump_grid);
    FrequencyAverageReport rep;
    rep.n = n;
    rep.T = T;
    rep.psi_hat0 = bump.psi_hat(0.0);

    PeriodicOrbitSet set = periodic_points(A, n);
    for (const double w : set.weights) rep.diag_sum += 1.0 / (w * w);

    for (int q = -2 * T; q <= 2 * T; ++q) {
        const double weight = bump.psi(double(q) / double(T));
        if (weight == 0.0) continue;
        const cpx S = orbit_trace_sum(A, tau, q, set);
        rep.lhs += weight * std::norm(S);
    }
    rep.lhs /= double(T);

    double tail_sum = 0;
    for (int p = 1; p <= 3; ++p) tail_sum += 2.0 * std::abs(bump.psi_hat(kTwoPi * T * p));
    rep.tail = rep.diag_sum * tail_sum;
    rep.rhs = rep.psi_hat0 * rep.diag_sum - rep.tail;
    rep.holds = rep.lhs >= rep.rhs;
    return rep;
}

}  // namespace skewlab
