#pragma once

// Truncated twisted composition operators on the weighted Fourier box
// |alpha|_inf <= K. The matrix in the rho-basis is
//
//   T[beta, alpha] = (w_alpha / w_beta) ghat_alpha(beta),
//
// where ghat_alpha is the Fourier transform of x -> e^{2 pi i q tau(x)}
// e^{2 pi i alpha . A(x)}, read off an oversampled FFT grid with an explicit
// aliasing-tail audit. For linear maps every column is a lattice shift of the
// twist symbol, so one global FFT of e^{2 pi i q tau} assembles the whole
// matrix; the generic path does one FFT per column. Both produce identical
// values where they overlap.

#include <memory>
#include <optional>

#include "skewlab/aniso_space.hpp"
#include "skewlab/fft_grid.hpp"
#include "skewlab/lapack_wrap.hpp"
#include "skewlab/periodic_orbits.hpp"

namespace skewlab {

struct AssemblyInfo {
    int K = 0;
    int G = 0;
    int q = 0;
    double r = 0;
    double aliasing_tail = 0;
    bool linear_path = false;
};

class TruncatedOperator {
public:
    TruncatedOperator(int K, MatrixXc T, WeightScheme scheme, AssemblyInfo meta)
        : K_(K), T_(std::move(T)), scheme_(std::move(scheme)), meta_(meta) {}

    int K() const { return K_; }
    int dim() const { return int(T_.rows()); }
    int side() const { return 2 * K_ + 1; }
    const MatrixXc& matrix() const { return T_; }
    const WeightScheme& scheme() const { return scheme_; }
    const AssemblyInfo& meta() const { return meta_; }

    std::size_t index(const FreqPair& a) const {
        return std::size_t(a[0] + K_) * side() + std::size_t(a[1] + K_);
    }
    FreqPair freq_at(std::size_t idx) const {
        return {int(idx) / side() - K_, int(idx) % side() - K_};
    }

    cpx entry(const FreqPair& beta, const FreqPair& alpha) const {
        return T_(index(beta), index(alpha));
    }

    /// Eigenvalues sorted by decreasing modulus (cached after first use).
    const std::vector<cpx>& eigenvalues() const {
        if (!eig_) eig_ = eig_dense(T_, false).values;
        return *eig_;
    }

private:
    int K_;
    MatrixXc T_;
    WeightScheme scheme_;
    AssemblyInfo meta_;
    mutable std::optional<std::vector<cpx>> eig_;
};

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

/// tau sampled on the G x G grid; reusable across q values of a sweep.
struct TauGrid {
    int G = 0;
    std::vector<double> vals;
};

inline TauGrid make_tau_grid(const TrigPoly& tau, int G) {
    TauGrid tg;
    tg.G = G;
    tg.vals.assign(std::size_t(G) * G, 0.0);
    // Accumulate term by term through 1-D phase tables.
    std::vector<cpx> u1(G), u2(G);
    std::vector<cpx> acc(std::size_t(G) * G, cpx(0, 0));
    for (const auto& [a, c] : tau.terms()) {
        for (int j = 0; j < G; ++j) {
            const double p1 = kTwoPi * a[0] * j / double(G);
            u1[j] = cpx(std::cos(p1), std::sin(p1));
            const double p2 = kTwoPi * a[1] * j / double(G);
            u2[j] = cpx(std::cos(p2), std::sin(p2));
        }
        for (int j = 0; j < G; ++j) {
            const cpx row = c * u1[j];
            cpx* dst = acc.data() + std::size_t(j) * G;
            for (int k = 0; k < G; ++k) dst[k] += row * u2[k];
        }
    }
    for (std::size_t i = 0; i < tg.vals.size(); ++i) tg.vals[i] = acc[i].real();
    return tg;
}

namespace detail {

inline void check_weight_range(const WeightScheme& scheme, int K) {
    double lo = 0, hi = 0;
    for (int a1 = -K; a1 <= K; ++a1)
        for (int a2 = -K; a2 <= K; ++a2) {
            const double lw = scheme.log_weight({a1, a2});
            lo = std::min(lo, lw);
            hi = std::max(hi, lw);
        }
    if (hi - lo > 600.0)
        throw NumericalGateError("weight dynamic range exceeds double precision; reduce r or K");
}

inline int audit_width(int G) { return std::max(G / 16, 2); }

inline std::vector<double> box_weights(const WeightScheme& scheme, int K) {
    const int side = 2 * K + 1;
    std::vector<double> w(std::size_t(side) * side);
    for (int a1 = -K; a1 <= K; ++a1)
        for (int a2 = -K; a2 <= K; ++a2)
            w[std::size_t(a1 + K) * side + (a2 + K)] = scheme.weight({a1, a2});
    return w;
}

inline long long transpose_row_sum(const IMat2& M) {
    const IMat2 Mt = M.transpose();
    return std::max(std::llabs(Mt.a) + std::llabs(Mt.b), std::llabs(Mt.c) + std::llabs(Mt.d));
}

/// Linear-map assembly from an already-transformed twist symbol: every
/// column is the lattice shift T[beta, alpha] = (w_alpha/w_beta)
/// phihat(beta - M^T alpha). Shared by assemble() and the sweep assembler.
inline MatrixXc linear_matrix_from_symbol(const Fft2D& fft, const IMat2& M,
                                          const std::vector<double>& w, int K) {
    const IMat2 Mt = M.transpose();
    const int side = 2 * K + 1;
    const int dim = side * side;
    MatrixXc T(dim, dim);
    for (int a1 = -K; a1 <= K; ++a1)
        for (int a2 = -K; a2 <= K; ++a2) {
            const std::size_t col = std::size_t(a1 + K) * side + (a2 + K);
            const IVec2 img = Mt.apply({a1, a2});
            for (int b1 = -K; b1 <= K; ++b1)
                for (int b2 = -K; b2 <= K; ++b2) {
                    const std::size_t row = std::size_t(b1 + K) * side + (b2 + K);
                    T(row, col) =
                        (w[col] / w[row]) * fft.fourier({int(b1 - img[0]), int(b2 - img[1])});
                }
        }
    return T;
}

inline void require_window_fits(const IMat2& M, int K, int G) {
    const long long window = K * (1 + transpose_row_sum(M));
    if (window >= G / 2 - audit_width(G)) {
        std::ostringstream msg;
        msg << "grid " << G << " cannot host the frequency window |eta| <= " << window
            << "; increase G";
        throw NumericalGateError(msg.str());
    }
}

inline double audit_or_throw(const Fft2D& fft) {
    const double tail = fft.outer_band_max(audit_width(fft.G()));
    if (tail >= 1e-10) {
        std::ostringstream msg;
        msg << "aliasing tail " << tail << " above 1e-10 at G=" << fft.G()
            << "; increase the grid";
        throw NumericalGateError(msg.str());
    }
    return tail;
}

}  // namespace detail

/// Oversampling floor from the symbol's nominal degree content.
inline int minimum_grid(const AnosovMap& A, const TrigPoly& tau, int q, int K) {
    return 4 * (K + std::abs(q) * tau.degree() + A.perturbation_degree());
}

/// Bandwidth-aware grid suggestion (power of two). The Jacobi-Anger reach of
/// each twist mode scales like 2 pi |q| times the mode amplitude.
inline int suggest_grid(const AnosovMap& A, const TrigPoly& tau, int q, int K) {
    const long long rowsum = detail::transpose_row_sum(A.linear_part());
    double content = double(K) * double(1 + rowsum);
    std::vector<FreqPair> seen;
    for (const auto& [a, c] : tau.terms()) {
        if (a[0] == 0 && a[1] == 0) continue;  // constant shifts are pure phase
        // Canonical antipodal representative.
        const bool canonical = a[0] > 0 || (a[0] == 0 && a[1] > 0);
        const FreqPair rep = canonical ? a : FreqPair{-a[0], -a[1]};
        bool dup = false;
        for (const auto& s : seen) dup = dup || (s == rep);
        if (dup) continue;
        seen.push_back(rep);
        const double amp = std::abs(c) + std::abs(tau.coeff({-a[0], -a[1]}));
        const double z = kTwoPi * std::abs(q) * amp;
        const double reach = z + 12.0 * (1.0 + std::cbrt(z)) + 8.0;
        content += reach * linf_norm(a);
    }
    // Perturbation shears act inside e^{2 pi i alpha . A(x)}; their reach
    // scales with the box radius times the shear amplitude.
    for (const auto& s : A.shears()) {
        double amp = 0;
        for (const auto& [a, c] : s.profile.terms()) amp += std::abs(c);
        const double z = kTwoPi * 2.0 * K * 2.0 * amp;
        content += (z + 12.0 * (1.0 + std::cbrt(z)) + 8.0) * s.profile.degree();
    }
    int G = 64;
    while (G / 2 - detail::audit_width(G) < int(content) + 4 && G < (1 << 14)) G *= 2;
    return std::max(G, 1 << 8);
}

/// Builds the truncated operator. Throws NumericalGateError when the grid
/// fails the oversampling rule or the measured aliasing tail exceeds 1e-10.
inline TruncatedOperator assemble(const AnosovMap& A, const TrigPoly& tau, int q,
                                  const WeightScheme& scheme, int K, int G,
                                  const TauGrid* tau_cache = nullptr, unsigned threads = 1) {
    if (K < 1) throw ConfigError("assemble requires K >= 1");
    if (G < minimum_grid(A, tau, q, K)) {
        std::ostringstream msg;
        msg << "grid " << G << " below the oversampling rule; need G >= "
            << minimum_grid(A, tau, q, K);
        throw NumericalGateError(msg.str());
    }
    detail::check_weight_range(scheme, K);

    const int side = 2 * K + 1;
    const int dim = side * side;
    const std::vector<double> w = detail::box_weights(scheme, K);
    MatrixXc T(dim, dim);
    AssemblyInfo meta{K, G, q, scheme.r(), 0.0, A.is_linear()};

    if (A.is_linear()) {
        // One global FFT of the twist symbol; columns are lattice shifts.
        detail::require_window_fits(A.linear_part(), K, G);
        Fft2D fft(G);
        if (tau.empty() || q == 0) {
            std::fill(fft.grid().begin(), fft.grid().end(), cpx(1, 0));
        } else if (tau_cache != nullptr && tau_cache->G == G) {
            for (std::size_t i = 0; i < fft.grid().size(); ++i) {
                const double p = kTwoPi * q * tau_cache->vals[i];
                fft.grid()[i] = cpx(std::cos(p), std::sin(p));
            }
        } else {
            const TauGrid tg = make_tau_grid(tau, G);
            for (std::size_t i = 0; i < fft.grid().size(); ++i) {
                const double p = kTwoPi * q * tg.vals[i];
                fft.grid()[i] = cpx(std::cos(p), std::sin(p));
            }
        }
        fft.execute();
        meta.aliasing_tail = detail::audit_or_throw(fft);
        T = detail::linear_matrix_from_symbol(fft, A.linear_part(), w, K);
        return TruncatedOperator(K, std::move(T), scheme, meta);
    }

    // Generic path: per-column FFT of e^{2 pi i (q tau + alpha . A)}.
    std::vector<double> A1(std::size_t(G) * G), A2(std::size_t(G) * G);
    std::vector<double> tgrid(std::size_t(G) * G, 0.0);
    for (int j = 0; j < G; ++j) {
        for (int k = 0; k < G; ++k) {
            const Vec2 x{double(j) / G, double(k) / G};
            const Vec2 y = A.eval(x);
            A1[std::size_t(j) * G + k] = y[0];
            A2[std::size_t(j) * G + k] = y[1];
        }
    }
    if (!tau.empty() && q != 0) tgrid = make_tau_grid(tau, G).vals;

    std::vector<double> tails(dim, 0.0);
    const unsigned nthreads = std::max(1u, threads);
    // Columns are striped over workers; each worker owns one FFT buffer and
    // every column writes only its own slots, so results are thread-count
    // independent.
    parallel_for(nthreads, nthreads, [&](std::size_t t) {
        Fft2D fft(G);
        for (std::size_t col = t; col < std::size_t(dim); col += nthreads) {
            const int a1 = int(col) / side - K;
            const int a2 = int(col) % side - K;
            for (std::size_t i = 0; i < fft.grid().size(); ++i) {
                const double p = kTwoPi * (q * tgrid[i] + a1 * A1[i] + a2 * A2[i]);
                fft.grid()[i] = cpx(std::cos(p), std::sin(p));
            }
            fft.execute();
            tails[col] = fft.outer_band_max(detail::audit_width(G));
            for (int b1 = -K; b1 <= K; ++b1)
                for (int b2 = -K; b2 <= K; ++b2) {
                    const std::size_t row = std::size_t(b1 + K) * side + (b2 + K);
                    T(row, col) = (w[col] / w[row]) * fft.fourier({b1, b2});
                }
        }
    });

    meta.aliasing_tail = *std::max_element(tails.begin(), tails.end());
    if (meta.aliasing_tail >= 1e-10) {
        std::ostringstream msg;
        msg << "aliasing tail " << meta.aliasing_tail << " above 1e-10 at G=" << G
            << "; increase the grid";
        throw NumericalGateError(msg.str());
    }
    return TruncatedOperator(K, std::move(T), scheme, meta);
}

/// assemble() with the bandwidth-suggested grid, doubling on audit failure.
inline TruncatedOperator assemble_auto(const AnosovMap& A, const TrigPoly& tau, int q,
                                       const WeightScheme& scheme, int K,
                                       const TauGrid* tau_cache = nullptr, unsigned threads = 1) {
    int G = suggest_grid(A, tau, q, K);
    for (int attempt = 0;; ++attempt) {
        try {
            return assemble(A, tau, q, scheme, K, G,
                            (tau_cache && tau_cache->G == G) ? tau_cache : nullptr, threads);
        } catch (const NumericalGateError&) {
            if (attempt >= 2 || G >= (1 << 13)) throw;
            G *= 2;
        }
    }
}

/// Assembly engine for (sample, q) sweeps over a fixed linear map: keeps the
/// sampled tau on each grid size it needs and advances the twist symbol
/// e^{2 pi i q tau} multiplicatively between neighbouring q, so a whole
/// q-row costs one trig pass plus one FFT per frequency.
class SweepAssembler {
public:
    SweepAssembler(const AnosovMap& A, const WeightScheme& scheme, int K)
        : A_(A), scheme_(scheme), K_(K), weights_(detail::box_weights(scheme, K)) {
        if (!A.is_linear()) throw ConfigError("SweepAssembler requires a linear map");
        detail::check_weight_range(scheme, K);
    }

    void set_sample(const TrigPoly& tau) {
        tau_ = tau;
        classes_.clear();
    }

    TruncatedOperator assemble_q(int q) {
        int G = suggest_grid(A_, tau_, q, K_);
        for (int attempt = 0;; ++attempt) {
            try {
                return assemble_at(q, G);
            } catch (const NumericalGateError&) {
                if (attempt >= 2 || G >= (1 << 13)) throw;
                G *= 2;
            }
        }
    }

private:
    struct ClassState {
        TauGrid tau;
        std::vector<cpx> unit;  // e^{2 pi i tau}
        std::vector<cpx> phi;   // e^{2 pi i q_at tau}
        int q_at = 0;
        bool phi_valid = false;
    };

    TruncatedOperator assemble_at(int q, int G) {
        detail::require_window_fits(A_.linear_part(), K_, G);
        ClassState& st = classes_[G];
        if (st.tau.G != G) {
            st.tau = make_tau_grid(tau_, G);
            st.unit.resize(st.tau.vals.size());
            for (std::size_t i = 0; i < st.unit.size(); ++i) {
                const double p = kTwoPi * st.tau.vals[i];
                st.unit[i] = cpx(std::cos(p), std::sin(p));
            }
            st.phi_valid = false;
        }
        const int delta = q - st.q_at;
        if (!st.phi_valid || std::abs(delta) > 3) {
            st.phi.resize(st.tau.vals.size());
            for (std::size_t i = 0; i < st.phi.size(); ++i) {
                const double p = kTwoPi * q * st.tau.vals[i];
                st.phi[i] = cpx(std::cos(p), std::sin(p));
            }
        } else {
            for (int step = 0; step < std::abs(delta); ++step) {
                if (delta > 0)
                    for (std::size_t i = 0; i < st.phi.size(); ++i) st.phi[i] *= st.unit[i];
                else
                    for (std::size_t i = 0; i < st.phi.size(); ++i)
                        st.phi[i] *= std::conj(st.unit[i]);
            }
        }
        st.q_at = q;
        st.phi_valid = true;

        Fft2D fft(G);
        std::copy(st.phi.begin(), st.phi.end(), fft.grid().begin());
        fft.execute();
        AssemblyInfo meta{K_, G, q, scheme_.r(), detail::audit_or_throw(fft), true};
        MatrixXc T = detail::linear_matrix_from_symbol(fft, A_.linear_part(), weights_, K_);
        return TruncatedOperator(K_, std::move(T), scheme_, meta);
    }

    AnosovMap A_;
    WeightScheme scheme_;
    int K_;
    std::vector<double> weights_;
    TrigPoly tau_;
    std::map<int, ClassState> classes_;
};

// ---------------------------------------------------------------------------
// Spectral data
// ---------------------------------------------------------------------------

struct SpectralReport {
    std::vector<cpx> eigenvalues;         // modulus-sorted
    std::vector<double> singular_values;  // decreasing
    double spectral_radius = 0;
    double trace_gap = 0;       // |sum of eigenvalues - tr T|
    int resolved_count = 0;     // eigenvalues above 1e-12 * |lambda_1|
    std::vector<cpx> traces;    // Tr T^n for n = 1..n_max
    std::vector<cpx> fredholm;  // det(I - z T) coefficients c_0..c_D
};

/// Full eigendecomposition data. For q = 0 the constant direction is an exact
/// eigenvector, so the unit eigenvalue must be present within 1e-10.
inline SpectralReport spectrum(const TruncatedOperator& T) {
    SpectralReport rep;
    rep.eigenvalues = T.eigenvalues();
    rep.spectral_radius = rep.eigenvalues.empty() ? 0.0 : std::abs(rep.eigenvalues.front());
    cpx esum(0, 0);
    for (const cpx& l : rep.eigenvalues) esum += l;
    rep.trace_gap = std::abs(esum - T.matrix().trace());
    if (rep.trace_gap > 1e-8 * std::max(1.0, std::abs(esum)))
        throw NumericalGateError("eigenvalue sum disagrees with the matrix trace");
    const double floor = 1e-12 * std::max(rep.spectral_radius, 1e-300);
    for (const cpx& l : rep.eigenvalues)
        if (std::abs(l) > floor) ++rep.resolved_count;
    if (T.meta().q == 0) {
        double best = 1e300;
        for (const cpx& l : rep.eigenvalues) best = std::min(best, std::abs(l - cpx(1, 0)));
        if (best > 1e-10)
            throw NumericalGateError("q=0 operator lost the unit eigenvalue (gap " +
                                     std::to_string(best) + ")");
    }
    return rep;
}

inline std::vector<double> singular_values(const TruncatedOperator& T) {
    return singular_values_dense(T.matrix());
}

/// Tr T^n via eigenvalue power sums, spot-checked against the direct
/// sum_{ij} T_ij T_ji at n = 2.
inline cpx matrix_trace(const TruncatedOperator& T, int n) {
    if (n < 1) throw ConfigError("matrix_trace requires n >= 1");
    const auto& eig = T.eigenvalues();
    cpx s(0, 0);
    for (const cpx& l : eig) s += std::pow(l, n);
    if (n == 2) {
        cpx direct(0, 0);
        const MatrixXc& M = T.matrix();
        for (int i = 0; i < M.rows(); ++i)
            for (int j = 0; j < M.cols(); ++j) direct += M(i, j) * M(j, i);
        if (std::abs(direct - s) > 1e-8 * std::max(1.0, std::abs(s)))
            throw NumericalGateError("matrix_trace: power-sum and matrix-power routes disagree");
    }
    return s;
}

/// det(I - z T) coefficients c_0..c_D from traces t_1..t_D by the Newton
/// identity m c_m = -sum_{k=1}^m t_k c_{m-k}.
inline std::vector<cpx> fredholm(const std::vector<cpx>& traces, int degree) {
    if (int(traces.size()) < degree)
        throw ConfigError("fredholm needs traces up to the requested degree");
    std::vector<cpx> c(degree + 1, cpx(0, 0));
    c[0] = cpx(1, 0);
    for (int m = 1; m <= degree; ++m) {
        cpx acc(0, 0);
        for (int k = 1; k <= m; ++k) acc += traces[k - 1] * c[m - k];
        c[m] = -acc / double(m);
    }
    return c;
}

/// Roots of sum c_m z^m via the companion matrix (test oracle for the
/// eigenvalue <-> Fredholm-zero correspondence).
inline std::vector<cpx> polynomial_roots(std::vector<cpx> c) {
    while (!c.empty() && std::abs(c.back()) < 1e-14) c.pop_back();
    const int d = int(c.size()) - 1;
    if (d < 1) return {};
    MatrixXc comp = MatrixXc::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        comp(i, d - 1) = -c[i] / c[d];
        if (i + 1 < d) comp(i + 1, i) = cpx(1, 0);
    }
    return eig_dense(comp, false).values;
}

struct TraceGrowthReport {
    std::vector<double> root_moduli;  // |Tr T^n|^{1/n} for n = 1..n_max
    double spectral_radius = 0;
    double max_excess = 0;  // max over the upper half of |Tr|^{1/n} - rho
    bool pass = false;
};

/// Checks |Tr(T^n)|^{1/n} <= rho + 0.02 over the upper half of 1..n_max --
/// the finite-truncation shadow of the a-priori trace bound.
inline TraceGrowthReport trace_growth_check(const TruncatedOperator& T, int n_max) {
    TraceGrowthReport rep;
    const SpectralReport sp = spectrum(T);
    rep.spectral_radius = sp.spectral_radius;
    for (int n = 1; n <= n_max; ++n)
        rep.root_moduli.push_back(std::pow(std::abs(matrix_trace(T, n)), 1.0 / n));
    rep.max_excess = -1e300;
    for (int n = (n_max + 1) / 2; n <= n_max; ++n)
        rep.max_excess = std::max(rep.max_excess, rep.root_moduli[n - 1] - rep.spectral_radius);
    rep.pass = rep.max_excess <= 0.02;
    return rep;
}

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    int points = 0;
};

inline LineFit least_squares_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    LineFit f;
    f.points = int(xs.size());
    if (xs.size() < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double n = double(xs.size());
    const double denom = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fit = f.slope * xs[i] + f.intercept;
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

/// Least-squares fit of log mu_n against sqrt(n) over the resolved range
/// (n from 10 to the 1e-12 * mu_1 cutoff). Negative slope is the expected
/// e^{-beta sqrt(n)} singular-value decay shape.
inline LineFit fit_sqrt_decay(const std::vector<double>& values, int first = 10) {
    std::vector<double> xs, ys;
    if (values.empty()) return {};
    const double floor = 1e-12 * values.front();
    for (std::size_t i = std::size_t(first) - 1; i < values.size(); ++i) {
        if (values[i] <= std::max(floor, 1e-300)) break;
        xs.push_back(std::sqrt(double(i + 1)));
        ys.push_back(std::log(values[i]));
    }
    return least_squares_line(xs, ys);
}

/// Fitted exponential entry-decay rate: log|T[beta,alpha]| against
/// |alpha|_1 + |beta|_1. A positive rate reproduces the expected
/// off-lattice decay of the assembled matrix.
inline double entry_decay_rate(const TruncatedOperator& T) {
    std::vector<double> xs, ys;
    const int dim = T.dim();
    for (int col = 0; col < dim; ++col) {
        const FreqPair a = T.freq_at(col);
        for (int row = 0; row < dim; ++row) {
            const double v = std::abs(T.matrix()(row, col));
            if (v < 1e-14) continue;
            const FreqPair b = T.freq_at(row);
            xs.push_back(double(l1_norm(a) + l1_norm(b)));
            ys.push_back(std::log(v));
        }
    }
    return -least_squares_line(xs, ys).slope;
}

/// Max change of the leading eigenvalue moduli between two truncations.
inline double top_moduli_gap(const TruncatedOperator& A, const TruncatedOperator& B, int top = 5) {
    const auto& ea = A.eigenvalues();
    const auto& eb = B.eigenvalues();
    double gap = 0;
    for (int i = 0; i < top; ++i) {
        const double ma = i < int(ea.size()) ? std::abs(ea[i]) : 0.0;
        const double mb = i < int(eb.size()) ? std::abs(eb[i]) : 0.0;
        gap = std::max(gap, std::abs(ma - mb));
    }
    return gap;
}

/// Spectral report with traces and Fredholm coefficients attached.
inline SpectralReport build_spectral_report(const TruncatedOperator& T, int n_max,
                                            int fredholm_degree) {
    SpectralReport rep = spectrum(T);
    rep.singular_values = singular_values(T);
    for (int n = 1; n <= std::max(n_max, fredholm_degree); ++n)
        rep.traces.push_back(matrix_trace(T, n));
    rep.fredholm = fredholm(rep.traces, fredholm_degree);
    if (int(rep.traces.size()) > n_max) rep.traces.resize(n_max);
    return rep;
}

}  // namespace skewlab
