#pragma once

// The Gaussian ensemble of random trigonometric polynomials built on the
// real Laplace eigenbasis of T^2: sampling, Birkhoff variance forms, the
// closed-form expectation of |Tr L_q^n|^2, Monte Carlo cross-checks, and the
// diophantine diagnostics behind the almost-sure rapid-mixing statement.

#include <limits>

#include "skewlab/periodic_orbits.hpp"

namespace skewlab {

struct BasisMode {
    TrigPoly poly;
    double eigenvalue = 0;  // 4 pi^2 ||alpha||^2
};

/// Real orthonormal eigenfunctions of the flat Laplacian with eigenvalue at
/// most N: the constant plus sqrt(2) cos / sqrt(2) sin for one lexicographic
/// representative of each antipodal frequency pair.
class LaplaceEigenbasis {
public:
    explicit LaplaceEigenbasis(double N) : cutoff_(N) {
        if (N < 0) throw ConfigError("eigenbasis cutoff must be nonnegative");
        modes_.push_back({TrigPoly::constant(1.0), 0.0});
        const double rho2 = N / (kTwoPi * kTwoPi);  // ||alpha||^2 <= N / (4 pi^2)
        const int R = int(std::floor(std::sqrt(std::max(0.0, rho2)))) + 1;
        std::vector<FreqPair> reps;
        for (int a1 = -R; a1 <= R; ++a1)
            for (int a2 = -R; a2 <= R; ++a2) {
                if (a1 == 0 && a2 == 0) continue;
                if (!(a1 > 0 || (a1 == 0 && a2 > 0))) continue;  // antipodal representative
                const double nrm2 = double(a1) * a1 + double(a2) * a2;
                if (kTwoPi * kTwoPi * nrm2 <= N + 1e-12) reps.push_back({a1, a2});
            }
        std::sort(reps.begin(), reps.end(), [](const FreqPair& a, const FreqPair& b) {
            const long na = (long)a[0] * a[0] + (long)a[1] * a[1];
            const long nb = (long)b[0] * b[0] + (long)b[1] * b[1];
            if (na != nb) return na < nb;
            return a < b;
        });
        const double s2 = std::sqrt(2.0);
        for (const FreqPair& a : reps) {
            const double ev = kTwoPi * kTwoPi * (double(a[0]) * a[0] + double(a[1]) * a[1]);
            modes_.push_back({TrigPoly::cosine(a, s2), ev});
            modes_.push_back({TrigPoly::sine(a, s2), ev});
        }
        verify_gram();
    }

    double cutoff() const { return cutoff_; }
    int dim() const { return int(modes_.size()); }
    const std::vector<BasisMode>& modes() const { return modes_; }

    /// Values of every basis function at x.
    std::vector<double> values_at(const Vec2& x) const {
        std::vector<double> v(modes_.size());
        for (std::size_t j = 0; j < modes_.size(); ++j) v[j] = modes_[j].poly.eval_real(x);
        return v;
    }

private:
    // L^2 Gram identity on a quadrature grid; the basis is orthonormal by
    // construction, this guards the term bookkeeping.
    void verify_gram() const {
        int deg = 0;
        for (const auto& m : modes_) deg = std::max(deg, m.poly.degree());
        const int G = std::max(16, 4 * deg + 4);
        std::vector<std::vector<double>> vals(modes_.size());
        for (std::size_t j = 0; j < modes_.size(); ++j) {
            vals[j].resize(std::size_t(G) * G);
            for (int u = 0; u < G; ++u)
                for (int v = 0; v < G; ++v)
                    vals[j][std::size_t(u) * G + v] =
                        modes_[j].poly.eval_real({double(u) / G, double(v) / G});
        }
        for (std::size_t i = 0; i < modes_.size(); ++i)
            for (std::size_t j = i; j < modes_.size(); ++j) {
                double s = 0;
                for (std::size_t k = 0; k < vals[i].size(); ++k) s += vals[i][k] * vals[j][k];
                s /= double(std::size_t(G) * G);
                const double want = (i == j) ? 1.0 : 0.0;
                if (std::abs(s - want) > 1e-10)
                    throw NumericalGateError("eigenbasis Gram matrix deviates from identity");
            }
    }

    double cutoff_;
    std::vector<BasisMode> modes_;
};

inline LaplaceEigenbasis build_eigenbasis(double N) { return LaplaceEigenbasis(N); }

struct EnsembleConfig {
    double N = 4 * 9.869604401089358;  // basis cutoff (default 4 pi^2)
    int samples = 1;
    std::uint64_t seed = 0;
    int q = 0;
    int n = 1;
};

/// Gaussian coefficients of sample `index` under the seeded stream.
inline std::vector<double> sample_coefficients(const LaplaceEigenbasis& basis, std::uint64_t seed,
                                               std::uint64_t index) {
    GaussianStream g(seed, index);
    std::vector<double> X(basis.dim());
    for (double& x : X) x = g.next();
    return X;
}

/// P = sum_j X_j phi_j as a trig polynomial.
inline TrigPoly sample(const LaplaceEigenbasis& basis, const std::vector<double>& coeffs) {
    if (int(coeffs.size()) != basis.dim())
        throw ConfigError("sample: coefficient count does not match basis dimension");
    TrigPoly P;
    for (int j = 0; j < basis.dim(); ++j) P += basis.modes()[j].poly * cpx(coeffs[j], 0);
    return P;
}

inline TrigPoly sample(const LaplaceEigenbasis& basis, std::uint64_t seed, std::uint64_t index) {
    return sample(basis, sample_coefficients(basis, seed, index));
}

/// Birkhoff sums of every basis mode at x: (phi_j^{(n)}(x))_j.
inline std::vector<double> basis_birkhoff(const LaplaceEigenbasis& basis, const AnosovMap& A,
                                          const Vec2& x, int n) {
    std::vector<double> s(basis.dim(), 0.0);
    Vec2 y = x;
    for (int k = 0; k < n; ++k) {
        const std::vector<double> v = basis.values_at(y);
        for (int j = 0; j < basis.dim(); ++j) s[j] += v[j];
        y = A.eval(y);
    }
    return s;
}

/// sigma^2_n(x, y) = sum_j (phi_j^{(n)}(x) - phi_j^{(n)}(y))^2.
inline double sigma2_pair(const LaplaceEigenbasis& basis, const AnosovMap& A, const Vec2& x,
                          const Vec2& y, int n) {
    const std::vector<double> bx = basis_birkhoff(basis, A, x, n);
    const std::vector<double> by = basis_birkhoff(basis, A, y, n);
    double s = 0;
    for (int j = 0; j < basis.dim(); ++j) s += (bx[j] - by[j]) * (bx[j] - by[j]);
    return s;
}

/// E |Tr L_{q,P}^n|^2 in closed form: the Gaussian characteristic function
/// turns each ordered pair of period-n points into
/// exp(-2 pi^2 q^2 sigma^2_n(x, x')) / (w_x w_x').
inline double expected_trace_sq(const LaplaceEigenbasis& basis, const AnosovMap& A, int q, int n) {
    PeriodicOrbitSet set = periodic_points(A, n);
    std::vector<std::vector<double>> birk(set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        birk[i] = basis_birkhoff(basis, A, set.points[i], n);
    double total = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t j = 0; j < set.size(); ++j) {
            double s2 = 0;
            for (int m = 0; m < basis.dim(); ++m) {
                const double d = birk[i][m] - birk[j][m];
                s2 += d * d;
            }
            const double pi = kTwoPi / 2.0;
            total += std::exp(-2.0 * pi * pi * q * q * s2) / (set.weights[i] * set.weights[j]);
        }
    }
    return total;
}

/// Diagonal part sum_x 1/w_x^2: the q -> infinity limit of the expectation.
inline double diagonal_weight_sum(const AnosovMap& A, int n) {
    PeriodicOrbitSet set = periodic_points(A, n);
    double s = 0;
    for (const double w : set.weights) s += 1.0 / (w * w);
    return s;
}

struct MonteCarloResult {
    double mean = 0;
    double std_error = 0;
    int samples = 0;
};

/// Empirical mean of |orbit trace sum|^2 over ensemble samples.
inline MonteCarloResult monte_carlo_trace_sq(const EnsembleConfig& cfg, const AnosovMap& A,
                                             unsigned threads = 1) {
    if (cfg.samples < 1) throw ConfigError("monte_carlo_trace_sq requires samples >= 1");
    const LaplaceEigenbasis basis(cfg.N);
    PeriodicOrbitSet set = periodic_points(A, cfg.n);
    if (cfg.q == 0) {
        // Phases are identically one: the statistic is deterministic.
        const cpx tr = orbit_trace_sum(A, TrigPoly::zero(), 0, set);
        return {std::norm(tr), 0.0, cfg.samples};
    }
    std::vector<std::vector<double>> birk(set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        birk[i] = basis_birkhoff(basis, A, set.points[i], cfg.n);

    std::vector<double> vals(cfg.samples);
    parallel_for(cfg.samples, threads, [&](std::size_t s) {
        const std::vector<double> X = sample_coefficients(basis, cfg.seed, s);
        cpx tr(0, 0);
        for (std::size_t i = 0; i < set.size(); ++i) {
            double tau_n = 0;
            for (int j = 0; j < basis.dim(); ++j) tau_n += X[j] * birk[i][j];
            const double phase = kTwoPi * cfg.q * tau_n;
            tr += cpx(std::cos(phase), std::sin(phase)) / set.weights[i];
        }
        vals[s] = std::norm(tr);
    });

    MonteCarloResult res;
    res.samples = cfg.samples;
    double sum = 0;
    for (const double v : vals) sum += v;
    res.mean = sum / cfg.samples;
    double var = 0;
    for (const double v : vals) var += (v - res.mean) * (v - res.mean);
    var /= std::max(1, cfg.samples - 1);
    res.std_error = std::sqrt(var / cfg.samples);
    return res;
}

struct MomentReport {
    std::vector<int> orders;          // even p up to p_max (p = 0 included)
    std::vector<double> moments;      // E ||P||_{r,inf}^p estimates
    std::vector<double> last_quartile_drift;  // |mean_full - mean_3/4| / mean
    bool stable = false;              // all drifts below 10%
};

/// Empirical even moments of the complexified sup-norm majorant, with a
/// running-mean stability diagnostic over the last quartile of the stream.
inline MomentReport moment_check(const LaplaceEigenbasis& basis, double r, int p_max, int samples,
                                 std::uint64_t seed) {
    if (samples < 8) throw ConfigError("moment_check requires at least 8 samples");
    MomentReport rep;
    for (int p = 0; p <= p_max; p += 2) rep.orders.push_back(p);
    std::vector<double> norms(samples);
    for (int s = 0; s < samples; ++s)
        norms[s] = sample(basis, seed, s).sup_norm_upper(r);
    rep.stable = true;
    for (const int p : rep.orders) {
        double full = 0, partial = 0;
        const int cut = (3 * samples) / 4;
        for (int s = 0; s < samples; ++s) {
            const double v = std::pow(norms[s], p);
            full += v;
            if (s < cut) partial += v;
        }
        full /= samples;
        partial /= cut;
        rep.moments.push_back(full);
        const double drift = full > 0 ? std::abs(full - partial) / full : 0.0;
        rep.last_quartile_drift.push_back(drift);
        if (drift > 0.10) rep.stable = false;
    }
    return rep;
}

struct DiophantineScore {
    double score = 0;   // min over 2 <= |alpha|_1 <= alpha_max of |alpha . v| |alpha|_1^m0
    bool pass = false;  // score >= 1
    FreqPair argmin{};
};

/// Finite scan of the diophantine condition |alpha1 v1 + alpha2 v2| >=
/// |alpha|_1^{-m0}. A falsifier, not a verifier: failures are conclusive,
/// passes are only up to alpha_max.
inline DiophantineScore diophantine_check(const Vec2& v, double m0, int alpha_max) {
    if (alpha_max < 2) throw ConfigError("diophantine_check requires alpha_max >= 2");
    DiophantineScore res;
    res.score = std::numeric_limits<double>::infinity();
    for (int a1 = -alpha_max; a1 <= alpha_max; ++a1) {
        for (int a2 = -alpha_max; a2 <= alpha_max; ++a2) {
            const int l1 = std::abs(a1) + std::abs(a2);
            if (l1 < 2 || l1 > alpha_max) continue;
            const double s = std::abs(a1 * v[0] + a2 * v[1]) * std::pow(double(l1), m0);
            if (s < res.score) {
                res.score = s;
                res.argmin = {a1, a2};
            }
        }
    }
    res.pass = res.score >= 1.0;
    return res;
}

struct VarianceBound {
    double min_ratio = 0;  // min sigma^2(alpha) / |alpha|_1^2
    FreqPair argmin{};
};

/// Scans sigma^2(alpha) = || alpha1 u + alpha2 v ||^2 over 2 <= |alpha|_1 <=
/// alpha_max, where u, v are the Birkhoff vectors of two periodic points;
/// the minimum of sigma^2 / |alpha|_1^2 must be positive.
inline VarianceBound variance_bound_check(const LaplaceEigenbasis& basis, const AnosovMap& A,
                                          const Vec2& x, const Vec2& y, int n, int alpha_max) {
    const std::vector<double> u = basis_birkhoff(basis, A, x, n);
    const std::vector<double> v = basis_birkhoff(basis, A, y, n);
    double nu = 0, nv = 0;
    for (int j = 0; j < basis.dim(); ++j) {
        nu += u[j] * u[j];
        nv += v[j] * v[j];
    }
    if (nu < 1e-14 && nv < 1e-14)
        throw NumericalGateError("variance_bound_check: both Birkhoff vectors vanish");
    VarianceBound res;
    res.min_ratio = std::numeric_limits<double>::infinity();
    for (int a1 = -alpha_max; a1 <= alpha_max; ++a1) {
        for (int a2 = -alpha_max; a2 <= alpha_max; ++a2) {
            const int l1 = std::abs(a1) + std::abs(a2);
            if (l1 < 2 || l1 > alpha_max) continue;
            double s2 = 0;
            for (int j = 0; j < basis.dim(); ++j) {
                const double t = a1 * u[j] + a2 * v[j];
                s2 += t * t;
            }
            const double ratio = s2 / (double(l1) * l1);
            if (ratio < res.min_ratio) {
                res.min_ratio = ratio;
                res.argmin = {a1, a2};
            }
        }
    }
    if (!(res.min_ratio > 0))
        throw NumericalGateError("variance_bound_check: vanishing variance ratio");
    return res;
}

struct NondiophantineRow {
    double m0 = 0;
    double fail_probability = 0;
    double reference = 0;  // 2^{-m0}
};

/// Monte Carlo estimate of P[(tau^{(n)}(x), tau^{(n)}(y)) fails the
/// diophantine scan at exponent m0], reported with the 2^{-m0} curve.
inline std::vector<NondiophantineRow> nondiophantine_rate(const LaplaceEigenbasis& basis,
                                                          const AnosovMap& A, const Vec2& x,
                                                          const Vec2& y, int n,
                                                          const std::vector<double>& m0_range,
                                                          int samples, std::uint64_t seed,
                                                          int alpha_max = 200) {
    const std::vector<double> u = basis_birkhoff(basis, A, x, n);
    const std::vector<double> v = basis_birkhoff(basis, A, y, n);
    std::vector<NondiophantineRow> rows;
    std::vector<Vec2> vecs(samples);
    for (int s = 0; s < samples; ++s) {
        const std::vector<double> X = sample_coefficients(basis, seed, s);
        double tx = 0, ty = 0;
        for (int j = 0; j < basis.dim(); ++j) {
            tx += X[j] * u[j];
            ty += X[j] * v[j];
        }
        vecs[s] = {tx, ty};
    }
    for (const double m0 : m0_range) {
        int fails = 0;
        for (const Vec2& w : vecs)
            if (!diophantine_check(w, m0, alpha_max).pass) ++fails;
        rows.push_back({m0, double(fails) / samples, std::pow(2.0, -m0)});
    }
    return rows;
}

}  // namespace skewlab
