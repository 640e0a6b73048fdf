#pragma once

// Finite complex Fourier series on the 2-torus. This is the universal
// observable / roof-function representation used across the library.

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "skewlab/common.hpp"

namespace skewlab {

using FreqPair = std::array<int, 2>;

inline int l1_norm(const FreqPair& a) { return std::abs(a[0]) + std::abs(a[1]); }
inline int linf_norm(const FreqPair& a) { return std::max(std::abs(a[0]), std::abs(a[1])); }

class TrigPoly {
public:
    TrigPoly() = default;

    static TrigPoly zero() { return {}; }

    static TrigPoly constant(cpx c) {
        TrigPoly p;
        p.set({0, 0}, c);
        return p;
    }

    /// Single Fourier mode c * e^{2 pi i a.x}.
    static TrigPoly mode(FreqPair a, cpx c) {
        TrigPoly p;
        p.set(a, c);
        return p;
    }

    /// amp * cos(2 pi a.x) = amp/2 (e_a + e_{-a}).
    static TrigPoly cosine(FreqPair a, double amp = 1.0) {
        TrigPoly p;
        p.add(a, cpx(amp / 2, 0));
        p.add({-a[0], -a[1]}, cpx(amp / 2, 0));
        return p;
    }

    /// amp * sin(2 pi a.x) = amp/(2i) (e_a - e_{-a}).
    static TrigPoly sine(FreqPair a, double amp = 1.0) {
        TrigPoly p;
        p.add(a, cpx(0, -amp / 2));
        p.add({-a[0], -a[1]}, cpx(0, amp / 2));
        return p;
    }

    void set(FreqPair a, cpx c) {
        if (c == cpx(0, 0))
            terms_.erase(a);
        else
            terms_[a] = c;
    }

    void add(FreqPair a, cpx c) {
        auto it = terms_.find(a);
        if (it == terms_.end()) {
            if (c != cpx(0, 0)) terms_[a] = c;
        } else {
            it->second += c;
            if (std::abs(it->second) == 0.0) terms_.erase(it);
        }
    }

    cpx coeff(FreqPair a) const {
        auto it = terms_.find(a);
        return it == terms_.end() ? cpx(0, 0) : it->second;
    }

    const std::map<FreqPair, cpx>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    /// Max |a|_1 over nonzero coefficients (0 for the zero polynomial).
    int degree() const {
        int d = 0;
        for (const auto& [a, c] : terms_) d = std::max(d, l1_norm(a));
        return d;
    }

    cpx eval(const Vec2& x) const {
        cpx s(0, 0);
        for (const auto& [a, c] : terms_) {
            const double phase = kTwoPi * (a[0] * x[0] + a[1] * x[1]);
            s += c * cpx(std::cos(phase), std::sin(phase));
        }
        return s;
    }

    double eval_real(const Vec2& x) const { return eval(x).real(); }

    /// a_{-alpha} == conj(a_alpha) within tol for every term.
    bool is_real_valued(double tol = 1e-12) const {
        for (const auto& [a, c] : terms_) {
            const cpx other = coeff({-a[0], -a[1]});
            if (std::abs(other - std::conj(c)) > tol) return false;
        }
        return true;
    }

    /// Coefficient majorant sum_a |a_alpha| e^{2 pi r |alpha|_1}. Upper bound
    /// for the sup of |f| over the complex strip T^2 + i[-r, r]^2.
    double sup_norm_upper(double r) const {
        double s = 0;
        for (const auto& [a, c] : terms_) s += std::abs(c) * std::exp(kTwoPi * r * l1_norm(a));
        return s;
    }

    /// sqrt(sum_a |a_alpha|^2 e^{4 pi r |alpha|_1}) -- the Hardy norm in its
    /// Plancherel form.
    double hardy_norm(double r) const {
        double s = 0;
        for (const auto& [a, c] : terms_) s += std::norm(c) * std::exp(2.0 * kTwoPi * r * l1_norm(a));
        return std::sqrt(s);
    }

    TrigPoly& operator+=(const TrigPoly& o) {
        for (const auto& [a, c] : o.terms_) add(a, c);
        return *this;
    }

    TrigPoly operator+(const TrigPoly& o) const {
        TrigPoly p = *this;
        p += o;
        return p;
    }

    TrigPoly operator*(cpx s) const {
        TrigPoly p;
        if (s == cpx(0, 0)) return p;
        for (const auto& [a, c] : terms_) p.terms_[a] = c * s;
        return p;
    }

    /// Pointwise product (coefficient convolution).
    TrigPoly operator*(const TrigPoly& o) const {
        TrigPoly p;
        for (const auto& [a, ca] : terms_)
            for (const auto& [b, cb] : o.terms_) p.add({a[0] + b[0], a[1] + b[1]}, ca * cb);
        return p;
    }

    TrigPoly conjugate() const {
        TrigPoly p;
        for (const auto& [a, c] : terms_) p.terms_[{-a[0], -a[1]}] = std::conj(c);
        return p;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [a, c] : terms_) {
            arr.push_back({{"a1", a[0]}, {"a2", a[1]}, {"re", c.real()}, {"im", c.imag()}});
        }
        return nlohmann::json{{"terms", arr}};
    }

    static TrigPoly from_json(const nlohmann::json& j) {
        if (!j.contains("terms") || !j["terms"].is_array())
            throw ConfigError("TrigPoly JSON must contain a \"terms\" array");
        TrigPoly p;
        for (const auto& t : j["terms"]) {
            for (const char* key : {"a1", "a2", "re", "im"})
                if (!t.contains(key)) throw ConfigError(std::string("TrigPoly term missing key \"") + key + "\"");
            p.add({t["a1"].get<int>(), t["a2"].get<int>()},
                  cpx(t["re"].get<double>(), t["im"].get<double>()));
        }
        return p;
    }

private:
    std::map<FreqPair, cpx> terms_;
};

inline TrigPoly operator*(cpx s, const TrigPoly& p) { return p * s; }

}  // namespace skewlab
