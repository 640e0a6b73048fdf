#pragma once

// Thin RAII wrapper around FFTW's 2-D complex transform. Plan creation is
// serialized (FFTW requirement); execution on distinct buffers is not.

#include <fftw3.h>

#include <mutex>

#include "skewlab/common.hpp"

namespace skewlab {

inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

class Fft2D {
public:
    explicit Fft2D(int G) : G_(G), data_(std::size_t(G) * G) {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        plan_ = fftw_plan_dft_2d(G, G, reinterpret_cast<fftw_complex*>(data_.data()),
                                 reinterpret_cast<fftw_complex*>(data_.data()), FFTW_FORWARD,
                                 FFTW_ESTIMATE);
    }

    ~Fft2D() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(plan_);
    }

    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    int G() const { return G_; }
    std::vector<cpx>& grid() { return data_; }
    const std::vector<cpx>& grid() const { return data_; }

    cpx& at(int j, int k) { return data_[std::size_t(j) * G_ + k]; }

    /// In-place forward transform; afterwards fourier(beta) reads
    /// coefficients with 1/G^2 normalization.
    void execute() { fftw_execute(plan_); }

    /// hat f(beta) = (1/G^2) sum_x f(x) e^{-2 pi i beta.x} for |beta_i| < G/2.
    cpx fourier(const FreqPair& beta) const {
        const int j = ((beta[0] % G_) + G_) % G_;
        const int k = ((beta[1] % G_) + G_) % G_;
        return data_[std::size_t(j) * G_ + k] / double(std::size_t(G_) * G_);
    }

    /// Max coefficient modulus on the outer frequency band
    /// ||beta||_inf in (G/2 - width, G/2]: the aliasing-tail proxy.
    double outer_band_max(int width) const {
        const double scale = 1.0 / double(std::size_t(G_) * G_);
        const int half = G_ / 2;
        double worst = 0;
        for (int b1 = -half; b1 < G_ - half; ++b1) {
            for (int b2 = -half; b2 < G_ - half; ++b2) {
                const int m = std::max(std::abs(b1), std::abs(b2));
                if (m <= half - width) continue;
                const int j = ((b1 % G_) + G_) % G_;
                const int k = ((b2 % G_) + G_) % G_;
                worst = std::max(worst, std::abs(data_[std::size_t(j) * G_ + k]) * scale);
            }
        }
        return worst;
    }

private:
    int G_;
    std::vector<cpx> data_;
    fftw_plan plan_;
};

}  // namespace skewlab
