#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "sfk/error.hpp"
#include "sfk/image.hpp"

namespace sfk {

using Complex = std::complex<double>;

/// Precomputed 1D transform of a fixed length. Power-of-two lengths use an
/// iterative radix-2 kernel; every other length goes through Bluestein's
/// chirp-z algorithm on a zero-padded power-of-two convolution, so no
/// padding of the input signal is ever visible to the caller.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        if (n == 0) throw DimensionError("FFT length must be positive");
        if (std::has_single_bit(n)) {
            init_radix2(n, twiddles_, bitrev_);
        } else {
            init_bluestein();
        }
    }

    std::size_t size() const { return n_; }

    /// Unnormalized forward transform: X_k = sum_j x_j exp(-2 pi i jk / n).
    void forward(std::span<Complex> data) const { transform(data, false); }

    /// Inverse transform including the 1/n factor.
    void inverse(std::span<Complex> data) const {
        transform(data, true);
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& v : data) v *= scale;
    }

private:
    std::size_t n_;
    std::vector<Complex> twiddles_;
    std::vector<std::size_t> bitrev_;

    // Bluestein state
    std::size_t conv_len_ = 0;
    std::vector<Complex> chirp_;       // exp(-i pi k^2 / n)
    std::vector<Complex> chirp_fft_;   // FFT of the conjugate chirp filter
    std::vector<Complex> conv_twiddles_;
    std::vector<std::size_t> conv_bitrev_;

    static void init_radix2(std::size_t n, std::vector<Complex>& tw, std::vector<std::size_t>& rev) {
        tw.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            tw[k] = {std::cos(angle), std::sin(angle)};
        }
        rev.resize(n);
        const int bits = std::countr_zero(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (int b = 0; b < bits; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
            rev[i] = r;
        }
    }

    // In-place radix-2; `inverse` conjugates the twiddles.
    static void radix2(std::span<Complex> a, const std::vector<Complex>& tw,
                       const std::vector<std::size_t>& rev, bool inverse) {
        const std::size_t n = a.size();
        for (std::size_t i = 0; i < n; ++i)
            if (i < rev[i]) std::swap(a[i], a[rev[i]]);
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t step = n / len;
            for (std::size_t start = 0; start < n; start += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    Complex w = tw[k * step];
                    if (inverse) w = std::conj(w);
                    const Complex u = a[start + k];
                    const Complex v = a[start + k + half] * w;
                    a[start + k] = u + v;
                    a[start + k + half] = u - v;
                }
            }
        }
    }

    void init_bluestein() {
        conv_len_ = std::bit_ceil(2 * n_ - 1);
        chirp_.resize(n_);
        const std::size_t period = 2 * n_;
        for (std::size_t k = 0; k < n_; ++k) {
            // k^2 mod 2n keeps the angle small and exact
            const std::size_t k2 = (k * k) % period;
            const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n_);
            chirp_[k] = {std::cos(angle), std::sin(angle)};
        }
        init_radix2(conv_len_, conv_twiddles_, conv_bitrev_);
        chirp_fft_.assign(conv_len_, Complex{});
        chirp_fft_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n_; ++k) {
            chirp_fft_[k] = std::conj(chirp_[k]);
            chirp_fft_[conv_len_ - k] = std::conj(chirp_[k]);
        }
        radix2(chirp_fft_, conv_twiddles_, conv_bitrev_, false);
    }

    void transform(std::span<Complex> data, bool inverse) const {
        if (data.size() != n_) throw DimensionError("FFT input length does not match plan");
        if (!chirp_.empty()) {
            bluestein(data, inverse);
        } else {
            radix2(data, twiddles_, bitrev_, inverse);
        }
    }

    void bluestein(std::span<Complex> data, bool inverse) const {
        // The inverse DFT is conj(DFT(conj(x))).
        std::vector<Complex> buf(conv_len_, Complex{});
        for (std::size_t k = 0; k < n_; ++k) {
            const Complex x = inverse ? std::conj(data[k]) : data[k];
            buf[k] = x * chirp_[k];
        }
        radix2(buf, conv_twiddles_, conv_bitrev_, false);
        for (std::size_t k = 0; k < conv_len_; ++k) buf[k] *= chirp_fft_[k];
        radix2(buf, conv_twiddles_, conv_bitrev_, true);
        const double scale = 1.0 / static_cast<double>(conv_len_);
        for (std::size_t k = 0; k < n_; ++k) {
            const Complex y = buf[k] * scale * chirp_[k];
            data[k] = inverse ? std::conj(y) : y;
        }
    }
};

/// Row-major complex grid of DFT coefficients; (k, l) = row frequency k,
/// column frequency l.
struct Spectrum2D {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<Complex> coefficients;

    Complex operator()(std::size_t k, std::size_t l) const { return coefficients[k * width + l]; }
};

/// Separable 2D transform of a row-major complex grid, in place.
inline void fft2d_inplace(std::vector<Complex>& grid, std::size_t height, std::size_t width,
                          bool inverse = false) {
    if (grid.size() != height * width) throw DimensionError("grid size does not match dimensions");
    const FftPlan rows(width);
    for (std::size_t r = 0; r < height; ++r) {
        std::span<Complex> row(grid.data() + r * width, width);
        inverse ? rows.inverse(row) : rows.forward(row);
    }
    const FftPlan cols(height);
    std::vector<Complex> column(height);
    for (std::size_t c = 0; c < width; ++c) {
        for (std::size_t r = 0; r < height; ++r) column[r] = grid[r * width + c];
        inverse ? cols.inverse(column) : cols.forward(column);
        for (std::size_t r = 0; r < height; ++r) grid[r * width + c] = column[r];
    }
}

/// 2D DFT of a grayscale image via row-column decomposition.
inline Spectrum2D dft2d(const GrayImage& img) {
    if (img.height == 0 || img.width == 0 || img.pixels.empty())
        throw DimensionError("cannot transform an empty image");
    validate(img);
    Spectrum2D out{img.height, img.width, {}};
    out.coefficients.assign(img.pixels.begin(), img.pixels.end());
    fft2d_inplace(out.coefficients, img.height, img.width);
    return out;
}

} // namespace sfk
