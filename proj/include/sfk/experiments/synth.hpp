#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sfk/dataset.hpp"
#include "sfk/fft.hpp"
#include "sfk/image.hpp"
#include "sfk/image_io.hpp"

namespace sfk {

/// Desk-scale stand-in for a real/fake face corpus. "Real" images are
/// isotropic 1/f^p noise; "fake" images are the same noise field with its
/// high frequencies attenuated, rescaled to the same mean and variance so
/// only the spectral shape differs.
struct SynthConfig {
    std::size_t image_size = 128;
    std::size_t count_per_class = 500;
    std::uint64_t seed = 42;
    double exponent = 1.8;   ///< power falls off as 1/f^exponent
    double cutoff = 0.35;    ///< passband edge as a fraction of the corner frequency
    double mean = 128.0;
    double stddev = 32.0;
};

inline void validate(const SynthConfig& cfg) {
    if (cfg.image_size < 2) throw ParameterError("synthetic image size must be at least 2");
    if (cfg.count_per_class < 1) throw ParameterError("count per class must be at least 1");
    if (!(cfg.cutoff > 0.0 && cfg.cutoff < 1.0)) throw ParameterError("cutoff must lie strictly between 0 and 1");
    if (!(cfg.exponent >= 0.0)) throw ParameterError("exponent must be non-negative");
    if (!(cfg.stddev > 0.0)) throw ParameterError("stddev must be positive");
}

/// Gain applied to the fake image at normalized radial frequency r in
/// [0, 1] (1 = spectrum corner): flat up to the cutoff, then a Gaussian
/// roll-off reaching 1/100 at the corner.
inline double lowpass_gain(double r, double cutoff) {
    if (r <= cutoff) return 1.0;
    const double t = (r - cutoff) / (1.0 - cutoff);
    return std::exp(-std::log(100.0) * t * t);
}

struct SynthPair {
    GrayImage real;
    GrayImage fake;
};

namespace detail {

// Signed frequency of DFT index k for length n, in cycles per sample.
inline double signed_frequency(std::size_t k, std::size_t n) {
    const auto ki = static_cast<double>(k);
    const auto ni = static_cast<double>(n);
    return (k <= n / 2 ? ki : ki - ni) / ni;
}

inline GrayImage standardized_real_part(const std::vector<Complex>& grid, std::size_t size, double mean,
                                        double stddev) {
    GrayImage img(size, size);
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) m += grid[i].real();
    m /= static_cast<double>(grid.size());
    double var = 0.0;
    for (const auto& z : grid) var += (z.real() - m) * (z.real() - m);
    var /= static_cast<double>(grid.size());
    const double scale = var > 0.0 ? stddev / std::sqrt(var) : 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) img.pixels[i] = mean + (grid[i].real() - m) * scale;
    return img;
}

} // namespace detail

/// Pair `index` of the corpus; depends only on (cfg, index).
inline SynthPair synth_pair(const SynthConfig& cfg, std::size_t index) {
    validate(cfg);
    const std::size_t s = cfg.image_size;
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Complex> field(s * s);
    for (auto& v : field) v = gauss(rng);
    fft2d_inplace(field, s, s);

    const double fmax = std::hypot(detail::signed_frequency(s / 2, s), detail::signed_frequency(s / 2, s));
    std::vector<Complex> lowpassed(field.size());
    for (std::size_t r = 0; r < s; ++r) {
        const double fy = detail::signed_frequency(r, s);
        for (std::size_t c = 0; c < s; ++c) {
            const double fx = detail::signed_frequency(c, s);
            const double f = std::hypot(fy, fx);
            const double amp = f > 0.0 ? std::pow(f, -0.5 * cfg.exponent) : 0.0;
            auto& v = field[r * s + c];
            v *= amp;
            lowpassed[r * s + c] = v * lowpass_gain(f / fmax, cfg.cutoff);
        }
    }
    fft2d_inplace(field, s, s, true);
    fft2d_inplace(lowpassed, s, s, true);
    return {detail::standardized_real_part(field, s, cfg.mean, cfg.stddev),
            detail::standardized_real_part(lowpassed, s, cfg.mean, cfg.stddev)};
}

/// Clips to [0, 255] and rounds to 8-bit.
inline Image8 quantize(const GrayImage& img) {
    Image8 out{img.height, img.width, 1, std::vector<std::uint8_t>(img.pixels.size())};
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        out.data[i] = static_cast<std::uint8_t>(std::lround(std::clamp(img.pixels[i], 0.0, 255.0)));
    return out;
}

/// Writes real_NNNNN.png / fake_NNNNN.png and manifest.csv (paths relative
/// to `out_dir`) and returns the manifest.
inline DatasetManifest generate_synthetic(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
    validate(cfg);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw IoError("cannot create output directory " + out_dir.string());
    DatasetManifest manifest;
    for (std::size_t i = 0; i < cfg.count_per_class; ++i) {
        const auto pair = synth_pair(cfg, i);
        char name[32];
        std::snprintf(name, sizeof name, "real_%05zu.png", i);
        write_png(out_dir / name, quantize(pair.real));
        manifest.entries.push_back({name, Label::real, ""});
        std::snprintf(name, sizeof name, "fake_%05zu.png", i);
        write_png(out_dir / name, quantize(pair.fake));
        manifest.entries.push_back({name, Label::fake, ""});
    }
    save_manifest(out_dir / "manifest.csv", manifest);
    return manifest;
}

} // namespace sfk
