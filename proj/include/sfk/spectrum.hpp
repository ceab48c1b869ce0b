#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sfk/error.hpp"
#include "sfk/fft.hpp"
#include "sfk/image.hpp"

namespace sfk {

/// Squared DFT magnitudes with the DC bin moved to (height/2, width/2).
struct PowerMap {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> values;

    double operator()(std::size_t r, std::size_t c) const { return values[r * width + c]; }
};

/// 1D feature vector; bin i of a native profile is the mean power at
/// integer radius i from the shifted DC.
struct SpectralProfile {
    std::vector<double> bins;

    std::size_t size() const { return bins.size(); }
    bool operator==(const SpectralProfile&) const = default;
};

struct ExtractionConfig {
    std::size_t target_length = 0; ///< 0 keeps the native profile length
    bool normalize_dc = true;
    bool log_power = true;
    double epsilon = 1e-12;

    bool operator==(const ExtractionConfig&) const = default;
};

inline void validate(const ExtractionConfig& cfg) {
    if (cfg.target_length == 1)
        throw ParameterError("target length must be 0 (native) or at least 2");
    if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon))
        throw ParameterError("epsilon must be a positive finite number");
}

/// Quadrant shift of |X|^2.
inline PowerMap power_map(const Spectrum2D& spec) {
    const std::size_t h = spec.height, w = spec.width;
    if (spec.coefficients.size() != h * w) throw DimensionError("spectrum size does not match dimensions");
    PowerMap out{h, w, std::vector<double>(h * w)};
    const std::size_t cy = h / 2, cx = w / 2;
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t rr = (r + cy) % h;
        for (std::size_t c = 0; c < w; ++c) {
            const std::size_t cc = (c + cx) % w;
            out.values[rr * w + cc] = std::norm(spec.coefficients[r * w + c]);
        }
    }
    return out;
}

/// Integer radius of pixel (r, c) from the shifted DC, rounded half away
/// from zero.
inline std::size_t radial_bin(std::size_t r, std::size_t c, std::size_t height, std::size_t width) {
    const double dy = static_cast<double>(r) - static_cast<double>(height / 2);
    const double dx = static_cast<double>(c) - static_cast<double>(width / 2);
    return static_cast<std::size_t>(std::round(std::sqrt(dy * dy + dx * dx)));
}

/// Native profile length for a map of the given size: one past the largest
/// rounded radius.
inline std::size_t native_profile_length(std::size_t height, std::size_t width) {
    std::size_t max_bin = 0;
    // The extreme radius is attained at one of the four corners.
    for (std::size_t r : {std::size_t{0}, height - 1})
        for (std::size_t c : {std::size_t{0}, width - 1})
            max_bin = std::max(max_bin, radial_bin(r, c, height, width));
    return max_bin + 1;
}

inline SpectralProfile azimuthal_average(const PowerMap& pm) {
    if (pm.values.size() != pm.height * pm.width || pm.values.empty())
        throw DimensionError("power map size does not match dimensions");
    const std::size_t bins = native_profile_length(pm.height, pm.width);
    std::vector<double> sums(bins, 0.0);
    std::vector<std::size_t> counts(bins, 0);
    for (std::size_t r = 0; r < pm.height; ++r) {
        for (std::size_t c = 0; c < pm.width; ++c) {
            const std::size_t b = radial_bin(r, c, pm.height, pm.width);
            sums[b] += pm.values[r * pm.width + c];
            ++counts[b];
        }
    }
    std::size_t used = bins;
    while (used > 0 && counts[used - 1] == 0) --used;
    SpectralProfile out;
    out.bins.resize(used);
    for (std::size_t i = 0; i < used; ++i)
        out.bins[i] = counts[i] ? sums[i] / static_cast<double>(counts[i]) : 0.0;
    return out;
}

/// Piecewise-linear resampling over the normalized abscissa [0, 1].
inline SpectralProfile interpolate_profile(const SpectralProfile& p, std::size_t target_length) {
    if (target_length < 2) throw ParameterError("target length must be at least 2");
    if (p.size() < 2) throw DimensionError("profile needs at least 2 bins to interpolate");
    const std::size_t n = p.size();
    if (n == target_length) return p;
    SpectralProfile out;
    out.bins.resize(target_length);
    const double scale = static_cast<double>(n - 1) / static_cast<double>(target_length - 1);
    for (std::size_t k = 0; k < target_length; ++k) {
        const double x = static_cast<double>(k) * scale;
        std::size_t i = static_cast<std::size_t>(x);
        if (i >= n - 1) i = n - 2;
        const double t = x - static_cast<double>(i);
        out.bins[k] = p.bins[i] + t * (p.bins[i + 1] - p.bins[i]);
    }
    out.bins.front() = p.bins.front();
    out.bins.back() = p.bins.back();
    return out;
}

/// Divides every bin by the DC bin. Rejects profiles whose DC bin is at or
/// below `epsilon`.
inline SpectralProfile normalize_profile(const SpectralProfile& p, double epsilon = 1e-12) {
    if (p.bins.empty()) throw DimensionError("cannot normalize an empty profile");
    const double dc = p.bins[0];
    if (!(dc > epsilon))
        throw DegenerateImageError("DC component " + std::to_string(dc) +
                                   " is not above epsilon; image is degenerate");
    SpectralProfile out = p;
    for (auto& v : out.bins) v /= dc;
    out.bins[0] = 1.0;
    return out;
}

/// Full feature pipeline on an already-gray image.
inline SpectralProfile extract_features(const GrayImage& gray, const ExtractionConfig& cfg) {
    validate(cfg);
    PowerMap pm = power_map(dft2d(gray));
    const double dc_power = pm(pm.height / 2, pm.width / 2);
    if (cfg.normalize_dc && !(dc_power > cfg.epsilon))
        throw DegenerateImageError("DC power is not above epsilon; image is degenerate");
    if (cfg.log_power)
        for (auto& v : pm.values) v = std::log(cfg.epsilon + v);
    SpectralProfile profile = azimuthal_average(pm);
    if (cfg.target_length != 0) profile = interpolate_profile(profile, cfg.target_length);
    if (cfg.normalize_dc) profile = normalize_profile(profile, cfg.epsilon);
    return profile;
}

inline SpectralProfile extract_features(const Image8& img, const ExtractionConfig& cfg) {
    return extract_features(to_grayscale(img), cfg);
}

} // namespace sfk
