#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sfk/error.hpp"

namespace sfk {

/// Interleaved 8-bit image as decoded from disk (1 or 3 channels).
struct Image8 {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<std::uint8_t> data;
};

/// Row-major luminance grid; pixel (r, c) lives at r * width + c.
struct GrayImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(std::size_t h, std::size_t w, double fill = 0.0)
        : height(h), width(w), pixels(h * w, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
    double operator()(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }
};

inline void validate(const GrayImage& img) {
    if (img.height < 2 || img.width < 2)
        throw DimensionError("image must be at least 2x2, got " + std::to_string(img.height) +
                             "x" + std::to_string(img.width));
    if (img.pixels.size() != img.height * img.width)
        throw DimensionError("pixel buffer holds " + std::to_string(img.pixels.size()) +
                             " values, expected " + std::to_string(img.height * img.width));
    for (double v : img.pixels)
        if (!std::isfinite(v) || v < 0.0)
            throw ParameterError("pixel values must be finite and non-negative");
}

// BT.601 luma weights.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

/// Luma conversion. Single-channel input is copied through unchanged.
inline GrayImage to_grayscale(const Image8& img) {
    if (img.channels != 1 && img.channels != 3)
        throw DimensionError("expected 1 or 3 channels, got " + std::to_string(img.channels));
    if (img.data.size() != img.height * img.width * img.channels)
        throw DimensionError("channel planes do not match image dimensions " +
                             std::to_string(img.height) + "x" + std::to_string(img.width));
    GrayImage out(img.height, img.width);
    const std::size_t n = img.height * img.width;
    if (img.channels == 1) {
        for (std::size_t i = 0; i < n; ++i) out.pixels[i] = img.data[i];
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t* px = &img.data[3 * i];
            out.pixels[i] = kLumaR * px[0] + kLumaG * px[1] + kLumaB * px[2];
        }
    }
    return out;
}

} // namespace sfk
