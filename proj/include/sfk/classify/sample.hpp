#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sfk/error.hpp"

namespace sfk {

enum class Label : int { fake = 0, real = 1 };

inline int to_int(Label l) { return static_cast<int>(l); }

inline Label label_from_int(long long v) {
    if (v != 0 && v != 1) throw ParseError("label must be 0 or 1, got " + std::to_string(v));
    return static_cast<Label>(v);
}

inline const char* label_name(Label l) { return l == Label::real ? "real" : "fake"; }

struct LabeledSample {
    std::vector<double> features;
    Label label = Label::fake;
};

/// Common dimension of a nonempty sample set; rejects ragged or non-finite
/// input.
inline std::size_t checked_dimension(std::span<const LabeledSample> samples) {
    if (samples.empty()) throw ParameterError("sample set is empty");
    const std::size_t d = samples.front().features.size();
    if (d == 0) throw DimensionError("samples have no features");
    for (const auto& s : samples) {
        if (s.features.size() != d)
            throw DimensionError("inconsistent feature dimension: " + std::to_string(s.features.size()) +
                                 " vs " + std::to_string(d));
        for (double v : s.features)
            if (!std::isfinite(v)) throw ParameterError("non-finite feature value");
    }
    return d;
}

inline void require_both_classes(std::span<const LabeledSample> samples) {
    bool seen[2] = {false, false};
    for (const auto& s : samples) seen[to_int(s.label)] = true;
    if (!seen[0] || !seen[1]) throw TrainingError("training requires samples of both classes");
}

inline void require_dimension(std::size_t expected, std::size_t got) {
    if (expected != got)
        throw DimensionError("feature dimension " + std::to_string(got) + " does not match model dimension " +
                             std::to_string(expected));
}

} // namespace sfk
