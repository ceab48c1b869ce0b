#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <type_traits>

#include "sfk/classify/sample.hpp"

namespace sfk {

struct Metrics {
    std::size_t total = 0;
    double accuracy = 0.0;
    /// confusion[truth][predicted], indexed by label value
    std::array<std::array<std::size_t, 2>, 2> confusion{};
    std::array<double, 2> precision{};  ///< per predicted class; 0 when never predicted
    std::array<double, 2> recall{};     ///< per true class; 0 when absent
};

/// Scores any callable `Label(std::span<const double>)` on a test set.
template <class Predictor>
    requires std::is_invocable_r_v<Label, Predictor&, std::span<const double>>
Metrics evaluate(Predictor&& predict, std::span<const LabeledSample> test) {
    if (test.empty()) throw ParameterError("cannot evaluate on an empty test set");
    Metrics m;
    m.total = test.size();
    for (const auto& s : test) {
        const Label p = predict(std::span<const double>(s.features));
        ++m.confusion[static_cast<std::size_t>(to_int(s.label))][static_cast<std::size_t>(to_int(p))];
    }
    const std::size_t correct = m.confusion[0][0] + m.confusion[1][1];
    m.accuracy = static_cast<double>(correct) / static_cast<double>(m.total);
    for (std::size_t c = 0; c < 2; ++c) {
        const std::size_t predicted = m.confusion[0][c] + m.confusion[1][c];
        const std::size_t actual = m.confusion[c][0] + m.confusion[c][1];
        m.precision[c] = predicted ? static_cast<double>(m.confusion[c][c]) / static_cast<double>(predicted) : 0.0;
        m.recall[c] = actual ? static_cast<double>(m.confusion[c][c]) / static_cast<double>(actual) : 0.0;
    }
    return m;
}

} // namespace sfk
