#include <gtest/gtest.h>

#include "sfk/sfk.hpp"

using namespace sfk;

namespace {

std::vector<LabeledSample> balanced(std::size_t per_class) {
    std::vector<LabeledSample> s;
    for (std::size_t i = 0; i < per_class; ++i) {
        s.push_back({{static_cast<double>(i)}, Label::fake});
        s.push_back({{-static_cast<double>(i) - 1.0}, Label::real});
    }
    return s;
}

} // namespace

TEST(Metrics, PerfectPredictor) {
    const auto data = balanced(5);
    const auto m = evaluate([](std::span<const double> x) { return x[0] < 0 ? Label::real : Label::fake; },
                            std::span<const LabeledSample>(data));
    EXPECT_EQ(m.total, 10u);
    EXPECT_EQ(m.accuracy, 1.0);
    EXPECT_EQ(m.confusion[0][1], 0u);
    EXPECT_EQ(m.confusion[1][0], 0u);
    EXPECT_EQ(m.precision[0], 1.0);
    EXPECT_EQ(m.recall[1], 1.0);
}

TEST(Metrics, ConstantPredictorOnBalancedSet) {
    const auto data = balanced(7);
    const auto m =
        evaluate([](std::span<const double>) { return Label::real; }, std::span<const LabeledSample>(data));
    EXPECT_EQ(m.accuracy, 0.5);
    EXPECT_EQ(m.confusion[0][1], 7u);
    EXPECT_EQ(m.precision[0], 0.0);
    EXPECT_EQ(m.recall[1], 1.0);
}

TEST(Metrics, EmptyTestSetThrows) {
    std::vector<LabeledSample> none;
    EXPECT_THROW(evaluate([](std::span<const double>) { return Label::real; }, std::span<const LabeledSample>(none)),
                 ParameterError);
}
