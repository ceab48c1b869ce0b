#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles/oracles.hpp"

using namespace sfk;

namespace {

std::vector<LabeledSample> xor_set() {
    return {{{0.0, 0.0}, Label::fake}, {{1.0, 1.0}, Label::fake}, {{0.0, 1.0}, Label::real}, {{1.0, 0.0}, Label::real}};
}

SvmTrainConfig xor_config() {
    SvmTrainConfig cfg;
    cfg.c = 10.0;
    cfg.gamma = 1.0;
    return cfg;
}

double sign_of(Label l) { return l == Label::real ? 1.0 : -1.0; }

// Largest KKT violation of a training point under the returned bias.
double kkt_residual(const SvmFit& fit, std::span<const LabeledSample> data, double c) {
    double worst = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double yf = sign_of(data[i].label) * svm_decision(fit.model, data[i].features);
        const double a = fit.alpha[i];
        double v = 0.0;
        if (a <= 0.0)
            v = std::max(0.0, 1.0 - yf);
        else if (a >= c)
            v = std::max(0.0, yf - 1.0);
        else
            v = std::abs(yf - 1.0);
        worst = std::max(worst, v);
    }
    return worst;
}

} // namespace

TEST(Svm, XorIsSeparated) {
    const auto data = xor_set();
    const auto m = svm_train(data, xor_config());
    for (const auto& s : data) EXPECT_EQ(svm_predict(m, s.features), s.label);
}

TEST(Svm, BoundaryLiesBetweenSeparablePair) {
    std::vector<LabeledSample> data{{{-1.0}, Label::fake}, {{1.0}, Label::real}};
    SvmTrainConfig cfg;
    cfg.c = 1000.0;
    cfg.gamma = 0.5;
    const auto m = svm_train(data, cfg);
    EXPECT_LT(svm_decision(m, std::vector<double>{-1.0}), 0.0);
    EXPECT_GT(svm_decision(m, std::vector<double>{1.0}), 0.0);
}

TEST(Svm, PointDeepInsideClassIsLabelled) {
    const auto data = oracle::two_gaussians(20, 8.0, 0.5, 2, 3);
    const auto m = svm_train(data);
    EXPECT_EQ(svm_predict(m, std::vector<double>{4.0, 0.0}), Label::real);
    EXPECT_EQ(svm_predict(m, std::vector<double>{-4.0, 0.0}), Label::fake);
}

TEST(Svm, DualMatchesProjectedGradientOracle) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto data = oracle::two_gaussians(20, 2.0, 1.0, 2, seed);
        SvmTrainConfig cfg;
        cfg.c = 1.0;
        cfg.gamma = 0.5;
        const auto fit = svm_fit(data, cfg);
        std::vector<std::vector<double>> x;
        std::vector<double> y;
        for (const auto& s : data) {
            x.push_back(s.features);
            y.push_back(sign_of(s.label));
        }
        const auto ref = oracle::projected_gradient_dual(x, y, cfg.c, cfg.gamma);
        EXPECT_NEAR(fit.objective, ref.objective, 1e-2 * std::abs(ref.objective)) << "seed " << seed;
    }
}

TEST(Svm, KktAndEqualityConstraint) {
    const auto data = oracle::two_gaussians(25, 1.5, 1.0, 3, 21);
    SvmTrainConfig cfg;
    cfg.c = 2.0;
    const auto fit = svm_fit(data, cfg);
    EXPECT_TRUE(fit.converged);
    EXPECT_LE(kkt_residual(fit, data, cfg.c), 1e-3);
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        EXPECT_GE(fit.alpha[i], 0.0);
        EXPECT_LE(fit.alpha[i], cfg.c);
        sum += fit.alpha[i] * sign_of(data[i].label);
    }
    EXPECT_NEAR(sum, 0.0, 1e-8);
}

TEST(Svm, PermutingTrainingSetKeepsDecisions) {
    auto data = oracle::two_gaussians(15, 1.0, 1.0, 2, 8);
    const auto a = svm_train(data);
    std::mt19937_64 rng(4);
    std::shuffle(data.begin(), data.end(), rng);
    const auto b = svm_train(data);
    std::mt19937_64 probe(5);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> x{g(probe), g(probe)};
        EXPECT_NEAR(svm_decision(a, x), svm_decision(b, x), 1e-2);
    }
}

TEST(Svm, EmptyModelIsRejected) {
    SvmModel m;
    EXPECT_THROW(validate_model(m), ModelIntegrityError);
    EXPECT_THROW(svm_decision(m, std::vector<double>{1.0}), ModelIntegrityError);
}

TEST(Svm, SingleClassIsRejected) {
    std::vector<LabeledSample> data{{{1.0}, Label::fake}, {{2.0}, Label::fake}};
    EXPECT_THROW(svm_train(data), TrainingError);
}
