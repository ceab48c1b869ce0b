#include <gtest/gtest.h>

#include <sstream>

#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace sfk;

namespace {

Model round_trip(const Model& m) {
    std::stringstream s;
    save_model(s, m);
    return load_model(s);
}

Model load_text(const std::string& text) {
    std::istringstream in(text);
    return load_model(in);
}

} // namespace

TEST(ModelIo, EveryKindRoundTripsExactly) {
    const auto data = oracle::two_gaussians(20, 3.0, 1.0, 3, 12);
    for (auto kind : {ClassifierKind::logistic, ClassifierKind::svm, ClassifierKind::kmeans}) {
        ClassifierSpec spec;
        spec.kind = kind;
        const Model m = train(spec, data);
        const Model back = round_trip(m);
        EXPECT_EQ(m, back) << classifier_name(kind);
        for (const auto& s : data) {
            const auto a = predict(m, s.features), b = predict(back, s.features);
            EXPECT_EQ(a.label, b.label);
            EXPECT_EQ(a.score, b.score);
        }
    }
}

TEST(ModelIo, FileRoundTrip) {
    testing_support::TempDir dir;
    const Model m = LogisticModel{{0.1, -1.0 / 3.0}, 2.5e-17};
    save_model((dir / "m.txt").string(), m);
    EXPECT_EQ(load_model((dir / "m.txt").string()), m);
    EXPECT_THROW(load_model((dir / "missing.txt").string()), IoError);
}

TEST(ModelIo, IntegrityErrors) {
    EXPECT_THROW(load_text("svm 1\ngamma 1\nb 0\n"), ModelIntegrityError);
    EXPECT_THROW(load_text("kmeans 1\n2 1\n5\n5\nmap 0 0\nmap 1 1\n"), ModelIntegrityError);
    EXPECT_THROW(load_text("kmeans 1\n1 1\n5\nmap 0 0\n"), ModelIntegrityError);
    EXPECT_THROW(load_text("forest 1\n"), Error);
    EXPECT_THROW(load_text("logistic 1\nw 2 1.0\nb 0\n"), Error);
    EXPECT_THROW(load_text("logistic 9\nw 1 1.0\nb 0\n"), Error);
}

TEST(ModelIo, PredictionChecksDimension) {
    const Model m = LogisticModel{{1.0, 2.0}, 0.0};
    EXPECT_THROW(predict(m, std::vector<double>{1.0}), DimensionError);
    EXPECT_EQ(model_dimension(m), 2u);
}
