#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace sfk;
using testing_support::synthetic_cache;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

SynthConfig small_corpus(std::size_t per_class = 60, double cutoff = 0.35) {
    SynthConfig cfg;
    cfg.image_size = 64;
    cfg.count_per_class = per_class;
    cfg.cutoff = cutoff;
    return cfg;
}

double top_band_gap(const ClassStats& s) {
    const std::size_t d = s.mean[0].size();
    double gap = 0.0;
    for (std::size_t j = d - d / 5; j < d; ++j) gap += s.mean[1][j] - s.mean[0][j];
    return gap;
}

ClassifierSpec spec_of(ClassifierKind k) {
    ClassifierSpec s;
    s.kind = k;
    return s;
}

} // namespace

TEST(Synth, GenerationIsBytewiseRepeatable) {
    testing_support::TempDir a, b;
    SynthConfig cfg = small_corpus(1);
    generate_synthetic(cfg, a.path());
    generate_synthetic(cfg, b.path());
    for (const char* f : {"real_00000.png", "fake_00000.png", "manifest.csv"}) {
        EXPECT_FALSE(slurp(a / f).empty());
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
}

TEST(Synth, FakeHasLessHighBandEnergyThanItsPair) {
    const auto cfg = small_corpus();
    for (std::size_t i = 0; i < 5; ++i) {
        const auto pair = synth_pair(cfg, i);
        const auto r = extract_features(quantize(pair.real), {});
        const auto f = extract_features(quantize(pair.fake), {});
        double rs = 0.0, fs = 0.0;
        for (std::size_t j = r.size() - r.size() / 5; j < r.size(); ++j) {
            rs += r.bins[j];
            fs += f.bins[j];
        }
        EXPECT_LT(fs, rs) << "pair " << i;
    }
}

TEST(Synth, GapShrinksAsCutoffRises) {
    double previous = std::numeric_limits<double>::infinity();
    for (double cutoff : {0.2, 0.35, 0.5}) {
        const double gap = top_band_gap(class_stats(synthetic_cache(small_corpus(20, cutoff))));
        EXPECT_GT(gap, 0.0);
        EXPECT_LT(gap, previous) << "cutoff " << cutoff;
        previous = gap;
    }
}

TEST(Synth, NearFullCutoffIsHardToSeparate) {
    const auto cache = synthetic_cache(small_corpus(100, 0.99));
    const auto idx = split_indices(cache, SplitSpec{});
    const double acc = train_and_evaluate(cache, idx, spec_of(ClassifierKind::svm)).accuracy;
    EXPECT_LT(acc, 0.8);
}

TEST(Sweep, SmallSizesSeparateAndRepeat) {
    const auto cache = synthetic_cache(small_corpus());
    const std::vector<ClassifierSpec> specs{spec_of(ClassifierKind::svm), spec_of(ClassifierKind::logistic)};
    const auto a = sample_size_sweep(cache, {20, 100}, specs, SplitSpec{}, 2);
    const auto b = sample_size_sweep(cache, {20, 100}, specs, SplitSpec{}, 2);
    EXPECT_EQ(a, b);
    for (const auto& row : a.rows) EXPECT_EQ(row.accuracy, 1.0) << row.classifier << " n=" << row.sample_count;
    std::ostringstream csv;
    write_sweep_csv(csv, a);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "samples,classifier,accuracy,min,max,repeats");
}

TEST(Sweep, TinySizeWithKMeansStillRuns) {
    const auto cache = synthetic_cache(small_corpus(10));
    const auto r = sample_size_sweep(cache, {4}, {spec_of(ClassifierKind::kmeans)}, SplitSpec{});
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_GE(r.rows[0].accuracy, 0.0);
    EXPECT_LE(r.rows[0].accuracy, 1.0);
}

TEST(Sweep, LogisticOnTwentyTrainingSamples) {
    const auto cache = synthetic_cache(small_corpus(50));
    const auto sub = subset(cache, balanced_subsample(cache, 100, 42));
    SplitSpec s;
    s.test_fraction = 0.8;
    const auto idx = split_indices(sub, s);
    ASSERT_EQ(idx.train.size(), 20u);
    EXPECT_EQ(train_and_evaluate(sub, idx, spec_of(ClassifierKind::logistic)).accuracy, 1.0);
}

TEST(BandGrid, FullRangeCellMatchesDirectRun) {
    const auto cache = synthetic_cache(small_corpus(30));
    const std::size_t d = cache.header.dimension;
    const auto spec = spec_of(ClassifierKind::svm);
    const auto grid = band_grid(cache, {0, d}, spec, SplitSpec{});
    ASSERT_EQ(grid.cells.size(), 1u);
    EXPECT_EQ(grid.cell(0, d).accuracy, train_and_evaluate(cache, split_indices(cache, SplitSpec{}), spec).accuracy);
}

TEST(BandGrid, HighBandBeatsLowBand) {
    const auto cache = synthetic_cache(small_corpus(60));
    const std::size_t d = cache.header.dimension;
    const auto points = scaled_breakpoints(d);
    const auto grid = band_grid(cache, points, spec_of(ClassifierKind::svm), SplitSpec{});
    EXPECT_EQ(grid.cells.size(), points.size() * (points.size() - 1) / 2);
    EXPECT_LT(grid.cell(points[0], points[1]).accuracy, grid.cell(points[points.size() - 2], d).accuracy);
    EXPECT_EQ(grid.cell(points[points.size() - 2], d).accuracy, 1.0);
}

TEST(BandGrid, Breakpoints) {
    EXPECT_EQ(default_breakpoints(722), (std::vector<std::size_t>{0, 100, 200, 300, 400, 500, 600, 722}));
    EXPECT_EQ(default_breakpoints(250), (std::vector<std::size_t>{0, 100, 200, 250}));
    EXPECT_EQ(scaled_breakpoints(722), default_breakpoints(722));
    EXPECT_EQ(scaled_breakpoints(92), (std::vector<std::size_t>{0, 13, 25, 38, 51, 64, 76, 92}));
    const auto cache = synthetic_cache(small_corpus(3));
    EXPECT_THROW(band_grid(cache, {0}, {}, {}), ParameterError);
    EXPECT_THROW(band_grid(cache, {5, 3}, {}, {}), ParameterError);
}

TEST(ClassStats, Examples) {
    FeatureCache c;
    c.header.dimension = 2;
    c.rows = {{"a", "", Label::fake, {1.0, 2.0}}, {"b", "", Label::fake, {1.0, 2.0}}, {"c", "", Label::real, {5.0, 7.0}}};
    const auto s = class_stats(c);
    EXPECT_EQ(s.stddev[0], (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(s.mean[1], (std::vector<double>{5.0, 7.0}));
    EXPECT_EQ(s.count[0], 2u);
    c.rows.pop_back();
    EXPECT_THROW(class_stats(c), ParameterError);
}

TEST(ClassStats, RealExceedsFakeAtHighFrequencies) {
    EXPECT_GT(top_band_gap(class_stats(synthetic_cache(small_corpus(30)))), 0.0);
}

TEST(MajorityVote, Examples) {
    const auto v = video_majority_vote(
        {{"A", Label::fake}, {"A", Label::fake}, {"A", Label::real}, {"B", Label::fake}, {"B", Label::real}});
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(v[0], (GroupLabel{"A", Label::fake}));
    EXPECT_EQ(v[1], (GroupLabel{"B", Label::real}));
    EXPECT_THROW(video_majority_vote({}), ParameterError);
    EXPECT_THROW(video_majority_vote({{"", Label::fake}}), ParameterError);
}

TEST(MajorityVote, UnanimousGroupsAndOrderInvariance) {
    std::vector<GroupLabel> frames;
    for (int g = 0; g < 6; ++g)
        for (int f = 0; f < 5; ++f) frames.emplace_back("g" + std::to_string(g), g % 2 ? Label::real : Label::fake);
    auto votes = video_majority_vote(frames);
    for (const auto& [g, l] : votes) EXPECT_EQ(l, (g.back() - '0') % 2 ? Label::real : Label::fake);
    std::mt19937_64 rng(1);
    std::shuffle(frames.begin(), frames.end(), rng);
    EXPECT_EQ(video_majority_vote(frames), votes);
}

TEST(VideoEval, AggregatesPerGroup) {
    FeatureCache c;
    c.header.dimension = 1;
    // Threshold model: x >= 0 is real.
    const Model m = LogisticModel{{1.0}, 0.0};
    c.rows = {{"1", "v1", Label::real, {1.0}},  {"2", "v1", Label::real, {2.0}},  {"3", "v1", Label::real, {-1.0}},
              {"4", "v2", Label::fake, {-1.0}}, {"5", "v2", Label::fake, {-2.0}}, {"6", "v2", Label::fake, {3.0}}};
    const auto r = video_evaluate(m, c);
    EXPECT_NEAR(r.frame_metrics.accuracy, 4.0 / 6.0, 1e-12);
    EXPECT_EQ(r.video_accuracy, 1.0);
    ASSERT_EQ(r.videos.size(), 2u);
    EXPECT_EQ(r.videos[0].frames, 3u);
    c.rows[0].group.clear();
    EXPECT_THROW(video_evaluate(m, c), ParameterError);
}
