#include <gtest/gtest.h>

#include <random>

#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace sfk;

TEST(Grayscale, Bt601Weights) {
    auto one = [](std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        return to_grayscale(Image8{1, 1, 3, {r, g, b}}).pixels[0];
    };
    EXPECT_DOUBLE_EQ(one(255, 255, 255), 255.0);
    EXPECT_DOUBLE_EQ(one(0, 0, 0), 0.0);
    EXPECT_NEAR(one(255, 0, 0), 76.245, 1e-12);
}

TEST(Grayscale, MismatchedChannelsThrow) {
    EXPECT_THROW(to_grayscale(Image8{2, 2, 3, std::vector<std::uint8_t>(11)}), DimensionError);
    EXPECT_THROW(to_grayscale(Image8{2, 2, 2, std::vector<std::uint8_t>(8)}), DimensionError);
}

TEST(PowerMap, ConstantImageConcentratesAtCenter) {
    const auto pm = power_map(dft2d(GrayImage(4, 4, 3.0)));
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) {
            if (r == 2 && c == 2)
                EXPECT_NEAR(pm(r, c), 48.0 * 48.0, 1e-9);
            else
                EXPECT_NEAR(pm(r, c), 0.0, 1e-9);
        }
}

TEST(PowerMap, ImpulseIsFlat) {
    GrayImage img(6, 6);
    img(0, 0) = 1.0;
    for (double v : power_map(dft2d(img)).values) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(PowerMap, SquaresOracleMagnitudes) {
    std::mt19937_64 rng(5);
    const auto img = oracle::random_image(8, 8, rng);
    const auto slow = oracle::naive_dft2d(img);
    const auto pm = power_map(dft2d(img));
    for (std::size_t k = 0; k < 8; ++k)
        for (std::size_t l = 0; l < 8; ++l) {
            const double want = std::norm(slow[k * 8 + l]);
            EXPECT_NEAR(pm((k + 4) % 8, (l + 4) % 8), want, 1e-9 * std::max(1.0, want));
        }
}

TEST(AzimuthalAverage, UniformMapGivesUniformProfile) {
    const PowerMap pm{9, 12, std::vector<double>(108, 2.5)};
    for (double b : azimuthal_average(pm).bins) EXPECT_DOUBLE_EQ(b, 2.5);
}

TEST(AzimuthalAverage, FiveByFiveEdgeMidpoints) {
    PowerMap pm{5, 5, std::vector<double>(25, 0.0)};
    for (auto [r, c] : {std::pair{0, 2}, {2, 0}, {2, 4}, {4, 2}}) pm.values[r * 5 + c] = 1.0;
    const auto radii = oracle::pixel_radii(5, 5);
    std::size_t at_two = 0;
    for (double r : radii)
        if (std::round(r) == 2.0) ++at_two;
    const auto profile = azimuthal_average(pm);
    ASSERT_GT(profile.size(), 2u);
    EXPECT_DOUBLE_EQ(profile.bins[2], 4.0 / static_cast<double>(at_two));
    EXPECT_DOUBLE_EQ(profile.bins[0], 0.0);
}

TEST(AzimuthalAverage, BinsMatchEnumeratedRadii) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto [h, w] : {std::pair<std::size_t, std::size_t>{5, 5}, {6, 9}, {16, 16}, {7, 4}}) {
        PowerMap pm{h, w, std::vector<double>(h * w)};
        for (auto& v : pm.values) v = u(rng);
        const auto radii = oracle::pixel_radii(h, w);
        std::vector<double> sum(64, 0.0), cnt(64, 0.0);
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const auto b = static_cast<std::size_t>(std::round(radii[i]));
            sum[b] += pm.values[i];
            cnt[b] += 1.0;
        }
        const auto profile = azimuthal_average(pm);
        for (std::size_t b = 0; b < profile.size(); ++b)
            EXPECT_NEAR(profile.bins[b], cnt[b] > 0 ? sum[b] / cnt[b] : 0.0, 1e-12);
        EXPECT_GT(cnt[profile.size() - 1], 0.0);
        EXPECT_EQ(cnt[profile.size()], 0.0);
    }
}

TEST(AzimuthalAverage, NativeLengths) {
    EXPECT_EQ(native_profile_length(1024, 1024), 725u);
    EXPECT_EQ(native_profile_length(128, 128), 92u);
    EXPECT_EQ(native_profile_length(5, 5), 4u);
}

TEST(AzimuthalAverage, RotationBy90DegreesLeavesProfileUnchanged) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 11;
    PowerMap pm{n, n, std::vector<double>(n * n)};
    for (auto& v : pm.values) v = u(rng);
    PowerMap rot = pm;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) rot.values[c * n + (n - 1 - r)] = pm.values[r * n + c];
    const auto a = azimuthal_average(pm), b = azimuthal_average(rot);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.bins[i], b.bins[i], 1e-12);
}

TEST(AzimuthalAverage, ScalesLinearly) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PowerMap pm{8, 10, std::vector<double>(80)};
    for (auto& v : pm.values) v = u(rng);
    PowerMap scaled = pm;
    for (auto& v : scaled.values) v *= 3.5;
    const auto a = azimuthal_average(pm), b = azimuthal_average(scaled);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b.bins[i], 3.5 * a.bins[i], 1e-12);
}

TEST(Interpolate, Examples) {
    EXPECT_EQ(interpolate_profile({{3.0, 1.0, 2.0}}, 3).bins, (std::vector<double>{3.0, 1.0, 2.0}));
    const auto mid = interpolate_profile({{0.0, 2.0}}, 3).bins;
    EXPECT_DOUBLE_EQ(mid[1], 1.0);
    const auto up = interpolate_profile({{1.0, 4.0, 9.0, 16.0}}, 7).bins;
    const std::vector<double> want{1, 2.5, 4, 6.5, 9, 12.5, 16};
    ASSERT_EQ(up.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(up[i], want[i], 1e-12);
}

TEST(Interpolate, KeepsEndpointsAndRejectsShortTargets) {
    const SpectralProfile p{{5.0, 4.0, 1.0, 0.5, 0.25}};
    for (std::size_t t : {2, 3, 9, 300}) {
        const auto q = interpolate_profile(p, t);
        EXPECT_EQ(q.size(), t);
        EXPECT_EQ(q.bins.front(), 5.0);
        EXPECT_EQ(q.bins.back(), 0.25);
    }
    EXPECT_THROW(interpolate_profile(p, 1), ParameterError);
    EXPECT_THROW(interpolate_profile(p, 0), ParameterError);
}

TEST(Normalize, Examples) {
    const auto a = normalize_profile({{10.0, 5.0, 1.0}}).bins;
    EXPECT_DOUBLE_EQ(a[0], 1.0);
    EXPECT_DOUBLE_EQ(a[1], 0.5);
    EXPECT_DOUBLE_EQ(a[2], 0.1);
    EXPECT_EQ(normalize_profile({{1.0, 1.0, 1.0}}).bins, (std::vector<double>{1.0, 1.0, 1.0}));
    EXPECT_THROW(normalize_profile({{0.0, 0.0, 0.0}}), DegenerateImageError);
}

TEST(Extract, ConstantImageWithoutLog) {
    ExtractionConfig cfg;
    cfg.log_power = false;
    const auto p = extract_features(GrayImage(16, 16, 90.0), cfg);
    EXPECT_EQ(p.bins[0], 1.0);
    for (std::size_t i = 1; i < p.size(); ++i) EXPECT_NEAR(p.bins[i], 0.0, 1e-12);
}

TEST(Extract, BlackImageIsDegenerate) {
    EXPECT_THROW(extract_features(GrayImage(8, 8, 0.0), ExtractionConfig{}), DegenerateImageError);
}

TEST(Extract, DeterministicBitForBit) {
    std::mt19937_64 rng(8);
    const auto img = oracle::random_image(37, 50, rng);
    ExtractionConfig cfg;
    cfg.target_length = 40;
    EXPECT_EQ(extract_features(img, cfg), extract_features(img, cfg));
}

TEST(Extract, TargetLengthControlsSize) {
    std::mt19937_64 rng(6);
    const auto img = oracle::random_image(30, 30, rng);
    EXPECT_EQ(extract_features(img, {}).size(), native_profile_length(30, 30));
    ExtractionConfig cfg;
    cfg.target_length = 300;
    EXPECT_EQ(extract_features(img, cfg).size(), 300u);
}

TEST(Extract, LowPassedCopyHasLessHighFrequencyEnergy) {
    SynthConfig cfg;
    cfg.image_size = 64;
    const auto pair = synth_pair(cfg, 0);
    const auto real = extract_features(pair.real, {});
    const auto fake = extract_features(pair.fake, {});
    const std::size_t from = real.size() - real.size() / 5;
    double r = 0.0, f = 0.0;
    for (std::size_t i = from; i < real.size(); ++i) {
        r += real.bins[i];
        f += fake.bins[i];
    }
    EXPECT_LT(f, r);
}

TEST(ImageIo, PngRoundTripAndRejectsGarbage) {
    testing_support::TempDir dir;
    Image8 img{3, 5, 3, {}};
    for (std::size_t i = 0; i < 45; ++i) img.data.push_back(static_cast<std::uint8_t>(i * 5));
    write_png(dir / "a.png", img);
    const auto back = read_image(dir / "a.png");
    EXPECT_EQ(back.height, 3u);
    EXPECT_EQ(back.width, 5u);
    EXPECT_EQ(back.data, img.data);
    {
        std::ofstream(dir / "junk.png") << "not an image";
    }
    EXPECT_THROW(read_image(dir / "junk.png"), Error);
    EXPECT_THROW(read_image(dir / "missing.png"), Error);
}
