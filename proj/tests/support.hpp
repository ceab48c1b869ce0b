#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "sfk/sfk.hpp"

namespace testing_support {

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "sfk") {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Same rows the file pipeline would produce, without touching disk.
inline sfk::FeatureCache synthetic_cache(const sfk::SynthConfig& cfg, const sfk::ExtractionConfig& x = {}) {
    sfk::FeatureCache cache;
    cache.header.config = x;
    cache.header.seed = cfg.seed;
    for (std::size_t i = 0; i < cfg.count_per_class; ++i) {
        const auto pair = sfk::synth_pair(cfg, i);
        auto real = sfk::extract_features(sfk::quantize(pair.real), x);
        auto fake = sfk::extract_features(sfk::quantize(pair.fake), x);
        cache.header.dimension = real.size();
        cache.rows.push_back({"real_" + std::to_string(i), "", sfk::Label::real, std::move(real.bins)});
        cache.rows.push_back({"fake_" + std::to_string(i), "", sfk::Label::fake, std::move(fake.bins)});
    }
    return cache;
}

} // namespace testing_support
