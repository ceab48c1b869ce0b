#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sfk/classify/model.hpp"
#include "sfk/dataset.hpp"
#include "sfk/text.hpp"

namespace sfk {

// ---------------------------------------------------------------------------
// Sample-size sweep

struct SweepRow {
    std::size_t sample_count = 0;
    std::string classifier;
    double accuracy = 0.0;  ///< mean over repeats
    double min_accuracy = 0.0;
    double max_accuracy = 0.0;
    int repeats = 0;

    bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    bool operator==(const SweepResult&) const = default;
};

/// Draws `count` rows, half from each class, with a seeded shuffle. Row
/// order of the result follows the cache.
inline std::vector<std::size_t> balanced_subsample(const FeatureCache& cache, std::size_t count, std::uint64_t seed) {
    if (count % 2 != 0) throw ParameterError("sample count " + std::to_string(count) + " cannot be split evenly");
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < cache.rows.size(); ++i) by_class[to_int(cache.rows[i].label)].push_back(i);
    const std::size_t half = count / 2;
    if (by_class[0].size() < half || by_class[1].size() < half)
        throw ParameterError("sample count " + std::to_string(count) + " exceeds the corpus (" +
                             std::to_string(by_class[0].size()) + " fake, " + std::to_string(by_class[1].size()) +
                             " real)");
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> chosen;
    for (auto& pool : by_class) {
        std::shuffle(pool.begin(), pool.end(), rng);
        chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(half));
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

/// Trains on the train side of `split` and scores the test side.
inline Metrics train_and_evaluate(const FeatureCache& cache, const SplitIndices& split, const ClassifierSpec& spec) {
    const auto train_rows = to_samples(subset(cache, split.train));
    const auto test_rows = to_samples(subset(cache, split.test));
    const Model model = train(spec, train_rows);
    return evaluate(model, test_rows);
}

/// For each size: balanced subsample, stratified split, train and score
/// every classifier; repeat r reseeds everything with `split.seed + r`.
inline SweepResult sample_size_sweep(const FeatureCache& cache, const std::vector<std::size_t>& sizes,
                                     const std::vector<ClassifierSpec>& classifiers, const SplitSpec& split,
                                     int repeats = 1) {
    if (repeats < 1) throw ParameterError("repeats must be at least 1");
    if (sizes.empty() || classifiers.empty()) throw ParameterError("sweep needs sizes and classifiers");
    SweepResult result;
    for (std::size_t size : sizes) {
        std::vector<std::vector<double>> acc(classifiers.size());
        for (int r = 0; r < repeats; ++r) {
            const std::uint64_t seed = split.seed + static_cast<std::uint64_t>(r);
            const FeatureCache sub = subset(cache, balanced_subsample(cache, size, seed));
            SplitSpec s = split;
            s.seed = seed;
            const auto idx = split_indices(sub, s);
            for (std::size_t c = 0; c < classifiers.size(); ++c) {
                ClassifierSpec spec = classifiers[c];
                spec.svm.seed = seed;
                spec.kmeans.seed = seed;
                acc[c].push_back(train_and_evaluate(sub, idx, spec).accuracy);
            }
        }
        for (std::size_t c = 0; c < classifiers.size(); ++c) {
            SweepRow row;
            row.sample_count = size;
            row.classifier = classifier_name(classifiers[c].kind);
            double sum = 0.0;
            for (double a : acc[c]) sum += a;
            row.accuracy = sum / static_cast<double>(acc[c].size());
            row.min_accuracy = *std::min_element(acc[c].begin(), acc[c].end());
            row.max_accuracy = *std::max_element(acc[c].begin(), acc[c].end());
            row.repeats = repeats;
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    out << "samples,classifier,accuracy,min,max,repeats\n";
    for (const auto& row : r.rows)
        out << row.sample_count << ',' << row.classifier << ',' << text::format_real(row.accuracy) << ','
            << text::format_real(row.min_accuracy) << ',' << text::format_real(row.max_accuracy) << ','
            << row.repeats << '\n';
}

// ---------------------------------------------------------------------------
// Frequency-band grid

struct BandCell {
    std::size_t from = 0;
    std::size_t to = 0;
    double accuracy = 0.0;

    bool operator==(const BandCell&) const = default;
};

struct BandGridResult {
    std::vector<std::size_t> breakpoints;
    std::vector<BandCell> cells;  ///< every (from, to) pair of breakpoints with from < to

    const BandCell& cell(std::size_t from, std::size_t to) const {
        for (const auto& c : cells)
            if (c.from == from && c.to == to) return c;
        throw ParameterError("no band cell [" + std::to_string(from) + ", " + std::to_string(to) + ")");
    }
};

/// 0, 100, ..., 600 (those below d), then d.
inline std::vector<std::size_t> default_breakpoints(std::size_t d) {
    std::vector<std::size_t> b;
    for (std::size_t v = 0; v <= 600 && v < d; v += 100) b.push_back(v);
    b.push_back(d);
    return b;
}

/// The default grid rescaled from a 722-bin reference profile onto d bins.
inline std::vector<std::size_t> scaled_breakpoints(std::size_t d, std::size_t reference = 722) {
    std::vector<std::size_t> b;
    for (std::size_t v = 0; v <= 600; v += 100) {
        const auto s = static_cast<std::size_t>(
            std::llround(static_cast<double>(v) * static_cast<double>(d) / static_cast<double>(reference)));
        if (s < d && (b.empty() || s > b.back())) b.push_back(s);
    }
    b.push_back(d);
    return b;
}

inline BandGridResult band_grid(const FeatureCache& cache, const std::vector<std::size_t>& breakpoints,
                                const ClassifierSpec& spec, const SplitSpec& split) {
    if (breakpoints.size() < 2) throw ParameterError("band grid needs at least two breakpoints");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (breakpoints[i] <= breakpoints[i - 1]) throw ParameterError("breakpoints must be strictly increasing");
    if (breakpoints.back() > cache.header.dimension)
        throw ParameterError("breakpoint " + std::to_string(breakpoints.back()) + " exceeds d=" +
                             std::to_string(cache.header.dimension));
    const auto idx = split_indices(cache, split);
    BandGridResult out;
    out.breakpoints = breakpoints;
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        for (std::size_t j = i + 1; j < breakpoints.size(); ++j) {
            const auto band = band_select(cache, breakpoints[i], breakpoints[j]);
            out.cells.push_back({breakpoints[i], breakpoints[j], train_and_evaluate(band, idx, spec).accuracy});
        }
    }
    return out;
}

inline void write_bandgrid_csv(std::ostream& out, const BandGridResult& r) {
    out << "from,to,accuracy\n";
    for (const auto& c : r.cells) out << c.from << ',' << c.to << ',' << text::format_real(c.accuracy) << '\n';
}

// ---------------------------------------------------------------------------
// Per-class statistics

struct ClassStats {
    /// Indexed by label value.
    std::vector<double> mean[2];
    std::vector<double> stddev[2];
    std::size_t count[2] = {0, 0};
};

/// Elementwise mean and population standard deviation per label.
inline ClassStats class_stats(const FeatureCache& cache) {
    const std::size_t d = cache.header.dimension;
    ClassStats s;
    for (int l = 0; l < 2; ++l) {
        s.mean[l].assign(d, 0.0);
        s.stddev[l].assign(d, 0.0);
    }
    for (const auto& r : cache.rows) {
        require_dimension(d, r.features.size());
        const int l = to_int(r.label);
        ++s.count[l];
        for (std::size_t j = 0; j < d; ++j) s.mean[l][j] += r.features[j];
    }
    if (s.count[0] == 0 || s.count[1] == 0) throw ParameterError("class statistics need both labels present");
    for (int l = 0; l < 2; ++l)
        for (auto& v : s.mean[l]) v /= static_cast<double>(s.count[l]);
    for (const auto& r : cache.rows) {
        const int l = to_int(r.label);
        for (std::size_t j = 0; j < d; ++j) {
            const double t = r.features[j] - s.mean[l][j];
            s.stddev[l][j] += t * t;
        }
    }
    for (int l = 0; l < 2; ++l)
        for (auto& v : s.stddev[l]) v = std::sqrt(v / static_cast<double>(s.count[l]));
    return s;
}

inline void write_stats_csv(std::ostream& out, const ClassStats& s) {
    const std::size_t d = s.mean[0].size();
    out << "label,statistic,count";
    for (std::size_t j = 0; j < d; ++j) out << ",b" << j;
    out << '\n';
    for (int l = 0; l < 2; ++l) {
        out << l << ",mean," << s.count[l];
        for (double v : s.mean[l]) out << ',' << text::format_real(v);
        out << '\n' << l << ",std," << s.count[l];
        for (double v : s.stddev[l]) out << ',' << text::format_real(v);
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Per-video aggregation

using GroupLabel = std::pair<std::string, Label>;

/// Majority label per group, ties resolving to real. Output is sorted by
/// group name.
inline std::vector<GroupLabel> video_majority_vote(const std::vector<GroupLabel>& frames) {
    if (frames.empty()) throw ParameterError("majority vote needs at least one frame");
    std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // (fake, real)
    for (const auto& [group, label] : frames) {
        if (group.empty()) throw ParameterError("frame without a group cannot be aggregated");
        auto& t = tally[group];
        (label == Label::real ? t.second : t.first)++;
    }
    std::vector<GroupLabel> out;
    for (const auto& [group, t] : tally) out.emplace_back(group, t.second >= t.first ? Label::real : Label::fake);
    return out;
}

struct VideoRow {
    std::string group;
    Label truth;
    Label predicted;
    std::size_t frames = 0;
    double frame_accuracy = 0.0;
};

struct VideoEvaluation {
    Metrics frame_metrics;
    std::vector<VideoRow> videos;
    double video_accuracy = 0.0;
};

/// Scores a model per frame and per group; a group's true label is the
/// majority of its frames' labels (same tie rule).
inline VideoEvaluation video_evaluate(const Model& model, const FeatureCache& cache) {
    if (cache.rows.empty()) throw ParameterError("no frames to evaluate");
    std::vector<GroupLabel> predicted, truth;
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_group;  // (frames, correct)
    for (const auto& r : cache.rows) {
        if (r.group.empty()) throw ParameterError("frame " + r.path + " has no group");
        const Label p = predict(model, r.features).label;
        predicted.emplace_back(r.group, p);
        truth.emplace_back(r.group, r.label);
        auto& g = per_group[r.group];
        ++g.first;
        if (p == r.label) ++g.second;
    }
    VideoEvaluation out;
    out.frame_metrics = evaluate(model, to_samples(cache));
    const auto votes = video_majority_vote(predicted);
    const auto truths = video_majority_vote(truth);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        const auto& g = per_group[votes[i].first];
        out.videos.push_back({votes[i].first, truths[i].second, votes[i].second, g.first,
                              static_cast<double>(g.second) / static_cast<double>(g.first)});
        if (votes[i].second == truths[i].second) ++correct;
    }
    out.video_accuracy = static_cast<double>(correct) / static_cast<double>(votes.size());
    return out;
}

inline void write_videos_csv(std::ostream& out, const VideoEvaluation& v) {
    out << "group,label,predicted,frames,frame_accuracy\n";
    for (const auto& r : v.videos)
        out << r.group << ',' << to_int(r.truth) << ',' << to_int(r.predicted) << ',' << r.frames << ','
            << text::format_real(r.frame_accuracy) << '\n';
}

} // namespace sfk
