#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sfk/classify/sample.hpp"
#include "sfk/classify/svm.hpp"

namespace sfk {

using Point = std::vector<double>;

struct KMeansConfig {
    std::size_t k = 2;
    std::uint64_t seed = 42;
    int max_iters = 300;
    int restarts = 10;
};

struct KMeansFit {
    std::vector<Point> centroids;
    std::vector<std::size_t> assignment;
    double objective = 0.0;
    /// Per restart: objective after seeding, then after every Lloyd update.
    std::vector<std::vector<double>> traces;
    std::size_t best_restart = 0;
};

struct KMeansModel {
    std::vector<Point> centroids;
    std::vector<Label> cluster_to_label;

    std::size_t dimension() const { return centroids.empty() ? 0 : centroids.front().size(); }
    bool operator==(const KMeansModel&) const = default;
};

inline std::size_t count_distinct(std::span<const Point> points) {
    std::vector<Point> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

/// Index of the nearest centroid; ties go to the lower index.
inline std::size_t nearest_centroid(std::span<const Point> centroids, std::span<const double> x, double* dist = nullptr) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centroids.size(); ++k) {
        const double dk = squared_distance(centroids[k], x);
        if (dk < best_d) {
            best_d = dk;
            best = k;
        }
    }
    if (dist) *dist = best_d;
    return best;
}

/// Sum of squared distances from each point to its nearest centroid.
inline double kmeans_objective(std::span<const Point> points, std::span<const Point> centroids) {
    double j = 0.0;
    for (const auto& p : points) {
        double d = 0.0;
        nearest_centroid(centroids, p, &d);
        j += d;
    }
    return j;
}

namespace detail {

inline std::vector<Point> kmeans_plus_plus(std::span<const Point> points, std::size_t k, std::mt19937_64& rng) {
    std::vector<Point> centroids;
    std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
    centroids.push_back(points[first(rng)]);
    std::vector<double> d2(points.size());
    while (centroids.size() < k) {
        for (std::size_t i = 0; i < points.size(); ++i) nearest_centroid(centroids, points[i], &d2[i]);
        std::discrete_distribution<std::size_t> pick(d2.begin(), d2.end());
        centroids.push_back(points[pick(rng)]);
    }
    return centroids;
}

struct LloydRun {
    std::vector<Point> centroids;
    std::vector<std::size_t> assignment;
    std::vector<double> trace;
};

inline LloydRun lloyd(std::span<const Point> points, std::vector<Point> centroids, int max_iters) {
    const std::size_t n = points.size(), k = centroids.size(), d = points.front().size();
    LloydRun run;
    run.assignment.assign(n, k);
    run.trace.push_back(kmeans_objective(points, centroids));
    for (int it = 0; it < max_iters; ++it) {
        bool changed = false;
        std::vector<double> dist(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = nearest_centroid(centroids, points[i], &dist[i]);
            if (c != run.assignment[i]) {
                run.assignment[i] = c;
                changed = true;
            }
        }
        if (!changed) break;

        std::vector<Point> sums(k, Point(d, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& s = sums[run.assignment[i]];
            for (std::size_t j = 0; j < d; ++j) s[j] += points[i][j];
            ++counts[run.assignment[i]];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c])
                for (std::size_t j = 0; j < d; ++j) centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);

        // Empty clusters restart at the point farthest from its centroid.
        if (std::find(counts.begin(), counts.end(), 0) != counts.end())
            for (std::size_t i = 0; i < n; ++i) dist[i] = squared_distance(points[i], centroids[run.assignment[i]]);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c]) continue;
            const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
            centroids[c] = points[far];
            dist[far] = 0.0;
        }
        run.trace.push_back(kmeans_objective(points, centroids));
    }
    for (std::size_t i = 0; i < n; ++i) run.assignment[i] = nearest_centroid(centroids, points[i]);
    run.centroids = std::move(centroids);
    return run;
}

} // namespace detail

/// Lloyd's algorithm with k-means++ seeding; the best of `restarts` runs by
/// final objective is kept.
inline KMeansFit kmeans_fit(std::span<const Point> points, const KMeansConfig& cfg = {}) {
    if (points.empty()) throw ParameterError("k-means needs at least one point");
    if (cfg.k < 1) throw ParameterError("k must be at least 1");
    if (cfg.restarts < 1) throw ParameterError("restarts must be at least 1");
    if (cfg.max_iters < 1) throw ParameterError("max_iters must be at least 1");
    const std::size_t d = points.front().size();
    for (const auto& p : points) {
        if (p.size() != d || d == 0) throw DimensionError("k-means points have inconsistent dimension");
        for (double v : p)
            if (!std::isfinite(v)) throw ParameterError("non-finite feature value");
    }
    const std::size_t distinct = count_distinct(points);
    if (cfg.k > distinct)
        throw ParameterError("k = " + std::to_string(cfg.k) + " exceeds the " + std::to_string(distinct) +
                             " distinct points");

    std::mt19937_64 rng(cfg.seed);
    KMeansFit best;
    best.objective = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.restarts; ++r) {
        auto run = detail::lloyd(points, detail::kmeans_plus_plus(points, cfg.k, rng), cfg.max_iters);
        const double j = run.trace.back();
        best.traces.push_back(run.trace);
        if (j < best.objective) {
            best.objective = j;
            best.centroids = std::move(run.centroids);
            best.assignment = std::move(run.assignment);
            best.best_restart = static_cast<std::size_t>(r);
        }
    }
    return best;
}

/// Labels each cluster with the majority label of the samples it attracts.
/// Ties resolve to real; clusters attracting nothing take the global
/// majority.
inline KMeansModel kmeans_classifier(std::vector<Point> centroids, std::span<const LabeledSample> labeled) {
    if (labeled.empty()) throw ParameterError("cluster labeling needs at least one labeled sample");
    if (centroids.empty()) throw ParameterError("no centroids to label");
    const std::size_t d = centroids.front().size();
    for (const auto& c : centroids) require_dimension(d, c.size());
    std::vector<std::size_t> votes(centroids.size() * 2, 0);
    std::size_t total[2] = {0, 0};
    for (const auto& s : labeled) {
        require_dimension(d, s.features.size());
        const std::size_t c = nearest_centroid(centroids, s.features);
        ++votes[2 * c + static_cast<std::size_t>(to_int(s.label))];
        ++total[to_int(s.label)];
    }
    const Label global = total[1] >= total[0] ? Label::real : Label::fake;
    KMeansModel model;
    model.cluster_to_label.resize(centroids.size());
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const std::size_t fake = votes[2 * c], real = votes[2 * c + 1];
        if (fake + real == 0)
            model.cluster_to_label[c] = global;
        else
            model.cluster_to_label[c] = real >= fake ? Label::real : Label::fake;
    }
    model.centroids = std::move(centroids);
    return model;
}

inline Label kmeans_predict(const KMeansModel& m, std::span<const double> x, double* dist = nullptr) {
    if (m.centroids.empty()) throw ModelIntegrityError("k-means model has no centroids");
    require_dimension(m.dimension(), x.size());
    return m.cluster_to_label[nearest_centroid(m.centroids, x, dist)];
}

} // namespace sfk
