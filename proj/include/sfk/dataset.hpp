#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sfk/classify/sample.hpp"
#include "sfk/error.hpp"
#include "sfk/image_io.hpp"
#include "sfk/spectrum.hpp"
#include "sfk/text.hpp"

namespace sfk {

// ---------------------------------------------------------------------------
// Manifest

struct ManifestEntry {
    std::string path;
    Label label = Label::fake;
    std::string group;  ///< empty when the sample is not part of a video/source

    bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    bool operator==(const DatasetManifest&) const = default;
};

inline void validate(const DatasetManifest& m) {
    std::set<std::string> seen;
    for (const auto& e : m.entries) {
        if (e.path.empty()) throw ParseError("manifest entry with empty path");
        if (!seen.insert(e.path).second) throw ParseError("duplicate path in manifest: " + e.path);
    }
}

/// Parses `path,label[,group]` CSV with a header row.
inline DatasetManifest parse_manifest(std::istream& in, const std::string& source = "manifest") {
    std::string line;
    int lineno = 0;
    bool has_group = false;
    bool have_header = false;
    DatasetManifest m;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        auto fields = text::split(line);
        for (auto& f : fields) f = text::trim(f);
        if (!have_header) {
            if (fields.size() == 2 && fields[0] == "path" && fields[1] == "label") {
                has_group = false;
            } else if (fields.size() == 3 && fields[0] == "path" && fields[1] == "label" && fields[2] == "group") {
                has_group = true;
            } else {
                throw ParseError(source + ":" + std::to_string(lineno) + ": expected header 'path,label[,group]'");
            }
            have_header = true;
            continue;
        }
        const std::size_t max_fields = has_group ? 3 : 2;
        if (fields.size() < 2 || fields.size() > max_fields)
            throw ParseError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(max_fields) +
                             " fields, got " + std::to_string(fields.size()));
        ManifestEntry e;
        e.path = fields[0];
        if (e.path.empty()) throw ParseError(source + ":" + std::to_string(lineno) + ": empty path");
        try {
            e.label = label_from_int(text::parse_int(fields[1]));
        } catch (const ParseError& err) {
            throw ParseError(source + ":" + std::to_string(lineno) + ": " + err.what());
        }
        if (fields.size() == 3) e.group = fields[2];
        m.entries.push_back(std::move(e));
    }
    if (!have_header) throw ParseError(source + ": empty manifest");
    validate(m);
    return m;
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    return parse_manifest(in, path.string());
}

inline void write_manifest(std::ostream& out, const DatasetManifest& m) {
    out << "path,label,group\n";
    for (const auto& e : m.entries) out << e.path << ',' << to_int(e.label) << ',' << e.group << '\n';
}

inline void save_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest " + path.string());
    write_manifest(out, m);
}

// ---------------------------------------------------------------------------
// Splitting

struct SplitSpec {
    double test_fraction = 0.2;
    std::uint64_t seed = 42;
    bool stratified = true;
    bool group_aware = true;  ///< keep all rows of one group on the same side
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Seeded partition of row indices. Rows sharing a non-empty group form one
/// unit; units are shuffled (per class when stratified) and round(f * n)
/// of them, clamped to [1, n - 1], go to the test side. Both sides keep
/// the original row order.
inline SplitIndices split_indices(std::span<const Label> labels, std::span<const std::string> groups,
                                  const SplitSpec& spec) {
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
        throw ParameterError("test fraction must lie strictly between 0 and 1");
    if (labels.size() != groups.size()) throw DimensionError("labels and groups differ in length");

    std::vector<std::vector<std::size_t>> units;
    std::map<std::string, std::size_t> unit_of_group;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (spec.group_aware && !groups[i].empty()) {
            auto [it, fresh] = unit_of_group.try_emplace(groups[i], units.size());
            if (fresh) units.emplace_back();
            units[it->second].push_back(i);
        } else {
            units.push_back({i});
        }
    }

    std::mt19937_64 rng(spec.seed);
    std::vector<bool> in_test(labels.size(), false);
    auto take = [&](std::vector<std::size_t> pool, const std::string& what) {
        if (pool.size() < 2) throw ParameterError(what + " is too small to split (needs at least 2 units)");
        std::shuffle(pool.begin(), pool.end(), rng);
        auto n_test = static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(pool.size())));
        n_test = std::clamp<std::size_t>(n_test, 1, pool.size() - 1);
        for (std::size_t u = 0; u < n_test; ++u)
            for (std::size_t row : units[pool[u]]) in_test[row] = true;
    };

    if (spec.stratified) {
        std::vector<std::size_t> per_class[2];
        for (std::size_t u = 0; u < units.size(); ++u) {
            const Label l = labels[units[u].front()];
            for (std::size_t row : units[u])
                if (labels[row] != l)
                    throw ParameterError("group '" + groups[row] + "' mixes labels; cannot stratify");
            per_class[to_int(l)].push_back(u);
        }
        take(per_class[0], "class 0 (fake)");
        take(per_class[1], "class 1 (real)");
    } else {
        std::vector<std::size_t> all(units.size());
        for (std::size_t u = 0; u < all.size(); ++u) all[u] = u;
        take(all, "data set");
    }

    SplitIndices out;
    for (std::size_t i = 0; i < labels.size(); ++i) (in_test[i] ? out.test : out.train).push_back(i);
    return out;
}

inline std::pair<DatasetManifest, DatasetManifest> split(const DatasetManifest& m, const SplitSpec& spec) {
    std::vector<Label> labels;
    std::vector<std::string> groups;
    for (const auto& e : m.entries) {
        labels.push_back(e.label);
        groups.push_back(e.group);
    }
    const auto idx = split_indices(labels, groups, spec);
    std::pair<DatasetManifest, DatasetManifest> out;
    for (std::size_t i : idx.train) out.first.entries.push_back(m.entries[i]);
    for (std::size_t i : idx.test) out.second.entries.push_back(m.entries[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Feature cache

struct CacheHeader {
    ExtractionConfig config;
    std::size_t dimension = 0;
    std::uint64_t seed = 0;
    /// Native-bin range [band_from, band_to) kept by band_select, if any.
    std::optional<std::pair<std::size_t, std::size_t>> band;

    bool operator==(const CacheHeader&) const = default;
};

struct CacheRow {
    std::string path;
    std::string group;
    Label label = Label::fake;
    std::vector<double> features;

    bool operator==(const CacheRow&) const = default;
};

struct FeatureCache {
    CacheHeader header;
    std::vector<CacheRow> rows;

    bool operator==(const FeatureCache&) const = default;
};

inline std::vector<LabeledSample> to_samples(const FeatureCache& cache) {
    std::vector<LabeledSample> out;
    out.reserve(cache.rows.size());
    for (const auto& r : cache.rows) out.push_back({r.features, r.label});
    return out;
}

inline FeatureCache subset(const FeatureCache& cache, std::span<const std::size_t> rows) {
    FeatureCache out{cache.header, {}};
    out.rows.reserve(rows.size());
    for (std::size_t i : rows) out.rows.push_back(cache.rows.at(i));
    return out;
}

inline SplitIndices split_indices(const FeatureCache& cache, const SplitSpec& spec) {
    std::vector<Label> labels;
    std::vector<std::string> groups;
    for (const auto& r : cache.rows) {
        labels.push_back(r.label);
        groups.push_back(r.group);
    }
    return split_indices(labels, groups, spec);
}

inline void write_cache(std::ostream& out, const FeatureCache& cache) {
    const auto& h = cache.header;
    out << "# sfk feature cache v1\n";
    out << "# d=" << h.dimension << ", log=" << (h.config.log_power ? 1 : 0)
        << ", norm=" << (h.config.normalize_dc ? 1 : 0) << ", target_len=" << h.config.target_length
        << ", epsilon=" << text::format_real(h.config.epsilon) << ", seed=" << h.seed << ", band=";
    if (h.band)
        out << h.band->first << ':' << h.band->second;
    else
        out << "full";
    out << '\n';
    out << "path,group,label";
    for (std::size_t i = 0; i < h.dimension; ++i) out << ",b" << i;
    out << '\n';
    for (const auto& r : cache.rows) {
        if (r.features.size() != h.dimension) throw DimensionError("cache row " + r.path + " has wrong dimension");
        if (r.path.find(',') != std::string::npos || r.group.find(',') != std::string::npos)
            throw ParameterError("paths and groups may not contain commas: " + r.path);
        out << r.path << ',' << r.group << ',' << to_int(r.label);
        for (double v : r.features) out << ',' << text::format_real(v);
        out << '\n';
    }
}

inline void save_cache(const std::filesystem::path& path, const FeatureCache& cache) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write cache " + path.string());
    write_cache(out, cache);
    if (!out) throw IoError("failed writing cache " + path.string());
}

namespace detail {

inline CacheHeader parse_cache_header(const std::string& line, const std::string& source) {
    std::string body = line.substr(1);
    CacheHeader h;
    bool have_d = false;
    for (auto& item : text::split(body, ',')) {
        const std::string kv = text::trim(item);
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ParseError(source + ": malformed cache header item '" + kv + "'");
        const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "d") {
            h.dimension = static_cast<std::size_t>(text::parse_int(val));
            have_d = true;
        } else if (key == "log") {
            h.config.log_power = text::parse_int(val) != 0;
        } else if (key == "norm") {
            h.config.normalize_dc = text::parse_int(val) != 0;
        } else if (key == "target_len") {
            h.config.target_length = static_cast<std::size_t>(text::parse_int(val));
        } else if (key == "epsilon") {
            h.config.epsilon = text::parse_real(val);
        } else if (key == "seed") {
            h.seed = static_cast<std::uint64_t>(text::parse_int(val));
        } else if (key == "band") {
            if (val != "full") {
                const auto parts = text::split(val, ':');
                if (parts.size() != 2) throw ParseError(source + ": malformed band '" + val + "'");
                h.band = std::pair{static_cast<std::size_t>(text::parse_int(parts[0])),
                                   static_cast<std::size_t>(text::parse_int(parts[1]))};
            }
        } else {
            throw ParseError(source + ": unknown cache header key '" + key + "'");
        }
    }
    if (!have_d) throw ParseError(source + ": cache header lacks d=");
    return h;
}

} // namespace detail

/// Reads a cache; when `expected_dimension` is given, a different header
/// dimension is a DimensionError.
inline FeatureCache read_cache(std::istream& in, const std::string& source = "cache",
                               std::optional<std::size_t> expected_dimension = std::nullopt) {
    FeatureCache cache;
    bool have_config = false, have_columns = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        if (line[0] == '#') {
            if (line.find("d=") != std::string::npos) {
                cache.header = detail::parse_cache_header(line, where);
                have_config = true;
            }
            continue;
        }
        if (!have_config) throw ParseError(where + ": cache lacks its '# d=...' header");
        if (!have_columns) {
            const auto cols = text::split(line);
            if (cols.size() != cache.header.dimension + 3 || cols[0] != "path" || cols[1] != "group" ||
                cols[2] != "label")
                throw DimensionError(where + ": column header does not match d=" +
                                     std::to_string(cache.header.dimension));
            have_columns = true;
            if (expected_dimension && *expected_dimension != cache.header.dimension)
                throw DimensionError(source + ": cache has d=" + std::to_string(cache.header.dimension) +
                                     " but " + std::to_string(*expected_dimension) + " features were expected");
            continue;
        }
        const auto fields = text::split(line);
        if (fields.size() != cache.header.dimension + 3)
            throw DimensionError(where + ": row has " + std::to_string(fields.size() - 3) + " features, expected " +
                                 std::to_string(cache.header.dimension));
        CacheRow row;
        row.path = fields[0];
        row.group = fields[1];
        try {
            row.label = label_from_int(text::parse_int(fields[2]));
            row.features.reserve(cache.header.dimension);
            for (std::size_t i = 3; i < fields.size(); ++i) row.features.push_back(text::parse_real(fields[i]));
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
        cache.rows.push_back(std::move(row));
    }
    if (!have_config || !have_columns) throw ParseError(source + ": incomplete cache file");
    return cache;
}

inline FeatureCache load_cache(const std::filesystem::path& path,
                               std::optional<std::size_t> expected_dimension = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open cache " + path.string());
    return read_cache(in, path.string(), expected_dimension);
}

struct ExtractionFailure {
    std::string path;
    std::string message;
};

struct CacheBuild {
    FeatureCache cache;
    std::vector<ExtractionFailure> failures;
};

/// Extracts features for every manifest entry, `jobs` images at a time.
/// Relative paths resolve against `base_dir`. Undecodable or degenerate
/// images are reported and skipped; rows keep manifest order.
inline CacheBuild build_cache(const DatasetManifest& manifest, const ExtractionConfig& cfg,
                              const std::filesystem::path& base_dir = {}, unsigned jobs = 1,
                              std::uint64_t seed = 0) {
    validate(cfg);
    const std::size_t n = manifest.entries.size();
    std::vector<std::optional<SpectralProfile>> profiles(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const auto& e = manifest.entries[i];
            std::filesystem::path p(e.path);
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            try {
                profiles[i] = extract_features(read_image(p), cfg);
            } catch (const std::exception& ex) {
                errors[i] = ex.what();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }

    CacheBuild out;
    out.cache.header.config = cfg;
    out.cache.header.seed = seed;
    bool have_dim = false;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = manifest.entries[i];
        if (!profiles[i]) {
            out.failures.push_back({e.path, errors[i]});
            continue;
        }
        if (!have_dim) {
            out.cache.header.dimension = profiles[i]->size();
            have_dim = true;
        } else if (profiles[i]->size() != out.cache.header.dimension) {
            out.failures.push_back({e.path, "profile length " + std::to_string(profiles[i]->size()) +
                                                " differs from " + std::to_string(out.cache.header.dimension) +
                                                "; set a target length for mixed image sizes"});
            continue;
        }
        out.cache.rows.push_back({e.path, e.group, e.label, std::move(profiles[i]->bins)});
    }
    return out;
}

/// build_cache followed by save_cache.
inline CacheBuild write_cache(const DatasetManifest& manifest, const ExtractionConfig& cfg,
                              const std::filesystem::path& out_path, const std::filesystem::path& base_dir = {},
                              unsigned jobs = 1, std::uint64_t seed = 0) {
    auto build = build_cache(manifest, cfg, base_dir, jobs, seed);
    save_cache(out_path, build.cache);
    return build;
}

/// Keeps the half-open bin range [from, to). Bins are native radial bins,
/// so interpolated caches are rejected.
inline FeatureCache band_select(const FeatureCache& cache, std::size_t from, std::size_t to) {
    const std::size_t d = cache.header.dimension;
    if (!(from < to && to <= d))
        throw ParameterError("band [" + std::to_string(from) + ", " + std::to_string(to) +
                             ") is empty, inverted or exceeds d=" + std::to_string(d));
    if (cache.header.config.target_length != 0)
        throw ParameterError("band selection needs native bins; this cache was interpolated to " +
                             std::to_string(cache.header.config.target_length));
    if (from == 0 && to == d) return cache;
    FeatureCache out;
    out.header = cache.header;
    out.header.dimension = to - from;
    const std::size_t offset = cache.header.band ? cache.header.band->first : 0;
    out.header.band = std::pair{offset + from, offset + to};
    out.rows.reserve(cache.rows.size());
    for (const auto& r : cache.rows) {
        if (r.features.size() != d) throw DimensionError("cache row " + r.path + " has wrong dimension");
        out.rows.push_back({r.path, r.group, r.label,
                            std::vector<double>(r.features.begin() + static_cast<std::ptrdiff_t>(from),
                                                r.features.begin() + static_cast<std::ptrdiff_t>(to))});
    }
    return out;
}

} // namespace sfk
