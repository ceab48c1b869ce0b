#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sfk/sfk.hpp"

namespace sfk::cli {
namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    body(out);
    if (!out) throw IoError("failed writing " + path);
}

std::pair<std::size_t, std::size_t> parse_band(const std::string& s) {
    const auto parts = text::split(s, ':');
    try {
        if (parts.size() == 2) {
            const auto a = text::parse_int(parts[0]), b = text::parse_int(parts[1]);
            if (a >= 0 && b > a) return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
        }
    } catch (const ParseError&) {
    }
    throw UsageError("--band expects 'from:to' with 0 <= from < to, got '" + s + "'");
}

struct ExtractionFlags {
    std::size_t target_len = 0;
    bool no_log = false;
    bool no_norm = false;
    double epsilon = 1e-12;

    void add(CLI::App* app) {
        app->add_option("--target-len", target_len, "Interpolate profiles to this many bins (0 keeps native length)");
        app->add_flag("--no-log", no_log, "Average linear power instead of log(epsilon + power)");
        app->add_flag("--no-norm", no_norm, "Skip division by the DC bin");
        app->add_option("--epsilon", epsilon, "Guard for the log and the degenerate-image test");
    }

    ExtractionConfig config() const {
        ExtractionConfig cfg;
        cfg.target_length = target_len;
        cfg.log_power = !no_log;
        cfg.normalize_dc = !no_norm;
        cfg.epsilon = epsilon;
        if (target_len == 1) throw UsageError("--target-len must be 0 or at least 2");
        if (!(epsilon > 0.0)) throw UsageError("--epsilon must be positive");
        return cfg;
    }
};

struct ClassifierFlags {
    double c = 1.0;
    std::string gamma = "auto";
    double lr_rate = 0.1;
    int iters = 0;
    std::size_t k = 2;
    int restarts = 10;
    CLI::Option* c_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* lr_opt = nullptr;
    CLI::Option* iters_opt = nullptr;
    CLI::Option* k_opt = nullptr;
    CLI::Option* restarts_opt = nullptr;

    void add(CLI::App* app) {
        c_opt = app->add_option("--c", c, "SVM penalty C (svm only)");
        gamma_opt = app->add_option("--gamma", gamma, "SVM RBF width, or 'auto' for 1/d (svm only)");
        lr_opt = app->add_option("--lr-rate", lr_rate, "Logistic regression learning rate (lr only)");
        iters_opt = app->add_option("--iters", iters,
                                    "Maximum iterations (lr only: default 10000; kmeans only: default 300)")
                        ->default_str("10000 (lr) / 300 (kmeans)");
        k_opt = app->add_option("--k", k, "Number of k-means clusters (kmeans only)");
        restarts_opt = app->add_option("--restarts", restarts, "k-means restarts (kmeans only)");
    }

    void check(const std::vector<ClassifierKind>& kinds) const {
        auto has = [&](ClassifierKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
        if ((c_opt->count() || gamma_opt->count()) && !has(ClassifierKind::svm))
            throw UsageError("--c and --gamma only apply to the svm classifier");
        if (lr_opt->count() && !has(ClassifierKind::logistic))
            throw UsageError("--lr-rate only applies to the lr classifier");
        if ((k_opt->count() || restarts_opt->count()) && !has(ClassifierKind::kmeans))
            throw UsageError("--k and --restarts only apply to the kmeans classifier");
        if (iters_opt->count() && !has(ClassifierKind::logistic) && !has(ClassifierKind::kmeans))
            throw UsageError("--iters only applies to the lr and kmeans classifiers");
        if (!(c > 0.0)) throw UsageError("--c must be positive");
        if (!(lr_rate > 0.0)) throw UsageError("--lr-rate must be positive");
        if (k < 2) throw UsageError("--k must be at least 2");
        if (restarts < 1) throw UsageError("--restarts must be at least 1");
        if (iters_opt->count() && iters < 1) throw UsageError("--iters must be at least 1");
        if (gamma != "auto") {
            double g = 0.0;
            try {
                g = text::parse_real(gamma);
            } catch (const ParseError&) {
                throw UsageError("--gamma expects a positive number or 'auto'");
            }
            if (!(g > 0.0)) throw UsageError("--gamma must be positive");
        }
    }

    ClassifierSpec spec(ClassifierKind kind, std::uint64_t seed) const {
        ClassifierSpec s;
        s.kind = kind;
        s.svm.c = c;
        s.svm.gamma = gamma == "auto" ? 0.0 : text::parse_real(gamma);
        s.svm.seed = seed;
        s.logistic.learning_rate = lr_rate;
        if (iters_opt->count()) {
            s.logistic.max_iters = iters;
            s.kmeans.max_iters = iters;
        }
        s.kmeans.k = k;
        s.kmeans.restarts = restarts;
        s.kmeans.seed = seed;
        return s;
    }
};

std::vector<ClassifierKind> parse_classifiers(const std::vector<std::string>& names) {
    std::vector<ClassifierKind> out;
    for (const auto& n : names) {
        try {
            out.push_back(parse_classifier(n));
        } catch (const ParameterError& e) {
            throw UsageError(e.what());
        }
    }
    if (out.empty()) throw UsageError("no classifier given");
    return out;
}

struct SplitFlags {
    double test_frac = 0.2;
    bool all = false;
    bool no_group_split = false;

    void add(CLI::App* app, bool allow_all) {
        app->add_option("--test-frac", test_frac, "Fraction of the data held out for testing");
        if (allow_all) app->add_flag("--all", all, "Use every cache row instead of one side of the split");
        app->add_flag("--no-group-split", no_group_split, "Allow rows of one group on both sides of the split");
    }

    SplitSpec spec(std::uint64_t seed) const {
        if (!(test_frac > 0.0 && test_frac < 1.0)) throw UsageError("--test-frac must lie strictly between 0 and 1");
        SplitSpec s;
        s.test_fraction = test_frac;
        s.seed = seed;
        s.group_aware = !no_group_split;
        return s;
    }
};

FeatureCache load_banded(const std::string& path, const std::string& band) {
    std::optional<std::pair<std::size_t, std::size_t>> range;
    if (!band.empty()) range = parse_band(band);
    FeatureCache cache = load_cache(path);
    if (range) cache = band_select(cache, range->first, range->second);
    return cache;
}

// Train side, test side or everything, depending on the flags.
FeatureCache pick_rows(const FeatureCache& cache, const SplitFlags& flags, std::uint64_t seed, bool test_side) {
    if (flags.all) return cache;
    const auto idx = split_indices(cache, flags.spec(seed));
    return subset(cache, test_side ? idx.test : idx.train);
}

std::string format_accuracy(double a) { return text::format_real(a); }

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral-feature detector for GAN-generated face images", "sfk"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    std::uint64_t seed = 42;
    auto add_seed = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Seed for every random choice (env SFK_SEED)")->envname("SFK_SEED");
    };

    std::function<void()> action;

    // synth-generate
    SynthConfig synth;
    std::string synth_dir;
    auto* gen = app.add_subcommand("synth-generate", "Write a synthetic real/fake corpus and its manifest");
    gen->add_option("--out-dir", synth_dir, "Output directory for PNG files and manifest.csv")->required();
    gen->add_option("--count", synth.count_per_class, "Images per class");
    gen->add_option("--size", synth.image_size, "Image side length in pixels");
    gen->add_option("--exponent", synth.exponent, "Spectral exponent p of the 1/f^p noise");
    gen->add_option("--cutoff", synth.cutoff, "Low-pass cutoff of fake images as a fraction of the corner frequency");
    add_seed(gen);
    gen->callback([&] {
        action = [&] {
            synth.seed = seed;
            const auto m = generate_synthetic(synth, synth_dir);
            err << "synth-generate: wrote " << m.entries.size() << " images to " << synth_dir << '\n';
        };
    });

    // extract
    std::string manifest_path, cache_out;
    ExtractionFlags xflags;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* ext = app.add_subcommand("extract", "Extract spectral profiles for a manifest into a feature cache");
    ext->add_option("--manifest", manifest_path, "Manifest CSV (path,label[,group])")->required();
    ext->add_option("--out", cache_out, "Feature cache CSV to write")->required();
    xflags.add(ext);
    ext->add_option("--jobs", jobs, "Images processed in parallel");
    add_seed(ext);
    ext->callback([&] {
        action = [&] {
            const auto cfg = xflags.config();
            if (jobs < 1) throw UsageError("--jobs must be at least 1");
            const auto manifest = load_manifest(manifest_path);
            const auto base = std::filesystem::path(manifest_path).parent_path();
            const auto build = write_cache(manifest, cfg, cache_out, base, jobs, seed);
            for (const auto& f : build.failures) err << "extract: skipped " << f.path << ": " << f.message << '\n';
            err << "extract: " << build.cache.rows.size() << " profiles (d=" << build.cache.header.dimension << "), "
                << build.failures.size() << " failures -> " << cache_out << '\n';
            if (build.cache.rows.empty()) throw Error("no image could be processed");
        };
    });

    // train
    std::string cache_path, model_path, classifier = "svm", band;
    ClassifierFlags cflags;
    SplitFlags sflags;
    auto* trn = app.add_subcommand("train", "Train a classifier on the train side of a cache");
    trn->add_option("--cache", cache_path, "Feature cache CSV")->required();
    trn->add_option("--model", model_path, "Model file to write")->required();
    trn->add_option("--classifier", classifier, "lr, svm or kmeans");
    cflags.add(trn);
    sflags.add(trn, true);
    trn->add_option("--band", band, "Keep native bins from:to before training");
    add_seed(trn);
    trn->callback([&] {
        action = [&] {
            const auto kinds = parse_classifiers({classifier});
            cflags.check(kinds);
            const auto cache = load_banded(cache_path, band);
            const auto rows = pick_rows(cache, sflags, seed, false);
            const Model model = train(cflags.spec(kinds.front(), seed), to_samples(rows));
            save_model(model_path, model);
            err << "train: " << classifier << " on " << rows.rows.size() << " samples (d=" << model_dimension(model)
                << ") -> " << model_path << '\n';
        };
    });

    // evaluate
    std::string confusion_out;
    SplitFlags eflags;
    auto* evl = app.add_subcommand("evaluate", "Score a model on the test side of a cache");
    evl->add_option("--cache", cache_path, "Feature cache CSV")->required();
    evl->add_option("--model", model_path, "Model file")->required();
    evl->add_option("--out", confusion_out, "Confusion matrix CSV to write");
    eflags.add(evl, true);
    evl->add_option("--band", band, "Keep native bins from:to (must match training)");
    add_seed(evl);
    evl->callback([&] {
        action = [&] {
            const auto cache = load_banded(cache_path, band);
            const auto rows = pick_rows(cache, eflags, seed, true);
            const Model model = load_model(model_path);
            const Metrics m = evaluate(model, to_samples(rows));
            out << "accuracy=" << format_accuracy(m.accuracy) << '\n';
            if (!confusion_out.empty()) {
                write_file(confusion_out, [&](std::ostream& o) {
                    o << "truth,predicted,count\n";
                    for (int t = 0; t < 2; ++t)
                        for (int p = 0; p < 2; ++p) o << t << ',' << p << ',' << m.confusion[t][p] << '\n';
                });
            }
            err << "evaluate: " << m.total << " samples\n";
        };
    });

    // predict
    std::string image_path;
    ExtractionFlags pflags;
    auto* prd = app.add_subcommand("predict", "Classify one image");
    prd->add_option("--model", model_path, "Model file")->required();
    prd->add_option("--image", image_path, "PNG or JPEG image")->required();
    pflags.add(prd);
    prd->add_option("--band", band, "Keep native bins from:to (must match training)");
    prd->callback([&] {
        action = [&] {
            const Model model = load_model(model_path);
            FeatureCache one;
            one.header.config = pflags.config();
            auto profile = extract_features(read_image(image_path), one.header.config);
            one.header.dimension = profile.size();
            one.rows.push_back({image_path, "", Label::fake, std::move(profile.bins)});
            if (!band.empty()) {
                const auto [a, b] = parse_band(band);
                one = band_select(one, a, b);
            }
            const auto p = predict(model, one.rows.front().features);
            out << image_path << ' ' << label_name(p.label) << ' ' << text::format_real(p.score) << '\n';
        };
    });

    // sweep
    std::vector<std::size_t> sizes{20, 100, 1000};
    std::vector<std::string> classifiers{"svm", "lr", "kmeans"};
    std::string result_out;
    int repeats = 1;
    ClassifierFlags swflags;
    SplitFlags swsplit;
    auto* swp = app.add_subcommand("sweep", "Accuracy versus training-set size");
    swp->add_option("--cache", cache_path, "Feature cache CSV")->required();
    swp->add_option("--sizes", sizes, "Total sample counts (balanced across classes)")->delimiter(',');
    swp->add_option("--classifier", classifiers, "Classifiers to compare")->delimiter(',');
    swp->add_option("--repeats", repeats, "Reseeded runs averaged per size");
    swp->add_option("--out", result_out, "sweep.csv to write")->required();
    swflags.add(swp);
    swsplit.add(swp, false);
    swp->add_option("--band", band, "Keep native bins from:to");
    add_seed(swp);
    swp->callback([&] {
        action = [&] {
            const auto kinds = parse_classifiers(classifiers);
            swflags.check(kinds);
            if (repeats < 1) throw UsageError("--repeats must be at least 1");
            const auto cache = load_banded(cache_path, band);
            std::vector<ClassifierSpec> specs;
            for (auto k : kinds) specs.push_back(swflags.spec(k, seed));
            const auto result = sample_size_sweep(cache, sizes, specs, swsplit.spec(seed), repeats);
            write_file(result_out, [&](std::ostream& o) { write_sweep_csv(o, result); });
            for (const auto& r : result.rows)
                err << "sweep: n=" << r.sample_count << ' ' << r.classifier << " accuracy=" << r.accuracy << '\n';
        };
    });

    // bands
    std::string breakpoints;
    ClassifierFlags bflags;
    SplitFlags bsplit;
    std::string band_classifier = "svm";
    auto* bnd = app.add_subcommand("bands", "Accuracy for every frequency band between breakpoints");
    bnd->add_option("--cache", cache_path, "Feature cache CSV (native bins)")->required();
    bnd->add_option("--breakpoints", breakpoints,
                    "Comma-separated bin indices, or 'scaled' to map 0,100,...,600,d onto the cache's d")
        ->default_str("0,100,...,600,d");
    bnd->add_option("--classifier", band_classifier, "lr, svm or kmeans");
    bnd->add_option("--out", result_out, "bandgrid.csv to write")->required();
    bflags.add(bnd);
    bsplit.add(bnd, false);
    add_seed(bnd);
    bnd->callback([&] {
        action = [&] {
            const auto kinds = parse_classifiers({band_classifier});
            bflags.check(kinds);
            const auto cache = load_cache(cache_path);
            const std::size_t d = cache.header.dimension;
            std::vector<std::size_t> points;
            if (breakpoints.empty()) {
                points = default_breakpoints(d);
            } else if (breakpoints == "scaled") {
                points = scaled_breakpoints(d);
            } else {
                for (const auto& t : text::split(breakpoints)) {
                    long long v = 0;
                    try {
                        v = text::parse_int(t);
                    } catch (const ParseError&) {
                        throw UsageError("--breakpoints expects comma-separated integers or 'scaled'");
                    }
                    if (v < 0) throw UsageError("breakpoints must be non-negative");
                    points.push_back(static_cast<std::size_t>(v));
                }
            }
            const auto grid = band_grid(cache, points, bflags.spec(kinds.front(), seed), bsplit.spec(seed));
            write_file(result_out, [&](std::ostream& o) { write_bandgrid_csv(o, grid); });
            err << "bands: " << grid.cells.size() << " cells -> " << result_out << '\n';
        };
    });

    // stats
    auto* sts = app.add_subcommand("stats", "Per-class mean and standard deviation profiles");
    sts->add_option("--cache", cache_path, "Feature cache CSV")->required();
    sts->add_option("--out", result_out, "stats.csv to write")->required();
    sts->add_option("--band", band, "Keep native bins from:to");
    sts->callback([&] {
        action = [&] {
            const auto stats = class_stats(load_banded(cache_path, band));
            write_file(result_out, [&](std::ostream& o) { write_stats_csv(o, stats); });
            err << "stats: " << stats.count[0] << " fake, " << stats.count[1] << " real -> " << result_out << '\n';
        };
    });

    // video-eval
    SplitFlags vflags;
    auto* vid = app.add_subcommand("video-eval", "Per-frame and per-video (majority vote) accuracy");
    vid->add_option("--cache", cache_path, "Feature cache CSV whose rows carry groups")->required();
    vid->add_option("--model", model_path, "Model file")->required();
    vid->add_option("--out", result_out, "videos.csv to write")->required();
    vflags.add(vid, true);
    vid->add_option("--band", band, "Keep native bins from:to (must match training)");
    add_seed(vid);
    vid->callback([&] {
        action = [&] {
            const auto cache = load_banded(cache_path, band);
            const auto rows = pick_rows(cache, vflags, seed, true);
            const auto result = video_evaluate(load_model(model_path), rows);
            write_file(result_out, [&](std::ostream& o) { write_videos_csv(o, result); });
            out << "frame_accuracy=" << format_accuracy(result.frame_metrics.accuracy) << '\n';
            out << "video_accuracy=" << format_accuracy(result.video_accuracy) << '\n';
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (action) action();
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace sfk::cli
