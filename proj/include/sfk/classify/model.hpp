#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "sfk/classify/kmeans.hpp"
#include "sfk/classify/logistic.hpp"
#include "sfk/classify/metrics.hpp"
#include "sfk/classify/svm.hpp"
#include "sfk/text.hpp"

namespace sfk {

using Model = std::variant<LogisticModel, SvmModel, KMeansModel>;

enum class ClassifierKind { logistic, svm, kmeans };

inline const char* classifier_name(ClassifierKind k) {
    switch (k) {
    case ClassifierKind::logistic: return "lr";
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::kmeans: return "kmeans";
    }
    return "?";
}

inline ClassifierKind parse_classifier(const std::string& name) {
    if (name == "lr") return ClassifierKind::logistic;
    if (name == "svm") return ClassifierKind::svm;
    if (name == "kmeans") return ClassifierKind::kmeans;
    throw ParameterError("unknown classifier '" + name + "' (expected lr, svm or kmeans)");
}

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::svm;
    LogisticTrainConfig logistic;
    SvmTrainConfig svm;
    KMeansConfig kmeans;
};

/// Trains the configured classifier. K-means clusters the features without
/// labels, then uses the same samples' labels to name the clusters.
inline Model train(const ClassifierSpec& spec, std::span<const LabeledSample> samples) {
    switch (spec.kind) {
    case ClassifierKind::logistic: return lr_train(samples, spec.logistic);
    case ClassifierKind::svm: return svm_train(samples, spec.svm);
    case ClassifierKind::kmeans: {
        checked_dimension(samples);
        std::vector<Point> points;
        points.reserve(samples.size());
        for (const auto& s : samples) points.push_back(s.features);
        auto fit = kmeans_fit(points, spec.kmeans);
        return kmeans_classifier(std::move(fit.centroids), samples);
    }
    }
    throw ParameterError("unknown classifier");
}

struct Prediction {
    Label label;
    /// Probability (lr), decision value (svm) or squared distance to the
    /// nearest centroid (kmeans).
    double score;
};

inline Prediction predict(const Model& model, std::span<const double> x) {
    struct Visitor {
        std::span<const double> x;
        Prediction operator()(const LogisticModel& m) const {
            const auto p = lr_predict(m, x);
            return {p.label, p.probability};
        }
        Prediction operator()(const SvmModel& m) const {
            const double f = svm_decision(m, x);
            return {f >= 0.0 ? Label::real : Label::fake, f};
        }
        Prediction operator()(const KMeansModel& m) const {
            double d = 0.0;
            const Label l = kmeans_predict(m, x, &d);
            return {l, d};
        }
    };
    return std::visit(Visitor{x}, model);
}

inline std::size_t model_dimension(const Model& model) {
    return std::visit([](const auto& m) { return m.dimension(); }, model);
}

inline Metrics evaluate(const Model& model, std::span<const LabeledSample> test) {
    return evaluate([&](std::span<const double> x) { return predict(model, x).label; }, test);
}

// ---------------------------------------------------------------------------
// Model files: line-oriented text, first line "<kind> <version>".

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline void write_reals(std::ostream& out, std::span<const double> v) {
    for (double x : v) out << ' ' << text::format_real(x);
}

inline std::vector<double> parse_reals(const std::vector<std::string>& tokens, std::size_t from) {
    std::vector<double> out;
    for (std::size_t i = from; i < tokens.size(); ++i) {
        const double v = text::parse_real(tokens[i]);
        if (!std::isfinite(v)) throw ModelIntegrityError("model file contains a non-finite value");
        out.push_back(v);
    }
    return out;
}

inline std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> t;
    for (std::string s; in >> s;) t.push_back(s);
    return t;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}
    // Next non-blank line split into tokens; empty at end of input.
    std::vector<std::string> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++number_;
            auto t = tokens_of(line);
            if (!t.empty()) return t;
        }
        return {};
    }
    std::vector<std::string> expect(const char* what) {
        auto t = next();
        if (t.empty()) throw ModelIntegrityError(std::string("model file ends before ") + what);
        return t;
    }
    int line() const { return number_; }

private:
    std::istream& in_;
    int number_ = 0;
};

} // namespace detail

inline void save_model(std::ostream& out, const Model& model) {
    struct Writer {
        std::ostream& out;
        void operator()(const LogisticModel& m) const {
            out << "logistic " << kModelFormatVersion << '\n';
            out << "w " << m.weights.size();
            detail::write_reals(out, m.weights);
            out << "\nb " << text::format_real(m.bias) << '\n';
        }
        void operator()(const SvmModel& m) const {
            validate_model(m);
            out << "svm " << kModelFormatVersion << '\n';
            out << "gamma " << text::format_real(m.gamma) << '\n';
            out << "b " << text::format_real(m.bias) << '\n';
            for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
                out << text::format_real(m.dual_coeffs[i]);
                detail::write_reals(out, m.support_vectors[i]);
                out << '\n';
            }
        }
        void operator()(const KMeansModel& m) const {
            out << "kmeans " << kModelFormatVersion << '\n';
            out << m.centroids.size() << ' ' << m.dimension() << '\n';
            for (const auto& c : m.centroids) {
                for (std::size_t j = 0; j < c.size(); ++j) out << (j ? " " : "") << text::format_real(c[j]);
                out << '\n';
            }
            for (std::size_t c = 0; c < m.cluster_to_label.size(); ++c)
                out << "map " << c << ' ' << to_int(m.cluster_to_label[c]) << '\n';
        }
    };
    std::visit(Writer{out}, model);
}

inline Model load_model(std::istream& in) {
    detail::LineReader reader(in);
    const auto header = reader.expect("its header");
    if (header.size() != 2) throw ModelIntegrityError("model header must be '<kind> <version>'");
    if (text::parse_int(header[1]) != kModelFormatVersion)
        throw ModelIntegrityError("unsupported model version " + header[1]);
    const std::string& kind = header[0];

    if (kind == "logistic") {
        auto w = reader.expect("the weight line");
        if (w.size() < 2 || w[0] != "w") throw ModelIntegrityError("expected 'w d v0 ...' line");
        const auto d = text::parse_int(w[1]);
        LogisticModel m;
        m.weights = detail::parse_reals(w, 2);
        if (d < 1 || static_cast<std::size_t>(d) != m.weights.size())
            throw ModelIntegrityError("weight count does not match declared dimension");
        auto b = reader.expect("the bias line");
        if (b.size() != 2 || b[0] != "b") throw ModelIntegrityError("expected 'b value' line");
        m.bias = detail::parse_reals(b, 1).front();
        return m;
    }
    if (kind == "svm") {
        SvmModel m;
        auto g = reader.expect("the gamma line");
        if (g.size() != 2 || g[0] != "gamma") throw ModelIntegrityError("expected 'gamma value' line");
        m.gamma = detail::parse_reals(g, 1).front();
        auto b = reader.expect("the bias line");
        if (b.size() != 2 || b[0] != "b") throw ModelIntegrityError("expected 'b value' line");
        m.bias = detail::parse_reals(b, 1).front();
        for (auto t = reader.next(); !t.empty(); t = reader.next()) {
            auto v = detail::parse_reals(t, 0);
            if (v.size() < 2) throw ModelIntegrityError("support vector line too short");
            m.dual_coeffs.push_back(v.front());
            m.support_vectors.emplace_back(v.begin() + 1, v.end());
        }
        validate_model(m);
        return m;
    }
    if (kind == "kmeans") {
        auto kd = reader.expect("the 'k d' line");
        if (kd.size() != 2) throw ModelIntegrityError("expected 'k d' line");
        const auto k = text::parse_int(kd[0]);
        const auto d = text::parse_int(kd[1]);
        if (k < 2 || d < 1) throw ModelIntegrityError("k-means model needs k >= 2 and d >= 1");
        KMeansModel m;
        for (long long c = 0; c < k; ++c) {
            auto v = detail::parse_reals(reader.expect("a centroid line"), 0);
            if (static_cast<long long>(v.size()) != d) throw ModelIntegrityError("centroid has wrong dimension");
            m.centroids.push_back(std::move(v));
        }
        if (count_distinct(m.centroids) != m.centroids.size())
            throw ModelIntegrityError("k-means centroids are not pairwise distinct");
        std::vector<int> mapped(static_cast<std::size_t>(k), -1);
        for (long long c = 0; c < k; ++c) {
            auto t = reader.expect("a 'map cluster label' line");
            if (t.size() != 3 || t[0] != "map") throw ModelIntegrityError("expected 'map cluster label' line");
            const auto idx = text::parse_int(t[1]);
            if (idx < 0 || idx >= k || mapped[static_cast<std::size_t>(idx)] != -1)
                throw ModelIntegrityError("bad or duplicate cluster index in map line");
            long long lab = text::parse_int(t[2]);
            if (lab != 0 && lab != 1) throw ModelIntegrityError("cluster label must be 0 or 1");
            mapped[static_cast<std::size_t>(idx)] = static_cast<int>(lab);
        }
        for (int l : mapped) m.cluster_to_label.push_back(static_cast<Label>(l));
        return m;
    }
    throw ModelIntegrityError("unknown model kind '" + kind + "'");
}

inline void save_model(const std::string& path, const Model& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file " + path);
    save_model(out, model);
    if (!out) throw IoError("failed writing model file " + path);
}

inline Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file " + path);
    return load_model(in);
}

} // namespace sfk
