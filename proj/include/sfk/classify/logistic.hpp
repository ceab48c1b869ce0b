#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sfk/classify/sample.hpp"

namespace sfk {

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;

    std::size_t dimension() const { return weights.size(); }
    bool operator==(const LogisticModel&) const = default;
};

struct LogisticTrainConfig {
    double learning_rate = 0.1;
    int max_iters = 10000;
    double tol = 1e-6;  ///< stop once the gradient infinity-norm drops below this
    double l2 = 1e-4;   ///< ridge penalty on the weights (not the bias)
};

struct LogisticPrediction {
    Label label;
    double probability;
};

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow
inline double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double lr_logit(const LogisticModel& m, std::span<const double> x) {
    double z = m.bias;
    for (std::size_t j = 0; j < x.size(); ++j) z += m.weights[j] * x[j];
    return z;
}

inline LogisticPrediction lr_predict(const LogisticModel& m, std::span<const double> x) {
    require_dimension(m.dimension(), x.size());
    const double p = sigmoid(lr_logit(m, x));
    return {p >= 0.5 ? Label::real : Label::fake, p};
}

/// Penalized mean log-likelihood:
///   (1/n) sum [y z - log(1 + e^z)] - (l2/2) |w|^2,  z = w.x + b.
inline double lr_objective(const LogisticModel& m, std::span<const LabeledSample> samples, double l2) {
    double ll = 0.0;
    for (const auto& s : samples) {
        const double z = lr_logit(m, s.features);
        ll += to_int(s.label) * z - softplus(z);
    }
    double wn = 0.0;
    for (double w : m.weights) wn += w * w;
    return ll / static_cast<double>(samples.size()) - 0.5 * l2 * wn;
}

/// Gradient of lr_objective, returned in model shape ([weights, bias]).
inline LogisticModel lr_gradient(const LogisticModel& m, std::span<const LabeledSample> samples, double l2) {
    LogisticModel g{std::vector<double>(m.dimension(), 0.0), 0.0};
    for (const auto& s : samples) {
        const double r = to_int(s.label) - sigmoid(lr_logit(m, s.features));
        for (std::size_t j = 0; j < g.weights.size(); ++j) g.weights[j] += r * s.features[j];
        g.bias += r;
    }
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (std::size_t j = 0; j < g.weights.size(); ++j) g.weights[j] = g.weights[j] * inv_n - l2 * m.weights[j];
    g.bias *= inv_n;
    return g;
}

inline double max_abs(const LogisticModel& g) {
    double v = std::abs(g.bias);
    for (double w : g.weights) v = std::max(v, std::abs(w));
    return v;
}

struct LogisticFit {
    LogisticModel model;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;  ///< objective after each accepted step, starting at w = 0
};

/// Full-batch gradient ascent from w = 0. A step that would lower the
/// objective is rejected and the learning rate halved, so the trace is
/// monotone.
inline LogisticFit lr_fit(std::span<const LabeledSample> samples, const LogisticTrainConfig& cfg = {}) {
    const std::size_t d = checked_dimension(samples);
    require_both_classes(samples);
    if (!(cfg.learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
    if (cfg.max_iters < 0) throw ParameterError("max_iters must be non-negative");
    if (!(cfg.l2 >= 0.0)) throw ParameterError("l2 penalty must be non-negative");

    LogisticFit fit;
    fit.model = {std::vector<double>(d, 0.0), 0.0};
    double objective = lr_objective(fit.model, samples, cfg.l2);
    fit.objective_trace.push_back(objective);
    double rate = cfg.learning_rate;
    LogisticModel grad = lr_gradient(fit.model, samples, cfg.l2);
    LogisticModel candidate = fit.model;

    for (int it = 0; it < cfg.max_iters; ++it) {
        if (max_abs(grad) < cfg.tol) {
            fit.converged = true;
            break;
        }
        ++fit.iterations;
        for (std::size_t j = 0; j < d; ++j) candidate.weights[j] = fit.model.weights[j] + rate * grad.weights[j];
        candidate.bias = fit.model.bias + rate * grad.bias;
        const double next = lr_objective(candidate, samples, cfg.l2);
        if (next < objective) {
            rate *= 0.5;
            if (rate < 1e-300) break;
            continue;
        }
        fit.model = candidate;
        objective = next;
        fit.objective_trace.push_back(objective);
        grad = lr_gradient(fit.model, samples, cfg.l2);
    }
    if (!fit.converged && max_abs(grad) < cfg.tol) fit.converged = true;
    return fit;
}

inline LogisticModel lr_train(std::span<const LabeledSample> samples, const LogisticTrainConfig& cfg = {}) {
    return lr_fit(samples, cfg).model;
}

} // namespace sfk
