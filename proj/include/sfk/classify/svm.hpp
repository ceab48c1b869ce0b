#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <tuple>
#include <span>
#include <vector>

#include "sfk/classify/sample.hpp"

namespace sfk {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

inline double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    return std::exp(-gamma * squared_distance(a, b));
}

struct SvmModel {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coeffs;  ///< alpha_i * y_i, y in {-1, +1}
    double bias = 0.0;
    double gamma = 1.0;

    std::size_t dimension() const { return support_vectors.empty() ? 0 : support_vectors.front().size(); }
    bool operator==(const SvmModel&) const = default;
};

struct SvmTrainConfig {
    double c = 1.0;
    double gamma = 0.0;            ///< <= 0 selects 1/d
    double kkt_tolerance = 1e-3;
    int max_passes = 10;
    std::uint64_t seed = 42;
};

inline void validate_model(const SvmModel& m) {
    if (m.support_vectors.empty()) throw ModelIntegrityError("SVM model has no support vectors");
    if (m.dual_coeffs.size() != m.support_vectors.size())
        throw ModelIntegrityError("SVM model has mismatched coefficient count");
    if (!(m.gamma > 0.0) || !std::isfinite(m.gamma)) throw ModelIntegrityError("SVM gamma must be positive");
    if (!std::isfinite(m.bias)) throw ModelIntegrityError("SVM bias is not finite");
    const std::size_t d = m.dimension();
    for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
        if (m.support_vectors[i].size() != d || d == 0)
            throw ModelIntegrityError("SVM support vectors have inconsistent dimension");
        if (!std::isfinite(m.dual_coeffs[i]) || m.dual_coeffs[i] == 0.0)
            throw ModelIntegrityError("SVM dual coefficient must be finite and nonzero");
    }
}

/// sum_i alpha_i y_i K(x_i, x) + b
inline double svm_decision(const SvmModel& m, std::span<const double> x) {
    if (m.support_vectors.empty()) throw ModelIntegrityError("SVM model has no support vectors");
    require_dimension(m.dimension(), x.size());
    double f = m.bias;
    for (std::size_t i = 0; i < m.support_vectors.size(); ++i)
        f += m.dual_coeffs[i] * rbf_kernel(m.support_vectors[i], x, m.gamma);
    return f;
}

inline Label svm_predict(const SvmModel& m, std::span<const double> x) {
    return svm_decision(m, x) >= 0.0 ? Label::real : Label::fake;
}

struct SvmFit {
    SvmModel model;
    std::vector<double> alpha;  ///< one multiplier per training sample
    double objective = 0.0;     ///< dual objective sum(alpha) - 1/2 alpha' Q alpha
    double kkt_gap = 0.0;       ///< max violating-pair gap at exit
    int random_passes = 0;
    long long polish_steps = 0;
    bool converged = false;
};

namespace detail {

class SmoSolver {
public:
    SmoSolver(std::span<const LabeledSample> samples, double c, double gamma)
        : n_(samples.size()), c_(c), y_(n_), k_(n_ * n_), alpha_(n_, 0.0), f_(n_, 0.0) {
        for (std::size_t i = 0; i < n_; ++i) y_[i] = samples[i].label == Label::real ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            k_[i * n_ + i] = 1.0;
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double v = rbf_kernel(samples[i].features, samples[j].features, gamma);
                k_[i * n_ + j] = v;
                k_[j * n_ + i] = v;
            }
        }
    }

    // Platt's randomized simplified SMO: each KKT violator is paired with a
    // random partner until `max_passes` consecutive sweeps change nothing.
    int random_phase(double tol, int max_passes, std::mt19937_64& rng) {
        std::uniform_int_distribution<std::size_t> pick(0, n_ - 2);
        int passes = 0;
        int sweeps = 0;
        constexpr int kMaxSweeps = 2000;
        while (passes < max_passes && sweeps < kMaxSweeps) {
            ++sweeps;
            int changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                const double ei = error(i);
                const double r = y_[i] * ei;
                if (!((r < -tol && alpha_[i] < c_) || (r > tol && alpha_[i] > 0.0))) continue;
                std::size_t j = pick(rng);
                if (j >= i) ++j;
                if (step(i, j, 1e-5)) {
                    ++changed;
                }
            }
            passes = changed == 0 ? passes + 1 : 0;
        }
        return sweeps;
    }

    // Maximal-violating-pair iterations until the KKT gap is within `tol`.
    long long polish(double tol, long long max_steps) {
        long long steps = 0;
        while (steps < max_steps) {
            const auto [i, j, gap] = most_violating_pair();
            if (gap <= tol) break;
            if (!step(i, j, 0.0)) break;
            ++steps;
        }
        return steps;
    }

    // Returns (i in I_up maximizing v, j in I_low minimizing v, v_i - v_j)
    // with v_t = y_t - f_t.
    std::tuple<std::size_t, std::size_t, double> most_violating_pair() const {
        double vmax = -std::numeric_limits<double>::infinity();
        double vmin = std::numeric_limits<double>::infinity();
        std::size_t imax = 0, imin = 0;
        for (std::size_t t = 0; t < n_; ++t) {
            const double v = y_[t] - f_[t];
            if (in_up(t) && v > vmax) {
                vmax = v;
                imax = t;
            }
            if (in_low(t) && v < vmin) {
                vmin = v;
                imin = t;
            }
        }
        if (!std::isfinite(vmax) || !std::isfinite(vmin)) return {0, 0, 0.0};
        return {imax, imin, vmax - vmin};
    }

    // Bias that centers the KKT residuals: mean over free vectors, else the
    // midpoint of the feasible interval.
    double optimal_bias() const {
        double sum = 0.0;
        std::size_t free = 0;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n_; ++t) {
            const double v = y_[t] - f_[t];
            if (alpha_[t] > 0.0 && alpha_[t] < c_) {
                sum += v;
                ++free;
            }
            if (in_up(t)) lo = std::max(lo, v);
            if (in_low(t)) hi = std::min(hi, v);
        }
        if (free > 0) return sum / static_cast<double>(free);
        if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
        return std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
    }

    double dual_objective() const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += alpha_[i] - 0.5 * alpha_[i] * y_[i] * f_[i];
        return s;
    }

    const std::vector<double>& alpha() const { return alpha_; }
    double y(std::size_t i) const { return y_[i]; }
    double& bias() { return b_; }

private:
    std::size_t n_;
    double c_;
    std::vector<double> y_;
    std::vector<double> k_;
    std::vector<double> alpha_;
    std::vector<double> f_;  // sum_j alpha_j y_j K_ij, without bias
    double b_ = 0.0;

    double error(std::size_t i) const { return f_[i] + b_ - y_[i]; }

    // Round-off near a bound would otherwise count as a free vector.
    double snap(double a) const {
        const double eps = 1e-12 * c_;
        if (a < eps) return 0.0;
        if (a > c_ - eps) return c_;
        return a;
    }
    bool in_up(std::size_t t) const { return y_[t] > 0 ? alpha_[t] < c_ : alpha_[t] > 0.0; }
    bool in_low(std::size_t t) const { return y_[t] > 0 ? alpha_[t] > 0.0 : alpha_[t] < c_; }

    // Jointly optimizes alpha_i, alpha_j; false if the pair cannot move by
    // more than `min_change`.
    bool step(std::size_t i, std::size_t j, double min_change) {
        const double ai = alpha_[i], aj = alpha_[j];
        const double yi = y_[i], yj = y_[j];
        double lo, hi;
        if (yi != yj) {
            lo = std::max(0.0, aj - ai);
            hi = std::min(c_, c_ + aj - ai);
        } else {
            lo = std::max(0.0, ai + aj - c_);
            hi = std::min(c_, ai + aj);
        }
        if (lo >= hi) return false;
        const double kii = k_[i * n_ + i], kjj = k_[j * n_ + j], kij = k_[i * n_ + j];
        double eta = kii + kjj - 2.0 * kij;
        if (eta <= 1e-12) eta = 1e-12;
        const double ei = error(i), ej = error(j);
        double aj_new = snap(std::clamp(aj + yj * (ei - ej) / eta, lo, hi));
        if (std::abs(aj_new - aj) <= min_change) return false;
        const double ai_new = snap(ai + yi * yj * (aj - aj_new));
        const double di = (ai_new - ai) * yi, dj = (aj_new - aj) * yj;
        if (di == 0.0 && dj == 0.0) return false;

        const double b1 = b_ - ei - di * kii - dj * kij;
        const double b2 = b_ - ej - di * kij - dj * kjj;
        if (ai_new > 0.0 && ai_new < c_)
            b_ = b1;
        else if (aj_new > 0.0 && aj_new < c_)
            b_ = b2;
        else
            b_ = 0.5 * (b1 + b2);

        alpha_[i] = ai_new;
        alpha_[j] = aj_new;
        const double* ki = &k_[i * n_];
        const double* kj = &k_[j * n_];
        for (std::size_t t = 0; t < n_; ++t) f_[t] += di * ki[t] + dj * kj[t];
        return true;
    }
};

} // namespace detail

inline double resolve_gamma(const SvmTrainConfig& cfg, std::size_t d) {
    return cfg.gamma > 0.0 ? cfg.gamma : 1.0 / static_cast<double>(d);
}

/// Soft-margin RBF SVM trained on the dual by SMO. A seeded randomized
/// phase does the bulk of the work; a maximal-violating-pair phase then
/// drives every KKT residual below `kkt_tolerance`.
inline SvmFit svm_fit(std::span<const LabeledSample> samples, const SvmTrainConfig& cfg = {}) {
    const std::size_t d = checked_dimension(samples);
    require_both_classes(samples);
    if (!(cfg.c > 0.0) || !std::isfinite(cfg.c)) throw ParameterError("SVM C must be positive");
    if (!(cfg.kkt_tolerance > 0.0)) throw ParameterError("KKT tolerance must be positive");
    if (cfg.max_passes < 1) throw ParameterError("max_passes must be at least 1");
    const double gamma = resolve_gamma(cfg, d);
    if (!std::isfinite(gamma)) throw ParameterError("SVM gamma must be finite");

    detail::SmoSolver solver(samples, cfg.c, gamma);
    std::mt19937_64 rng(cfg.seed);
    SvmFit fit;
    fit.random_passes = solver.random_phase(cfg.kkt_tolerance, cfg.max_passes, rng);
    const long long n = static_cast<long long>(samples.size());
    fit.polish_steps = solver.polish(cfg.kkt_tolerance, std::max<long long>(1'000'000, 1000 * n));
    fit.kkt_gap = std::get<2>(solver.most_violating_pair());
    fit.converged = fit.kkt_gap <= cfg.kkt_tolerance;

    fit.alpha = solver.alpha();
    fit.objective = solver.dual_objective();
    fit.model.gamma = gamma;
    fit.model.bias = solver.optimal_bias();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (fit.alpha[i] > 0.0) {
            fit.model.support_vectors.push_back(samples[i].features);
            fit.model.dual_coeffs.push_back(fit.alpha[i] * solver.y(i));
        }
    }
    if (fit.model.support_vectors.empty()) throw TrainingError("SVM training produced no support vectors");
    return fit;
}

inline SvmModel svm_train(std::span<const LabeledSample> samples, const SvmTrainConfig& cfg = {}) {
    return svm_fit(samples, cfg).model;
}

} // namespace sfk
