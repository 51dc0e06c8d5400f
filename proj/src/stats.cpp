#include "cvqkd/stats.hpp"

#include "cvqkd/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace cvqkd {

void validate(const ShotNoise& sn) {
    if (!(sn.n0 > 0.0) || !std::isfinite(sn.n0))
        throw std::domain_error("shot noise n0 must be finite and > 0");
}

double mean_square(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean_square: empty sample");
    return blocked_dot(x, x) / static_cast<double>(x.size());
}

double cross_moment(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cross_moment: length mismatch");
    if (a.empty()) throw std::invalid_argument("cross_moment: empty sample");
    return blocked_dot(a, b) / static_cast<double>(a.size());
}

ConditionalFit empirical_conditional_variance(std::span<const double> predictor,
                                              std::span<const double> target) {
    if (predictor.size() != target.size())
        throw std::invalid_argument("empirical_conditional_variance: length mismatch");
    if (target.size() < 2)
        throw std::invalid_argument("empirical_conditional_variance: need at least 2 samples");

    const double n = static_cast<double>(target.size());
    const double pp = blocked_dot(predictor, predictor);
    if (pp == 0.0)  // constant-zero predictor convention
        return {blocked_dot(target, target) / n, LinearEstimator{0.0}};

    const double c = blocked_dot(predictor, target) / pp;
    const std::span<const double> preds[] = {predictor};
    const double coeffs[] = {c};
    const double resid = blocked_residual_sumsq(target, preds, coeffs);
    return {resid / n, LinearEstimator{c}};
}

double empirical_conditional_variance_multi(std::span<const std::span<const double>> predictors,
                                            std::span<const double> target) {
    if (target.size() < 2)
        throw std::invalid_argument("conditional_variance_multi: need at least 2 samples");
    for (const auto& p : predictors)
        if (p.size() != target.size())
            throw std::invalid_argument("conditional_variance_multi: length mismatch");

    const double n = static_cast<double>(target.size());
    const std::size_t k = predictors.size();
    if (k == 0) return blocked_dot(target, target) / n;

    // Normal equations with a trace-scaled ridge; Gram + ridge is SPD unless
    // every predictor is identically zero.
    std::vector<double> gram(k * k);
    std::vector<double> rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            gram[i * k + j] = blocked_dot(predictors[i], predictors[j]) / n;
            gram[j * k + i] = gram[i * k + j];
        }
        rhs[i] = blocked_dot(predictors[i], target) / n;
    }
    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) trace += gram[i * k + i];
    if (trace == 0.0) return blocked_dot(target, target) / n;

    const double ridge = 1e-12 * trace / static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) gram[i * k + i] += ridge;

    // Cholesky factorization, in place (k is tiny here).
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = gram[i * k + j];
            for (std::size_t m = 0; m < j; ++m) s -= gram[i * k + m] * gram[j * k + m];
            if (i == j) {
                if (!(s > 0.0))
                    throw std::runtime_error("conditional_variance_multi: Gram factorization failed");
                gram[i * k + i] = std::sqrt(s);
            } else {
                gram[i * k + j] = s / gram[j * k + j];
            }
        }
    }
    std::vector<double> coeffs(rhs);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < i; ++j) coeffs[i] -= gram[i * k + j] * coeffs[j];
        coeffs[i] /= gram[i * k + i];
    }
    for (std::size_t ii = k; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < k; ++j) coeffs[ii] -= gram[j * k + ii] * coeffs[j];
        coeffs[ii] /= gram[ii * k + ii];
    }

    return blocked_residual_sumsq(target, predictors, coeffs) / n;
}

double shannon_rate(double signal_variance, double conditional_variance) {
    if (!(signal_variance > 0.0) || std::isnan(signal_variance) ||
        !(conditional_variance > 0.0) || std::isnan(conditional_variance))
        throw std::domain_error("shannon_rate: variances must be > 0");
    return 0.5 * std::log2(signal_variance / conditional_variance);
}

} // namespace cvqkd
