#pragma once

#include <span>
#include <vector>

namespace cvqkd {

// Vacuum-fluctuation variance. Every variance in the project is a multiple
// of n0; information rates are ratios and never depend on it.
struct ShotNoise {
    double n0 = 1.0;
};

void validate(const ShotNoise& sn);

// Scalar coefficient of the optimal linear estimate of a target from one
// predictor: c = <PT>/<P^2>. All variables are zero-mean by convention, so
// moments are raw (no mean subtraction).
struct LinearEstimator {
    double coefficient = 0.0;
};

struct ConditionalFit {
    double variance = 0.0;
    LinearEstimator estimator;
};

// Raw second moments over the full sample, blocked for determinism.
double mean_square(std::span<const double> x);
double cross_moment(std::span<const double> a, std::span<const double> b);

// Residual variance of the best linear estimate of target from predictor,
// min_c mean((target - c*predictor)^2), and the minimizing c.
// A zero-variance predictor yields {var(target), c = 0}.
ConditionalFit empirical_conditional_variance(std::span<const double> predictor,
                                              std::span<const double> target);

// Residual variance of the least-squares projection of target onto the span
// of several predictors. The normal equations carry a small ridge term
// (1e-12 * trace(Gram)/k) so collinear predictors are handled, never fatal.
double empirical_conditional_variance_multi(std::span<const std::span<const double>> predictors,
                                            std::span<const double> target);

// Shannon rate in bits per symbol: (1/2) log2(signal/conditional).
double shannon_rate(double signal_variance, double conditional_variance);

} // namespace cvqkd
