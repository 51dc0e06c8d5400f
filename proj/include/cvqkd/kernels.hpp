#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cvqkd {

// Samples are generated and reduced in fixed-size blocks. Each block owns a
// derived RNG sub-stream and a private partial sum, so results are bit-exact
// regardless of thread count. The serial variants below are the reference
// implementations the OpenMP kernels are tested against.
inline constexpr std::size_t kBlockSize = 1u << 16;

// Fills `out` with i.i.d. zero-mean Gaussian draws of the given variance
// (Marsaglia polar method, one xoshiro256++ stream per block).
void fill_gaussian(std::span<double> out, double variance, std::uint64_t seed);
void fill_gaussian_serial(std::span<double> out, double variance, std::uint64_t seed);

// Blocked sums: per-block partials accumulated in block order.
double blocked_sum(std::span<const double> x);
double blocked_sum_serial(std::span<const double> x);

double blocked_dot(std::span<const double> a, std::span<const double> b);
double blocked_dot_serial(std::span<const double> a, std::span<const double> b);

// Sum of squared residuals of target against a fixed linear combination of
// predictors: sum_i (t_i - sum_k c_k p_k[i])^2.
double blocked_residual_sumsq(std::span<const double> target,
                              std::span<const std::span<const double>> predictors,
                              std::span<const double> coefficients);
double blocked_residual_sumsq_serial(std::span<const double> target,
                                     std::span<const std::span<const double>> predictors,
                                     std::span<const double> coefficients);

// Convenience wrapper returning a freshly sampled vector.
std::vector<double> sample_gaussian(double variance, std::size_t n, std::uint64_t seed);

} // namespace cvqkd
