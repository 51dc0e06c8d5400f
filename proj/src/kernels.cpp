#include "cvqkd/kernels.hpp"

#include "cvqkd/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cvqkd {

namespace {

std::size_t block_count(std::size_t n) {
    return (n + kBlockSize - 1) / kBlockSize;
}

// One block of Gaussian draws from its own stream. Pairs come from the polar
// method; the spare of a trailing odd sample is discarded so the block output
// depends only on (block_seed, length).
void fill_gaussian_block(std::span<double> out, double sigma, std::uint64_t block_seed) {
    rng::Xoshiro256pp gen(block_seed);
    std::size_t i = 0;
    while (i + 1 < out.size()) {
        double u, v, s;
        do {
            u = gen.uniform_pm1();
            v = gen.uniform_pm1();
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = sigma * std::sqrt(-2.0 * std::log(s) / s);
        out[i] = u * factor;
        out[i + 1] = v * factor;
        i += 2;
    }
    if (i < out.size()) {
        double u, v, s;
        do {
            u = gen.uniform_pm1();
            v = gen.uniform_pm1();
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        out[i] = u * sigma * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double sum_range(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc;
}

double dot_range(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double residual_sumsq_range(std::span<const double> target,
                            std::span<const std::span<const double>> predictors,
                            std::span<const double> coefficients,
                            std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        double r = target[i];
        for (std::size_t k = 0; k < predictors.size(); ++k)
            r -= coefficients[k] * predictors[k][i];
        acc += r * r;
    }
    return acc;
}

void check_variance(double variance) {
    if (!(variance >= 0.0) || !std::isfinite(variance))
        throw std::domain_error("gaussian variance must be finite and >= 0");
}

} // namespace

void fill_gaussian(std::span<double> out, double variance, std::uint64_t seed) {
    check_variance(variance);
    if (out.empty()) return;
    const double sigma = std::sqrt(variance);
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>(block_count(out.size()));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
        const std::size_t len = std::min(kBlockSize, out.size() - begin);
        fill_gaussian_block(out.subspan(begin, len), sigma,
                            rng::derive_seed(seed, static_cast<std::uint64_t>(b)));
    }
}

void fill_gaussian_serial(std::span<double> out, double variance, std::uint64_t seed) {
    check_variance(variance);
    if (out.empty()) return;
    const double sigma = std::sqrt(variance);
    const std::size_t nblocks = block_count(out.size());
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t begin = b * kBlockSize;
        const std::size_t len = std::min(kBlockSize, out.size() - begin);
        fill_gaussian_block(out.subspan(begin, len), sigma, rng::derive_seed(seed, b));
    }
}

double blocked_sum(std::span<const double> x) {
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>(block_count(x.size()));
    std::vector<double> partials(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
        const std::size_t len = std::min(kBlockSize, x.size() - begin);
        partials[static_cast<std::size_t>(b)] = sum_range(x.subspan(begin, len));
    }
    return sum_range(partials);
}

double blocked_sum_serial(std::span<const double> x) {
    const std::size_t nblocks = block_count(x.size());
    std::vector<double> partials(nblocks, 0.0);
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t begin = b * kBlockSize;
        const std::size_t len = std::min(kBlockSize, x.size() - begin);
        partials[b] = sum_range(x.subspan(begin, len));
    }
    return sum_range(partials);
}

double blocked_dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("blocked_dot: length mismatch");
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>(block_count(a.size()));
    std::vector<double> partials(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < nblocks; ++blk) {
        const std::size_t begin = static_cast<std::size_t>(blk) * kBlockSize;
        const std::size_t len = std::min(kBlockSize, a.size() - begin);
        partials[static_cast<std::size_t>(blk)] =
            dot_range(a.subspan(begin, len), b.subspan(begin, len));
    }
    return sum_range(partials);
}

double blocked_dot_serial(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("blocked_dot: length mismatch");
    const std::size_t nblocks = block_count(a.size());
    std::vector<double> partials(nblocks, 0.0);
    for (std::size_t blk = 0; blk < nblocks; ++blk) {
        const std::size_t begin = blk * kBlockSize;
        const std::size_t len = std::min(kBlockSize, a.size() - begin);
        partials[blk] = dot_range(a.subspan(begin, len), b.subspan(begin, len));
    }
    return sum_range(partials);
}

double blocked_residual_sumsq(std::span<const double> target,
                              std::span<const std::span<const double>> predictors,
                              std::span<const double> coefficients) {
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>(block_count(target.size()));
    std::vector<double> partials(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
        const std::size_t end = std::min(begin + kBlockSize, target.size());
        partials[static_cast<std::size_t>(b)] =
            residual_sumsq_range(target, predictors, coefficients, begin, end);
    }
    return sum_range(partials);
}

double blocked_residual_sumsq_serial(std::span<const double> target,
                                     std::span<const std::span<const double>> predictors,
                                     std::span<const double> coefficients) {
    const std::size_t nblocks = block_count(target.size());
    std::vector<double> partials(nblocks, 0.0);
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t begin = b * kBlockSize;
        const std::size_t end = std::min(begin + kBlockSize, target.size());
        partials[b] = residual_sumsq_range(target, predictors, coefficients, begin, end);
    }
    return sum_range(partials);
}

std::vector<double> sample_gaussian(double variance, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::domain_error("sample_gaussian: n must be >= 1");
    std::vector<double> out(n);
    fill_gaussian(out, variance, seed);
    return out;
}

} // namespace cvqkd
