#include "cvqkd/cloner.hpp"

#include "cvqkd/kernels.hpp"
#include "cvqkd/rng.hpp"
#include "cvqkd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cvqkd {

ClonerSetup build_cloner(const ChannelModel& channel, const SourceModel& source,
                         ShotNoise n0) {
    validate(n0);
    if (!channel.is_symmetric())
        throw std::domain_error("cloner: channel must be symmetric in (x, p)");
    const double g = channel.g_x();
    const double chi = channel.chi_x();
    if (!(g < 1.0))
        throw infeasible_error("cloner: construction is defined for G < 1 only");
    if (!(chi > 0.0))
        throw infeasible_error("cloner: added noise chi must be > 0");

    const double e1 = g * chi * n0.n0 / (1.0 - g);
    // Relative slack keeps exact pure-loss channels (G*chi == 1-G) feasible
    // through floating-point rounding of chi.
    if (e1 < n0.n0 * (1.0 - 1e-12))
        throw infeasible_error("cloner: channel noise below cloner's EPR feasibility "
                               "(G*chi < 1-G)");
    const double unknown = std::min(n0.n0 * n0.n0 / e1, e1);
    return {channel, source, n0, e1, e1 - unknown, unknown};
}

SampleBatch simulate_attack(const ClonerSetup& setup, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::domain_error("simulate_attack: n must be >= 1");
    const double n0 = setup.n0.n0;
    const double g = setup.channel.g_x();
    const double amp = std::sqrt(g);
    const double refl = std::sqrt(1.0 - g);
    const double mod_var = setup.source.modulation_variance() * n0;
    const double prep_var = setup.source.s() * n0;

    SampleBatch batch(seed, n);
    auto draw = [&](std::uint64_t stream, double variance) {
        return sample_gaussian(variance, n, rng::derive_seed(seed, stream));
    };

    struct QuadStreams {
        const char* prefix;
        std::uint64_t modulation, preparation, known, unknown;
    };
    // Both quadratures get the same construction from independent streams;
    // only second moments matter for the conditional variances.
    const QuadStreams quads[] = {
        {"x", streams::x_modulation, streams::x_preparation, streams::x_eve_known,
         streams::x_eve_unknown},
        {"p", streams::p_modulation, streams::p_preparation, streams::p_eve_known,
         streams::p_eve_unknown},
    };

    for (const auto& q : quads) {
        std::vector<double> a = draw(q.modulation, mod_var);
        std::vector<double> prep = draw(q.preparation, prep_var);
        std::vector<double> known = draw(q.known, setup.known_variance);
        std::vector<double> unknown = draw(q.unknown, setup.unknown_variance);

        std::vector<double> in(n), e1(n), b(n), e2(n), prime_b(n), prime_e2(n);
        for (std::size_t i = 0; i < n; ++i) {
            in[i] = a[i] + prep[i];
            e1[i] = known[i] + unknown[i];
            b[i] = amp * in[i] + refl * e1[i];
            e2[i] = amp * e1[i] - refl * in[i];
            prime_b[i] = amp * in[i] + refl * unknown[i];
            prime_e2[i] = amp * unknown[i] - refl * in[i];
        }

        const std::string p(q.prefix);
        batch.add_column(p + "_A", std::move(a));
        batch.add_column(p + "_in", std::move(in));
        batch.add_column(p + "_known", std::move(known));
        batch.add_column(p + "_unknown", std::move(unknown));
        batch.add_column(p + "_E1", std::move(e1));
        batch.add_column(p + "_B", std::move(b));
        batch.add_column(p + "_E2", std::move(e2));
        batch.add_column(p + "_prime_B", std::move(prime_b));
        batch.add_column(p + "_prime_E2", std::move(prime_e2));
    }
    return batch;
}

EveConditionalEstimate eve_conditional_variance_empirical(const SampleBatch& batch) {
    const auto target = batch.column("x_B");
    const std::span<const double> predictors[] = {batch.column("x_known"),
                                                  batch.column("x_E2")};
    EveConditionalEstimate est;
    est.variance = empirical_conditional_variance_multi(predictors, target);
    est.reduced_variance =
        empirical_conditional_variance(batch.column("x_prime_E2"), batch.column("x_prime_B"))
            .variance;
    // Each residual-variance estimate has SE ~ V sqrt(2/n).
    const double se = std::sqrt(2.0 / static_cast<double>(batch.size()));
    const double combined = 3.0 * se * std::hypot(est.variance, est.reduced_variance);
    est.consistent = std::abs(est.variance - est.reduced_variance) <= combined;
    est.low_samples = batch.size() < 1000;
    return est;
}

double alice_conditional_variance_empirical(const SampleBatch& batch) {
    return empirical_conditional_variance(batch.column("x_A"), batch.column("x_B")).variance;
}

} // namespace cvqkd
