#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvqkd/kernels.hpp"
#include "cvqkd/protocol.hpp"
#include "cvqkd/security.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <vector>

using namespace cvqkd;

namespace {

ProtocolRun make_run(SourceModel source, ChannelModel channel, std::size_t n,
                     std::uint64_t seed, double reveal = 0.1,
                     Realization realization = Realization::direct) {
    ProtocolRun run{source, channel, n, reveal, seed, realization, 3.0, {}};
    return run;
}

} // namespace

TEST_CASE("full run recovers the channel and the analytic rate") {
    const auto run = make_run(SourceModel::coherent(10.0), ChannelModel::symmetric(0.5, 1.0),
                              1'000'000, 42);
    const ProtocolResult res = run_protocol(run);

    CHECK(res.n_kept == 1'000'000);
    CHECK(res.revealed.size() == 100'000);
    CHECK(res.sifted.size() == 900'000);
    CHECK(res.estimate.n_revealed_x + res.estimate.n_revealed_p == 100'000);

    for (const auto* g : {&res.estimate.g_x, &res.estimate.g_p}) {
        CHECK(std::abs(g->value - 0.5) < 0.02 * 0.5);
        CHECK(g->std_error > 0.0);
    }
    for (const auto* chi : {&res.estimate.chi_x, &res.estimate.chi_p}) {
        CHECK(std::abs(chi->value - 1.0) < 0.05);
        CHECK_FALSE(chi->clamped);
    }

    const double analytic = delta_i_coherent(0.5, 1.0, 10.0);
    CHECK(std::abs(res.report.delta_i - analytic) < 0.1 * analytic);
    CHECK(res.report.secure);
    CHECK_FALSE(res.abort);
    // Pessimised verdict never beats the plug-in rate.
    CHECK(res.verdict.delta_i <= res.report.delta_i);
}

TEST_CASE("clean channel run hits the lossless rate") {
    const auto run = make_run(SourceModel::coherent(10.0), ChannelModel::symmetric(1.0, 0.0),
                              200'000, 4);
    const ProtocolResult res = run_protocol(run);
    const double analytic = 1.660964047443681;
    CHECK(std::abs(res.report.delta_i - analytic) < 0.05 * analytic);
    CHECK(res.estimate.chi_x.value < 0.05);
    CHECK(res.estimate.chi_p.value < 0.05);
    CHECK(std::abs(res.estimate.g_x.value - 1.0) < 0.02);
    CHECK_FALSE(res.abort);
}

TEST_CASE("basis sifting keeps about half the EPR symbols and all coherent ones") {
    const auto epr = run_protocol(make_run(SourceModel::epr(10.0),
                                           ChannelModel::symmetric(0.5, 1.0), 100'000, 7));
    const double spread = 3.0 * std::sqrt(100'000 * 0.25);
    CHECK(std::abs(double(epr.n_kept) - 50'000.0) < spread);
    CHECK(epr.n_kept == epr.sifted.size() + epr.revealed.size());

    const auto coh = run_protocol(make_run(SourceModel::coherent(10.0),
                                           ChannelModel::symmetric(0.5, 1.0), 100'000, 7));
    CHECK(coh.n_kept == 100'000);
}

TEST_CASE("channel estimation worked examples") {
    const auto strong = run_protocol(make_run(SourceModel::coherent(10.0),
                                              ChannelModel::symmetric(0.25, 3.0),
                                              1'000'000, 11));
    CHECK(std::abs(strong.estimate.g_x.value - 0.25) < 0.02 * 0.25);
    CHECK(std::abs(strong.estimate.g_p.value - 0.25) < 0.02 * 0.25);
    CHECK(std::abs(strong.estimate.chi_x.value - 3.0) < 0.05 * 3.0);
    CHECK(std::abs(strong.estimate.chi_p.value - 3.0) < 0.05 * 3.0);

    // Deep pure loss: chi estimated near (1-G)/G = 99 from a large reveal.
    const auto deep = run_protocol(make_run(SourceModel::coherent(10.0),
                                            ChannelModel::pure_loss(0.01), 2'000'000, 13, 0.5));
    CHECK(std::abs(deep.estimate.chi_x.value - 99.0) < 0.05 * 99.0);
    CHECK(std::abs(deep.estimate.chi_p.value - 99.0) < 0.05 * 99.0);
    CHECK(std::abs(deep.estimate.g_x.value - 0.01) < 0.05 * 0.01);
}

TEST_CASE("secure verdict at zero standard error reproduces the analytic rate") {
    EstimatedChannel est;
    est.g_x = est.g_p = {0.01, 0.0, false};
    est.chi_x = est.chi_p = {99.0, 0.0, false};
    est.n_revealed_x = est.n_revealed_p = 1;
    const auto verdict = secure_verdict(est, SourceModel::coherent(10.0), 3.0);
    CHECK(verdict.delta_i == doctest::Approx(0.006521518737799434).epsilon(1e-12));
    CHECK(verdict.secure);

    est.chi_x.value = est.chi_p.value = chi_from_excess_noise(0.5, 0.6);
    est.g_x.value = est.g_p.value = 0.5;
    const auto bad = secure_verdict(est, SourceModel::coherent(10.0), 0.0);
    CHECK_FALSE(bad.secure);
}

TEST_CASE("secure verdict keys on the workable quadrature only") {
    EstimatedChannel est;
    est.g_x = {1.0, 0.0, false};
    est.chi_x = {2.0, 0.0, false};
    est.g_p = {1.0, 0.0, false};
    est.chi_p = {0.05, 0.0, false};
    const auto verdict = secure_verdict(est, SourceModel::coherent(10.0), 0.0);
    // x-keyed product (2+1)(0.05+0.1) < 1, p-keyed product > 1: only x
    // contributes, at weight one half.
    const double delta_x = -0.5 * std::log2((2.0 + 1.0) * (0.05 + 0.1));
    CHECK(verdict.delta_i == doctest::Approx(0.5 * delta_x).epsilon(1e-12));
    CHECK(verdict.secure);
    CHECK(verdict.g == 1.0);
    CHECK(verdict.chi == 2.0);
}

TEST_CASE("nonzero uncertainty always drags the verdict down") {
    EstimatedChannel est;
    est.g_x = est.g_p = {0.5, 0.01, false};
    est.chi_x = est.chi_p = {1.0, 0.02, false};
    const auto source = SourceModel::coherent(10.0);
    const auto plug_in = secure_verdict(est, source, 0.0);
    const auto padded = secure_verdict(est, source, 3.0);
    CHECK(padded.delta_i < plug_in.delta_i);
    CHECK(plug_in.delta_i ==
          doctest::Approx(delta_i_coherent(0.5, 1.0, 10.0)).epsilon(1e-12));
    CHECK_THROWS_AS(secure_verdict(est, source, -1.0), std::domain_error);
}

TEST_CASE("standard errors cover the truth at the usual rate") {
    int ok_g = 0, ok_chi = 0;
    const int n_runs = 50;
    for (int i = 0; i < n_runs; ++i) {
        const auto res = run_protocol(make_run(SourceModel::coherent(10.0),
                                               ChannelModel::symmetric(0.5, 1.0), 400'000,
                                               9000 + std::uint64_t(i), 0.25));
        if (std::abs(res.estimate.g_x.value - 0.5) <= 3.0 * res.estimate.g_x.std_error)
            ++ok_g;
        if (std::abs(res.estimate.chi_x.value - 1.0) <= 3.0 * res.estimate.chi_x.std_error)
            ++ok_chi;
    }
    CHECK(ok_g >= 47);
    CHECK(ok_chi >= 47);
}

TEST_CASE("plug-in rate converges to the analytic value") {
    const double analytic = delta_i_coherent(0.5, 1.0, 10.0);
    const std::size_t sizes[] = {40'000, 400'000, 4'000'000};
    for (const std::size_t n : sizes) {
        const auto res = run_protocol(make_run(SourceModel::coherent(10.0),
                                               ChannelModel::symmetric(0.5, 1.0), n, 2718));
        const double n_rev = 0.1 * static_cast<double>(n);
        const double tol = 7.2 / std::sqrt(n_rev);
        REQUIRE(std::abs(res.report.delta_i - analytic) < tol);
    }
}

TEST_CASE("the cloner realization is invisible to parameter estimation") {
    for (std::uint64_t seed : {301, 302, 303}) {
        const auto source = SourceModel::coherent(10.0);
        const auto channel = ChannelModel::symmetric(0.5, 1.5);
        const auto direct =
            run_protocol(make_run(source, channel, 200'000, seed, 0.2, Realization::direct));
        const auto attacked =
            run_protocol(make_run(source, channel, 200'000, seed, 0.2, Realization::cloner));
        const auto z = [](const ParameterEstimate& a, const ParameterEstimate& b) {
            return std::abs(a.value - b.value) / std::hypot(a.std_error, b.std_error);
        };
        REQUIRE(z(direct.estimate.g_x, attacked.estimate.g_x) < 3.0);
        REQUIRE(z(direct.estimate.g_p, attacked.estimate.g_p) < 3.0);
        REQUIRE(z(direct.estimate.chi_x, attacked.estimate.chi_x) < 3.0);
        REQUIRE(z(direct.estimate.chi_p, attacked.estimate.chi_p) < 3.0);
    }
}

TEST_CASE("revealed and sifted index sets partition the kept symbols") {
    const auto res = run_protocol(make_run(SourceModel::epr(10.0),
                                           ChannelModel::symmetric(0.5, 1.0), 50'000, 99));
    std::set<double> seen;
    for (const double v : res.revealed.column("index")) {
        CHECK(v >= 0.0);
        CHECK(v < 50'000.0);
        seen.insert(v);
    }
    CHECK(seen.size() == res.revealed.size());
    for (const double v : res.sifted.column("index")) {
        REQUIRE(seen.count(v) == 0);
        seen.insert(v);
    }
    CHECK(seen.size() == res.n_kept);
}

TEST_CASE("input validation") {
    const auto source = SourceModel::coherent(10.0);
    const auto channel = ChannelModel::symmetric(0.5, 1.0);
    CHECK_THROWS_AS(run_protocol(make_run(source, channel, 50, 1)), std::invalid_argument);
    CHECK_THROWS_AS(run_protocol(make_run(source, channel, 1000, 1, 0.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_protocol(make_run(source, channel, 1000, 1, 1.0)),
                    std::invalid_argument);
    // 500 * 0.02 = 10 revealed symbols: below the floor of 20.
    CHECK_THROWS_AS(run_protocol(make_run(source, channel, 500, 1, 0.02)), std::domain_error);

    // A quadrature with fewer than 10 pairs cannot be fitted.
    SampleBatch lopsided(0, 32);
    auto alice = sample_gaussian(9.0, 32, 5);
    auto noise = sample_gaussian(1.0, 32, 6);
    std::vector<double> bob(32), basis(32, 0.0);
    for (std::size_t i = 0; i < 32; ++i) bob[i] = 0.7 * alice[i] + noise[i];
    lopsided.add_column("basis", std::move(basis));
    lopsided.add_column("alice", std::move(alice));
    lopsided.add_column("bob", std::move(bob));
    CHECK_THROWS_AS(estimate_channel(lopsided, source), std::domain_error);
}

TEST_CASE("runs are deterministic in the seed") {
    const auto run = make_run(SourceModel::coherent(10.0),
                              ChannelModel::symmetric(0.5, 1.0), 10'000, 31415);
    const auto a = run_protocol(run);
    const auto b = run_protocol(run);
    CHECK(a.report.delta_i == b.report.delta_i);
    CHECK(a.estimate.g_x.value == b.estimate.g_x.value);
    CHECK(a.estimate.chi_p.value == b.estimate.chi_p.value);

    auto other = run;
    other.seed = 27182;
    const auto c = run_protocol(other);
    CHECK(a.report.delta_i != c.report.delta_i);
}
