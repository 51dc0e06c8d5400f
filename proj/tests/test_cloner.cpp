#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cvqkd/cloner.hpp"
#include "cvqkd/rng.hpp"
#include "cvqkd/security.hpp"
#include "cvqkd/stats.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

using namespace cvqkd;

namespace {

ClonerSetup setup_for(double g, double chi, const SourceModel& source) {
    return build_cloner(ChannelModel::symmetric(g, chi), source);
}

} // namespace

TEST_CASE("cloner decomposition worked values") {
    const auto pure = setup_for(0.5, 1.0, SourceModel::coherent(10.0));
    CHECK(pure.e1_variance == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pure.known_variance == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(pure.unknown_variance == doctest::Approx(1.0).epsilon(1e-12));

    const auto noisy = setup_for(0.5, 2.0, SourceModel::coherent(10.0));
    CHECK(noisy.e1_variance == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(noisy.known_variance == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(noisy.unknown_variance == doctest::Approx(0.5).epsilon(1e-15));

    const auto strong_loss = setup_for(0.25, 3.0, SourceModel::epr(10.0));
    CHECK(strong_loss.e1_variance == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(strong_loss.known_variance == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(strong_loss.unknown_variance == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cloner feasibility and input validation") {
    CHECK_THROWS_AS(setup_for(0.9, 0.05, SourceModel::coherent(10.0)), infeasible_error);
    CHECK_THROWS_AS(setup_for(1.0, 1.0, SourceModel::coherent(10.0)), infeasible_error);
    CHECK_THROWS_AS(setup_for(0.5, 0.0, SourceModel::coherent(10.0)), infeasible_error);
    CHECK_THROWS_AS(
        build_cloner(ChannelModel(0.5, 1.0, 0.6, 1.0), SourceModel::coherent(10.0)),
        std::domain_error);
    // Exact pure loss stays feasible through rounding of chi.
    const double g = 0.3;
    CHECK_NOTHROW(setup_for(g, (1.0 - g) / g, SourceModel::coherent(10.0)));
}

TEST_CASE("attack batch second moments match the channel model") {
    const auto setup = setup_for(0.5, 2.0, SourceModel::coherent(10.0));
    const std::size_t n = 1'000'000;
    const SampleBatch batch = simulate_attack(setup, n, 7);

    const double var_b = mean_square(batch.column("x_B"));
    CHECK(var_b == doctest::Approx(0.5 * 12.0).epsilon(0.01));

    // Alice's record against Bob: cov = sqrt(G) (V - s) n0.
    const double cov_ab = cross_moment(batch.column("x_A"), batch.column("x_B"));
    const double expect_cov = std::sqrt(0.5) * 9.0;
    const double se_cov = std::sqrt((10.0 * 6.0 + expect_cov * expect_cov) / double(n));
    CHECK(std::abs(cov_ab - expect_cov) < 3.0 * se_cov);

    // Injected mode is independent of the input field.
    const double cov_in_e1 = cross_moment(batch.column("x_in"), batch.column("x_E1"));
    CHECK(std::abs(cov_in_e1) < 3.0 * std::sqrt(10.0 * 2.0 / double(n)));

    // The split is an exact decomposition, element by element.
    const auto e1 = batch.column("x_E1");
    const auto known = batch.column("x_known");
    const auto unknown = batch.column("x_unknown");
    for (std::size_t i = 0; i < 200; ++i) {
        REQUIRE(e1[i] == known[i] + unknown[i]);
    }
}

TEST_CASE("attack is invisible in the (A, B) marginals for both quadratures") {
    const auto setup = setup_for(0.25, 3.0, SourceModel::epr(10.0));
    const std::size_t n = 500'000;
    const SampleBatch batch = simulate_attack(setup, n, 19);
    for (const char* quad : {"x", "p"}) {
        const std::string q(quad);
        const double var_b = mean_square(batch.column(q + "_B"));
        const double se_b = 0.25 * 13.0 * std::sqrt(2.0 / double(n));
        REQUIRE(std::abs(var_b - 0.25 * 13.0) < 3.0 * se_b);
        const double var_a = mean_square(batch.column(q + "_A"));
        const double mod = 10.0 - 0.1;
        REQUIRE(std::abs(var_a - mod) < 3.0 * mod * std::sqrt(2.0 / double(n)));
    }
}

TEST_CASE("eve conditional variance saturates the analytic bound") {
    const std::size_t n = 1'000'000;

    const auto pure = simulate_attack(setup_for(0.5, 1.0, SourceModel::coherent(10.0)), n, 3);
    const auto est_pure = eve_conditional_variance_empirical(pure);
    CHECK(est_pure.variance ==
          doctest::Approx(eve_min_conditional_variance(0.5, 1.0, 10.0)).epsilon(0.01));
    CHECK(est_pure.variance == doctest::Approx(1.0 / 0.55).epsilon(0.01));
    CHECK(est_pure.consistent);
    CHECK_FALSE(est_pure.low_samples);

    const auto hot = simulate_attack(setup_for(0.9, 2.0, SourceModel::coherent(20.0)), n, 5);
    const auto est_hot = eve_conditional_variance_empirical(hot);
    CHECK(est_hot.variance == doctest::Approx(1.0 / (0.9 * 2.05)).epsilon(0.01));
    CHECK(est_hot.consistent);

    // No modulation: the bound still holds with V = 1.
    const auto idle = simulate_attack(setup_for(0.5, 1.0, SourceModel::coherent(1.0)), n, 9);
    const auto est_idle = eve_conditional_variance_empirical(idle);
    CHECK(est_idle.variance == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("bound saturation on a random feasible grid") {
    rng::Xoshiro256pp gen(555);
    const std::size_t n = 200'000;
    int tested = 0;
    while (tested < 10) {
        const double g = 0.05 + 0.9 * gen.uniform();
        const double chi = (1.0 - g) / g + 2.0 * gen.uniform();
        const double v = 2.0 + 30.0 * gen.uniform();
        const auto setup = setup_for(g, chi, SourceModel::coherent(v));
        const auto batch = simulate_attack(setup, n, 1000 + std::uint64_t(tested));
        const auto est = eve_conditional_variance_empirical(batch);
        const double bound = eve_min_conditional_variance(g, chi, v);
        const double se = bound * std::sqrt(2.0 / double(n));
        REQUIRE(std::abs(est.variance - bound) < 3.0 * se);
        REQUIRE(est.consistent);

        const double alice = alice_conditional_variance_empirical(batch);
        const double expect_alice = alice_conditional_variance(g, chi, 1.0);
        REQUIRE(std::abs(alice - expect_alice) <
                3.0 * expect_alice * std::sqrt(2.0 / double(n)));
        // Joint uncertainty product stays above the Heisenberg floor.
        REQUIRE(alice * est.variance >= 1.0 - 5.0 * std::sqrt(2.0 / double(n)));
        ++tested;
    }
}

TEST_CASE("alice conditional variance empirical worked values") {
    const std::size_t n = 1'000'000;
    const auto coh = simulate_attack(setup_for(0.5, 1.0, SourceModel::coherent(10.0)), n, 21);
    CHECK(alice_conditional_variance_empirical(coh) == doctest::Approx(1.0).epsilon(0.01));

    const auto epr = simulate_attack(setup_for(0.5, 1.0, SourceModel::epr(10.0)), n, 23);
    CHECK(alice_conditional_variance_empirical(epr) == doctest::Approx(0.55).epsilon(0.01));
}

TEST_CASE("attack simulation is deterministic per seed") {
    const auto setup = setup_for(0.5, 2.0, SourceModel::coherent(10.0));
    const auto a = simulate_attack(setup, 4096, 77);
    const auto b = simulate_attack(setup, 4096, 77);
    const auto c = simulate_attack(setup, 4096, 78);
    const auto ax = a.column("x_B");
    const auto bx = b.column("x_B");
    const auto cx = c.column("x_B");
    bool same = true, differs = false;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        same = same && ax[i] == bx[i];
        differs = differs || ax[i] != cx[i];
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("small batches are flagged") {
    const auto setup = setup_for(0.5, 2.0, SourceModel::coherent(10.0));
    const auto est = eve_conditional_variance_empirical(simulate_attack(setup, 500, 1));
    CHECK(est.low_samples);
}
