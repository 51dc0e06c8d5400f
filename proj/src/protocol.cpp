#include "cvqkd/protocol.hpp"

#include "cvqkd/cloner.hpp"
#include "cvqkd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cvqkd {

const char* to_string(Realization r) {
    switch (r) {
    case Realization::direct: return "direct";
    case Realization::cloner: return "cloner";
    }
    throw std::invalid_argument("unknown realization");
}

Realization realization_from_string(std::string_view name) {
    if (name == "direct") return Realization::direct;
    if (name == "cloner") return Realization::cloner;
    throw std::invalid_argument("unknown realization: " + std::string(name));
}

namespace {

// Rate evaluation with free per-quadrature parameters. Each quadrature is
// scored with its own Alice-side variances and the conjugate quadrature's
// Eve bound. Half the retained symbols are keyed on each quadrature, so the
// per-symbol rate averages the two; a quadrature with a negative rate is
// dropped from the key (contributes zero) rather than subtracted.
KeyRateReport report_from_quadratures(const SourceModel& source, double g_x, double chi_x,
                                      double g_p, double chi_p, ShotNoise n0) {
    const double v = source.v_total();
    const double s = source.s();

    const auto rate_pair = [&](double g_key, double chi_key, double g_conj, double chi_conj) {
        const double signal = g_key * (v + chi_key) * n0.n0;
        const double i_ba = shannon_rate(signal, alice_conditional_variance(g_key, chi_key, s, n0));
        const double i_be =
            shannon_rate(signal, eve_min_conditional_variance(g_conj, chi_conj, v, n0));
        return std::pair{i_ba, i_be};
    };

    const auto [i_ba_x, i_be_x] = rate_pair(g_x, chi_x, g_p, chi_p);
    const auto [i_ba_p, i_be_p] = rate_pair(g_p, chi_p, g_x, chi_x);
    const double delta_x = i_ba_x - i_be_x;
    const double delta_p = i_ba_p - i_be_p;
    const bool keyed_x = delta_x > 0.0;
    const bool keyed_p = delta_p > 0.0;

    KeyRateReport report;
    report.protocol = source.kind();
    report.v = v;
    report.s = s;
    report.n0 = n0.n0;
    if (keyed_x || keyed_p) {
        const double wx = keyed_x ? 0.5 : 0.0;
        const double wp = keyed_p ? 0.5 : 0.0;
        report.g = keyed_x == keyed_p ? 0.5 * (g_x + g_p) : (keyed_x ? g_x : g_p);
        report.chi = keyed_x == keyed_p ? 0.5 * (chi_x + chi_p) : (keyed_x ? chi_x : chi_p);
        report.i_ba = wx * i_ba_x + wp * i_ba_p;
        report.i_be = wx * i_be_x + wp * i_be_p;
        report.delta_i = wx * delta_x + wp * delta_p;
    } else {
        // Nothing worth keying; report the less hopeless quadrature.
        const bool use_x = !(delta_p > delta_x);
        report.g = use_x ? g_x : g_p;
        report.chi = use_x ? chi_x : chi_p;
        report.i_ba = use_x ? i_ba_x : i_ba_p;
        report.i_be = use_x ? i_be_x : i_be_p;
        report.delta_i = use_x ? delta_x : delta_p;
    }
    const double retain = source.kind() == Protocol::coherent ? 1.0 : 0.5;
    report.delta_i_per_symbol = retain * report.delta_i;
    report.secure = report.delta_i > 0.0;
    report.unbounded = std::isinf(report.delta_i);
    return report;
}

struct QuadratureFit {
    ParameterEstimate g, chi;
};

QuadratureFit fit_quadrature(std::span<const double> alice, std::span<const double> bob,
                             double s, ShotNoise n0) {
    const std::size_t n = alice.size();
    if (n < 10) throw std::domain_error("need at least 10 revealed pairs per quadrature");

    const ConditionalFit fit = empirical_conditional_variance(alice, bob);
    const double slope = fit.estimator.coefficient;
    const double resid = fit.variance;
    const double maa = mean_square(alice);
    if (!(maa > 0.0) || slope == 0.0 || !(resid > 0.0))
        throw std::runtime_error("degenerate revealed sample, channel fit impossible");

    const double nd = static_cast<double>(n);
    const double se_slope = std::sqrt(resid / (nd * maa));

    QuadratureFit out;
    out.g.value = slope * slope;
    out.g.std_error = 2.0 * std::abs(slope) * se_slope;

    // resid estimates G (chi + s) n0; its relative error combines the
    // chi-squared spread of the residual with the slope uncertainty.
    const double total = resid / (out.g.value * n0.n0);
    const double rel_var = 2.0 / nd + 4.0 * se_slope * se_slope / (slope * slope);
    const double raw_chi = total - s;
    out.chi.clamped = raw_chi < 0.0;
    out.chi.value = std::max(raw_chi, 0.0);
    out.chi.std_error = total * std::sqrt(rel_var);
    return out;
}

} // namespace

EstimatedChannel estimate_channel(const SampleBatch& revealed, const SourceModel& source,
                                  ShotNoise n0) {
    validate(n0);
    const auto basis = revealed.column("basis");
    const auto alice = revealed.column("alice");
    const auto bob = revealed.column("bob");

    std::vector<double> ax, bx, ap, bp;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i] == 0.0) {
            ax.push_back(alice[i]);
            bx.push_back(bob[i]);
        } else {
            ap.push_back(alice[i]);
            bp.push_back(bob[i]);
        }
    }

    const QuadratureFit fx = fit_quadrature(ax, bx, source.s(), n0);
    const QuadratureFit fp = fit_quadrature(ap, bp, source.s(), n0);

    EstimatedChannel est;
    est.g_x = fx.g;
    est.chi_x = fx.chi;
    est.g_p = fp.g;
    est.chi_p = fp.chi;
    est.n_revealed_x = ax.size();
    est.n_revealed_p = ap.size();
    return est;
}

KeyRateReport secure_verdict(const EstimatedChannel& estimate, const SourceModel& source,
                             double k_sigma, ShotNoise n0) {
    validate(n0);
    if (!(k_sigma >= 0.0) || !std::isfinite(k_sigma))
        throw std::domain_error("k_sigma must be finite and non-negative");

    constexpr double kMinGain = 1e-12;
    const auto padded = [&](const ParameterEstimate& p, double sign, double floor) {
        return std::max(p.value + sign * k_sigma * p.std_error, floor);
    };

    KeyRateReport worst;
    bool have = false;
    for (const double sg_x : {-1.0, 1.0}) {
        for (const double sc_x : {-1.0, 1.0}) {
            for (const double sg_p : {-1.0, 1.0}) {
                for (const double sc_p : {-1.0, 1.0}) {
                    const KeyRateReport r = report_from_quadratures(
                        source, padded(estimate.g_x, sg_x, kMinGain),
                        padded(estimate.chi_x, sc_x, 0.0), padded(estimate.g_p, sg_p, kMinGain),
                        padded(estimate.chi_p, sc_p, 0.0), n0);
                    if (!have || r.delta_i < worst.delta_i) {
                        worst = r;
                        have = true;
                    }
                }
            }
        }
    }
    return worst;
}

ProtocolResult run_protocol(const ProtocolRun& run) {
    validate(run.n0);
    if (run.n_symbols < 100)
        throw std::invalid_argument("n_symbols must be at least 100");
    if (!(run.reveal_fraction > 0.0) || !(run.reveal_fraction < 1.0))
        throw std::invalid_argument("reveal_fraction must lie in (0, 1)");
    if (!(run.k_sigma >= 0.0) || !std::isfinite(run.k_sigma))
        throw std::invalid_argument("k_sigma must be finite and non-negative");

    const BatchParams params{run.n_symbols, run.seed, run.n0};
    const SampleBatch batch =
        run.realization == Realization::direct
            ? propagate(run.source, run.channel, params)
            : simulate_attack(build_cloner(run.channel, run.source, run.n0), run.n_symbols,
                              run.seed);

    const auto x_a = batch.column("x_A");
    const auto p_a = batch.column("p_A");
    const auto x_b = batch.column("x_B");
    const auto p_b = batch.column("p_B");

    // Bob measures one random quadrature per symbol. With a coherent source
    // Alice modulated both, so every symbol survives; otherwise only the
    // symbols where her quadrature choice matches his do.
    const bool keep_all = run.source.kind() == Protocol::coherent;
    rng::Xoshiro256pp bob_gen(rng::derive_seed(run.seed, streams::bob_basis));
    rng::Xoshiro256pp alice_gen(rng::derive_seed(run.seed, streams::alice_basis));

    std::vector<std::size_t> kept;
    std::vector<double> kept_basis;
    kept.reserve(run.n_symbols);
    kept_basis.reserve(run.n_symbols);
    for (std::size_t i = 0; i < run.n_symbols; ++i) {
        const bool bob_p = bob_gen.coin();
        if (!keep_all && alice_gen.coin() != bob_p) continue;
        kept.push_back(i);
        kept_basis.push_back(bob_p ? 1.0 : 0.0);
    }

    const std::size_t n_kept = kept.size();
    const std::size_t n_reveal =
        static_cast<std::size_t>(run.reveal_fraction * static_cast<double>(n_kept));
    if (n_reveal < 20)
        throw std::domain_error("too few revealed symbols for channel estimation");

    // Seeded partial Fisher-Yates picks the revealed subset; everything else
    // stays in the key set, so the two are disjoint by construction.
    rng::Xoshiro256pp sel(rng::derive_seed(run.seed, streams::reveal_selection));
    const auto bounded = [&sel](std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(sel.next()) * bound) >> 64);
    };
    std::vector<std::size_t> order(n_kept);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < n_reveal; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded(n_kept - i));
        std::swap(order[i], order[j]);
    }
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_reveal));
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(n_reveal), order.end());

    const auto build = [&](std::size_t first, std::size_t count) {
        std::vector<double> index(count), bas(count), alice(count), bob(count);
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t pos = order[first + k];
            const std::size_t sym = kept[pos];
            index[k] = static_cast<double>(sym);
            bas[k] = kept_basis[pos];
            alice[k] = kept_basis[pos] == 0.0 ? x_a[sym] : p_a[sym];
            bob[k] = kept_basis[pos] == 0.0 ? x_b[sym] : p_b[sym];
        }
        SampleBatch out(run.seed, count);
        out.add_column("index", std::move(index));
        out.add_column("basis", std::move(bas));
        out.add_column("alice", std::move(alice));
        out.add_column("bob", std::move(bob));
        return out;
    };

    SampleBatch revealed = build(0, n_reveal);
    SampleBatch sifted = build(n_reveal, n_kept - n_reveal);

    const EstimatedChannel estimate = estimate_channel(revealed, run.source, run.n0);
    KeyRateReport report = secure_verdict(estimate, run.source, 0.0, run.n0);
    KeyRateReport verdict = secure_verdict(estimate, run.source, run.k_sigma, run.n0);

    ProtocolResult result{std::move(sifted), std::move(revealed), estimate,
                          report,            verdict,             !verdict.secure,
                          n_kept};
    return result;
}

} // namespace cvqkd
