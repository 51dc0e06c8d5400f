#include "cvqkd/security.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cvqkd {

namespace {

void check_channel_params(double g, double chi) {
    if (!(g > 0.0) || !std::isfinite(g)) throw std::domain_error("gain must be finite and > 0");
    if (!(chi >= 0.0) || std::isnan(chi)) throw std::domain_error("added noise must be >= 0");
}

void check_v(double v) {
    if (!(v >= 1.0)) throw std::domain_error("total variance V must be >= 1");
}

void check_s(double s, double v) {
    if (!(s > 0.0)) throw std::domain_error("squeezing s must be > 0");
    if (s < 1.0 / v) throw std::domain_error("unphysical source: s < 1/V");
}

} // namespace

double alice_conditional_variance(double g, double chi, double s, ShotNoise n0) {
    check_channel_params(g, chi);
    if (!(s > 0.0)) throw std::domain_error("squeezing s must be > 0");
    validate(n0);
    return g * (chi + s) * n0.n0;
}

double alice_min_conditional_variance(double g, double chi, double v, ShotNoise n0) {
    check_channel_params(g, chi);
    check_v(v);
    validate(n0);
    return g * (chi + 1.0 / v) * n0.n0;
}

double eve_min_conditional_variance(double g_conj, double chi_conj, double v, ShotNoise n0) {
    validate(n0);
    const double denom = alice_min_conditional_variance(g_conj, chi_conj, v, n0);
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return n0.n0 * n0.n0 / denom;
}

Quad<ConditionalVarianceSet> conditional_variances(const ChannelModel& channel,
                                                   const SourceModel& source,
                                                   ShotNoise n0) {
    const double v = source.v_total();
    const double s = source.s();
    Quad<ConditionalVarianceSet> out;
    out.x = {alice_conditional_variance(channel.g_x(), channel.chi_x(), s, n0),
             alice_min_conditional_variance(channel.g_x(), channel.chi_x(), v, n0),
             eve_min_conditional_variance(channel.g_p(), channel.chi_p(), v, n0)};
    out.p = {alice_conditional_variance(channel.g_p(), channel.chi_p(), s, n0),
             alice_min_conditional_variance(channel.g_p(), channel.chi_p(), v, n0),
             eve_min_conditional_variance(channel.g_x(), channel.chi_x(), v, n0)};
    return out;
}

SecurityCondition security_condition(double g, double chi, double s, double v) {
    check_channel_params(g, chi);
    check_v(v);
    check_s(s, v);
    const double product = (g * chi + g * s) * (g * chi + g / v);
    return {product, product < 1.0};
}

AsymmetricSecurityCondition security_condition_asymmetric(const ChannelModel& channel,
                                                          double s, double v) {
    check_v(v);
    check_s(s, v);
    const double gx = channel.g_x(), chix = channel.chi_x();
    const double gp = channel.g_p(), chip = channel.chi_p();
    AsymmetricSecurityCondition out;
    out.product_x = (gx * chix + gx * s) * (gp * chip + gp / v);
    out.product_p = (gp * chip + gp * s) * (gx * chix + gx / v);
    out.secure = out.product_x < 1.0 || out.product_p < 1.0;
    return out;
}

double delta_i(double g, double chi, double s, double v) {
    return -0.5 * std::log2(security_condition(g, chi, s, v).product);
}

double delta_i_epr(double g, double chi, double v) {
    check_channel_params(g, chi);
    check_v(v);
    return 0.5 * std::log2(1.0 / (g * chi + g / v));
}

double delta_i_coherent(double g, double chi, double v) {
    return delta_i(g, chi, 1.0, v);
}

double max_tolerable_added_noise(double g, double s) {
    if (!(g > 0.0) || !(s > 0.0)) throw std::domain_error("gain and squeezing must be > 0");
    const double gs = g * s;
    return 0.5 * (std::sqrt(gs * gs + 4.0) - gs);
}

double excess_noise_threshold(double v, Protocol protocol) {
    if (!(v > 1.0)) throw std::domain_error("excess-noise threshold requires V > 1");
    switch (protocol) {
        case Protocol::coherent: return (v - 1.0) / (2.0 * v);
        case Protocol::epr: return (v - 1.0) / v;
        case Protocol::squeezed: break;
    }
    throw std::domain_error("excess-noise threshold is defined for coherent and epr only");
}

double excess_noise_boundary(double g, double v, Protocol protocol) {
    if (!(g > 0.0) || !(g <= 1.0)) throw std::domain_error("boundary search requires 0 < G <= 1");
    if (!(v > 1.0)) throw std::domain_error("boundary search requires V > 1");
    auto rate = [&](double eps) {
        const double chi = (1.0 - g) / g + eps;
        return protocol == Protocol::epr ? delta_i_epr(g, chi, v) : delta_i_coherent(g, chi, v);
    };
    double lo = 0.0;
    if (!(rate(lo) > 0.0))
        throw std::runtime_error("no secure region at epsilon = 0");
    double hi = 1.0;
    while (rate(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("no insecure region found");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rate(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double high_loss_asymptote(double g) {
    if (!(g > 0.0)) throw std::domain_error("gain must be > 0");
    return g / (2.0 * std::numbers::ln2_v<double>);
}

double bb84_reference_rate(double g, double n_bar) {
    if (!(g > 0.0) || !(g <= 1.0)) throw std::domain_error("gain must be in (0, 1]");
    if (!(n_bar >= 0.0)) throw std::domain_error("mean photon number must be >= 0");
    return 0.5 * g * n_bar;
}

bool dr_loss_limit_secure(double g) {
    if (!(g > 0.0) || !(g <= 1.0)) throw std::domain_error("gain must be in (0, 1]");
    return g > 0.5;
}

LossLimit max_loss_boundary(double epsilon, double v, Protocol protocol) {
    if (!(epsilon >= 0.0)) throw std::domain_error("excess noise must be >= 0");
    if (!(v > 1.0)) throw std::domain_error("loss boundary requires V > 1");
    auto rate = [&](double g) {
        const double chi = (1.0 - g) / g + epsilon;
        return protocol == Protocol::epr ? delta_i_epr(g, chi, v) : delta_i_coherent(g, chi, v);
    };
    // The secure set within (0,1] is an interval ending at G = 1: the
    // security product is a concave quadratic in G equal to 1 at G = 0.
    if (!(rate(1.0) > 0.0)) return {LossLimitKind::never_secure, 0.0};
    double lo = 1e-12;
    if (rate(lo) > 0.0) return {LossLimitKind::unlimited, 0.0};
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (rate(mid) > 0.0 ? hi : lo) = mid;
    }
    return {LossLimitKind::bounded, 0.5 * (lo + hi)};
}

KeyRateReport make_key_rate_report(const SourceModel& source, double g, double chi,
                                   ShotNoise n0) {
    check_channel_params(g, chi);
    validate(n0);
    const double v = source.v_total();
    const double s = source.s();

    KeyRateReport report;
    report.protocol = source.kind();
    report.g = g;
    report.chi = chi;
    report.v = v;
    report.s = s;
    report.n0 = n0.n0;

    const double signal = g * (v + chi) * n0.n0;
    const double v_b_a = alice_conditional_variance(g, chi, s, n0);
    const double v_b_e = eve_min_conditional_variance(g, chi, v, n0);
    report.i_ba = shannon_rate(signal, v_b_a);
    report.i_be = std::isinf(v_b_e) ? -std::numeric_limits<double>::infinity()
                                    : shannon_rate(signal, v_b_e);
    report.delta_i = report.i_ba - report.i_be;
    const double retain = source.kind() == Protocol::coherent ? 1.0 : 0.5;
    report.delta_i_per_symbol = retain * report.delta_i;
    report.secure = report.delta_i > 0.0;
    report.unbounded = std::isinf(report.delta_i);
    return report;
}

} // namespace cvqkd
