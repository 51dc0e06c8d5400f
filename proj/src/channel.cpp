#include "cvqkd/channel.hpp"

#include "cvqkd/kernels.hpp"
#include "cvqkd/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cvqkd {

const char* to_string(Protocol p) {
    switch (p) {
        case Protocol::coherent: return "coherent";
        case Protocol::epr: return "epr";
        case Protocol::squeezed: return "squeezed";
    }
    return "?";
}

Protocol protocol_from_string(std::string_view name) {
    if (name == "coherent") return Protocol::coherent;
    if (name == "epr") return Protocol::epr;
    if (name == "squeezed") return Protocol::squeezed;
    throw std::domain_error("unknown protocol '" + std::string(name) + "'");
}

SourceModel::SourceModel(double v_total, double s, Protocol kind)
    : v_total_(v_total), s_(s), kind_(kind) {
    if (!(v_total >= 1.0) || !std::isfinite(v_total))
        throw std::domain_error("source: total variance V must be >= 1");
    if (!(s >= 1.0 / v_total))
        throw std::domain_error("source: squeezing s must satisfy s >= 1/V");
    if (!(s <= v_total))
        throw std::domain_error("source: modulation variance V - s must be >= 0");
}

SourceModel SourceModel::coherent(double v_total) {
    return SourceModel(v_total, 1.0, Protocol::coherent);
}

SourceModel SourceModel::epr(double v_total) {
    if (!(v_total >= 1.0)) throw std::domain_error("source: total variance V must be >= 1");
    return SourceModel(v_total, 1.0 / v_total, Protocol::epr);
}

SourceModel SourceModel::squeezed(double v_total, double s) {
    return SourceModel(v_total, s, Protocol::squeezed);
}

ChannelModel::ChannelModel(double g_x, double chi_x, double g_p, double chi_p)
    : g_x_(g_x), chi_x_(chi_x), g_p_(g_p), chi_p_(chi_p) {
    if (!(g_x > 0.0) || !(g_p > 0.0) || !std::isfinite(g_x) || !std::isfinite(g_p))
        throw std::domain_error("channel: gains must be finite and > 0");
    if (!(chi_x >= 0.0) || !(chi_p >= 0.0) || !std::isfinite(chi_x) || !std::isfinite(chi_p))
        throw std::domain_error("channel: added noise must be finite and >= 0");
}

ChannelModel ChannelModel::symmetric(double g, double chi) {
    return ChannelModel(g, chi, g, chi);
}

ChannelModel ChannelModel::pure_loss(double g) {
    if (!(g > 0.0) || !(g <= 1.0))
        throw std::domain_error("pure-loss channel: gain must be in (0, 1]");
    return symmetric(g, (1.0 - g) / g);
}

bool ChannelModel::loss_compatible() const {
    return g_x_ <= 1.0 && g_p_ <= 1.0 &&
           g_x_ * chi_x_ >= 1.0 - g_x_ && g_p_ * chi_p_ >= 1.0 - g_p_;
}

Quad<ExcessNoise> excess_noise(const ChannelModel& channel) {
    return {ExcessNoise{channel.chi_x() - (1.0 - channel.g_x()) / channel.g_x()},
            ExcessNoise{channel.chi_p() - (1.0 - channel.g_p()) / channel.g_p()}};
}

double chi_from_excess_noise(double g, double epsilon) {
    if (!(g > 0.0) || !(g <= 1.0))
        throw std::domain_error("excess-noise parametrization requires 0 < G <= 1");
    const double chi = (1.0 - g) / g + epsilon;
    if (!(chi >= 0.0))
        throw std::domain_error("excess noise gives negative added noise chi");
    return chi;
}

ChannelModel make_pure_loss_channel(double g) {
    return ChannelModel::pure_loss(g);
}

double gain_from_loss_db(double loss_db) {
    if (!std::isfinite(loss_db)) throw std::domain_error("loss_db must be finite");
    return std::pow(10.0, -loss_db / 10.0);
}

double loss_db_from_gain(double g) {
    if (!(g > 0.0)) throw std::domain_error("gain must be > 0");
    return -10.0 * std::log10(g) + 0.0;  // normalizes -0 at g = 1
}

SampleBatch propagate(const SourceModel& source, const ChannelModel& channel,
                      const BatchParams& params) {
    validate(params.n0);
    if (params.n < 1) throw std::domain_error("propagate: n must be >= 1");

    const double n0 = params.n0.n0;
    const double mod_var = source.modulation_variance() * n0;
    const double prep_var = source.s() * n0;
    const std::size_t n = params.n;

    SampleBatch batch(params.seed, n);
    auto draw = [&](std::uint64_t stream, double variance) {
        return sample_gaussian(variance, n, rng::derive_seed(params.seed, stream));
    };

    std::vector<double> x_a = draw(streams::x_modulation, mod_var);
    std::vector<double> p_a = draw(streams::p_modulation, mod_var);
    std::vector<double> a_x = draw(streams::x_preparation, prep_var);
    std::vector<double> a_p = draw(streams::p_preparation, prep_var);
    std::vector<double> b_x = draw(streams::x_channel, channel.chi_x() * n0);
    std::vector<double> b_p = draw(streams::p_channel, channel.chi_p() * n0);

    std::vector<double> x_in(n), p_in(n), x_b(n), p_b(n);
    const double amp_x = std::sqrt(channel.g_x());
    const double amp_p = std::sqrt(channel.g_p());
    for (std::size_t i = 0; i < n; ++i) {
        x_in[i] = x_a[i] + a_x[i];
        p_in[i] = p_a[i] + a_p[i];
        x_b[i] = amp_x * (x_in[i] + b_x[i]);
        p_b[i] = amp_p * (p_in[i] + b_p[i]);
    }

    batch.add_column("x_A", std::move(x_a));
    batch.add_column("p_A", std::move(p_a));
    batch.add_column("A_x", std::move(a_x));
    batch.add_column("A_p", std::move(a_p));
    batch.add_column("x_in", std::move(x_in));
    batch.add_column("p_in", std::move(p_in));
    batch.add_column("B_x", std::move(b_x));
    batch.add_column("B_p", std::move(b_p));
    batch.add_column("x_B", std::move(x_b));
    batch.add_column("p_B", std::move(p_b));
    return batch;
}

} // namespace cvqkd
