#pragma once

#include "cvqkd/sample_batch.hpp"
#include "cvqkd/stats.hpp"

#include <cstdint>

namespace cvqkd {

// Protocol variant, determined by Alice's source preparation.
enum class Protocol { coherent, epr, squeezed };

const char* to_string(Protocol p);
Protocol protocol_from_string(std::string_view name);

// Per-quadrature pair of values. x and p play symmetric roles; security
// bounds cross-pair them (an x-bound is built from p-parameters).
template <class T>
struct Quad {
    T x{};
    T p{};
};

// Alice's field preparation: total variance V and preparation-noise variance
// s (her squeezing parameter), both in n0 units. Modulation variance per
// quadrature is V - s.
class SourceModel {
public:
    static SourceModel coherent(double v_total);          // s = 1
    static SourceModel epr(double v_total);               // s = 1/V
    static SourceModel squeezed(double v_total, double s);

    double v_total() const { return v_total_; }
    double s() const { return s_; }
    double modulation_variance() const { return v_total_ - s_; }
    Protocol kind() const { return kind_; }

private:
    SourceModel(double v_total, double s, Protocol kind);

    double v_total_;
    double s_;
    Protocol kind_;
};

// Gaussian channel x_B = sqrt(G_x) (x_in + B_x), var(B_x) = chi_x * n0.
// G is the intensity gain; the amplitude gain sqrt(G) is derived from it.
class ChannelModel {
public:
    ChannelModel(double g_x, double chi_x, double g_p, double chi_p);
    static ChannelModel symmetric(double g, double chi);
    static ChannelModel pure_loss(double g);  // chi = (1-g)/g, 0 < g <= 1

    double g_x() const { return g_x_; }
    double g_p() const { return g_p_; }
    double chi_x() const { return chi_x_; }
    double chi_p() const { return chi_p_; }
    bool is_symmetric() const { return g_x_ == g_p_ && chi_x_ == chi_p_; }

    // For G <= 1, losses alone force G*chi >= 1-G on each quadrature.
    bool loss_compatible() const;

private:
    double g_x_, chi_x_, g_p_, chi_p_;
};

// Added noise beyond the vacuum noise forced by loss: eps = chi - (1-G)/G.
struct ExcessNoise {
    double epsilon = 0.0;
};

Quad<ExcessNoise> excess_noise(const ChannelModel& channel);
double chi_from_excess_noise(double g, double epsilon);  // G <= 1 only

ChannelModel make_pure_loss_channel(double g);

// dB <-> intensity gain, G = 10^(-dB/10).
double gain_from_loss_db(double loss_db);
double loss_db_from_gain(double g);

struct BatchParams {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    ShotNoise n0;
};

// Fixed sub-stream ids for the named noise columns of a master seed. Shared
// across propagate, the cloner and the protocol runner so every column is an
// independent stream.
namespace streams {
inline constexpr std::uint64_t x_modulation = 1;
inline constexpr std::uint64_t p_modulation = 2;
inline constexpr std::uint64_t x_preparation = 3;
inline constexpr std::uint64_t p_preparation = 4;
inline constexpr std::uint64_t x_channel = 5;
inline constexpr std::uint64_t p_channel = 6;
inline constexpr std::uint64_t x_eve_known = 7;
inline constexpr std::uint64_t x_eve_unknown = 8;
inline constexpr std::uint64_t p_eve_known = 9;
inline constexpr std::uint64_t p_eve_unknown = 10;
inline constexpr std::uint64_t alice_basis = 11;
inline constexpr std::uint64_t bob_basis = 12;
inline constexpr std::uint64_t reveal_selection = 13;
} // namespace streams

// Samples Alice's preparation and the channel action on both quadratures.
// Columns: x_A, p_A, A_x, A_p, x_in, p_in, B_x, B_p, x_B, p_B.
SampleBatch propagate(const SourceModel& source, const ChannelModel& channel,
                      const BatchParams& params);

} // namespace cvqkd
