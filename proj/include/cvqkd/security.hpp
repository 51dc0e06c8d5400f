#pragma once

#include "cvqkd/channel.hpp"
#include "cvqkd/stats.hpp"

namespace cvqkd {

// Analytic conditional variances for one quadrature pair, in n0 units.
// v_b_given_a_min and v_b_given_e_min saturate the Heisenberg product
// exactly: their product is n0^2 when cross-paired with the conjugate
// quadrature's channel parameters.
struct ConditionalVarianceSet {
    double v_b_given_a = 0.0;      // G (chi + s) n0
    double v_b_given_a_min = 0.0;  // G (chi + 1/V) n0
    double v_b_given_e_min = 0.0;  // n0 / (G' (chi' + 1/V)), conjugate params
};

double alice_conditional_variance(double g, double chi, double s, ShotNoise n0 = {});
double alice_min_conditional_variance(double g, double chi, double v, ShotNoise n0 = {});

// Lower bound on Eve's conditional variance for one quadrature; built from
// the CONJUGATE quadrature's parameters (the x-bound uses p-parameters).
// Returns +infinity when the denominator vanishes.
double eve_min_conditional_variance(double g_conj, double chi_conj, double v, ShotNoise n0 = {});

// Bounds for both quadratures of a channel/source pair.
Quad<ConditionalVarianceSet> conditional_variances(const ChannelModel& channel,
                                                   const SourceModel& source,
                                                   ShotNoise n0 = {});

struct SecurityCondition {
    double product = 0.0;  // (G chi + G s)(G chi + G/V)
    bool secure = false;   // product < 1
};

SecurityCondition security_condition(double g, double chi, double s, double v);

// General two-quadrature form: the x-keyed product pairs Alice's x-variance
// with Eve's x-bound (p-parameters), and vice versa. Either product below 1
// makes the protocol workable on that quadrature.
struct AsymmetricSecurityCondition {
    double product_x = 0.0;
    double product_p = 0.0;
    bool secure = false;
};

AsymmetricSecurityCondition security_condition_asymmetric(const ChannelModel& channel,
                                                          double s, double v);

// Secret rate per retained symbol, -1/2 log2 of the security product.
double delta_i(double g, double chi, double s, double v);

// Per emitted symbol: EPR/squeezed protocols keep only the half of the
// symbols where the bases agreed, coherent keeps all of them.
double delta_i_epr(double g, double chi, double v);       // = delta_i(s=1/V)/2
double delta_i_coherent(double g, double chi, double v);  // = delta_i(s=1)

// High-modulation bound on the product G*chi for a secure reverse protocol.
double max_tolerable_added_noise(double g, double s);

// Closed-form excess-noise thresholds: (V-1)/(2V) for coherent (small-G
// limit) and (V-1)/V for EPR (exact at any G <= 1).
double excess_noise_threshold(double v, Protocol protocol);

// Exact security boundary in epsilon at finite G, by bisection on the rate.
double excess_noise_boundary(double g, double v, Protocol protocol);

double high_loss_asymptote(double g);              // G / (2 ln 2)
double bb84_reference_rate(double g, double n_bar);  // (1/2) G n_bar
bool dr_loss_limit_secure(double g);               // direct reconciliation: g > 1/2

// Smallest still-secure gain at fixed excess noise, for threshold-distance
// reporting. The secure set within (0,1] is an interval ending at G = 1.
enum class LossLimitKind { unlimited, bounded, never_secure };

struct LossLimit {
    LossLimitKind kind = LossLimitKind::unlimited;
    double g = 0.0;  // boundary gain, meaningful when kind == bounded
};

LossLimit max_loss_boundary(double epsilon, double v, Protocol protocol);

struct KeyRateReport {
    Protocol protocol = Protocol::coherent;
    double g = 0.0, chi = 0.0, v = 0.0, s = 0.0;
    double n0 = 1.0;
    double i_ba = 0.0;               // bits per retained symbol
    double i_be = 0.0;
    double delta_i = 0.0;            // i_ba - i_be
    double delta_i_per_symbol = 0.0; // x1 coherent, x1/2 epr/squeezed
    bool secure = false;             // delta_i > 0
    bool unbounded = false;          // rate diverged (infinite conditional variance)
};

KeyRateReport make_key_rate_report(const SourceModel& source, double g, double chi,
                                   ShotNoise n0 = {});

} // namespace cvqkd
