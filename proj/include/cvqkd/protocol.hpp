#pragma once

#include "cvqkd/channel.hpp"
#include "cvqkd/sample_batch.hpp"
#include "cvqkd/security.hpp"

namespace cvqkd {

// How the ground-truth channel is realized: directly sampled Gaussian noise,
// or the entangling-cloner attack with the same (G, chi). The two must be
// indistinguishable to Alice and Bob's parameter estimation.
enum class Realization { direct, cloner };

const char* to_string(Realization r);
Realization realization_from_string(std::string_view name);

struct ProtocolRun {
    SourceModel source;
    ChannelModel channel;  // ground truth, hidden from estimation
    std::size_t n_symbols = 0;
    double reveal_fraction = 0.1;  // in (0, 1); revealed symbols leave the key set
    std::uint64_t seed = 0;
    Realization realization = Realization::direct;
    double k_sigma = 3.0;  // pessimism padding for the abort decision
    ShotNoise n0;
};

struct ParameterEstimate {
    double value = 0.0;
    double std_error = 0.0;
    bool clamped = false;  // negative chi estimate clamped to zero
};

struct EstimatedChannel {
    ParameterEstimate g_x, g_p;
    ParameterEstimate chi_x, chi_p;
    std::size_t n_revealed_x = 0;
    std::size_t n_revealed_p = 0;
};

struct ProtocolResult {
    SampleBatch sifted;    // key-bearing symbols; columns index, basis, alice, bob
    SampleBatch revealed;  // sacrificed symbols, same columns
    EstimatedChannel estimate;
    KeyRateReport report;   // plug-in rate at the point estimates
    KeyRateReport verdict;  // rate at the k_sigma-pessimised estimates
    bool abort = false;     // verdict not secure
    std::size_t n_kept = 0; // sifted + revealed
};

// Per-quadrature slope-and-residual regression on the revealed pairs:
// G = slope^2, chi = residual/(G n0) - s. Requires >= 10 pairs per
// quadrature.
EstimatedChannel estimate_channel(const SampleBatch& revealed, const SourceModel& source,
                                  ShotNoise n0 = {});

// Key-rate report at the estimates shifted k_sigma standard errors toward
// pessimism (worst corner of the +-k_sigma box, general two-quadrature
// security conditions). k_sigma = 0 gives the plug-in report.
KeyRateReport secure_verdict(const EstimatedChannel& estimate, const SourceModel& source,
                             double k_sigma = 3.0, ShotNoise n0 = {});

// Quantum exchange, sifting, reveal-and-estimate, and rate evaluation.
ProtocolResult run_protocol(const ProtocolRun& run);

} // namespace cvqkd
