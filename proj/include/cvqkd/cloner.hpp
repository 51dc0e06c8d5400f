#pragma once

#include "cvqkd/channel.hpp"
#include "cvqkd/sample_batch.hpp"
#include "cvqkd/security.hpp"

#include <stdexcept>

namespace cvqkd {

// Raised when a requested simulation cannot be built (distinct from bad
// parameter values so the CLI can report it separately).
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Beam-splitter attack with an EPR-half ancilla: transmission G, injected
// field E1 of variance G*chi*n0/(1-G) decomposed into the part Eve can read
// off the twin beam (known) and the part she cannot (unknown), with
// var(unknown) = n0^2 / var(E1).
struct ClonerSetup {
    ChannelModel channel;  // symmetric, G < 1
    SourceModel source;
    ShotNoise n0;
    double e1_variance = 0.0;
    double known_variance = 0.0;
    double unknown_variance = 0.0;
};

ClonerSetup build_cloner(const ChannelModel& channel, const SourceModel& source,
                         ShotNoise n0 = {});

// Runs the attack on n symbols. Columns per quadrature q in {x, p}:
// q_A, q_in, q_known, q_unknown, q_E1, q_B, q_E2, and the noise-corrected
// records q_prime_B, q_prime_E2. Deterministic per seed.
SampleBatch simulate_attack(const ClonerSetup& setup, std::size_t n, std::uint64_t seed);

struct EveConditionalEstimate {
    double variance = 0.0;          // conditioning on (x_known, x_E2)
    double reduced_variance = 0.0;  // conditioning x'_B on x'_E2
    bool consistent = false;        // the two agree within 3 combined SE
    bool low_samples = false;       // fewer than 1000 samples
};

// Empirical V_{x_B | x_known, x_E2}; the reduced form must agree with it.
EveConditionalEstimate eve_conditional_variance_empirical(const SampleBatch& batch);

// Empirical V_{x_B | x_A}; expected G (chi + s) n0.
double alice_conditional_variance_empirical(const SampleBatch& batch);

} // namespace cvqkd
