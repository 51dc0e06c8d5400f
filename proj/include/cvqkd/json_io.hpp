#pragma once

#include "cvqkd/channel.hpp"
#include "cvqkd/protocol.hpp"
#include "cvqkd/security.hpp"

#include <json.hpp>

#include <stdexcept>

namespace cvqkd {

// Raised for malformed or contradictory configuration input, as opposed to
// domain errors on well-formed values.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat config object. Source: "v" plus either "kind" ("coherent", "epr",
// "squeezed" with "s") or a bare "s" (treated as squeezed). Channel:
// exactly one of "g"/"loss_db", at most one of "chi"/"epsilon" (default
// epsilon 0, pure loss). Protocol extras: "n", "seed", "reveal_fraction",
// "realization", "k_sigma".
SourceModel source_from_json(const nlohmann::json& j);
ChannelModel channel_from_json(const nlohmann::json& j);
ProtocolRun protocol_run_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SourceModel& source);
nlohmann::json to_json(const ChannelModel& channel);
nlohmann::json to_json(const KeyRateReport& report);
nlohmann::json to_json(const ParameterEstimate& estimate);
nlohmann::json to_json(const EstimatedChannel& estimate);

// Full run report: estimate, plug-in report, pessimised verdict, counts.
nlohmann::json to_json(const ProtocolResult& result);

} // namespace cvqkd
