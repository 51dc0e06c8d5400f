#pragma once

#include "cvqkd/channel.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace cvqkd {

// One swept parameter over a linear or log grid, everything else held
// fixed. Grid points that violate a domain constraint become explicit
// invalid rows instead of disappearing from the output.
struct SweepSpec {
    std::string axis = "g";  // g | loss_db | v | s | epsilon
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
    bool log_spacing = false;

    double g = 1.0;
    double epsilon = 0.0;
    double v = 10.0;
    double s = 1.0;  // squeezed-source preparation noise

    std::vector<Protocol> protocols{Protocol::coherent, Protocol::epr};

    void validate() const;
};

// Spec file: {"axis": {"param", "min", "max", "count", "spacing"},
//             "fixed": {"g"|"loss_db", "epsilon", "v", "s"},
//             "protocols": [...]}.
SweepSpec sweep_spec_from_json(const nlohmann::json& j);

struct SweepRow {
    std::size_t idx = 0;
    bool valid = false;
    double g = 0.0, loss_db = 0.0, chi = 0.0, epsilon = 0.0;
    double v = 0.0, s = 0.0, gchi = 0.0;
    // Indexed like spec.protocols.
    std::vector<double> delta_i;
    std::vector<bool> secure;
    std::vector<double> gchi_bound;
};

std::vector<double> sweep_grid(const SweepSpec& spec);
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// Header plus one row per grid point, ordered by idx. Invalid rows keep
// their inputs and carry nan outputs with valid=0.
void write_sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows, std::ostream& os);

} // namespace cvqkd
