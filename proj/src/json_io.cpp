#include "cvqkd/json_io.hpp"

#include <string>

namespace cvqkd {

namespace {

using nlohmann::json;

const json* find(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double as_number(const json& j, const char* key) {
    const json* p = find(j, key);
    if (p == nullptr) throw config_error(std::string("missing field '") + key + "'");
    if (!p->is_number()) throw config_error(std::string("field '") + key + "' must be a number");
    return p->get<double>();
}

std::string as_string(const json& j, const char* key) {
    const json* p = find(j, key);
    if (p == nullptr) throw config_error(std::string("missing field '") + key + "'");
    if (!p->is_string()) throw config_error(std::string("field '") + key + "' must be a string");
    return p->get<std::string>();
}

void require_object(const json& j) {
    if (!j.is_object()) throw config_error("config must be a JSON object");
}

} // namespace

SourceModel source_from_json(const json& j) {
    require_object(j);
    const double v = as_number(j, "v");
    const json* kind = find(j, "kind");
    const json* s = find(j, "s");

    if (kind != nullptr) {
        const std::string name = as_string(j, "kind");
        if (name == "squeezed") return SourceModel::squeezed(v, as_number(j, "s"));
        if (s != nullptr)
            throw config_error("field 's' conflicts with kind '" + name + "'");
        switch (protocol_from_string(name)) {
        case Protocol::coherent: return SourceModel::coherent(v);
        case Protocol::epr: return SourceModel::epr(v);
        case Protocol::squeezed: break;
        }
    }
    if (s != nullptr) return SourceModel::squeezed(v, as_number(j, "s"));
    throw config_error("source needs 'kind' or an explicit 's'");
}

ChannelModel channel_from_json(const json& j) {
    require_object(j);
    const json* g_field = find(j, "g");
    const json* db_field = find(j, "loss_db");
    if ((g_field != nullptr) == (db_field != nullptr))
        throw config_error("channel needs exactly one of 'g' and 'loss_db'");
    const double g = g_field != nullptr ? as_number(j, "g") : gain_from_loss_db(as_number(j, "loss_db"));

    const json* chi_field = find(j, "chi");
    const json* eps_field = find(j, "epsilon");
    if (chi_field != nullptr && eps_field != nullptr)
        throw config_error("channel takes at most one of 'chi' and 'epsilon'");
    const double chi = chi_field != nullptr
                           ? as_number(j, "chi")
                           : chi_from_excess_noise(g, eps_field != nullptr ? as_number(j, "epsilon") : 0.0);
    return ChannelModel::symmetric(g, chi);
}

ProtocolRun protocol_run_from_json(const json& j) {
    require_object(j);
    static constexpr const char* kAllowed[] = {"v",           "kind",   "s",
                                               "g",           "loss_db", "chi",
                                               "epsilon",     "n",      "seed",
                                               "reveal_fraction", "realization", "k_sigma"};
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : kAllowed) known = known || key == a;
        if (!known) throw config_error("unknown field '" + key + "'");
    }

    ProtocolRun run{source_from_json(j), channel_from_json(j), 0, 0.1, 0,
                    Realization::direct, 3.0, ShotNoise{}};

    const json* n = find(j, "n");
    if (n == nullptr) throw config_error("missing field 'n'");
    if (!n->is_number_integer() || n->get<std::int64_t>() < 0)
        throw config_error("field 'n' must be a non-negative integer");
    run.n_symbols = n->get<std::uint64_t>();

    if (const json* seed = find(j, "seed"); seed != nullptr) {
        if (!seed->is_number_integer())
            throw config_error("field 'seed' must be an integer");
        run.seed = seed->get<std::uint64_t>();
    }
    if (find(j, "reveal_fraction") != nullptr)
        run.reveal_fraction = as_number(j, "reveal_fraction");
    if (find(j, "realization") != nullptr)
        run.realization = realization_from_string(as_string(j, "realization"));
    if (find(j, "k_sigma") != nullptr) run.k_sigma = as_number(j, "k_sigma");
    return run;
}

json to_json(const SourceModel& source) {
    return json{{"kind", to_string(source.kind())}, {"v", source.v_total()}, {"s", source.s()}};
}

json to_json(const ChannelModel& channel) {
    json j{{"g_x", channel.g_x()},
           {"chi_x", channel.chi_x()},
           {"g_p", channel.g_p()},
           {"chi_p", channel.chi_p()}};
    if (channel.is_symmetric()) {
        j["g"] = channel.g_x();
        j["chi"] = channel.chi_x();
    }
    return j;
}

json to_json(const KeyRateReport& report) {
    return json{{"protocol", to_string(report.protocol)},
                {"g", report.g},
                {"chi", report.chi},
                {"v", report.v},
                {"s", report.s},
                {"n0", report.n0},
                {"i_ba", report.i_ba},
                {"i_be", report.i_be},
                {"delta_i", report.delta_i},
                {"delta_i_per_symbol", report.delta_i_per_symbol},
                {"secure", report.secure},
                {"unbounded", report.unbounded}};
}

json to_json(const ParameterEstimate& estimate) {
    return json{{"value", estimate.value},
                {"std_error", estimate.std_error},
                {"clamped", estimate.clamped}};
}

json to_json(const EstimatedChannel& estimate) {
    return json{{"g_x", to_json(estimate.g_x)},
                {"g_p", to_json(estimate.g_p)},
                {"chi_x", to_json(estimate.chi_x)},
                {"chi_p", to_json(estimate.chi_p)},
                {"n_revealed_x", estimate.n_revealed_x},
                {"n_revealed_p", estimate.n_revealed_p}};
}

json to_json(const ProtocolResult& result) {
    return json{{"seed", result.sifted.seed()},
                {"n_kept", result.n_kept},
                {"n_sifted", result.sifted.size()},
                {"n_revealed", result.revealed.size()},
                {"estimate", to_json(result.estimate)},
                {"report", to_json(result.report)},
                {"verdict", to_json(result.verdict)},
                {"abort", result.abort}};
}

} // namespace cvqkd
