#include "cvqkd/sweep.hpp"

#include "cvqkd/json_io.hpp"
#include "cvqkd/security.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cvqkd {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool known_axis(const std::string& axis) {
    return axis == "g" || axis == "loss_db" || axis == "v" || axis == "s" || axis == "epsilon";
}

double protocol_s(Protocol p, double v, double s) {
    switch (p) {
    case Protocol::coherent: return 1.0;
    case Protocol::epr: return 1.0 / v;
    case Protocol::squeezed: return s;
    }
    throw std::invalid_argument("unknown protocol");
}

} // namespace

void SweepSpec::validate() const {
    if (!known_axis(axis))
        throw std::invalid_argument("unknown sweep axis: " + axis);
    if (count < 1) throw std::invalid_argument("sweep needs at least one grid point");
    if (!std::isfinite(min) || !std::isfinite(max))
        throw std::invalid_argument("sweep bounds must be finite");
    if (log_spacing && (min <= 0.0 || max <= 0.0))
        throw std::invalid_argument("log spacing needs positive bounds");
    if (protocols.empty()) throw std::invalid_argument("sweep needs at least one protocol");
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("sweep spec must be a JSON object");
    SweepSpec spec;

    const auto axis_it = j.find("axis");
    if (axis_it == j.end() || !axis_it->is_object())
        throw config_error("sweep spec needs an 'axis' object");
    const nlohmann::json& axis = *axis_it;
    if (!axis.contains("param") || !axis["param"].is_string())
        throw config_error("axis field 'param' must be a string");
    spec.axis = axis["param"].get<std::string>();
    for (const char* key : {"min", "max"}) {
        if (!axis.contains(key) || !axis[key].is_number())
            throw config_error(std::string("axis field '") + key + "' must be a number");
    }
    spec.min = axis["min"].get<double>();
    spec.max = axis["max"].get<double>();
    if (!axis.contains("count") || !axis["count"].is_number_integer() ||
        axis["count"].get<std::int64_t>() < 1)
        throw config_error("axis field 'count' must be a positive integer");
    spec.count = axis["count"].get<std::size_t>();
    if (axis.contains("spacing")) {
        const std::string spacing = axis["spacing"].is_string()
                                        ? axis["spacing"].get<std::string>()
                                        : std::string();
        if (spacing != "linear" && spacing != "log")
            throw config_error("axis field 'spacing' must be 'linear' or 'log'");
        spec.log_spacing = spacing == "log";
    }

    if (j.contains("fixed")) {
        const nlohmann::json& fixed = j["fixed"];
        if (!fixed.is_object()) throw config_error("'fixed' must be an object");
        for (const auto& [key, value] : fixed.items()) {
            if (!value.is_number())
                throw config_error("fixed field '" + key + "' must be a number");
            const double x = value.get<double>();
            if (key == "g") spec.g = x;
            else if (key == "loss_db") spec.g = gain_from_loss_db(x);
            else if (key == "epsilon") spec.epsilon = x;
            else if (key == "v") spec.v = x;
            else if (key == "s") spec.s = x;
            else throw config_error("unknown fixed field '" + key + "'");
        }
    }

    if (j.contains("protocols")) {
        if (!j["protocols"].is_array()) throw config_error("'protocols' must be an array");
        spec.protocols.clear();
        for (const auto& p : j["protocols"]) {
            if (!p.is_string()) throw config_error("protocol names must be strings");
            spec.protocols.push_back(protocol_from_string(p.get<std::string>()));
        }
    }

    spec.validate();
    return spec;
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
    spec.validate();
    std::vector<double> grid(spec.count);
    if (spec.count == 1) {
        grid[0] = spec.min;
        return grid;
    }
    const double steps = static_cast<double>(spec.count - 1);
    for (std::size_t i = 0; i < spec.count; ++i) {
        const double t = static_cast<double>(i) / steps;
        grid[i] = spec.log_spacing ? spec.min * std::pow(spec.max / spec.min, t)
                                   : spec.min + (spec.max - spec.min) * t;
    }
    return grid;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    const std::vector<double> grid = sweep_grid(spec);
    const std::size_t n_protocols = spec.protocols.size();
    std::vector<SweepRow> rows(grid.size());

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(grid.size()); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const double t = grid[i];
        SweepRow& row = rows[i];
        row.idx = i;
        row.delta_i.assign(n_protocols, kNan);
        row.secure.assign(n_protocols, false);
        row.gchi_bound.assign(n_protocols, kNan);

        double g = spec.g, eps = spec.epsilon, v = spec.v, s = spec.s;
        if (spec.axis == "g") g = t;
        else if (spec.axis == "loss_db") g = gain_from_loss_db(t);
        else if (spec.axis == "v") v = t;
        else if (spec.axis == "s") s = t;
        else eps = t;

        row.epsilon = eps;
        row.v = v;
        row.s = s;
        row.g = g;
        row.loss_db = g > 0.0 ? loss_db_from_gain(g) : kNan;
        row.chi = kNan;
        row.gchi = kNan;

        bool all_ok = true;
        try {
            row.chi = chi_from_excess_noise(g, eps);
            row.gchi = g * row.chi;
            if (v < 1.0) throw std::domain_error("V below vacuum");
        } catch (const std::exception&) {
            row.valid = false;
            continue;
        }

        for (std::size_t k = 0; k < n_protocols; ++k) {
            const Protocol p = spec.protocols[k];
            try {
                const double sp = protocol_s(p, v, s);
                if (sp < 1.0 / v || sp > v) throw std::domain_error("s outside [1/V, V]");
                double delta = 0.0;
                switch (p) {
                case Protocol::coherent: delta = delta_i_coherent(g, row.chi, v); break;
                case Protocol::epr: delta = delta_i_epr(g, row.chi, v); break;
                case Protocol::squeezed: delta = 0.5 * delta_i(g, row.chi, sp, v); break;
                }
                row.delta_i[k] = delta;
                row.secure[k] = delta > 0.0;
                row.gchi_bound[k] = max_tolerable_added_noise(g, sp);
            } catch (const std::exception&) {
                all_ok = false;
            }
        }
        row.valid = all_ok;
    }
    return rows;
}

void write_sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows, std::ostream& os) {
    os << "idx,valid,g,loss_db,chi,epsilon,v,s,gchi";
    for (const Protocol p : spec.protocols) {
        const char* name = to_string(p);
        os << ",delta_i_" << name << ",secure_" << name << ",gchi_bound_" << name;
    }
    os << "\n";

    char buf[64];
    const auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        os << buf;
    };
    for (const SweepRow& row : rows) {
        os << row.idx << ',' << (row.valid ? 1 : 0) << ',';
        num(row.g);
        os << ',';
        num(row.loss_db);
        os << ',';
        num(row.chi);
        os << ',';
        num(row.epsilon);
        os << ',';
        num(row.v);
        os << ',';
        num(row.s);
        os << ',';
        num(row.gchi);
        for (std::size_t k = 0; k < spec.protocols.size(); ++k) {
            os << ',';
            num(row.delta_i[k]);
            os << ',' << (row.secure[k] ? 1 : 0) << ',';
            num(row.gchi_bound[k]);
        }
        os << "\n";
    }
}

} // namespace cvqkd
