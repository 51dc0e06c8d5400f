#include "cvqkd/channel.hpp"
#include "cvqkd/cloner.hpp"
#include "cvqkd/json_io.hpp"
#include "cvqkd/protocol.hpp"
#include "cvqkd/security.hpp"
#include "cvqkd/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

// Rates this close to zero (in bits) are reported as sitting on the
// security boundary rather than as strictly insecure.
constexpr double kBoundaryTolerance = 1e-12;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string fmt_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

const char* verdict_text(double delta) {
    if (std::abs(delta) <= kBoundaryTolerance) return "insecure (boundary)";
    return delta > 0.0 ? "secure" : "insecure";
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cvqkd::config_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw cvqkd::config_error(path + ": " + e.what());
    }
}

// Shared --g/--loss-db and --chi/--epsilon flag plumbing.
struct ChannelFlags {
    double g = 0.0, loss_db = 0.0, chi = 0.0, epsilon = 0.0;
    CLI::Option *g_opt = nullptr, *db_opt = nullptr, *chi_opt = nullptr, *eps_opt = nullptr;

    void attach(CLI::App* cmd, bool gain_required) {
        auto* gain = cmd->add_option_group("gain", "channel gain");
        g_opt = gain->add_option("--g", g, "intensity gain G");
        db_opt = gain->add_option("--loss-db", loss_db, "line loss in dB, G = 10^(-dB/10)");
        gain->require_option(gain_required ? 1 : 0, 1);

        auto* noise = cmd->add_option_group("noise", "added channel noise");
        chi_opt = noise->add_option("--chi", chi, "equivalent input noise chi (n0 units)");
        eps_opt = noise->add_option("--epsilon", epsilon,
                                    "excess noise beyond the loss-forced vacuum term");
        noise->require_option(0, 1);
    }

    double gain() const { return g_opt->count() ? g : cvqkd::gain_from_loss_db(loss_db); }

    cvqkd::ChannelModel resolve() const {
        const double gv = gain();
        const double chiv = chi_opt->count()
                                ? chi
                                : cvqkd::chi_from_excess_noise(gv, eps_opt->count() ? epsilon : 0.0);
        return cvqkd::ChannelModel::symmetric(gv, chiv);
    }
};

struct ThresholdRow {
    bool available = false;
    cvqkd::LossLimit limit;
    double max_loss_db = 0.0;
    double range_km = 0.0;
};

ThresholdRow threshold_row(double epsilon, double v, cvqkd::Protocol p, double db_per_km) {
    ThresholdRow row;
    try {
        row.limit = cvqkd::max_loss_boundary(epsilon, v, p);
        row.available = true;
        if (row.limit.kind == cvqkd::LossLimitKind::bounded) {
            row.max_loss_db = cvqkd::loss_db_from_gain(row.limit.g);
            row.range_km = row.max_loss_db / db_per_km;
        }
    } catch (const std::exception&) {
        row.available = false;
    }
    return row;
}

std::string threshold_text(const ThresholdRow& row) {
    if (!row.available) return "n/a";
    switch (row.limit.kind) {
    case cvqkd::LossLimitKind::unlimited: return "unlimited";
    case cvqkd::LossLimitKind::never_secure: return "never secure";
    case cvqkd::LossLimitKind::bounded:
        return fmt(row.max_loss_db) + " dB (" + fmt(row.range_km) + " km)";
    }
    return "n/a";
}

json threshold_json(const ThresholdRow& row) {
    if (!row.available) return json{{"kind", "n/a"}};
    switch (row.limit.kind) {
    case cvqkd::LossLimitKind::unlimited: return json{{"kind", "unlimited"}};
    case cvqkd::LossLimitKind::never_secure: return json{{"kind", "never_secure"}};
    default:
        return json{{"kind", "bounded"},
                    {"g", row.limit.g},
                    {"max_loss_db", row.max_loss_db},
                    {"range_km", row.range_km}};
    }
}

struct RateArgs {
    ChannelFlags channel;
    double v = 0.0;
    double s = 1.0;
    std::string protocol = "coherent";
    double db_per_km = 0.2;
    bool as_json = false;
    CLI::Option* s_opt = nullptr;
};

int cmd_rate(const RateArgs& args) {
    const cvqkd::ChannelModel channel = args.channel.resolve();
    const double g = channel.g_x();
    const double chi = channel.chi_x();
    const double eps = cvqkd::excess_noise(channel).x.epsilon;
    const cvqkd::Protocol selected = cvqkd::protocol_from_string(args.protocol);
    const bool with_squeezed = args.s_opt->count() > 0;
    if (selected == cvqkd::Protocol::squeezed && !with_squeezed)
        throw std::invalid_argument("--protocol squeezed needs --s");

    std::vector<cvqkd::SourceModel> sources{cvqkd::SourceModel::coherent(args.v),
                                            cvqkd::SourceModel::epr(args.v)};
    if (with_squeezed) sources.push_back(cvqkd::SourceModel::squeezed(args.v, args.s));

    std::vector<cvqkd::KeyRateReport> reports;
    for (const auto& source : sources)
        reports.push_back(cvqkd::make_key_rate_report(source, g, chi));

    const cvqkd::KeyRateReport* headline = nullptr;
    for (const auto& r : reports)
        if (r.protocol == selected) headline = &r;

    ThresholdRow thresholds[2] = {
        threshold_row(eps, args.v, cvqkd::Protocol::coherent, args.db_per_km),
        threshold_row(eps, args.v, cvqkd::Protocol::epr, args.db_per_km),
    };

    if (args.as_json) {
        json out{{"g", g},
                 {"loss_db", cvqkd::loss_db_from_gain(g)},
                 {"chi", chi},
                 {"epsilon", eps},
                 {"v", args.v},
                 {"db_per_km", args.db_per_km},
                 {"verdict",
                  json{{"protocol", cvqkd::to_string(selected)},
                       {"text", verdict_text(headline->delta_i)},
                       {"secure", headline->secure}}}};
        json jreports = json::object();
        for (const auto& r : reports) jreports[cvqkd::to_string(r.protocol)] = cvqkd::to_json(r);
        out["reports"] = jreports;
        out["threshold_distance"] = json{{"coherent", threshold_json(thresholds[0])},
                                         {"epr", threshold_json(thresholds[1])}};
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    std::cout << "channel: G=" << fmt(g) << " (" << fmt(cvqkd::loss_db_from_gain(g))
              << " dB), chi=" << fmt(chi) << ", epsilon=" << fmt(eps) << ", V=" << fmt(args.v)
              << "\n\n";
    std::printf("%-10s %12s %12s %14s %14s  %s\n", "protocol", "I_BA", "I_BE", "dI",
                "dI/symbol", "verdict");
    for (const auto& r : reports) {
        std::printf("%-10s %12s %12s %14s %14s  %s\n", cvqkd::to_string(r.protocol),
                    fmt(r.i_ba).c_str(), fmt(r.i_be).c_str(), fmt(r.delta_i).c_str(),
                    fmt(r.delta_i_per_symbol).c_str(), verdict_text(r.delta_i));
    }
    std::cout << "\nverdict (" << cvqkd::to_string(selected)
              << "): " << verdict_text(headline->delta_i) << "\n";
    std::cout << "\nthreshold distance at epsilon=" << fmt(eps) << " (" << fmt(args.db_per_km)
              << " dB/km):\n";
    std::cout << "  coherent: " << threshold_text(thresholds[0]) << "\n";
    std::cout << "  epr:      " << threshold_text(thresholds[1]) << "\n";
    return 0;
}

struct SweepArgs {
    std::string spec_file;
    std::string axis = "g";
    double min = 0.0, max = 0.0;
    std::size_t count = 0;
    bool log_spacing = false;
    ChannelFlags channel;
    double v = 10.0;
    double s = 1.0;
    std::vector<std::string> protocols{"coherent", "epr"};
    std::string output;
    CLI::Option *spec_opt = nullptr, *count_opt = nullptr;
};

int cmd_sweep(const SweepArgs& args) {
    cvqkd::SweepSpec spec;
    if (args.spec_opt->count() > 0) {
        spec = cvqkd::sweep_spec_from_json(load_json_file(args.spec_file));
    } else {
        if (args.count_opt->count() == 0)
            throw cvqkd::config_error("sweep needs --spec or --axis/--min/--max/--count");
        spec.axis = args.axis;
        spec.min = args.min;
        spec.max = args.max;
        spec.count = args.count;
        spec.log_spacing = args.log_spacing;
        if (args.channel.g_opt->count() || args.channel.db_opt->count())
            spec.g = args.channel.gain();
        if (args.channel.chi_opt->count())
            throw cvqkd::config_error("sweeps fix noise via --epsilon, not --chi");
        if (args.channel.eps_opt->count()) spec.epsilon = args.channel.epsilon;
        spec.v = args.v;
        spec.s = args.s;
        spec.protocols.clear();
        for (const auto& name : args.protocols)
            spec.protocols.push_back(cvqkd::protocol_from_string(name));
        spec.validate();
    }

    const std::vector<cvqkd::SweepRow> rows = cvqkd::run_sweep(spec);
    if (args.output.empty()) {
        cvqkd::write_sweep_csv(spec, rows, std::cout);
    } else {
        std::ofstream out(args.output);
        if (!out) throw std::runtime_error("cannot open " + args.output);
        cvqkd::write_sweep_csv(spec, rows, out);
    }
    return 0;
}

struct AttackArgs {
    ChannelFlags channel;
    double v = 0.0;
    double s = 1.0;
    std::string protocol = "coherent";
    std::uint64_t n = 1000000;
    std::uint64_t seed = 0;
    std::string csv_file;
    bool as_json = false;
    CLI::Option* s_opt = nullptr;
};

int cmd_attack(const AttackArgs& args) {
    const cvqkd::ChannelModel channel = args.channel.resolve();
    cvqkd::SourceModel source = cvqkd::SourceModel::coherent(args.v);
    switch (cvqkd::protocol_from_string(args.protocol)) {
    case cvqkd::Protocol::coherent: break;
    case cvqkd::Protocol::epr: source = cvqkd::SourceModel::epr(args.v); break;
    case cvqkd::Protocol::squeezed:
        if (args.s_opt->count() == 0) throw std::invalid_argument("--protocol squeezed needs --s");
        source = cvqkd::SourceModel::squeezed(args.v, args.s);
        break;
    }

    const cvqkd::ClonerSetup setup = cvqkd::build_cloner(channel, source);
    const cvqkd::SampleBatch batch = cvqkd::simulate_attack(setup, args.n, args.seed);
    if (!args.csv_file.empty()) {
        std::ofstream out(args.csv_file);
        if (!out) throw std::runtime_error("cannot open " + args.csv_file);
        batch.write_csv(out);
    }

    const auto cv = cvqkd::conditional_variances(channel, source).x;
    const double nd = static_cast<double>(args.n);
    const double se_scale = std::sqrt(2.0 / nd);

    const cvqkd::EveConditionalEstimate eve = cvqkd::eve_conditional_variance_empirical(batch);
    const double alice_emp = cvqkd::alice_conditional_variance_empirical(batch);

    struct Line {
        const char* name;
        double analytic, empirical;
    } lines[] = {
        {"V_B|A", cv.v_b_given_a, alice_emp},
        {"V_B|E,min", cv.v_b_given_e_min, eve.variance},
        {"V_B|E,reduced", cv.v_b_given_e_min, eve.reduced_variance},
    };

    bool pass = eve.consistent;
    for (const auto& line : lines) {
        const double z = (line.empirical - line.analytic) / (line.analytic * se_scale);
        if (!(std::abs(z) < 3.0)) pass = false;
    }
    const double product = cv.v_b_given_a_min * cv.v_b_given_e_min;
    const double empirical_product =
        cvqkd::alice_min_conditional_variance(channel.g_x(), channel.chi_x(), source.v_total()) *
        eve.variance;

    if (args.as_json) {
        json out{{"g", channel.g_x()},
                 {"chi", channel.chi_x()},
                 {"v", source.v_total()},
                 {"s", source.s()},
                 {"n", args.n},
                 {"seed", args.seed},
                 {"e1_variance", setup.e1_variance},
                 {"known_variance", setup.known_variance},
                 {"unknown_variance", setup.unknown_variance},
                 {"heisenberg_product", product},
                 {"empirical_min_product", empirical_product},
                 {"pass", pass}};
        json measured = json::object();
        for (const auto& line : lines) {
            const double z = (line.empirical - line.analytic) / (line.analytic * se_scale);
            measured[line.name] =
                json{{"analytic", line.analytic}, {"empirical", line.empirical}, {"z", z}};
        }
        out["conditional_variances"] = measured;
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    std::cout << "entangling cloner: G=" << fmt_full(channel.g_x())
              << " chi=" << fmt_full(channel.chi_x()) << " V=" << fmt_full(source.v_total())
              << " s=" << fmt_full(source.s()) << " n=" << args.n << " seed=" << args.seed
              << "\n";
    std::cout << "injected variances: E1=" << fmt_full(setup.e1_variance)
              << " known=" << fmt_full(setup.known_variance)
              << " unknown=" << fmt_full(setup.unknown_variance) << "\n\n";
    std::printf("%-14s %20s %20s %10s\n", "quantity", "analytic", "empirical", "z");
    for (const auto& line : lines) {
        const double z = (line.empirical - line.analytic) / (line.analytic * se_scale);
        std::printf("%-14s %20s %20s %10s\n", line.name, fmt_full(line.analytic).c_str(),
                    fmt_full(line.empirical).c_str(), fmt(z).c_str());
    }
    std::cout << "\nHeisenberg product V_B|A,min * V_B|E,min = " << fmt_full(product) << "\n";
    std::cout << "empirical min product = " << fmt_full(empirical_product) << "\n";
    std::cout << "saturation at 3 SE: " << (pass ? "PASS" : "FAIL") << "\n";
    return 0;
}

struct SimulateArgs {
    std::string config_file;
    ChannelFlags channel;
    double v = 10.0;
    std::string kind = "coherent";
    double s = 1.0;
    std::uint64_t n = 100000;
    std::uint64_t seed = 0;
    double reveal_fraction = 0.1;
    std::string realization = "direct";
    double k_sigma = 3.0;
    std::string output;
    std::string reveal_csv;
    CLI::Option *config_opt = nullptr, *seed_opt = nullptr, *s_opt = nullptr;
};

int cmd_simulate(const SimulateArgs& args) {
    cvqkd::ProtocolRun run{cvqkd::SourceModel::coherent(1.0),
                           cvqkd::ChannelModel::pure_loss(1.0),
                           0,
                           0.1,
                           0,
                           cvqkd::Realization::direct,
                           3.0,
                           cvqkd::ShotNoise{}};
    if (args.config_opt->count() > 0) {
        run = cvqkd::protocol_run_from_json(load_json_file(args.config_file));
        if (args.seed_opt->count() > 0) run.seed = args.seed;
    } else {
        switch (cvqkd::protocol_from_string(args.kind)) {
        case cvqkd::Protocol::coherent: run.source = cvqkd::SourceModel::coherent(args.v); break;
        case cvqkd::Protocol::epr: run.source = cvqkd::SourceModel::epr(args.v); break;
        case cvqkd::Protocol::squeezed:
            if (args.s_opt->count() == 0)
                throw std::invalid_argument("--kind squeezed needs --s");
            run.source = cvqkd::SourceModel::squeezed(args.v, args.s);
            break;
        }
        run.channel = args.channel.resolve();
        run.n_symbols = args.n;
        run.seed = args.seed;
        run.reveal_fraction = args.reveal_fraction;
        run.realization = cvqkd::realization_from_string(args.realization);
        run.k_sigma = args.k_sigma;
    }

    const cvqkd::ProtocolResult result = cvqkd::run_protocol(run);
    if (!args.reveal_csv.empty()) {
        std::ofstream out(args.reveal_csv);
        if (!out) throw std::runtime_error("cannot open " + args.reveal_csv);
        result.revealed.write_csv(out);
    }

    json out = cvqkd::to_json(result);
    out["config"] = json{{"kind", cvqkd::to_string(run.source.kind())},
                         {"v", run.source.v_total()},
                         {"s", run.source.s()},
                         {"g", run.channel.g_x()},
                         {"chi", run.channel.chi_x()},
                         {"n", run.n_symbols},
                         {"seed", run.seed},
                         {"reveal_fraction", run.reveal_fraction},
                         {"realization", cvqkd::to_string(run.realization)},
                         {"k_sigma", run.k_sigma}};
    const std::string text = out.dump(2);
    if (args.output.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream file(args.output);
        if (!file) throw std::runtime_error("cannot open " + args.output);
        file << text << "\n";
    }
    return 0;
}

struct CompareArgs {
    ChannelFlags channel;
    double v = 10.0;
    double symbol_rate = 2e6;
    bool as_json = false;
};

int cmd_compare(const CompareArgs& args) {
    const cvqkd::ChannelModel channel = args.channel.resolve();
    const double g = channel.g_x();
    const double chi = channel.chi_x();

    struct Line {
        const char* name;
        double per_symbol;
    } lines[] = {
        {"delta_i_coherent", cvqkd::delta_i_coherent(g, chi, args.v)},
        {"delta_i_epr_per_symbol", cvqkd::delta_i_epr(g, chi, args.v)},
        {"high_loss_asymptote", cvqkd::high_loss_asymptote(g)},
        {"bb84_nbar_1", cvqkd::bb84_reference_rate(g, 1.0)},
        {"bb84_nbar_0.1", cvqkd::bb84_reference_rate(g, 0.1)},
    };

    if (args.as_json) {
        json out{{"g", g},
                 {"chi", chi},
                 {"v", args.v},
                 {"symbol_rate_hz", args.symbol_rate}};
        for (const auto& line : lines) {
            out[line.name] = json{{"bits_per_symbol", line.per_symbol},
                                  {"bits_per_second", line.per_symbol * args.symbol_rate}};
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    std::cout << "channel: G=" << fmt(g) << ", chi=" << fmt(chi) << ", V=" << fmt(args.v)
              << ", symbol rate " << fmt(args.symbol_rate) << " Hz\n\n";
    std::printf("%-24s %16s %16s\n", "quantity", "bits/symbol", "bits/s");
    for (const auto& line : lines) {
        std::printf("%-24s %16s %16s\n", line.name, fmt(line.per_symbol).c_str(),
                    fmt(line.per_symbol * args.symbol_rate).c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reverse-reconciliation CV-QKD rate calculator and simulator"};
    app.require_subcommand(1);

    RateArgs rate;
    CLI::App* rate_cmd = app.add_subcommand("rate", "analytic rates and security verdict");
    rate.channel.attach(rate_cmd, true);
    rate_cmd->add_option("--v", rate.v, "total source variance V (n0 units)")->required();
    rate.s_opt = rate_cmd->add_option("--s", rate.s, "squeezed-source preparation noise");
    rate_cmd->add_option("--protocol", rate.protocol, "headline protocol")
        ->check(CLI::IsMember({"coherent", "epr", "squeezed"}));
    rate_cmd->add_option("--db-per-km", rate.db_per_km, "fiber attenuation for distances");
    rate_cmd->add_flag("--json", rate.as_json, "emit JSON instead of a table");

    SweepArgs sweep;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "grid evaluation to CSV");
    sweep.spec_opt = sweep_cmd->add_option("--spec", sweep.spec_file, "JSON sweep spec file");
    sweep_cmd->add_option("--axis", sweep.axis, "swept parameter: g|loss_db|v|s|epsilon")
        ->check(CLI::IsMember({"g", "loss_db", "v", "s", "epsilon"}));
    sweep_cmd->add_option("--min", sweep.min, "grid start");
    sweep_cmd->add_option("--max", sweep.max, "grid end");
    sweep.count_opt = sweep_cmd->add_option("--count", sweep.count, "grid points");
    sweep_cmd->add_flag("--log", sweep.log_spacing, "log-spaced grid");
    sweep.channel.attach(sweep_cmd, false);
    sweep_cmd->add_option("--v", sweep.v, "fixed V");
    sweep_cmd->add_option("--s", sweep.s, "fixed squeezed-source s");
    sweep_cmd->add_option("--protocols", sweep.protocols, "protocol set")->delimiter(',');
    sweep_cmd->add_option("--output,-o", sweep.output, "CSV output file (default stdout)");

    AttackArgs attack;
    CLI::App* attack_cmd = app.add_subcommand("attack", "entangling-cloner Monte Carlo check");
    attack.channel.attach(attack_cmd, true);
    attack_cmd->add_option("--v", attack.v, "total source variance V")->required();
    attack.s_opt = attack_cmd->add_option("--s", attack.s, "squeezed-source preparation noise");
    attack_cmd->add_option("--protocol", attack.protocol, "source kind")
        ->check(CLI::IsMember({"coherent", "epr", "squeezed"}));
    attack_cmd->add_option("--n", attack.n, "symbols to simulate");
    attack_cmd->add_option("--seed", attack.seed, "RNG seed")->envname("CVQKD_SEED");
    attack_cmd->add_option("--csv", attack.csv_file, "write the sample batch as CSV");
    attack_cmd->add_flag("--json", attack.as_json, "emit JSON instead of a table");

    SimulateArgs simulate;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "protocol run with estimation, JSON report");
    simulate.config_opt = sim_cmd->add_option("--config", simulate.config_file, "JSON run config");
    simulate.channel.attach(sim_cmd, false);
    sim_cmd->add_option("--v", simulate.v, "total source variance V");
    sim_cmd->add_option("--kind", simulate.kind, "source kind")
        ->check(CLI::IsMember({"coherent", "epr", "squeezed"}));
    simulate.s_opt = sim_cmd->add_option("--s", simulate.s, "squeezed-source preparation noise");
    sim_cmd->add_option("--n", simulate.n, "symbols to simulate");
    simulate.seed_opt = sim_cmd->add_option("--seed", simulate.seed, "RNG seed")
                            ->envname("CVQKD_SEED");
    sim_cmd->add_option("--reveal-fraction", simulate.reveal_fraction, "revealed share, in (0,1)");
    sim_cmd->add_option("--realization", simulate.realization, "direct|cloner")
        ->check(CLI::IsMember({"direct", "cloner"}));
    sim_cmd->add_option("--k-sigma", simulate.k_sigma, "pessimism padding for the verdict");
    sim_cmd->add_option("--output", simulate.output, "JSON output file (default stdout)");
    sim_cmd->add_option("--reveal-csv", simulate.reveal_csv, "CSV dump of revealed pairs");

    CompareArgs compare;
    CLI::App* compare_cmd = app.add_subcommand("compare", "rate comparison table");
    compare.channel.attach(compare_cmd, true);
    compare_cmd->add_option("--v", compare.v, "total source variance V");
    compare_cmd->add_option("--symbol-rate", compare.symbol_rate, "symbols per second");
    compare_cmd->add_flag("--json", compare.as_json, "emit JSON instead of a table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(rate_cmd)) return cmd_rate(rate);
        if (app.got_subcommand(sweep_cmd)) return cmd_sweep(sweep);
        if (app.got_subcommand(attack_cmd)) return cmd_attack(attack);
        if (app.got_subcommand(sim_cmd)) return cmd_simulate(simulate);
        if (app.got_subcommand(compare_cmd)) return cmd_compare(compare);
    } catch (const cvqkd::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const cvqkd::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
