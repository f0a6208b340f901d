#include "numasig/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "numasig/errors.hpp"
#include "numasig/io.hpp"
#include "numasig/matrix.hpp"
#include "numasig/simulator.hpp"

namespace numasig::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kGiga = 1e9;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << content;
    if (!out) throw InputError("failed writing '" + path + "'");
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
    const std::string json = ".json";
    if (path.size() > json.size() && path.compare(path.size() - json.size(), json.size(), json) == 0) {
        return path.substr(0, path.size() - json.size()) + suffix + json;
    }
    return path + suffix + json;
}

std::string fixed(double value, int precision) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << value;
    return os.str();
}

std::string general(double value) {
    std::ostringstream os;
    os << std::setprecision(6) << value;
    return os.str();
}

std::vector<std::size_t> counts_from_flag(const std::string& text) { return parse_thread_counts(text); }

// --seed beats the config file, which beats NUMASIG_SEED.
void resolve_seed(RunConfig& cfg, const std::optional<std::uint64_t>& flag) {
    if (flag) {
        cfg.workload.seed = *flag;
        return;
    }
    if (cfg.seed_given) return;
    if (const char* env = std::getenv("NUMASIG_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const auto value = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
            cfg.workload.seed = value;
        } catch (const std::exception&) {
            throw InputError(std::string("NUMASIG_SEED is not an unsigned integer: '") + env + "'");
        }
    }
}

RunConfig load_config(const std::string& path) { return parse_run_config(read_file(path)); }

RunConfig default_config() { return parse_run_config(R"({"sockets": 2, "cores_per_socket": 8})"); }

void print_signature_table(std::ostream& out, const ExtractionReport& report) {
    out << "channel   static_socket  static  local  per_thread  interleaved  residual  fit\n";
    for (auto c : kAllChannels) {
        const auto& ch = report.channel(c);
        const auto& s = ch.signature;
        std::string fit = ch.fit.fit_ok ? "ok" : "MISFIT";
        if (ch.fit.low_traffic) fit = "LOW-TRAFFIC";
        out << std::left << std::setw(10) << to_string(c) << std::setw(15) << (s.static_socket + 1)
            << std::setw(8) << fixed(s.static_fraction, 3) << std::setw(7) << fixed(s.local_fraction, 3)
            << std::setw(12) << fixed(s.per_thread_fraction, 3) << std::setw(13)
            << fixed(s.interleaved_fraction(), 3) << std::setw(10) << fixed(ch.fit.residual, 4) << fit << '\n'
            << std::right;
    }
}

void print_intermediates(std::ostream& out, const ExtractionReport& report) {
    for (auto c : kAllChannels) {
        const auto& ch = report.channel(c);
        out << to_string(c) << ":\n";
        out << "  static socket " << ch.static_estimate.socket + 1 << ", static fraction "
            << general(ch.static_estimate.fraction) << '\n';
        out << "  r = " << general(ch.local.remote_ratio) << " (per bank:";
        for (double r : ch.local.bank_remote_ratios) out << ' ' << general(r);
        out << ")\n";
        out << "  l per cpu:";
        for (double l : ch.per_thread.cpu_local_shares) out << ' ' << general(l);
        out << "\n  p = " << general(ch.per_thread.blend) << " (per cpu:";
        for (double p : ch.per_thread.cpu_blends) out << ' ' << general(p);
        out << ")\n";
        out << "  residual " << general(ch.fit.residual) << " (remote ratio spread "
            << general(ch.fit.remote_ratio_spread) << ", bank imbalance " << general(ch.fit.bank_imbalance)
            << ")\n";
        for (const auto& note : ch.fit.notes) out << "  note: " << note << '\n';
    }
}

// ------------------------------------------------------------ simulate --

struct SimulateArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> noise;
    std::vector<std::string> placements;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
    auto cfg = load_config(args.config);
    resolve_seed(cfg, args.seed);
    if (args.noise) cfg.workload.noise_stddev = *args.noise;
    cfg.workload.validate(cfg.topology.socket_count);

    if (!args.placements.empty()) {
        cfg.placements.clear();
        cfg.run_ids.clear();
        for (const auto& text : args.placements) {
            cfg.placements.emplace_back(cfg.topology, counts_from_flag(text));
            std::string id = "split";
            for (auto n : cfg.placements.back().threads_per_socket()) id += "_" + std::to_string(n);
            cfg.run_ids.push_back(id);
        }
    }
    if (cfg.placements.empty()) throw InputError("config defines no placements to simulate");

    std::vector<CounterRun> runs;
    for (std::size_t i = 0; i < cfg.placements.size(); ++i) {
        runs.push_back({cfg.run_ids[i], simulate_counters(cfg.workload, cfg.placements[i])});
    }
    std::ostringstream csv;
    write_counter_csv(csv, runs);
    if (args.out.empty()) {
        out << csv.str();
    } else {
        write_file(args.out, csv.str());
        out << "wrote " << runs.size() << " runs to " << args.out << '\n';
    }
    return kSuccess;
}

// ------------------------------------------------------------- extract --

struct ExtractArgs {
    std::string csv;
    std::string symmetric_run = "symmetric";
    std::string asymmetric_run = "asymmetric";
    std::string out;
    double fit_threshold = ExtractOptions{}.fit_threshold;
    std::string channel;
    std::string format = "table";
    bool verbose = false;
};

int cmd_extract(const ExtractArgs& args, std::ostream& out) {
    std::istringstream csv(read_file(args.csv));
    const auto runs = parse_counter_csv(csv);
    const auto& sym = find_run(runs, args.symmetric_run);
    const auto& asym = find_run(runs, args.asymmetric_run);

    ExtractOptions options;
    options.fit_threshold = args.fit_threshold;
    const auto report = extract_detailed(sym.sample, asym.sample, options);
    const auto signature_json = serialize_signature(report.signature);
    const auto fit_json = serialize_fit_report(report);

    if (!args.out.empty()) {
        write_file(args.out, signature_json);
        write_file(sibling_path(args.out, ".fit"), fit_json);
    }
    if (args.format == "json") {
        out << signature_json;
    } else {
        print_signature_table(out, report);
        if (args.verbose) print_intermediates(out, report);
    }

    bool fit_ok = report.fit_ok();
    if (!args.channel.empty()) fit_ok = report.channel(channel_from_string(args.channel)).fit.fit_ok;
    if (!fit_ok) {
        for (auto c : kAllChannels) {
            const auto& fit = report.channel(c).fit;
            if (fit.fit_ok) continue;
            out << "warning: " << to_string(c) << " does not fit the model (residual " << fixed(fit.residual, 4)
                << ", threshold " << fixed(args.fit_threshold, 4) << (fit.low_traffic ? ", low traffic" : "")
                << ")\n";
        }
        return kFitWarning;
    }
    return kSuccess;
}

// ------------------------------------------------------------- predict --

struct PredictArgs {
    std::string signature;
    std::string placement;
    double demand_gbps = 1.0;
    std::string channel = "combined";
    std::string config;
    std::string format = "table";
    std::string out;
};

int cmd_predict(const PredictArgs& args, std::ostream& out) {
    const auto signature = parse_signature(read_file(args.signature));
    const auto counts = counts_from_flag(args.placement);
    const auto placement = args.config.empty() ? ThreadPlacement::unbounded(counts)
                                               : ThreadPlacement(load_config(args.config).topology, counts);
    if (placement.socket_count() != signature.socket_count) {
        throw InputError("placement covers " + std::to_string(placement.socket_count()) +
                         " sockets but the signature describes " + std::to_string(signature.socket_count));
    }
    if (!(args.demand_gbps >= 0.0)) throw InputError("--demand-gbps must be non-negative");

    const auto channel = channel_from_string(args.channel);
    const auto matrix = combine_signature_matrix(signature.channel(channel), placement);
    std::vector<double> demand;
    for (auto n : placement.threads_per_socket()) demand.push_back(static_cast<double>(n) * args.demand_gbps);
    const auto loads = predict_bank_loads(matrix, demand);

    ordered_json j;
    j["channel"] = to_string(channel);
    j["placement"] = std::vector<std::size_t>(placement.threads_per_socket().begin(),
                                              placement.threads_per_socket().end());
    j["demand_gbps_per_thread"] = args.demand_gbps;
    for (std::size_t cpu = 0; cpu < matrix.size(); ++cpu) {
        std::vector<double> row;
        for (std::size_t bank = 0; bank < matrix.size(); ++bank) row.push_back(matrix(cpu, bank));
        j["matrix"].push_back(row);
    }
    for (std::size_t bank = 0; bank < loads.size(); ++bank) {
        ordered_json b;
        b["bank"] = bank + 1;
        b["local_gbps"] = loads[bank].local;
        b["remote_gbps"] = loads[bank].remote;
        b["total_gbps"] = loads[bank].total();
        j["banks"].push_back(b);
    }
    const std::string json_text = j.dump(2) + "\n";
    if (!args.out.empty()) write_file(args.out, json_text);

    if (args.format == "json") {
        out << json_text;
        return kSuccess;
    }
    out << "placement " << placement.to_string() << ", " << to_string(channel) << ", " << general(args.demand_gbps)
        << " GB/s per thread\n";
    out << "matrix (rows: cpu socket, columns: memory bank)\n";
    for (std::size_t cpu = 0; cpu < matrix.size(); ++cpu) {
        out << "  cpu " << cpu + 1 << ':';
        for (std::size_t bank = 0; bank < matrix.size(); ++bank) out << "  " << fixed(matrix(cpu, bank), 4);
        out << '\n';
    }
    out << "bank  local_gbps  remote_gbps  total_gbps\n";
    for (std::size_t bank = 0; bank < loads.size(); ++bank) {
        out << std::left << std::setw(6) << bank + 1 << std::setw(12) << fixed(loads[bank].local, 4) << std::setw(13)
            << fixed(loads[bank].remote, 4) << fixed(loads[bank].total(), 4) << '\n'
            << std::right;
    }
    return kSuccess;
}

// ------------------------------------------------------------ validate --

struct ValidateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> noise;
    std::string format = "table";
};

int cmd_validate(const ValidateArgs& args, std::ostream& out, const Hooks& hooks) {
    auto cfg = args.config.empty() ? default_config() : load_config(args.config);
    resolve_seed(cfg, args.seed);
    if (args.noise) cfg.validate.noise_levels = {0.0, *args.noise};
    cfg.workload.noise_stddev = 0.0;
    const auto pair = make_profiling_placements(cfg.topology, cfg.threads);

    Extractor extract = hooks.extractor;
    if (!extract) {
        extract = [](const CounterSample& s, const CounterSample& a, const ExtractOptions& o) {
            return extract_signature(s, a, o);
        };
    }
    const auto report = run_validation(pair, cfg.workload, cfg.validate, extract);

    if (args.format == "json") {
        ordered_json j;
        j["passed"] = report.passed;
        for (const auto& level : report.levels) {
            ordered_json l;
            l["noise"] = level.noise;
            l["cases"] = level.cases;
            l["max_fraction_error"] = level.max_fraction_error;
            l["median_fraction_error"] = level.median_fraction_error;
            l["median_miscategorized"] = level.median_miscategorized;
            l["p95_miscategorized"] = level.p95_miscategorized;
            j["levels"].push_back(l);
        }
        j["failures"] = report.failures;
        out << j.dump(2) << '\n';
    } else {
        out << "profiling placements " << pair.symmetric.to_string() << " / " << pair.asymmetric.to_string()
            << ", grid step " << general(cfg.validate.grid_step) << '\n';
        out << "noise     cases    max_err      median_err   median_miscat%  p95_miscat%\n";
        for (const auto& level : report.levels) {
            out << std::left << std::setw(10) << general(level.noise) << std::setw(9) << level.cases
                << std::setw(13) << general(level.max_fraction_error) << std::setw(13)
                << general(level.median_fraction_error) << std::setw(16)
                << fixed(level.median_miscategorized * 100.0, 3) << fixed(level.p95_miscategorized * 100.0, 3)
                << '\n'
                << std::right;
        }
        for (const auto& f : report.failures) out << "FAIL: " << f << '\n';
        out << (report.passed ? "PASS" : "FAIL") << '\n';
    }
    return report.passed ? kSuccess : kValidationFailed;
}

// --------------------------------------------------------------- sweep --

struct SweepArgs {
    std::string config;
    std::string signature;
    std::string csv;
    std::string symmetric_run = "symmetric";
    std::string asymmetric_run = "asymmetric";
    std::string channel;
    std::string out;
    std::string format = "table";
    std::optional<std::uint64_t> seed;
    std::optional<double> noise;
};

std::string sweep_csv(const SweepReport& report) {
    std::ostringstream os;
    os << "label,threads,channel,bank,predicted_local,measured_local,predicted_remote,measured_remote,error_pct\n";
    for (const auto& p : report.points) {
        for (const auto& ch : p.channels) {
            for (std::size_t b = 0; b < ch.measured.size(); ++b) {
                os << p.label << ',' << '"' << p.placement.to_string() << '"' << ',' << to_string(ch.channel) << ','
                   << b + 1 << ',' << fixed(ch.predicted[b].local, 3) << ',' << fixed(ch.measured[b].local, 3) << ','
                   << fixed(ch.predicted[b].remote, 3) << ',' << fixed(ch.measured[b].remote, 3) << ','
                   << fixed(p.error_pct, 6) << '\n';
            }
        }
    }
    return os.str();
}

std::string cumulative_csv(const SweepReport& report) {
    std::ostringstream os;
    os << "error_pct_at_most,share_of_points_pct\n";
    for (const auto& bin : report.cumulative) os << fixed(bin.threshold_pct, 2) << ',' << fixed(bin.share_pct, 2) << '\n';
    return os.str();
}

int cmd_sweep(const SweepArgs& args, std::ostream& out) {
    std::optional<BandwidthSignature> signature;
    if (!args.signature.empty()) signature = parse_signature(read_file(args.signature));

    std::vector<MeasuredRun> measured;
    if (!args.csv.empty()) {
        std::istringstream csv(read_file(args.csv));
        const auto runs = parse_counter_csv(csv);
        if (!signature) {
            signature = extract_signature(find_run(runs, args.symmetric_run).sample,
                                          find_run(runs, args.asymmetric_run).sample);
        }
        for (const auto& r : runs) measured.push_back({r.run_id, r.sample});
    } else {
        if (args.config.empty()) throw InputError("sweep needs --config or --csv");
        auto cfg = load_config(args.config);
        resolve_seed(cfg, args.seed);
        if (args.noise) cfg.workload.noise_stddev = *args.noise;
        cfg.workload.validate(cfg.topology.socket_count);
        if (!signature) {
            const auto pair = make_profiling_placements(cfg.topology, cfg.threads);
            signature = extract_signature(simulate_counters(cfg.workload, pair.symmetric),
                                          simulate_counters(cfg.workload, pair.asymmetric));
        }
        for (const auto& placement : two_socket_splits(cfg.topology, cfg.threads)) {
            std::string label = "split";
            for (auto n : placement.threads_per_socket()) label += "_" + std::to_string(n);
            measured.push_back({label, simulate_counters(cfg.workload, placement)});
        }
    }

    std::optional<Channel> channel;
    if (!args.channel.empty()) channel = channel_from_string(args.channel);
    const auto report = run_sweep(*signature, measured, channel);

    if (!args.out.empty()) {
        write_file(args.out, sweep_csv(report));
        write_file(args.out + ".cdf.csv", cumulative_csv(report));
    }
    if (args.format == "csv") {
        out << sweep_csv(report);
    } else if (args.format == "json") {
        ordered_json j;
        for (const auto& p : report.points) {
            ordered_json pj;
            pj["label"] = p.label;
            pj["threads"] = std::vector<std::size_t>(p.placement.threads_per_socket().begin(),
                                                     p.placement.threads_per_socket().end());
            pj["error_pct"] = p.error_pct;
            j["points"].push_back(pj);
        }
        j["median_error_pct"] = report.median_error_pct;
        j["mean_error_pct"] = report.mean_error_pct;
        for (const auto& bin : report.cumulative) {
            j["cumulative"].push_back({{"error_pct_at_most", bin.threshold_pct}, {"share_pct", bin.share_pct}});
        }
        out << j.dump(2) << '\n';
    } else {
        out << "placement        error_pct\n";
        for (const auto& p : report.points) {
            out << std::left << std::setw(17) << p.placement.to_string() << fixed(p.error_pct, 4) << '\n' << std::right;
        }
        out << "median error " << fixed(report.median_error_pct, 4) << "%, mean error "
            << fixed(report.mean_error_pct, 4) << "% of total bandwidth over " << report.points.size()
            << " placements\n";
        out << "error <=   share of placements\n";
        for (const auto& bin : report.cumulative) {
            out << std::left << std::setw(11) << (fixed(bin.threshold_pct, 1) + "%") << fixed(bin.share_pct, 1)
                << "%\n"
                << std::right;
        }
    }
    return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Hooks& hooks) {
    CLI::App app{"Bandwidth signatures for NUMA thread placements"};
    app.name("numasig");
    app.require_subcommand(1);
    const std::vector<std::string> formats{"table", "json", "csv"};
    const std::vector<std::string> channels{"reads", "writes", "combined"};

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Generate counter CSV from a ground-truth workload");
    simulate->add_option("--config", sim.config, "Run configuration JSON")->required();
    simulate->add_option("--out", sim.out, "Output CSV path (stdout when omitted)");
    simulate->add_option("--seed", sim.seed, "Noise seed (falls back to the config, then NUMASIG_SEED)");
    simulate->add_option("--noise", sim.noise, "Relative counter noise (standard deviation)")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--placement", sim.placements, "Per-socket thread counts, e.g. 6,2 (repeatable)");

    ExtractArgs ext;
    auto* extract = app.add_subcommand("extract", "Build a bandwidth signature from two profiling runs");
    extract->add_option("csv", ext.csv, "Counter CSV")->required();
    extract->add_option("--symmetric-run", ext.symmetric_run, "run_id of the symmetric run")->capture_default_str();
    extract->add_option("--asymmetric-run", ext.asymmetric_run, "run_id of the asymmetric run")
        ->capture_default_str();
    extract->add_option("--out", ext.out, "Signature JSON path; the fit report goes to <name>.fit.json");
    extract->add_option("--fit-threshold", ext.fit_threshold, "Residual above which a channel misfits")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    extract->add_option("--channel", ext.channel, "Only this channel's fit decides the exit code")
        ->check(CLI::IsMember(channels));
    extract->add_option("--format", ext.format, "table or json")->check(CLI::IsMember({"table", "json"}));
    extract->add_flag("-v,--verbose", ext.verbose, "Print intermediate quantities");

    PredictArgs pred;
    auto* predict = app.add_subcommand("predict", "Apply a signature to a thread placement");
    predict->add_option("signature", pred.signature, "Signature JSON")->required();
    predict->add_option("--placement", pred.placement, "Per-socket thread counts, e.g. 3,1")->required();
    predict->add_option("--demand-gbps", pred.demand_gbps, "Bandwidth of one thread in GB/s")->capture_default_str();
    predict->add_option("--channel", pred.channel, "Signature channel to apply")
        ->capture_default_str()
        ->check(CLI::IsMember(channels));
    predict->add_option("--config", pred.config, "Run configuration JSON providing the core count");
    predict->add_option("--format", pred.format, "table or json")->check(CLI::IsMember({"table", "json"}));
    predict->add_option("--out", pred.out, "Also write the prediction as JSON here");

    ValidateArgs val;
    auto* validate = app.add_subcommand("validate", "Round-trip a signature grid through the simulator");
    validate->add_option("--config", val.config, "Run configuration JSON (2 sockets x 8 cores when omitted)");
    validate->add_option("--seed", val.seed, "First noise seed");
    validate->add_option("--noise", val.noise, "Noise level to test besides the noise-free one")
        ->check(CLI::NonNegativeNumber);
    validate->add_option("--format", val.format, "table or json")->check(CLI::IsMember({"table", "json"}));

    SweepArgs swp;
    auto* sweep = app.add_subcommand("sweep", "Compare predictions with measurements over many placements");
    sweep->add_option("--config", swp.config, "Simulate every two-socket split of the configured thread count");
    sweep->add_option("--signature", swp.signature, "Signature JSON (extracted from the profiling runs otherwise)");
    sweep->add_option("--csv", swp.csv, "Measured counter CSV instead of the simulator");
    sweep->add_option("--symmetric-run", swp.symmetric_run, "Symmetric run_id when extracting from --csv");
    sweep->add_option("--asymmetric-run", swp.asymmetric_run, "Asymmetric run_id when extracting from --csv");
    sweep->add_option("--channel", swp.channel, "Compare one channel (reads and writes when omitted)")
        ->check(CLI::IsMember(channels));
    sweep->add_option("--out", swp.out, "Per-placement CSV; the cumulative table goes to <out>.cdf.csv");
    sweep->add_option("--format", swp.format, "table, json or csv")->check(CLI::IsMember(formats));
    sweep->add_option("--seed", swp.seed, "Noise seed");
    sweep->add_option("--noise", swp.noise, "Relative counter noise")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    try {
        if (*simulate) return cmd_simulate(sim, out);
        if (*extract) return cmd_extract(ext, out);
        if (*predict) return cmd_predict(pred, out);
        if (*validate) return cmd_validate(val, out, hooks);
        if (*sweep) return cmd_sweep(swp, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace numasig::cli
