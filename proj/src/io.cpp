#include "numasig/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "numasig/errors.hpp"

namespace numasig {

using ordered_json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- CSV ----

std::string line_location(std::size_t line) { return "line " + std::to_string(line); }

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        std::string field = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        field.erase(0, field.find_first_not_of(" \t"));
        const auto last = field.find_last_not_of(" \t");
        field.erase(last == std::string::npos ? 0 : last + 1);
        fields.push_back(std::move(field));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <typename T>
T parse_integer(const std::string& field, const char* column, std::size_t line) {
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || field.front() == '-') {
        throw ParseError(line_location(line), std::string(column) + " must be a non-negative integer, got '" +
                                                  field + "'");
    }
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(line_location(line), std::string("malformed ") + column + " '" + field + "'");
    }
    return value;
}

double parse_real(const std::string& field, const char* column, std::size_t line) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw ParseError(line_location(line), std::string("malformed ") + column + " '" + field + "'");
    }
    if (value < 0.0 || field.front() == '-') {
        throw ParseError(line_location(line), std::string(column) + " must be non-negative, got '" + field + "'");
    }
    return value;
}

std::string format_real(double value) {
    char buf[400];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
    if (ec != std::errc{}) {
        const auto [p2, e2] = std::to_chars(buf, buf + sizeof buf, value);
        return std::string(buf, p2);
    }
    return std::string(buf, ptr);
}

struct CsvRow {
    std::size_t line = 0;
    std::size_t threads = 0;
    BankCounters bank;
    SocketCounters socket;
};

// ---------------------------------------------------------------- JSON ---

std::string child(const std::string& path, const std::string& key) { return path + "." + key; }
std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const ordered_json& j, const std::string& path) {
    if (!j.is_object()) throw ParseError(path, "expected an object");
}

void reject_unknown_keys(const ordered_json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        const bool known =
            std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!known) throw ParseError(child(path, key), "unknown key");
    }
}

const ordered_json& require_key(const ordered_json& j, const std::string& path, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(child(path, key), "missing required field");
    return *it;
}

double as_number(const ordered_json& j, const std::string& path) {
    if (!j.is_number()) throw ParseError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(path, "expected a finite number");
    return v;
}

std::uint64_t as_unsigned(const ordered_json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        if (j.get<std::int64_t>() < 0) throw ParseError(path, "expected a non-negative integer");
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    throw ParseError(path, "expected a non-negative integer");
}

bool as_bool(const ordered_json& j, const std::string& path) {
    if (!j.is_boolean()) throw ParseError(path, "expected true or false");
    return j.get<bool>();
}

ordered_json parse_json_text(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("byte " + std::to_string(e.byte), "malformed JSON");
    }
}

ordered_json channel_to_json(const ChannelSignature& c, bool low_traffic) {
    ordered_json j;
    j["static_socket"] = c.static_socket + 1;
    j["static_fraction"] = c.static_fraction;
    j["local_fraction"] = c.local_fraction;
    j["per_thread_fraction"] = c.per_thread_fraction;
    j["interleaved_fraction"] = c.interleaved_fraction();
    j["low_traffic"] = low_traffic;
    return j;
}

ChannelSignature channel_from_json(const ordered_json& j, const std::string& path, std::size_t socket_count,
                                   bool* low_traffic) {
    require_object(j, path);
    if (low_traffic) {
        reject_unknown_keys(j, path, {"static_socket", "static_fraction", "local_fraction", "per_thread_fraction",
                                      "interleaved_fraction", "low_traffic"});
    } else {
        reject_unknown_keys(j, path, {"static_socket", "static_fraction", "local_fraction", "per_thread_fraction",
                                      "interleaved_fraction"});
    }
    ChannelSignature c;
    const auto socket_path = child(path, "static_socket");
    const auto socket = as_unsigned(require_key(j, path, "static_socket"), socket_path);
    if (socket < 1 || socket > socket_count) {
        throw ParseError(socket_path, "must be between 1 and " + std::to_string(socket_count));
    }
    c.static_socket = static_cast<std::size_t>(socket - 1);

    auto fraction = [&](const char* key) {
        const auto p = child(path, key);
        const double v = as_number(require_key(j, path, key), p);
        if (v < 0.0 || v > 1.0) throw ParseError(p, "must lie in [0,1]");
        return v;
    };
    c.static_fraction = fraction("static_fraction");
    c.local_fraction = fraction("local_fraction");
    c.per_thread_fraction = fraction("per_thread_fraction");
    const double sum = c.static_fraction + c.local_fraction + c.per_thread_fraction;
    if (sum > 1.0 + kFractionTolerance) {
        throw ParseError(path, "static + local + per_thread fractions sum to " + std::to_string(sum) + " > 1");
    }
    if (const auto it = j.find("interleaved_fraction"); it != j.end()) {
        const auto p = child(path, "interleaved_fraction");
        const double v = as_number(*it, p);
        if (std::abs(v - c.interleaved_fraction()) > kFractionTolerance) {
            throw ParseError(p, "does not equal 1 - (static + local + per_thread)");
        }
    }
    if (low_traffic) {
        *low_traffic = false;
        if (const auto it = j.find("low_traffic"); it != j.end()) {
            *low_traffic = as_bool(*it, child(path, "low_traffic"));
        }
    }
    return c;
}

}  // namespace

std::vector<CounterRun> parse_counter_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::map<std::string, std::map<std::size_t, CsvRow>> runs;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!header_seen) {
            if (line != kCounterCsvHeader) {
                throw ParseError(line_location(line_no), std::string("expected header '") + kCounterCsvHeader + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 9) {
            throw ParseError(line_location(line_no),
                             "expected 9 fields, found " + std::to_string(fields.size()));
        }
        const std::string& run_id = fields[0];
        if (run_id.empty()) throw ParseError(line_location(line_no), "empty run_id");
        const auto socket = parse_integer<std::size_t>(fields[1], "socket", line_no);
        if (socket < 1) throw ParseError(line_location(line_no), "socket numbers start at 1");

        CsvRow row;
        row.line = line_no;
        row.threads = parse_integer<std::size_t>(fields[2], "threads_on_socket", line_no);
        row.bank.local_read_bytes = parse_real(fields[3], "local_read_bytes", line_no);
        row.bank.remote_read_bytes = parse_real(fields[4], "remote_read_bytes", line_no);
        row.bank.local_write_bytes = parse_real(fields[5], "local_write_bytes", line_no);
        row.bank.remote_write_bytes = parse_real(fields[6], "remote_write_bytes", line_no);
        row.socket.instructions = parse_integer<std::uint64_t>(fields[7], "instructions", line_no);
        row.socket.elapsed_seconds = parse_real(fields[8], "elapsed_seconds", line_no);
        if (!(row.socket.elapsed_seconds > 0.0)) {
            throw ParseError(line_location(line_no), "elapsed_seconds must be positive");
        }

        auto& sockets = runs[run_id];
        if (!sockets.emplace(socket, row).second) {
            throw ParseError(line_location(line_no), "duplicate socket " + std::to_string(socket) + " in run " +
                                                         run_id + " at line " + std::to_string(line_no));
        }
    }
    if (!header_seen) throw ParseError(line_location(line_no == 0 ? 1 : line_no), "missing header row");

    std::vector<CounterRun> out;
    for (auto& [run_id, sockets] : runs) {
        std::size_t first_line = sockets.begin()->second.line;
        for (const auto& [socket, row] : sockets) first_line = std::min(first_line, row.line);
        const std::size_t socket_count = sockets.rbegin()->first;
        for (std::size_t s = 1; s <= socket_count; ++s) {
            if (!sockets.count(s)) {
                throw ParseError(line_location(first_line),
                                 "run " + run_id + " is missing socket " + std::to_string(s));
            }
        }
        std::vector<std::size_t> threads;
        std::vector<BankCounters> banks;
        std::vector<SocketCounters> socket_counters;
        for (const auto& [socket, row] : sockets) {
            threads.push_back(row.threads);
            banks.push_back(row.bank);
            socket_counters.push_back(row.socket);
        }
        try {
            CounterSample sample{ThreadPlacement::unbounded(std::move(threads)), std::move(banks),
                                 std::move(socket_counters)};
            sample.validate();
            out.push_back({run_id, std::move(sample)});
        } catch (const DomainError& e) {
            throw ParseError(line_location(first_line), "run " + run_id + ": " + e.what());
        }
    }
    return out;
}

void write_counter_csv(std::ostream& out, const std::vector<CounterRun>& runs) {
    out << kCounterCsvHeader << '\n';
    for (const auto& run : runs) {
        const auto& sample = run.sample;
        for (std::size_t i = 0; i < sample.banks.size(); ++i) {
            const auto& b = sample.banks[i];
            const auto& sc = sample.sockets[i];
            out << run.run_id << ',' << (i + 1) << ',' << sample.placement.threads_on(i) << ','
                << format_real(b.local_read_bytes) << ',' << format_real(b.remote_read_bytes) << ','
                << format_real(b.local_write_bytes) << ',' << format_real(b.remote_write_bytes) << ','
                << sc.instructions << ',' << format_real(sc.elapsed_seconds) << '\n';
        }
    }
}

const CounterRun& find_run(const std::vector<CounterRun>& runs, const std::string& run_id) {
    const auto it = std::find_if(runs.begin(), runs.end(), [&](const auto& r) { return r.run_id == run_id; });
    if (it == runs.end()) throw InputError("run '" + run_id + "' not found in counter data");
    return *it;
}

std::string serialize_signature(const BandwidthSignature& signature) {
    signature.validate();
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["socket_count"] = signature.socket_count;
    for (auto c : kAllChannels) j[to_string(c)] = channel_to_json(signature.channel(c), signature.low_traffic(c));
    return j.dump(2) + "\n";
}

BandwidthSignature parse_signature(const std::string& json_text) {
    const auto j = parse_json_text(json_text);
    const std::string root = "$";
    require_object(j, root);
    reject_unknown_keys(j, root, {"schema_version", "socket_count", "reads", "writes", "combined"});
    const auto version = as_unsigned(require_key(j, root, "schema_version"), "$.schema_version");
    if (version != kSchemaVersion) {
        throw ParseError("$.schema_version", "unsupported version " + std::to_string(version));
    }
    BandwidthSignature sig;
    sig.socket_count = static_cast<std::size_t>(as_unsigned(require_key(j, root, "socket_count"), "$.socket_count"));
    if (sig.socket_count < 1) throw ParseError("$.socket_count", "must be at least 1");
    for (auto c : kAllChannels) {
        const auto name = to_string(c);
        bool low = false;
        sig.channel(c) = channel_from_json(require_key(j, root, name), child(root, name), sig.socket_count, &low);
        sig.set_low_traffic(c, low);
    }
    return sig;
}

RunConfig parse_run_config(const std::string& json_text) {
    const auto j = parse_json_text(json_text);
    const std::string root = "$";
    require_object(j, root);
    reject_unknown_keys(j, root,
                        {"schema_version", "sockets", "cores_per_socket", "threads", "placements", "workload",
                         "validate"});
    if (const auto it = j.find("schema_version"); it != j.end()) {
        if (as_unsigned(*it, "$.schema_version") != kSchemaVersion) {
            throw ParseError("$.schema_version", "unsupported version");
        }
    }

    RunConfig cfg;
    cfg.topology.socket_count = static_cast<std::size_t>(as_unsigned(require_key(j, root, "sockets"), "$.sockets"));
    if (cfg.topology.socket_count < 1) throw ParseError("$.sockets", "must be at least 1");
    cfg.topology.cores_per_socket =
        static_cast<std::size_t>(as_unsigned(require_key(j, root, "cores_per_socket"), "$.cores_per_socket"));
    if (cfg.topology.cores_per_socket < 1) throw ParseError("$.cores_per_socket", "must be at least 1");

    // Default signature for both channels: static socket 2, 0.2 / 0.35 / 0.3.
    const std::size_t default_static = std::min<std::size_t>(1, cfg.topology.socket_count - 1);
    cfg.workload.reads = {default_static, 0.2, 0.35, 0.3};
    cfg.workload.writes = cfg.workload.reads;

    if (const auto it = j.find("workload"); it != j.end()) {
        const std::string path = "$.workload";
        require_object(*it, path);
        reject_unknown_keys(*it, path,
                            {"reads", "writes", "read_demand_gbps", "write_demand_gbps", "instruction_rates",
                             "duration_seconds", "noise", "seed", "skew"});
        auto& w = cfg.workload;
        const auto s = cfg.topology.socket_count;
        if (const auto r = it->find("reads"); r != it->end()) w.reads = channel_from_json(*r, path + ".reads", s, nullptr);
        if (const auto r = it->find("writes"); r != it->end()) {
            w.writes = channel_from_json(*r, path + ".writes", s, nullptr);
        }
        auto positive = [&](const char* key, double& target, double scale) {
            if (const auto r = it->find(key); r != it->end()) {
                const double v = as_number(*r, child(path, key));
                if (!(v > 0.0)) throw ParseError(child(path, key), "must be positive");
                target = v * scale;
            }
        };
        positive("read_demand_gbps", w.read_demand, 1e9);
        positive("write_demand_gbps", w.write_demand, 1e9);
        positive("duration_seconds", w.duration_seconds, 1.0);
        if (const auto r = it->find("instruction_rates"); r != it->end()) {
            const auto p = child(path, "instruction_rates");
            if (!r->is_array() || r->size() != s) {
                throw ParseError(p, "expected an array with one rate per socket");
            }
            for (std::size_t i = 0; i < r->size(); ++i) {
                const double v = as_number((*r)[i], index_path(p, i));
                if (!(v > 0.0)) throw ParseError(index_path(p, i), "must be positive");
                w.thread_rates.push_back(v);
            }
        }
        if (const auto r = it->find("noise"); r != it->end()) {
            w.noise_stddev = as_number(*r, child(path, "noise"));
            if (w.noise_stddev < 0.0) throw ParseError(child(path, "noise"), "must be non-negative");
        }
        if (const auto r = it->find("seed"); r != it->end()) {
            w.seed = as_unsigned(*r, child(path, "seed"));
            cfg.seed_given = true;
        }
        if (const auto r = it->find("skew"); r != it->end()) {
            w.demand_skew = as_number(*r, child(path, "skew"));
            if (w.demand_skew < 1.0) throw ParseError(child(path, "skew"), "must be at least 1");
        }
    }

    if (const auto it = j.find("threads"); it != j.end()) {
        cfg.threads = static_cast<std::size_t>(as_unsigned(*it, "$.threads"));
        if (cfg.threads < 1) throw ParseError("$.threads", "must be at least 1");
    }

    if (const auto it = j.find("placements"); it != j.end()) {
        const std::string path = "$.placements";
        if (!it->is_array() || it->empty()) throw ParseError(path, "expected a non-empty array of placements");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto p = index_path(path, i);
            const auto& entry = (*it)[i];
            if (!entry.is_array()) throw ParseError(p, "expected an array of per-socket thread counts");
            std::vector<std::size_t> counts;
            for (std::size_t k = 0; k < entry.size(); ++k) {
                counts.push_back(static_cast<std::size_t>(as_unsigned(entry[k], index_path(p, k))));
            }
            try {
                cfg.placements.emplace_back(cfg.topology, counts);
            } catch (const DomainError& e) {
                throw ParseError(p, e.what());
            }
            std::string id = "split";
            for (auto n : counts) id += "_" + std::to_string(n);
            if (!seen.insert(id).second) throw ParseError(p, "duplicate placement");
            cfg.run_ids.push_back(id);
        }
        if (cfg.threads == 0) cfg.threads = cfg.placements.front().total_threads();
    } else if (cfg.topology.socket_count == 2) {
        if (cfg.threads == 0) {
            cfg.threads = cfg.topology.cores_per_socket - cfg.topology.cores_per_socket % 2;
        }
        try {
            auto pair = make_profiling_placements(cfg.topology, cfg.threads);
            cfg.placements = {pair.symmetric, pair.asymmetric};
            cfg.run_ids = {"symmetric", "asymmetric"};
        } catch (const InputError& e) {
            throw ParseError("$.threads", e.what());
        }
    }

    if (const auto it = j.find("validate"); it != j.end()) {
        const std::string path = "$.validate";
        require_object(*it, path);
        reject_unknown_keys(*it, path, {"grid_step", "noise_levels", "seeds"});
        auto& v = cfg.validate;
        if (const auto r = it->find("grid_step"); r != it->end()) {
            v.grid_step = as_number(*r, path + ".grid_step");
            const double steps = 1.0 / v.grid_step;
            if (!(v.grid_step > 0.0) || v.grid_step > 1.0 || std::abs(steps - std::round(steps)) > 1e-9) {
                throw ParseError(path + ".grid_step", "must divide 1 into a whole number of steps");
            }
        }
        if (const auto r = it->find("noise_levels"); r != it->end()) {
            const auto p = path + ".noise_levels";
            if (!r->is_array()) throw ParseError(p, "expected an array");
            v.noise_levels.clear();
            for (std::size_t i = 0; i < r->size(); ++i) {
                const double level = as_number((*r)[i], index_path(p, i));
                if (level < 0.0) throw ParseError(index_path(p, i), "must be non-negative");
                v.noise_levels.push_back(level);
            }
        }
        if (const auto r = it->find("seeds"); r != it->end()) {
            v.seeds = static_cast<std::size_t>(as_unsigned(*r, path + ".seeds"));
            if (v.seeds < 1) throw ParseError(path + ".seeds", "must be at least 1");
        }
    }

    try {
        cfg.workload.validate(cfg.topology.socket_count);
    } catch (const DomainError& e) {
        throw ParseError("$.workload", e.what());
    }
    return cfg;
}

std::string serialize_fit_report(const ExtractionReport& report) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["fit_ok"] = report.fit_ok();
    for (auto c : kAllChannels) {
        const auto& ch = report.channel(c);
        ordered_json cj;
        cj["static_socket"] = ch.static_estimate.socket + 1;
        cj["static_fraction"] = ch.signature.static_fraction;
        cj["remote_ratio"] = ch.local.remote_ratio;
        cj["bank_remote_ratios"] = ch.local.bank_remote_ratios;
        cj["per_thread_blend"] = ch.per_thread.blend;
        cj["cpu_local_shares"] = ch.per_thread.cpu_local_shares;
        cj["cpu_blends"] = ch.per_thread.cpu_blends;
        cj["residual"] = ch.fit.residual;
        cj["remote_ratio_spread"] = ch.fit.remote_ratio_spread;
        cj["bank_imbalance"] = ch.fit.bank_imbalance;
        cj["clamped_per_thread"] = ch.fit.clamped_per_thread;
        cj["low_traffic"] = ch.fit.low_traffic;
        cj["fit_ok"] = ch.fit.fit_ok;
        cj["notes"] = ch.fit.notes;
        j[to_string(c)] = std::move(cj);
    }
    return j.dump(2) + "\n";
}

}  // namespace numasig
