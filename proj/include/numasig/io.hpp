#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "numasig/counters.hpp"
#include "numasig/extraction.hpp"
#include "numasig/signature.hpp"
#include "numasig/simulator.hpp"

namespace numasig {

inline constexpr int kSchemaVersion = 1;

inline constexpr const char* kCounterCsvHeader =
    "run_id,socket,threads_on_socket,local_read_bytes,remote_read_bytes,local_write_bytes,remote_write_bytes,"
    "instructions,elapsed_seconds";

/// One profiling run as stored in a counter CSV.
struct CounterRun {
    std::string run_id;
    CounterSample sample;

    bool operator==(const CounterRun&) const = default;
};

/// Reads a counter CSV. Runs come back sorted by run_id.
///
/// Throws ParseError naming the offending line.
std::vector<CounterRun> parse_counter_csv(std::istream& in);

/// Writes runs in file order; byte counts use the shortest decimal form
/// that reads back to the same double.
void write_counter_csv(std::ostream& out, const std::vector<CounterRun>& runs);

const CounterRun& find_run(const std::vector<CounterRun>& runs, const std::string& run_id);

std::string serialize_signature(const BandwidthSignature& signature);

/// Throws ParseError carrying the JSON path of the offending value.
BandwidthSignature parse_signature(const std::string& json_text);

struct ValidateSettings {
    double grid_step = 0.05;
    std::vector<double> noise_levels{0.0, 0.01};
    std::size_t seeds = 100;
};

/// Everything a run configuration file can set.
struct RunConfig {
    MachineTopology topology;
    std::size_t threads = 0;
    std::vector<std::string> run_ids;
    std::vector<ThreadPlacement> placements;
    GroundTruthWorkload workload;
    /// True when the file pinned a seed explicitly.
    bool seed_given = false;
    ValidateSettings validate;
};

/// Parses and validates a run configuration. Unknown keys are rejected.
RunConfig parse_run_config(const std::string& json_text);

std::string serialize_fit_report(const ExtractionReport& report);

}  // namespace numasig
