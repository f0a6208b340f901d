#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "numasig/counters.hpp"
#include "numasig/extraction.hpp"
#include "numasig/io.hpp"
#include "numasig/simulator.hpp"

namespace numasig {

/// Share of bandwidth assigned to the wrong access class: half the L1
/// distance between the two class distributions, where static traffic on
/// different sockets counts as different classes.
double miscategorized_bandwidth(const ChannelSignature& truth, const ChannelSignature& estimate);

/// Largest absolute error over the static, local, and per-thread fractions.
/// A static socket mismatch counts the whole static share of both sides.
double max_fraction_error(const ChannelSignature& truth, const ChannelSignature& estimate);

/// Every signature whose fractions are multiples of `step` with sum <= 1,
/// once per static socket.
std::vector<ChannelSignature> signature_grid(double step, std::size_t socket_count);

/// Signature of the read+write traffic when both channels share a static
/// socket (or one has no static share); nullopt when the mix leaves the model.
std::optional<ChannelSignature> mixed_signature(const ChannelSignature& reads, const ChannelSignature& writes,
                                                double read_share);

double median(std::vector<double> values);
double percentile(std::vector<double> values, double q);
double mean(const std::vector<double>& values);

using Extractor =
    std::function<BandwidthSignature(const CounterSample&, const CounterSample&, const ExtractOptions&)>;

struct NoiseLevelResult {
    double noise = 0.0;
    std::size_t cases = 0;
    double max_fraction_error = 0.0;
    double median_fraction_error = 0.0;
    double median_miscategorized = 0.0;
    double p95_miscategorized = 0.0;
    double mean_miscategorized = 0.0;
};

struct ValidationReport {
    std::vector<NoiseLevelResult> levels;
    double noiseless_tolerance = 1e-9;
    double noisy_median_limit = 0.02;  // at 1% noise
    bool passed = false;
    std::vector<std::string> failures;
};

/// Round-trips the signature grid through the simulator and `extract`.
///
/// Noise-free levels run each grid point once; noisy levels run `seeds`
/// seeds per point. Reads take the grid point, writes take a different
/// point with the same static socket so the channels stay distinguishable.
ValidationReport run_validation(const ProfilingPlacements& placements, const GroundTruthWorkload& base,
                                const ValidateSettings& settings, const Extractor& extract);

/// Measured traffic of one placement in a sweep.
struct MeasuredRun {
    std::string label;
    CounterSample sample;
};

struct ChannelComparison {
    Channel channel = Channel::Reads;
    std::vector<BankTraffic> predicted;
    std::vector<BankTraffic> measured;
};

struct SweepPoint {
    std::string label;
    ThreadPlacement placement;
    std::vector<ChannelComparison> channels;
    /// |predicted - measured| over every bank's local and remote flow of
    /// every compared channel, as a percentage of the measured total.
    double error_pct = 0.0;
};

struct CumulativeBin {
    double threshold_pct = 0.0;
    double share_pct = 0.0;  // points with error <= threshold
};

struct SweepReport {
    std::vector<SweepPoint> points;
    double median_error_pct = 0.0;
    double mean_error_pct = 0.0;
    std::vector<CumulativeBin> cumulative;
};

inline const std::vector<double> kCumulativeThresholds{0.0, 0.5, 1.0, 2.0, 2.5, 5.0, 10.0, 20.0, 50.0, 100.0};

/// Compares `signature`'s prediction with each measured run.
///
/// Per-socket demand is reconstructed from the measured counters (a CPU's
/// traffic is its bank's local traffic plus the other bank's remote
/// traffic), so the comparison isolates how the traffic is distributed.
/// `channel` limits the comparison to reads, writes, or the combined
/// signature applied to reads+writes; nullopt compares reads and writes
/// with their own signatures.
SweepReport run_sweep(const BandwidthSignature& signature, const std::vector<MeasuredRun>& measured,
                      std::optional<Channel> channel);

std::vector<CumulativeBin> cumulative_frequency(const std::vector<double>& errors,
                                                const std::vector<double>& thresholds = kCumulativeThresholds);

}  // namespace numasig
