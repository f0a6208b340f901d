#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "numasig/counters.hpp"
#include "numasig/signature.hpp"

namespace numasig {

struct ExtractOptions {
    /// Residual above which a channel is reported as not fitting the model.
    double fit_threshold = 0.05;
    /// A channel carrying less than this share of the busier of reads/writes is flagged.
    double low_traffic_ratio = 0.02;
};

struct StaticEstimate {
    std::size_t socket = 0;
    double fraction = 0.0;
    bool low_traffic = false;  // channel carried no traffic at all
};

struct LocalEstimate {
    double local_fraction = 0.0;
    /// Pooled remote share of all banks once static traffic is removed.
    double remote_ratio = 0.0;
    std::vector<double> bank_remote_ratios;
    bool clamped = false;
    bool low_traffic = false;
};

struct PerThreadEstimate {
    double per_thread_fraction = 0.0;
    /// Blend between per-thread (1) and interleaved (0) for the shared traffic.
    double blend = 0.0;
    std::vector<double> cpu_local_shares;  // l_i
    std::vector<double> cpu_blends;        // p solved on each socket
    bool clamped = false;
    bool low_traffic = false;
    std::vector<std::string> notes;
};

struct FitReport {
    double residual = 0.0;
    double remote_ratio_spread = 0.0;
    double bank_imbalance = 0.0;
    bool clamped_per_thread = false;
    bool low_traffic = false;
    bool fit_ok = true;
    std::vector<std::string> notes;
};

/// Bank with the largest total traffic, and how far it exceeds the mean of
/// the other banks as a share of all traffic. Expects a symmetric run.
StaticEstimate compute_static(std::span<const BankTraffic> symmetric);

/// Local fraction from a symmetric run.
///
/// Static traffic is taken off the static bank (1/s of it as local, the rest
/// as remote), then the pooled remote share r is inverted through
/// r = (s-1)/s * (1 - local / (1 - static)).
LocalEstimate compute_local(std::span<const BankTraffic> symmetric, const ThreadPlacement& placement,
                            const StaticEstimate& static_estimate);

/// Per-thread fraction from the asymmetric two-socket run.
PerThreadEstimate compute_per_thread(std::span<const BankTraffic> asymmetric, const ThreadPlacement& placement,
                                     const StaticEstimate& static_estimate, double local_fraction);

/// Consistency check on the symmetric run: once static traffic is removed
/// every bank should look the same. Residual = spread of the per-bank remote
/// shares + normalized spread of the bank totals.
FitReport assess_fit(std::span<const BankTraffic> symmetric, const StaticEstimate& static_estimate,
                     double fit_threshold = ExtractOptions{}.fit_threshold);

struct ChannelExtraction {
    ChannelSignature signature;
    StaticEstimate static_estimate;
    LocalEstimate local;
    PerThreadEstimate per_thread;
    FitReport fit;
    bool sanitized = false;
};

struct ExtractionReport {
    BandwidthSignature signature;
    std::array<ChannelExtraction, 3> channels;  // indexed like Channel

    const ChannelExtraction& channel(Channel c) const { return channels[static_cast<std::size_t>(c)]; }
    bool fit_ok() const;
};

/// Full signature extraction from a symmetric and an asymmetric run of the
/// same workload on a two-socket machine.
ExtractionReport extract_detailed(const CounterSample& symmetric, const CounterSample& asymmetric,
                                  const ExtractOptions& options = {});

BandwidthSignature extract_signature(const CounterSample& symmetric, const CounterSample& asymmetric,
                                     const ExtractOptions& options = {});

}  // namespace numasig
