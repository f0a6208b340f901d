#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "numasig/counters.hpp"
#include "numasig/signature.hpp"
#include "numasig/topology.hpp"

namespace numasig {

/// A synthetic application with a known signature.
///
/// Each thread moves `read_demand` / `write_demand` bytes per second when it
/// runs at the reference (fastest configured) instruction rate; threads on
/// slower sockets move proportionally less.
struct GroundTruthWorkload {
    ChannelSignature reads;
    ChannelSignature writes;
    double read_demand = 1e9;   // bytes/s per thread
    double write_demand = 5e8;  // bytes/s per thread
    /// Instructions per second of one thread on each socket. Empty means
    /// every socket runs at kDefaultThreadRate.
    std::vector<double> thread_rates;
    double duration_seconds = 10.0;
    double noise_stddev = 0.0;  // relative, per counter
    std::uint64_t seed = 1;
    /// Demand multiplier for the first half of the threads (by global index,
    /// socket 1 first). 1 keeps every thread identical.
    double demand_skew = 1.0;

    static constexpr double kDefaultThreadRate = 2e9;

    /// Throws DomainError on non-positive demands, rates or duration, negative
    /// noise, or signatures invalid for `socket_count`.
    void validate(std::size_t socket_count) const;

    bool in_model() const noexcept { return demand_skew == 1.0; }

    double thread_rate(std::size_t socket) const;

    /// Relative demand of each of `total_threads` threads; sums to `total_threads`.
    std::vector<double> thread_demand_weights(std::size_t total_threads) const;
};

/// Counter values the workload would produce under `placement`.
///
/// Noiseless output is exact; with noise every counter (including
/// instructions) is scaled by 1 + noise_stddev * z, z standard normal
/// truncated to [-3, 3]. The random stream depends only on the seed and the
/// placement, so identical inputs give bit-identical samples.
CounterSample simulate_counters(const GroundTruthWorkload& workload, const ThreadPlacement& placement);

/// Demand (bytes/s) each socket generates on one channel.
std::vector<double> socket_demand(const GroundTruthWorkload& workload, const ThreadPlacement& placement,
                                  Channel channel);

struct ProfilingPlacements {
    ThreadPlacement symmetric;
    ThreadPlacement asymmetric;
};

/// (n/2, n/2) and (floor(3n/4), rest) on a two-socket machine.
ProfilingPlacements make_profiling_placements(const MachineTopology& topology, std::size_t total_threads);

/// Copy of `base` where the first half of the threads demand `skew` times
/// the bandwidth of the rest, total demand unchanged.
GroundTruthWorkload make_pathological_workload(const GroundTruthWorkload& base, double skew);

/// Every split of `total_threads` over two sockets that fits the topology.
std::vector<ThreadPlacement> two_socket_splits(const MachineTopology& topology, std::size_t total_threads);

}  // namespace numasig
