#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "numasig/matrix.hpp"
#include "numasig/topology.hpp"

namespace numasig {

/// Memory controller counters of one bank, from the bank's perspective:
/// "local" is traffic with its own socket, "remote" with every other socket.
struct BankCounters {
    double local_read_bytes = 0.0;
    double remote_read_bytes = 0.0;
    double local_write_bytes = 0.0;
    double remote_write_bytes = 0.0;

    BankTraffic channel(Channel c) const noexcept;

    bool operator==(const BankCounters&) const = default;
};

struct SocketCounters {
    std::uint64_t instructions = 0;
    double elapsed_seconds = 0.0;

    bool operator==(const SocketCounters&) const = default;
};

/// Everything recorded during one profiling run.
struct CounterSample {
    ThreadPlacement placement;
    std::vector<BankCounters> banks;     // one per socket
    std::vector<SocketCounters> sockets;  // one per socket

    /// Throws DomainError on size mismatches, negative or non-finite
    /// counters, non-positive elapsed time or zero instructions on a socket
    /// that runs threads.
    void validate() const;

    std::vector<BankTraffic> channel(Channel c) const;

    bool operator==(const CounterSample&) const = default;
};

/// Counters divided by the per-thread instruction rate of the socket that
/// generated the traffic.
struct NormalizedSample {
    ThreadPlacement placement;
    std::vector<BankCounters> banks;
    /// Average instructions per second of one thread on each socket (0 if unused).
    std::vector<double> thread_rates;

    std::vector<BankTraffic> channel(Channel c) const;
};

/// A bank's local flows are divided by its own socket's per-thread rate,
/// its remote flows by the thread-weighted mean rate of the other used
/// sockets (for two sockets: the other socket's rate).
///
/// Throws ExtractionError when traffic is attributed to a socket with no
/// instruction rate.
NormalizedSample normalize_sample(const CounterSample& sample);

}  // namespace numasig
