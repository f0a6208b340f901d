#pragma once

#include <cstddef>

#include "numasig/topology.hpp"

namespace numasig {

inline constexpr double kFractionTolerance = 1e-9;

/// How one traffic channel's bandwidth splits over the four access patterns.
///
/// Whatever is not static, local or per-thread is interleaved.
struct ChannelSignature {
    std::size_t static_socket = 0;  // 0-based
    double static_fraction = 0.0;
    double local_fraction = 0.0;
    double per_thread_fraction = 0.0;

    double interleaved_fraction() const noexcept;

    /// Throws DomainError when a fraction leaves [0,1], the three sum past
    /// 1 (+1e-9), or the static socket is outside `socket_count`.
    void validate(std::size_t socket_count) const;

    bool operator==(const ChannelSignature&) const = default;
};

/// Result of clamping a raw estimate back into the signature domain.
struct SanitizeResult {
    ChannelSignature signature;
    bool adjusted = false;  // something was clamped or rescaled
};

/// Negative fractions clamp to 0; fractions above 1 clamp to 1; if the three
/// still sum past 1 they are rescaled proportionally so they sum to 1.
SanitizeResult sanitize(ChannelSignature raw);

/// Read, write, and combined (read + write) signatures of one application.
struct BandwidthSignature {
    std::size_t socket_count = 2;
    ChannelSignature reads;
    ChannelSignature writes;
    ChannelSignature combined;
    bool low_traffic_reads = false;
    bool low_traffic_writes = false;
    bool low_traffic_combined = false;

    const ChannelSignature& channel(Channel c) const;
    ChannelSignature& channel(Channel c);
    bool low_traffic(Channel c) const;
    void set_low_traffic(Channel c, bool flag);

    void validate() const;

    bool operator==(const BandwidthSignature&) const = default;
};

}  // namespace numasig
