#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace numasig {

/// Shape of a multi-socket machine: one memory bank per socket.
struct MachineTopology {
    std::size_t socket_count = 2;
    std::size_t cores_per_socket = 1;

    /// Throws DomainError unless both counts are at least one.
    void validate() const;

    bool operator==(const MachineTopology&) const = default;
};

/// Number of threads pinned to each socket, one thread per core.
///
/// Sockets are 0-based here; everything user facing (CLI, files) is 1-based.
class ThreadPlacement {
public:
    /// Validates the per-socket counts against `topology`.
    ThreadPlacement(const MachineTopology& topology, std::vector<std::size_t> threads_per_socket);

    /// Placement without a core limit (cores_per_socket = max count).
    static ThreadPlacement unbounded(std::vector<std::size_t> threads_per_socket);

    std::size_t socket_count() const noexcept { return threads_.size(); }
    std::size_t threads_on(std::size_t socket) const { return threads_.at(socket); }
    std::size_t total_threads() const noexcept { return total_; }
    std::span<const std::size_t> threads_per_socket() const noexcept { return threads_; }

    bool is_used(std::size_t socket) const { return threads_.at(socket) > 0; }
    std::size_t used_socket_count() const noexcept;
    std::vector<std::size_t> used_sockets() const;

    /// Equal thread counts on every used socket.
    bool is_symmetric() const noexcept;

    /// "3,1" style rendering (counts only).
    std::string to_string() const;

    bool operator==(const ThreadPlacement&) const = default;

private:
    std::vector<std::size_t> threads_;
    std::size_t total_ = 0;
};

/// Parses a comma separated list of per-socket thread counts ("6,2").
std::vector<std::size_t> parse_thread_counts(const std::string& text);

/// Which traffic channel a quantity refers to.
enum class Channel { Reads, Writes, Combined };

inline constexpr Channel kAllChannels[] = {Channel::Reads, Channel::Writes, Channel::Combined};

const char* to_string(Channel channel);
Channel channel_from_string(const std::string& name);

}  // namespace numasig
