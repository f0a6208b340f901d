#include "numasig/topology.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "numasig/errors.hpp"

namespace numasig {

void MachineTopology::validate() const {
    if (socket_count < 1) throw DomainError("socket_count must be at least 1");
    if (cores_per_socket < 1) throw DomainError("cores_per_socket must be at least 1");
}

ThreadPlacement::ThreadPlacement(const MachineTopology& topology,
                                 std::vector<std::size_t> threads_per_socket)
    : threads_(std::move(threads_per_socket)) {
    topology.validate();
    if (threads_.size() != topology.socket_count) {
        throw DomainError("placement lists " + std::to_string(threads_.size()) +
                          " sockets but the topology has " + std::to_string(topology.socket_count));
    }
    for (std::size_t i = 0; i < threads_.size(); ++i) {
        if (threads_[i] > topology.cores_per_socket) {
            throw DomainError("socket " + std::to_string(i + 1) + " has " + std::to_string(threads_[i]) +
                              " threads but only " + std::to_string(topology.cores_per_socket) + " cores");
        }
    }
    total_ = std::accumulate(threads_.begin(), threads_.end(), std::size_t{0});
    if (total_ == 0) throw DomainError("placement must contain at least one thread");
}

ThreadPlacement ThreadPlacement::unbounded(std::vector<std::size_t> threads_per_socket) {
    const std::size_t widest =
        threads_per_socket.empty() ? 1 : *std::max_element(threads_per_socket.begin(), threads_per_socket.end());
    MachineTopology topology{threads_per_socket.size(), std::max<std::size_t>(widest, 1)};
    return ThreadPlacement(topology, std::move(threads_per_socket));
}

std::size_t ThreadPlacement::used_socket_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(threads_.begin(), threads_.end(), [](auto n) { return n > 0; }));
}

std::vector<std::size_t> ThreadPlacement::used_sockets() const {
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < threads_.size(); ++i) {
        if (threads_[i] > 0) used.push_back(i);
    }
    return used;
}

bool ThreadPlacement::is_symmetric() const noexcept {
    std::size_t seen = 0;
    for (auto n : threads_) {
        if (n == 0) continue;
        if (seen != 0 && n != seen) return false;
        seen = n;
    }
    return true;
}

std::string ThreadPlacement::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < threads_.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(threads_[i]);
    }
    return out;
}

std::vector<std::size_t> parse_thread_counts(const std::string& text) {
    std::vector<std::size_t> counts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string::npos ? text.size() : comma;
        std::string field = text.substr(start, end - start);
        field.erase(0, field.find_first_not_of(" \t"));
        field.erase(field.find_last_not_of(" \t") + 1);
        std::size_t value = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
            throw InputError("invalid thread count '" + field + "' in placement '" + text + "'");
        }
        counts.push_back(value);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return counts;
}

const char* to_string(Channel channel) {
    switch (channel) {
        case Channel::Reads: return "reads";
        case Channel::Writes: return "writes";
        case Channel::Combined: return "combined";
    }
    return "?";
}

Channel channel_from_string(const std::string& name) {
    if (name == "reads") return Channel::Reads;
    if (name == "writes") return Channel::Writes;
    if (name == "combined") return Channel::Combined;
    throw InputError("unknown channel '" + name + "' (expected reads, writes or combined)");
}

}  // namespace numasig
