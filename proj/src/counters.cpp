#include "numasig/counters.hpp"

#include <cmath>
#include <string>

#include "numasig/errors.hpp"

namespace numasig {

BankTraffic BankCounters::channel(Channel c) const noexcept {
    switch (c) {
        case Channel::Reads: return {local_read_bytes, remote_read_bytes};
        case Channel::Writes: return {local_write_bytes, remote_write_bytes};
        case Channel::Combined:
            return {local_read_bytes + local_write_bytes, remote_read_bytes + remote_write_bytes};
    }
    return {};
}

namespace {

std::vector<BankTraffic> channel_of(const std::vector<BankCounters>& banks, Channel c) {
    std::vector<BankTraffic> out;
    out.reserve(banks.size());
    for (const auto& b : banks) out.push_back(b.channel(c));
    return out;
}

}  // namespace

void CounterSample::validate() const {
    const auto s = placement.socket_count();
    if (banks.size() != s) {
        throw DomainError("sample has " + std::to_string(banks.size()) + " banks for " + std::to_string(s) +
                          " sockets");
    }
    if (sockets.size() != s) {
        throw DomainError("sample has " + std::to_string(sockets.size()) + " socket records for " +
                          std::to_string(s) + " sockets");
    }
    for (std::size_t i = 0; i < s; ++i) {
        const auto& b = banks[i];
        for (double v : {b.local_read_bytes, b.remote_read_bytes, b.local_write_bytes, b.remote_write_bytes}) {
            if (!std::isfinite(v) || v < 0.0) {
                throw DomainError("bank " + std::to_string(i + 1) + " has a negative or non-finite counter");
            }
        }
        const auto& sc = sockets[i];
        if (placement.is_used(i)) {
            if (!(sc.elapsed_seconds > 0.0) || !std::isfinite(sc.elapsed_seconds)) {
                throw DomainError("socket " + std::to_string(i + 1) + " runs threads but elapsed_seconds <= 0");
            }
            if (sc.instructions == 0) {
                throw DomainError("socket " + std::to_string(i + 1) + " runs threads but executed no instructions");
            }
        } else if (!std::isfinite(sc.elapsed_seconds) || sc.elapsed_seconds < 0.0) {
            throw DomainError("socket " + std::to_string(i + 1) + " has negative elapsed_seconds");
        }
    }
}

std::vector<BankTraffic> CounterSample::channel(Channel c) const { return channel_of(banks, c); }

std::vector<BankTraffic> NormalizedSample::channel(Channel c) const { return channel_of(banks, c); }

NormalizedSample normalize_sample(const CounterSample& sample) {
    sample.validate();
    const auto s = sample.placement.socket_count();

    // Aggregate instructions/s per socket; per-thread rate divides by n_i.
    std::vector<double> socket_rate(s, 0.0);
    std::vector<double> thread_rate(s, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
        if (!sample.placement.is_used(i)) continue;
        socket_rate[i] = static_cast<double>(sample.sockets[i].instructions) / sample.sockets[i].elapsed_seconds;
        thread_rate[i] = socket_rate[i] / static_cast<double>(sample.placement.threads_on(i));
    }

    NormalizedSample out{sample.placement, std::vector<BankCounters>(s), thread_rate};
    for (std::size_t bank = 0; bank < s; ++bank) {
        double other_rate_sum = 0.0;
        double other_threads = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            if (i == bank || !sample.placement.is_used(i)) continue;
            other_rate_sum += socket_rate[i];
            other_threads += static_cast<double>(sample.placement.threads_on(i));
        }
        const double local_rate = thread_rate[bank];
        const double remote_rate = other_threads > 0.0 ? other_rate_sum / other_threads : 0.0;

        auto divide = [&](double bytes, double rate, const char* what) {
            if (bytes == 0.0) return 0.0;
            if (!(rate > 0.0)) {
                throw ExtractionError("bank " + std::to_string(bank + 1) + " reports " + what +
                                      " traffic but the socket(s) it is attributed to have no instruction rate");
            }
            return bytes / rate;
        };
        const auto& raw = sample.banks[bank];
        auto& norm = out.banks[bank];
        norm.local_read_bytes = divide(raw.local_read_bytes, local_rate, "local read");
        norm.local_write_bytes = divide(raw.local_write_bytes, local_rate, "local write");
        norm.remote_read_bytes = divide(raw.remote_read_bytes, remote_rate, "remote read");
        norm.remote_write_bytes = divide(raw.remote_write_bytes, remote_rate, "remote write");
    }
    return out;
}

}  // namespace numasig
