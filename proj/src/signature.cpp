#include "numasig/signature.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "numasig/errors.hpp"

namespace numasig {

double ChannelSignature::interleaved_fraction() const noexcept {
    return std::max(0.0, 1.0 - (static_fraction + local_fraction + per_thread_fraction));
}

void ChannelSignature::validate(std::size_t socket_count) const {
    auto check = [](const char* name, double v) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw DomainError(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
        }
    };
    check("static_fraction", static_fraction);
    check("local_fraction", local_fraction);
    check("per_thread_fraction", per_thread_fraction);
    const double sum = static_fraction + local_fraction + per_thread_fraction;
    if (sum > 1.0 + kFractionTolerance) {
        throw DomainError("static + local + per_thread fractions sum to " + std::to_string(sum) + " > 1");
    }
    if (static_socket >= socket_count) {
        throw DomainError("static socket " + std::to_string(static_socket + 1) + " is outside 1.." +
                          std::to_string(socket_count));
    }
}

SanitizeResult sanitize(ChannelSignature raw) {
    bool adjusted = false;
    for (double* f : {&raw.static_fraction, &raw.local_fraction, &raw.per_thread_fraction}) {
        if (!std::isfinite(*f) || *f < 0.0) {
            *f = 0.0;
            adjusted = true;
        } else if (*f > 1.0) {
            *f = 1.0;
            adjusted = true;
        }
    }
    const double sum = raw.static_fraction + raw.local_fraction + raw.per_thread_fraction;
    if (sum > 1.0 + kFractionTolerance) {
        raw.static_fraction /= sum;
        raw.local_fraction /= sum;
        raw.per_thread_fraction /= sum;
        adjusted = true;
    }
    return {raw, adjusted};
}

const ChannelSignature& BandwidthSignature::channel(Channel c) const {
    switch (c) {
        case Channel::Reads: return reads;
        case Channel::Writes: return writes;
        case Channel::Combined: return combined;
    }
    return combined;
}

ChannelSignature& BandwidthSignature::channel(Channel c) {
    return const_cast<ChannelSignature&>(std::as_const(*this).channel(c));
}

bool BandwidthSignature::low_traffic(Channel c) const {
    switch (c) {
        case Channel::Reads: return low_traffic_reads;
        case Channel::Writes: return low_traffic_writes;
        case Channel::Combined: return low_traffic_combined;
    }
    return false;
}

void BandwidthSignature::set_low_traffic(Channel c, bool flag) {
    switch (c) {
        case Channel::Reads: low_traffic_reads = flag; break;
        case Channel::Writes: low_traffic_writes = flag; break;
        case Channel::Combined: low_traffic_combined = flag; break;
    }
}

void BandwidthSignature::validate() const {
    if (socket_count < 1) throw DomainError("signature socket_count must be at least 1");
    for (auto c : kAllChannels) {
        try {
            channel(c).validate(socket_count);
        } catch (const DomainError& e) {
            throw DomainError(std::string(to_string(c)) + ": " + e.what());
        }
    }
}

}  // namespace numasig
