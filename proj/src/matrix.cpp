#include "numasig/matrix.hpp"

#include <cmath>
#include <string>

#include "numasig/errors.hpp"

namespace numasig {

double DistributionMatrix::row_sum(std::size_t cpu) const {
    double sum = 0.0;
    for (std::size_t bank = 0; bank < size_; ++bank) sum += (*this)(cpu, bank);
    return sum;
}

DistributionMatrix& DistributionMatrix::add_scaled(const DistributionMatrix& other, double weight) {
    if (other.size_ != size_) throw DomainError("matrix size mismatch");
    for (std::size_t k = 0; k < cells_.size(); ++k) cells_[k] += weight * other.cells_[k];
    return *this;
}

DistributionMatrix build_static_matrix(const ThreadPlacement& placement, std::size_t static_socket) {
    const auto s = placement.socket_count();
    if (static_socket >= s) {
        throw DomainError("static socket " + std::to_string(static_socket + 1) + " is outside 1.." +
                          std::to_string(s));
    }
    DistributionMatrix m(s);
    for (auto cpu : placement.used_sockets()) m(cpu, static_socket) = 1.0;
    return m;
}

DistributionMatrix build_local_matrix(const ThreadPlacement& placement) {
    DistributionMatrix m(placement.socket_count());
    for (auto cpu : placement.used_sockets()) m(cpu, cpu) = 1.0;
    return m;
}

DistributionMatrix build_per_thread_matrix(const ThreadPlacement& placement) {
    const auto s = placement.socket_count();
    const auto n = static_cast<double>(placement.total_threads());
    DistributionMatrix m(s);
    for (auto cpu : placement.used_sockets()) {
        for (std::size_t bank = 0; bank < s; ++bank) {
            m(cpu, bank) = static_cast<double>(placement.threads_on(bank)) / n;
        }
    }
    return m;
}

DistributionMatrix build_interleaved_matrix(const ThreadPlacement& placement) {
    const auto used = placement.used_sockets();
    const double share = 1.0 / static_cast<double>(used.size());
    DistributionMatrix m(placement.socket_count());
    for (auto cpu : used) {
        for (auto bank : used) m(cpu, bank) = share;
    }
    return m;
}

DistributionMatrix combine_signature_matrix(const ChannelSignature& signature, const ThreadPlacement& placement) {
    signature.validate(placement.socket_count());
    DistributionMatrix m(placement.socket_count());
    m.add_scaled(build_static_matrix(placement, signature.static_socket), signature.static_fraction)
        .add_scaled(build_local_matrix(placement), signature.local_fraction)
        .add_scaled(build_per_thread_matrix(placement), signature.per_thread_fraction)
        .add_scaled(build_interleaved_matrix(placement), signature.interleaved_fraction());
    return m;
}

std::vector<BankTraffic> predict_bank_loads(const DistributionMatrix& matrix, std::span<const double> demand) {
    const auto s = matrix.size();
    if (demand.size() != s) {
        throw DomainError("demand lists " + std::to_string(demand.size()) + " sockets, matrix has " +
                          std::to_string(s));
    }
    for (std::size_t cpu = 0; cpu < s; ++cpu) {
        if (!std::isfinite(demand[cpu]) || demand[cpu] < 0.0) {
            throw DomainError("demand on socket " + std::to_string(cpu + 1) + " must be non-negative");
        }
        if (demand[cpu] > 0.0 && matrix.row_sum(cpu) == 0.0) {
            throw DomainError("demand on socket " + std::to_string(cpu + 1) + " which has no threads");
        }
    }
    std::vector<BankTraffic> loads(s);
    for (std::size_t cpu = 0; cpu < s; ++cpu) {
        for (std::size_t bank = 0; bank < s; ++bank) {
            const double flow = matrix(cpu, bank) * demand[cpu];
            (cpu == bank ? loads[bank].local : loads[bank].remote) += flow;
        }
    }
    return loads;
}

double BankLoadPrediction::total() const noexcept {
    double sum = 0.0;
    for (const auto& b : reads) sum += b.total();
    for (const auto& b : writes) sum += b.total();
    return sum;
}

BankLoadPrediction predict(const BandwidthSignature& signature, const ThreadPlacement& placement,
                           std::span<const double> read_demand, std::span<const double> write_demand) {
    if (signature.socket_count != placement.socket_count()) {
        throw DomainError("signature describes " + std::to_string(signature.socket_count) +
                          " sockets, placement has " + std::to_string(placement.socket_count()));
    }
    return {predict_bank_loads(combine_signature_matrix(signature.reads, placement), read_demand),
            predict_bank_loads(combine_signature_matrix(signature.writes, placement), write_demand)};
}

}  // namespace numasig
