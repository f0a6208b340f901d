#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "numasig/signature.hpp"
#include "numasig/topology.hpp"

namespace numasig {

/// Square socket x bank matrix: entry (cpu, bank) is the share of the
/// traffic from threads on `cpu` that lands on `bank`.
///
/// Rows for sockets without threads are all zero; every other row sums to 1.
class DistributionMatrix {
public:
    explicit DistributionMatrix(std::size_t sockets = 0) : size_(sockets), cells_(sockets * sockets, 0.0) {}

    std::size_t size() const noexcept { return size_; }

    double operator()(std::size_t cpu, std::size_t bank) const { return cells_[cpu * size_ + bank]; }
    double& operator()(std::size_t cpu, std::size_t bank) { return cells_[cpu * size_ + bank]; }

    double row_sum(std::size_t cpu) const;

    /// Adds `weight * other` in place.
    DistributionMatrix& add_scaled(const DistributionMatrix& other, double weight);

    bool operator==(const DistributionMatrix&) const = default;

private:
    std::size_t size_;
    std::vector<double> cells_;
};

DistributionMatrix build_static_matrix(const ThreadPlacement& placement, std::size_t static_socket);
DistributionMatrix build_local_matrix(const ThreadPlacement& placement);
DistributionMatrix build_per_thread_matrix(const ThreadPlacement& placement);
DistributionMatrix build_interleaved_matrix(const ThreadPlacement& placement);

/// Weighted sum of the four pattern matrices under `signature`.
DistributionMatrix combine_signature_matrix(const ChannelSignature& signature, const ThreadPlacement& placement);

/// Traffic seen by one memory bank, from its own perspective.
struct BankTraffic {
    double local = 0.0;
    double remote = 0.0;

    double total() const noexcept { return local + remote; }
};

/// Routes per-socket demand (bytes/s) through `matrix`.
///
/// Bank j receives matrix(j,j)*demand[j] as local traffic and
/// sum_{i != j} matrix(i,j)*demand[i] as remote traffic. Demand on a socket
/// whose matrix row is empty is rejected.
std::vector<BankTraffic> predict_bank_loads(const DistributionMatrix& matrix, std::span<const double> demand);

/// Read and write traffic per bank for one placement.
struct BankLoadPrediction {
    std::vector<BankTraffic> reads;
    std::vector<BankTraffic> writes;

    double total() const noexcept;
};

/// Applies the read and write signatures of `signature` to a placement.
BankLoadPrediction predict(const BandwidthSignature& signature, const ThreadPlacement& placement,
                           std::span<const double> read_demand, std::span<const double> write_demand);

}  // namespace numasig
