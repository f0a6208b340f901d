#include "numasig/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "numasig/errors.hpp"
#include "numasig/matrix.hpp"

namespace numasig {

void GroundTruthWorkload::validate(std::size_t socket_count) const {
    reads.validate(socket_count);
    writes.validate(socket_count);
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(read_demand) || !positive(write_demand)) throw DomainError("per-thread demand must be positive");
    if (!positive(duration_seconds)) throw DomainError("duration_seconds must be positive");
    if (!std::isfinite(noise_stddev) || noise_stddev < 0.0) throw DomainError("noise must be non-negative");
    if (!std::isfinite(demand_skew) || demand_skew < 1.0) throw DomainError("demand skew must be >= 1");
    if (!thread_rates.empty()) {
        if (thread_rates.size() != socket_count) {
            throw DomainError("instruction rates list " + std::to_string(thread_rates.size()) +
                              " sockets, topology has " + std::to_string(socket_count));
        }
        if (!std::all_of(thread_rates.begin(), thread_rates.end(), positive)) {
            throw DomainError("instruction rates must be positive");
        }
    }
}

double GroundTruthWorkload::thread_rate(std::size_t socket) const {
    return thread_rates.empty() ? kDefaultThreadRate : thread_rates.at(socket);
}

std::vector<double> GroundTruthWorkload::thread_demand_weights(std::size_t total_threads) const {
    std::vector<double> weights(total_threads, 1.0);
    if (demand_skew == 1.0 || total_threads == 0) return weights;
    const std::size_t heavy = total_threads / 2;
    for (std::size_t k = 0; k < heavy; ++k) weights[k] = demand_skew;
    const double sum = demand_skew * static_cast<double>(heavy) + static_cast<double>(total_threads - heavy);
    const double scale = static_cast<double>(total_threads) / sum;
    for (auto& w : weights) w *= scale;
    return weights;
}

std::vector<double> socket_demand(const GroundTruthWorkload& workload, const ThreadPlacement& placement,
                                  Channel channel) {
    const auto s = placement.socket_count();
    const auto weights = workload.thread_demand_weights(placement.total_threads());
    double reference = 0.0;
    for (std::size_t i = 0; i < s; ++i) reference = std::max(reference, workload.thread_rate(i));

    const double per_thread = channel == Channel::Reads    ? workload.read_demand
                              : channel == Channel::Writes ? workload.write_demand
                                                           : workload.read_demand + workload.write_demand;
    std::vector<double> demand(s, 0.0);
    std::size_t thread = 0;
    for (std::size_t i = 0; i < s; ++i) {
        double weight = 0.0;
        for (std::size_t k = 0; k < placement.threads_on(i); ++k) weight += weights[thread++];
        demand[i] = per_thread * weight * (workload.thread_rate(i) / reference);
    }
    return demand;
}

namespace {

class CounterNoise {
public:
    CounterNoise(const GroundTruthWorkload& workload, const ThreadPlacement& placement)
        : stddev_(workload.noise_stddev) {
        std::vector<std::uint32_t> words{static_cast<std::uint32_t>(workload.seed),
                                         static_cast<std::uint32_t>(workload.seed >> 32)};
        for (auto n : placement.threads_per_socket()) words.push_back(static_cast<std::uint32_t>(n));
        std::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
    }

    double apply(double value) {
        if (stddev_ == 0.0) return value;
        double z = 0.0;
        do {
            z = normal_(engine_);
        } while (std::abs(z) > 3.0);
        return std::max(0.0, value * (1.0 + stddev_ * z));
    }

private:
    double stddev_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

}  // namespace

CounterSample simulate_counters(const GroundTruthWorkload& workload, const ThreadPlacement& placement) {
    const auto s = placement.socket_count();
    workload.validate(s);

    const auto read_matrix = combine_signature_matrix(workload.reads, placement);
    const auto write_matrix = combine_signature_matrix(workload.writes, placement);
    const auto reads = predict_bank_loads(read_matrix, socket_demand(workload, placement, Channel::Reads));
    const auto writes = predict_bank_loads(write_matrix, socket_demand(workload, placement, Channel::Writes));

    CounterNoise noise(workload, placement);
    const double t = workload.duration_seconds;
    CounterSample sample{placement, std::vector<BankCounters>(s), std::vector<SocketCounters>(s)};
    for (std::size_t bank = 0; bank < s; ++bank) {
        auto& b = sample.banks[bank];
        b.local_read_bytes = noise.apply(reads[bank].local * t);
        b.remote_read_bytes = noise.apply(reads[bank].remote * t);
        b.local_write_bytes = noise.apply(writes[bank].local * t);
        b.remote_write_bytes = noise.apply(writes[bank].remote * t);
    }
    for (std::size_t i = 0; i < s; ++i) {
        sample.sockets[i].elapsed_seconds = t;
        if (!placement.is_used(i)) continue;
        const double instructions = workload.thread_rate(i) * static_cast<double>(placement.threads_on(i)) * t;
        sample.sockets[i].instructions =
            std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(noise.apply(instructions))));
    }
    return sample;
}

ProfilingPlacements make_profiling_placements(const MachineTopology& topology, std::size_t total_threads) {
    topology.validate();
    if (topology.socket_count != 2) throw InputError("profiling placements are defined for two sockets");
    if (total_threads == 0 || total_threads % 2 != 0) {
        throw InputError("profiling needs an even, positive thread count, got " + std::to_string(total_threads));
    }
    const std::size_t half = total_threads / 2;
    const std::size_t loaded = total_threads * 3 / 4;
    const std::size_t light = total_threads - loaded;
    if (half > topology.cores_per_socket) {
        throw InputError(std::to_string(total_threads) + " threads do not fit symmetrically on " +
                         std::to_string(topology.cores_per_socket) + " cores per socket");
    }
    if (light == 0 || loaded == light) {
        throw InputError("no asymmetric split of " + std::to_string(total_threads) +
                         " threads with threads on both sockets");
    }
    if (loaded > topology.cores_per_socket) {
        throw InputError("asymmetric split " + std::to_string(loaded) + "," + std::to_string(light) +
                         " exceeds " + std::to_string(topology.cores_per_socket) + " cores per socket");
    }
    return {ThreadPlacement(topology, {half, half}), ThreadPlacement(topology, {loaded, light})};
}

GroundTruthWorkload make_pathological_workload(const GroundTruthWorkload& base, double skew) {
    if (!base.in_model()) throw InputError("pathological workload must start from an in-model workload");
    if (!std::isfinite(skew) || skew <= 1.0) throw InputError("skew must be greater than 1");
    GroundTruthWorkload out = base;
    out.demand_skew = skew;
    return out;
}

std::vector<ThreadPlacement> two_socket_splits(const MachineTopology& topology, std::size_t total_threads) {
    topology.validate();
    if (topology.socket_count != 2) throw InputError("thread splits are defined for two sockets");
    std::vector<ThreadPlacement> out;
    for (std::size_t first = 0; first <= total_threads; ++first) {
        const std::size_t second = total_threads - first;
        if (first > topology.cores_per_socket || second > topology.cores_per_socket) continue;
        out.emplace_back(topology, std::vector<std::size_t>{first, second});
    }
    if (out.empty()) {
        throw InputError(std::to_string(total_threads) + " threads do not fit on two sockets of " +
                         std::to_string(topology.cores_per_socket) + " cores");
    }
    return out;
}

}  // namespace numasig
