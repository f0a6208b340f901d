#include <gtest/gtest.h>

#include <cmath>

#include "numasig/errors.hpp"
#include "numasig/extraction.hpp"
#include "numasig/simulator.hpp"

namespace numasig {
namespace {

const ChannelSignature kExample{1, 0.2, 0.35, 0.3};

GroundTruthWorkload example_workload() {
    GroundTruthWorkload w;
    w.reads = kExample;
    w.writes = kExample;
    w.read_demand = 1.0;
    w.write_demand = 0.5;
    w.duration_seconds = 1.0;
    return w;
}

ThreadPlacement placement(std::vector<std::size_t> counts) { return ThreadPlacement(MachineTopology{2, 32}, counts); }

TEST(Simulate, WorkedExampleFlows) {
    const auto s = simulate_counters(example_workload(), placement({3, 1}));
    // Matrix [[0.65,0.35],[0.30,0.70]] times socket demand (3,1).
    EXPECT_NEAR(s.banks[0].local_read_bytes, 1.95, 1e-12);
    EXPECT_NEAR(s.banks[0].remote_read_bytes, 0.30, 1e-12);
    EXPECT_NEAR(s.banks[1].local_read_bytes, 0.70, 1e-12);
    EXPECT_NEAR(s.banks[1].remote_read_bytes, 1.05, 1e-12);
    EXPECT_NEAR(s.banks[0].local_write_bytes, 0.975, 1e-12);
    EXPECT_NEAR(s.banks[1].remote_write_bytes, 0.525, 1e-12);
    EXPECT_EQ(s.sockets[0].instructions, 6'000'000'000u);
    EXPECT_EQ(s.sockets[1].instructions, 2'000'000'000u);
    EXPECT_DOUBLE_EQ(s.sockets[0].elapsed_seconds, 1.0);
}

TEST(Simulate, UnusedSocketRecordsNoInstructions) {
    const auto s = simulate_counters(example_workload(), placement({4, 0}));
    EXPECT_EQ(s.sockets[1].instructions, 0u);
    EXPECT_NEAR(s.banks[1].remote_read_bytes, 0.2 * 4, 1e-12);  // static data lives on bank 2
    EXPECT_EQ(s.banks[1].local_read_bytes, 0.0);
}

TEST(Simulate, PureLocalHasNoRemoteTraffic) {
    auto w = example_workload();
    w.reads = w.writes = {0, 0, 1, 0};
    for (const auto& p : two_socket_splits(MachineTopology{2, 8}, 8)) {
        for (const auto& b : simulate_counters(w, p).banks) {
            EXPECT_EQ(b.remote_read_bytes, 0.0) << p.to_string();
            EXPECT_EQ(b.remote_write_bytes, 0.0) << p.to_string();
        }
    }
}

TEST(Simulate, HalfSpeedSocketScenario) {
    // Three quarters of each CPU's traffic stays local under (1,1).
    auto w = example_workload();
    w.reads = w.writes = {0, 0, 0.5, 0};
    w.thread_rates = {2e9, 1e9};
    const auto s = simulate_counters(w, placement({1, 1}));
    const auto& b1 = s.banks[0];
    const auto& b2 = s.banks[1];
    EXPECT_NEAR(b1.local_read_bytes / (b1.local_read_bytes + b1.remote_read_bytes), 6.0 / 7.0, 1e-12);
    EXPECT_NEAR(b2.local_read_bytes / (b2.local_read_bytes + b2.remote_read_bytes), 6.0 / 10.0, 1e-12);
    const double t1 = b1.local_read_bytes + b1.remote_read_bytes;
    const double t2 = b2.local_read_bytes + b2.remote_read_bytes;
    EXPECT_NEAR(t1, 7.0 / 8.0, 1e-12);
    EXPECT_NEAR(t2, 5.0 / 8.0, 1e-12);
    EXPECT_NEAR(t1 / t2, 7.0 / 5.0, 1e-12);
    EXPECT_EQ(s.sockets[1].instructions * 2, s.sockets[0].instructions);
}

TEST(Simulate, SocketDemandScalesWithRateAndThreads) {
    auto w = example_workload();
    w.thread_rates = {3e9, 1.5e9};
    const auto d = socket_demand(w, placement({2, 4}), Channel::Reads);
    EXPECT_DOUBLE_EQ(d[0], 2.0);
    EXPECT_DOUBLE_EQ(d[1], 2.0);
    const auto combined = socket_demand(w, placement({2, 4}), Channel::Combined);
    EXPECT_DOUBLE_EQ(combined[0], 3.0);
}

TEST(Simulate, DeterministicForFixedSeed) {
    auto w = example_workload();
    w.noise_stddev = 0.02;
    w.seed = 0xDEADBEEFCAFEULL;
    const auto a = simulate_counters(w, placement({6, 2}));
    const auto b = simulate_counters(w, placement({6, 2}));
    EXPECT_EQ(a, b);
    w.seed += 1;
    EXPECT_NE(simulate_counters(w, placement({6, 2})), a);
    // The placement is part of the stream: relative perturbations differ.
    auto factor = [&](const ThreadPlacement& p) {
        return simulate_counters(w, p).banks[0].local_read_bytes /
               simulate_counters(example_workload(), p).banks[0].local_read_bytes;
    };
    EXPECT_NE(factor(placement({4, 4})), factor(placement({6, 2})));
}

TEST(Simulate, NoiseIsTruncatedAtThreeSigma) {
    auto w = example_workload();
    w.reads = w.writes = {0, 0, 0, 0};
    w.noise_stddev = 0.1;
    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        w.seed = seed;
        const auto noisy = simulate_counters(w, placement({2, 2}));
        for (const auto& b : noisy.banks) {
            // Pure interleaving under (2,2): every flow is 1 unit.
            for (double v : {b.local_read_bytes, b.remote_read_bytes}) {
                EXPECT_GE(v, 0.7 - 1e-12);
                EXPECT_LE(v, 1.3 + 1e-12);
            }
        }
    }
}

double mean_fraction_error(double noise) {
    auto w = example_workload();
    w.noise_stddev = noise;
    const auto pair = make_profiling_placements(MachineTopology{2, 12}, 8);
    double total = 0.0;
    int n = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        w.seed = seed;
        const auto sig = extract_signature(simulate_counters(w, pair.symmetric), simulate_counters(w, pair.asymmetric));
        for (auto c : {Channel::Reads, Channel::Writes}) {
            const auto& got = sig.channel(c);
            total += std::abs(got.static_fraction - kExample.static_fraction) +
                     std::abs(got.local_fraction - kExample.local_fraction) +
                     std::abs(got.per_thread_fraction - kExample.per_thread_fraction);
            n += 3;
        }
    }
    return total / n;
}

TEST(Simulate, RoundTripErrorGrowsWithNoise) {
    const double quiet = mean_fraction_error(0.005);
    const double loud = mean_fraction_error(0.02);
    EXPECT_GT(quiet, 0.0);
    EXPECT_GT(loud, quiet);
    EXPECT_LT(mean_fraction_error(0.0), 1e-12);
}

TEST(Simulate, RateCompensation) {
    const auto pair = make_profiling_placements(MachineTopology{2, 12}, 8);
    auto w = example_workload();
    w.writes = {0, 0.1, 0.5, 0.1};
    const auto equal_sym = simulate_counters(w, pair.symmetric);
    const auto equal = extract_signature(equal_sym, simulate_counters(w, pair.asymmetric));
    for (const auto& rates : std::vector<std::vector<double>>{{2e9, 1e9}, {1e9, 3.7e9}, {5e8, 5e8}}) {
        w.thread_rates = rates;
        const auto sym = simulate_counters(w, pair.symmetric);
        if (rates[0] != rates[1]) {
            EXPECT_NE(sym.banks, equal_sym.banks);
        }
        const auto got = extract_signature(sym, simulate_counters(w, pair.asymmetric));
        for (auto c : kAllChannels) {
            EXPECT_EQ(got.channel(c).static_socket, equal.channel(c).static_socket);
            EXPECT_NEAR(got.channel(c).static_fraction, equal.channel(c).static_fraction, 1e-9);
            EXPECT_NEAR(got.channel(c).local_fraction, equal.channel(c).local_fraction, 1e-9);
            EXPECT_NEAR(got.channel(c).per_thread_fraction, equal.channel(c).per_thread_fraction, 1e-9);
        }
    }
}

TEST(Simulate, RejectsInvalidWorkloads) {
    auto w = example_workload();
    w.read_demand = 0;
    EXPECT_THROW(simulate_counters(w, placement({1, 1})), DomainError);
    w = example_workload();
    w.noise_stddev = -0.1;
    EXPECT_THROW(simulate_counters(w, placement({1, 1})), DomainError);
    w = example_workload();
    w.thread_rates = {1e9};
    EXPECT_THROW(simulate_counters(w, placement({1, 1})), DomainError);
    w = example_workload();
    w.reads = {2, 0.1, 0.1, 0.1};
    EXPECT_THROW(simulate_counters(w, placement({1, 1})), DomainError);
    w = example_workload();
    w.duration_seconds = 0;
    EXPECT_THROW(simulate_counters(w, placement({1, 1})), DomainError);
}

TEST(ProfilingPlacements, Examples) {
    auto p = make_profiling_placements(MachineTopology{2, 12}, 8);
    EXPECT_EQ(p.symmetric.to_string(), "4,4");
    EXPECT_EQ(p.asymmetric.to_string(), "6,2");
    p = make_profiling_placements(MachineTopology{2, 6}, 6);
    EXPECT_EQ(p.symmetric.to_string(), "3,3");
    EXPECT_EQ(p.asymmetric.to_string(), "4,2");
    p = make_profiling_placements(MachineTopology{2, 18}, 18);
    EXPECT_EQ(p.asymmetric.to_string(), "13,5");
    p = make_profiling_placements(MachineTopology{2, 3}, 4);
    EXPECT_EQ(p.symmetric.to_string(), "2,2");
    EXPECT_EQ(p.asymmetric.to_string(), "3,1");
}

TEST(ProfilingPlacements, InfeasibleCounts) {
    EXPECT_THROW(make_profiling_placements(MachineTopology{2, 12}, 2), InputError);
    EXPECT_THROW(make_profiling_placements(MachineTopology{2, 2}, 4), InputError);
    EXPECT_THROW(make_profiling_placements(MachineTopology{2, 12}, 7), InputError);
    EXPECT_THROW(make_profiling_placements(MachineTopology{2, 12}, 0), InputError);
    EXPECT_THROW(make_profiling_placements(MachineTopology{3, 12}, 6), InputError);
    EXPECT_THROW(make_profiling_placements(MachineTopology{2, 3}, 8), InputError);
}

TEST(Pathological, DemandWeights) {
    const auto w = make_pathological_workload(example_workload(), 2.0);
    const auto weights = w.thread_demand_weights(4);
    ASSERT_EQ(weights.size(), 4u);
    EXPECT_DOUBLE_EQ(weights[0] / weights[2], 2.0);
    EXPECT_DOUBLE_EQ(weights[0], weights[1]);
    EXPECT_DOUBLE_EQ(weights[2], weights[3]);
    EXPECT_NEAR(weights[0] + weights[1] + weights[2] + weights[3], 4.0, 1e-12);

    const auto d = socket_demand(w, placement({2, 2}), Channel::Reads);
    EXPECT_NEAR(d[0] + d[1], 4.0, 1e-12);
    EXPECT_NEAR(d[0] / d[1], 2.0, 1e-12);
}

TEST(Pathological, NearUnitSkewApproachesBase) {
    const auto base = example_workload();
    const auto w = make_pathological_workload(base, 1.0 + 1e-12);
    const auto a = simulate_counters(base, placement({6, 2}));
    const auto b = simulate_counters(w, placement({6, 2}));
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(a.banks[i].local_read_bytes, b.banks[i].local_read_bytes, 1e-9);
        EXPECT_NEAR(a.banks[i].remote_read_bytes, b.banks[i].remote_read_bytes, 1e-9);
    }
}

TEST(Pathological, RejectsBadSkew) {
    EXPECT_THROW(make_pathological_workload(example_workload(), 1.0), InputError);
    EXPECT_THROW(make_pathological_workload(example_workload(), 0.5), InputError);
    const auto skewed = make_pathological_workload(example_workload(), 2.0);
    EXPECT_THROW(make_pathological_workload(skewed, 3.0), InputError);
}

TEST(Splits, CoverEveryFittingSplit) {
    const auto all = two_socket_splits(MachineTopology{2, 18}, 8);
    ASSERT_EQ(all.size(), 9u);
    EXPECT_EQ(all.front().to_string(), "0,8");
    EXPECT_EQ(all.back().to_string(), "8,0");
    const auto bounded = two_socket_splits(MachineTopology{2, 10}, 18);
    ASSERT_EQ(bounded.size(), 3u);
    EXPECT_EQ(bounded.front().to_string(), "8,10");
    EXPECT_THROW(two_socket_splits(MachineTopology{2, 4}, 9), InputError);
}

}  // namespace
}  // namespace numasig
