#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "numasig/errors.hpp"
#include "numasig/matrix.hpp"
#include "test_support.hpp"

namespace numasig {
namespace {

constexpr double kTol = 1e-9;

void expect_matrix(const DistributionMatrix& m, const std::vector<std::vector<double>>& expected) {
    ASSERT_EQ(m.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        for (std::size_t j = 0; j < expected.size(); ++j) {
            EXPECT_NEAR(m(i, j), expected[i][j], kTol) << "cell (" << i << "," << j << ")";
        }
    }
}

ThreadPlacement placement(std::vector<std::size_t> counts) { return ThreadPlacement::unbounded(std::move(counts)); }

const ChannelSignature kWorkedExample{1, 0.2, 0.35, 0.3};

TEST(Topology, RejectsInvalidShapes) {
    EXPECT_THROW((MachineTopology{0, 4}.validate()), DomainError);
    EXPECT_THROW((MachineTopology{2, 0}.validate()), DomainError);
    EXPECT_THROW(ThreadPlacement(MachineTopology{2, 4}, {5, 0}), DomainError);
    EXPECT_THROW(ThreadPlacement(MachineTopology{2, 4}, {0, 0}), DomainError);
    EXPECT_THROW(ThreadPlacement(MachineTopology{2, 4}, {1, 1, 1}), DomainError);
}

TEST(Topology, PlacementQueries) {
    const auto p = placement({3, 0, 3});
    EXPECT_EQ(p.total_threads(), 6u);
    EXPECT_EQ(p.used_socket_count(), 2u);
    EXPECT_TRUE(p.is_symmetric());
    EXPECT_FALSE(placement({3, 1}).is_symmetric());
    EXPECT_EQ(p.to_string(), "3,0,3");
    EXPECT_EQ(parse_thread_counts("6, 2"), (std::vector<std::size_t>{6, 2}));
    EXPECT_THROW(parse_thread_counts("6,x"), InputError);
    EXPECT_THROW(parse_thread_counts("6,,2"), InputError);
}

TEST(StaticMatrix, WorkedExampleColumn) {
    expect_matrix(build_static_matrix(placement({3, 1}), 1), {{0, 1}, {0, 1}});
}

TEST(StaticMatrix, UnusedRowsStayEmpty) {
    expect_matrix(build_static_matrix(placement({4, 0}), 0), {{1, 0}, {0, 0}});
    expect_matrix(build_static_matrix(placement({1, 1, 1}), 2), {{0, 0, 1}, {0, 0, 1}, {0, 0, 1}});
}

TEST(StaticMatrix, RejectsSocketOutsideTopology) {
    EXPECT_THROW(build_static_matrix(placement({3, 1}), 2), DomainError);
}

TEST(StaticMatrix, MayTargetBankWithoutThreads) {
    expect_matrix(build_static_matrix(placement({4, 0}), 1), {{0, 1}, {0, 0}});
}

TEST(LocalMatrix, IdentityOnUsedRows) {
    expect_matrix(build_local_matrix(placement({3, 1})), {{1, 0}, {0, 1}});
    expect_matrix(build_local_matrix(placement({2, 0})), {{1, 0}, {0, 0}});
    expect_matrix(build_local_matrix(placement({1, 1, 1})), {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
}

TEST(PerThreadMatrix, ColumnsWeightedByThreadShare) {
    expect_matrix(build_per_thread_matrix(placement({3, 1})), {{0.75, 0.25}, {0.75, 0.25}});
    expect_matrix(build_per_thread_matrix(placement({2, 2})), {{0.5, 0.5}, {0.5, 0.5}});
    expect_matrix(build_per_thread_matrix(placement({5, 3, 2})),
                  {{0.5, 0.3, 0.2}, {0.5, 0.3, 0.2}, {0.5, 0.3, 0.2}});
}

TEST(InterleavedMatrix, SpreadsOverUsedSocketsOnly) {
    expect_matrix(build_interleaved_matrix(placement({3, 1})), {{0.5, 0.5}, {0.5, 0.5}});
    expect_matrix(build_interleaved_matrix(placement({4, 0})), {{1, 0}, {0, 0}});
    const double third = 1.0 / 3.0;
    expect_matrix(build_interleaved_matrix(placement({1, 1, 1})),
                  {{third, third, third}, {third, third, third}, {third, third, third}});
    expect_matrix(build_interleaved_matrix(placement({2, 0, 1})), {{0.5, 0, 0.5}, {0, 0, 0}, {0.5, 0, 0.5}});
}

TEST(CombineSignature, WorkedExample) {
    expect_matrix(combine_signature_matrix(kWorkedExample, placement({3, 1})), {{0.65, 0.35}, {0.30, 0.70}});
}

TEST(CombineSignature, PurePatterns) {
    expect_matrix(combine_signature_matrix({0, 0, 0, 0}, placement({2, 2})), {{0.5, 0.5}, {0.5, 0.5}});
    expect_matrix(combine_signature_matrix({0, 0, 1, 0}, placement({5, 2})), {{1, 0}, {0, 1}});
    expect_matrix(combine_signature_matrix({0, 0, 1, 0}, placement({0, 2, 1})), {{0, 0, 0}, {0, 1, 0}, {0, 0, 1}});
}

TEST(CombineSignature, RejectsInvalidSignature) {
    EXPECT_THROW(combine_signature_matrix({0, 0.6, 0.3, 0.2}, placement({3, 1})), DomainError);
    EXPECT_THROW(combine_signature_matrix({0, -0.1, 0.3, 0.2}, placement({3, 1})), DomainError);
    EXPECT_THROW(combine_signature_matrix({2, 0.1, 0.3, 0.2}, placement({3, 1})), DomainError);
}

TEST(PredictBankLoads, WorkedExampleDemand) {
    const auto m = combine_signature_matrix(kWorkedExample, placement({3, 1}));
    const std::vector<double> demand{3.0, 1.0};
    const auto loads = predict_bank_loads(m, demand);
    EXPECT_NEAR(loads[0].local, 1.95, kTol);
    EXPECT_NEAR(loads[0].remote, 0.30, kTol);
    EXPECT_NEAR(loads[1].local, 0.70, kTol);
    EXPECT_NEAR(loads[1].remote, 1.05, kTol);
}

TEST(PredictBankLoads, IdentityKeepsTrafficLocal) {
    const auto m = build_local_matrix(placement({2, 2}));
    const std::vector<double> demand{1.5, 4.0};
    const auto loads = predict_bank_loads(m, demand);
    EXPECT_DOUBLE_EQ(loads[0].local, 1.5);
    EXPECT_DOUBLE_EQ(loads[1].local, 4.0);
    EXPECT_DOUBLE_EQ(loads[0].remote + loads[1].remote, 0.0);
}

TEST(PredictBankLoads, UniformSplitsEvenly) {
    const auto m = build_interleaved_matrix(placement({2, 2}));
    const std::vector<double> demand{2.0, 2.0};
    for (const auto& b : predict_bank_loads(m, demand)) {
        EXPECT_DOUBLE_EQ(b.local, 1.0);
        EXPECT_DOUBLE_EQ(b.remote, 1.0);
    }
}

TEST(PredictBankLoads, RejectsDemandOnUnusedSocket) {
    const auto m = build_local_matrix(placement({2, 0}));
    const std::vector<double> demand{1.0, 0.5};
    EXPECT_THROW(predict_bank_loads(m, demand), DomainError);
    const std::vector<double> negative{-1.0, 0.0};
    EXPECT_THROW(predict_bank_loads(m, negative), DomainError);
}

TEST(PredictBankLoads, BothChannels) {
    BandwidthSignature sig;
    sig.reads = kWorkedExample;
    sig.writes = {0, 0, 1, 0};
    sig.combined = kWorkedExample;
    const std::vector<double> reads{3.0, 1.0}, writes{1.0, 2.0};
    const auto prediction = predict(sig, placement({3, 1}), reads, writes);
    EXPECT_NEAR(prediction.total(), 7.0, kTol);
    EXPECT_DOUBLE_EQ(prediction.writes[1].local, 2.0);
}

TEST(Sanitize, ClampsAndRescales) {
    auto r = sanitize({0, -0.1, 0.5, 0.2});
    EXPECT_TRUE(r.adjusted);
    EXPECT_EQ(r.signature.static_fraction, 0.0);

    r = sanitize({0, 0.5, 0.5, 0.5});
    EXPECT_TRUE(r.adjusted);
    EXPECT_NEAR(r.signature.static_fraction + r.signature.local_fraction + r.signature.per_thread_fraction, 1.0,
                1e-12);
    EXPECT_NEAR(r.signature.local_fraction, 1.0 / 3.0, 1e-12);

    r = sanitize(kWorkedExample);
    EXPECT_FALSE(r.adjusted);
    EXPECT_EQ(r.signature, kWorkedExample);
}

// ---- properties -------------------------------------------------------

TEST(CoreModelProperties, UsedRowsAreStochasticAndEntriesConvex) {
    std::mt19937_64 rng(42);
    for (int iter = 0; iter < 5000; ++iter) {
        const std::size_t sockets = 1 + rng() % 4;
        const auto sig = numasig::testing::random_signature(rng, sockets);
        const auto p = numasig::testing::random_placement(rng, sockets, 12);
        const auto m = combine_signature_matrix(sig, p);
        for (std::size_t cpu = 0; cpu < sockets; ++cpu) {
            EXPECT_NEAR(m.row_sum(cpu), p.is_used(cpu) ? 1.0 : 0.0, kTol);
            for (std::size_t bank = 0; bank < sockets; ++bank) {
                EXPECT_GE(m(cpu, bank), 0.0);
                EXPECT_LE(m(cpu, bank), 1.0 + kTol);
            }
        }
    }
}

TEST(CoreModelProperties, SymmetricPlacementsMakePerThreadEqualInterleaved) {
    for (std::size_t sockets = 1; sockets <= 4; ++sockets) {
        for (std::size_t n = 1; n <= 5; ++n) {
            for (std::size_t mask = 1; mask < (1u << sockets); ++mask) {
                std::vector<std::size_t> counts(sockets);
                for (std::size_t i = 0; i < sockets; ++i) counts[i] = (mask >> i) & 1 ? n : 0;
                const auto p = placement(counts);
                EXPECT_EQ(build_per_thread_matrix(p), build_interleaved_matrix(p)) << p.to_string();
            }
        }
    }
}

TEST(CoreModelProperties, PredictionConservesDemand) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rate(0.0, 5e9);
    for (int iter = 0; iter < 2000; ++iter) {
        const std::size_t sockets = 1 + rng() % 4;
        const auto p = numasig::testing::random_placement(rng, sockets, 10);
        const auto m = combine_signature_matrix(numasig::testing::random_signature(rng, sockets), p);
        std::vector<double> demand(sockets, 0.0);
        for (std::size_t i = 0; i < sockets; ++i) demand[i] = p.is_used(i) ? rate(rng) : 0.0;
        const auto loads = predict_bank_loads(m, demand);
        double in = std::accumulate(demand.begin(), demand.end(), 0.0);
        double out = 0.0;
        for (const auto& b : loads) {
            EXPECT_GE(b.local, 0.0);
            EXPECT_GE(b.remote, 0.0);
            out += b.total();
        }
        EXPECT_NEAR(out, in, 1e-9 * std::max(in, 1.0));
    }
}

TEST(CoreModelProperties, SingleSocketCollapse) {
    std::mt19937_64 rng(3);
    for (std::size_t used = 0; used < 3; ++used) {
        std::vector<std::size_t> counts(3, 0);
        counts[used] = 4;
        const auto p = placement(counts);
        const auto reference = combine_signature_matrix({used, 0, 0, 0}, p);
        for (int iter = 0; iter < 100; ++iter) {
            auto sig = numasig::testing::random_signature(rng, 3);
            sig.static_socket = used;
            const auto m = combine_signature_matrix(sig, p);
            for (std::size_t i = 0; i < 3; ++i) {
                for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(m(i, j), reference(i, j), 1e-12);
            }
        }
    }
}

}  // namespace
}  // namespace numasig
