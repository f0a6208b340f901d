#include "numasig/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "numasig/errors.hpp"
#include "numasig/matrix.hpp"

namespace numasig {

double miscategorized_bandwidth(const ChannelSignature& truth, const ChannelSignature& estimate) {
    double distance = std::abs(truth.local_fraction - estimate.local_fraction) +
                      std::abs(truth.per_thread_fraction - estimate.per_thread_fraction) +
                      std::abs(truth.interleaved_fraction() - estimate.interleaved_fraction());
    if (truth.static_socket == estimate.static_socket) {
        distance += std::abs(truth.static_fraction - estimate.static_fraction);
    } else {
        distance += truth.static_fraction + estimate.static_fraction;
    }
    return distance / 2.0;
}

double max_fraction_error(const ChannelSignature& truth, const ChannelSignature& estimate) {
    const double static_error = truth.static_socket == estimate.static_socket
                                    ? std::abs(truth.static_fraction - estimate.static_fraction)
                                    : truth.static_fraction + estimate.static_fraction;
    return std::max({static_error, std::abs(truth.local_fraction - estimate.local_fraction),
                     std::abs(truth.per_thread_fraction - estimate.per_thread_fraction)});
}

std::vector<ChannelSignature> signature_grid(double step, std::size_t socket_count) {
    const auto steps = static_cast<int>(std::lround(1.0 / step));
    if (steps < 1 || std::abs(steps * step - 1.0) > 1e-9) throw InputError("grid step must divide 1 evenly");
    std::vector<ChannelSignature> grid;
    for (std::size_t socket = 0; socket < socket_count; ++socket) {
        for (int st = 0; st <= steps; ++st) {
            for (int lo = 0; st + lo <= steps; ++lo) {
                for (int pt = 0; st + lo + pt <= steps; ++pt) {
                    const double d = static_cast<double>(steps);
                    grid.push_back({socket, st / d, lo / d, pt / d});
                }
            }
        }
    }
    return grid;
}

std::optional<ChannelSignature> mixed_signature(const ChannelSignature& reads, const ChannelSignature& writes,
                                                double read_share) {
    std::size_t socket = reads.static_socket;
    if (reads.static_fraction == 0.0) {
        socket = writes.static_socket;
    } else if (writes.static_fraction != 0.0 && writes.static_socket != reads.static_socket) {
        return std::nullopt;
    }
    const double a = read_share;
    const double b = 1.0 - read_share;
    return ChannelSignature{socket, a * reads.static_fraction + b * writes.static_fraction,
                            a * reads.local_fraction + b * writes.local_fraction,
                            a * reads.per_thread_fraction + b * writes.per_thread_fraction};
}

double median(std::vector<double> values) { return percentile(std::move(values), 0.5); }

double percentile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double rank = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = static_cast<std::size_t>(std::ceil(rank));
    return values[lo] + (values[hi] - values[lo]) * (rank - static_cast<double>(lo));
}

double mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

ValidationReport run_validation(const ProfilingPlacements& placements, const GroundTruthWorkload& base,
                                const ValidateSettings& settings, const Extractor& extract) {
    ValidationReport report;
    const auto sockets = placements.symmetric.socket_count();
    const auto grid = signature_grid(settings.grid_step, sockets);
    const std::size_t block = grid.size() / sockets;
    const double read_share = base.read_demand / (base.read_demand + base.write_demand);

    for (double noise : settings.noise_levels) {
        NoiseLevelResult level;
        level.noise = noise;
        std::vector<double> fraction_errors;
        std::vector<double> miscategorized;
        const std::size_t seeds = noise == 0.0 ? 1 : settings.seeds;

        for (std::size_t i = 0; i < grid.size(); ++i) {
            const std::size_t offset = (i / block) * block;
            GroundTruthWorkload w = base;
            w.reads = grid[i];
            w.writes = grid[offset + ((i - offset) * 7 + 3) % block];
            w.noise_stddev = noise;
            const auto combined = mixed_signature(w.reads, w.writes, read_share);

            for (std::size_t k = 0; k < seeds; ++k) {
                w.seed = base.seed + k;
                BandwidthSignature got;
                try {
                    got = extract(simulate_counters(w, placements.symmetric),
                                  simulate_counters(w, placements.asymmetric), ExtractOptions{});
                } catch (const Error& e) {
                    report.failures.push_back("extraction failed at noise " + std::to_string(noise) + ": " +
                                              e.what());
                    continue;
                }
                auto record = [&](const ChannelSignature& truth, const ChannelSignature& estimate) {
                    const double err = max_fraction_error(truth, estimate);
                    fraction_errors.push_back(err);
                    level.max_fraction_error = std::max(level.max_fraction_error, err);
                    miscategorized.push_back(miscategorized_bandwidth(truth, estimate));
                };
                record(w.reads, got.reads);
                record(w.writes, got.writes);
                if (combined) record(*combined, got.combined);
                ++level.cases;
            }
        }
        level.median_fraction_error = median(fraction_errors);
        level.median_miscategorized = median(miscategorized);
        level.p95_miscategorized = percentile(miscategorized, 0.95);
        level.mean_miscategorized = mean(miscategorized);
        report.levels.push_back(level);

        if (noise == 0.0 && level.max_fraction_error > report.noiseless_tolerance) {
            report.failures.push_back("noise-free round trip error " + std::to_string(level.max_fraction_error) +
                                      " exceeds 1e-9");
        }
        if (std::abs(noise - 0.01) < 1e-12 && level.median_miscategorized > report.noisy_median_limit) {
            report.failures.push_back("median miscategorized bandwidth at 1% noise is " +
                                      std::to_string(level.median_miscategorized * 100.0) + "% (limit 2%)");
        }
    }
    report.passed = report.failures.empty();
    return report;
}

namespace {

double absolute_error(const std::vector<BankTraffic>& predicted, const std::vector<BankTraffic>& measured) {
    double err = 0.0;
    for (std::size_t b = 0; b < measured.size(); ++b) {
        err += std::abs(predicted[b].local - measured[b].local) + std::abs(predicted[b].remote - measured[b].remote);
    }
    return err;
}

std::vector<double> cpu_demand(const std::vector<BankTraffic>& flows, const ThreadPlacement& placement) {
    std::vector<double> demand{flows[0].local + flows[1].remote, flows[1].local + flows[0].remote};
    for (std::size_t i = 0; i < 2; ++i) {
        if (!placement.is_used(i)) demand[i] = 0.0;
    }
    return demand;
}

}  // namespace

SweepReport run_sweep(const BandwidthSignature& signature, const std::vector<MeasuredRun>& measured,
                      std::optional<Channel> channel) {
    if (measured.size() < 2) throw InputError("a sweep needs measured data for at least two placements");
    if (signature.socket_count != 2) throw InputError("sweeps are defined for two-socket signatures");

    std::vector<Channel> channels;
    if (channel) {
        channels.push_back(*channel);
    } else {
        channels = {Channel::Reads, Channel::Writes};
    }

    SweepReport report;
    std::vector<double> errors;
    for (const auto& run : measured) {
        const auto& sample = run.sample;
        sample.validate();
        if (sample.placement.socket_count() != 2) {
            throw InputError("run " + run.label + " does not cover two sockets");
        }
        SweepPoint point{run.label, sample.placement, {}, 0.0};
        double abs_error = 0.0;
        double measured_total = 0.0;
        for (auto c : channels) {
            ChannelComparison cmp;
            cmp.channel = c;
            cmp.measured = sample.channel(c);
            const auto matrix = combine_signature_matrix(signature.channel(c), sample.placement);
            cmp.predicted = predict_bank_loads(matrix, cpu_demand(cmp.measured, sample.placement));
            abs_error += absolute_error(cmp.predicted, cmp.measured);
            for (const auto& b : cmp.measured) measured_total += b.total();
            point.channels.push_back(std::move(cmp));
        }
        point.error_pct = measured_total > 0.0 ? abs_error / measured_total * 100.0 : 0.0;
        errors.push_back(point.error_pct);
        report.points.push_back(std::move(point));
    }
    report.median_error_pct = median(errors);
    report.mean_error_pct = mean(errors);
    report.cumulative = cumulative_frequency(errors);
    return report;
}

std::vector<CumulativeBin> cumulative_frequency(const std::vector<double>& errors,
                                                const std::vector<double>& thresholds) {
    std::vector<CumulativeBin> bins;
    for (double t : thresholds) {
        const auto within = std::count_if(errors.begin(), errors.end(), [&](double e) { return e <= t + 1e-9; });
        const double share = errors.empty() ? 0.0 : 100.0 * static_cast<double>(within) / errors.size();
        bins.push_back({t, share});
    }
    return bins;
}

}  // namespace numasig
