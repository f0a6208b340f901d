#include "numasig/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "numasig/errors.hpp"

namespace numasig {

namespace {

// Below this the shared (per-thread + interleaved) share is treated as empty.
constexpr double kEmptyShare = 1e-12;
// Banks whose residual is this small relative to the channel carry no shape information.
constexpr double kNegligibleTraffic = 1e-12;

double total_of(std::span<const BankTraffic> flows) {
    double sum = 0.0;
    for (const auto& b : flows) sum += b.total();
    return sum;
}

struct Residual {
    std::vector<BankTraffic> banks;
    bool clamped = false;
};

// Takes the static share of a symmetric run off the static bank. Every CPU
// carries the same load in a symmetric run, so 1/s of the static traffic is
// local to the static bank and the rest arrives remotely.
Residual remove_symmetric_static(std::span<const BankTraffic> flows, const StaticEstimate& est) {
    Residual out{{flows.begin(), flows.end()}, false};
    const double s = static_cast<double>(flows.size());
    const double static_traffic = est.fraction * total_of(flows);
    auto& bank = out.banks[est.socket];
    bank.local -= static_traffic / s;
    bank.remote -= static_traffic * (s - 1.0) / s;
    for (auto& b : out.banks) {
        if (b.local < 0.0) {
            b.local = 0.0;
            out.clamped = true;
        }
        if (b.remote < 0.0) {
            b.remote = 0.0;
            out.clamped = true;
        }
    }
    return out;
}

void check_static(const StaticEstimate& est, std::size_t sockets) {
    if (est.socket >= sockets) throw DomainError("static socket outside the sample's banks");
    if (!std::isfinite(est.fraction) || est.fraction < 0.0) throw DomainError("static fraction must be >= 0");
}

}  // namespace

StaticEstimate compute_static(std::span<const BankTraffic> symmetric) {
    StaticEstimate est;
    const double total = total_of(symmetric);
    if (symmetric.empty() || !(total > 0.0)) {
        est.low_traffic = true;
        return est;
    }
    for (std::size_t bank = 1; bank < symmetric.size(); ++bank) {
        if (symmetric[bank].total() > symmetric[est.socket].total()) est.socket = bank;
    }
    if (symmetric.size() < 2) return est;
    const double busiest = symmetric[est.socket].total();
    const double others_mean = (total - busiest) / static_cast<double>(symmetric.size() - 1);
    est.fraction = std::clamp((busiest - others_mean) / total, 0.0, 1.0);
    return est;
}

LocalEstimate compute_local(std::span<const BankTraffic> symmetric, const ThreadPlacement& placement,
                            const StaticEstimate& static_estimate) {
    const auto s = symmetric.size();
    if (s != placement.socket_count()) throw InputError("flows and placement disagree on the socket count");
    if (s < 2) throw InputError("local fraction needs at least two sockets");
    check_static(static_estimate, s);
    if (static_estimate.fraction >= 1.0) {
        throw ExtractionError("static fraction of 1 leaves no traffic to classify as local");
    }

    LocalEstimate est;
    const auto residual = remove_symmetric_static(symmetric, static_estimate);
    est.clamped = residual.clamped;

    double remote = 0.0;
    double all = 0.0;
    for (const auto& b : residual.banks) {
        est.bank_remote_ratios.push_back(b.total() > 0.0 ? b.remote / b.total() : 0.0);
        remote += b.remote;
        all += b.total();
    }
    if (!(all > 0.0)) {
        est.low_traffic = true;
        return est;
    }
    const double sockets = static_cast<double>(s);
    est.remote_ratio = remote / all;
    const double raw = (1.0 - static_estimate.fraction) * (1.0 - est.remote_ratio * sockets / (sockets - 1.0));
    est.local_fraction = std::clamp(raw, 0.0, 1.0);
    if (est.local_fraction != raw) est.clamped = true;
    return est;
}

PerThreadEstimate compute_per_thread(std::span<const BankTraffic> asymmetric, const ThreadPlacement& placement,
                                     const StaticEstimate& static_estimate, double local_fraction) {
    if (asymmetric.size() != 2 || placement.socket_count() != 2) {
        throw InputError("per-thread extraction is only defined for two sockets");
    }
    check_static(static_estimate, 2);
    if (placement.used_socket_count() != 2 || placement.is_symmetric()) {
        throw InputError("per-thread extraction needs threads on both sockets in unequal numbers, got " +
                         placement.to_string());
    }

    PerThreadEstimate est;
    const double shared = 1.0 - static_estimate.fraction - local_fraction;

    // Everything a CPU moved: its bank's local traffic plus what the other bank saw as remote.
    std::array<BankTraffic, 2> banks{asymmetric[0], asymmetric[1]};
    const std::array<double, 2> cpu_total{banks[0].local + banks[1].remote, banks[1].local + banks[0].remote};

    const auto st = static_estimate.socket;
    banks[st].local -= static_estimate.fraction * cpu_total[st];
    banks[st].remote -= static_estimate.fraction * cpu_total[1 - st];
    for (std::size_t i = 0; i < 2; ++i) banks[i].local -= local_fraction * cpu_total[i];
    for (std::size_t i = 0; i < 2; ++i) {
        if (banks[i].local < 0.0) {
            banks[i].local = 0.0;
            est.notes.push_back("bank " + std::to_string(i + 1) + " local traffic went negative after removal");
        }
        if (banks[i].remote < 0.0) {
            banks[i].remote = 0.0;
            est.notes.push_back("bank " + std::to_string(i + 1) + " remote traffic went negative after removal");
        }
    }

    if (shared <= kEmptyShare) return est;

    const double n = static_cast<double>(placement.total_threads());
    double weighted = 0.0;
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        const double own = banks[i].local;
        const double away = banks[1 - i].remote;
        const double weight = own + away;
        if (!(weight > 0.0)) {
            est.cpu_local_shares.push_back(0.0);
            est.cpu_blends.push_back(0.0);
            continue;
        }
        const double share = own / weight;
        const double per_thread_share = static_cast<double>(placement.threads_on(i)) / n;
        const double blend = (share - 0.5) / (per_thread_share - 0.5);
        est.cpu_local_shares.push_back(share);
        est.cpu_blends.push_back(blend);
        weighted += weight * blend;
        weight_sum += weight;
    }
    if (!(weight_sum > 0.0)) {
        est.low_traffic = true;
        est.notes.push_back("no shared traffic left after removing static and local traffic");
        return est;
    }

    const double raw = weighted / weight_sum;
    est.blend = std::clamp(raw, 0.0, 1.0);
    if (std::abs(est.blend - raw) > kFractionTolerance) {
        est.clamped = true;
        est.notes.push_back("per-thread blend " + std::to_string(raw) + " clamped to [0,1]");
    }
    est.per_thread_fraction = est.blend * std::max(shared, 0.0);
    return est;
}

FitReport assess_fit(std::span<const BankTraffic> symmetric, const StaticEstimate& static_estimate,
                     double fit_threshold) {
    FitReport report;
    const double total = total_of(symmetric);
    if (symmetric.empty() || !(total > 0.0)) {
        report.low_traffic = true;
        report.fit_ok = false;
        report.notes.push_back("no traffic recorded");
        return report;
    }
    check_static(static_estimate, symmetric.size());

    const auto residual = remove_symmetric_static(symmetric, static_estimate);
    if (residual.clamped) report.notes.push_back("traffic went negative while removing the static share");

    double lo_ratio = 1.0, hi_ratio = 0.0;
    double lo_total = 0.0, hi_total = 0.0, left = 0.0;
    bool any = false;
    for (const auto& b : residual.banks) {
        const double t = b.total();
        left += t;
        if (!any) {
            lo_total = hi_total = t;
        } else {
            lo_total = std::min(lo_total, t);
            hi_total = std::max(hi_total, t);
        }
        any = true;
    }
    std::size_t informative = 0;
    for (const auto& b : residual.banks) {
        if (b.total() <= kNegligibleTraffic * total) continue;
        const double r = b.remote / b.total();
        lo_ratio = std::min(lo_ratio, r);
        hi_ratio = std::max(hi_ratio, r);
        ++informative;
    }
    if (informative >= 2) report.remote_ratio_spread = hi_ratio - lo_ratio;
    if (left > kNegligibleTraffic * total) report.bank_imbalance = (hi_total - lo_total) / left;

    report.residual = report.remote_ratio_spread + report.bank_imbalance;
    report.fit_ok = report.residual <= fit_threshold;
    return report;
}

bool ExtractionReport::fit_ok() const {
    return std::all_of(channels.begin(), channels.end(), [](const auto& c) { return c.fit.fit_ok; });
}

namespace {

void check_profiling_pair(const CounterSample& symmetric, const CounterSample& asymmetric) {
    symmetric.validate();
    asymmetric.validate();
    const auto& sym = symmetric.placement;
    const auto& asym = asymmetric.placement;
    if (sym.socket_count() != asym.socket_count()) {
        throw InputError("runs cover different socket counts (" + std::to_string(sym.socket_count()) + " vs " +
                         std::to_string(asym.socket_count()) + ")");
    }
    if (sym.socket_count() != 2) {
        throw InputError("signature extraction supports two-socket machines only; remote counters cannot be "
                         "attributed to a specific remote socket on " +
                         std::to_string(sym.socket_count()) + " sockets");
    }
    if (sym.total_threads() != asym.total_threads()) {
        throw InputError("runs use different thread counts (" + std::to_string(sym.total_threads()) + " vs " +
                         std::to_string(asym.total_threads()) + ")");
    }
    if (sym.used_socket_count() != 2 || !sym.is_symmetric()) {
        throw InputError("symmetric run must place equal thread counts on both sockets, got " + sym.to_string());
    }
    if (asym.used_socket_count() != 2 || asym.is_symmetric()) {
        throw InputError("asymmetric run must place unequal, non-zero thread counts on both sockets, got " +
                         asym.to_string());
    }
}

ChannelExtraction extract_channel(std::span<const BankTraffic> sym, std::span<const BankTraffic> asym,
                                  const ThreadPlacement& sym_placement, const ThreadPlacement& asym_placement,
                                  const ExtractOptions& options) {
    ChannelExtraction out;
    out.static_estimate = compute_static(sym);
    const auto& st = out.static_estimate;

    ChannelSignature raw{st.socket, st.fraction, 0.0, 0.0};
    if (!st.low_traffic && st.fraction < 1.0 - kEmptyShare) {
        out.local = compute_local(sym, sym_placement, st);
        raw.local_fraction = out.local.local_fraction;
        out.per_thread = compute_per_thread(asym, asym_placement, st, raw.local_fraction);
        raw.per_thread_fraction = out.per_thread.per_thread_fraction;
    }
    const auto clean = sanitize(raw);
    out.signature = clean.signature;
    out.sanitized = clean.adjusted;

    if (st.low_traffic) {
        out.fit.low_traffic = true;
        out.fit.fit_ok = false;
        out.fit.notes.push_back("no traffic recorded");
    } else {
        out.fit = assess_fit(sym, st, options.fit_threshold);
    }
    out.fit.clamped_per_thread = out.per_thread.clamped;
    if (out.local.clamped) out.fit.notes.push_back("local fraction estimate clamped");
    for (const auto& note : out.per_thread.notes) out.fit.notes.push_back(note);
    if (out.per_thread.low_traffic) out.fit.low_traffic = true;
    if (out.sanitized) out.fit.notes.push_back("fractions rescaled to sum to at most 1");
    out.fit.fit_ok = out.fit.residual <= options.fit_threshold && !out.fit.low_traffic;
    return out;
}

}  // namespace

ExtractionReport extract_detailed(const CounterSample& symmetric, const CounterSample& asymmetric,
                                  const ExtractOptions& options) {
    check_profiling_pair(symmetric, asymmetric);
    const auto sym = normalize_sample(symmetric);
    const auto asym = normalize_sample(asymmetric);

    ExtractionReport report;
    report.signature.socket_count = 2;
    for (auto c : kAllChannels) {
        const auto sym_flows = sym.channel(c);
        const auto asym_flows = asym.channel(c);
        report.channels[static_cast<std::size_t>(c)] =
            extract_channel(sym_flows, asym_flows, symmetric.placement, asymmetric.placement, options);
        report.signature.channel(c) = report.channel(c).signature;
    }

    const double reads = total_of(sym.channel(Channel::Reads));
    const double writes = total_of(sym.channel(Channel::Writes));
    const double dominant = std::max(reads, writes);
    for (auto c : kAllChannels) {
        auto& ch = report.channels[static_cast<std::size_t>(c)];
        const double mine = total_of(sym.channel(c));
        const bool low = !(mine > 0.0) || mine < options.low_traffic_ratio * dominant;
        report.signature.set_low_traffic(c, low);
        if (low && !ch.fit.low_traffic) {
            ch.fit.low_traffic = true;
            ch.fit.fit_ok = false;
            ch.fit.notes.push_back("channel carries little traffic; signature is unreliable");
        }
    }
    return report;
}

BandwidthSignature extract_signature(const CounterSample& symmetric, const CounterSample& asymmetric,
                                     const ExtractOptions& options) {
    return extract_detailed(symmetric, asymmetric, options).signature;
}

}  // namespace numasig
