#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cjscan/config.hpp"
#include "cjscan/core.hpp"
#include "cjscan/types.hpp"

namespace cjscan {

struct EmptyCandidates : std::runtime_error {
    EmptyCandidates() : std::runtime_error("empty denomination candidate set") {}
};

enum class Label : std::uint8_t {
    JoinMarket = 0,
    Wasabi1_0,
    Wasabi1_1,
    Wasabi2_0,
    WhirlpoolTx0,
    WhirlpoolMix,
};
constexpr std::size_t kLabelCount = 6;

inline const char* label_name(Label l) {
    switch (l) {
        case Label::JoinMarket: return "JoinMarket";
        case Label::Wasabi1_0: return "Wasabi1_0";
        case Label::Wasabi1_1: return "Wasabi1_1";
        case Label::Wasabi2_0: return "Wasabi2_0";
        case Label::WhirlpoolTx0: return "WhirlpoolTx0";
        case Label::WhirlpoolMix: return "WhirlpoolMix";
    }
    return "?";
}

struct LabelSet {
    std::uint8_t bits = 0;

    bool contains(Label l) const { return bits & (1u << static_cast<unsigned>(l)); }
    void add(Label l) { bits |= (1u << static_cast<unsigned>(l)); }
    bool empty() const { return bits == 0; }
    std::size_t count() const { return static_cast<std::size_t>(std::popcount(bits)); }

    auto operator<=>(const LabelSet&) const = default;
};

struct PoolEstimate {
    WhirlpoolPool pool;                // (d hat, f hat)
    std::uint64_t premix_value = 0;    // d tilde, the estimated pre-mix denomination
    std::uint64_t epsilon = 0;         // epsilon tilde = d tilde - d hat
};

struct Classification {
    LabelSet labels;
    std::optional<std::uint64_t> estimated_n;
    std::optional<std::uint64_t> estimated_d;
    std::optional<PoolEstimate> estimated_pool;
};

/// Anonymity-set estimate: the maximum multiplicity among output values.
inline std::uint64_t estimate_n(const ResolvedTransaction& tx) {
    std::uint64_t best = 0;
    for (const auto& [value, count] : output_value_histogram(tx)) {
        best = std::max<std::uint64_t>(best, count);
    }
    return best;
}

/// Output values occurring exactly n_hat times: the denomination candidates.
inline std::vector<std::uint64_t> denomination_candidates(const ResolvedTransaction& tx,
                                                          std::uint64_t n_hat) {
    std::vector<std::uint64_t> out;
    for (const auto& [value, count] : output_value_histogram(tx)) {
        if (count == n_hat) out.push_back(value);
    }
    return out;
}

/// Candidate closest to 0.1 BTC; ties break toward the smaller value.
inline std::uint64_t estimate_base_denom(const std::vector<std::uint64_t>& candidates) {
    if (candidates.empty()) throw EmptyCandidates();
    constexpr std::uint64_t target = 10'000'000;
    auto dist = [](std::uint64_t v) { return v > target ? v - target : target - v; };
    std::uint64_t best = candidates.front();
    for (std::uint64_t v : candidates) {
        if (dist(v) < dist(best) || (dist(v) == dist(best) && v < best)) best = v;
    }
    return best;
}

inline std::uint64_t estimate_base_denom(const ResolvedTransaction& tx, std::uint64_t n_hat) {
    return estimate_base_denom(denomination_candidates(tx, n_hat));
}

struct JoinMarketResult {
    bool match = false;
    std::uint64_t n_hat = 0;
    std::vector<std::uint64_t> denomination_candidates;
};

/// JoinMarket: at most one change per post-mix output, at least three
/// participants backed by at least as many input scripts, and all output
/// scripts distinct.
inline JoinMarketResult detect_joinmarket(const ResolvedTransaction& tx,
                                          const DetectorConfig& /*cfg*/) {
    JoinMarketResult res;
    if (tx.is_coinbase || tx.outputs.empty()) return res;
    res.n_hat = estimate_n(tx);
    res.denomination_candidates = denomination_candidates(tx, res.n_hat);

    const std::uint64_t out_count = tx.outputs.size();
    const std::uint64_t in_scripts = distinct_input_scripts(tx);
    res.match = 2 * res.n_hat >= out_count                      // bound on change outputs
                && res.n_hat >= 3 && res.n_hat <= in_scripts    // participant bounds
                && distinct_output_scripts(tx) == out_count;    // fresh output scripts
    return res;
}

struct WasabiResult {
    bool match = false;
    std::uint64_t n_hat = 0;
    std::uint64_t d_hat = 0;
};

namespace detail {

// Shared Wasabi 1.x conditions: base denomination near 0.1 BTC and the
// per-participant input bound.
inline bool wasabi1_common(const ResolvedTransaction& tx, const DetectorConfig& cfg,
                           std::uint64_t n_hat, std::uint64_t d_hat) {
    constexpr std::uint64_t target = 10'000'000;
    const std::uint64_t dist = d_hat > target ? d_hat - target : target - d_hat;
    if (dist > cfg.wasabi_epsilon) return false;

    const std::uint64_t in_count = tx.inputs.size();
    const std::uint64_t in_scripts = distinct_input_scripts(tx);
    if (!(n_hat <= in_scripts && in_scripts <= in_count &&
          in_count <= static_cast<std::uint64_t>(cfg.wasabi1_a_max) * n_hat)) {
        return false;
    }
    return distinct_output_scripts(tx) == tx.outputs.size();
}

}  // namespace detail

/// Wasabi 1.0: single denomination near 0.1 BTC, bounded inputs per
/// participant, at most one change per participant plus a coordinator fee.
inline WasabiResult detect_wasabi1(const ResolvedTransaction& tx, const DetectorConfig& cfg) {
    WasabiResult res;
    if (tx.is_coinbase || tx.outputs.empty()) return res;
    res.n_hat = estimate_n(tx);
    res.d_hat = estimate_base_denom(tx, res.n_hat);

    res.match = detail::wasabi1_common(tx, cfg, res.n_hat, res.d_hat) &&
                2 * res.n_hat >= static_cast<std::uint64_t>(tx.outputs.size()) - 1;
    return res;
}

/// Wasabi 1.1: mixing levels at denominations 2^i * d. Non-level outputs are
/// limited to at most one change per participant plus the coordinator fee.
inline WasabiResult detect_wasabi11(const ResolvedTransaction& tx, const DetectorConfig& cfg) {
    WasabiResult res;
    if (tx.is_coinbase || tx.outputs.empty()) return res;
    res.n_hat = estimate_n(tx);
    res.d_hat = estimate_base_denom(tx, res.n_hat);

    if (!detail::wasabi1_common(tx, cfg, res.n_hat, res.d_hat)) return res;

    constexpr std::uint64_t target = 10'000'000;
    std::uint64_t in_band = 0;
    for (std::uint32_t level = 0; level <= cfg.wasabi11_max_level; ++level) {
        const std::uint64_t lo = (target - cfg.wasabi_epsilon) << level;
        const std::uint64_t hi = (target + cfg.wasabi_epsilon) << level;
        if (lo > kMaxMoney) break;  // higher levels cannot match any output
        for (const auto& out : tx.outputs) {
            if (out.value >= lo && out.value <= hi) ++in_band;
        }
    }
    // in_band bounds the post-mix outputs; the rest must fit n changes + fee.
    const std::uint64_t out_count = tx.outputs.size();
    res.match = in_band + res.n_hat + 1 >= out_count;
    return res;
}

inline const std::vector<std::uint64_t>& standard_denominations(const DetectorConfig& cfg) {
    return cfg.wasabi2_denoms;
}

/// Wasabi 2.0: standard denominations, a target input count, and a minimum
/// input value.
inline bool detect_wasabi2(const ResolvedTransaction& tx, const DetectorConfig& cfg) {
    if (tx.is_coinbase || tx.inputs.empty() || tx.outputs.empty()) return false;

    const auto& denoms = cfg.wasabi2_denoms;
    std::uint64_t standard_count = 0;
    for (const auto& out : tx.outputs) {
        if (std::binary_search(denoms.begin(), denoms.end(), out.value)) ++standard_count;
    }

    const std::uint64_t out_count = tx.outputs.size();
    const std::uint64_t in_count = tx.inputs.size();
    if (2 * standard_count + 1 < out_count) return false;        // at most n changes + fee
    if (in_count < cfg.wasabi2_target_p) return false;           // target number of inputs
    if (standard_count * cfg.wasabi2_a_max < in_count) return false;
    std::uint64_t min_in = tx.inputs.front().value;
    for (const auto& in : tx.inputs) min_in = std::min(min_in, in.value);
    if (min_in < cfg.wasabi2_v_min) return false;
    return distinct_output_scripts(tx) == out_count;
}

/// Pick the pre-mix denomination among pool-compatible output values
/// (most occurrences, ties to the highest value), then the nearest pool
/// at or below it.
inline std::optional<PoolEstimate> estimate_pool(const ResolvedTransaction& tx,
                                                 const DetectorConfig& cfg) {
    auto hist = output_value_histogram(tx);

    std::uint64_t best_value = 0;
    std::size_t best_count = 0;
    bool found = false;
    for (const auto& [value, count] : hist) {
        bool compatible = false;
        for (const auto& pool : cfg.whirlpool_pools) {
            if (value >= pool.denomination + cfg.epsilon_min &&
                value <= pool.denomination + cfg.epsilon_max) {
                compatible = true;
                break;
            }
        }
        if (!compatible) continue;
        if (!found || count > best_count || (count == best_count && value > best_value)) {
            best_value = value;
            best_count = count;
            found = true;
        }
    }
    if (!found) return std::nullopt;

    // argmin |d - d tilde| over pools with d <= d tilde.
    std::optional<WhirlpoolPool> best_pool;
    for (const auto& pool : cfg.whirlpool_pools) {
        if (pool.denomination > best_value) continue;
        if (!best_pool || best_value - pool.denomination <
                              best_value - best_pool->denomination) {
            best_pool = pool;
        }
    }
    if (!best_pool) return std::nullopt;
    return PoolEstimate{*best_pool, best_value, best_value - best_pool->denomination};
}

struct WhirlpoolTx0Result {
    bool match = false;
    std::optional<PoolEstimate> pool;
};

/// Whirlpool Tx0: pre-mix outputs at d + epsilon plus a coordinator fee
/// output, a zero-value data output, and at most one change.
inline WhirlpoolTx0Result detect_whirlpool_tx0(const ResolvedTransaction& tx,
                                               const DetectorConfig& cfg) {
    WhirlpoolTx0Result res;
    if (tx.is_coinbase || tx.outputs.empty()) return res;
    res.pool = estimate_pool(tx, cfg);
    if (!res.pool) return res;
    if (res.pool->epsilon < cfg.epsilon_min || res.pool->epsilon > cfg.epsilon_max) return res;

    const std::uint64_t premix_value = res.pool->premix_value;
    const std::uint64_t fee = res.pool->pool.coordinator_fee;
    std::uint64_t premix_count = 0;
    std::uint64_t zero_count = 0;
    std::uint64_t fee_band_count = 0;
    for (const auto& out : tx.outputs) {
        if (out.value == premix_value) ++premix_count;
        if (out.value == 0) ++zero_count;
        if (static_cast<double>(out.value) >= cfg.eta1 * static_cast<double>(fee) &&
            static_cast<double>(out.value) <= cfg.eta2 * static_cast<double>(fee)) {
            ++fee_band_count;
        }
    }

    const std::uint64_t out_count = tx.outputs.size();
    res.match = premix_count + 3 >= out_count && premix_count >= 1 && zero_count == 1 &&
                fee_band_count == 1 && premix_count <= cfg.whirlpool_a_max;
    return res;
}

struct WhirlpoolMixResult {
    bool match = false;
    std::optional<WhirlpoolPool> pool;
};

/// Whirlpool mix: exactly five participants, five equal outputs at a pool
/// denomination, and at least one pre-mix input funding the network fee.
inline WhirlpoolMixResult detect_whirlpool_mix(const ResolvedTransaction& tx,
                                               const DetectorConfig& cfg) {
    WhirlpoolMixResult res;
    if (tx.is_coinbase) return res;
    if (tx.inputs.size() != 5 || tx.outputs.size() != 5) return res;
    if (distinct_input_scripts(tx) != 5 || distinct_output_scripts(tx) != 5) return res;

    for (const auto& pool : cfg.whirlpool_pools) {
        const std::uint64_t d = pool.denomination;
        bool outputs_ok = std::all_of(tx.outputs.begin(), tx.outputs.end(),
                                      [&](const Txo& t) { return t.value == d; });
        if (!outputs_ok) continue;
        bool inputs_ok = std::all_of(tx.inputs.begin(), tx.inputs.end(), [&](const Txo& t) {
            return t.value >= d && t.value <= d + cfg.epsilon_max;
        });
        if (!inputs_ok) continue;
        std::uint64_t premix_inputs =
            std::count_if(tx.inputs.begin(), tx.inputs.end(),
                          [&](const Txo& t) { return t.value > d; });
        if (premix_inputs >= 1 && premix_inputs <= 4) {
            res.match = true;
            res.pool = pool;
            return res;
        }
    }
    return res;
}

/// Run all six predicates. No precedence is applied here; that is a
/// reporting concern.
inline Classification classify(const ResolvedTransaction& tx, const DetectorConfig& cfg) {
    Classification c;
    if (tx.is_coinbase) return c;

    auto jm = detect_joinmarket(tx, cfg);
    auto w1 = detect_wasabi1(tx, cfg);
    auto w11 = detect_wasabi11(tx, cfg);
    bool w2 = detect_wasabi2(tx, cfg);
    auto tx0 = detect_whirlpool_tx0(tx, cfg);
    auto mix = detect_whirlpool_mix(tx, cfg);

    if (jm.match) c.labels.add(Label::JoinMarket);
    if (w1.match) c.labels.add(Label::Wasabi1_0);
    if (w11.match) c.labels.add(Label::Wasabi1_1);
    if (w2) c.labels.add(Label::Wasabi2_0);
    if (tx0.match) c.labels.add(Label::WhirlpoolTx0);
    if (mix.match) c.labels.add(Label::WhirlpoolMix);

    if (jm.match || w1.match || w11.match) c.estimated_n = jm.n_hat ? jm.n_hat : w1.n_hat;
    if (w1.match || w11.match) c.estimated_d = w11.match ? w11.d_hat : w1.d_hat;
    if (tx0.match) {
        c.estimated_pool = tx0.pool;
    } else if (mix.match) {
        c.estimated_pool = PoolEstimate{*mix.pool, mix.pool->denomination, 0};
    }
    return c;
}

}  // namespace cjscan
