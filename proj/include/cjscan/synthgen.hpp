#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cjscan/config.hpp"
#include "cjscan/core.hpp"
#include "cjscan/hash.hpp"
#include "cjscan/types.hpp"

namespace cjscan {

struct InvalidSpec : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic generator state. splitmix64 keeps the byte stream identical
/// across standard libraries, unlike std distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [lo, hi], inclusive.
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
        return lo + next() % (hi - lo + 1);
    }

    bool chance(std::uint32_t percent) { return range(0, 99) < percent; }

private:
    std::uint64_t state_;
};

/// Fresh distinct scripts, derived from the seed through the script hash.
class ScriptFactory {
public:
    explicit ScriptFactory(std::uint64_t seed) : seed_(seed) {}

    ScriptId fresh() {
        std::array<std::uint8_t, 16> preimage{};
        for (int i = 0; i < 8; ++i) preimage[i] = static_cast<std::uint8_t>(seed_ >> (8 * i));
        for (int i = 0; i < 8; ++i) preimage[8 + i] = static_cast<std::uint8_t>(counter_ >> (8 * i));
        ++counter_;
        return ScriptId{sha256(preimage)};
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

enum class Protocol {
    JoinMarket,
    Wasabi1_0,
    Wasabi1_1,
    Wasabi2_0,
    WhirlpoolTx0,
    WhirlpoolMix,
};

/// Parameters of one synthetic round.
struct RoundSpec {
    Protocol protocol = Protocol::JoinMarket;
    std::uint64_t seed = 0;
    std::uint32_t participants = 3;           // n
    std::uint64_t denomination = 10'000'000;  // d, satoshis
    std::uint64_t coordinator_fee = 50'000;   // f
    std::uint64_t network_fee = 1'000;        // theta, per participant
    std::uint32_t max_inputs_per_participant = 3;

    // Wasabi 1.1: per-participant top mixing level; empty = generate.
    std::vector<std::uint32_t> levels;
    std::uint32_t max_level = 3;

    // Wasabi 2.0
    std::uint32_t target_inputs = 50;              // p
    std::uint64_t v_min = 5'000;
    std::vector<std::uint64_t> denominations;      // empty = default family

    // Whirlpool
    WhirlpoolPool pool{1'000'000, 50'000};
    std::uint32_t premix_outputs = 5;   // n0 for Tx0
    std::uint64_t premix_epsilon = 5'000;
    std::uint32_t premix_inputs = 2;    // mix inputs with v > d
    std::uint32_t whirlpool_a_max = 70;
    double eta1 = 0.5;
    double eta2 = 3.0;
    std::uint64_t epsilon_min = 100;
    std::uint64_t epsilon_max = 100'000;
};

namespace detail {

inline Hash256 synthetic_txid(const RoundSpec& spec, const char* tag) {
    std::vector<std::uint8_t> preimage;
    for (const char* p = tag; *p; ++p) preimage.push_back(static_cast<std::uint8_t>(*p));
    for (int i = 0; i < 8; ++i) preimage.push_back(static_cast<std::uint8_t>(spec.seed >> (8 * i)));
    preimage.push_back(static_cast<std::uint8_t>(spec.participants));
    return sha256(preimage);
}

/// A change value that cannot collide with any post-mix denomination or
/// with previously chosen change values.
inline std::uint64_t sample_change(Rng& rng, const std::set<std::uint64_t>& forbidden,
                                   std::set<std::uint64_t>& used, std::uint64_t lo,
                                   std::uint64_t hi) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::uint64_t v = rng.range(lo, hi);
        if (forbidden.contains(v) || used.contains(v)) continue;
        used.insert(v);
        return v;
    }
    throw InvalidSpec("cannot sample a non-colliding change value");
}

/// Split `total` into `parts` input values, each at least `floor`.
inline std::vector<std::uint64_t> split_value(Rng& rng, std::uint64_t total, std::uint32_t parts,
                                              std::uint64_t floor) {
    if (total < static_cast<std::uint64_t>(parts) * floor) {
        throw InvalidSpec("input value too small to split");
    }
    std::vector<std::uint64_t> out(parts, floor);
    std::uint64_t rest = total - static_cast<std::uint64_t>(parts) * floor;
    for (std::uint32_t i = 0; i + 1 < parts; ++i) {
        std::uint64_t take = rest == 0 ? 0 : rng.range(0, rest);
        out[i] += take;
        rest -= take;
    }
    out[parts - 1] += rest;
    return out;
}

inline void add_inputs(ResolvedTransaction& tx, ScriptFactory& scripts, Rng& rng,
                       std::uint64_t total, std::uint32_t count, std::uint64_t floor = 1) {
    for (std::uint64_t v : split_value(rng, total, count, floor)) {
        tx.inputs.push_back(Txo{v, scripts.fresh()});
    }
}

}  // namespace detail

inline ResolvedTransaction gen_joinmarket(const RoundSpec& spec) {
    if (spec.participants < 3) throw InvalidSpec("JoinMarket requires at least 3 participants");
    if (spec.denomination == 0) throw InvalidSpec("denomination must be positive");

    Rng rng(spec.seed);
    ScriptFactory scripts(spec.seed ^ 0x5c5c5c5c5c5c5c5cULL);
    ResolvedTransaction tx;
    tx.txid = detail::synthetic_txid(spec, "joinmarket");

    std::set<std::uint64_t> forbidden{spec.denomination};
    std::set<std::uint64_t> used_changes;
    for (std::uint32_t i = 0; i < spec.participants; ++i) {
        std::uint64_t change = 0;
        if (rng.chance(75)) {
            change = detail::sample_change(rng, forbidden, used_changes, 546,
                                           2 * spec.denomination);
        }
        std::uint32_t n_inputs = static_cast<std::uint32_t>(
            rng.range(1, spec.max_inputs_per_participant));
        detail::add_inputs(tx, scripts, rng, spec.denomination + change + spec.network_fee,
                           n_inputs);
        if (change > 0) tx.outputs.push_back(Txo{change, scripts.fresh()});
    }
    for (std::uint32_t i = 0; i < spec.participants; ++i) {
        tx.outputs.push_back(Txo{spec.denomination, scripts.fresh()});
    }
    return tx;
}

inline ResolvedTransaction gen_wasabi1(const RoundSpec& spec) {
    if (spec.participants < 2) throw InvalidSpec("Wasabi 1.0 requires at least 2 participants");
    if (spec.denomination == 0) throw InvalidSpec("denomination must be positive");
    if (spec.coordinator_fee == 0 || spec.coordinator_fee == spec.denomination) {
        throw InvalidSpec("coordinator fee must be positive and distinct from the denomination");
    }

    Rng rng(spec.seed);
    ScriptFactory scripts(spec.seed ^ 0xa3a3a3a3a3a3a3a3ULL);
    ResolvedTransaction tx;
    tx.txid = detail::synthetic_txid(spec, "wasabi1");

    std::set<std::uint64_t> forbidden{spec.denomination, spec.coordinator_fee, 0};
    std::set<std::uint64_t> used_changes;
    for (std::uint32_t i = 0; i < spec.participants; ++i) {
        // The participant defining the final denomination has no change.
        std::uint64_t change = 0;
        if (i > 0) {
            change = detail::sample_change(rng, forbidden, used_changes, 546,
                                           2 * spec.denomination);
        }
        std::uint64_t fee_share = i == 0 ? spec.coordinator_fee : 0;
        std::uint32_t n_inputs = static_cast<std::uint32_t>(
            rng.range(1, spec.max_inputs_per_participant));
        detail::add_inputs(tx, scripts, rng,
                           spec.denomination + change + spec.network_fee + fee_share, n_inputs);
        if (change > 0) tx.outputs.push_back(Txo{change, scripts.fresh()});
    }
    for (std::uint32_t i = 0; i < spec.participants; ++i) {
        tx.outputs.push_back(Txo{spec.denomination, scripts.fresh()});
    }
    tx.outputs.push_back(Txo{spec.coordinator_fee, scripts.fresh()});
    return tx;
}

inline ResolvedTransaction gen_wasabi11(const RoundSpec& spec) {
    if (spec.participants < 2) throw InvalidSpec("Wasabi 1.1 requires at least 2 participants");
    if (spec.denomination == 0) throw InvalidSpec("denomination must be positive");
    if (spec.coordinator_fee == 0) throw InvalidSpec("coordinator fee must be positive");

    Rng rng(spec.seed);

    std::vector<std::uint32_t> levels = spec.levels;
    if (levels.empty()) {
        levels.resize(spec.participants);
        for (auto& l : levels) l = static_cast<std::uint32_t>(rng.range(0, spec.max_level));
        // A level used by a single participant would break output ambiguity;
        // demote such participants until every used level has at least two.
        for (std::uint32_t l = spec.max_level; l >= 1; --l) {
            auto users = std::count_if(levels.begin(), levels.end(),
                                       [&](std::uint32_t j) { return j >= l; });
            if (users == 1) {
                for (auto& j : levels) {
                    if (j >= l) j = l - 1;
                }
            }
        }
    }
    if (levels.size() != spec.participants) {
        throw InvalidSpec("levels must list one top level per participant");
    }
    std::uint32_t top = *std::max_element(levels.begin(), levels.end());
    for (std::uint32_t l = 1; l <= top; ++l) {
        auto users = std::count_if(levels.begin(), levels.end(),
                                   [&](std::uint32_t j) { return j >= l; });
        if (users == 1) throw InvalidSpec("mixing level used by a single participant");
    }
    if (top > 40) throw InvalidSpec("mixing level out of range");

    ScriptFactory scripts(spec.seed ^ 0x1717171717171717ULL);
    ResolvedTransaction tx;
    tx.txid = detail::synthetic_txid(spec, "wasabi11");

    std::set<std::uint64_t> forbidden{spec.coordinator_fee, 0};
    for (std::uint32_t l = 0; l <= top; ++l) {
        if ((spec.denomination << l) == spec.coordinator_fee) {
            throw InvalidSpec("coordinator fee collides with a level denomination");
        }
        forbidden.insert(spec.denomination << l);
    }

    std::set<std::uint64_t> used_changes;
    for (std::uint32_t i = 0; i < spec.participants; ++i) {
        std::uint64_t mixed = 0;
        for (std::uint32_t l = 0; l <= levels[i]; ++l) {
            std::uint64_t level_denom = spec.denomination << l;
            tx.outputs.push_back(Txo{level_denom, scripts.fresh()});
            mixed += level_denom;
        }
        std::uint64_t change = 0;
        if (i > 0) {
            change = detail::sample_change(rng, forbidden, used_changes, 546,
                                           2 * spec.denomination);
        }
        std::uint64_t fee_share = i == 0 ? spec.coordinator_fee : 0;
        std::uint32_t n_inputs = static_cast<std::uint32_t>(
            rng.range(1, spec.max_inputs_per_participant));
        detail::add_inputs(tx, scripts, rng, mixed + change + spec.network_fee + fee_share,
                           n_inputs);
        if (change > 0) tx.outputs.push_back(Txo{change, scripts.fresh()});
    }
    tx.outputs.push_back(Txo{spec.coordinator_fee, scripts.fresh()});
    return tx;
}

inline ResolvedTransaction gen_wasabi2(const RoundSpec& spec) {
    if (spec.participants == 0) throw InvalidSpec("need at least one participant");
    const std::vector<std::uint64_t> denoms = spec.denominations.empty()
                                                  ? default_wasabi2_denominations(spec.v_min)
                                                  : spec.denominations;
    if (denoms.empty()) throw InvalidSpec("empty denomination set");
    const std::uint64_t smallest = denoms.front();

    Rng rng(spec.seed);
    ScriptFactory scripts(spec.seed ^ 0x2b2b2b2b2b2b2b2bULL);
    ResolvedTransaction tx;
    tx.txid = detail::synthetic_txid(spec, "wasabi2");

    constexpr std::uint64_t dust = 1'000;

    // Per-participant input counts; topped up round-robin so the round
    // reaches its target p whenever the spec permits it at all.
    if (static_cast<std::uint64_t>(spec.participants) * spec.max_inputs_per_participant <
        spec.target_inputs) {
        throw InvalidSpec("fewer inputs than the round's target p");
    }
    std::vector<std::uint32_t> input_counts(spec.participants);
    std::uint32_t total_inputs = 0;
    for (auto& c : input_counts) {
        c = static_cast<std::uint32_t>(rng.range(1, spec.max_inputs_per_participant));
        total_inputs += c;
    }
    for (std::uint32_t i = 0; total_inputs < spec.target_inputs; i = (i + 1) % spec.participants) {
        if (input_counts[i] < spec.max_inputs_per_participant) {
            ++input_counts[i];
            ++total_inputs;
        }
    }

    for (std::uint32_t i = 0; i < spec.participants; ++i) {
        std::uint32_t n_inputs = input_counts[i];

        // Funds are resampled until the greedy remainder is either zero or
        // clearly above dust, so value conservation stays exact.
        std::uint64_t funds = 0;
        std::uint64_t remainder = 0;
        std::vector<std::uint64_t> decomposition;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            funds = rng.range(std::max<std::uint64_t>(smallest * 2,
                                                      n_inputs * spec.v_min) +
                                  spec.network_fee,
                              smallest * 200 + spec.network_fee);
            std::uint64_t target = funds - spec.network_fee;
            decomposition.clear();
            std::uint64_t rest = target;
            for (auto it = denoms.rbegin(); it != denoms.rend(); ++it) {
                while (rest >= *it && decomposition.size() < 12) {
                    decomposition.push_back(*it);
                    rest -= *it;
                }
            }
            remainder = rest;
            if (!decomposition.empty() && (remainder == 0 || remainder > dust)) break;
            decomposition.clear();
        }
        if (decomposition.empty()) throw InvalidSpec("cannot decompose participant funds");

        detail::add_inputs(tx, scripts, rng, funds, n_inputs, spec.v_min);
        for (std::uint64_t d : decomposition) tx.outputs.push_back(Txo{d, scripts.fresh()});
        if (remainder > dust) tx.outputs.push_back(Txo{remainder, scripts.fresh()});
    }
    return tx;
}

inline ResolvedTransaction gen_whirlpool_tx0(const RoundSpec& spec) {
    if (spec.premix_outputs < 1 || spec.premix_outputs > spec.whirlpool_a_max) {
        throw InvalidSpec("premix output count out of range");
    }
    if (spec.premix_epsilon < spec.epsilon_min || spec.premix_epsilon > spec.epsilon_max) {
        throw InvalidSpec("premix epsilon out of range");
    }
    const std::uint64_t d = spec.pool.denomination;
    const std::uint64_t f = spec.pool.coordinator_fee;
    const std::uint64_t premix_value = d + spec.premix_epsilon;
    const double fee_lo = spec.eta1 * static_cast<double>(f);
    const double fee_hi = spec.eta2 * static_cast<double>(f);
    if (static_cast<double>(premix_value) >= fee_lo &&
        static_cast<double>(premix_value) <= fee_hi) {
        throw InvalidSpec("premix value falls inside the coordinator fee band");
    }
    if (fee_lo <= 0.0) {
        throw InvalidSpec("fee band must exclude the zero-value data output");
    }

    Rng rng(spec.seed);
    ScriptFactory scripts(spec.seed ^ 0x7e7e7e7e7e7e7e7eULL);
    ResolvedTransaction tx;
    tx.txid = detail::synthetic_txid(spec, "whirlpool_tx0");

    for (std::uint32_t i = 0; i < spec.premix_outputs; ++i) {
        tx.outputs.push_back(Txo{premix_value, scripts.fresh()});
    }
    // Coupon-discounted coordinator fee, kept inside [eta1 f, eta2 f].
    std::uint64_t fee_paid = rng.chance(30)
                                 ? rng.range(static_cast<std::uint64_t>(fee_lo) + 1, f)
                                 : f;
    tx.outputs.push_back(Txo{fee_paid, scripts.fresh()});
    tx.outputs.push_back(Txo{0, scripts.fresh()});  // data-carrier output

    std::uint64_t change = 0;
    if (rng.chance(80)) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            std::uint64_t v = rng.range(546, 2 * d);
            bool in_premix_band = false;
            // keep the change out of every pool's candidate band
            for (std::uint64_t pd : {100'000ULL, 1'000'000ULL, 5'000'000ULL, 50'000'000ULL}) {
                if (v >= pd + spec.epsilon_min && v <= pd + spec.epsilon_max) in_premix_band = true;
            }
            if (v >= d + spec.epsilon_min && v <= d + spec.epsilon_max) in_premix_band = true;
            bool in_fee_band = static_cast<double>(v) >= fee_lo &&
                               static_cast<double>(v) <= fee_hi;
            if (!in_premix_band && !in_fee_band && v != premix_value) {
                change = v;
                break;
            }
        }
    }
    if (change > 0) tx.outputs.push_back(Txo{change, scripts.fresh()});

    std::uint64_t total_out = tx.output_value();
    std::uint32_t n_inputs = static_cast<std::uint32_t>(rng.range(1, 4));
    detail::add_inputs(tx, scripts, rng, total_out + spec.network_fee, n_inputs);
    return tx;
}

inline ResolvedTransaction gen_whirlpool_mix(const RoundSpec& spec) {
    if (spec.premix_inputs < 1 || spec.premix_inputs > 4) {
        throw InvalidSpec("mix requires between 1 and 4 premix inputs");
    }
    if (spec.premix_epsilon == 0 || spec.premix_epsilon > spec.epsilon_max) {
        throw InvalidSpec("premix epsilon out of range");
    }

    ScriptFactory scripts(spec.seed ^ 0xd4d4d4d4d4d4d4d4ULL);
    ResolvedTransaction tx;
    tx.txid = detail::synthetic_txid(spec, "whirlpool_mix");

    const std::uint64_t d = spec.pool.denomination;
    for (std::uint32_t i = 0; i < 5; ++i) {
        std::uint64_t v = i < spec.premix_inputs ? d + spec.premix_epsilon : d;
        tx.inputs.push_back(Txo{v, scripts.fresh()});
    }
    for (std::uint32_t i = 0; i < 5; ++i) {
        tx.outputs.push_back(Txo{d, scripts.fresh()});
    }
    return tx;
}

/// Payment-shaped negative samples: ordinary spends, sweeps, consolidations,
/// and batch payouts with distinct values.
inline ResolvedTransaction gen_negative(std::uint64_t seed) {
    Rng rng(seed);
    ScriptFactory scripts(seed ^ 0x6969696969696969ULL);
    ResolvedTransaction tx;
    {
        RoundSpec key;
        key.seed = seed;
        tx.txid = detail::synthetic_txid(key, "negative");
    }

    // Decade-weighted value model: everyday micro payments dominate, large
    // transfers are rare. Log-uniform within the chosen decade.
    auto sample_value = [&]() {
        static constexpr std::uint32_t weights[] = {22, 32, 36, 4, 2, 2, 2};  // 1e3 .. 1e9
        std::uint32_t pick = static_cast<std::uint32_t>(rng.range(0, 99));
        std::uint64_t lo = 1'000;
        for (std::uint32_t w : weights) {
            if (pick < w) break;
            pick -= w;
            lo *= 10;
        }
        double u = static_cast<double>(rng.range(0, 999'999)) / 1'000'000.0;
        auto v = static_cast<std::uint64_t>(static_cast<double>(lo) * std::pow(10.0, u));
        return std::max<std::uint64_t>(v, 546);
    };

    std::uint32_t shape = static_cast<std::uint32_t>(rng.range(0, 99));
    std::uint32_t n_in, n_out;
    if (shape < 60) {  // payment with change
        n_in = static_cast<std::uint32_t>(rng.range(1, 3));
        n_out = 2;
    } else if (shape < 75) {  // sweep
        n_in = 1;
        n_out = 1;
    } else if (shape < 90) {  // consolidation
        n_in = static_cast<std::uint32_t>(rng.range(5, 20));
        n_out = 1;
    } else {  // batch payout
        n_in = static_cast<std::uint32_t>(rng.range(1, 2));
        n_out = static_cast<std::uint32_t>(rng.range(10, 60));
    }

    std::set<std::uint64_t> used;
    std::uint64_t total_out = 0;
    for (std::uint32_t i = 0; i < n_out; ++i) {
        std::uint64_t v = sample_value();
        while (used.contains(v)) v = sample_value();
        used.insert(v);
        tx.outputs.push_back(Txo{v, scripts.fresh()});
        total_out += v;
    }
    std::uint64_t fee = rng.range(200, 50'000);
    bool reuse_input_script = rng.chance(30);
    ScriptId shared = scripts.fresh();
    for (std::uint64_t v : detail::split_value(rng, total_out + fee, n_in, 1)) {
        tx.inputs.push_back(Txo{v, reuse_input_script ? shared : scripts.fresh()});
    }
    return tx;
}

inline ResolvedTransaction generate(const RoundSpec& spec) {
    switch (spec.protocol) {
        case Protocol::JoinMarket: return gen_joinmarket(spec);
        case Protocol::Wasabi1_0: return gen_wasabi1(spec);
        case Protocol::Wasabi1_1: return gen_wasabi11(spec);
        case Protocol::Wasabi2_0: return gen_wasabi2(spec);
        case Protocol::WhirlpoolTx0: return gen_whirlpool_tx0(spec);
        case Protocol::WhirlpoolMix: return gen_whirlpool_mix(spec);
    }
    throw InvalidSpec("unknown protocol");
}

}  // namespace cjscan
