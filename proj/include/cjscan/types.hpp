#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cjscan/hash.hpp"

namespace cjscan {

/// Identity of a locking script: hash of the raw script bytes. Scripts are
/// only ever compared for equality, never executed.
struct ScriptId {
    Hash256 digest{};

    static ScriptId of(std::span<const std::uint8_t> raw_script) {
        return ScriptId{sha256(raw_script)};
    }

    auto operator<=>(const ScriptId&) const = default;
};

/// A transaction output: value in satoshis plus script identity.
struct Txo {
    std::uint64_t value = 0;  // zero is legal (Whirlpool Tx0 data output)
    ScriptId script{};

    auto operator<=>(const Txo&) const = default;
};

/// Reference to one output chain-wide: creating txid + output index.
struct Outpoint {
    Hash256 txid{};
    std::uint32_t vout = 0;

    auto operator<=>(const Outpoint&) const = default;
};

struct OutpointHash {
    std::size_t operator()(const Outpoint& op) const noexcept {
        // txid is already uniform; fold in vout.
        std::size_t h;
        std::memcpy(&h, op.txid.data(), sizeof(h));
        return h ^ (static_cast<std::size_t>(op.vout) * 0x9e3779b97f4a7c15ULL);
    }
};

/// A transaction with its inputs materialized as the Txos they spend.
/// This is the unit every detector consumes.
struct ResolvedTransaction {
    Hash256 txid{};
    std::uint32_t height = 0;
    std::vector<Txo> inputs;   // the spent outputs, in input order
    std::vector<Txo> outputs;
    bool is_coinbase = false;

    std::uint64_t input_value() const {
        std::uint64_t s = 0;
        for (const auto& t : inputs) s += t.value;
        return s;
    }

    std::uint64_t output_value() const {
        std::uint64_t s = 0;
        for (const auto& t : outputs) s += t.value;
        return s;
    }

    /// Network fee. Only meaningful for non-coinbase transactions.
    std::uint64_t fee() const { return input_value() - output_value(); }
};

constexpr std::uint64_t kSatsPerBtc = 100'000'000;

}  // namespace cjscan
