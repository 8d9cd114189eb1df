#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "cjscan/hash.hpp"
#include "cjscan/serialize.hpp"
#include "cjscan/types.hpp"

namespace cjscan {

struct RawTxInput {
    Outpoint previous;
    std::vector<std::uint8_t> script;  // unlocking script, opaque
    std::uint32_t sequence = 0xffffffff;
    std::vector<std::vector<std::uint8_t>> witness;
};

struct RawTxOutput {
    std::uint64_t value = 0;
    std::vector<std::uint8_t> script;  // locking script, opaque
};

/// A transaction as parsed from the wire, raw scripts retained.
struct RawTransaction {
    std::int32_t version = 1;
    bool has_witness = false;
    std::vector<RawTxInput> inputs;
    std::vector<RawTxOutput> outputs;
    std::uint32_t locktime = 0;

    bool is_coinbase() const {
        if (inputs.size() != 1) return false;
        const Outpoint& op = inputs[0].previous;
        if (op.vout != 0xffffffff) return false;
        for (std::uint8_t b : op.txid) {
            if (b != 0) return false;
        }
        return true;
    }
};

/// Parse one transaction starting at `offset`. Returns the transaction and the
/// number of bytes consumed. Accepts both legacy and segwit encodings.
inline std::pair<RawTransaction, std::size_t> parse_transaction(
    std::span<const std::uint8_t> bytes, std::size_t offset = 0) {
    ByteReader r(bytes, offset);
    RawTransaction tx;
    tx.version = static_cast<std::int32_t>(r.read_u32le());

    std::uint64_t input_count = r.read_varint();
    if (input_count == 0) {
        // Segwit marker: 0x00 followed by flag 0x01, then the real input count.
        std::uint8_t flag = r.read_u8();
        if (flag != 0x01) throw TruncatedTransaction(r.position());
        tx.has_witness = true;
        input_count = r.read_varint();
    }

    tx.inputs.resize(input_count);
    for (auto& in : tx.inputs) {
        auto txid = r.read_bytes(32);
        std::copy(txid.begin(), txid.end(), in.previous.txid.begin());
        in.previous.vout = r.read_u32le();
        std::uint64_t script_len = r.read_varint();
        auto script = r.read_bytes(script_len);
        in.script.assign(script.begin(), script.end());
        in.sequence = r.read_u32le();
    }

    std::uint64_t output_count = r.read_varint();
    tx.outputs.resize(output_count);
    for (auto& out : tx.outputs) {
        out.value = r.read_u64le();
        std::uint64_t script_len = r.read_varint();
        auto script = r.read_bytes(script_len);
        out.script.assign(script.begin(), script.end());
    }

    if (tx.has_witness) {
        for (auto& in : tx.inputs) {
            std::uint64_t items = r.read_varint();
            in.witness.resize(items);
            for (auto& item : in.witness) {
                std::uint64_t len = r.read_varint();
                auto data = r.read_bytes(len);
                item.assign(data.begin(), data.end());
            }
        }
    }

    tx.locktime = r.read_u32le();
    return {std::move(tx), r.position() - offset};
}

/// Full wire serialization, including witness data when present.
inline std::vector<std::uint8_t> serialize_transaction(const RawTransaction& tx) {
    ByteWriter w;
    w.write_u32le(static_cast<std::uint32_t>(tx.version));
    if (tx.has_witness) {
        w.write_u8(0x00);
        w.write_u8(0x01);
    }
    w.write_varint(tx.inputs.size());
    for (const auto& in : tx.inputs) {
        w.write_bytes(in.previous.txid);
        w.write_u32le(in.previous.vout);
        w.write_varint(in.script.size());
        w.write_bytes(in.script);
        w.write_u32le(in.sequence);
    }
    w.write_varint(tx.outputs.size());
    for (const auto& out : tx.outputs) {
        w.write_u64le(out.value);
        w.write_varint(out.script.size());
        w.write_bytes(out.script);
    }
    if (tx.has_witness) {
        for (const auto& in : tx.inputs) {
            w.write_varint(in.witness.size());
            for (const auto& item : in.witness) {
                w.write_varint(item.size());
                w.write_bytes(item);
            }
        }
    }
    w.write_u32le(tx.locktime);
    return w.take();
}

/// Serialization without marker/flag/witness; this is what the txid commits to.
inline std::vector<std::uint8_t> serialize_transaction_no_witness(const RawTransaction& tx) {
    RawTransaction stripped = tx;
    stripped.has_witness = false;
    for (auto& in : stripped.inputs) in.witness.clear();
    return serialize_transaction(stripped);
}

/// Double SHA-256 of the non-witness serialization, internal byte order.
inline Hash256 compute_txid(const RawTransaction& tx) {
    return double_sha256(serialize_transaction_no_witness(tx));
}

}  // namespace cjscan
