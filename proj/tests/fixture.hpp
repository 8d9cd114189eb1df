#pragma once

// Shared test fixtures: hand-assembled transactions, synthetic blk files,
// and a builder that embeds pre-resolved transactions into a parseable
// regtest-style chain.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cjscan/blockfile.hpp"
#include "cjscan/hash.hpp"
#include "cjscan/transaction.hpp"
#include "cjscan/types.hpp"

namespace fixture {

// The Bitcoin genesis block's coinbase transaction, wire bytes.
inline const char* kGenesisCoinbaseHex =
    "01000000"
    "01"
    "0000000000000000000000000000000000000000000000000000000000000000"
    "ffffffff"
    "4d"
    "04ffff001d0104455468652054696d65732030332f4a616e2f32303039204368616e63656c6c6f"
    "72206f6e206272696e6b206f66207365636f6e64206261696c6f757420666f722062616e6b73"
    "ffffffff"
    "01"
    "00f2052a01000000"
    "43"
    "4104678afdb0fe5548271967f1a67130b7105cd6a828e03909a67962e0ea1f61deb649f6bc3f4c"
    "ef38c4f35504e51ec112de5c384df7ba0b8d578a4c702b6bf11d5fac"
    "00000000";

inline const char* kGenesisCoinbaseTxid =
    "4a5e1e4baab89f3a32518a88c31bc87f618f76673e2cc77ab2127b7afdeda33b";

/// A short unique raw script for test transactions.
inline std::vector<std::uint8_t> script_bytes(std::uint64_t n) {
    std::vector<std::uint8_t> s{0x76, 0xa9};  // arbitrary prefix
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    return s;
}

inline cjscan::RawTransaction make_coinbase(const std::vector<cjscan::RawTxOutput>& outputs,
                                            std::uint64_t tag) {
    cjscan::RawTransaction tx;
    cjscan::RawTxInput in;
    in.previous.txid.fill(0);
    in.previous.vout = 0xffffffff;
    in.script = script_bytes(0xc0ffee00 + tag);  // varies the txid per block
    tx.inputs.push_back(in);
    tx.outputs = outputs;
    return tx;
}

inline cjscan::BlockHeader make_header(const cjscan::Hash256& prev, std::uint32_t nonce) {
    cjscan::BlockHeader h;
    h.version = 1;
    h.prev_block_hash = prev;
    h.merkle_root.fill(0xab);
    h.time = 1700000000;
    h.bits = 0x207fffff;
    h.nonce = nonce;
    return h;
}

/// Builds a blk-file image whose later blocks embed pre-resolved
/// transactions. The genesis coinbase creates every output the embedded
/// transactions spend, so resolution succeeds in chain order.
class ChainBuilder {
public:
    /// `assignments[i]` is the 1-based block index the i-th transaction goes
    /// into; block count adapts to the largest assignment.
    ChainBuilder(const std::vector<cjscan::ResolvedTransaction>& txs,
                 const std::vector<std::uint32_t>& assignments) {
        // Funding outputs, one per embedded input, unique scripts.
        std::vector<cjscan::RawTxOutput> funding;
        std::map<cjscan::ScriptId, std::vector<std::uint8_t>> script_map;
        auto raw_script_for = [&](const cjscan::ScriptId& id) {
            auto it = script_map.find(id);
            if (it == script_map.end()) {
                it = script_map.emplace(id, script_bytes(script_map.size() + 1)).first;
            }
            return it->second;
        };

        for (const auto& tx : txs) {
            for (const auto& in : tx.inputs) {
                funding.push_back({in.value, raw_script_for(in.script)});
            }
        }
        cjscan::RawTransaction genesis_cb = make_coinbase(funding, 0);
        cjscan::Hash256 genesis_cb_txid = cjscan::compute_txid(genesis_cb);

        // Raw versions of the embedded transactions, spending the funding
        // outputs in order.
        std::uint32_t next_vout = 0;
        std::vector<cjscan::RawTransaction> raw_txs;
        for (const auto& tx : txs) {
            cjscan::RawTransaction raw;
            for (const auto& in : tx.inputs) {
                cjscan::RawTxInput ri;
                ri.previous = cjscan::Outpoint{genesis_cb_txid, next_vout++};
                ri.script = {0x00};
                raw.inputs.push_back(ri);
                (void)in;
            }
            for (const auto& out : tx.outputs) {
                raw.outputs.push_back({out.value, raw_script_for(out.script)});
            }
            raw_txs.push_back(std::move(raw));
            expected_txids_.push_back(cjscan::compute_txid(raw_txs.back()));
        }

        std::uint32_t n_blocks = 1;
        for (std::uint32_t a : assignments) n_blocks = std::max(n_blocks, a + 1);

        cjscan::Hash256 prev{};
        for (std::uint32_t b = 0; b < n_blocks; ++b) {
            std::vector<cjscan::RawTransaction> block_txs;
            if (b == 0) {
                block_txs.push_back(genesis_cb);
            } else {
                block_txs.push_back(make_coinbase({{5'000'000'000ULL, script_bytes(0x5000 + b)}}, b));
                for (std::size_t i = 0; i < txs.size(); ++i) {
                    if (assignments[i] == b) block_txs.push_back(raw_txs[i]);
                }
            }
            cjscan::BlockHeader header = make_header(prev, b);
            auto payload = cjscan::serialize_block(header, block_txs);
            cjscan::append_framed_block(file_, cjscan::kMainnetMagic, payload);
            prev = cjscan::block_hash_of(header);
            block_hashes_.push_back(prev);
        }
    }

    const std::vector<std::uint8_t>& file_bytes() const { return file_; }
    const std::vector<cjscan::Hash256>& block_hashes() const { return block_hashes_; }
    const std::vector<cjscan::Hash256>& embedded_txids() const { return expected_txids_; }

private:
    std::vector<std::uint8_t> file_;
    std::vector<cjscan::Hash256> block_hashes_;
    std::vector<cjscan::Hash256> expected_txids_;
};

}  // namespace fixture
