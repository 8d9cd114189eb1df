#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "cjscan/hash.hpp"
#include "cjscan/transaction.hpp"
#include "cjscan/types.hpp"

namespace cjscan {

struct MissingOutpoint : std::runtime_error {
    explicit MissingOutpoint(const Outpoint& op)
        : std::runtime_error("missing outpoint " + to_display_hex(op.txid) + ":" +
                             std::to_string(op.vout)) {}
};

struct CorruptSnapshot : std::runtime_error {
    explicit CorruptSnapshot(const std::string& why)
        : std::runtime_error("corrupt snapshot: " + why) {}
};

/// Outpoint -> (value, script id) store feeding input resolution. With
/// pruning on (the default) spent entries are deleted, so the working set
/// tracks the UTXO set.
class TxoIndex {
public:
    explicit TxoIndex(bool prune_spent = true) : prune_(prune_spent) {}

    /// Resolve and apply one transaction. Must be called in chain order,
    /// including intra-block order.
    ResolvedTransaction apply_transaction(const RawTransaction& tx, std::uint32_t height) {
        ResolvedTransaction resolved;
        resolved.txid = compute_txid(tx);
        resolved.height = height;
        resolved.is_coinbase = tx.is_coinbase();

        if (!resolved.is_coinbase) {
            resolved.inputs.reserve(tx.inputs.size());
            for (const auto& in : tx.inputs) {
                auto it = entries_.find(in.previous);
                if (it == entries_.end()) throw MissingOutpoint(in.previous);
                resolved.inputs.push_back(it->second);
                if (prune_) {
                    entries_.erase(it);
                    ++deletions_;
                }
            }
        }

        resolved.outputs.reserve(tx.outputs.size());
        for (std::uint32_t i = 0; i < tx.outputs.size(); ++i) {
            Txo txo{tx.outputs[i].value, ScriptId::of(tx.outputs[i].script)};
            resolved.outputs.push_back(txo);
            entries_[Outpoint{resolved.txid, i}] = txo;
            ++insertions_;
        }

        if (!resolved.is_coinbase && resolved.input_value() < resolved.output_value()) {
            throw std::runtime_error("value created out of nothing in tx " +
                                     to_display_hex(resolved.txid) + "; index is corrupt");
        }
        last_height_ = height;
        return resolved;
    }

    std::optional<Txo> lookup(const Outpoint& op) const {
        auto it = entries_.find(op);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const { return entries_.size(); }
    std::uint64_t insertions() const { return insertions_; }
    std::uint64_t deletions() const { return deletions_; }
    std::int64_t last_height() const { return last_height_; }
    bool pruning() const { return prune_; }

    // Snapshot layout: magic "CJTXOIDX", u16 version, u32 last height
    // (0xFFFFFFFF = pre-genesis), u64 entry count, sorted key/value records,
    // 32-byte SHA-256 of all prior bytes.
    static constexpr char kSnapshotMagic[8] = {'C', 'J', 'T', 'X', 'O', 'I', 'D', 'X'};
    static constexpr std::uint16_t kSnapshotVersion = 1;

    void checkpoint(const std::filesystem::path& path) const {
        ByteWriter w;
        w.write_bytes(std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(kSnapshotMagic), 8));
        w.write_u16le(kSnapshotVersion);
        w.write_u32le(last_height_ < 0 ? 0xFFFFFFFFu : static_cast<std::uint32_t>(last_height_));
        w.write_u64le(entries_.size());

        // Records sorted by the 36-byte key for byte-stable output.
        std::map<Outpoint, Txo> sorted(entries_.begin(), entries_.end());
        for (const auto& [op, txo] : sorted) {
            w.write_bytes(op.txid);
            w.write_u32le(op.vout);
            w.write_u64le(txo.value);
            w.write_bytes(txo.script.digest);
        }
        Hash256 checksum = sha256(w.bytes());
        w.write_bytes(checksum);

        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out.write(reinterpret_cast<const char*>(w.bytes().data()),
                  static_cast<std::streamsize>(w.size()));
    }

    static TxoIndex restore(const std::filesystem::path& path, bool prune_spent = true) {
        auto bytes = read_snapshot_bytes(path);
        if (bytes.size() < 8 + 2 + 4 + 8 + 32) throw CorruptSnapshot("file too short");

        std::span<const std::uint8_t> body(bytes.data(), bytes.size() - 32);
        Hash256 expected = sha256(body);
        if (!std::equal(expected.begin(), expected.end(), bytes.end() - 32)) {
            throw CorruptSnapshot("checksum mismatch");
        }

        ByteReader r(body);
        auto magic = r.read_bytes(8);
        if (!std::equal(magic.begin(), magic.end(), kSnapshotMagic)) {
            throw CorruptSnapshot("bad magic");
        }
        if (r.read_u16le() != kSnapshotVersion) throw CorruptSnapshot("unknown version");
        std::uint32_t height_raw = r.read_u32le();
        std::uint64_t count = r.read_u64le();
        if (body.size() != 8 + 2 + 4 + 8 + count * 76) throw CorruptSnapshot("bad entry count");

        TxoIndex index(prune_spent);
        index.last_height_ = height_raw == 0xFFFFFFFFu ? -1 : static_cast<std::int64_t>(height_raw);
        index.entries_.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            Outpoint op;
            auto txid = r.read_bytes(32);
            std::copy(txid.begin(), txid.end(), op.txid.begin());
            op.vout = r.read_u32le();
            Txo txo;
            txo.value = r.read_u64le();
            auto digest = r.read_bytes(32);
            std::copy(digest.begin(), digest.end(), txo.script.digest.begin());
            index.entries_[op] = txo;
        }
        return index;
    }

private:
    static std::vector<std::uint8_t> read_snapshot_bytes(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw CorruptSnapshot("cannot open " + path.string());
        return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
    }

    bool prune_;
    std::unordered_map<Outpoint, Txo, OutpointHash> entries_;
    std::uint64_t insertions_ = 0;
    std::uint64_t deletions_ = 0;
    std::int64_t last_height_ = -1;  // -1: nothing applied yet
};

}  // namespace cjscan
