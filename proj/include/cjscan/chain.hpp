#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "cjscan/blockfile.hpp"

namespace cjscan {

struct MissingGenesis : std::runtime_error {
    MissingGenesis() : std::runtime_error("no genesis block (prev hash all zero) found") {}
};

struct Hash256Hash {
    std::size_t operator()(const Hash256& h) const noexcept {
        std::size_t v;
        std::memcpy(&v, h.data(), sizeof(v));
        return v;
    }
};

/// Everything order_chain needs per block: linkage plus where to re-read it.
struct BlockRecord {
    Hash256 hash{};
    Hash256 prev{};
    FilePosition position;
};

/// The main chain, genesis first. Orphans and stale forks are listed in
/// `disconnected` for reporting; they never appear in the ordered sequence.
struct ChainView {
    std::vector<BlockRecord> blocks;  // index == height
    std::vector<Hash256> disconnected;

    std::size_t height_of_tip() const { return blocks.empty() ? 0 : blocks.size() - 1; }
};

/// Longest-path selection from the genesis block (prev hash all zero).
/// Duplicate hashes are dropped, first occurrence wins.
inline ChainView order_chain(const std::vector<BlockRecord>& records) {
    std::unordered_map<Hash256, std::size_t, Hash256Hash> by_hash;
    std::vector<BlockRecord> unique;
    unique.reserve(records.size());
    for (const auto& rec : records) {
        if (by_hash.emplace(rec.hash, unique.size()).second) unique.push_back(rec);
    }

    static constexpr Hash256 kZero{};
    std::unordered_map<Hash256, std::vector<std::size_t>, Hash256Hash> children;
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        if (unique[i].prev == kZero) {
            roots.push_back(i);
        } else {
            children[unique[i].prev].push_back(i);
        }
    }
    if (roots.empty()) throw MissingGenesis();

    // Longest downward path from each root; iterative DFS with memoized depth.
    std::vector<std::size_t> best_child(unique.size(), SIZE_MAX);
    std::vector<std::size_t> depth(unique.size(), 0);
    std::vector<bool> visited(unique.size(), false);
    auto compute = [&](std::size_t root) {
        std::vector<std::pair<std::size_t, bool>> stack{{root, false}};
        while (!stack.empty()) {
            auto [idx, expanded] = stack.back();
            stack.pop_back();
            auto it = children.find(unique[idx].hash);
            if (!expanded) {
                if (visited[idx]) continue;
                visited[idx] = true;
                stack.push_back({idx, true});
                if (it != children.end()) {
                    for (std::size_t c : it->second) stack.push_back({c, false});
                }
            } else {
                depth[idx] = 1;
                if (it != children.end()) {
                    for (std::size_t c : it->second) {
                        if (depth[c] + 1 > depth[idx]) {
                            depth[idx] = depth[c] + 1;
                            best_child[idx] = c;
                        }
                    }
                }
            }
        }
    };
    for (std::size_t root : roots) compute(root);

    std::size_t best_root = roots[0];
    for (std::size_t root : roots) {
        if (depth[root] > depth[best_root]) best_root = root;
    }

    ChainView view;
    std::vector<bool> on_chain(unique.size(), false);
    for (std::size_t idx = best_root; idx != SIZE_MAX; idx = best_child[idx]) {
        on_chain[idx] = true;
        view.blocks.push_back(unique[idx]);
    }
    for (std::size_t i = 0; i < unique.size(); ++i) {
        if (!on_chain[i]) view.disconnected.push_back(unique[i].hash);
    }
    return view;
}

/// Re-reads block payloads by file position. Caches the current file's bytes
/// since chain order mostly walks files sequentially.
class BlockStore {
public:
    RawBlock load(const FilePosition& pos) {
        if (pos.file != cached_file_) {
            cached_ = read_file_bytes(pos.file);
            cached_file_ = pos.file;
        }
        if (pos.offset + pos.length > cached_.size()) {
            throw std::runtime_error("block position past end of " + pos.file);
        }
        RawBlock block = parse_block(
            std::span<const std::uint8_t>(cached_).subspan(pos.offset, pos.length));
        block.position = pos;
        return block;
    }

private:
    std::string cached_file_;
    std::vector<std::uint8_t> cached_;
};

/// Walk the main chain in height order up to and including `height_cap`,
/// invoking `sink(height, tx)` per transaction in intra-block order.
inline void stream_transactions(const ChainView& chain, BlockStore& store,
                                std::uint32_t height_cap,
                                const std::function<void(std::uint32_t, const RawTransaction&)>& sink) {
    for (std::size_t h = 0; h < chain.blocks.size() && h <= height_cap; ++h) {
        RawBlock block = store.load(chain.blocks[h].position);
        for (const auto& tx : block.transactions) {
            sink(static_cast<std::uint32_t>(h), tx);
        }
    }
}

}  // namespace cjscan
