#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cjscan/blockfile.hpp"
#include "cjscan/chain.hpp"
#include "cjscan/config.hpp"
#include "cjscan/detectors.hpp"
#include "cjscan/report.hpp"
#include "cjscan/txo_index.hpp"

namespace cjscan {

struct ScanOptions {
    std::filesystem::path blocks_dir;
    std::filesystem::path out_dir;
    std::uint32_t height_cap = 0xFFFFFFFF;
    std::uint32_t magic = kMainnetMagic;
    bool prune = true;
    std::uint32_t checkpoint_interval = 10'000;  // blocks
    std::function<void(const std::string&)> progress;  // optional, for stderr
};

struct ScanSummary {
    std::uint64_t blocks_scanned = 0;
    std::uint64_t transactions_scanned = 0;
    std::uint64_t labelled_transactions = 0;
    std::array<std::uint64_t, kLabelCount> label_totals{};
    std::uint64_t parse_errors = 0;
    std::uint64_t disconnected_blocks = 0;
    double runtime_seconds = 0;
};

inline nlohmann::json summary_to_json(const ScanSummary& s) {
    nlohmann::json j;
    j["blocks_scanned"] = s.blocks_scanned;
    j["transactions_scanned"] = s.transactions_scanned;
    j["labelled_transactions"] = s.labelled_transactions;
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        j["label_totals"][label_name(static_cast<Label>(i))] = s.label_totals[i];
    }
    j["parse_errors"] = s.parse_errors;
    j["disconnected_blocks"] = s.disconnected_blocks;
    j["runtime_seconds"] = s.runtime_seconds;
    return j;
}

/// Full pipeline: parse blk files, order the chain, resolve inputs against
/// the TXO index, classify, and write labels.csv + summary.json + a
/// checkpoint. Partial outputs are removed when the scan fails.
inline ScanSummary run_scan(const ScanOptions& opts, const DetectorConfig& cfg) {
    const auto started = std::chrono::steady_clock::now();
    const auto labels_path = opts.out_dir / "labels.csv";
    const auto summary_path = opts.out_dir / "summary.json";
    const auto checkpoint_path = opts.out_dir / "txoindex.ckpt";

    auto note = [&](const std::string& msg) {
        if (opts.progress) opts.progress(msg);
    };

    try {
        ScanSummary summary;

        std::vector<BlockRecord> headers;
        auto errors = parse_block_dir(opts.blocks_dir, opts.magic, [&](RawBlock&& block) {
            headers.push_back(BlockRecord{block.block_hash, block.header.prev_block_hash,
                                          block.position});
        });
        summary.parse_errors = errors.size();
        for (const auto& err : errors) {
            note("malformed block in " + err.file + " at offset " +
                 std::to_string(err.offset) + ": " + err.reason);
        }
        if (headers.empty()) throw MissingGenesis();

        ChainView chain = order_chain(headers);
        summary.disconnected_blocks = chain.disconnected.size();
        note("main chain height " + std::to_string(chain.height_of_tip()) + ", " +
             std::to_string(chain.disconnected.size()) + " disconnected blocks");

        std::filesystem::create_directories(opts.out_dir);
        std::ofstream labels(labels_path, std::ios::trunc);
        if (!labels) throw std::runtime_error("cannot write " + labels_path.string());
        labels << kLabelsCsvHeader << '\n';

        TxoIndex index(opts.prune);
        BlockStore store;
        std::uint32_t last_height = 0;
        stream_transactions(chain, store, opts.height_cap,
                            [&](std::uint32_t height, const RawTransaction& raw) {
            ResolvedTransaction tx = index.apply_transaction(raw, height);
            ++summary.transactions_scanned;
            if (height != last_height) {
                if (height % 1'000 == 0) note("height " + std::to_string(height));
                if (opts.checkpoint_interval > 0 && height % opts.checkpoint_interval == 0) {
                    index.checkpoint(checkpoint_path);
                }
                last_height = height;
            }
            if (tx.is_coinbase) return;

            Classification c = classify(tx, cfg);
            if (c.labels.empty()) return;
            ++summary.labelled_transactions;
            for (std::size_t i = 0; i < kLabelCount; ++i) {
                if (c.labels.contains(static_cast<Label>(i))) ++summary.label_totals[i];
            }
            labels << to_csv_row(make_label_record(tx, c)) << '\n';
        });
        summary.blocks_scanned = std::min<std::uint64_t>(chain.blocks.size(),
                                                         static_cast<std::uint64_t>(opts.height_cap) + 1);
        labels.close();
        index.checkpoint(checkpoint_path);

        summary.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::ofstream sum(summary_path, std::ios::trunc);
        sum << summary_to_json(summary).dump(2) << '\n';
        return summary;
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(labels_path, ec);
        std::filesystem::remove(summary_path, ec);
        std::filesystem::remove(checkpoint_path, ec);
        throw;
    }
}

}  // namespace cjscan
