#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "cjscan/pipeline.hpp"
#include "cjscan/synthgen.hpp"
#include "fixture.hpp"

using namespace cjscan;

namespace {

namespace fs = std::filesystem;

struct TempDirs {
    fs::path blocks = fs::temp_directory_path() / "cjscan_pipe_blocks";
    fs::path out = fs::temp_directory_path() / "cjscan_pipe_out";

    TempDirs() {
        fs::remove_all(blocks);
        fs::remove_all(out);
        fs::create_directories(blocks);
    }
    ~TempDirs() {
        fs::remove_all(blocks);
        fs::remove_all(out);
    }
};

void write_blk(const fs::path& dir, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(dir / "blk00000.dat", std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("run_scan labels embedded rounds and nothing else") {
    // One round per protocol plus a handful of plain payments.
    std::vector<ResolvedTransaction> txs;
    std::vector<std::uint32_t> assignments;
    std::vector<Protocol> protocols = {Protocol::JoinMarket, Protocol::Wasabi1_0,
                                       Protocol::Wasabi1_1, Protocol::Wasabi2_0,
                                       Protocol::WhirlpoolTx0, Protocol::WhirlpoolMix};
    for (std::size_t i = 0; i < protocols.size(); ++i) {
        RoundSpec spec;
        spec.protocol = protocols[i];
        spec.seed = 400 + i;
        if (spec.protocol == Protocol::Wasabi2_0) {
            spec.participants = 25;
            spec.max_inputs_per_participant = 4;
        }
        txs.push_back(generate(spec));
        assignments.push_back(static_cast<std::uint32_t>(1 + i % 3));
    }
    const std::size_t n_positive = txs.size();
    // Negatives screened to be label free, so the expected row count is exact.
    std::uint64_t seed = 7'000;
    while (txs.size() < n_positive + 12) {
        auto neg = gen_negative(seed++);
        if (!classify(neg, default_config()).labels.empty()) continue;
        assignments.push_back(static_cast<std::uint32_t>(1 + txs.size() % 3));
        txs.push_back(std::move(neg));
    }

    fixture::ChainBuilder builder(txs, assignments);
    TempDirs dirs;
    write_blk(dirs.blocks, builder.file_bytes());

    ScanOptions opts;
    opts.blocks_dir = dirs.blocks;
    opts.out_dir = dirs.out;
    ScanSummary summary = run_scan(opts, default_config());

    CHECK(summary.blocks_scanned == 4);
    CHECK(summary.transactions_scanned == 4 + txs.size());

    auto records = read_labels_csv(dirs.out / "labels.csv");
    // Every embedded round must be found under its re-resolved txid.
    for (std::size_t i = 0; i < n_positive; ++i) {
        auto txid = to_display_hex(builder.embedded_txids()[i]);
        bool found = false;
        for (const auto& rec : records) found = found || rec.txid == txid;
        CHECK(found);
    }
    CHECK(records.size() == n_positive);
    CHECK(summary.labelled_transactions == records.size());

    // Outputs exist and the checkpoint restores.
    CHECK(fs::exists(dirs.out / "summary.json"));
    TxoIndex restored = TxoIndex::restore(dirs.out / "txoindex.ckpt");
    CHECK(restored.last_height() == 3);

    SECTION("height cap limits the scan") {
        ScanOptions capped = opts;
        capped.height_cap = 0;
        ScanSummary s2 = run_scan(capped, default_config());
        CHECK(s2.blocks_scanned == 1);
        CHECK(s2.transactions_scanned == 1);
        CHECK(read_labels_csv(dirs.out / "labels.csv").empty());
    }
}

TEST_CASE("run_scan on an empty directory fails and leaves no outputs") {
    TempDirs dirs;
    ScanOptions opts;
    opts.blocks_dir = dirs.blocks;
    opts.out_dir = dirs.out;
    CHECK_THROWS_AS(run_scan(opts, default_config()), MissingGenesis);
    CHECK_FALSE(fs::exists(dirs.out / "labels.csv"));
    CHECK_FALSE(fs::exists(dirs.out / "summary.json"));
    CHECK_FALSE(fs::exists(dirs.out / "txoindex.ckpt"));
}
