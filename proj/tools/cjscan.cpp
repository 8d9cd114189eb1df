// cjscan: scan Bitcoin block files, classify CoinJoin transactions, and
// build windowed/cumulative detection reports.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cjscan/config.hpp"
#include "cjscan/interchange.hpp"
#include "cjscan/pipeline.hpp"
#include "cjscan/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

cjscan::DetectorConfig load_or_default(const std::string& config_path) {
    if (config_path.empty()) return cjscan::default_config();
    return cjscan::load_config(config_path);
}

int cmd_scan(const std::string& blocks_dir, const std::string& out_dir,
             std::uint32_t max_height, const std::string& config_path,
             const std::string& magic_hex, bool no_prune) {
    cjscan::ScanOptions opts;
    opts.blocks_dir = blocks_dir;
    opts.out_dir = out_dir;
    opts.height_cap = max_height;
    opts.prune = !no_prune;
    if (!magic_hex.empty()) {
        opts.magic = static_cast<std::uint32_t>(std::stoul(magic_hex, nullptr, 16));
    }
    opts.progress = [](const std::string& msg) { std::cerr << msg << '\n'; };

    auto cfg = load_or_default(config_path);
    auto summary = cjscan::run_scan(opts, cfg);
    std::cerr << "scanned " << summary.blocks_scanned << " blocks, "
              << summary.transactions_scanned << " transactions, "
              << summary.labelled_transactions << " labelled in "
              << summary.runtime_seconds << " s\n";
    return kExitOk;
}

int cmd_classify(const std::string& tx_file, const std::string& config_path) {
    std::ifstream in(tx_file);
    if (!in) {
        std::cerr << "cannot open " << tx_file << '\n';
        return kExitData;
    }
    auto cfg = load_or_default(config_path);
    nlohmann::json parsed;
    try {
        in >> parsed;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid JSON: " << e.what() << '\n';
        return kExitData;
    }
    auto tx = cjscan::from_interchange_json(parsed);
    auto classification = cjscan::classify(tx, cfg);
    std::cout << cjscan::classification_to_json(classification).dump(2) << '\n';
    return kExitOk;
}

int cmd_report(const std::string& labels_path, std::uint64_t window,
               const std::string& out_path) {
    auto records = cjscan::read_labels_csv(labels_path);
    auto rows = cjscan::build_report(records, window);
    cjscan::write_report_csv(out_path, rows);
    std::cerr << "wrote " << rows.size() << " report rows to " << out_path << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CoinJoin transaction scanner and classifier"};
    app.require_subcommand(1);

    std::string blocks_dir, out_dir, config_path, magic_hex;
    std::uint32_t max_height = 0xFFFFFFFF;
    bool no_prune = false;
    auto* scan = app.add_subcommand("scan", "scan blk files and write labels.csv");
    scan->add_option("--blocks-dir", blocks_dir, "directory containing blk*.dat files")
        ->required();
    scan->add_option("--out", out_dir, "output directory")->required();
    scan->add_option("--max-height", max_height, "last block height to scan");
    scan->add_option("--config", config_path, "detector config file");
    scan->add_option("--magic", magic_hex, "network magic as hex (default F9BEB4D9, LE value D9B4BEF9)");
    scan->add_flag("--no-prune", no_prune, "keep spent outputs in the TXO index");

    std::string tx_file, classify_config;
    auto* classify = app.add_subcommand("classify", "classify one pre-resolved transaction JSON");
    classify->add_option("--tx-file", tx_file, "transaction in interchange JSON format")
        ->required();
    classify->add_option("--config", classify_config, "detector config file");

    std::string labels_path, report_out;
    std::uint64_t window = 20'000;
    auto* report = app.add_subcommand("report", "windowed/cumulative counts from labels.csv");
    report->add_option("--labels", labels_path, "labels.csv from a scan")->required();
    report->add_option("--window", window, "window size in blocks");
    report->add_option("--out", report_out, "output report CSV")->required();

    auto* defaults = app.add_subcommand("defaults", "print the default detector config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (scan->parsed()) {
            return cmd_scan(blocks_dir, out_dir, max_height, config_path, magic_hex, no_prune);
        }
        if (classify->parsed()) return cmd_classify(tx_file, classify_config);
        if (report->parsed()) return cmd_report(labels_path, window, report_out);
        if (defaults->parsed()) {
            std::cout << cjscan::render_config(cjscan::default_config());
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
