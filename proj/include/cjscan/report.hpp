#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cjscan/detectors.hpp"

namespace cjscan {

struct CsvError : std::runtime_error {
    CsvError(std::size_t line, const std::string& why)
        : std::runtime_error("labels csv line " + std::to_string(line) + ": " + why) {}
};

/// One labelled transaction as written to labels.csv.
struct LabelRecord {
    std::uint32_t height = 0;
    std::string txid;  // display hex
    LabelSet labels;
    std::optional<std::uint64_t> estimated_n;
    std::optional<std::uint64_t> estimated_d;
    std::optional<std::uint64_t> pool_d;
    std::optional<std::uint64_t> pool_f;
    std::optional<std::uint64_t> epsilon;
};

inline LabelRecord make_label_record(const ResolvedTransaction& tx, const Classification& c) {
    LabelRecord rec;
    rec.height = tx.height;
    rec.txid = to_display_hex(tx.txid);
    rec.labels = c.labels;
    rec.estimated_n = c.estimated_n;
    rec.estimated_d = c.estimated_d;
    if (c.estimated_pool) {
        rec.pool_d = c.estimated_pool->pool.denomination;
        rec.pool_f = c.estimated_pool->pool.coordinator_fee;
        rec.epsilon = c.estimated_pool->epsilon;
    }
    return rec;
}

// Column order is frozen; downstream consumers parse by header name.
inline const char* kLabelsCsvHeader =
    "height,txid,joinmarket,wasabi1_0,wasabi1_1,wasabi2_0,whirlpool_tx0,whirlpool_mix,"
    "n_hat,d_hat,pool_d,pool_f,epsilon_tilde";

inline std::string to_csv_row(const LabelRecord& rec) {
    std::ostringstream out;
    auto opt = [](const std::optional<std::uint64_t>& v) {
        return v ? std::to_string(*v) : std::string();
    };
    out << rec.height << ',' << rec.txid;
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        out << ',' << (rec.labels.contains(static_cast<Label>(i)) ? '1' : '0');
    }
    out << ',' << opt(rec.estimated_n) << ',' << opt(rec.estimated_d) << ','
        << opt(rec.pool_d) << ',' << opt(rec.pool_f) << ',' << opt(rec.epsilon);
    return out.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

inline LabelRecord parse_label_record(const std::string& line, std::size_t line_no) {
    auto fields = split_csv_line(line);
    if (fields.size() != 13) throw CsvError(line_no, "expected 13 fields");
    LabelRecord rec;
    try {
        rec.height = static_cast<std::uint32_t>(std::stoul(fields[0]));
        rec.txid = fields[1];
        for (std::size_t i = 0; i < kLabelCount; ++i) {
            if (fields[2 + i] == "1") {
                rec.labels.add(static_cast<Label>(i));
            } else if (fields[2 + i] != "0") {
                throw std::invalid_argument("label flag must be 0 or 1");
            }
        }
        auto opt = [](const std::string& s) -> std::optional<std::uint64_t> {
            if (s.empty()) return std::nullopt;
            return std::stoull(s);
        };
        rec.estimated_n = opt(fields[8]);
        rec.estimated_d = opt(fields[9]);
        rec.pool_d = opt(fields[10]);
        rec.pool_f = opt(fields[11]);
        rec.epsilon = opt(fields[12]);
    } catch (const std::exception& e) {
        throw CsvError(line_no, e.what());
    }
    return rec;
}

inline std::vector<LabelRecord> read_labels_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<LabelRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line == kLabelsCsvHeader) continue;
        if (line.empty()) continue;
        records.push_back(parse_label_record(line, line_no));
    }
    return records;
}

/// Report categories after the precedence rules: JoinMarket drops
/// transactions also matching Wasabi 1.0 or a Whirlpool mix; the Wasabi 1.x
/// columns split single- vs multi-denomination; the total counts
/// transactions with any label other than Whirlpool Tx0.
enum class ReportCategory : std::size_t {
    JoinMarket = 0,
    SingleDenomination,
    MultiDenomination,
    Wasabi2,
    WhirlpoolTx0,
    WhirlpoolMix,
    Total,
};
constexpr std::size_t kReportCategories = 7;

inline bool in_report_category(const LabelSet& labels, ReportCategory cat) {
    switch (cat) {
        case ReportCategory::JoinMarket:
            return labels.contains(Label::JoinMarket) && !labels.contains(Label::Wasabi1_0) &&
                   !labels.contains(Label::WhirlpoolMix);
        case ReportCategory::SingleDenomination:
            return labels.contains(Label::Wasabi1_0);
        case ReportCategory::MultiDenomination:
            return labels.contains(Label::Wasabi1_1) && !labels.contains(Label::Wasabi1_0);
        case ReportCategory::Wasabi2:
            return labels.contains(Label::Wasabi2_0);
        case ReportCategory::WhirlpoolTx0:
            return labels.contains(Label::WhirlpoolTx0);
        case ReportCategory::WhirlpoolMix:
            return labels.contains(Label::WhirlpoolMix);
        case ReportCategory::Total: {
            LabelSet rest = labels;
            rest.bits &= static_cast<std::uint8_t>(
                ~(1u << static_cast<unsigned>(Label::WhirlpoolTx0)));
            return !rest.empty();
        }
    }
    return false;
}

struct ReportRow {
    std::uint64_t k = 0;  // window end block index
    std::array<std::uint64_t, kReportCategories> windowed{};
    std::array<std::uint64_t, kReportCategories> cumulative{};
};

/// Windowed and cumulative counts at k = window, 2*window, ... A window
/// covers heights (k - window, k]; height 0 is folded into the first window
/// so windowed counts always sum to the cumulative totals.
inline std::vector<ReportRow> build_report(const std::vector<LabelRecord>& records,
                                           std::uint64_t window) {
    if (window == 0) throw std::invalid_argument("window must be positive");
    std::uint32_t max_height = 0;
    for (const auto& rec : records) max_height = std::max(max_height, rec.height);
    std::uint64_t n_rows = std::max<std::uint64_t>(1, (max_height + window - 1) / window);
    if (max_height > 0 && max_height % window == 0) n_rows = max_height / window;

    std::vector<ReportRow> rows(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) rows[i].k = (i + 1) * window;

    for (const auto& rec : records) {
        std::uint64_t idx = rec.height == 0 ? 0 : (rec.height - 1) / window;
        for (std::size_t c = 0; c < kReportCategories; ++c) {
            if (in_report_category(rec.labels, static_cast<ReportCategory>(c))) {
                ++rows[idx].windowed[c];
            }
        }
    }
    std::array<std::uint64_t, kReportCategories> running{};
    for (auto& row : rows) {
        for (std::size_t c = 0; c < kReportCategories; ++c) {
            running[c] += row.windowed[c];
            row.cumulative[c] = running[c];
        }
    }
    return rows;
}

inline const char* kReportCsvHeader =
    "k,joinmarket_window,joinmarket_cum,single_denom_window,single_denom_cum,"
    "multi_denom_window,multi_denom_cum,wasabi2_window,wasabi2_cum,"
    "tx0_window,tx0_cum,mix_window,mix_cum,total_window,total_cum";

inline std::string to_csv_row(const ReportRow& row) {
    std::ostringstream out;
    out << row.k;
    for (std::size_t c = 0; c < kReportCategories; ++c) {
        out << ',' << row.windowed[c] << ',' << row.cumulative[c];
    }
    return out.str();
}

inline void write_report_csv(const std::filesystem::path& path,
                             const std::vector<ReportRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << kReportCsvHeader << '\n';
    for (const auto& row : rows) out << to_csv_row(row) << '\n';
}

}  // namespace cjscan
