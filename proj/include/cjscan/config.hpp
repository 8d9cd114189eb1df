#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cjscan {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WhirlpoolPool {
    std::uint64_t denomination = 0;  // satoshis
    std::uint64_t coordinator_fee = 0;

    auto operator<=>(const WhirlpoolPool&) const = default;
};

/// All detector tunables. Defaults follow the reference parameter choices;
/// values left open by the protocols are configurable.
struct DetectorConfig {
    // Wasabi 1.x
    std::uint64_t wasabi_epsilon = 2'000'000;  // band half-width around 0.1 BTC
    std::uint32_t wasabi1_a_max = 7;
    std::uint32_t wasabi11_max_level = 10;

    // Wasabi 2.0
    std::uint32_t wasabi2_a_max = 10;
    std::uint32_t wasabi2_target_p = 50;
    std::uint64_t wasabi2_v_min = 5'000;
    std::vector<std::uint64_t> wasabi2_denoms;  // sorted ascending; defaulted in finalize()

    // Whirlpool
    std::vector<WhirlpoolPool> whirlpool_pools = {
        {100'000, 5'000},
        {1'000'000, 50'000},
        {5'000'000, 175'000},
        {50'000'000, 1'750'000},
    };
    std::uint32_t whirlpool_a_max = 70;
    double eta1 = 0.5;
    double eta2 = 3.0;
    std::uint64_t epsilon_min = 100;
    std::uint64_t epsilon_max = 100'000;

    void validate() const {
        if (!(eta1 <= 1.0 && 1.0 <= eta2)) throw ConfigError("require eta1 <= 1 <= eta2");
        if (eta1 < 0.0) throw ConfigError("eta1 must be in [0, 1]");
        if (epsilon_min > epsilon_max) throw ConfigError("epsilon_min > epsilon_max");
        std::vector<std::uint64_t> denoms;
        for (const auto& p : whirlpool_pools) denoms.push_back(p.denomination);
        std::sort(denoms.begin(), denoms.end());
        if (std::adjacent_find(denoms.begin(), denoms.end()) != denoms.end()) {
            throw ConfigError("whirlpool pools must have distinct denominations");
        }
        if (!std::is_sorted(wasabi2_denoms.begin(), wasabi2_denoms.end()) ||
            std::adjacent_find(wasabi2_denoms.begin(), wasabi2_denoms.end()) !=
                wasabi2_denoms.end()) {
            throw ConfigError("wasabi2_denoms must be strictly ascending");
        }
        for (std::uint64_t d : wasabi2_denoms) {
            if (d < wasabi2_v_min) throw ConfigError("wasabi2 denomination below v_min");
        }
    }
};

constexpr std::uint64_t kMaxMoney = 2'099'999'997'690'000ULL;

/// Default Wasabi 2.0 denomination family: powers of two, powers of three
/// and their doubles, powers of ten with their doubles and quintuples,
/// clipped to [v_min, total supply].
inline std::vector<std::uint64_t> default_wasabi2_denominations(std::uint64_t v_min) {
    std::vector<std::uint64_t> out;
    auto emit_family = [&](std::uint64_t base, std::uint64_t multiplier) {
        for (std::uint64_t v = multiplier; v <= kMaxMoney; ) {
            out.push_back(v);
            if (v > kMaxMoney / base) break;
            v *= base;
        }
    };
    emit_family(2, 1);   // 2^k
    emit_family(3, 1);   // 3^k
    emit_family(3, 2);   // 2 * 3^k
    emit_family(10, 1);  // 10^k
    emit_family(10, 2);  // 2 * 10^k
    emit_family(10, 5);  // 5 * 10^k
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::erase_if(out, [&](std::uint64_t v) { return v < v_min; });
    return out;
}

/// Fill defaults that depend on other fields, then validate.
inline DetectorConfig finalize(DetectorConfig cfg) {
    if (cfg.wasabi2_denoms.empty()) {
        cfg.wasabi2_denoms = default_wasabi2_denominations(cfg.wasabi2_v_min);
    }
    cfg.validate();
    return cfg;
}

inline DetectorConfig default_config() { return finalize(DetectorConfig{}); }

namespace detail {

inline std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(trim(item));
    return parts;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for " + key + ": '" + s + "'");
    }
}

inline double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + key + ": '" + s + "'");
    }
}

}  // namespace detail

/// Key-value config format: `key = value`, '#' comments, blank lines ignored.
/// Lists are comma separated; pools are denomination:fee pairs.
inline DetectorConfig parse_config(std::istream& in) {
    DetectorConfig cfg;
    bool pools_set = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));

        if (key == "wasabi_epsilon") {
            cfg.wasabi_epsilon = detail::parse_u64(value, key);
        } else if (key == "wasabi1_a_max") {
            cfg.wasabi1_a_max = static_cast<std::uint32_t>(detail::parse_u64(value, key));
        } else if (key == "wasabi11_max_level") {
            cfg.wasabi11_max_level = static_cast<std::uint32_t>(detail::parse_u64(value, key));
        } else if (key == "wasabi2_a_max") {
            cfg.wasabi2_a_max = static_cast<std::uint32_t>(detail::parse_u64(value, key));
        } else if (key == "wasabi2_target_p") {
            cfg.wasabi2_target_p = static_cast<std::uint32_t>(detail::parse_u64(value, key));
        } else if (key == "wasabi2_v_min") {
            cfg.wasabi2_v_min = detail::parse_u64(value, key);
        } else if (key == "wasabi2_denoms") {
            cfg.wasabi2_denoms.clear();
            for (const auto& part : detail::split(value, ',')) {
                if (!part.empty()) cfg.wasabi2_denoms.push_back(detail::parse_u64(part, key));
            }
        } else if (key == "whirlpool_pools") {
            cfg.whirlpool_pools.clear();
            pools_set = true;
            for (const auto& part : detail::split(value, ',')) {
                if (part.empty()) continue;
                auto colon = part.find(':');
                if (colon == std::string::npos) {
                    throw ConfigError("pool entry must be denomination:fee, got '" + part + "'");
                }
                WhirlpoolPool pool;
                pool.denomination = detail::parse_u64(detail::trim(part.substr(0, colon)), key);
                pool.coordinator_fee = detail::parse_u64(detail::trim(part.substr(colon + 1)), key);
                cfg.whirlpool_pools.push_back(pool);
            }
        } else if (key == "whirlpool_a_max") {
            cfg.whirlpool_a_max = static_cast<std::uint32_t>(detail::parse_u64(value, key));
        } else if (key == "eta1") {
            cfg.eta1 = detail::parse_double(value, key);
        } else if (key == "eta2") {
            cfg.eta2 = detail::parse_double(value, key);
        } else if (key == "epsilon_min") {
            cfg.epsilon_min = detail::parse_u64(value, key);
        } else if (key == "epsilon_max") {
            cfg.epsilon_max = detail::parse_u64(value, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (pools_set && cfg.whirlpool_pools.empty()) {
        throw ConfigError("whirlpool_pools must not be empty");
    }
    return finalize(cfg);
}

inline DetectorConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in);
}

/// Render in the same key-value format parse_config accepts.
inline std::string render_config(const DetectorConfig& cfg) {
    std::ostringstream out;
    out << "wasabi_epsilon = " << cfg.wasabi_epsilon << "\n";
    out << "wasabi1_a_max = " << cfg.wasabi1_a_max << "\n";
    out << "wasabi11_max_level = " << cfg.wasabi11_max_level << "\n";
    out << "wasabi2_a_max = " << cfg.wasabi2_a_max << "\n";
    out << "wasabi2_target_p = " << cfg.wasabi2_target_p << "\n";
    out << "wasabi2_v_min = " << cfg.wasabi2_v_min << "\n";
    out << "wasabi2_denoms = ";
    for (std::size_t i = 0; i < cfg.wasabi2_denoms.size(); ++i) {
        if (i) out << ",";
        out << cfg.wasabi2_denoms[i];
    }
    out << "\n";
    out << "whirlpool_pools = ";
    for (std::size_t i = 0; i < cfg.whirlpool_pools.size(); ++i) {
        if (i) out << ",";
        out << cfg.whirlpool_pools[i].denomination << ":" << cfg.whirlpool_pools[i].coordinator_fee;
    }
    out << "\n";
    out << "whirlpool_a_max = " << cfg.whirlpool_a_max << "\n";
    out << "eta1 = " << cfg.eta1 << "\n";
    out << "eta2 = " << cfg.eta2 << "\n";
    out << "epsilon_min = " << cfg.epsilon_min << "\n";
    out << "epsilon_max = " << cfg.epsilon_max << "\n";
    return out.str();
}

}  // namespace cjscan
