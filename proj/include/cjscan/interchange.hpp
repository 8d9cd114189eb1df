#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "cjscan/detectors.hpp"
#include "cjscan/types.hpp"

namespace cjscan {

/// One transaction per JSON line: txid, pre-resolved inputs and outputs as
/// (value, script-id) pairs, optional true label. The cross-language test
/// corpus format.
inline nlohmann::json to_interchange_json(const ResolvedTransaction& tx,
                                          const std::string& label = "") {
    nlohmann::json j;
    j["txid"] = to_display_hex(tx.txid);
    j["height"] = tx.height;
    j["coinbase"] = tx.is_coinbase;
    auto txos = [](const std::vector<Txo>& list) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : list) {
            arr.push_back({t.value, to_hex(t.script.digest)});
        }
        return arr;
    };
    j["inputs"] = txos(tx.inputs);
    j["outputs"] = txos(tx.outputs);
    if (!label.empty()) j["label"] = label;
    return j;
}

struct InterchangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline ResolvedTransaction from_interchange_json(const nlohmann::json& j) {
    ResolvedTransaction tx;
    try {
        auto txid_bytes = from_hex(j.at("txid").get<std::string>());
        if (txid_bytes.size() != 32) throw InterchangeError("txid must be 32 bytes");
        // display order is byte-reversed
        for (std::size_t i = 0; i < 32; ++i) tx.txid[i] = txid_bytes[31 - i];
        tx.height = j.value("height", 0u);
        tx.is_coinbase = j.value("coinbase", false);
        auto txos = [](const nlohmann::json& arr) {
            std::vector<Txo> list;
            for (const auto& item : arr) {
                Txo t;
                t.value = item.at(0).get<std::uint64_t>();
                auto digest = from_hex(item.at(1).get<std::string>());
                if (digest.size() != 32) throw InterchangeError("script id must be 32 bytes");
                std::copy(digest.begin(), digest.end(), t.script.digest.begin());
                list.push_back(t);
            }
            return list;
        };
        tx.inputs = txos(j.at("inputs"));
        tx.outputs = txos(j.at("outputs"));
    } catch (const nlohmann::json::exception& e) {
        throw InterchangeError(std::string("malformed transaction JSON: ") + e.what());
    }
    if (tx.outputs.empty()) throw InterchangeError("transaction must have outputs");
    if (!tx.is_coinbase && tx.inputs.empty()) {
        throw InterchangeError("non-coinbase transaction must have inputs");
    }
    return tx;
}

inline nlohmann::json classification_to_json(const Classification& c) {
    nlohmann::json j;
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        auto label = static_cast<Label>(i);
        if (c.labels.contains(label)) labels.push_back(label_name(label));
    }
    j["labels"] = labels;
    if (c.estimated_n) j["estimated_n"] = *c.estimated_n;
    if (c.estimated_d) j["estimated_d"] = *c.estimated_d;
    if (c.estimated_pool) {
        j["pool"] = {{"denomination", c.estimated_pool->pool.denomination},
                     {"coordinator_fee", c.estimated_pool->pool.coordinator_fee}};
        j["premix_value"] = c.estimated_pool->premix_value;
        j["epsilon"] = c.estimated_pool->epsilon;
    }
    return j;
}

}  // namespace cjscan
