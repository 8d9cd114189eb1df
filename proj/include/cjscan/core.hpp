#pragma once

#include <cstdint>
#include <map>
#include <set>

#include "cjscan/types.hpp"

namespace cjscan {

inline std::size_t distinct_input_scripts(const ResolvedTransaction& tx) {
    std::set<ScriptId> scripts;
    for (const auto& t : tx.inputs) scripts.insert(t.script);
    return scripts.size();
}

inline std::size_t distinct_output_scripts(const ResolvedTransaction& tx) {
    std::set<ScriptId> scripts;
    for (const auto& t : tx.outputs) scripts.insert(t.script);
    return scripts.size();
}

/// Multiset counts of the output values, in satoshis.
inline std::map<std::uint64_t, std::size_t> output_value_histogram(const ResolvedTransaction& tx) {
    std::map<std::uint64_t, std::size_t> hist;
    for (const auto& t : tx.outputs) ++hist[t.value];
    return hist;
}

}  // namespace cjscan
