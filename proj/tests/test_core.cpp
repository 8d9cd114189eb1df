#include <catch2/catch_amalgamated.hpp>

#include "cjscan/core.hpp"
#include "cjscan/synthgen.hpp"

using namespace cjscan;

namespace {

ResolvedTransaction tx_with(std::vector<Txo> inputs, std::vector<Txo> outputs) {
    ResolvedTransaction tx;
    tx.inputs = std::move(inputs);
    tx.outputs = std::move(outputs);
    return tx;
}

ScriptId script(std::uint64_t n) {
    ScriptFactory f(n);
    return f.fresh();
}

}  // namespace

TEST_CASE("distinct_input_scripts") {
    ScriptId a = script(1), b = script(2), c = script(3);

    CHECK(distinct_input_scripts(tx_with({{10, a}, {20, a}, {30, a}}, {{1, a}})) == 1);
    CHECK(distinct_input_scripts(tx_with({{10, a}, {20, b}, {30, c}}, {{1, a}})) == 3);
    // 5 inputs with scripts A,A,B,C,C
    CHECK(distinct_input_scripts(tx_with({{1, a}, {2, a}, {3, b}, {4, c}, {5, c}}, {{1, a}})) == 3);
}

TEST_CASE("distinct_output_scripts") {
    ScriptId a = script(1), b = script(2), c = script(3), d = script(4);

    CHECK(distinct_output_scripts(tx_with({{1, a}}, {{10, a}, {20, a}})) == 1);
    CHECK(distinct_output_scripts(tx_with({{1, a}}, {{1, a}, {2, b}, {3, c}, {4, d}})) == 4);
    CHECK(distinct_output_scripts(tx_with({{1, a}}, {{1, a}, {2, b}, {3, b}})) == 2);
}

TEST_CASE("output_value_histogram") {
    ScriptId a = script(1);

    auto h = output_value_histogram(tx_with({}, {{10, a}, {10, a}, {3, a}}));
    CHECK(h == std::map<std::uint64_t, std::size_t>{{10, 2}, {3, 1}});

    h = output_value_histogram(tx_with({}, {{5, a}}));
    CHECK(h == std::map<std::uint64_t, std::size_t>{{5, 1}});

    h = output_value_histogram(tx_with({}, {{7, a}, {7, a}, {7, a}, {7, a}}));
    CHECK(h == std::map<std::uint64_t, std::size_t>{{7, 4}});
}

TEST_CASE("histogram and script-count invariants on random transactions") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        ResolvedTransaction tx = gen_negative(seed);

        std::size_t total = 0;
        for (const auto& [value, count] : output_value_histogram(tx)) total += count;
        CHECK(total == tx.outputs.size());

        CHECK(distinct_output_scripts(tx) <= tx.outputs.size());
        CHECK(distinct_input_scripts(tx) <= tx.inputs.size());
    }
}
