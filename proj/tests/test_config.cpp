#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "cjscan/config.hpp"

using namespace cjscan;

TEST_CASE("default parameters") {
    DetectorConfig cfg = default_config();
    CHECK(cfg.wasabi_epsilon == 2'000'000);
    CHECK(cfg.wasabi1_a_max == 7);
    CHECK(cfg.wasabi11_max_level == 10);
    CHECK(cfg.wasabi2_a_max == 10);
    CHECK(cfg.wasabi2_target_p == 50);
    CHECK(cfg.wasabi2_v_min == 5'000);
    CHECK(cfg.whirlpool_a_max == 70);
    CHECK(cfg.eta1 == 0.5);
    CHECK(cfg.eta2 == 3.0);
    CHECK(cfg.epsilon_min == 100);
    CHECK(cfg.epsilon_max == 100'000);

    REQUIRE(cfg.whirlpool_pools.size() == 4);
    CHECK(cfg.whirlpool_pools[0] == WhirlpoolPool{100'000, 5'000});
    CHECK(cfg.whirlpool_pools[1] == WhirlpoolPool{1'000'000, 50'000});
    CHECK(cfg.whirlpool_pools[2] == WhirlpoolPool{5'000'000, 175'000});
    CHECK(cfg.whirlpool_pools[3] == WhirlpoolPool{50'000'000, 1'750'000});
}

TEST_CASE("default denomination family") {
    auto denoms = default_wasabi2_denominations(5'000);

    auto has = [&](std::uint64_t v) {
        return std::binary_search(denoms.begin(), denoms.end(), v);
    };
    CHECK(has(8'192));          // 2^13
    CHECK(has(6'561));          // 3^8
    CHECK(has(13'122));         // 2 * 3^8
    CHECK(has(10'000));         // 10^4
    CHECK(has(20'000));         // 2 * 10^4
    CHECK(has(50'000));         // 5 * 10^4
    CHECK(has(1'000'000'000'000'000));  // 10^15, still below max money

    CHECK_FALSE(has(4'096));    // below v_min
    CHECK_FALSE(has(3'000));
    CHECK_FALSE(has(7'000));    // not in any family

    CHECK(std::is_sorted(denoms.begin(), denoms.end()));
    CHECK(std::adjacent_find(denoms.begin(), denoms.end()) == denoms.end());
    CHECK(denoms.front() >= 5'000);
    CHECK(denoms.back() <= kMaxMoney);
}

TEST_CASE("render and parse round-trip") {
    DetectorConfig cfg = default_config();
    cfg.wasabi_epsilon = 1'500'000;
    cfg.whirlpool_pools = {{250'000, 10'000}, {750'000, 30'000}};
    cfg.eta1 = 0.25;
    cfg = finalize(cfg);

    std::istringstream in(render_config(cfg));
    DetectorConfig parsed = parse_config(in);

    CHECK(parsed.wasabi_epsilon == cfg.wasabi_epsilon);
    CHECK(parsed.wasabi1_a_max == cfg.wasabi1_a_max);
    CHECK(parsed.wasabi11_max_level == cfg.wasabi11_max_level);
    CHECK(parsed.wasabi2_a_max == cfg.wasabi2_a_max);
    CHECK(parsed.wasabi2_target_p == cfg.wasabi2_target_p);
    CHECK(parsed.wasabi2_v_min == cfg.wasabi2_v_min);
    CHECK(parsed.wasabi2_denoms == cfg.wasabi2_denoms);
    CHECK(parsed.whirlpool_pools == cfg.whirlpool_pools);
    CHECK(parsed.whirlpool_a_max == cfg.whirlpool_a_max);
    CHECK(parsed.eta1 == cfg.eta1);
    CHECK(parsed.eta2 == cfg.eta2);
    CHECK(parsed.epsilon_min == cfg.epsilon_min);
    CHECK(parsed.epsilon_max == cfg.epsilon_max);
}

TEST_CASE("comments, blanks and overrides") {
    std::istringstream in(
        "# a comment\n"
        "\n"
        "wasabi_epsilon = 1000000   # trailing comment\n"
        "whirlpool_pools = 100000:5000\n");
    DetectorConfig cfg = parse_config(in);
    CHECK(cfg.wasabi_epsilon == 1'000'000);
    REQUIRE(cfg.whirlpool_pools.size() == 1);
    CHECK(cfg.whirlpool_pools[0].denomination == 100'000);
}

TEST_CASE("config errors") {
    auto parse = [](const char* text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    CHECK_THROWS_AS(parse("no_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("wasabi_epsilon\n"), ConfigError);
    CHECK_THROWS_AS(parse("wasabi_epsilon = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse("whirlpool_pools = 100000\n"), ConfigError);
    CHECK_THROWS_AS(parse("whirlpool_pools = 100000:1,100000:2\n"), ConfigError);
    CHECK_THROWS_AS(parse("eta1 = 2.0\n"), ConfigError);            // eta1 > 1
    CHECK_THROWS_AS(parse("eta2 = 0.9\n"), ConfigError);            // eta2 < 1
    CHECK_THROWS_AS(parse("epsilon_min = 5\nepsilon_max = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse("wasabi2_denoms = 10,9\n"), ConfigError);  // not ascending
    CHECK_THROWS_AS(parse("wasabi2_denoms = 10000,10000\n"), ConfigError);
    CHECK_THROWS_AS(parse("wasabi2_denoms = 100\n"), ConfigError);   // below v_min
    CHECK_THROWS_AS(load_config("/nonexistent/cjscan.conf"), ConfigError);
}

TEST_CASE("v_min clips the generated family") {
    auto denoms = default_wasabi2_denominations(100'000);
    CHECK(denoms.front() >= 100'000);
    CHECK(std::binary_search(denoms.begin(), denoms.end(), 100'000));
    CHECK_FALSE(std::binary_search(denoms.begin(), denoms.end(), 50'000));
}
