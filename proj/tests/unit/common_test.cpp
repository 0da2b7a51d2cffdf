#include <doctest.h>

#include <chrono>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "oracles.hpp"
#include "pipegen/common/canonical_json.hpp"
#include "pipegen/common/system.hpp"
#include "pipegen/common/text.hpp"
#include "pipegen/common/units.hpp"

using namespace pipegen;
using nlohmann::json;

TEST_SUITE("common") {

TEST_CASE("durations parse and print") {
    using std::chrono::milliseconds;
    CHECK(parse_duration("250ms") == milliseconds(250));
    CHECK(parse_duration("10s") == milliseconds(10'000));
    CHECK(parse_duration("5m") == milliseconds(300'000));
    CHECK(parse_duration("2h") == milliseconds(7'200'000));
    CHECK(parse_duration("30") == milliseconds(30'000));
    CHECK_THROWS_AS(parse_duration("0s"), std::invalid_argument);
    CHECK_THROWS_AS(parse_duration("ten"), std::invalid_argument);
    CHECK_THROWS_AS(parse_duration(""), std::invalid_argument);
    CHECK(parse_duration(format_duration(milliseconds(30'000))) == milliseconds(30'000));
}

TEST_CASE("sizes parse binary and decimal units") {
    CHECK(parse_size("2000") == 2000);
    CHECK(parse_size("512B") == 512);
    CHECK(parse_size("64KiB") == 64 * 1024);
    CHECK(parse_size("1MiB") == 1024 * 1024);
    CHECK(parse_size("1KB") == 1000);
    CHECK(parse_size("1MB") == 1'000'000);
    CHECK_THROWS(parse_size("lots"));
}

TEST_CASE("target systems round trip case-insensitively") {
    for (auto s : all_systems) CHECK(system_from_string(to_string(s)) == s);
    CHECK(system_from_string("FLINK") == TargetSystem::flink);
    CHECK_THROWS_AS(system_from_string("heron"), std::invalid_argument);
}

TEST_CASE("text helpers") {
    CHECK(text::tokenize("  Hello\tWORLD \n x ") == std::vector<std::string>{"hello", "world", "x"});
    CHECK(text::contains_ci("Apache Flink", "flink"));
    CHECK(text::trim("  a b \n") == "a b");
    CHECK(text::is_valid_utf8("ascii \xC3\xA9"));
    CHECK_FALSE(text::is_valid_utf8("\xC3"));
    CHECK_FALSE(text::is_valid_utf8("\xFF"));
    // 'é' is two bytes; cutting at 2 must not split it.
    CHECK(text::truncate_utf8("a\xC3\xA9", 2) == "a");
    CHECK(text::truncate_utf8("abc", 10) == "abc");
}

TEST_CASE("canonical json sorts keys and ends with a newline") {
    json a = {{"b", 1}, {"a", {{"z", true}, {"y", nullptr}}}};
    auto s = canonical_dump(a);
    CHECK(s.back() == '\n');
    CHECK(s.find("\"a\"") < s.find("\"b\""));
    CHECK(canonical_line(a).find('\n') == std::string::npos);
}

TEST_CASE("canonical json is stable under key insertion order") {
    oracle::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<std::string, int>> kv;
        int n = 1 + static_cast<int>(rng.below(8));
        for (int i = 0; i < n; ++i) kv.emplace_back("k" + std::to_string(rng.below(20)), static_cast<int>(rng.below(100)));
        json forward = json::object();
        for (auto& [k, v] : kv) forward[k] = v;
        json backward = json::object();
        for (auto it = kv.rbegin(); it != kv.rend(); ++it) {
            if (!backward.contains(it->first)) backward[it->first] = forward[it->first];
        }
        CHECK(canonical_dump(forward) == canonical_dump(backward));
        CHECK(json::parse(canonical_dump(forward)) == forward);
    }
}

TEST_CASE("canonical json replaces invalid UTF-8 instead of throwing") {
    json bad = {{"k", std::string("ok \xFF end")}};
    std::string out;
    CHECK_NOTHROW(out = canonical_dump(bad));
    CHECK(text::is_valid_utf8(out));
}

}  // TEST_SUITE
