#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "schedopt/instance.hpp"

using namespace schedopt;
using schedopt::testing::ti1_document;

TEST_CASE("first-week mapping", "[instance]") {
    const Horizon one_week = make_horizon(672, 96);
    CHECK(map_to_first_week(1, one_week) == 1);

    const Horizon two_weeks{1344, 96, 672};
    CHECK(map_to_first_week(673, two_weeks) == 1);
    CHECK(map_to_first_week(1344, two_weeks) == 672); // ((1344-1) mod 672) + 1

    CHECK_THROWS_AS(map_to_first_week(0, one_week), std::out_of_range);
    CHECK_THROWS_AS(map_to_first_week(673, one_week), std::out_of_range);
}

TEST_CASE("first-week mapping is idempotent and periodic", "[instance]") {
    const Horizon h{1344, 96, 672};
    for (int t = 1; t <= h.T; ++t) {
        const int m = map_to_first_week(t, h);
        CHECK(m >= 1);
        CHECK(m <= h.W);
        CHECK(map_to_first_week(m, h) == m);
        if (t + h.W <= h.T)
            CHECK(map_to_first_week(t + h.W, h) == m);
    }
}

TEST_CASE("parser rejects a horizon that is not whole weeks", "[instance]") {
    // minimal document: horizon 8 4 gives W = 28, and 8 is not a multiple
    const std::string text = "horizon 8 4\nrooms 1 1\n"
                             "battery b1 4 2 4 1\n"
                             "activity a1 onceoff 2 1 0 2 50 10\n"
                             "starts a1 1 5\n"
                             "price 1 100\nprice 2 100\nprice 3 100\nprice 4 100\n"
                             "price 5 100\nprice 6 100\nprice 7 100\nprice 8 100\n";
    CHECK_THROWS_WITH(parse_instance(text), Catch::Matchers::ContainsSubstring("whole weeks"));
}

TEST_CASE("parser rejects efficiency outside (0,1]", "[instance]") {
    std::string text = ti1_document();
    const std::string needle = "battery b1 4 2 4 1";
    text.replace(text.find(needle), needle.size(), "battery b1 4 2 4 1.2");
    CHECK_THROWS_WITH(parse_instance(text), Catch::Matchers::ContainsSubstring("efficiency"));
}

TEST_CASE("parser is strict about unknown directives", "[instance]") {
    CHECK_THROWS_AS(parse_instance("horizon 672 96\nrooms 1 1\nfrobnicate x\n"), ParseError);
    try {
        parse_instance("horizon 672 96\nrooms 1 1\n# fine\nnonsense 1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("parser demands all price lines", "[instance]") {
    std::string text = "horizon 672 96\nrooms 1 1\n";
    for (int t = 1; t <= 671; ++t)
        text += "price " + std::to_string(t) + " 100\n";
    CHECK_THROWS_WITH(parse_instance(text),
                      Catch::Matchers::ContainsSubstring("expected 672 price lines"));
}

TEST_CASE("TI-1 round-trips bit-exactly", "[instance]") {
    const Instance parsed = parse_instance(ti1_document());
    CHECK(parsed.horizon.T == 672);
    CHECK(parsed.horizon.D == 96);
    CHECK(parsed.horizon.W == 672);
    CHECK(parsed.batteries.size() == 1);
    CHECK(parsed.activities.size() == 1);
    CHECK(parsed.activities[0].allowed_starts == std::vector<int>{1, 5});
    CHECK(parsed.activities[0].penalized_starts == std::vector<int>{5});
    CHECK(parsed.activities[0].revenue == 50.0);

    const std::string canonical = serialize_instance(parsed);
    const Instance reparsed = parse_instance(canonical);
    CHECK(serialize_instance(reparsed) == canonical); // parse . serialize = identity
    CHECK(reparsed.batteries[0].capacity_kwh == parsed.batteries[0].capacity_kwh);
    CHECK(reparsed.prices == parsed.prices);
}

TEST_CASE("round-trip preserves awkward doubles", "[instance]") {
    Instance instance = parse_instance(ti1_document());
    instance.batteries[0].efficiency = 0.8999999999999999;
    instance.prices[3] = 0.1 + 0.2; // 0.30000000000000004
    const Instance reparsed = parse_instance(serialize_instance(instance));
    CHECK(reparsed.batteries[0].efficiency == instance.batteries[0].efficiency);
    CHECK(reparsed.prices[3] == instance.prices[3]);
}

TEST_CASE("validate_instance on a valid instance", "[instance]") {
    const Instance instance = parse_instance(ti1_document());
    CHECK(validate_instance(instance).empty());
}

TEST_CASE("validate_instance flags a precedence cycle", "[instance]") {
    Instance instance = parse_instance(ti1_document());
    Activity b = instance.activities[0];
    b.id = "a2";
    b.penalized_starts.clear();
    instance.activities.push_back(b);
    instance.activities[0].prerequisites = {"a2"};
    instance.activities[1].prerequisites = {"a1"};
    const auto diagnostics = validate_instance(instance);
    REQUIRE_FALSE(diagnostics.empty());
    bool found = false;
    for (const auto& d : diagnostics)
        found = found || d.message.find("precedence cycle") != std::string::npos;
    CHECK(found);
    // an instance with error diagnostics never parses back
    CHECK_THROWS_AS(parse_instance(serialize_instance(instance)), ParseError);
}

TEST_CASE("validate_instance flags penalized starts outside allowed starts", "[instance]") {
    Instance instance = parse_instance(ti1_document());
    instance.activities[0].penalized_starts = {9}; // not in {1,5}
    const auto diagnostics = validate_instance(instance);
    REQUIRE_FALSE(diagnostics.empty());
    CHECK(diagnostics[0].message ==
          "penalized starts not subset of allowed starts");
}

TEST_CASE("validate_instance flags dangling prerequisites", "[instance]") {
    Instance instance = parse_instance(ti1_document());
    instance.activities[0].prerequisites = {"ghost"};
    const auto diagnostics = validate_instance(instance);
    REQUIRE_FALSE(diagnostics.empty());
    CHECK(diagnostics[0].message.find("dangling prerequisite") != std::string::npos);
}

TEST_CASE("mixed-kind precedence is a warning, not an error", "[instance]") {
    Instance instance = parse_instance(ti1_document());
    Activity rec;
    rec.id = "r1";
    rec.kind = ActivityKind::Recurring;
    rec.duration = 1;
    rec.load_per_room_kw = 1.0;
    rec.small_rooms = 1;
    rec.allowed_starts = {600};
    instance.activities.push_back(rec);
    instance.activities[0].prerequisites = {"r1"};
    const auto diagnostics = validate_instance(instance);
    REQUIRE(diagnostics.size() == 1);
    CHECK(diagnostics[0].severity == Severity::Warning);
    CHECK_FALSE(has_errors(diagnostics));
    CHECK_NOTHROW(parse_instance(serialize_instance(instance)));
}

TEST_CASE("recurring starts must fit inside the first week", "[instance]") {
    Instance instance = parse_instance(ti1_document());
    Activity rec;
    rec.id = "r1";
    rec.kind = ActivityKind::Recurring;
    rec.duration = 4;
    rec.allowed_starts = {671}; // 671 + 3 > 672
    instance.activities.push_back(rec);
    CHECK(has_errors(validate_instance(instance)));
}
