#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "travelsim/plan.hpp"
#include "travelsim/trajectory.hpp"

using namespace travelsim;
using nlohmann::json;

namespace {

json three_day_doc() {
    return json::parse(R"({
      "city": "Beijing",
      "days": 3,
      "hotel": "hotel_main",
      "origin_terminal": "station_west",
      "traveler_ref": "elderly_couple",
      "entries": [
        {"day": 1, "start_time": "10:00", "location": "West Station", "activity": "transit"},
        {"day": 1, "start_time": "11:00", "end_time": "12:00", "location": "Hotel", "activity": "rest"},
        {"day": 1, "start_time": "12:30", "end_time": "13:30", "location": "Duck House", "activity": "dine"},
        {"day": 2, "start_time": "09:00", "location": "Hotel", "activity": "rest"},
        {"day": 2, "start_time": "10:00", "end_time": "12:00", "location": "Old Palace", "activity": "sightsee", "guidance": "go early"},
        {"day": 2, "start_time": "19:00", "location": "Hotel", "activity": "rest"},
        {"day": 3, "start_time": "09:00", "location": "Hotel", "activity": "rest"},
        {"day": 3, "start_time": "12:00", "location": "West Station", "activity": "transit"}
      ]
    })");
}

PoiIndex mini_index() {
    std::vector<POI> pois{
        {"station_west", "West Station", {39.9, 116.3}, PoiCategory::station, {}},
        {"hotel_main", "Hotel", {39.91, 116.35}, PoiCategory::hotel, {}},
        {"poi_palace", "Old Palace", {39.92, 116.4}, PoiCategory::attraction, {}},
        {"rest_duck", "Duck House", {39.905, 116.36}, PoiCategory::restaurant, {}},
    };
    return PoiIndex(std::move(pois));
}

}  // namespace

TEST_CASE("well-formed document round trips") {
    const Plan plan = parse_plan(three_day_doc());
    CHECK(plan.days == 3);
    CHECK(plan.entries.size() == 8);
    for (size_t i = 1; i < plan.entries.size(); ++i) {
        const auto& a = plan.entries[i - 1];
        const auto& b = plan.entries[i];
        CHECK((a.day < b.day || (a.day == b.day && a.start_time <= b.start_time)));
    }
    // parse(serialize(plan)) == plan
    const Plan again = parse_plan(serialize_plan(plan));
    CHECK(serialize_plan(again) == serialize_plan(plan));
}

TEST_CASE("entries arrive sorted even when the document is shuffled") {
    json doc = three_day_doc();
    std::mt19937_64 rng(13);
    for (int round = 0; round < 20; ++round) {
        std::shuffle(doc["entries"].begin(), doc["entries"].end(), rng);
        const Plan plan = parse_plan(doc);
        CHECK(serialize_plan(plan) == serialize_plan(parse_plan(three_day_doc())));
    }
}

TEST_CASE("schema violations name the offending field") {
    json doc = three_day_doc();
    doc["entries"][1]["end_time"] = "10:30";  // precedes 11:00 start
    CHECK_THROWS_WITH_AS(parse_plan(doc), doctest::Contains("end_time"), ParseError);

    doc = three_day_doc();
    doc.erase("city");
    CHECK_THROWS_WITH_AS(parse_plan(doc), doctest::Contains("city"), ParseError);

    doc = three_day_doc();
    doc["days"] = 5;  // entries span 3 days
    CHECK_THROWS_WITH_AS(parse_plan(doc), doctest::Contains("days"), ParseError);

    doc = three_day_doc();
    doc["entries"][0]["start_time"] = "24:00";
    CHECK_THROWS_AS(parse_plan(doc), ParseError);

    doc = three_day_doc();
    doc["entries"][0]["activity"] = "swim";
    CHECK_THROWS_AS(parse_plan(doc), ArgumentError);
}

TEST_CASE("poi resolution is enforced when an index is supplied") {
    const PoiIndex index = mini_index();
    CHECK_NOTHROW(parse_plan(three_day_doc(), &index));

    json doc = three_day_doc();
    doc["hotel"] = "hotel_unknown";
    CHECK_THROWS_AS(parse_plan(doc, &index), ReferenceError);
}

TEST_CASE("validate_plan structural criteria") {
    const PoiIndex index = mini_index();
    const Plan good = parse_plan(three_day_doc(), &index);
    CHECK(validate_plan(good, {}, &index).all_passed());

    // day 2 ends at a restaurant: hotel anchoring fails
    json doc = three_day_doc();
    doc["entries"][5] = {{"day", 2},
                         {"start_time", "19:00"},
                         {"location", "Duck House"},
                         {"activity", "dine"}};
    const ValidationReport r1 = validate_plan(parse_plan(doc, &index), {}, &index);
    CHECK_FALSE(r1.find("hotel_anchoring")->passed);
    CHECK(r1.find("terminal_anchoring")->passed);

    // missing guidance on the sightseeing entry
    doc = three_day_doc();
    doc["entries"][4].erase("guidance");
    const ValidationReport r2 = validate_plan(parse_plan(doc, &index), {}, &index);
    CHECK_FALSE(r2.find("guidance_format")->passed);
    CHECK(r2.find("hotel_anchoring")->passed);

    // journey ending away from the terminal
    doc = three_day_doc();
    doc["entries"][7]["location"] = "Hotel";
    const ValidationReport r3 = validate_plan(parse_plan(doc, &index), {}, &index);
    CHECK_FALSE(r3.find("terminal_anchoring")->passed);
}

TEST_CASE("validate_plan is pure") {
    const PoiIndex index = mini_index();
    const Plan plan = parse_plan(three_day_doc(), &index);
    const ValidationReport a = validate_plan(plan, {}, &index);
    const ValidationReport b = validate_plan(plan, {}, &index);
    REQUIRE(a.checks.size() == b.checks.size());
    for (size_t i = 0; i < a.checks.size(); ++i) {
        CHECK(a.checks[i].passed == b.checks[i].passed);
        CHECK(a.checks[i].detail == b.checks[i].detail);
    }
}

TEST_CASE("planned trajectory extraction") {
    json doc{{"city", "X"},    {"days", 1},
             {"hotel", "h"},   {"origin_terminal", "t"},
             {"traveler_ref", "p"},
             {"entries", json::array({json{{"day", 1},
                                           {"start_time", "10:00"},
                                           {"location", "A"},
                                           {"activity", "sightsee"}},
                                      json{{"day", 1},
                                           {"start_time", "12:00"},
                                           {"location", "B"},
                                           {"activity", "sightsee"}}})}};
    const auto days = extract_planned_trajectory(parse_plan(doc));
    REQUIRE(days.size() == 1);
    REQUIRE(days[0].items.size() == 2);
    CHECK(days[0].items[0].time == 600);
    CHECK(days[0].items[0].location == "a");
    CHECK(days[0].items[1].time == 720);
    CHECK(days[0].items[1].location == "b");

    const auto multi = extract_planned_trajectory(parse_plan(three_day_doc()));
    CHECK(multi.size() == 3);

    // consecutive entries at one place collapse to the first time
    json stay = doc;
    stay["entries"].push_back(
        json{{"day", 1}, {"start_time", "13:00"}, {"location", "b"}, {"activity", "dine"}});
    const auto collapsed = extract_planned_trajectory(parse_plan(stay));
    CHECK(collapsed[0].items.size() == 2);
    CHECK(collapsed[0].items[1].time == 720);
}

TEST_CASE("trajectory items are sorted and bounded by entry count") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> day_count(1, 4), per_day(1, 6), minute(0, 1439);
    const char* names[] = {"a", "b", "c"};
    for (int round = 0; round < 200; ++round) {
        Plan plan;
        plan.days = day_count(rng);
        for (int d = 1; d <= plan.days; ++d) {
            std::vector<int> times;
            for (int i = 0, n = per_day(rng); i < n; ++i) times.push_back(minute(rng));
            std::sort(times.begin(), times.end());
            for (int t : times)
                plan.entries.push_back(PlanEntry{d, t, {}, names[rng() % 3], Activity::rest, ""});
        }
        const auto days = extract_planned_trajectory(plan);
        size_t total = 0;
        for (const auto& day : days) {
            total += day.items.size();
            for (size_t i = 1; i < day.items.size(); ++i)
                CHECK(day.items[i - 1].time <= day.items[i].time);
        }
        CHECK(total <= plan.entries.size());
    }
}

TEST_CASE("case-study fixture: arrival entry and planned trajectory") {
    std::ifstream in(std::string(TRAVELSIM_FIXTURE_DIR) + "/beijing-mini/appg_plan.json");
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    const Plan plan = parse_plan_text(buf.str());

    // the journey opens with the 10:00 arrival at Beijing West Railway Station
    REQUIRE(!plan.entries.empty());
    CHECK(plan.entries.front().day == 1);
    CHECK(plan.entries.front().start_time == 600);
    CHECK(normalize_place(plan.entries.front().location) ==
          "beijing west railway station");

    const auto days = extract_planned_trajectory(plan);
    REQUIRE(!days.empty());
    REQUIRE(!days[0].items.empty());
    CHECK(days[0].items[0].time == 600);
    CHECK(days[0].items[0].location == "beijing west railway station");
}

TEST_CASE("normalize_place folds case and whitespace") {
    CHECK(normalize_place("  Beijing   West   Railway Station ") ==
          "beijing west railway station");
    CHECK(normalize_place("HOTEL") == "hotel");
    CHECK(normalize_place("") == "");
}
