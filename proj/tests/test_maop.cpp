#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "travelsim/adapters.hpp"
#include "travelsim/maop.hpp"

using namespace travelsim;
using namespace travelsim::maop;
using adapters::ReplayChatClient;

namespace {

ContextDocument small_context() {
    return assemble_context(
        "an elderly couple, slow pace", "Lotus Courtyard Hotel at (39.9, 116.37)",
        {{"Shichahai", "lakes and hutongs"}},
        {spatial::RouteResult{{"Hotel", "Shichahai", "Hotel"}, 7.4, {3.7, 3.7}}},
        {spatial::BearingResult{"cluster 0", "NE", 3.7, 40.0}});
}

std::string aspects_response(std::initializer_list<std::pair<const char*, const char*>> aspects) {
    std::ostringstream out;
    out << "Some prose first.\n```aspects\n";
    int i = 1;
    for (const auto& [title, guidance] : aspects)
        out << i++ << ". " << title << " :: " << guidance << "\n";
    out << "```\n";
    return out.str();
}

std::string blueprint_response(int count, int max_source) {
    std::ostringstream out;
    out << "```blueprint\n";
    for (int i = 1; i <= count; ++i)
        out << i << ". Merged aspect " << i << " :: do the analysis " << i
            << " :: sources=" << (1 + (i - 1) % max_source) << "\n";
    out << "```\n";
    return out.str();
}

const char* kValidPlanResponse = R"(Final integration done.
```json
{
  "city": "Beijing",
  "days": 1,
  "hotel": "Hotel",
  "origin_terminal": "Station",
  "traveler_ref": "couple",
  "entries": [
    {"day": 1, "start_time": "10:00", "location": "Station", "activity": "transit"},
    {"day": 1, "start_time": "12:00", "end_time": "13:00", "location": "Noodles", "activity": "dine"},
    {"day": 1, "start_time": "13:30", "end_time": "15:00", "location": "Shichahai", "activity": "sightsee", "guidance": "walk the lakes"},
    {"day": 1, "start_time": "18:00", "end_time": "19:00", "location": "Noodles", "activity": "dine"},
    {"day": 1, "start_time": "20:00", "location": "Station", "activity": "transit"}
  ]
}
```)";

}  // namespace

TEST_CASE("context document renders five sections deterministically") {
    const ContextDocument doc = small_context();
    const std::string text = doc.render();
    CHECK(text.find("## Traveler Profile & Preferences") != std::string::npos);
    CHECK(text.find("## Hotel Information") != std::string::npos);
    CHECK(text.find("## POI Blog Posts") != std::string::npos);
    CHECK(text.find("## Intra-Cluster Routes") != std::string::npos);
    CHECK(text.find("## Inter-Cluster Directions") != std::string::npos);
    // section order is fixed
    CHECK(text.find("## Hotel Information") < text.find("## POI Blog Posts"));
    // byte-identical on re-render
    CHECK(small_context().render() == text);

    const ContextDocument empty = assemble_context("", "", {}, {}, {});
    CHECK(empty.render().find("(none provided)") != std::string::npos);
}

TEST_CASE("decompose unions samples and deduplicates titles") {
    PipelineConfig config;
    config.n_samples = 2;
    ReplayChatClient client({
        aspects_response({{"Budget", "watch spend"}, {"Pace", "slow"}, {"Food", "local"}}),
        aspects_response({{"pace", "slower"}, {"Weather", "check rain"}, {"Crowds", "go early"}}),
    });
    const auto aspects = decompose(small_context(), "plan a trip", client, config);
    REQUIRE(aspects.size() == 5);  // "pace" collapses into "Pace"
    CHECK(aspects[0].aspect == "Budget");
    CHECK(aspects[1].aspect == "Pace");
    CHECK(aspects[1].sample_id == 0);
    CHECK(aspects[4].aspect == "Crowds");
    CHECK(config.warnings.empty());
}

TEST_CASE("decompose: single sample, prose-only sample, all-unparseable") {
    PipelineConfig one;
    one.n_samples = 1;
    ReplayChatClient single(
        {aspects_response({{"A", "a"}, {"B", "b"}, {"C", "c"}, {"D", "d"}})});
    CHECK(decompose(small_context(), "r", single, one).size() == 4);

    PipelineConfig two;
    two.n_samples = 2;
    ReplayChatClient mixed({"pure prose with no markers",
                            aspects_response({{"A", "a"}})});
    const auto aspects = decompose(small_context(), "r", mixed, two);
    CHECK(aspects.size() == 1);
    REQUIRE(two.warnings.size() == 1);
    CHECK(two.warnings[0].find("sample 0") != std::string::npos);

    PipelineConfig broken;
    broken.n_samples = 2;
    ReplayChatClient junk({"nothing", "still nothing"});
    CHECK_THROWS_AS(decompose(small_context(), "r", junk, broken), PipelineError);
}

TEST_CASE("route merges, keeps provenance cover, enforces the cap") {
    std::vector<AspectGuidance> raw;
    for (int i = 1; i <= 12; ++i)
        raw.push_back({"Raw " + std::to_string(i), "guidance " + std::to_string(i), 0});

    PipelineConfig config;  // max_aspects 8
    ReplayChatClient merge_client({blueprint_response(6, 12)});
    const Blueprint merged = route(raw, merge_client, config);
    CHECK(merged.aspects.size() == 6);
    for (const auto& a : merged.aspects) {
        const auto& sources = merged.provenance.at(a.aspect);
        CHECK(!sources.empty());
        for (const auto& s : sources) {
            const bool known = std::any_of(raw.begin(), raw.end(), [&](const AspectGuidance& r) {
                return r.aspect == s;
            });
            CHECK(known);
        }
    }

    // a 10-aspect response is truncated to the cap with a warning
    ReplayChatClient overlong_client({blueprint_response(10, 12)});
    PipelineConfig capped;
    const Blueprint truncated = route(raw, overlong_client, capped);
    CHECK(truncated.aspects.size() == 8);
    REQUIRE(capped.warnings.size() == 1);
    CHECK(capped.warnings[0].find("truncated") != std::string::npos);

    // passthrough of three aspects keeps the given order
    std::vector<AspectGuidance> three{{"One", "g1", 0}, {"Two", "g2", 0}, {"Three", "g3", 0}};
    ReplayChatClient pass_client({"```blueprint\n1. One :: g1 :: sources=1\n"
                                  "2. Two :: g2 :: sources=2\n3. Three :: g3 :: sources=3\n```"});
    PipelineConfig pc;
    const Blueprint pass = route(three, pass_client, pc);
    REQUIRE(pass.aspects.size() == 3);
    CHECK(pass.aspects[0].aspect == "One");
    CHECK(pass.aspects[2].aspect == "Three");

    CHECK_THROWS_AS(route({}, pass_client, pc), ArgumentError);
    ReplayChatClient no_block({"no blueprint here"});
    CHECK_THROWS_AS(route(three, no_block, pc), PipelineError);
}

TEST_CASE("blueprint length never exceeds the cap for any client behavior") {
    std::vector<AspectGuidance> raw;
    for (int i = 1; i <= 20; ++i) raw.push_back({"R" + std::to_string(i), "g", 0});
    for (int n : {1, 4, 8, 9, 15, 20}) {
        PipelineConfig config;
        ReplayChatClient client({blueprint_response(n, 20)});
        const Blueprint bp = route(raw, client, config);
        CHECK(static_cast<int>(bp.aspects.size()) <= config.max_aspects);
    }
}

TEST_CASE("plan_maop: one turn per aspect plus the formatting turn") {
    Blueprint bp;
    bp.aspects = {{"Pace", "slow", 0}, {"Food", "local", 0}, {"Route", "short", 0}};
    for (const auto& a : bp.aspects) bp.provenance[a.aspect] = {a.aspect};

    ReplayChatClient client({"pace analysis", "food analysis", "route analysis",
                             kValidPlanResponse});
    PipelineConfig config;
    const PlanningOutcome out = plan_maop(bp, small_context(), client, config);

    CHECK(out.transcript.planner_turns() == 4);  // |blueprint| + 1
    CHECK(out.plan.days == 1);
    CHECK(out.plan.city == "Beijing");
    CHECK(validate_plan(out.plan).all_passed());
    CHECK(client.consumed() == 4);

    // dialogue shares history: the last request carries every prior turn
    const auto& last_request = client.requests().back();
    CHECK(last_request.size() == 1 + 2 * 3 + 1);  // system + 3 user/assistant pairs + format turn
}

TEST_CASE("plan_maop retries once on a malformed plan, then errors with transcript") {
    Blueprint bp;
    bp.aspects = {{"Pace", "slow", 0}};
    bp.provenance["Pace"] = {"Pace"};

    // first format answer malformed, retry succeeds
    ReplayChatClient retry_client({"analysis", "not a plan at all", kValidPlanResponse});
    PipelineConfig config;
    const PlanningOutcome out = plan_maop(bp, small_context(), retry_client, config);
    CHECK(out.plan.days == 1);
    CHECK(retry_client.consumed() == 3);
    CHECK(!config.warnings.empty());

    // malformed twice: PipelineError carrying the transcript
    ReplayChatClient broken_client({"analysis", "garbage", "more garbage"});
    PipelineConfig broken;
    try {
        plan_maop(bp, small_context(), broken_client, broken);
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(std::string(e.what()).find("transcript") != std::string::npos);
        CHECK(std::string(e.what()).find("garbage") != std::string::npos);
    }
}

TEST_CASE("plan_naive_wide: independent calls plus one synthesis") {
    std::vector<AspectGuidance> aspects;
    for (int i = 0; i < 5; ++i) aspects.push_back({"A" + std::to_string(i), "g", 0});

    ReplayChatClient client({"a0", "a1", "a2", "a3", "a4", kValidPlanResponse});
    PipelineConfig config;
    const PlanningOutcome out = plan_naive_wide(small_context(), aspects, client, config);
    CHECK(client.consumed() == 6);  // 5 independent + 1 synthesis
    CHECK(out.plan.days == 1);

    // every aspect call is single-turn: no shared history
    for (size_t i = 0; i < 5; ++i) CHECK(client.requests()[i].size() == 1);

    CHECK_THROWS_AS(plan_naive_wide(small_context(), {}, client, config), ArgumentError);

    // one aspect degenerates to analysis + synthesis
    ReplayChatClient degenerate({"a0", kValidPlanResponse});
    PipelineConfig dc;
    plan_naive_wide(small_context(), {aspects[0]}, degenerate, dc);
    CHECK(degenerate.consumed() == 2);
}

TEST_CASE("plan_long_horizon: a single call, empty guidance allowed") {
    ReplayChatClient client({kValidPlanResponse});
    PipelineConfig config;
    const PlanningOutcome out = plan_long_horizon(small_context(), "", client, config);
    CHECK(client.consumed() == 1);
    CHECK(out.plan.days == 1);

    ReplayChatClient failing({"junk", "junk again"});
    PipelineConfig fc;
    CHECK_THROWS_AS(plan_long_horizon(small_context(), "g", failing, fc), PipelineError);
}

TEST_CASE("fixture pipeline is deterministic end to end") {
    auto run = [] {
        PipelineConfig config;
        config.n_samples = 2;
        ReplayChatClient client({
            aspects_response({{"Budget", "watch"}, {"Pace", "slow"}}),
            aspects_response({{"Food", "local"}}),
            "```blueprint\n1. Plan shape :: merge all three :: sources=1,2,3\n```",
            "analysis",
            kValidPlanResponse,
        });
        const auto aspects = decompose(small_context(), "request", client, config);
        const Blueprint bp = route(aspects, client, config);
        const PlanningOutcome out = plan_maop(bp, small_context(), client, config);
        return serialize_plan(out.plan).dump() + out.transcript.to_json().dump();
    };
    CHECK(run() == run());
}

TEST_CASE("naive_wide plan is independent of aspect order") {
    std::vector<AspectGuidance> aspects{{"Pace", "slow", 0}, {"Food", "local", 0},
                                        {"Route", "short", 0}};
    auto run = [&](const std::vector<AspectGuidance>& order) {
        // the fixture answers the same regardless of which aspect asks
        ReplayChatClient client({"analysis", "analysis", "analysis", kValidPlanResponse});
        PipelineConfig config;
        return serialize_plan(plan_naive_wide(small_context(), order, client, config).plan);
    };
    std::vector<AspectGuidance> reversed(aspects.rbegin(), aspects.rend());
    CHECK(run(aspects) == run(reversed));
}

TEST_CASE("transcript turns carry approximate token counts") {
    Blueprint bp;
    bp.aspects = {{"Pace", "slow", 0}};
    bp.provenance["Pace"] = {"Pace"};
    ReplayChatClient client({"three words here", kValidPlanResponse});
    PipelineConfig config;
    const auto outcome = plan_maop(bp, small_context(), client, config);
    bool saw_counted_turn = false;
    for (const auto& t : outcome.transcript.turns) {
        if (t.content == "three words here") {
            CHECK(t.approx_tokens == 3);
            saw_counted_turn = true;
        }
        CHECK(t.approx_tokens > 0);
    }
    CHECK(saw_counted_turn);
}

TEST_CASE("aspect block parser tolerates noise lines") {
    const auto aspects = parse_aspect_block(
        "```aspects\nheader line without number\n1. Pace :: slow\nnot numbered\n"
        "2. Food :: local :: extra field ignored? kept as guidance split\n```",
        3);
    REQUIRE(aspects.size() == 2);
    CHECK(aspects[0].aspect == "Pace");
    CHECK(aspects[0].sample_id == 3);
    CHECK(aspects[1].guidance == "local");
    CHECK(parse_aspect_block("no fence", 0).empty());
}

TEST_CASE("json block extraction") {
    CHECK(extract_json_block("```json\n{\"a\": 1}\n```").has_value());
    CHECK(extract_json_block("prose {\"a\": 1} trailing").has_value());
    CHECK_FALSE(extract_json_block("no braces at all").has_value());
}
