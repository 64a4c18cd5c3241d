#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "travelsim/adapters.hpp"
#include "travelsim/plan.hpp"

using namespace travelsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = TRAVELSIM_CLI_PATH;
const std::string kBundle = std::string(TRAVELSIM_FIXTURE_DIR) + "/beijing-mini";

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("travelsim_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& file) { return adapters::read_text_file(file); }

}  // namespace

TEST_CASE("exit codes: usage and input errors map to 2") {
    CHECK(run("preprocess --pois /nonexistent.json --hotel h --days 2") == 2);
    CHECK(run("definitely-not-a-command") == 2);
    CHECK(run("plan --fixture " + kBundle + " --profile elderly_couple --method warp") == 2);
    CHECK(run("plan --fixture " + kBundle +
              " --profile elderly_couple --method naive_wide") == 2);  // aspects missing
    // simulate without a seed
    CHECK(run("simulate --fixture " + kBundle + " --plan " + kBundle +
              "/appg_plan.json --profile elderly_couple --policy echo --out " +
              fresh_dir("noseed").string()) == 2);
}

TEST_CASE("preprocess succeeds and clamps k with a note") {
    const fs::path out = fresh_dir("preprocess");
    CHECK(run("preprocess --pois " + kBundle + "/pois.json --hotel hotel_courtyard --days 3" +
              " --seed 11 --out " + out.string()) == 0);
    const json report = json::parse(slurp(out / "cluster_report.json"));
    CHECK(report.at("k") == 3);
    CHECK(report.at("clusters").size() == 3);
    for (const auto& c : report.at("clusters")) {
        CHECK(!c.at("members").empty());
        CHECK(c.at("route").at("path").front() == "Lotus Courtyard Hotel");
        CHECK(c.at("route").at("path").back() == "Lotus Courtyard Hotel");
    }

    // more days than clusterable POIs: still exit 0, k clamped
    CHECK(run("preprocess --pois " + kBundle + "/pois.json --hotel hotel_courtyard --days 40" +
              " --seed 11 --out " + out.string()) == 0);
    CHECK(json::parse(slurp(out / "cluster_report.json")).at("k") == 10);
}

TEST_CASE("plan with the fixture chat client emits a structurally valid plan") {
    const fs::path out = fresh_dir("plan");
    CHECK(run("plan --fixture " + kBundle +
              " --method maop --profile elderly_couple --days 2 --seed 3 --out " +
              out.string()) == 0);

    const adapters::FixtureBundle bundle = adapters::FixtureBundle::load(kBundle);
    const Plan plan = parse_plan_text(slurp(out / "plan.json"), &bundle.pois());
    CHECK(validate_plan(plan, {}, &bundle.pois()).all_passed());

    const json transcript = json::parse(slurp(out / "transcript.json"));
    CHECK(transcript.at("blueprint").size() <= 8);
    CHECK(transcript.at("method") == "maop");
}

TEST_CASE("baseline planning methods run against their response fixtures") {
    const adapters::FixtureBundle bundle = adapters::FixtureBundle::load(kBundle);

    const fs::path naive_out = fresh_dir("naive");
    CHECK(run("plan --fixture " + kBundle +
              " --method naive_wide --profile elderly_couple --days 2 --aspects " + kBundle +
              "/aspects.json --responses " + kBundle + "/chat_naive.json --seed 3 --out " +
              naive_out.string()) == 0);
    CHECK(validate_plan(parse_plan_text(slurp(naive_out / "plan.json"), &bundle.pois()), {},
                        &bundle.pois())
              .all_passed());

    const fs::path long_out = fresh_dir("long");
    CHECK(run("plan --fixture " + kBundle +
              " --method long_horizon --profile elderly_couple --days 2 --guidance pace" +
              " --responses " + kBundle + "/chat_long.json --seed 3 --out " +
              long_out.string()) == 0);
    CHECK(validate_plan(parse_plan_text(slurp(long_out / "plan.json"), &bundle.pois()), {},
                        &bundle.pois())
              .all_passed());

    // a malformed response file ends in a pipeline failure, exit 3
    const fs::path bad_out = fresh_dir("badplan");
    {
        std::ofstream f(bad_out / "junk.json");
        f << R"({"responses": ["nothing useful", "still nothing"]})";
    }
    CHECK(run("plan --fixture " + kBundle +
              " --method long_horizon --profile elderly_couple --days 2 --responses " +
              (bad_out / "junk.json").string() + " --seed 3 --out " + bad_out.string()) == 3);
}

TEST_CASE("plan is idempotent in fixture mode") {
    const fs::path out1 = fresh_dir("plan1");
    const fs::path out2 = fresh_dir("plan2");
    const std::string base = "plan --fixture " + kBundle +
                             " --method maop --profile elderly_couple --days 2 --seed 3 --out ";
    CHECK(run(base + out1.string()) == 0);
    CHECK(run(base + out2.string()) == 0);
    CHECK(slurp(out1 / "plan.json") == slurp(out2 / "plan.json"));
    CHECK(slurp(out1 / "transcript.json") == slurp(out2 / "transcript.json"));
}

TEST_CASE("simulate matches the golden trace byte for byte") {
    const fs::path out = fresh_dir("simulate");
    const std::string cmd = "simulate --fixture " + kBundle + " --plan " + kBundle +
                            "/appg_plan.json --profile elderly_couple --policy scripted" +
                            " --decisions " + kBundle + "/appg_decisions.json --seed 7 --out " +
                            out.string();
    CHECK(run(cmd) == 0);
    CHECK(slurp(out / "trace.jsonl") == slurp(kBundle + "/golden/appg_trace.jsonl"));
}

TEST_CASE("simulate is deterministic across runs with the same seed") {
    const fs::path out1 = fresh_dir("sim1");
    const fs::path out2 = fresh_dir("sim2");
    const std::string base = "simulate --fixture " + kBundle + " --plan " + kBundle +
                             "/appg_plan.json --profile elderly_couple --policy scripted" +
                             " --decisions " + kBundle + "/appg_decisions.json --seed 42 --out ";
    CHECK(run(base + out1.string()) == 0);
    CHECK(run(base + out2.string()) == 0);
    CHECK(slurp(out1 / "trace.jsonl") == slurp(out2 / "trace.jsonl"));
}

TEST_CASE("aborted simulations exit 4 and keep the partial trace") {
    const fs::path out = fresh_dir("abort");
    const fs::path decisions = out / "bad_decisions.json";
    {
        std::ofstream f(decisions);
        f << R"([{"decision": "rest", "end time": "09:00"}])";  // before arrival
    }
    CHECK(run("simulate --fixture " + kBundle + " --plan " + kBundle +
              "/appg_plan.json --profile elderly_couple --policy scripted --decisions " +
              decisions.string() + " --seed 1 --out " + out.string()) == 4);
    const std::string trace = slurp(out / "trace.jsonl");
    CHECK(trace.find("\"aborted\":true") != std::string::npos);
}

TEST_CASE("score on the golden pair and city mismatch") {
    const fs::path out = fresh_dir("score");
    CHECK(run("score --fixture " + kBundle + " --plan " + kBundle + "/appg_plan.json --trace " +
              kBundle + "/golden/appg_trace.jsonl --out " + out.string()) == 0);
    const json card = json::parse(slurp(out / "scorecard.json"));
    CHECK(card.at("per_agg") == doctest::Approx(70.0));  // constant-70 fixture evaluator
    CHECK(card.at("cpl") == doctest::Approx(75.0));
    CHECK(card.at("fea") == doctest::Approx(71.4285714286));
    CHECK(slurp(out / "report.csv").find("Beijing,elderly_couple") != std::string::npos);

    // a trace from another city is rejected as input error
    std::string other = slurp(kBundle + "/golden/appg_trace.jsonl");
    const std::string needle = "\"city\":\"Beijing\"";
    other.replace(other.find(needle), needle.size(), "\"city\":\"Harbin\"");
    const fs::path other_file = out / "other_trace.jsonl";
    {
        std::ofstream f(other_file);
        f << other;
    }
    CHECK(run("score --fixture " + kBundle + " --plan " + kBundle + "/appg_plan.json --trace " +
              other_file.string() + " --out " + out.string()) == 2);
}

TEST_CASE("echo policy scores TPSS 100 through the file pipeline") {
    const fs::path out = fresh_dir("echo");
    const adapters::FixtureBundle bundle = adapters::FixtureBundle::load(kBundle);
    auto transit = bundle.transit_provider();

    // venue sequence spaced by the bundle's own first-option durations
    struct Stop {
        const char* place;
        Activity activity;
    };
    const std::vector<std::vector<Stop>> days{
        {{"Beijing West Railway Station", Activity::transit},
         {"Lotus Courtyard Hotel", Activity::rest},
         {"Shichahai", Activity::sightsee},
         {"Lotus Courtyard Hotel", Activity::rest}},
        {{"Lotus Courtyard Hotel", Activity::rest},
         {"Beihai Park", Activity::sightsee},
         {"Beijing West Railway Station", Activity::transit}}};

    Plan plan;
    plan.city = "Beijing";
    plan.days = 2;
    plan.hotel = "hotel_courtyard";
    plan.origin_terminal = "station_west";
    plan.traveler_ref = "energetic_single";
    for (size_t d = 0; d < days.size(); ++d) {
        int now = 9 * 60;
        std::string at;
        for (size_t i = 0; i < days[d].size(); ++i) {
            int start = now;
            if (i > 0 && normalize_place(at) != normalize_place(days[d][i].place)) {
                const auto options = transit->query(at, days[d][i].place, now);
                REQUIRE(!options.empty());
                start = now + 10 + options.front().duration_min;
            }
            PlanEntry e;
            e.day = static_cast<int>(d) + 1;
            e.start_time = start;
            e.location = days[d][i].place;
            e.activity = days[d][i].activity;
            if (e.activity != Activity::transit) e.end_time = start + 45;
            if (e.activity == Activity::sightsee) e.guidance = "planned";
            plan.entries.push_back(e);
            now = e.end_time.value_or(start);
            at = days[d][i].place;
        }
    }
    const fs::path plan_file = out / "echo_plan.json";
    adapters::write_text_file(plan_file, serialize_plan(plan).dump(2));

    CHECK(run("simulate --fixture " + kBundle + " --plan " + plan_file.string() +
              " --profile energetic_single --policy echo --seed 5 --out " + out.string()) == 0);
    CHECK(run("score --fixture " + kBundle + " --plan " + plan_file.string() + " --trace " +
              (out / "trace.jsonl").string() + " --out " + out.string()) == 0);
    const json card = json::parse(slurp(out / "scorecard.json"));
    CHECK(card.at("fea") == doctest::Approx(100.0));
}

TEST_CASE("simulate runs multiple plans in parallel with --jobs") {
    const fs::path out = fresh_dir("jobs");
    const fs::path plan_a = out / "a_plan.json";
    const fs::path plan_b = out / "b_plan.json";
    fs::copy(kBundle + "/appg_plan.json", plan_a);
    fs::copy(kBundle + "/appg_plan.json", plan_b);
    CHECK(run("simulate --fixture " + kBundle + " --plan " + plan_a.string() + " --plan " +
              plan_b.string() + " --profile elderly_couple --policy scripted --decisions " +
              kBundle + "/appg_decisions.json --seed 7 --jobs 2 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "a_plan.trace.jsonl"));
    CHECK(fs::exists(out / "b_plan.trace.jsonl"));
}

TEST_CASE("weights override file is applied and validated") {
    const fs::path out = fresh_dir("weights");
    {
        std::ofstream f(out / "weights.json");
        f << R"({"alpha1": 0.5, "alpha2": 0.5, "beta": 0.7, "gamma": 0.3})";
    }
    CHECK(run("score --fixture " + kBundle + " --plan " + kBundle + "/appg_plan.json --trace " +
              kBundle + "/golden/appg_trace.jsonl --weights " + (out / "weights.json").string() +
              " --out " + out.string()) == 0);

    {
        std::ofstream f(out / "weights.json", std::ios::trunc);
        f << R"({"alpha1": 0.9, "alpha2": 0.5})";  // does not sum to 1
    }
    CHECK(run("score --fixture " + kBundle + " --plan " + kBundle + "/appg_plan.json --trace " +
              kBundle + "/golden/appg_trace.jsonl --weights " + (out / "weights.json").string() +
              " --out " + out.string()) == 2);
}
