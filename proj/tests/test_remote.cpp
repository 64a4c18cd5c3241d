#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <thread>

#include <httplib.h>

#include "travelsim/remote.hpp"

using namespace travelsim;
using namespace travelsim::remote;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path scratch_cache(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("travelsim_cache_" + tag);
    fs::remove_all(dir);
    return dir;
}

// Minimal canned HTTP server for adapter tests.
class CannedServer {
  public:
    explicit CannedServer(std::function<void(const httplib::Request&, httplib::Response&)> h) {
        server_.Post("/.*", std::move(h));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~CannedServer() {
        server_.stop();
        thread_.join();
    }
    int port() const { return port_; }

  private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace

TEST_CASE("replay cache round trips values") {
    ReplayCache cache(scratch_cache("roundtrip"));
    CHECK_FALSE(cache.get("transit", "a|b|9").has_value());
    const json value{{"options", json::array({json{{"mode", "taxi"}, {"duration_min", 30},
                                                   {"cost", 2400}}})}};
    cache.put("transit", "a|b|9", value);
    const auto back = cache.get("transit", "a|b|9");
    REQUIRE(back.has_value());
    CHECK(*back == value);
}

TEST_CASE("remote transit adapter records live responses and replays offline") {
    int hits = 0;
    CannedServer server([&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        const json q = json::parse(req.body);
        CHECK(q.at("from") == "A");
        res.set_content(json{{"options",
                              json::array({json{{"mode", "taxi"},
                                                {"duration_min", 25},
                                                {"cost", 1800},
                                                {"description", "canned"}}})}}
                            .dump(),
                        "application/json");
    });

    const fs::path cache_dir = scratch_cache("transit");
    RemoteConfig live;
    live.host = "127.0.0.1";
    live.port = server.port();
    live.path = "/routes";
    live.cache_dir = cache_dir;

    RemoteTransitAdapter adapter(live);
    const auto options = adapter.query("A", "B", 9 * 60);
    REQUIRE(options.size() == 1);
    CHECK(options[0].duration_min == 25);
    CHECK(options[0].cost_minor == 1800);
    CHECK(hits == 1);

    // same hour hits the cache, not the server
    adapter.query("A", "B", 9 * 60 + 30);
    CHECK(hits == 1);

    // replay mode with a failing transport serves identical options offline
    RemoteConfig replay = live;
    replay.replay = true;
    replay.transport = nullptr;  // defaults to the failing transport
    RemoteTransitAdapter offline(replay);
    const auto replayed = offline.query("A", "B", 9 * 60);
    REQUIRE(replayed.size() == 1);
    CHECK(replayed[0].duration_min == 25);

    // an uncached query in replay mode is an environment error, not a network call
    CHECK_THROWS_AS(offline.query("A", "C", 9 * 60), EnvironmentError);
}

TEST_CASE("remote transit adapter rejects malformed payloads") {
    CannedServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content("not json", "text/plain");
    });
    RemoteConfig config;
    config.port = server.port();
    config.path = "/routes";
    config.cache_dir = scratch_cache("transit_bad");
    RemoteTransitAdapter adapter(config);
    CHECK_THROWS_AS(adapter.query("A", "B", 0), ProtocolError);
}

TEST_CASE("remote chat adapter speaks the chat-completions wire format") {
    CannedServer server([](const httplib::Request& req, httplib::Response& res) {
        const json q = json::parse(req.body);
        CHECK(q.at("model") == "test-model");
        CHECK(q.at("messages").size() == 2);
        res.set_content(json{{"choices",
                              json::array({json{{"message",
                                                 {{"content", "hello traveler"},
                                                  {"reasoning_content", "hmm"}}}}})}}
                            .dump(),
                        "application/json");
    });

    RemoteConfig config;
    config.port = server.port();
    config.path = "/v1/chat/completions";
    config.model = "test-model";
    config.cache_dir = scratch_cache("chat");

    RemoteChatAdapter adapter(config);
    const auto response = adapter.complete(
        {{"system", "be brief"}, {"user", "say hi"}}, maop::SamplingParams{});
    CHECK(response.text == "hello traveler");
    CHECK(response.reasoning == "hmm");

    // the transcript is captured: replay works with the server gone
    RemoteConfig replay = config;
    replay.replay = true;
    RemoteChatAdapter offline(replay);
    CHECK(offline.complete({{"system", "be brief"}, {"user", "say hi"}}, maop::SamplingParams{})
              .text == "hello traveler");

    CannedServer broken([](const httplib::Request&, httplib::Response& res) {
        const json payload{{"unexpected", true}};
        res.set_content(payload.dump(), "application/json");
    });
    RemoteConfig bad = config;
    bad.port = broken.port();
    bad.cache_dir = scratch_cache("chat_bad");
    RemoteChatAdapter bad_adapter(bad);
    CHECK_THROWS_AS(bad_adapter.complete({{"user", "x"}}, maop::SamplingParams{}), ProtocolError);
}

TEST_CASE("remote policy posts the journey context and parses the reply") {
    CannedServer server([](const httplib::Request& req, httplib::Response& res) {
        const json q = json::parse(req.body);
        CHECK(q.contains("history"));
        CHECK(q.contains("plan"));
        CHECK(q.contains("options"));
        CHECK(q.at("profile").at("group_size") == 2);
        res.set_content(
            "Feeling fine, resting a bit.\n"
            "{\"decision\": \"rest\", \"end time\": \"11:00\", \"remaining stamina\": 4.0, "
            "\"total expense\": 0, \"next planned location\": \"Hotel\"}",
            "text/plain");
    });

    TravelerProfile profile;
    profile.id = "pair";
    profile.group = {{"female", 30}, {"male", 31}};
    profile.initial_stamina = 7.5;

    RemoteConfig config;
    config.port = server.port();
    config.path = "/decide";
    config.cache_dir = scratch_cache("policy");

    RemotePolicy policy(config, profile);
    policy.set_decision_timeout(30);

    sandbox::TravelerState state;
    state.day = 1;
    state.time_min = 600;
    state.location = "Station";
    Plan plan;
    plan.city = "X";
    plan.days = 1;
    plan.hotel = "h";
    plan.origin_terminal = "t";
    plan.entries.push_back(PlanEntry{1, 600, {}, "Station", Activity::transit, ""});

    const auto decision = policy.decide({state}, plan, {});
    CHECK(decision.decision == "rest");
    CHECK(decision.end_time == 660);
    CHECK(decision.thought.find("resting") != std::string::npos);
}

TEST_CASE("replay mode is hermetic even when constructed with a live-looking config") {
    RemoteConfig config;
    config.host = "192.0.2.1";  // TEST-NET, should never be contacted
    config.port = 80;
    config.replay = true;
    config.cache_dir = scratch_cache("hermetic");
    RemoteTransitAdapter adapter(config);
    CHECK_THROWS_WITH_AS(adapter.query("A", "B", 0), doctest::Contains("replay"),
                         EnvironmentError);
}
