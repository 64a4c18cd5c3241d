#include "travelsim/remote.hpp"

#include <fstream>

#include <httplib.h>

#include "travelsim/adapters.hpp"
#include "travelsim/digest.hpp"
#include "travelsim/timeutil.hpp"

namespace travelsim::remote {

using nlohmann::json;

namespace {

class HttplibTransport : public HttpTransport {
  public:
    std::string post_json(const std::string& host, int port, const std::string& path,
                          const std::string& body, int timeout_sec) override {
        httplib::Client client(host, port);
        client.set_connection_timeout(timeout_sec, 0);
        client.set_read_timeout(timeout_sec, 0);
        auto res = client.Post(path, body, "application/json");
        if (!res)
            throw EnvironmentError("http post to " + host + ":" + std::to_string(port) + path +
                                   " failed: " + httplib::to_string(res.error()));
        if (res->status < 200 || res->status >= 300)
            throw ProtocolError("http post to " + path + " returned status " +
                                std::to_string(res->status));
        return res->body;
    }
};

class FailingTransport : public HttpTransport {
  public:
    std::string post_json(const std::string&, int, const std::string&, const std::string&,
                          int) override {
        throw EnvironmentError("network access attempted in replay mode");
    }
};

std::shared_ptr<HttpTransport> transport_for(const RemoteConfig& config) {
    if (config.transport) return config.transport;
    return config.replay ? make_failing_transport() : make_httplib_transport();
}

}  // namespace

std::shared_ptr<HttpTransport> make_httplib_transport() {
    return std::make_shared<HttplibTransport>();
}

std::shared_ptr<HttpTransport> make_failing_transport() {
    return std::make_shared<FailingTransport>();
}

// --- Replay cache ---------------------------------------------------------------

ReplayCache::ReplayCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

namespace {
constexpr int kCacheSchemaVersion = 1;
}

std::optional<json> ReplayCache::get(const std::string& bucket, const std::string& key) const {
    const auto file = dir_ / bucket / (fnv1a64_hex(key) + ".json");
    std::ifstream in(file);
    if (!in) return std::nullopt;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("cache file '" + file.string() + "' is corrupt");
    if (j.value("schema_version", 0) != kCacheSchemaVersion)
        throw ParseError("cache file '" + file.string() + "' has an unsupported schema");
    return j.at("value");
}

void ReplayCache::put(const std::string& bucket, const std::string& key, const json& value) {
    std::lock_guard<std::mutex> lock(write_mutex_);
    const auto dir = dir_ / bucket;
    std::filesystem::create_directories(dir);
    const auto file = dir / (fnv1a64_hex(key) + ".json");
    const auto tmp = dir / (fnv1a64_hex(key) + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw EnvironmentError("cannot write cache file '" + tmp.string() + "'");
        out << json{{"schema_version", kCacheSchemaVersion}, {"key", key}, {"value", value}}
                   .dump();
    }
    std::filesystem::rename(tmp, file);
}

// --- Transit ---------------------------------------------------------------------

RemoteTransitAdapter::RemoteTransitAdapter(RemoteConfig config)
    : config_(std::move(config)), cache_(config_.cache_dir) {
    config_.transport = transport_for(config_);
}

std::vector<sandbox::TransitOption> RemoteTransitAdapter::query(const std::string& from,
                                                                const std::string& to,
                                                                int depart_min) {
    const int hour = depart_min / 60;
    const std::string key = from + "\x1f" + to + "\x1f" + std::to_string(hour);

    json payload;
    if (auto cached = cache_.get("transit", key); cached.has_value()) {
        payload = *cached;
    } else {
        const json request{{"from", from}, {"to", to}, {"hour", hour}};
        const std::string body = config_.transport->post_json(
            config_.host, config_.port, config_.path, request.dump(), config_.timeout_sec);
        payload = json::parse(body, nullptr, false);
        if (payload.is_discarded() || !payload.contains("options"))
            throw ProtocolError("map service returned an unusable payload");
        cache_.put("transit", key, payload);
    }

    std::vector<sandbox::TransitOption> out;
    for (const auto& o : payload.at("options")) {
        sandbox::TransitOption t;
        t.mode = stamina::transit_mode_from_string(o.at("mode").get<std::string>());
        t.duration_min = o.at("duration_min").get<int>();
        t.cost_minor = o.at("cost").get<long long>();
        t.description = o.value("description", "");
        out.push_back(std::move(t));
    }
    return out;
}

// --- Chat ------------------------------------------------------------------------

RemoteChatAdapter::RemoteChatAdapter(RemoteConfig config)
    : config_(std::move(config)), cache_(config_.cache_dir) {
    config_.transport = transport_for(config_);
}

maop::ChatResponse RemoteChatAdapter::complete(const std::vector<maop::ChatMessage>& messages,
                                               const maop::SamplingParams& params) {
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    const json request{{"model", config_.model},
                       {"messages", msgs},
                       {"temperature", params.temperature},
                       {"seed", params.seed},
                       {"max_tokens", params.max_tokens}};
    const std::string key = request.dump();

    json payload;
    if (auto cached = cache_.get("chat", key); cached.has_value()) {
        payload = *cached;
    } else {
        const std::string body = config_.transport->post_json(
            config_.host, config_.port, config_.path, key, config_.timeout_sec);
        payload = json::parse(body, nullptr, false);
        if (payload.is_discarded()) throw ProtocolError("chat service returned invalid JSON");
        cache_.put("chat", key, payload);
    }

    try {
        const json& message = payload.at("choices").at(0).at("message");
        maop::ChatResponse out;
        out.text = message.at("content").get<std::string>();
        out.reasoning = message.value("reasoning_content", "");
        return out;
    } catch (const json::exception&) {
        throw ProtocolError("chat service payload lacks choices[0].message.content");
    }
}

// --- Policy ------------------------------------------------------------------------

RemotePolicy::RemotePolicy(RemoteConfig config, const TravelerProfile& profile)
    : config_(std::move(config)), cache_(config_.cache_dir), profile_(profile) {
    config_.transport = transport_for(config_);
}

sandbox::PolicyDecision RemotePolicy::decide(const std::vector<sandbox::TravelerState>& history,
                                             const Plan& plan,
                                             const sandbox::ActionOptions& options) {
    json hist = json::array();
    for (const auto& s : history) hist.push_back(adapters::state_brief_json(s));
    const json request{{"history", hist},
                       {"plan", serialize_plan(plan)},
                       {"options", adapters::options_to_json(options)},
                       {"profile",
                        {{"id", profile_.id},
                         {"preferences", profile_.preferences},
                         {"group_size", profile_.group_size()},
                         {"type", to_string(profile_.type_label)}}}};
    const std::string key = request.dump();

    std::string text;
    if (auto cached = cache_.get("policy", key); cached.has_value()) {
        text = cached->get<std::string>();
    } else {
        text = config_.transport->post_json(config_.host, config_.port, config_.path, key,
                                            config_.timeout_sec);
        cache_.put("policy", key, json(text));
    }
    return sandbox::parse_decision_text(text);
}

}  // namespace travelsim::remote
