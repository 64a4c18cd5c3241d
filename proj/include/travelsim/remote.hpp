#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "travelsim/maop.hpp"
#include "travelsim/sandbox.hpp"

namespace travelsim::remote {

// Minimal HTTP seam so adapters can be run hermetically: the replay
// configuration injects a transport that fails on any real call.
class HttpTransport {
  public:
    virtual ~HttpTransport() = default;
    // POST application/json; returns the response body or throws
    // EnvironmentError (transport) / ProtocolError (non-2xx).
    virtual std::string post_json(const std::string& host, int port, const std::string& path,
                                  const std::string& body, int timeout_sec) = 0;
};

std::shared_ptr<HttpTransport> make_httplib_transport();
std::shared_ptr<HttpTransport> make_failing_transport();  // hermetic replay guard

struct RemoteConfig {
    std::string host = "127.0.0.1";
    int port = 0;
    std::string path = "/";            // service endpoint path
    std::string model;                 // chat adapters only
    bool replay = false;               // true: cache only, never touch the network
    std::filesystem::path cache_dir;   // record/replay store
    int timeout_sec = 120;
    std::shared_ptr<HttpTransport> transport;  // defaults per replay flag
};

// Disk-backed record/replay store. Layout: <dir>/<bucket>/<fnv64 of key>.json,
// each file carrying {schema_version, key, value}. Writes go through a
// temp-file rename; one writer, many readers.
class ReplayCache {
  public:
    explicit ReplayCache(std::filesystem::path dir);

    std::optional<nlohmann::json> get(const std::string& bucket, const std::string& key) const;
    void put(const std::string& bucket, const std::string& key, const nlohmann::json& value);

  private:
    std::filesystem::path dir_;
    mutable std::mutex write_mutex_;
};

// Map-service adapter. Requests are keyed by (from, to, hour) in the cache;
// replay mode answers from the cache alone.
class RemoteTransitAdapter : public sandbox::TransitProvider {
  public:
    explicit RemoteTransitAdapter(RemoteConfig config);

    std::vector<sandbox::TransitOption> query(const std::string& from, const std::string& to,
                                              int depart_min) override;

  private:
    RemoteConfig config_;
    ReplayCache cache_;
};

// Chat-completion adapter; full request/response pairs are logged to the
// cache keyed by the canonical request JSON.
class RemoteChatAdapter : public maop::ChatClient {
  public:
    explicit RemoteChatAdapter(RemoteConfig config);

    maop::ChatResponse complete(const std::vector<maop::ChatMessage>& messages,
                                const maop::SamplingParams& params) override;

  private:
    RemoteConfig config_;
    ReplayCache cache_;
};

// Traveler policy served over HTTP: POST {history, plan, options, profile},
// response is ReAct thought text ending in the decision JSON.
class RemotePolicy : public sandbox::TravelerPolicy {
  public:
    RemotePolicy(RemoteConfig config, const TravelerProfile& profile);

    sandbox::PolicyDecision decide(const std::vector<sandbox::TravelerState>& history,
                                   const Plan& plan,
                                   const sandbox::ActionOptions& options) override;
    void set_decision_timeout(int seconds) override { config_.timeout_sec = seconds; }

  private:
    RemoteConfig config_;
    ReplayCache cache_;
    const TravelerProfile& profile_;
};

}  // namespace travelsim::remote
