#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "travelsim/maop.hpp"
#include "travelsim/sandbox.hpp"
#include "travelsim/scoring.hpp"

namespace travelsim::adapters {

// File helpers shared by fixtures, remote caches and the CLI.
nlohmann::json read_json_file(const std::filesystem::path& file);
std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, const std::string& content);

// --- JSON codecs shared by fixtures and the CLI ------------------------------

stamina::StaminaRule stamina_rule_from_json(const nlohmann::json& j);
nlohmann::json stamina_rule_to_json(const stamina::StaminaRule& rule);

POI poi_from_json(const nlohmann::json& j);
nlohmann::json poi_to_json(const POI& poi);
std::vector<POI> load_poi_file(const std::filesystem::path& file);

// Profiles may inline their stamina rule or reference one from the rules file
// via "stamina_rule_ref".
TravelerProfile profile_from_json(const nlohmann::json& j,
                                  const std::map<std::string, stamina::StaminaRule>& rules);

// --- Fixture bundle -----------------------------------------------------------

// File-backed stand-ins for the map, dining, sightseeing and model services.
// A bundle directory holds pois.json, transit_matrix.json, restaurants.json,
// narratives.json, stamina_rules.json, profiles.json and optionally
// chat_responses.json and evaluator.json.
class FixtureBundle {
  public:
    static FixtureBundle load(const std::filesystem::path& dir);

    const PoiIndex& pois() const { return pois_; }
    const std::map<std::string, TravelerProfile>& profiles() const { return profiles_; }
    const TravelerProfile& profile(const std::string& id) const;
    const std::map<std::string, stamina::StaminaRule>& stamina_rules() const { return rules_; }
    const std::vector<std::string>& chat_responses() const { return chat_responses_; }
    const nlohmann::json& evaluator_config() const { return evaluator_config_; }
    const std::filesystem::path& dir() const { return dir_; }

    // Providers are views over the bundle; the bundle must outlive them.
    std::unique_ptr<sandbox::TransitProvider> transit_provider() const;
    std::unique_ptr<sandbox::DiningProvider> dining_provider() const;
    std::unique_ptr<sandbox::SightseeProvider> sightsee_provider() const;

    struct Restaurant {
        std::string name;
        std::string near;
        sandbox::DiningOption option;
    };

    const std::vector<Restaurant>& restaurants() const { return restaurants_; }
    const std::map<std::string, std::vector<sandbox::TransitOption>>& transit_edges() const {
        return transit_edges_;
    }
    const std::map<std::string, sandbox::SightseeExperience>& narratives() const {
        return narratives_;
    }

    static std::string edge_key(const std::string& from, const std::string& to);

  private:
    std::filesystem::path dir_;
    PoiIndex pois_;
    std::map<std::string, std::vector<sandbox::TransitOption>> transit_edges_;
    std::vector<Restaurant> restaurants_;
    std::map<std::string, sandbox::SightseeExperience> narratives_;  // keyed by POI id
    std::map<std::string, stamina::StaminaRule> rules_;
    std::map<std::string, TravelerProfile> profiles_;
    std::vector<std::string> chat_responses_;
    nlohmann::json evaluator_config_;
};

// --- Chat and policy fixtures ---------------------------------------------------

// Replays canned responses in call order. Thread-safe; running dry raises
// EnvironmentError.
class ReplayChatClient : public maop::ChatClient {
  public:
    explicit ReplayChatClient(std::vector<std::string> responses);

    maop::ChatResponse complete(const std::vector<maop::ChatMessage>& messages,
                                const maop::SamplingParams& params) override;

    size_t consumed() const { return next_; }
    const std::vector<std::vector<maop::ChatMessage>>& requests() const { return requests_; }

  private:
    std::vector<std::string> responses_;
    std::vector<std::vector<maop::ChatMessage>> requests_;
    size_t next_ = 0;
    mutable std::mutex mutex_;
};

// Replays a fixed decision sequence. Running dry raises EnvironmentError,
// aborting the simulation.
class ScriptedPolicy : public sandbox::TravelerPolicy {
  public:
    explicit ScriptedPolicy(std::vector<sandbox::PolicyDecision> decisions);
    static ScriptedPolicy from_json(const nlohmann::json& decisions);
    static ScriptedPolicy load(const std::filesystem::path& file);

    sandbox::PolicyDecision decide(const std::vector<sandbox::TravelerState>& history,
                                   const Plan& plan,
                                   const sandbox::ActionOptions& options) override;

  private:
    std::vector<sandbox::PolicyDecision> decisions_;
    size_t next_ = 0;
};

// Follows the plan itself: transits toward the next planned place (resting
// out any slack so arrivals land on the planned start times), performs each
// planned activity, and ends the day after its last entry.
class EchoPolicy : public sandbox::TravelerPolicy {
  public:
    EchoPolicy(const Plan& plan, const PoiIndex* pois);

    sandbox::PolicyDecision decide(const std::vector<sandbox::TravelerState>& history,
                                   const Plan& plan,
                                   const sandbox::ActionOptions& options) override;

  private:
    const PoiIndex* pois_;
    std::vector<PlanEntry> entries_;
    size_t cursor_ = 0;
};

// Returns configured constant scores; evaluator.json may override per
// granularity. Defaults to 70 across every dimension when unconfigured.
class FixtureEvaluator : public scoring::Evaluator {
  public:
    FixtureEvaluator() : FixtureEvaluator(nlohmann::json::object()) {}
    explicit FixtureEvaluator(const nlohmann::json& config);

    scoring::EvalResult assess(const scoring::EvalRequest& request) override;

  private:
    metrics::DimScores default_scores_;
    std::map<std::string, metrics::DimScores> per_granularity_;
    std::string commentary_;
};

// Traveler-feedback evaluator backed by a chat model; parses one JSON object
// of five scores plus commentary.
class ChatEvaluator : public scoring::Evaluator {
  public:
    explicit ChatEvaluator(maop::ChatClient& client, maop::SamplingParams params = {});

    scoring::EvalResult assess(const scoring::EvalRequest& request) override;

  private:
    maop::ChatClient& client_;
    maop::SamplingParams params_;
};

// Policy backed by a chat model speaking the ReAct-plus-decision format.
class ChatPolicy : public sandbox::TravelerPolicy {
  public:
    ChatPolicy(maop::ChatClient& client, const TravelerProfile& profile,
               maop::SamplingParams params = {});

    sandbox::PolicyDecision decide(const std::vector<sandbox::TravelerState>& history,
                                   const Plan& plan,
                                   const sandbox::ActionOptions& options) override;

  private:
    maop::ChatClient& client_;
    const TravelerProfile& profile_;
    maop::SamplingParams params_;
};

// Serialization of simulation inputs offered to remote policies.
nlohmann::json options_to_json(const sandbox::ActionOptions& options);
nlohmann::json state_brief_json(const sandbox::TravelerState& state);

}  // namespace travelsim::adapters
