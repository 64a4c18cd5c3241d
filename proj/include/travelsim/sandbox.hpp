#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "travelsim/metrics.hpp"
#include "travelsim/plan.hpp"
#include "travelsim/stamina.hpp"
#include "travelsim/trajectory.hpp"
#include "travelsim/types.hpp"

namespace travelsim::sandbox {

enum class EventKind { transit, rest, dine, sightsee, arrival, day_end };

std::string to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

struct Event {
    EventKind kind = EventKind::arrival;
    int day = 1;
    int start_min = 0;
    int end_min = 0;            // >= start_min, clamped to 23:59
    long long cost_minor = 0;   // whole-group cost
    std::string location;       // where the event leaves the traveler
    std::string detail;
};

// The traveler's state c = {t, l, s, o, e}.
struct TravelerState {
    int day = 1;
    int time_min = 0;
    std::string location;
    stamina::StaminaValue stamina;
    long long outlay_minor = 0;
    Event event;
};

struct Action {
    Activity kind = Activity::rest;
    std::string destination;                      // transit
    std::optional<stamina::TransitMode> mode;     // transit
    int duration_min = 0;                         // rest / dine / sightsee
};

// One policy decision in the simulation wire format. Times are parsed from
// "HH:MM"; the model's self-reported stamina/expense are logged but never
// drive the state.
struct PolicyDecision {
    std::string decision;  // transit | rest | dine | sightsee | day_end
    std::optional<int> arrival_time;
    std::optional<int> end_time;
    std::string departure;
    std::string destination;
    std::string transport_mode;
    std::string next_planned_location;
    std::optional<double> reported_stamina;
    std::optional<double> reported_expense;
    std::string thought;   // ReAct free text preceding the decision object
    nlohmann::json raw;
};

// Splits a policy response into leading free text plus the trailing JSON
// decision object and validates the wire fields.
PolicyDecision parse_decision_text(const std::string& response);
PolicyDecision parse_decision_json(const nlohmann::json& obj, std::string thought = {});
nlohmann::json decision_to_json(const PolicyDecision& d);

struct DecisionRecord {
    PolicyDecision decision;
    bool revisit = false;  // sightseeing a POI already visited in this trace
    bool forced = false;   // synthesized by the engine (step cap reached)
};

struct Trace {
    std::string city;
    std::string profile_ref;
    uint64_t seed = 0;
    std::vector<TravelerState> states;
    std::vector<DecisionRecord> decisions;
    std::vector<metrics::FeedbackRecord> feedback;
    bool truncated = false;
    bool aborted = false;
    std::string abort_reason;
    nlohmann::json provenance;  // config echo + input digests
};

// Line-delimited JSON, schema version 1. Serialization is byte-deterministic
// for equal traces.
std::string serialize_trace(const Trace& trace);
Trace parse_trace_text(const std::string& jsonl);

// --- Provider contracts ------------------------------------------------------

struct TransitOption {
    stamina::TransitMode mode = stamina::TransitMode::walking;
    int duration_min = 0;
    long long cost_minor = 0;  // per person; per vehicle for taxi
    std::string description;
};

struct DiningOption {
    std::string name;
    long long cost_estimate_minor = 0;  // per person
    std::string quality;
    int duration_min = 60;
};

struct SightseeExperience {
    std::string narrative;
    int suggested_duration_min = 90;
    long long cost_minor = 0;  // per person
};

class TransitProvider {
  public:
    virtual ~TransitProvider() = default;
    virtual std::vector<TransitOption> query(const std::string& from, const std::string& to,
                                             int depart_min) = 0;
};

class DiningProvider {
  public:
    virtual ~DiningProvider() = default;
    virtual std::vector<DiningOption> nearby(const std::string& location, int time_min) = 0;
};

class SightseeProvider {
  public:
    virtual ~SightseeProvider() = default;
    virtual SightseeExperience experience(const POI& poi, const TravelerProfile& profile,
                                          const TravelerState& state) = 0;
};

struct Providers {
    TransitProvider* transit = nullptr;
    DiningProvider* dining = nullptr;
    SightseeProvider* sightsee = nullptr;
    const PoiIndex* pois = nullptr;
};

// What the environment offers the policy before each decision.
struct ActionOptions {
    std::set<Activity> legal;
    std::vector<std::string> destinations;     // candidate transit targets
    std::string transit_target;                // inferred next planned location
    std::vector<TransitOption> transit;        // routes to transit_target
    std::vector<DiningOption> dining;
    std::optional<SightseeExperience> sightsee;
};

class TravelerPolicy {
  public:
    virtual ~TravelerPolicy() = default;
    virtual PolicyDecision decide(const std::vector<TravelerState>& history, const Plan& plan,
                                  const ActionOptions& options) = 0;
    // Wall-clock budget per decision; remote policies apply it to I/O.
    virtual void set_decision_timeout(int /*seconds*/) {}
};

// --- Engine ------------------------------------------------------------------

struct SimConfig {
    int step_cap_per_day = 64;
    int day_start_min = 8 * 60;       // fallback when a day has no planned entry
    int default_arrival_min = 8 * 60; // fallback when day 1 lacks a terminal entry
    int decision_timeout_sec = 120;
    uint64_t seed = 0;
};

// Action kinds available in a state. Sightseeing needs a sightseeable POI at
// the current location; transit needs at least one candidate destination.
std::set<Activity> legal_actions(const TravelerState& state, const Plan& plan,
                                 const PoiIndex* pois);

// Candidate transit destinations: plan locations, hotel and terminal, minus
// the current place.
std::vector<std::string> candidate_destinations(const TravelerState& state, const Plan& plan,
                                                const PoiIndex* pois);

struct StepResult {
    TravelerState state;
    Event event;
};

// Executes one action. Time, cost and stamina in the new state are computed
// by the engine from provider data and the profile's stamina rule; the
// policy's self-reported numbers never enter here.
StepResult step(const TravelerState& state, const Action& action, const Providers& providers,
                const TravelerProfile& profile);

// Runs the whole journey. The trace starts at the origin terminal with the
// arrival penalty applied; each day ends when the policy declares day_end or
// the step cap forces one. Provider and decision failures abort with a
// partial trace instead of throwing.
Trace run_simulation(const Plan& plan, const TravelerProfile& profile, TravelerPolicy& policy,
                     const Providers& providers, const SimConfig& config);

// Per-day time-location pairs of the simulated journey, one item per
// location-bearing event, consecutive same-place items collapsed.
std::vector<Trajectory> extract_simulated_trajectory(const Trace& trace);

// True when two location strings denote the same place, resolving ids and
// display names through the index when available.
bool places_equal(const std::string& a, const std::string& b, const PoiIndex* pois);

}  // namespace travelsim::sandbox
