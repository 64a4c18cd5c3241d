#include "travelsim/adapters.hpp"

#include <fstream>
#include <sstream>

#include "travelsim/prompts.hpp"
#include "travelsim/timeutil.hpp"

namespace travelsim::adapters {

using nlohmann::json;
using sandbox::DiningOption;
using sandbox::PolicyDecision;
using sandbox::SightseeExperience;
using sandbox::TransitOption;

json read_json_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw EnvironmentError("missing file '" + file.string() + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("file '" + file.string() + "' is not valid JSON");
    return j;
}

std::string read_text_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw EnvironmentError("missing file '" + file.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& content) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw EnvironmentError("cannot write file '" + file.string() + "'");
    out << content;
}

// --- Codecs --------------------------------------------------------------------

stamina::StaminaRule stamina_rule_from_json(const json& j) {
    stamina::StaminaRule rule;
    rule.sightseeing_per_hr = j.at("sightseeing_per_hr").get<double>();
    rule.dining_per_event = j.at("dining_per_event").get<double>();
    rule.resting_per_hr = j.at("resting_per_hr").get<double>();
    for (const auto& [mode, rate] : j.at("transit_per_hr").items())
        rule.transit_per_hr[stamina::transit_mode_from_string(mode)] = rate.get<double>();
    if (j.contains("forbidden_modes"))
        for (const auto& mode : j.at("forbidden_modes"))
            rule.forbidden_modes.insert(stamina::transit_mode_from_string(mode.get<std::string>()));
    rule.arrival_penalty = j.value("arrival_penalty", 2.0);
    return rule;
}

json stamina_rule_to_json(const stamina::StaminaRule& rule) {
    json transit = json::object();
    for (const auto& [mode, rate] : rule.transit_per_hr) transit[stamina::to_string(mode)] = rate;
    json forbidden = json::array();
    for (const auto& mode : rule.forbidden_modes) forbidden.push_back(stamina::to_string(mode));
    return json{{"sightseeing_per_hr", rule.sightseeing_per_hr},
                {"dining_per_event", rule.dining_per_event},
                {"resting_per_hr", rule.resting_per_hr},
                {"transit_per_hr", transit},
                {"forbidden_modes", forbidden},
                {"arrival_penalty", rule.arrival_penalty}};
}

POI poi_from_json(const json& j) {
    POI poi;
    poi.id = j.at("id").get<std::string>();
    poi.name = j.at("name").get<std::string>();
    poi.location.lat = j.at("location").at("lat").get<double>();
    poi.location.lon = j.at("location").at("lon").get<double>();
    poi.category = poi_category_from_string(j.at("category").get<std::string>());
    if (j.contains("blog_excerpt") && !j.at("blog_excerpt").is_null())
        poi.blog_excerpt = j.at("blog_excerpt").get<std::string>();
    return poi;
}

json poi_to_json(const POI& poi) {
    json j{{"id", poi.id},
           {"name", poi.name},
           {"location", {{"lat", poi.location.lat}, {"lon", poi.location.lon}}},
           {"category", to_string(poi.category)}};
    if (poi.blog_excerpt) j["blog_excerpt"] = *poi.blog_excerpt;
    return j;
}

std::vector<POI> load_poi_file(const std::filesystem::path& file) {
    json j = read_json_file(file);
    if (!j.is_array()) throw ParseError("poi file '" + file.string() + "' must be a JSON array");
    std::vector<POI> out;
    for (const auto& item : j) out.push_back(poi_from_json(item));
    return out;
}

TravelerProfile profile_from_json(const json& j,
                                  const std::map<std::string, stamina::StaminaRule>& rules) {
    TravelerProfile p;
    p.id = j.at("id").get<std::string>();
    for (const auto& member : j.at("group"))
        p.group.push_back(GroupMember{member.at("gender").get<std::string>(),
                                      member.at("age").get<int>()});
    p.type_label = traveler_type_from_string(j.at("type_label").get<std::string>());
    p.preferences = j.value("preferences", "");
    p.budget_minor = j.value("budget", 0LL);
    p.initial_stamina = j.at("initial_stamina").get<double>();
    if (j.contains("stamina_rule")) {
        p.stamina_rule = stamina_rule_from_json(j.at("stamina_rule"));
    } else if (j.contains("stamina_rule_ref")) {
        const std::string ref = j.at("stamina_rule_ref").get<std::string>();
        auto it = rules.find(ref);
        if (it == rules.end())
            throw ReferenceError("profile '" + p.id + "': unknown stamina rule '" + ref + "'");
        p.stamina_rule = it->second;
    } else {
        throw ParseError("profile '" + p.id + "': needs stamina_rule or stamina_rule_ref");
    }
    check_profile(p);
    return p;
}

// --- Fixture bundle --------------------------------------------------------------

std::string FixtureBundle::edge_key(const std::string& from, const std::string& to) {
    return from + "\x1f" + to;
}

FixtureBundle FixtureBundle::load(const std::filesystem::path& dir) {
    FixtureBundle b;
    b.dir_ = dir;
    b.pois_ = PoiIndex(load_poi_file(dir / "pois.json"));

    auto resolve_place = [&](const std::string& place, const std::string& where) {
        const POI* poi = b.pois_.resolve(place);
        if (!poi) throw ReferenceError(where + ": unknown place '" + place + "'");
        return poi->id;
    };

    json matrix = read_json_file(dir / "transit_matrix.json");
    for (const auto& edge : matrix.at("edges")) {
        const std::string from = resolve_place(edge.at("from").get<std::string>(), "transit matrix");
        const std::string to = resolve_place(edge.at("to").get<std::string>(), "transit matrix");
        std::vector<TransitOption> options;
        for (const auto& o : edge.at("options")) {
            TransitOption t;
            t.mode = stamina::transit_mode_from_string(o.at("mode").get<std::string>());
            t.duration_min = o.at("duration_min").get<int>();
            t.cost_minor = o.at("cost").get<long long>();
            t.description = o.value("description", "");
            options.push_back(std::move(t));
        }
        b.transit_edges_[edge_key(from, to)] = std::move(options);
    }

    const json restaurants_doc = read_json_file(dir / "restaurants.json");
    for (const auto& r : restaurants_doc) {
        Restaurant rest;
        rest.name = r.at("name").get<std::string>();
        rest.near = resolve_place(r.at("near").get<std::string>(), "restaurant '" +
                                                                        r.at("name").get<std::string>() + "'");
        rest.option.name = rest.name;
        rest.option.cost_estimate_minor = r.at("cost_estimate").get<long long>();
        rest.option.quality = r.value("quality", "");
        rest.option.duration_min = r.value("duration_min", 60);
        b.restaurants_.push_back(std::move(rest));
    }

    const json narratives_doc = read_json_file(dir / "narratives.json");
    for (const auto& [poi_id, n] : narratives_doc.items()) {
        if (!b.pois_.by_id(poi_id))
            throw ReferenceError("narratives: unknown poi id '" + poi_id + "'");
        SightseeExperience exp;
        exp.narrative = n.at("narrative").get<std::string>();
        exp.suggested_duration_min = n.value("suggested_duration_min", 90);
        exp.cost_minor = n.value("cost", 0LL);
        b.narratives_[poi_id] = std::move(exp);
    }

    const json rules_doc = read_json_file(dir / "stamina_rules.json");
    for (const auto& [name, rule] : rules_doc.items()) b.rules_[name] = stamina_rule_from_json(rule);

    const json profiles_doc = read_json_file(dir / "profiles.json");
    for (const auto& p : profiles_doc) {
        TravelerProfile profile = profile_from_json(p, b.rules_);
        const std::string id = profile.id;
        if (!b.profiles_.emplace(id, std::move(profile)).second)
            throw ParseError("profiles: duplicate id '" + id + "'");
    }

    if (std::filesystem::exists(dir / "chat_responses.json")) {
        json j = read_json_file(dir / "chat_responses.json");
        const json& arr = j.is_array() ? j : j.at("responses");
        for (const auto& r : arr) b.chat_responses_.push_back(r.get<std::string>());
    }
    if (std::filesystem::exists(dir / "evaluator.json"))
        b.evaluator_config_ = read_json_file(dir / "evaluator.json");
    else
        b.evaluator_config_ = json::object();

    return b;
}

const TravelerProfile& FixtureBundle::profile(const std::string& id) const {
    auto it = profiles_.find(id);
    if (it == profiles_.end()) throw ReferenceError("unknown traveler profile '" + id + "'");
    return it->second;
}

namespace {

class FixtureTransit : public sandbox::TransitProvider {
  public:
    explicit FixtureTransit(const FixtureBundle& bundle) : bundle_(bundle) {}

    std::vector<TransitOption> query(const std::string& from, const std::string& to,
                                     int /*depart_min*/) override {
        const POI* a = bundle_.pois().resolve(from);
        const POI* z = bundle_.pois().resolve(to);
        if (!a || !z) return {};
        auto it = bundle_.transit_edges().find(FixtureBundle::edge_key(a->id, z->id));
        return it == bundle_.transit_edges().end() ? std::vector<TransitOption>{} : it->second;
    }

  private:
    const FixtureBundle& bundle_;
};

class FixtureDining : public sandbox::DiningProvider {
  public:
    explicit FixtureDining(const FixtureBundle& bundle) : bundle_(bundle) {}

    std::vector<DiningOption> nearby(const std::string& location, int /*time_min*/) override {
        const POI* at = bundle_.pois().resolve(location);
        std::vector<DiningOption> out;
        for (const auto& r : bundle_.restaurants())
            if (at && r.near == at->id) out.push_back(r.option);
        return out;
    }

  private:
    const FixtureBundle& bundle_;
};

class FixtureSightsee : public sandbox::SightseeProvider {
  public:
    explicit FixtureSightsee(const FixtureBundle& bundle) : bundle_(bundle) {}

    SightseeExperience experience(const POI& poi, const TravelerProfile&,
                                  const sandbox::TravelerState&) override {
        auto it = bundle_.narratives().find(poi.id);
        if (it == bundle_.narratives().end())
            throw EnvironmentError("no sightseeing narrative for poi '" + poi.id + "'");
        return it->second;
    }

  private:
    const FixtureBundle& bundle_;
};

}  // namespace

std::unique_ptr<sandbox::TransitProvider> FixtureBundle::transit_provider() const {
    return std::make_unique<FixtureTransit>(*this);
}
std::unique_ptr<sandbox::DiningProvider> FixtureBundle::dining_provider() const {
    return std::make_unique<FixtureDining>(*this);
}
std::unique_ptr<sandbox::SightseeProvider> FixtureBundle::sightsee_provider() const {
    return std::make_unique<FixtureSightsee>(*this);
}

// --- Replay chat client ------------------------------------------------------------

ReplayChatClient::ReplayChatClient(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

maop::ChatResponse ReplayChatClient::complete(const std::vector<maop::ChatMessage>& messages,
                                              const maop::SamplingParams&) {
    std::lock_guard<std::mutex> lock(mutex_);
    requests_.push_back(messages);
    if (next_ >= responses_.size())
        throw EnvironmentError("replay chat client ran out of canned responses");
    return maop::ChatResponse{responses_[next_++], ""};
}

// --- Scripted policy ----------------------------------------------------------------

ScriptedPolicy::ScriptedPolicy(std::vector<PolicyDecision> decisions)
    : decisions_(std::move(decisions)) {}

ScriptedPolicy ScriptedPolicy::from_json(const json& decisions) {
    if (!decisions.is_array()) throw ParseError("scripted decisions must be a JSON array");
    std::vector<PolicyDecision> out;
    for (const auto& item : decisions) {
        if (item.is_object() && item.contains("decision") && item.at("decision").is_object()) {
            out.push_back(sandbox::parse_decision_json(item.at("decision"),
                                                       item.value("thought", "")));
        } else {
            out.push_back(sandbox::parse_decision_json(item));
        }
    }
    return ScriptedPolicy(std::move(out));
}

ScriptedPolicy ScriptedPolicy::load(const std::filesystem::path& file) {
    return from_json(read_json_file(file));
}

PolicyDecision ScriptedPolicy::decide(const std::vector<sandbox::TravelerState>&, const Plan&,
                                      const sandbox::ActionOptions&) {
    if (next_ >= decisions_.size()) throw EnvironmentError("scripted policy ran out of decisions");
    return decisions_[next_++];
}

// --- Echo policy --------------------------------------------------------------------

EchoPolicy::EchoPolicy(const Plan& plan, const PoiIndex* pois)
    : pois_(pois), entries_(plan.entries) {}

namespace {

PolicyDecision make_decision(const std::string& kind, const sandbox::TravelerState& s) {
    PolicyDecision d;
    d.decision = kind;
    d.reported_stamina = s.stamina.value;
    d.reported_expense = static_cast<double>(s.outlay_minor) / 100.0;
    return d;
}

}  // namespace

PolicyDecision EchoPolicy::decide(const std::vector<sandbox::TravelerState>& history, const Plan&,
                                  const sandbox::ActionOptions& options) {
    const sandbox::TravelerState& s = history.back();
    while (cursor_ < entries_.size() && entries_[cursor_].day < s.day) ++cursor_;

    for (;;) {
        if (cursor_ >= entries_.size() || entries_[cursor_].day > s.day)
            return make_decision("day_end", s);
        const PlanEntry& e = entries_[cursor_];

        if (!sandbox::places_equal(s.location, e.location, pois_)) {
            if (!options.transit.empty() &&
                sandbox::places_equal(options.transit_target, e.location, pois_)) {
                const TransitOption& route = options.transit.front();
                const int depart = e.start_time - route.duration_min;
                if (depart > s.time_min) {
                    PolicyDecision d = make_decision("rest", s);
                    d.end_time = depart;
                    d.next_planned_location = e.location;
                    return d;
                }
                PolicyDecision d = make_decision("transit", s);
                d.departure = s.location;
                d.destination = e.location;
                d.transport_mode = stamina::to_string(route.mode);
                d.arrival_time = std::min(s.time_min + route.duration_min, kMinutesPerDay - 1);
                d.next_planned_location = e.location;
                return d;
            }
            PolicyDecision d = make_decision("transit", s);
            d.departure = s.location;
            d.destination = e.location;
            d.transport_mode = "taxi";
            d.next_planned_location = e.location;
            return d;
        }

        ++cursor_;
        if (e.activity == Activity::transit) continue;  // anchor entry, already here

        int end;
        if (e.end_time) {
            end = *e.end_time;
        } else if (cursor_ < entries_.size() && entries_[cursor_].day == e.day) {
            end = entries_[cursor_].start_time;
        } else {
            end = e.start_time + 60;
        }
        if (end <= s.time_min) continue;  // behind schedule; skip to the next entry

        PolicyDecision d = make_decision(stamina::to_string(e.activity), s);
        d.end_time = std::min(end, kMinutesPerDay - 1);
        if (cursor_ < entries_.size()) d.next_planned_location = entries_[cursor_].location;
        return d;
    }
}

// --- Evaluators ----------------------------------------------------------------------

namespace {

metrics::DimScores scores_from_config(const json& j, const metrics::DimScores& fallback) {
    metrics::DimScores s = fallback;
    if (j.contains("ex")) s.ex = j.at("ex").get<double>();
    if (j.contains("it")) s.it = j.at("it").get<double>();
    if (j.contains("ar")) s.ar = j.at("ar").get<double>();
    if (j.contains("st")) s.st = j.at("st").get<double>();
    if (j.contains("co")) s.co = j.at("co").get<double>();
    return s;
}

}  // namespace

FixtureEvaluator::FixtureEvaluator(const json& config) {
    default_scores_ = metrics::DimScores::constant(70.0);
    if (config.contains("default"))
        default_scores_ = scores_from_config(config.at("default"), default_scores_);
    for (const char* g : {"per_poi", "per_day", "per_trip"})
        if (config.contains(g))
            per_granularity_[g] = scores_from_config(config.at(g), default_scores_);
    commentary_ = config.value("commentary", "fixture evaluation");
}

scoring::EvalResult FixtureEvaluator::assess(const scoring::EvalRequest& request) {
    scoring::EvalResult res;
    res.scores = default_scores_;
    auto it = per_granularity_.find(metrics::to_string(request.granularity));
    if (it != per_granularity_.end()) res.scores = it->second;
    res.commentary = commentary_;
    return res;
}

nlohmann::json state_brief_json(const sandbox::TravelerState& state) {
    return json{{"day", state.day},
                {"time", format_hhmm(state.time_min)},
                {"location", state.location},
                {"stamina", state.stamina.value},
                {"stamina_state", stamina::stamina_state(state.stamina.value)},
                {"outlay", state.outlay_minor},
                {"event", sandbox::to_string(state.event.kind)},
                {"detail", state.event.detail}};
}

ChatEvaluator::ChatEvaluator(maop::ChatClient& client, maop::SamplingParams params)
    : client_(client), params_(params) {}

scoring::EvalResult ChatEvaluator::assess(const scoring::EvalRequest& request) {
    json window = json::array();
    for (const auto& s : request.window) window.push_back(state_brief_json(s));

    std::string prompt = maop::prompts::kEvaluatorPrompt;
    const std::string token = "{granularity}";
    prompt.replace(prompt.find(token), token.size(), metrics::to_string(request.granularity));

    std::ostringstream user;
    user << prompt << "\nTraveler preferences: "
         << (request.profile ? request.profile->preferences : "") << "\nJourney window:\n"
         << window.dump() << "\n";

    const maop::ChatResponse response =
        client_.complete({{"user", user.str()}}, params_);
    auto block = maop::extract_json_block(response.text);
    if (!block) throw ProtocolError("evaluator response lacks a JSON object");
    json j = json::parse(*block, nullptr, false);
    if (j.is_discarded()) throw ProtocolError("evaluator response is not valid JSON");

    scoring::EvalResult res;
    res.scores = scores_from_config(j, metrics::DimScores{});
    res.commentary = j.value("commentary", "");
    return res;
}

// --- Chat-backed traveler policy --------------------------------------------------------

nlohmann::json options_to_json(const sandbox::ActionOptions& options) {
    json legal = json::array();
    for (const Activity a : options.legal) legal.push_back(stamina::to_string(a));
    json transit = json::array();
    for (const TransitOption& t : options.transit)
        transit.push_back({{"mode", stamina::to_string(t.mode)},
                           {"duration_min", t.duration_min},
                           {"cost", t.cost_minor},
                           {"description", t.description}});
    json dining = json::array();
    for (const DiningOption& d : options.dining)
        dining.push_back({{"name", d.name},
                          {"cost_estimate", d.cost_estimate_minor},
                          {"quality", d.quality},
                          {"duration_min", d.duration_min}});
    json out{{"legal", legal},
             {"destinations", options.destinations},
             {"transit_target", options.transit_target},
             {"transit", transit},
             {"dining", dining}};
    if (options.sightsee)
        out["sightsee"] = {{"narrative", options.sightsee->narrative},
                           {"suggested_duration_min", options.sightsee->suggested_duration_min},
                           {"cost", options.sightsee->cost_minor}};
    return out;
}

ChatPolicy::ChatPolicy(maop::ChatClient& client, const TravelerProfile& profile,
                       maop::SamplingParams params)
    : client_(client), profile_(profile), params_(params) {}

PolicyDecision ChatPolicy::decide(const std::vector<sandbox::TravelerState>& history,
                                  const Plan& plan, const sandbox::ActionOptions& options) {
    std::ostringstream system;
    system << maop::prompts::kPolicySystem << "\nTraveler: " << profile_.preferences
           << "\nGroup size: " << profile_.group_size()
           << "\nStamina rule: " << stamina_rule_to_json(profile_.stamina_rule).dump() << "\n";

    json hist = json::array();
    for (const auto& s : history) hist.push_back(state_brief_json(s));

    std::ostringstream user;
    user << "Plan:\n" << serialize_plan(plan).dump() << "\nHistory:\n" << hist.dump()
         << "\nOptions:\n" << options_to_json(options).dump()
         << "\nDecide the next action now.";

    const maop::ChatResponse response =
        client_.complete({{"system", system.str()}, {"user", user.str()}}, params_);
    return sandbox::parse_decision_text(response.text);
}

}  // namespace travelsim::adapters
