#include "travelsim/sandbox.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "travelsim/timeutil.hpp"

namespace travelsim::sandbox {

using nlohmann::json;

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::transit: return "transit";
        case EventKind::rest: return "rest";
        case EventKind::dine: return "dine";
        case EventKind::sightsee: return "sightsee";
        case EventKind::arrival: return "arrival";
        case EventKind::day_end: return "day_end";
    }
    throw ArgumentError("unknown event kind");
}

EventKind event_kind_from_string(const std::string& s) {
    if (s == "transit") return EventKind::transit;
    if (s == "rest") return EventKind::rest;
    if (s == "dine") return EventKind::dine;
    if (s == "sightsee") return EventKind::sightsee;
    if (s == "arrival") return EventKind::arrival;
    if (s == "day_end") return EventKind::day_end;
    throw ParseError("unknown event kind '" + s + "'");
}

bool places_equal(const std::string& a, const std::string& b, const PoiIndex* pois) {
    if (normalize_place(a) == normalize_place(b)) return true;
    if (!pois) return false;
    const POI* pa = pois->resolve(a);
    const POI* pb = pois->resolve(b);
    return pa && pb && pa->id == pb->id;
}

// --- Decision wire format ----------------------------------------------------

PolicyDecision parse_decision_json(const json& obj, std::string thought) {
    if (!obj.is_object()) throw ParseError("decision: not a JSON object");
    auto it = obj.find("decision");
    if (it == obj.end() || !it->is_string()) throw ParseError("decision: missing field 'decision'");

    PolicyDecision d;
    d.raw = obj;
    d.thought = std::move(thought);
    d.decision = it->get<std::string>();
    if (d.decision != "transit" && d.decision != "rest" && d.decision != "dine" &&
        d.decision != "sightsee" && d.decision != "day_end")
        throw ParseError("decision: unknown decision '" + d.decision + "'");

    auto get_string = [&](const char* key) -> std::string {
        auto f = obj.find(key);
        return f != obj.end() && f->is_string() ? f->get<std::string>() : std::string{};
    };
    auto get_time = [&](const char* key) -> std::optional<int> {
        auto f = obj.find(key);
        if (f == obj.end() || f->is_null()) return std::nullopt;
        if (!f->is_string())
            throw ParseError(std::string("decision: field '") + key + "' must be HH:MM");
        return parse_hhmm(f->get<std::string>());
    };
    auto get_number = [&](const char* key) -> std::optional<double> {
        auto f = obj.find(key);
        if (f == obj.end() || !f->is_number()) return std::nullopt;
        return f->get<double>();
    };

    d.departure = get_string("departure");
    d.destination = get_string("destination");
    d.transport_mode = get_string("transport mode");
    d.next_planned_location = get_string("next planned location");
    d.arrival_time = get_time("arrival time");
    d.end_time = get_time("end time");
    d.reported_stamina = get_number("remaining stamina");
    d.reported_expense = get_number("total expense");

    if (d.decision == "transit" && d.destination.empty())
        throw ParseError("decision: transit requires a destination");
    return d;
}

PolicyDecision parse_decision_text(const std::string& response) {
    // The decision object is the last balanced {...} block in the response;
    // anything before it is the ReAct thought.
    const size_t close = response.rfind('}');
    if (close == std::string::npos) throw ParseError("decision: no JSON object in response");
    int depth = 0;
    size_t open = std::string::npos;
    for (size_t i = close + 1; i-- > 0;) {
        if (response[i] == '}') ++depth;
        if (response[i] == '{' && --depth == 0) {
            open = i;
            break;
        }
    }
    if (open == std::string::npos) throw ParseError("decision: unbalanced JSON in response");

    json obj = json::parse(response.substr(open, close - open + 1), nullptr, false);
    if (obj.is_discarded()) throw ParseError("decision: trailing object is not valid JSON");

    std::string thought = response.substr(0, open);
    while (!thought.empty() && std::isspace(static_cast<unsigned char>(thought.back())))
        thought.pop_back();
    return parse_decision_json(obj, std::move(thought));
}

json decision_to_json(const PolicyDecision& d) {
    if (!d.raw.is_null()) return d.raw;
    json j{{"decision", d.decision}};
    if (d.arrival_time) j["arrival time"] = format_hhmm(*d.arrival_time);
    if (d.end_time) j["end time"] = format_hhmm(*d.end_time);
    if (!d.departure.empty()) j["departure"] = d.departure;
    if (!d.destination.empty()) j["destination"] = d.destination;
    if (!d.transport_mode.empty()) j["transport mode"] = d.transport_mode;
    if (!d.next_planned_location.empty()) j["next planned location"] = d.next_planned_location;
    if (d.reported_stamina) j["remaining stamina"] = *d.reported_stamina;
    if (d.reported_expense) j["total expense"] = *d.reported_expense;
    return j;
}

// --- Options -----------------------------------------------------------------

namespace {

bool is_sightseeable(const std::string& location, const PoiIndex* pois) {
    if (!pois) return false;
    const POI* p = pois->resolve(location);
    return p && (p->category == PoiCategory::attraction || p->category == PoiCategory::other);
}

std::string display_name(const std::string& id_or_name, const PoiIndex* pois) {
    if (pois)
        if (const POI* p = pois->resolve(id_or_name)) return p->name;
    return id_or_name;
}

// First plan entry of the current day at a different place and not already in
// the past; this is what the environment offers transit routes toward.
std::string infer_next_planned_location(const TravelerState& state, const Plan& plan,
                                        const PoiIndex* pois) {
    for (const PlanEntry& e : plan.entries) {
        if (e.day != state.day || e.start_time < state.time_min) continue;
        if (!places_equal(e.location, state.location, pois)) return display_name(e.location, pois);
    }
    return {};
}

}  // namespace

std::vector<std::string> candidate_destinations(const TravelerState& state, const Plan& plan,
                                                const PoiIndex* pois) {
    std::vector<std::string> out;
    auto add = [&](const std::string& loc) {
        const std::string name = display_name(loc, pois);
        if (places_equal(name, state.location, pois)) return;
        for (const std::string& existing : out)
            if (places_equal(existing, name, pois)) return;
        out.push_back(name);
    };
    for (const PlanEntry& e : plan.entries) add(e.location);
    add(plan.hotel);
    add(plan.origin_terminal);
    return out;
}

std::set<Activity> legal_actions(const TravelerState& state, const Plan& plan,
                                 const PoiIndex* pois) {
    std::set<Activity> legal{Activity::rest, Activity::dine};
    if (!candidate_destinations(state, plan, pois).empty()) legal.insert(Activity::transit);
    if (is_sightseeable(state.location, pois)) legal.insert(Activity::sightsee);
    return legal;
}

// --- Step --------------------------------------------------------------------

namespace {

int clamp_end_of_day(int minute) { return std::min(minute, kMinutesPerDay - 1); }

long long group_cost(long long per_unit, stamina::TransitMode mode, int group_size) {
    // Taxis are paid per vehicle, four seats each; everything else per person.
    if (mode == stamina::TransitMode::taxi) return per_unit * ((group_size + 3) / 4);
    return per_unit * group_size;
}

}  // namespace

StepResult step(const TravelerState& state, const Action& action, const Providers& providers,
                const TravelerProfile& profile) {
    const int group_size = profile.group_size();
    const stamina::StaminaRule& rule = profile.stamina_rule;

    Event event;
    event.day = state.day;
    event.start_min = state.time_min;

    std::string new_location = state.location;
    int duration = 0;
    long long cost = 0;

    switch (action.kind) {
        case Activity::transit: {
            if (!providers.transit) throw EnvironmentError("no transit provider configured");
            if (!action.mode) throw ArgumentError("transit action without a mode");
            const std::string dest = display_name(action.destination, providers.pois);
            auto options = providers.transit->query(state.location, dest, state.time_min);
            if (options.empty())
                throw EnvironmentError("no route from '" + state.location + "' to '" + dest + "'");
            const TransitOption* chosen = nullptr;
            for (const TransitOption& o : options)
                if (o.mode == *action.mode) {
                    chosen = &o;
                    break;
                }
            if (!chosen)
                throw ModeError("mode '" + stamina::to_string(*action.mode) +
                                "' unavailable from '" + state.location + "' to '" + dest + "'");
            duration = chosen->duration_min;
            cost = group_cost(chosen->cost_minor, *action.mode, group_size);
            new_location = dest;
            event.kind = EventKind::transit;
            event.detail = chosen->description;
            break;
        }
        case Activity::rest:
            duration = action.duration_min;
            event.kind = EventKind::rest;
            break;
        case Activity::dine: {
            if (!providers.dining) throw EnvironmentError("no dining provider configured");
            auto options = providers.dining->nearby(state.location, state.time_min);
            if (options.empty())
                throw EnvironmentError("no restaurant near '" + state.location + "'");
            const DiningOption& chosen = options.front();
            duration = action.duration_min > 0 ? action.duration_min : chosen.duration_min;
            cost = chosen.cost_estimate_minor * group_size;
            event.kind = EventKind::dine;
            event.detail = chosen.name;
            break;
        }
        case Activity::sightsee: {
            if (!providers.sightsee) throw EnvironmentError("no sightseeing provider configured");
            const POI* poi = providers.pois ? providers.pois->resolve(state.location) : nullptr;
            if (!poi || !is_sightseeable(state.location, providers.pois))
                throw ArgumentError("no sightseeable POI at '" + state.location + "'");
            const SightseeExperience exp = providers.sightsee->experience(*poi, profile, state);
            duration = action.duration_min > 0 ? action.duration_min : exp.suggested_duration_min;
            cost = exp.cost_minor * group_size;
            event.kind = EventKind::sightsee;
            event.detail = exp.narrative;
            break;
        }
    }

    const int end = clamp_end_of_day(event.start_min + duration);
    event.end_min = end;
    event.cost_minor = cost;
    event.location = new_location;

    StepResult out;
    out.state = state;
    out.state.time_min = end;
    out.state.location = new_location;
    out.state.outlay_minor = state.outlay_minor + cost;
    // Stamina is pro-rated on the actual (possibly end-of-day clamped) duration.
    out.state.stamina =
        stamina::apply_activity(state.stamina, rule, action.kind, end - event.start_min, action.mode);
    out.event = event;
    out.state.event = event;
    return out;
}

// --- Simulation --------------------------------------------------------------

namespace {

Action to_action(const PolicyDecision& d, const TravelerState& state) {
    Action a;
    a.kind = stamina::activity_from_string(d.decision);
    if (a.kind == Activity::transit) {
        if (d.destination.empty()) throw ParseError("decision: transit without destination");
        a.destination = d.destination;
        if (d.transport_mode.empty()) throw ParseError("decision: transit without transport mode");
        a.mode = stamina::transit_mode_from_string(d.transport_mode);
    } else {
        if (d.end_time) {
            if (*d.end_time <= state.time_min)
                throw ParseError("decision: end time " + format_hhmm(*d.end_time) +
                                 " not after current time " + format_hhmm(state.time_min));
            a.duration_min = *d.end_time - state.time_min;
        } else if (a.kind == Activity::rest) {
            throw ParseError("decision: rest requires an end time");
        }
        // dine/sightsee without an end time fall back to provider durations
    }
    return a;
}

int first_entry_start(const Plan& plan, int day, int fallback) {
    for (const PlanEntry& e : plan.entries)
        if (e.day == day) return e.start_time;
    return fallback;
}

int arrival_minute(const Plan& plan, const PoiIndex* pois, const SimConfig& config) {
    for (const PlanEntry& e : plan.entries) {
        if (e.day != 1) continue;
        if (places_equal(e.location, plan.origin_terminal, pois)) return e.start_time;
        break;  // first day-1 entry is not the terminal; fall back
    }
    return config.default_arrival_min;
}

}  // namespace

Trace run_simulation(const Plan& plan, const TravelerProfile& profile, TravelerPolicy& policy,
                     const Providers& providers, const SimConfig& config) {
    check_profile(profile);
    policy.set_decision_timeout(config.decision_timeout_sec);

    Trace trace;
    trace.city = plan.city;
    trace.profile_ref = profile.id;
    trace.seed = config.seed;

    TravelerState state;
    state.day = 1;
    state.time_min = arrival_minute(plan, providers.pois, config);
    state.location = display_name(plan.origin_terminal, providers.pois);
    state.stamina = stamina::apply_arrival_penalty(
        stamina::StaminaValue::full(profile.initial_stamina), profile.stamina_rule);
    state.outlay_minor = 0;
    state.event = Event{EventKind::arrival, 1, state.time_min, state.time_min,
                        0, state.location, "inter-city arrival"};
    trace.states.push_back(state);

    std::set<std::string> visited_pois;
    int steps_today = 0;

    auto abort_with = [&](const std::string& reason) {
        trace.aborted = true;
        trace.abort_reason = reason;
    };

    while (!trace.aborted) {
        ActionOptions options;
        options.legal = legal_actions(state, plan, providers.pois);
        options.destinations = candidate_destinations(state, plan, providers.pois);
        options.transit_target = infer_next_planned_location(state, plan, providers.pois);
        try {
            if (!options.transit_target.empty() && providers.transit)
                options.transit = providers.transit->query(state.location, options.transit_target,
                                                           state.time_min);
            if (providers.dining)
                options.dining = providers.dining->nearby(state.location, state.time_min);
            if (options.legal.count(Activity::sightsee) && providers.sightsee && providers.pois)
                options.sightsee = providers.sightsee->experience(
                    *providers.pois->resolve(state.location), profile, state);
        } catch (const std::exception& e) {
            abort_with(std::string("provider failure: ") + e.what());
            break;
        }

        DecisionRecord record;
        if (steps_today >= config.step_cap_per_day) {
            trace.truncated = true;
            record.forced = true;
            record.decision.decision = "day_end";
            record.decision.raw = json{{"decision", "day_end"}, {"forced", true}};
        } else {
            try {
                record.decision = policy.decide(trace.states, plan, options);
            } catch (const std::exception& e) {
                abort_with(std::string("decision error: ") + e.what());
                break;
            }
        }

        if (record.decision.decision == "day_end") {
            trace.decisions.push_back(record);
            Event ev{EventKind::day_end, state.day, state.time_min, state.time_min,
                     0, state.location, ""};
            if (state.day >= plan.days) {
                state.event = ev;
                trace.states.push_back(state);
                break;  // journey complete
            }
            state.day += 1;
            state.time_min = first_entry_start(plan, state.day, config.day_start_min);
            // Overnight: eight hours of resting-rate recovery, capped.
            state.stamina = stamina::apply_activity(state.stamina, profile.stamina_rule,
                                                    Activity::rest, 8 * 60);
            ev.day = state.day;
            state.event = ev;
            trace.states.push_back(state);
            steps_today = 0;
            continue;
        }

        try {
            const Action action = to_action(record.decision, state);
            if (action.kind == Activity::sightsee && providers.pois) {
                if (const POI* poi = providers.pois->resolve(state.location))
                    record.revisit = visited_pois.count(poi->id) > 0;
            }
            StepResult result = step(state, action, providers, profile);
            if (action.kind == Activity::sightsee && providers.pois)
                if (const POI* poi = providers.pois->resolve(state.location))
                    visited_pois.insert(poi->id);
            trace.decisions.push_back(record);
            state = result.state;
            trace.states.push_back(state);
            steps_today += 1;
        } catch (const EnvironmentError& e) {
            trace.decisions.push_back(record);
            abort_with(std::string("provider failure: ") + e.what());
        } catch (const std::exception& e) {
            trace.decisions.push_back(record);
            abort_with(std::string("illegal decision: ") + e.what());
        }
    }

    return trace;
}

std::vector<Trajectory> extract_simulated_trajectory(const Trace& trace) {
    std::vector<Trajectory> out;
    for (const TravelerState& s : trace.states) {
        if (s.event.kind == EventKind::day_end) continue;
        if (out.empty() || out.back().day != s.day) out.push_back(Trajectory{s.day, {}});
        Trajectory& day = out.back();
        // Transit items carry the arrival time, stationary events their start.
        const int t = s.event.kind == EventKind::transit ? s.event.end_min : s.event.start_min;
        const std::string loc = normalize_place(s.location);
        if (!day.items.empty() && day.items.back().location == loc) continue;
        day.items.push_back(TrajectoryItem{t, loc});
    }
    return out;
}

// --- Trace serialization -------------------------------------------------------

namespace {

constexpr int kTraceSchemaVersion = 1;

json event_to_json(const Event& e) {
    return json{{"kind", to_string(e.kind)},     {"day", e.day},
                {"start", format_hhmm(e.start_min)}, {"end", format_hhmm(e.end_min)},
                {"cost", e.cost_minor},          {"location", e.location},
                {"detail", e.detail}};
}

Event event_from_json(const json& j) {
    Event e;
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    e.day = j.at("day").get<int>();
    e.start_min = parse_hhmm(j.at("start").get<std::string>());
    e.end_min = parse_hhmm(j.at("end").get<std::string>());
    e.cost_minor = j.at("cost").get<long long>();
    e.location = j.at("location").get<std::string>();
    e.detail = j.at("detail").get<std::string>();
    return e;
}

json state_to_json(const TravelerState& s) {
    return json{{"type", "state"},
                {"day", s.day},
                {"time", format_hhmm(s.time_min)},
                {"location", s.location},
                {"stamina", s.stamina.value},
                {"stamina_cap", s.stamina.cap},
                {"outlay", s.outlay_minor},
                {"event", event_to_json(s.event)}};
}

TravelerState state_from_json(const json& j) {
    TravelerState s;
    s.day = j.at("day").get<int>();
    s.time_min = parse_hhmm(j.at("time").get<std::string>());
    s.location = j.at("location").get<std::string>();
    s.stamina.value = j.at("stamina").get<double>();
    s.stamina.cap = j.at("stamina_cap").get<double>();
    s.outlay_minor = j.at("outlay").get<long long>();
    s.event = event_from_json(j.at("event"));
    return s;
}

json scores_to_json(const metrics::DimScores& d) {
    return json{{"ex", d.ex}, {"it", d.it}, {"ar", d.ar}, {"st", d.st}, {"co", d.co}};
}

metrics::DimScores scores_from_json(const json& j) {
    metrics::DimScores d;
    d.ex = j.at("ex").get<double>();
    d.it = j.at("it").get<double>();
    d.ar = j.at("ar").get<double>();
    d.st = j.at("st").get<double>();
    d.co = j.at("co").get<double>();
    return d;
}

json feedback_to_json(const metrics::FeedbackRecord& f) {
    json j{{"type", "feedback"},
           {"granularity", metrics::to_string(f.granularity)},
           {"day", f.day},
           {"scores", scores_to_json(f.scores)},
           {"commentary", f.commentary},
           {"clamped", f.clamped}};
    if (f.poi) j["poi"] = *f.poi;
    return j;
}

metrics::FeedbackRecord feedback_from_json(const json& j) {
    metrics::FeedbackRecord f;
    const std::string g = j.at("granularity").get<std::string>();
    f.granularity = g == "per_poi"   ? metrics::Granularity::per_poi
                    : g == "per_day" ? metrics::Granularity::per_day
                                     : metrics::Granularity::per_trip;
    f.day = j.at("day").get<int>();
    f.scores = scores_from_json(j.at("scores"));
    f.commentary = j.at("commentary").get<std::string>();
    f.clamped = j.at("clamped").get<bool>();
    if (j.contains("poi")) f.poi = j.at("poi").get<std::string>();
    return f;
}

}  // namespace

std::string serialize_trace(const Trace& trace) {
    std::ostringstream out;
    json header{{"type", "header"},
                {"schema_version", kTraceSchemaVersion},
                {"city", trace.city},
                {"profile", trace.profile_ref},
                {"seed", trace.seed},
                {"provenance", trace.provenance.is_null() ? json::object() : trace.provenance}};
    out << header.dump() << '\n';

    // states[0], then (decision i, state i+1) pairs; dangling decisions of an
    // aborted run follow the last state.
    const size_t pairs = std::min(trace.decisions.size(),
                                  trace.states.empty() ? 0 : trace.states.size() - 1);
    if (!trace.states.empty()) out << state_to_json(trace.states[0]).dump() << '\n';
    for (size_t i = 0; i < pairs; ++i) {
        json d{{"type", "decision"},
               {"index", i},
               {"record", decision_to_json(trace.decisions[i].decision)},
               {"thought", trace.decisions[i].decision.thought},
               {"revisit", trace.decisions[i].revisit},
               {"forced", trace.decisions[i].forced}};
        out << d.dump() << '\n';
        out << state_to_json(trace.states[i + 1]).dump() << '\n';
    }
    for (size_t i = pairs; i < trace.decisions.size(); ++i) {
        json d{{"type", "decision"},
               {"index", i},
               {"record", decision_to_json(trace.decisions[i].decision)},
               {"thought", trace.decisions[i].decision.thought},
               {"revisit", trace.decisions[i].revisit},
               {"forced", trace.decisions[i].forced}};
        out << d.dump() << '\n';
    }
    for (const auto& f : trace.feedback) out << feedback_to_json(f).dump() << '\n';

    json end{{"type", "end"},
             {"aborted", trace.aborted},
             {"abort_reason", trace.abort_reason},
             {"truncated", trace.truncated}};
    out << end.dump() << '\n';
    return out.str();
}

Trace parse_trace_text(const std::string& jsonl) {
    Trace trace;
    std::istringstream in(jsonl);
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError("trace: line is not valid JSON");
        const std::string type = j.value("type", "");
        if (type == "header") {
            if (j.at("schema_version").get<int>() != kTraceSchemaVersion)
                throw ParseError("trace: unsupported schema version");
            trace.city = j.at("city").get<std::string>();
            trace.profile_ref = j.at("profile").get<std::string>();
            trace.seed = j.at("seed").get<uint64_t>();
            trace.provenance = j.value("provenance", json::object());
            saw_header = true;
        } else if (type == "state") {
            trace.states.push_back(state_from_json(j));
        } else if (type == "decision") {
            DecisionRecord r;
            r.decision = parse_decision_json(j.at("record"), j.value("thought", ""));
            r.revisit = j.value("revisit", false);
            r.forced = j.value("forced", false);
            trace.decisions.push_back(std::move(r));
        } else if (type == "feedback") {
            trace.feedback.push_back(feedback_from_json(j));
        } else if (type == "end") {
            trace.aborted = j.at("aborted").get<bool>();
            trace.abort_reason = j.at("abort_reason").get<std::string>();
            trace.truncated = j.at("truncated").get<bool>();
        } else {
            throw ParseError("trace: unknown record type '" + type + "'");
        }
    }
    if (!saw_header) throw ParseError("trace: missing header line");
    return trace;
}

}  // namespace travelsim::sandbox
