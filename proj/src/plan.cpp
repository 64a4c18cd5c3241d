#include "travelsim/plan.hpp"

#include <algorithm>

#include "travelsim/timeutil.hpp"

namespace travelsim {

namespace {

using nlohmann::json;

const json& require_field(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require_field(obj, key, where);
    if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

int require_int(const json& obj, const char* key, const std::string& where) {
    const json& v = require_field(obj, key, where);
    if (!v.is_number_integer()) throw ParseError(where + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

PlanEntry parse_entry(const json& e, size_t idx) {
    const std::string where = "entries[" + std::to_string(idx) + "]";
    if (!e.is_object()) throw ParseError(where + ": entry must be an object");

    PlanEntry out;
    out.day = require_int(e, "day", where);
    if (out.day < 1) throw ParseError(where + ": field 'day' must be >= 1");

    out.start_time = parse_hhmm(require_string(e, "start_time", where));
    if (auto it = e.find("end_time"); it != e.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError(where + ": field 'end_time' must be HH:MM");
        out.end_time = parse_hhmm(it->get<std::string>());
        if (*out.end_time < out.start_time)
            throw ParseError(where + ": field 'end_time' precedes start_time");
    }

    out.location = require_string(e, "location", where);
    if (out.location.empty()) throw ParseError(where + ": field 'location' is empty");
    out.activity = stamina::activity_from_string(require_string(e, "activity", where));
    if (auto it = e.find("guidance"); it != e.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError(where + ": field 'guidance' must be a string");
        out.guidance = it->get<std::string>();
    }
    return out;
}

}  // namespace

Plan parse_plan(const json& doc, const PoiIndex* pois) {
    if (!doc.is_object()) throw ParseError("plan: document must be a JSON object");

    Plan plan;
    plan.city = require_string(doc, "city", "plan");
    plan.days = require_int(doc, "days", "plan");
    if (plan.days < 1) throw ParseError("plan: field 'days' must be >= 1");
    plan.hotel = require_string(doc, "hotel", "plan");
    plan.origin_terminal = require_string(doc, "origin_terminal", "plan");
    plan.traveler_ref = require_string(doc, "traveler_ref", "plan");

    const json& entries = require_field(doc, "entries", "plan");
    if (!entries.is_array() || entries.empty())
        throw ParseError("plan: field 'entries' must be a non-empty array");
    for (size_t i = 0; i < entries.size(); ++i) plan.entries.push_back(parse_entry(entries[i], i));

    std::stable_sort(plan.entries.begin(), plan.entries.end(),
                     [](const PlanEntry& a, const PlanEntry& b) {
                         return a.day != b.day ? a.day < b.day : a.start_time < b.start_time;
                     });

    int max_day = 0;
    for (const PlanEntry& e : plan.entries) max_day = std::max(max_day, e.day);
    if (max_day != plan.days)
        throw ParseError("plan: field 'days' is " + std::to_string(plan.days) +
                         " but entries span " + std::to_string(max_day) + " day(s)");

    if (pois) {
        if (!pois->resolve(plan.hotel))
            throw ReferenceError("plan: hotel '" + plan.hotel + "' is not a known POI");
        if (!pois->resolve(plan.origin_terminal))
            throw ReferenceError("plan: origin_terminal '" + plan.origin_terminal +
                                 "' is not a known POI");
    }
    return plan;
}

Plan parse_plan_text(const std::string& text, const PoiIndex* pois) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError("plan: document is not valid JSON");
    return parse_plan(doc, pois);
}

json serialize_plan(const Plan& plan) {
    json entries = json::array();
    for (const PlanEntry& e : plan.entries) {
        json j{{"day", e.day},
               {"start_time", format_hhmm(e.start_time)},
               {"location", e.location},
               {"activity", stamina::to_string(e.activity)}};
        if (e.end_time) j["end_time"] = format_hhmm(*e.end_time);
        if (!e.guidance.empty()) j["guidance"] = e.guidance;
        entries.push_back(std::move(j));
    }
    return json{{"city", plan.city},
                {"days", plan.days},
                {"hotel", plan.hotel},
                {"origin_terminal", plan.origin_terminal},
                {"traveler_ref", plan.traveler_ref},
                {"entries", std::move(entries)}};
}

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CriterionResult& c) { return c.passed; });
}

const CriterionResult* ValidationReport::find(const std::string& name) const {
    for (const CriterionResult& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

bool location_matches_poi(const std::string& location, const std::string& poi_id,
                          const PoiIndex* pois) {
    if (normalize_place(location) == normalize_place(poi_id)) return true;
    if (!pois) return false;
    const POI* ref = pois->resolve(poi_id);
    const POI* loc = pois->resolve(location);
    return ref && loc && ref->id == loc->id;
}

namespace {

std::vector<const PlanEntry*> entries_of_day(const Plan& plan, int day) {
    std::vector<const PlanEntry*> out;
    for (const PlanEntry& e : plan.entries)
        if (e.day == day) out.push_back(&e);
    return out;
}

}  // namespace

ValidationReport validate_plan(const Plan& plan, const CriteriaConfig& config,
                               const PoiIndex* pois) {
    ValidationReport report;

    if (config.check_anchoring) {
        CriterionResult c{"terminal_anchoring", true, ""};
        auto first_day = entries_of_day(plan, 1);
        auto last_day = entries_of_day(plan, plan.days);
        if (first_day.empty() || !location_matches_poi(first_day.front()->location,
                                                       plan.origin_terminal, pois)) {
            c.passed = false;
            c.detail = "journey does not start at the origin terminal";
        } else if (last_day.empty() || !location_matches_poi(last_day.back()->location,
                                                             plan.origin_terminal, pois)) {
            c.passed = false;
            c.detail = "journey does not end at the origin terminal";
        }
        report.checks.push_back(std::move(c));
    }

    if (config.check_hotel_days) {
        CriterionResult c{"hotel_anchoring", true, ""};
        for (int day = 2; day < plan.days && c.passed; ++day) {
            auto es = entries_of_day(plan, day);
            if (es.empty()) {
                c.passed = false;
                c.detail = "day " + std::to_string(day) + " has no entries";
            } else if (!location_matches_poi(es.front()->location, plan.hotel, pois)) {
                c.passed = false;
                c.detail = "day " + std::to_string(day) + " does not begin at the hotel";
            } else if (!location_matches_poi(es.back()->location, plan.hotel, pois)) {
                c.passed = false;
                c.detail = "day " + std::to_string(day) + " does not end at the hotel";
            }
        }
        report.checks.push_back(std::move(c));
    }

    if (config.check_guidance) {
        CriterionResult c{"guidance_format", true, ""};
        for (const PlanEntry& e : plan.entries) {
            if (e.activity == Activity::sightsee && e.guidance.empty()) {
                c.passed = false;
                c.detail = "no guidance for '" + e.location + "'";
                break;
            }
        }
        report.checks.push_back(std::move(c));
    }

    return report;
}

}  // namespace travelsim
