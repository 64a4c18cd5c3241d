#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "travelsim/stamina.hpp"
#include "travelsim/types.hpp"

namespace travelsim {

using Activity = stamina::ActivityKind;

struct PlanEntry {
    int day = 1;                      // >= 1
    int start_time = 0;               // minutes since midnight, [0, 1440)
    std::optional<int> end_time;      // if present, >= start_time, same day
    std::string location;             // POI id or free-form place name
    Activity activity = Activity::rest;
    std::string guidance;             // per-POI sightseeing guidance text
};

struct Plan {
    std::string city;
    int days = 1;
    std::string hotel;            // POI id
    std::string origin_terminal;  // POI id (station/airport)
    std::string traveler_ref;
    std::vector<PlanEntry> entries;  // sorted by (day, start_time)
};

// Parses the canonical plan document. Entries are stably sorted by
// (day, start_time); all other schema violations raise ParseError naming the
// field. When `pois` is given, hotel and origin_terminal must resolve
// (ReferenceError otherwise).
Plan parse_plan(const nlohmann::json& doc, const PoiIndex* pois = nullptr);
Plan parse_plan_text(const std::string& text, const PoiIndex* pois = nullptr);

// Inverse of parse_plan on valid plans (round-trip identity).
nlohmann::json serialize_plan(const Plan& plan);

struct CriteriaConfig {
    bool check_anchoring = true;   // journey starts and ends at origin_terminal
    bool check_hotel_days = true;  // middle days begin and end at the hotel
    bool check_guidance = true;    // every sightseeing entry carries guidance
};

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<CriterionResult> checks;

    bool all_passed() const;
    const CriterionResult* find(const std::string& name) const;
};

// Pure structural validation (CPL criteria 1-3). Never throws on failures;
// the report carries them. `pois` lets entry locations match POI ids through
// their display names.
ValidationReport validate_plan(const Plan& plan, const CriteriaConfig& config = {},
                               const PoiIndex* pois = nullptr);

// True when `location` names the same place as POI `poi_id` (id match or
// normalized-name match through the index).
bool location_matches_poi(const std::string& location, const std::string& poi_id,
                          const PoiIndex* pois);

}  // namespace travelsim
