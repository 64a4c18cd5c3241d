#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "travelsim/errors.hpp"

namespace travelsim::stamina {

enum class TransitMode { bus_metro, taxi, walking, cycling };

std::string to_string(TransitMode m);
TransitMode transit_mode_from_string(const std::string& s);  // accepts common synonyms

enum class ActivityKind { transit, rest, dine, sightsee };

std::string to_string(ActivityKind a);
ActivityKind activity_from_string(const std::string& s);

// Per-traveler-type exertion/recovery rates. Hourly rates are pro-rated by
// minutes; dining is a flat per-event delta.
struct StaminaRule {
    double sightseeing_per_hr = 0.0;
    double dining_per_event = 0.0;
    double resting_per_hr = 0.0;
    std::map<TransitMode, double> transit_per_hr;
    std::set<TransitMode> forbidden_modes;
    double arrival_penalty = 2.0;
};

// Current stamina, clamped into [0, cap]. cap is the profile's initial stamina.
struct StaminaValue {
    double value = 0.0;
    double cap = 0.0;

    static StaminaValue full(double cap);
};

// Applies one activity's delta and clamps into [0, cap].
// `mode` is required for transit and must not be forbidden.
StaminaValue apply_activity(StaminaValue s, const StaminaRule& rule, ActivityKind activity,
                            int duration_min, std::optional<TransitMode> mode = std::nullopt);

// One-time inter-city arrival exhaustion, floor-clamped at 0.
StaminaValue apply_arrival_penalty(StaminaValue s, const StaminaRule& rule);

// Stamina-to-state label. 6.0 itself falls into "Good".
std::string stamina_state(double value);

}  // namespace travelsim::stamina
