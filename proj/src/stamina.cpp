#include "travelsim/stamina.hpp"

#include <algorithm>
#include <cmath>

namespace travelsim::stamina {

std::string to_string(TransitMode m) {
    switch (m) {
        case TransitMode::bus_metro: return "bus_metro";
        case TransitMode::taxi: return "taxi";
        case TransitMode::walking: return "walking";
        case TransitMode::cycling: return "cycling";
    }
    throw ArgumentError("unknown transit mode");
}

TransitMode transit_mode_from_string(const std::string& s) {
    std::string k;
    k.reserve(s.size());
    for (char c : s) k.push_back(c == '/' || c == '-' || c == ' ' ? '_' : static_cast<char>(std::tolower(c)));
    if (k == "bus_metro" || k == "bus" || k == "metro" || k == "subway" || k == "public_transport" ||
        k == "public")
        return TransitMode::bus_metro;
    if (k == "taxi" || k == "cab") return TransitMode::taxi;
    if (k == "walking" || k == "walk" || k == "on_foot") return TransitMode::walking;
    if (k == "cycling" || k == "bike" || k == "bicycle" || k == "cycle") return TransitMode::cycling;
    throw ModeError("unknown transport mode '" + s + "'");
}

std::string to_string(ActivityKind a) {
    switch (a) {
        case ActivityKind::transit: return "transit";
        case ActivityKind::rest: return "rest";
        case ActivityKind::dine: return "dine";
        case ActivityKind::sightsee: return "sightsee";
    }
    throw ArgumentError("unknown activity");
}

ActivityKind activity_from_string(const std::string& s) {
    if (s == "transit") return ActivityKind::transit;
    if (s == "rest") return ActivityKind::rest;
    if (s == "dine") return ActivityKind::dine;
    if (s == "sightsee") return ActivityKind::sightsee;
    throw ArgumentError("unknown activity '" + s + "'");
}

StaminaValue StaminaValue::full(double cap) {
    if (!(cap > 0.0) || !std::isfinite(cap)) throw ArgumentError("stamina cap must be positive");
    return StaminaValue{cap, cap};
}

namespace {
StaminaValue clamped(double value, double cap) {
    return StaminaValue{std::clamp(value, 0.0, cap), cap};
}
}  // namespace

StaminaValue apply_activity(StaminaValue s, const StaminaRule& rule, ActivityKind activity,
                            int duration_min, std::optional<TransitMode> mode) {
    if (duration_min < 0) throw ArgumentError("negative duration");
    const double hours = duration_min / 60.0;

    double delta = 0.0;
    switch (activity) {
        case ActivityKind::sightsee:
            delta = rule.sightseeing_per_hr * hours;
            break;
        case ActivityKind::rest:
            delta = rule.resting_per_hr * hours;
            break;
        case ActivityKind::dine:
            delta = rule.dining_per_event;  // flat, duration-independent
            break;
        case ActivityKind::transit: {
            if (!mode) throw ArgumentError("transit requires a mode");
            if (rule.forbidden_modes.count(*mode))
                throw ModeError("mode '" + to_string(*mode) + "' is forbidden for this traveler");
            auto it = rule.transit_per_hr.find(*mode);
            if (it == rule.transit_per_hr.end())
                throw ModeError("no stamina rate for mode '" + to_string(*mode) + "'");
            delta = it->second * hours;
            break;
        }
    }
    return clamped(s.value + delta, s.cap);
}

StaminaValue apply_arrival_penalty(StaminaValue s, const StaminaRule& rule) {
    return clamped(s.value - rule.arrival_penalty, s.cap);
}

std::string stamina_state(double value) {
    if (value < 0.0) throw ArgumentError("stamina value must be >= 0");
    if (value > 6.0) return "Energetic";
    if (value >= 4.0) return "Good";
    if (value >= 2.0) return "Slightly Tired";
    return "Very Tired";
}

}  // namespace travelsim::stamina
