#pragma once

#include <cstdio>
#include <string>

#include "travelsim/errors.hpp"

namespace travelsim {

constexpr int kMinutesPerDay = 1440;

// "HH:MM" -> minutes since midnight. Accepts 00:00 .. 23:59.
inline int parse_hhmm(const std::string& s) {
    int h = 0, m = 0;
    char colon = 0;
    if (std::sscanf(s.c_str(), "%d%c%d", &h, &colon, &m) != 3 || colon != ':')
        throw ParseError("bad time literal '" + s + "', expected HH:MM");
    if (h < 0 || h > 23 || m < 0 || m > 59)
        throw ParseError("time '" + s + "' out of range");
    return h * 60 + m;
}

inline std::string format_hhmm(int minutes) {
    if (minutes < 0 || minutes >= kMinutesPerDay)
        throw ArgumentError("minutes " + std::to_string(minutes) + " outside a day");
    char buf[6];
    std::snprintf(buf, sizeof(buf), "%02d:%02d", minutes / 60, minutes % 60);
    return buf;
}

}  // namespace travelsim
