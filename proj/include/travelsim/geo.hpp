#pragma once

#include <array>
#include <cmath>
#include <string>

#include "travelsim/errors.hpp"

namespace travelsim {

// Mean Earth radius used for all great-circle math in this project.
constexpr double kEarthRadiusKm = 6371.0;

struct GeoPoint {
    double lat = 0.0;  // degrees, [-90, 90]
    double lon = 0.0;  // degrees, [-180, 180]

    bool operator==(const GeoPoint&) const = default;
};

// Throws ArgumentError unless both coordinates are finite and in range.
void check_geo(const GeoPoint& p);

// Great-circle distance in km (haversine).
//   a = sin^2(dphi/2) + cos(phi1) cos(phi2) sin^2(dlambda/2)
//   d = 2 R atan2(sqrt(a), sqrt(1-a))
double haversine(const GeoPoint& a, const GeoPoint& b);

// Initial bearing from `from` toward `to`, degrees clockwise from north in [0, 360).
//   theta = atan2(sin dl cos phi_t, cos phi_s sin phi_t - sin phi_s cos phi_t cos dl)
double bearing_deg(const GeoPoint& from, const GeoPoint& to);

// Eight-point compass table, index 0 = N, clockwise.
inline constexpr std::array<const char*, 8> kCompassPoints = {"N", "NE", "E", "SE",
                                                              "S", "SW", "W", "NW"};

// directions[round(bearing/45) mod 8]
std::string compass_direction(double bearing);

}  // namespace travelsim
