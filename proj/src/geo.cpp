#include "travelsim/geo.hpp"

#include <cmath>

namespace travelsim {

namespace {
constexpr double kDegToRad = M_PI / 180.0;
}

void check_geo(const GeoPoint& p) {
    if (!std::isfinite(p.lat) || !std::isfinite(p.lon))
        throw ArgumentError("coordinate is not finite");
    if (p.lat < -90.0 || p.lat > 90.0)
        throw ArgumentError("latitude " + std::to_string(p.lat) + " outside [-90, 90]");
    if (p.lon < -180.0 || p.lon > 180.0)
        throw ArgumentError("longitude " + std::to_string(p.lon) + " outside [-180, 180]");
}

double haversine(const GeoPoint& a, const GeoPoint& b) {
    check_geo(a);
    check_geo(b);
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = (b.lat - a.lat) * kDegToRad;
    const double dlam = (b.lon - a.lon) * kDegToRad;

    const double sp = std::sin(0.5 * dphi);
    const double sl = std::sin(0.5 * dlam);
    const double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
    return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

double bearing_deg(const GeoPoint& from, const GeoPoint& to) {
    check_geo(from);
    check_geo(to);
    const double phi_s = from.lat * kDegToRad;
    const double phi_t = to.lat * kDegToRad;
    const double dlam = (to.lon - from.lon) * kDegToRad;

    const double y = std::sin(dlam) * std::cos(phi_t);
    const double x = std::cos(phi_s) * std::sin(phi_t) -
                     std::sin(phi_s) * std::cos(phi_t) * std::cos(dlam);
    const double theta = std::atan2(y, x) / kDegToRad;
    double norm = std::fmod(theta + 360.0, 360.0);
    if (norm >= 360.0) norm -= 360.0;  // fmod can round up to exactly 360
    return norm;
}

std::string compass_direction(double bearing) {
    if (!std::isfinite(bearing) || bearing < 0.0 || bearing >= 360.0)
        throw ArgumentError("bearing " + std::to_string(bearing) + " outside [0, 360)");
    const int idx = static_cast<int>(std::lround(bearing / 45.0)) % 8;
    return kCompassPoints[static_cast<size_t>(idx)];
}

}  // namespace travelsim
