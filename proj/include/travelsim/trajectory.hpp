#pragma once

#include <string>
#include <vector>

#include "travelsim/plan.hpp"

namespace travelsim {

struct TrajectoryItem {
    int time = 0;          // minutes since midnight, [0, 1440)
    std::string location;  // normalized place name
};

struct Trajectory {
    int day = 0;
    std::vector<TrajectoryItem> items;  // sorted by time
};

// Time-location pairs of the planned itinerary, one trajectory per day.
// Consecutive entries at the same (normalized) place collapse into the first,
// so a stay does not repeat the location.
std::vector<Trajectory> extract_planned_trajectory(const Plan& plan);

}  // namespace travelsim
