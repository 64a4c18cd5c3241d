#include "travelsim/trajectory.hpp"

namespace travelsim {

std::vector<Trajectory> extract_planned_trajectory(const Plan& plan) {
    std::vector<Trajectory> out;
    for (const PlanEntry& e : plan.entries) {
        if (out.empty() || out.back().day != e.day) {
            out.push_back(Trajectory{e.day, {}});
        }
        Trajectory& day = out.back();
        const std::string loc = normalize_place(e.location);
        if (!day.items.empty() && day.items.back().location == loc) continue;
        day.items.push_back(TrajectoryItem{e.start_time, loc});
    }
    return out;
}

}  // namespace travelsim
