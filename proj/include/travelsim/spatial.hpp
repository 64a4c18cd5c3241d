#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "travelsim/types.hpp"

namespace travelsim::spatial {

struct Cluster {
    int id = 0;
    std::vector<std::string> members;  // POI ids, non-empty
    GeoPoint centroid;                 // arithmetic mean of member coordinates
};

struct RouteResult {
    std::vector<std::string> path;      // location names, endpoints fixed
    double total_distance = 0.0;        // km, equals sum of step_distances
    std::vector<double> step_distances; // km, |path| - 1 entries
};

struct BearingResult {
    std::string target;
    std::string direction;      // one of the 8 compass points
    double distance_km = 0.0;
    double bearing_deg = 0.0;   // [0, 360)
};

struct NamedPoint {
    std::string name;
    GeoPoint point;
};

// Number of clusters: the day count clamped into [1, poi count].
int choose_k(int num_days, int num_pois);

// Optional instrumentation for cluster_pois: within-cluster sum of squared
// distances after every Lloyd assignment step.
struct LloydTrace {
    std::vector<double> wcss_per_iteration;
};

// k-means++ over squared haversine distances. Seeding and assignment are
// deterministic for a given seed; assignment ties break toward the lowest
// cluster id. Lloyd iterations run to an assignment fixpoint, capped at 100.
std::vector<Cluster> cluster_pois(const std::vector<POI>& pois, int k, uint64_t seed,
                                  LloydTrace* trace = nullptr);

// Open TSP path from `start` to `end` visiting every other location once.
// Fewer than 6 intermediates: exhaustive permutation optimum. Otherwise:
// nearest-neighbor construction refined by 2-opt. `start` and `end` may name
// the same location, giving a closed tour.
RouteResult find_shortest_route(const std::vector<NamedPoint>& locations,
                                const std::string& start, const std::string& end);

// Steepest-descent 2-opt over interior vertices only; endpoints stay fixed.
// Never increases total length.
std::vector<std::string> two_opt_improve(std::vector<std::string> path,
                                         const std::vector<NamedPoint>& coords,
                                         const std::string& start, const std::string& end);

// Compass direction and distance from `start` to each target. A target
// coincident with start reports distance 0 and direction "N".
std::vector<BearingResult> directions_distances(const GeoPoint& start,
                                                const std::vector<NamedPoint>& targets);

double path_length(const std::vector<std::string>& path, const std::vector<NamedPoint>& coords);

}  // namespace travelsim::spatial
