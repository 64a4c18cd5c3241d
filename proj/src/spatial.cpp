#include "travelsim/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace travelsim::spatial {

namespace {

double sq_haversine(const GeoPoint& a, const GeoPoint& b) {
    const double d = haversine(a, b);
    return d * d;
}

GeoPoint mean_point(const std::vector<POI>& pois, const std::vector<size_t>& members) {
    GeoPoint c;
    for (size_t i : members) {
        c.lat += pois[i].location.lat;
        c.lon += pois[i].location.lon;
    }
    c.lat /= static_cast<double>(members.size());
    c.lon /= static_cast<double>(members.size());
    return c;
}

// D^2-weighted seeding. Points already chosen carry weight 0; a degenerate
// all-zero weight vector falls back to the first unchosen index.
std::vector<GeoPoint> kmeanspp_seed(const std::vector<POI>& pois, int k, std::mt19937_64& rng) {
    const size_t n = pois.size();
    std::vector<GeoPoint> centers;
    std::vector<bool> chosen(n, false);

    std::uniform_int_distribution<size_t> first(0, n - 1);
    size_t idx = first(rng);
    centers.push_back(pois[idx].location);
    chosen[idx] = true;

    std::vector<double> d2(n, 0.0);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            if (chosen[i]) {
                d2[i] = 0.0;
                continue;
            }
            double best = std::numeric_limits<double>::max();
            for (const GeoPoint& c : centers) best = std::min(best, sq_haversine(pois[i].location, c));
            d2[i] = best;
            total += best;
        }
        size_t pick = n;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            double acc = 0.0;
            for (size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (!chosen[i] && acc >= target) {
                    pick = i;
                    break;
                }
            }
        }
        if (pick == n) {
            for (size_t i = 0; i < n; ++i)
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
        }
        centers.push_back(pois[pick].location);
        chosen[pick] = true;
    }
    return centers;
}

}  // namespace

int choose_k(int num_days, int num_pois) {
    if (num_days < 1 || num_pois < 1) throw ArgumentError("choose_k: counts must be >= 1");
    return std::clamp(num_days, 1, num_pois);
}

std::vector<Cluster> cluster_pois(const std::vector<POI>& pois, int k, uint64_t seed,
                                  LloydTrace* trace) {
    const size_t n = pois.size();
    if (k < 1 || static_cast<size_t>(k) > n)
        throw ArgumentError("cluster_pois: k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(n) + "]");

    std::mt19937_64 rng(seed);
    std::vector<GeoPoint> centers = kmeanspp_seed(pois, k, rng);
    std::vector<int> assign(n, -1);

    constexpr int kMaxIterations = 100;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        bool changed = false;
        double wcss = 0.0;
        for (size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_haversine(pois[i].location, centers[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_haversine(pois[i].location, centers[static_cast<size_t>(c)]);
                if (d < best_d) {  // strict: ties keep the lower id
                    best_d = d;
                    best = c;
                }
            }
            wcss += best_d;
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (trace) trace->wcss_per_iteration.push_back(wcss);
        if (!changed) break;

        std::vector<std::vector<size_t>> members(static_cast<size_t>(k));
        for (size_t i = 0; i < n; ++i) members[static_cast<size_t>(assign[i])].push_back(i);
        for (int c = 0; c < k; ++c) {
            auto& m = members[static_cast<size_t>(c)];
            if (!m.empty()) {
                centers[static_cast<size_t>(c)] = mean_point(pois, m);
                continue;
            }
            // Re-seed an emptied cluster with the point farthest from its centroid.
            size_t far_i = 0;
            double far_d = -1.0;
            for (size_t i = 0; i < n; ++i) {
                const double d =
                    sq_haversine(pois[i].location, centers[static_cast<size_t>(assign[i])]);
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            centers[static_cast<size_t>(c)] = pois[far_i].location;
        }
    }

    std::vector<std::vector<size_t>> members(static_cast<size_t>(k));
    for (size_t i = 0; i < n; ++i) members[static_cast<size_t>(assign[i])].push_back(i);
    // Duplicate coordinates can starve a cluster even after re-seeding; keep
    // the partition total by borrowing from the largest cluster.
    for (auto& m : members) {
        if (!m.empty()) continue;
        auto biggest = std::max_element(members.begin(), members.end(),
                                        [](const auto& a, const auto& b) { return a.size() < b.size(); });
        m.push_back(biggest->back());
        biggest->pop_back();
    }

    std::vector<Cluster> out;
    for (int c = 0; c < k; ++c) {
        Cluster cl;
        cl.id = c;
        for (size_t i : members[static_cast<size_t>(c)]) cl.members.push_back(pois[i].id);
        cl.centroid = mean_point(pois, members[static_cast<size_t>(c)]);
        out.push_back(std::move(cl));
    }
    return out;
}

double path_length(const std::vector<std::string>& path, const std::vector<NamedPoint>& coords) {
    std::map<std::string, GeoPoint> lookup;
    for (const NamedPoint& p : coords) lookup[p.name] = p.point;
    double total = 0.0;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        auto a = lookup.find(path[i]);
        auto b = lookup.find(path[i + 1]);
        if (a == lookup.end() || b == lookup.end())
            throw ArgumentError("path_length: unknown location in path");
        total += haversine(a->second, b->second);
    }
    return total;
}

std::vector<std::string> two_opt_improve(std::vector<std::string> path,
                                         const std::vector<NamedPoint>& coords,
                                         const std::string& start, const std::string& end) {
    if (path.empty() || path.front() != start || path.back() != end)
        throw ArgumentError("two_opt_improve: path endpoints must be start and end");

    std::map<std::string, GeoPoint> lookup;
    for (const NamedPoint& p : coords) lookup[p.name] = p.point;
    auto dist = [&](const std::string& a, const std::string& b) {
        return haversine(lookup.at(a), lookup.at(b));
    };

    const size_t n = path.size();
    if (n < 4) return path;

    // Steepest descent: apply the single best interior reversal per pass until
    // no reversal shortens the path. Endpoints never move.
    bool improved = true;
    while (improved) {
        improved = false;
        double best_delta = -1e-12;
        size_t best_i = 0, best_j = 0;
        for (size_t i = 1; i + 1 < n; ++i) {
            for (size_t j = i + 1; j + 1 < n; ++j) {
                const double delta = dist(path[i - 1], path[j]) + dist(path[i], path[j + 1]) -
                                     dist(path[i - 1], path[i]) - dist(path[j], path[j + 1]);
                if (delta < best_delta) {
                    best_delta = delta;
                    best_i = i;
                    best_j = j;
                    improved = true;
                }
            }
        }
        if (improved)
            std::reverse(path.begin() + static_cast<long>(best_i),
                         path.begin() + static_cast<long>(best_j) + 1);
    }
    return path;
}

namespace {

std::vector<std::string> nearest_neighbor_path(const std::vector<NamedPoint>& others,
                                               const NamedPoint& start, const NamedPoint& end) {
    std::vector<std::string> path{start.name};
    std::vector<bool> used(others.size(), false);
    GeoPoint at = start.point;
    for (size_t step = 0; step < others.size(); ++step) {
        size_t best = others.size();
        double best_d = std::numeric_limits<double>::max();
        for (size_t i = 0; i < others.size(); ++i) {
            if (used[i]) continue;
            const double d = haversine(at, others[i].point);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        used[best] = true;
        path.push_back(others[best].name);
        at = others[best].point;
    }
    path.push_back(end.name);
    return path;
}

}  // namespace

RouteResult find_shortest_route(const std::vector<NamedPoint>& locations,
                                const std::string& start, const std::string& end) {
    const NamedPoint* s = nullptr;
    const NamedPoint* e = nullptr;
    std::vector<NamedPoint> others;
    std::map<std::string, int> seen;
    for (const NamedPoint& p : locations) {
        if (++seen[p.name] > 1)
            throw ArgumentError("find_shortest_route: duplicate location '" + p.name + "'");
        if (p.name == start) s = &p;
        if (p.name == end) e = &p;
        if (p.name != start && p.name != end) others.push_back(p);
    }
    if (!s) throw ArgumentError("find_shortest_route: start '" + start + "' not in locations");
    if (!e) throw ArgumentError("find_shortest_route: end '" + end + "' not in locations");

    std::vector<std::string> best_path;
    if (others.size() < 6) {
        std::vector<size_t> order(others.size());
        std::iota(order.begin(), order.end(), 0);
        double best_total = std::numeric_limits<double>::max();
        do {
            double total = haversine(s->point, others.empty() ? e->point : others[order[0]].point);
            for (size_t i = 0; i + 1 < order.size(); ++i)
                total += haversine(others[order[i]].point, others[order[i + 1]].point);
            if (!others.empty()) total += haversine(others[order.back()].point, e->point);
            if (total < best_total) {
                best_total = total;
                best_path.clear();
                best_path.push_back(s->name);
                for (size_t i : order) best_path.push_back(others[i].name);
                best_path.push_back(e->name);
            }
        } while (std::next_permutation(order.begin(), order.end()));
    } else {
        best_path = nearest_neighbor_path(others, *s, *e);
        best_path = two_opt_improve(std::move(best_path), locations, start, end);
    }

    RouteResult result;
    result.path = std::move(best_path);
    std::map<std::string, GeoPoint> lookup;
    for (const NamedPoint& p : locations) lookup[p.name] = p.point;
    for (size_t i = 0; i + 1 < result.path.size(); ++i) {
        const double d = haversine(lookup.at(result.path[i]), lookup.at(result.path[i + 1]));
        result.step_distances.push_back(d);
        result.total_distance += d;
    }
    return result;
}

std::vector<BearingResult> directions_distances(const GeoPoint& start,
                                                const std::vector<NamedPoint>& targets) {
    std::vector<BearingResult> out;
    out.reserve(targets.size());
    for (const NamedPoint& t : targets) {
        BearingResult r;
        r.target = t.name;
        r.distance_km = haversine(start, t.point);
        if (t.point == start) {
            r.bearing_deg = 0.0;
            r.direction = "N";
        } else {
            r.bearing_deg = bearing_deg(start, t.point);
            r.direction = compass_direction(r.bearing_deg);
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace travelsim::spatial
