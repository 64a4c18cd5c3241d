#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "travelsim/plan.hpp"
#include "travelsim/trajectory.hpp"

namespace travelsim::metrics {

// The five traveler-feedback dimensions. All values live on [0, 100].
struct DimScores {
    double ex = 0.0;  // experience
    double it = 0.0;  // interest
    double ar = 0.0;  // arrangement
    double st = 0.0;  // stamina
    double co = 0.0;  // cost

    static DimScores constant(double v) { return {v, v, v, v, v}; }
    bool operator==(const DimScores&) const = default;
};

enum class Granularity { per_poi, per_day, per_trip };

std::string to_string(Granularity g);

struct FeedbackRecord {
    Granularity granularity = Granularity::per_trip;
    int day = 0;
    std::optional<std::string> poi;  // per_poi records carry the POI
    DimScores scores;
    std::string commentary;
    bool clamped = false;  // evaluator reported an out-of-range score
};

struct PerWeights {
    double alpha1 = 0.6;  // whole-travel weight
    double alpha2 = 0.4;  // per-day aggregate weight
    double beta = 0.6;    // day-score weight within a day
    double gamma = 0.4;   // poi-score weight within a day

    void check() const;  // alpha1+alpha2 = 1, beta+gamma = 1
};

// --- Trajectory similarity -------------------------------------------------

// max(0, 1 - diff_hours / 2); times are minutes within the same day.
double time_diff_score(int t1_min, int t2_min);

// (time score + exact-location score) / 2.
double match_score(const TrajectoryItem& a, const TrajectoryItem& b);

// Travel Plan Similarity Score for one day, in [0, 100]. DP alignment score
// normalized by min(m, n), penalized by min(m, n)/max(m, n). Both sides empty
// scores 100; exactly one side empty scores 0.
double tpss_day(const Trajectory& planned, const Trajectory& simulated);

// Mean of per-day scores over the union of day indices; a day present on one
// side only scores 0. Both journeys empty is an error.
double tpss(const std::vector<Trajectory>& planned_days,
            const std::vector<Trajectory>& simulated_days);

// --- Score aggregation -----------------------------------------------------

// S_PER = a1 * S_trip + a2 * (1/N) * sum_i(b * S_day_i + g * S_POI_day_i),
// applied per dimension. day_scores and poi_day_scores must align.
DimScores aggregate_per(const DimScores& trip, const std::vector<DimScores>& day_scores,
                        const std::vector<DimScores>& poi_day_scores, const PerWeights& w = {});

// Unweighted mean of the five dimensions.
double aggregate_dimensions(const DimScores& d);

// Training reward: 2*(per_norm - 0.5), minus 1 when the format is wrong.
// per_norm must lie in [0, 1].
double reward(double per_norm, bool format_ok);

// --- Rule-based plan metrics -----------------------------------------------

// Criterion 4 judge: does every day schedule lunch and dinner? nullopt means
// the judge failed; the criterion is then scored 0 and flagged.
using MealJudge = std::function<std::optional<bool>(const Plan&)>;

// Rule-based default: per day, one dine entry overlapping 11:00-14:00 and one
// overlapping 17:00-21:00.
std::optional<bool> rule_based_meal_judge(const Plan& plan);

struct CplResult {
    double score = 0.0;            // 25 * criteria passed
    std::array<bool, 4> breakdown{};  // anchoring, hotel days, guidance, meals
    bool judge_indeterminate = false;
};

CplResult cpl(const Plan& plan, const MealJudge& judge = rule_based_meal_judge,
              const PoiIndex* pois = nullptr);

// Text similarity provider contract: (text, text) -> [-1, 1].
using SimilarityProvider = std::function<double(const std::string&, const std::string&)>;

// Deterministic fallback: cosine over L2-normalized term-frequency vectors
// after case folding and punctuation stripping.
double tf_cosine(const std::string& a, const std::string& b);

struct CphResult {
    double score = 0.0;  // [0, 100]
    std::vector<std::string> missing_posts;  // POIs scored 0 for lack of a post
};

// Mean similarity between each POI's plan guidance and its blog post, x100.
// POIs are the distinct sightseeing locations of the plan.
CphResult cph(const Plan& plan, const std::map<std::string, std::string>& posts,
              const SimilarityProvider& sim = tf_cosine);

}  // namespace travelsim::metrics
