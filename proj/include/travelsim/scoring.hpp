#pragma once

#include <span>
#include <string>
#include <vector>

#include "travelsim/metrics.hpp"
#include "travelsim/sandbox.hpp"

namespace travelsim::scoring {

struct EvalRequest {
    metrics::Granularity granularity = metrics::Granularity::per_trip;
    int day = 0;
    std::string poi;  // per_poi only
    std::span<const sandbox::TravelerState> window;
    const TravelerProfile* profile = nullptr;
};

struct EvalResult {
    metrics::DimScores scores;
    std::string commentary;
};

class Evaluator {
  public:
    virtual ~Evaluator() = default;
    virtual EvalResult assess(const EvalRequest& request) = 0;
};

// One per-POI record per sightseeing event, one per-day record per day, one
// per-trip record. Out-of-range scores are clamped to [0, 100] and flagged.
std::vector<metrics::FeedbackRecord> collect_feedback(const sandbox::Trace& trace,
                                                      const TravelerProfile& profile,
                                                      Evaluator& evaluator);

struct ScoreCard {
    double cph = 0.0;
    double cpl = 0.0;
    double fea = 0.0;      // TPSS
    double per_agg = 0.0;
    metrics::DimScores per_dims;
    std::array<bool, 4> cpl_breakdown{};
    double reward = 0.0;
    bool format_ok = false;  // CPL structural criteria 1-3
    std::vector<std::string> flags;
};

// Assembles every metric for one (plan, trace) pair. `posts` maps POI
// locations to blog text for CPH.
ScoreCard compute_scorecard(const Plan& plan, const sandbox::Trace& trace,
                            const std::map<std::string, std::string>& posts,
                            const std::vector<metrics::FeedbackRecord>& feedback,
                            const metrics::PerWeights& weights = {},
                            const metrics::MealJudge& judge = metrics::rule_based_meal_judge,
                            const metrics::SimilarityProvider& sim = metrics::tf_cosine,
                            const PoiIndex* pois = nullptr);

nlohmann::json scorecard_to_json(const ScoreCard& card);

// Single CSV row (with header) for table exports.
std::string scorecard_csv(const ScoreCard& card, const std::string& city,
                          const std::string& profile_ref);

}  // namespace travelsim::scoring
