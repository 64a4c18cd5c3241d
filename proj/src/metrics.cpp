#include "travelsim/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace travelsim::metrics {

std::string to_string(Granularity g) {
    switch (g) {
        case Granularity::per_poi: return "per_poi";
        case Granularity::per_day: return "per_day";
        case Granularity::per_trip: return "per_trip";
    }
    throw ArgumentError("unknown granularity");
}

void PerWeights::check() const {
    if (std::abs(alpha1 + alpha2 - 1.0) > 1e-9)
        throw ArgumentError("per weights: alpha1 + alpha2 must be 1");
    if (std::abs(beta + gamma - 1.0) > 1e-9)
        throw ArgumentError("per weights: beta + gamma must be 1");
}

double time_diff_score(int t1_min, int t2_min) {
    const double diff_hours = std::abs(t2_min - t1_min) / 60.0;
    return std::max(0.0, 1.0 - diff_hours / 2.0);
}

double match_score(const TrajectoryItem& a, const TrajectoryItem& b) {
    const double time_score = time_diff_score(a.time, b.time);
    const double location_score = a.location == b.location ? 1.0 : 0.0;
    return (time_score + location_score) / 2.0;
}

double tpss_day(const Trajectory& planned, const Trajectory& simulated) {
    const size_t m = planned.items.size();
    const size_t n = simulated.items.size();
    if (m == 0 && n == 0) return 100.0;  // nothing planned, nothing done
    if (m == 0 || n == 0) return 0.0;

    std::vector<std::vector<double>> dp(m + 1, std::vector<double>(n + 1, 0.0));
    for (size_t i = 1; i <= m; ++i) {
        for (size_t j = 1; j <= n; ++j) {
            const double score = match_score(planned.items[i - 1], simulated.items[j - 1]);
            dp[i][j] = std::max({dp[i - 1][j], dp[i][j - 1], dp[i - 1][j - 1] + score});
        }
    }

    const double max_score = static_cast<double>(std::min(m, n));
    const double similarity = dp[m][n] / max_score;
    const double completeness_penalty =
        static_cast<double>(std::min(m, n)) / static_cast<double>(std::max(m, n));
    return similarity * completeness_penalty * 100.0;
}

double tpss(const std::vector<Trajectory>& planned_days,
            const std::vector<Trajectory>& simulated_days) {
    if (planned_days.empty() && simulated_days.empty())
        throw ArgumentError("tpss: both journeys are empty");

    std::map<int, const Trajectory*> planned, simulated;
    for (const Trajectory& t : planned_days) planned[t.day] = &t;
    for (const Trajectory& t : simulated_days) simulated[t.day] = &t;

    std::set<int> days;
    for (const auto& [d, _] : planned) days.insert(d);
    for (const auto& [d, _] : simulated) days.insert(d);

    double total = 0.0;
    for (int d : days) {
        auto p = planned.find(d);
        auto s = simulated.find(d);
        if (p == planned.end() || s == simulated.end()) continue;  // one-sided day scores 0
        total += tpss_day(*p->second, *s->second);
    }
    return total / static_cast<double>(days.size());
}

namespace {

template <typename F>
DimScores map_dims(F&& f) {
    DimScores out;
    out.ex = f(&DimScores::ex);
    out.it = f(&DimScores::it);
    out.ar = f(&DimScores::ar);
    out.st = f(&DimScores::st);
    out.co = f(&DimScores::co);
    return out;
}

}  // namespace

DimScores aggregate_per(const DimScores& trip, const std::vector<DimScores>& day_scores,
                        const std::vector<DimScores>& poi_day_scores, const PerWeights& w) {
    w.check();
    if (day_scores.empty() || day_scores.size() != poi_day_scores.size())
        throw ArgumentError("aggregate_per: day and poi score lists must align, N >= 1");

    const double n = static_cast<double>(day_scores.size());
    return map_dims([&](double DimScores::* dim) {
        double day_sum = 0.0;
        for (size_t i = 0; i < day_scores.size(); ++i)
            day_sum += w.beta * day_scores[i].*dim + w.gamma * poi_day_scores[i].*dim;
        const double v = w.alpha1 * trip.*dim + w.alpha2 * day_sum / n;
        return std::clamp(v, 0.0, 100.0);
    });
}

double aggregate_dimensions(const DimScores& d) {
    return (d.ex + d.it + d.ar + d.st + d.co) / 5.0;
}

double reward(double per_norm, bool format_ok) {
    if (!(per_norm >= 0.0 && per_norm <= 1.0))
        throw ArgumentError("reward: per_norm must lie in [0, 1]");
    const double base = 2.0 * (per_norm - 0.5);
    return format_ok ? base : base - 1.0;
}

namespace {

bool overlaps_window(const PlanEntry& e, int win_start, int win_end) {
    const int end = e.end_time.value_or(e.start_time);
    return e.start_time <= win_end && end >= win_start;
}

}  // namespace

std::optional<bool> rule_based_meal_judge(const Plan& plan) {
    for (int day = 1; day <= plan.days; ++day) {
        bool lunch = false, dinner = false;
        for (const PlanEntry& e : plan.entries) {
            if (e.day != day || e.activity != Activity::dine) continue;
            lunch = lunch || overlaps_window(e, 11 * 60, 14 * 60);
            dinner = dinner || overlaps_window(e, 17 * 60, 21 * 60);
        }
        if (!lunch || !dinner) return false;
    }
    return true;
}

CplResult cpl(const Plan& plan, const MealJudge& judge, const PoiIndex* pois) {
    CplResult out;
    const ValidationReport report = validate_plan(plan, CriteriaConfig{}, pois);
    out.breakdown[0] = report.find("terminal_anchoring")->passed;
    out.breakdown[1] = report.find("hotel_anchoring")->passed;
    out.breakdown[2] = report.find("guidance_format")->passed;

    std::optional<bool> meals;
    try {
        meals = judge ? judge(plan) : std::nullopt;
    } catch (const std::exception&) {
        meals = std::nullopt;
    }
    if (meals.has_value()) {
        out.breakdown[3] = *meals;
    } else {
        out.breakdown[3] = false;
        out.judge_indeterminate = true;
    }

    for (bool b : out.breakdown)
        if (b) out.score += 25.0;
    return out;
}

namespace {

std::map<std::string, double> term_frequencies(const std::string& text) {
    std::map<std::string, double> tf;
    std::string token;
    auto flush = [&] {
        if (!token.empty()) {
            tf[token] += 1.0;
            token.clear();
        }
    };
    for (unsigned char c : text) {
        if (c < 0x80 && !std::isalnum(c)) {
            flush();
        } else {
            token.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
        }
    }
    flush();
    return tf;
}

}  // namespace

double tf_cosine(const std::string& a, const std::string& b) {
    const auto ta = term_frequencies(a);
    const auto tb = term_frequencies(b);
    if (ta.empty() || tb.empty()) return 0.0;

    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [term, f] : ta) {
        na += f * f;
        auto it = tb.find(term);
        if (it != tb.end()) dot += f * it->second;
    }
    for (const auto& [term, f] : tb) nb += f * f;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

CphResult cph(const Plan& plan, const std::map<std::string, std::string>& posts,
              const SimilarityProvider& sim) {
    // Distinct sightseeing locations in plan order; guidance concatenated per POI.
    std::vector<std::string> order;
    std::map<std::string, std::string> guidance;
    for (const PlanEntry& e : plan.entries) {
        if (e.activity != Activity::sightsee) continue;
        auto [it, inserted] = guidance.emplace(e.location, e.guidance);
        if (inserted)
            order.push_back(e.location);
        else if (!e.guidance.empty())
            it->second += it->second.empty() ? e.guidance : "\n" + e.guidance;
    }
    if (order.empty()) throw ArgumentError("cph: plan contains no sightseeing POIs");

    CphResult out;
    double total = 0.0;
    for (const std::string& poi : order) {
        auto post = posts.find(poi);
        if (post == posts.end()) post = posts.find(normalize_place(poi));
        if (post == posts.end()) {
            out.missing_posts.push_back(poi);
            continue;  // contributes 0
        }
        total += std::clamp(sim(guidance[poi], post->second), 0.0, 1.0) * 100.0;
    }
    out.score = total / static_cast<double>(order.size());
    return out;
}

}  // namespace travelsim::metrics
