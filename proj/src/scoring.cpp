#include "travelsim/scoring.hpp"

#include <algorithm>
#include <sstream>

namespace travelsim::scoring {

using metrics::DimScores;
using metrics::FeedbackRecord;
using metrics::Granularity;
using sandbox::EventKind;
using sandbox::TravelerState;

namespace {

DimScores clamp_scores(const DimScores& s, bool* clamped) {
    auto one = [&](double v) {
        if (v < 0.0 || v > 100.0) {
            *clamped = true;
            return std::clamp(v, 0.0, 100.0);
        }
        return v;
    };
    return DimScores{one(s.ex), one(s.it), one(s.ar), one(s.st), one(s.co)};
}

}  // namespace

std::vector<FeedbackRecord> collect_feedback(const sandbox::Trace& trace,
                                             const TravelerProfile& profile,
                                             Evaluator& evaluator) {
    if (trace.states.empty()) throw ArgumentError("collect_feedback: empty trace");

    std::vector<FeedbackRecord> records;
    auto assess = [&](Granularity g, int day, const std::string& poi, size_t begin, size_t end) {
        EvalRequest req;
        req.granularity = g;
        req.day = day;
        req.poi = poi;
        req.window = std::span<const TravelerState>(trace.states.data() + begin, end - begin);
        req.profile = &profile;
        EvalResult res = evaluator.assess(req);

        FeedbackRecord rec;
        rec.granularity = g;
        rec.day = day;
        if (!poi.empty()) rec.poi = poi;
        rec.commentary = res.commentary;
        rec.clamped = false;
        rec.scores = clamp_scores(res.scores, &rec.clamped);
        records.push_back(std::move(rec));
    };

    int last_day = 0;
    size_t day_begin = 0;
    for (size_t i = 0; i < trace.states.size(); ++i) {
        const TravelerState& s = trace.states[i];
        if (s.day != last_day) {
            if (last_day > 0) assess(Granularity::per_day, last_day, "", day_begin, i);
            last_day = s.day;
            day_begin = i;
        }
        if (s.event.kind == EventKind::sightsee && s.event.day == s.day)
            assess(Granularity::per_poi, s.day, s.event.location, i, i + 1);
    }
    if (last_day > 0) assess(Granularity::per_day, last_day, "", day_begin, trace.states.size());
    assess(Granularity::per_trip, 0, "", 0, trace.states.size());
    return records;
}

ScoreCard compute_scorecard(const Plan& plan, const sandbox::Trace& trace,
                            const std::map<std::string, std::string>& posts,
                            const std::vector<FeedbackRecord>& feedback,
                            const metrics::PerWeights& weights, const metrics::MealJudge& judge,
                            const metrics::SimilarityProvider& sim, const PoiIndex* pois) {
    ScoreCard card;

    const metrics::CplResult cpl_result = metrics::cpl(plan, judge, pois);
    card.cpl = cpl_result.score;
    card.cpl_breakdown = cpl_result.breakdown;
    if (cpl_result.judge_indeterminate) card.flags.push_back("cpl:judge_indeterminate");
    card.format_ok =
        cpl_result.breakdown[0] && cpl_result.breakdown[1] && cpl_result.breakdown[2];

    try {
        const metrics::CphResult cph_result = metrics::cph(plan, posts, sim);
        card.cph = cph_result.score;
        for (const std::string& poi : cph_result.missing_posts)
            card.flags.push_back("cph:missing_post:" + poi);
    } catch (const ArgumentError&) {
        card.cph = 0.0;
        card.flags.push_back("cph:no_sightseeing_pois");
    }

    card.fea = metrics::tpss(extract_planned_trajectory(plan),
                             sandbox::extract_simulated_trajectory(trace));

    // PER: trip score, per-day scores, and per-day means of the POI records.
    // A day without any POI visit falls back to its own day score.
    const FeedbackRecord* trip = nullptr;
    std::map<int, const FeedbackRecord*> day_records;
    std::map<int, std::vector<const FeedbackRecord*>> poi_records;
    for (const FeedbackRecord& r : feedback) {
        switch (r.granularity) {
            case Granularity::per_trip: trip = &r; break;
            case Granularity::per_day: day_records[r.day] = &r; break;
            case Granularity::per_poi: poi_records[r.day].push_back(&r); break;
        }
        if (r.clamped) card.flags.push_back("feedback:clamped");
    }
    if (!trip || day_records.empty())
        throw ArgumentError("compute_scorecard: feedback lacks trip or day records");

    std::vector<DimScores> day_scores, poi_day_scores;
    for (const auto& [day, rec] : day_records) {
        day_scores.push_back(rec->scores);
        auto it = poi_records.find(day);
        if (it == poi_records.end() || it->second.empty()) {
            poi_day_scores.push_back(rec->scores);
            continue;
        }
        DimScores mean;
        for (const FeedbackRecord* p : it->second) {
            mean.ex += p->scores.ex;
            mean.it += p->scores.it;
            mean.ar += p->scores.ar;
            mean.st += p->scores.st;
            mean.co += p->scores.co;
        }
        const double n = static_cast<double>(it->second.size());
        poi_day_scores.push_back(
            DimScores{mean.ex / n, mean.it / n, mean.ar / n, mean.st / n, mean.co / n});
    }

    card.per_dims = metrics::aggregate_per(trip->scores, day_scores, poi_day_scores, weights);
    card.per_agg = metrics::aggregate_dimensions(card.per_dims);
    card.reward = metrics::reward(card.per_agg / 100.0, card.format_ok);
    return card;
}

nlohmann::json scorecard_to_json(const ScoreCard& card) {
    return nlohmann::json{
        {"cph", card.cph},
        {"cpl", card.cpl},
        {"fea", card.fea},
        {"per_agg", card.per_agg},
        {"per_dims",
         {{"ex", card.per_dims.ex},
          {"it", card.per_dims.it},
          {"ar", card.per_dims.ar},
          {"st", card.per_dims.st},
          {"co", card.per_dims.co}}},
        {"cpl_breakdown",
         {{"terminal_anchoring", card.cpl_breakdown[0]},
          {"hotel_anchoring", card.cpl_breakdown[1]},
          {"guidance_format", card.cpl_breakdown[2]},
          {"meals", card.cpl_breakdown[3]}}},
        {"reward", card.reward},
        {"format_ok", card.format_ok},
        {"flags", card.flags}};
}

std::string scorecard_csv(const ScoreCard& card, const std::string& city,
                          const std::string& profile_ref) {
    std::ostringstream out;
    out << "city,profile,cph,cpl,fea,per_ex,per_it,per_ar,per_st,per_co,per_agg,reward\n";
    out << city << ',' << profile_ref << ',' << card.cph << ',' << card.cpl << ',' << card.fea
        << ',' << card.per_dims.ex << ',' << card.per_dims.it << ',' << card.per_dims.ar << ','
        << card.per_dims.st << ',' << card.per_dims.co << ',' << card.per_agg << ','
        << card.reward << '\n';
    return out.str();
}

}  // namespace travelsim::scoring
